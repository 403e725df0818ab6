"""Synthetic blocks benchmark, recovery metrics and series segmentation.

The benchmark signal has six blocks with levels ``(0, 2, -2, 3, 0, -2)``
produced by rounding a sum of steps.  Each replicate adds noise, divides
by the sample standard deviation, selects ``(lambda1, lambda2)`` on a
grid by an information criterion, scales the fit back and scores it
against the noiseless truth.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import logging
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .model import (DEFAULT_ZERO_TOL, REPORT_JUMP_TOL, FitResult, LossKind,
                    TrueModel, as_signal, blocks_of, sign_vector)
from .selection import Criterion, GridSpec, grid_select
from .theory import consistency_outcome

log = logging.getLogger(__name__)

STEP_LOCATIONS = (0.1, 0.23, 0.65, 0.76, 0.9)
STEP_HEIGHTS = (1.5, -3.0, 4.3, -3.1, -2.0)

# stream roles for per-replicate generators
ROLE_NOISE = 0


class NoiseFamily(str, enum.Enum):
    NORMAL = "normal"
    DOUBLE_EXPONENTIAL = "double_exponential"
    CAUCHY = "cauchy"


@dataclass(frozen=True)
class NoiseSpec:
    """Error law.  ``sigma`` is the standard deviation for the normal and
    double exponential families and a tenth of the multiplier on standard
    Cauchy draws for the Cauchy family."""

    family: NoiseFamily
    sigma: float
    seed: int | tuple[int, ...] = 0

    def __post_init__(self):
        object.__setattr__(self, "family", NoiseFamily(self.family))
        if not (self.sigma > 0 and math.isfinite(self.sigma)):
            raise ValueError("sigma must be positive")

    @property
    def scale(self) -> float:
        """Scale parameter handed to the underlying sampler."""
        if self.family is NoiseFamily.NORMAL:
            return self.sigma
        if self.family is NoiseFamily.DOUBLE_EXPONENTIAL:
            return self.sigma / math.sqrt(2.0)
        return 0.1 * self.sigma


def gen_noise(spec: NoiseSpec, n: int) -> np.ndarray:
    rng = np.random.default_rng(spec.seed)
    if spec.family is NoiseFamily.NORMAL:
        return rng.normal(0.0, spec.scale, n)
    if spec.family is NoiseFamily.DOUBLE_EXPONENTIAL:
        return rng.laplace(0.0, spec.scale, n)
    return spec.scale * rng.standard_cauchy(n)


def _round_half_away(x: np.ndarray) -> np.ndarray:
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def gen_blocks_signal(n: int) -> TrueModel:
    """Six-block step signal of length ``n``.

    Position ``i`` (1-based) has passed step ``j`` when ``i / n > t_j``;
    the sum of passed heights is rounded half away from zero.
    """
    if n < 20:
        raise ValueError("n too small to realise all six blocks (need n >= 20)")
    u = np.arange(1, n + 1) / n
    passed = u[:, None] > np.array(STEP_LOCATIONS)[None, :]
    mu0 = _round_half_away(passed.astype(float) @ np.array(STEP_HEIGHTS))
    mu0 = mu0 + 0.0  # normalise -0.0
    truth = TrueModel.from_vector(mu0)
    if truth.n_blocks != 6:
        raise ValueError(f"n={n} does not realise six blocks")
    return truth


def standardize(y) -> tuple[np.ndarray, float]:
    """Divide by the sample standard deviation; returns ``(y / s, s)``."""
    y = as_signal(y)
    if y.size < 2:
        raise ValueError("need at least two observations to standardise")
    s = float(np.std(y, ddof=1))
    if not s > 0:
        raise ValueError("zero variance: cannot standardise")
    return y / s, s


def lare(mu_hat, mu0) -> float:
    """Sum of absolute errors relative to the l1 norm of the truth."""
    mu_hat = as_signal(mu_hat, "mu_hat")
    mu0 = as_signal(mu0, "mu0")
    if mu_hat.shape != mu0.shape:
        raise ValueError("length mismatch")
    den = float(np.sum(np.abs(mu0)))
    if den == 0:
        raise ValueError("LARE undefined for zero truth")
    return float(np.sum(np.abs(mu_hat - mu0)) / den)


def _vector(fit) -> np.ndarray:
    return fit.mu_hat if isinstance(fit, FitResult) else as_signal(fit, "mu")


def jump_count(fit, jump_tol: float = REPORT_JUMP_TOL) -> int:
    """Number of adjacent differences of magnitude at least ``jump_tol``."""
    mu = _vector(fit)
    return int(np.count_nonzero(np.abs(np.diff(mu)) >= jump_tol))


class Recovery(str, enum.Enum):
    EXACT = "exact"
    WITHIN_K = "within_k"
    MISS = "miss"


def cfr_plus_k(fit, truth: TrueModel, k: int = 6, jump_tol: float = REPORT_JUMP_TOL,
               zero_tol: float = DEFAULT_ZERO_TOL) -> Recovery:
    """Classify recovery of the truth's block pattern.

    ``exact``: same jumps and same level signs.  ``within_k``: every true
    jump is found, inside each true block the longest fitted piece carries
    the true sign, and at most ``k`` fitted pieces differ (by more than
    ``jump_tol``) from the longest piece of their true block.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    mu = _vector(fit)
    if consistency_outcome(mu, truth, jump_tol, zero_tol).block_sign:
        return Recovery.EXACT
    est = blocks_of(mu, jump_tol, zero_tol)
    ref = truth.partition
    if not set(ref.jump_set) <= set(est.jump_set):
        return Recovery.MISS
    cuts = np.array(est.starts + (est.n,))
    spurious = 0
    for a, b, v in zip(ref.starts, ref.ends, ref.levels):
        inner = cuts[(cuts >= a) & (cuts <= b)]
        pieces = mu[inner[:-1]]
        main = pieces[int(np.argmax(np.diff(inner)))]
        if int(sign_vector(main, zero_tol)) != np.sign(v):
            return Recovery.MISS
        spurious += int(np.count_nonzero(np.abs(pieces - main) > jump_tol))
    if spurious > k:
        return Recovery.MISS
    return Recovery.WITHIN_K


# ---------------------------------------------------------------- benchmark

@dataclass(frozen=True)
class BenchConfig:
    n: int = 1000
    replicates: int = 100
    noise: tuple[NoiseSpec, ...] = (NoiseSpec(NoiseFamily.DOUBLE_EXPONENTIAL, 0.5),)
    grid: GridSpec = field(default_factory=GridSpec)
    methods: tuple[LossKind, ...] = (LossKind.LAD,)
    jump_tol: float = REPORT_JUMP_TOL
    cfr_slack: int = 6
    criterion: Criterion = Criterion.BIC
    seed: int = 0
    # levels within this of zero count as zero when scoring recovery;
    # None means the reporting resolution jump_tol
    zero_tol: float | None = None

    @property
    def level_zero_tol(self) -> float:
        return self.jump_tol if self.zero_tol is None else self.zero_tol

    def __post_init__(self):
        if self.replicates < 1:
            raise ValueError("replicates must be at least 1")
        if self.n < 10:
            raise ValueError("n must be at least 10")
        if not self.noise or not self.methods:
            raise ValueError("need at least one noise spec and one method")
        object.__setattr__(self, "methods", tuple(LossKind(m) for m in self.methods))
        object.__setattr__(self, "criterion", Criterion(self.criterion))

    @classmethod
    def from_dict(cls, d: dict) -> "BenchConfig":
        d = dict(d)
        known = {"n", "replicates", "noise", "grid", "methods", "jump_tol",
                 "cfr_slack", "criterion", "seed", "zero_tol"}
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown config fields: {sorted(extra)}")
        if "noise" in d:
            d["noise"] = tuple(NoiseSpec(e["family"], float(e["sigma"])) for e in d["noise"])
        if "methods" in d:
            d["methods"] = tuple(d["methods"])
        if "grid" in d:
            g = d["grid"] or {}
            d["grid"] = GridSpec(
                lambda1=tuple(g.get("lambda1", (0.01, 0.5, 0.01))),
                lambda2=None if g.get("lambda2") is None else tuple(g["lambda2"]))
        return cls(**d)

    @classmethod
    def load(cls, path) -> "BenchConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass(frozen=True)
class MetricsRow:
    family: str
    sigma: float
    method: str
    n: int
    replicates: int
    lare_mean: float
    lare_sd: float
    cfr_plus_k: float
    exact_recovery: float
    jump_mean: float
    jump_sd: float

    def __post_init__(self):
        for v in (self.cfr_plus_k, self.exact_recovery):
            if not 0 <= v <= 100:
                raise ValueError("percentages must lie in [0, 100]")


@dataclass(frozen=True)
class ReplicateResult:
    family: str
    sigma: float
    method: str
    replicate: int
    lambda1: float
    lambda2: float
    lare: float
    jumps: int
    recovery: str


class BenchmarkError(RuntimeError):
    pass


def replicate_seed(seed: int, noise_index: int, replicate: int, role: int = ROLE_NOISE):
    """Entropy for one replicate's generator; independent of the method so
    that every method sees the same data."""
    return (int(seed), int(noise_index), int(replicate), int(role))


def run_replicate(truth: TrueModel, noise: NoiseSpec, method: LossKind,
                  config: BenchConfig) -> tuple[FitResult, np.ndarray, float]:
    y = truth.mu0 + gen_noise(noise, truth.n)
    ys, s = standardize(y)
    _, fit, _ = grid_select(ys, config.grid, config.criterion, method)
    return fit, fit.mu_hat * s, s


def run_benchmark(config: BenchConfig):
    """Run every (noise, method) cell; returns ``(rows, replicate_results)``."""
    truth = gen_blocks_signal(config.n)
    rows: list[MetricsRow] = []
    reps: list[ReplicateResult] = []
    for ni, noise in enumerate(config.noise):
        for method in config.methods:
            lares, jumps, recov = [], [], []
            for r in range(config.replicates):
                spec = NoiseSpec(noise.family, noise.sigma,
                                 replicate_seed(config.seed, ni, r))
                try:
                    fit, mu, _ = run_replicate(truth, spec, method, config)
                except Exception as exc:  # abort the cell with context
                    raise BenchmarkError(
                        f"{noise.family.value} sigma={noise.sigma} {method.value}: "
                        f"replicate {r} failed: {exc}") from exc
                lares.append(lare(mu, truth.mu0))
                jumps.append(jump_count(mu, config.jump_tol))
                rec = cfr_plus_k(mu, truth, config.cfr_slack, config.jump_tol,
                                 config.level_zero_tol)
                recov.append(rec)
                reps.append(ReplicateResult(noise.family.value, noise.sigma, method.value, r,
                                            fit.params.lambda1, fit.params.lambda2,
                                            lares[-1], jumps[-1], rec.value))
            m = config.replicates
            sd = (lambda v: float(np.std(v, ddof=1)) if m > 1 else 0.0)
            rows.append(MetricsRow(
                family=noise.family.value, sigma=noise.sigma, method=method.value,
                n=config.n, replicates=m,
                lare_mean=float(np.mean(lares)), lare_sd=sd(lares),
                cfr_plus_k=100.0 * sum(x is not Recovery.MISS for x in recov) / m,
                exact_recovery=100.0 * sum(x is Recovery.EXACT for x in recov) / m,
                jump_mean=float(np.mean(jumps)), jump_sd=sd(jumps)))
            log.info("%s sigma=%g %s: LARE %.4f JUMP %.2f", noise.family.value,
                     noise.sigma, method.value, rows[-1].lare_mean, rows[-1].jump_mean)
    return rows, reps


# ------------------------------------------------------------------ output

def fmt(x) -> str:
    """Text form of a CSV/JSON scalar; floats use the shortest round-trip repr."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def write_csv(path, header, rows) -> None:
    Path(path).write_text(csv_text(header, rows))


def json_ready(obj):
    """Recursively convert numpy scalars and arrays to plain JSON values."""
    if isinstance(obj, dict):
        return {str(k): json_ready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [json_ready(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [json_ready(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, enum.Enum):
        return obj.value
    return obj


def metrics_table(rows):
    header = [f.name for f in MetricsRow.__dataclass_fields__.values()]
    return header, [[getattr(r, h) for h in header] for r in rows]


def replicates_table(reps):
    header = [f.name for f in ReplicateResult.__dataclass_fields__.values()]
    return header, [[getattr(r, h) for h in header] for r in reps]


# ------------------------------------------------------------ series input

@dataclass(frozen=True)
class Series:
    values: np.ndarray
    positions: np.ndarray | None
    dropped: int


def _column_index(header, spec, default):
    if spec is None:
        return default
    if isinstance(spec, int) or (isinstance(spec, str) and spec.isdigit()):
        i = int(spec)
        if not 0 <= i < len(header):
            raise ValueError(f"column {i} out of range")
        return i
    if spec not in header:
        raise ValueError(f"column {spec!r} not in header {header}")
    return header.index(spec)


def load_series_csv(path, column=None, position_column=None,
                    max_bad_fraction: float = 0.1) -> Series:
    """Read one numeric column of a delimited file with a header row.

    ``column`` defaults to the last column; ``position_column`` is
    optional.  Rows with a blank value are dropped and counted; rows whose
    value does not parse count as malformed and abort the read when they
    exceed ``max_bad_fraction`` of the data rows.
    """
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValueError(f"cannot read {path}: {exc}") from exc
    try:
        dialect = csv.Sniffer().sniff(text.splitlines()[0], delimiters=",;\t ")
    except (csv.Error, IndexError):
        dialect = csv.excel
    reader = csv.reader(io.StringIO(text), dialect)
    rows = [r for r in reader]
    if not rows:
        raise ValueError("empty file")
    header = [h.strip() for h in rows[0]]
    vi = _column_index(header, column, len(header) - 1)
    pi = _column_index(header, position_column, None)
    vals, pos = [], []
    dropped = bad = 0
    data = [r for r in rows[1:] if any(c.strip() for c in r)]
    for r in data:
        cell = r[vi].strip() if vi < len(r) else ""
        if cell == "" or cell.lower() in ("na", "nan"):
            dropped += 1
            continue
        try:
            v = float(cell.replace("−", "-"))
            p = float(r[pi]) if pi is not None else None
        except (ValueError, IndexError):
            bad += 1
            continue
        if not math.isfinite(v):
            bad += 1
            continue
        vals.append(v)
        pos.append(p)
    if dropped:
        log.warning("dropped %d rows with missing values", dropped)
    if bad:
        log.warning("skipped %d malformed rows", bad)
        if bad > max_bad_fraction * max(len(data), 1):
            raise ValueError(f"{bad} of {len(data)} rows are malformed")
    if not vals:
        raise ValueError("no numeric rows")
    positions = np.array(pos, dtype=float) if pi is not None else None
    return Series(np.array(vals), positions, dropped + bad)


# ------------------------------------------------------------- segmentation

def segment(y, grid: GridSpec | None = None, kind=Criterion.BIC,
            loss_kind=LossKind.LAD, jump_tol: float = REPORT_JUMP_TOL
            ) -> tuple[dict, FitResult]:
    """Select tuning parameters and describe the fitted segmentation.

    Returns a JSON-ready report (1-based inclusive block ranges) and the
    fit.  Steps of at most ``jump_tol`` are merged in the reported blocks;
    ``df_hat`` and the criterion refer to the exact fit.
    """
    y = as_signal(y)
    params, fit, cv = grid_select(y, grid, kind, loss_kind)
    part = blocks_of(fit.mu_hat, jump_tol)
    report = {
        "n": fit.n,
        "loss": LossKind(loss_kind).value,
        "lambda1": params.lambda1,
        "lambda2": params.lambda2,
        "criterion": {"kind": cv.kind.value, "value": cv.value},
        "df_hat": cv.df_hat,
        "jump_tol": jump_tol,
        "jumps": [i + 1 for i in part.jump_set],
        "blocks": [{"start": a + 1, "end": b, "level": v}
                   for a, b, v in zip(part.starts, part.ends, part.levels)],
    }
    return report, fit


def segment_table(y, fit: FitResult):
    return ["index", "y", "mu_hat"], [[i + 1, a, b] for i, (a, b)
                                      in enumerate(zip(as_signal(y), fit.mu_hat))]


def config_dict(config: BenchConfig) -> dict:
    d = asdict(config)
    d["noise"] = [{"family": s.family.value, "sigma": s.sigma} for s in config.noise]
    d["methods"] = [m.value for m in config.methods]
    d["criterion"] = config.criterion.value
    d["grid"] = {"lambda1": list(config.grid.lambda1),
                 "lambda2": None if config.grid.lambda2 is None else list(config.grid.lambda2)}
    return json_ready(d)
