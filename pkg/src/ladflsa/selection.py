"""Degrees of freedom, information criteria and tuning-parameter search.

The number of nonzero fitted blocks is used as the degrees of freedom of
a fit.  With ``R = sum |y_i - mu_i|`` and ``K`` that count,

    AICR = R + K
    BIC  = R + K log(n) / 2
    GCV  = R / (1 - K / n)

The same L1-residual criteria are applied to least-squares fits so that
both estimators are tuned identically.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from ._kernels import grid_scan
from .model import DEFAULT_ZERO_TOL, FitResult, LossKind, TuningParams, as_signal
from .solver import fit_vector, solve, SolverOptions


class Criterion(str, enum.Enum):
    AICR = "aicr"
    BIC = "bic"
    GCV = "gcv"


@dataclass(frozen=True)
class CriterionValue:
    kind: Criterion
    value: float
    df_hat: int
    residual_l1: float
    n: int


def df_hat(fit: FitResult) -> int:
    """Number of nonzero blocks of the fit."""
    return fit.df_hat()


def criterion_value(residual_l1: float, k: int, n: int, kind) -> float:
    kind = Criterion(kind)
    if kind is Criterion.AICR:
        return residual_l1 + k
    if kind is Criterion.BIC:
        return residual_l1 + k * math.log(n) / 2.0
    if k >= n:
        raise ValueError("GCV undefined at saturation")
    return residual_l1 / (1.0 - k / n)


def criterion(fit: FitResult, kind, y=None) -> CriterionValue:
    """Evaluate ``kind`` for ``fit``.

    Without ``y`` the L1 residual of a LAD fit is recovered from its
    objective by subtracting the penalties; LS fits need ``y``.
    """
    mu = fit.mu_hat
    if y is not None:
        r = float(np.sum(np.abs(as_signal(y) - mu)))
    elif fit.loss_kind is LossKind.LAD:
        p = fit.params
        r = fit.objective - p.lambda1 * float(np.sum(np.abs(mu))) \
            - p.lambda2 * float(np.sum(np.abs(np.diff(mu))))
        r = max(r, 0.0)
    else:
        raise ValueError("least-squares fits need the observed data y")
    k = fit.df_hat()
    return CriterionValue(Criterion(kind), criterion_value(r, k, fit.n, kind), k, r, fit.n)


def _inclusive_range(start, stop, step):
    if step <= 0:
        raise ValueError("grid step must be positive")
    if stop < start:
        raise ValueError("empty grid range")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return np.round(start + step * np.arange(count), 12)


@dataclass(frozen=True)
class GridSpec:
    """Inclusive ``(start, stop, step)`` ranges for both penalties.

    ``lambda2 = None`` means the n-dependent default
    ``[sqrt(n / log n), sqrt(n)]`` with step 0.1.
    """

    lambda1: tuple[float, float, float] = (0.01, 0.5, 0.01)
    lambda2: tuple[float, float, float] | None = None
    lambda1_values_: tuple[float, ...] | None = None
    lambda2_values_: tuple[float, ...] | None = None

    @classmethod
    def from_values(cls, lambda1s, lambda2s) -> "GridSpec":
        l1 = tuple(sorted(float(v) for v in lambda1s))
        l2 = tuple(sorted(float(v) for v in lambda2s))
        if not l1 or not l2:
            raise ValueError("grid must be nonempty")
        return cls(lambda1_values_=l1, lambda2_values_=l2)

    def lambda1_values(self) -> np.ndarray:
        if self.lambda1_values_ is not None:
            return np.array(self.lambda1_values_)
        return _inclusive_range(*self.lambda1)

    def lambda2_values(self, n: int) -> np.ndarray:
        if self.lambda2_values_ is not None:
            return np.array(self.lambda2_values_)
        if self.lambda2 is not None:
            return _inclusive_range(*self.lambda2)
        if n < 3:
            raise ValueError("default lambda2 grid needs n >= 3")
        return _inclusive_range(math.sqrt(n / math.log(n)), math.sqrt(n), 0.1)

    def to_dict(self) -> dict:
        return {"lambda1": list(self.lambda1_values()),
                "lambda2": None if (self.lambda2 is None and self.lambda2_values_ is None)
                else list(self.lambda2_values(3))}


@dataclass
class Sweep:
    """Criterion table over a grid (rows follow lambda1, columns lambda2)."""

    lambda1: np.ndarray
    lambda2: np.ndarray
    residual_l1: np.ndarray
    df_hat: np.ndarray
    n: int

    def values(self, kind) -> np.ndarray:
        kind = Criterion(kind)
        k = self.df_hat.astype(float)
        if kind is Criterion.AICR:
            return self.residual_l1 + k
        if kind is Criterion.BIC:
            return self.residual_l1 + k * math.log(self.n) / 2.0
        with np.errstate(divide="ignore", invalid="ignore"):
            out = self.residual_l1 / (1.0 - k / self.n)
        out[self.df_hat >= self.n] = np.inf
        return out

    def rows(self):
        """Yield ``(lambda1, lambda2, residual_l1, df_hat, aicr, bic, gcv)``."""
        crit = [self.values(c) for c in Criterion]
        for p, l1 in enumerate(self.lambda1):
            for q, l2 in enumerate(self.lambda2):
                yield (float(l1), float(l2), float(self.residual_l1[p, q]),
                       int(self.df_hat[p, q]), *(float(c[p, q]) for c in crit))


def sweep(y, grid: GridSpec, loss_kind=LossKind.LAD,
          zero_tol: float = DEFAULT_ZERO_TOL) -> Sweep:
    y = np.ascontiguousarray(as_signal(y))
    l1 = np.ascontiguousarray(grid.lambda1_values(), dtype=float)
    l2 = np.ascontiguousarray(grid.lambda2_values(y.size), dtype=float)
    if l1.size == 0 or l2.size == 0 or np.any(l1 < 0) or np.any(l2 < 0):
        raise ValueError("grid must be nonempty and nonnegative")
    res = np.empty((l1.size, l2.size))
    dfs = np.empty((l1.size, l2.size), dtype=np.int64)
    grid_scan(y, l1, l2, LossKind(loss_kind) is LossKind.LS, zero_tol, res, dfs)
    return Sweep(l1, l2, res, dfs, y.size)


def select_from_sweep(sw: Sweep, kind) -> tuple[int, int]:
    """Grid index of the minimum; ties go to smaller lambda1, then lambda2."""
    vals = sw.values(kind)
    if not np.any(np.isfinite(vals)):
        raise ValueError("criterion undefined on the whole grid")
    flat = int(np.argmin(vals))
    return divmod(flat, vals.shape[1])


def grid_select(y, grid: GridSpec | None = None, kind=Criterion.BIC,
                loss_kind=LossKind.LAD, return_sweep: bool = False):
    """Exhaustive grid search; returns ``(params, fit, criterion_value)``."""
    y = as_signal(y)
    grid = grid or GridSpec()
    sw = sweep(y, grid, loss_kind)
    p, q = select_from_sweep(sw, kind)
    params = TuningParams(float(sw.lambda1[p]), float(sw.lambda2[q]))
    fit = solve(y, params, SolverOptions(loss_kind=loss_kind))
    cv = criterion(fit, kind, y)
    out = (params, fit, cv)
    return out + (sw,) if return_sweep else out


@dataclass(frozen=True)
class McDfEstimate:
    """Perturbation estimate of the generalized degrees of freedom.

    ``mean_df_hat`` is the average nonzero-block count over the same
    perturbed data sets, with its standard error.
    """

    df: float
    std_error: float
    samples: int
    tau: float
    mean_df_hat: float
    df_hat_se: float


def mc_df(y, params, tau: float | None = None, T: int = 500, seed: int = 0,
          loss_kind=LossKind.LAD, zero_tol: float = DEFAULT_ZERO_TOL) -> McDfEstimate:
    """Monte Carlo generalized df: ``sum_i cov(mu_i(y + d), d_i) / tau^2``.

    Perturbations ``d`` have independent ``N(0, tau^2)`` entries; replicate
    ``t`` draws from the stream seeded by ``(seed, t)``.  ``tau`` defaults
    to a tenth of the sample standard deviation of ``y``.
    """
    y = as_signal(y)
    if isinstance(params, tuple):
        params = TuningParams(*params)
    if tau is None:
        tau = 0.1 * float(np.std(y, ddof=1))
    if not tau > 0:
        raise ValueError("tau must be positive")
    if T < 2:
        raise ValueError("need at least two Monte Carlo samples")
    n = y.size
    D = np.empty((T, n))
    M = np.empty((T, n))
    K = np.empty(T)
    for t in range(T):
        D[t] = np.random.default_rng([seed, t]).normal(0.0, tau, n)
        mu = fit_vector(y + D[t], params.lambda1, params.lambda2, loss_kind)
        M[t] = mu
        jumps = np.concatenate(([True], mu[1:] != mu[:-1]))
        K[t] = np.count_nonzero(jumps & (np.abs(mu) > zero_tol))
    prod = (M - M.mean(axis=0)) * (D - D.mean(axis=0))
    cov = prod.sum(axis=0) / (T - 1)
    var_cov = prod.var(axis=0, ddof=1) / T
    df = float(cov.sum() / tau ** 2)
    se = float(np.sqrt(var_cov.sum()) / tau ** 2)
    return McDfEstimate(df, se, T, float(tau), float(K.mean()),
                        float(K.std(ddof=1) / math.sqrt(T)))
