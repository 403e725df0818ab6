"""Signals, tuning parameters and block partitions.

Every fitted or true signal in this package is described by the same
block structure: a partition of ``0..n-1`` into contiguous runs with a
level per run, the set of jump positions between runs and the set of
runs whose level is nonzero.  Indices are 0-based; a jump at ``i`` means
``mu[i] != mu[i-1]``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

#: Jump tolerance used when reporting jump counts (adjacent differences
#: below this are not counted as jumps).
REPORT_JUMP_TOL = 0.1
#: Jump tolerance for exact work: KKT checks, oracles, df extraction.
EXACT_JUMP_TOL = 0.0
#: Levels with magnitude at or below this are treated as zero.
DEFAULT_ZERO_TOL = 1e-8


class LossKind(str, enum.Enum):
    LAD = "lad"
    LS = "ls"


def as_signal(values, name: str = "y") -> np.ndarray:
    """Validate and return ``values`` as a finite 1-D float array."""
    y = np.asarray(values, dtype=float)
    if y.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    if y.size == 0:
        raise ValueError("empty signal")
    if not np.all(np.isfinite(y)):
        raise ValueError(f"{name} contains non-finite values")
    return y


@dataclass(frozen=True)
class TuningParams:
    """Penalty weights: ``lambda1`` on levels, ``lambda2`` on differences."""

    lambda1: float = 0.0
    lambda2: float = 0.0

    def __post_init__(self):
        for name in ("lambda1", "lambda2"):
            v = float(getattr(self, name))
            if not np.isfinite(v):
                raise ValueError(f"{name} must be finite")
            if v < 0:
                raise ValueError(f"{name} must be nonnegative, got {v}")
            object.__setattr__(self, name, v)


@dataclass(frozen=True)
class BlockPartition:
    """Contiguous block decomposition of a length-``n`` signal.

    ``starts[j]`` is the first index of block ``j`` and ``starts[j+1]``
    (or ``n``) is one past its last index.
    """

    starts: tuple[int, ...]
    levels: tuple[float, ...]
    n: int
    zero_tol: float = DEFAULT_ZERO_TOL

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("empty signal")
        if len(self.starts) != len(self.levels) or not self.starts:
            raise ValueError("starts and levels must be nonempty and of equal length")
        if self.starts[0] != 0:
            raise ValueError("first block must start at index 0")
        if any(b <= a for a, b in zip(self.starts, self.starts[1:])):
            raise ValueError("block starts must be strictly increasing")
        if self.starts[-1] >= self.n:
            raise ValueError("block starts exceed signal length")

    @property
    def n_blocks(self) -> int:
        return len(self.starts)

    @property
    def ends(self) -> tuple[int, ...]:
        """One-past-the-end index of every block."""
        return self.starts[1:] + (self.n,)

    @property
    def sizes(self) -> np.ndarray:
        return np.diff(np.array(self.starts + (self.n,)))

    @property
    def jump_set(self) -> tuple[int, ...]:
        return self.starts[1:]

    @property
    def nonzero_blocks(self) -> tuple[int, ...]:
        return tuple(j for j, v in enumerate(self.levels) if abs(v) > self.zero_tol)

    @property
    def block_index(self) -> np.ndarray:
        """Block number of every position."""
        return np.repeat(np.arange(self.n_blocks), self.sizes)

    def block_slices(self):
        return [slice(a, b) for a, b in zip(self.starts, self.ends)]

    def level_signs(self) -> np.ndarray:
        return sign_vector(np.array(self.levels), self.zero_tol)


def blocks_of(mu, jump_tol: float = EXACT_JUMP_TOL,
              zero_tol: float = DEFAULT_ZERO_TOL) -> BlockPartition:
    """Split ``mu`` into maximal runs whose consecutive differences are
    at most ``jump_tol``.

    A run's level is the value of its first entry.
    """
    mu = as_signal(mu, "mu")
    if jump_tol < 0 or zero_tol < 0:
        raise ValueError("tolerances must be nonnegative")
    jumps = np.flatnonzero(np.abs(np.diff(mu)) > jump_tol) + 1
    starts = (0,) + tuple(int(i) for i in jumps)
    levels = tuple(float(mu[s]) for s in starts)
    return BlockPartition(starts, levels, mu.size, zero_tol)


def expand(partition: BlockPartition, n: int | None = None) -> np.ndarray:
    """Piecewise-constant vector with value ``levels[j]`` on block ``j``."""
    if n is not None and n != partition.n:
        raise ValueError(f"partition covers {partition.n} positions, not {n}")
    return np.repeat(np.array(partition.levels, dtype=float), partition.sizes)


def sign_vector(x, zero_tol: float = 0.0) -> np.ndarray:
    """Elementwise sign in {-1, 0, 1}; entries with ``|x| <= zero_tol`` map to 0."""
    x = np.asarray(x, dtype=float)
    s = np.atleast_1d(np.sign(x).astype(int))
    s[np.atleast_1d(np.abs(x)) <= zero_tol] = 0
    return s.reshape(x.shape)


@dataclass(frozen=True)
class TrueModel:
    """Noiseless blocky signal with its summary quantities.

    ``a_n`` is the smallest jump magnitude and ``rho_n`` the smallest
    nonzero level magnitude (``nan`` when undefined).
    """

    partition: BlockPartition
    mu0: np.ndarray = field(repr=False)
    a_n: float
    rho_n: float

    @classmethod
    def from_levels(cls, levels, sizes) -> "TrueModel":
        levels = [float(v) for v in levels]
        sizes = [int(s) for s in sizes]
        if len(levels) != len(sizes) or any(s < 1 for s in sizes):
            raise ValueError("need one positive size per level")
        return cls.from_vector(np.repeat(levels, sizes))

    @classmethod
    def from_vector(cls, mu0) -> "TrueModel":
        mu0 = as_signal(mu0, "mu0")
        part = blocks_of(mu0, 0.0, 0.0)
        lv = np.array(part.levels)
        a_n = float(np.min(np.abs(np.diff(lv)))) if part.n_blocks > 1 else float("nan")
        nz = np.abs(lv[lv != 0])
        rho_n = float(nz.min()) if nz.size else float("nan")
        return cls(part, mu0.copy(), a_n, rho_n)

    @property
    def n(self) -> int:
        return self.partition.n

    @property
    def n_blocks(self) -> int:
        return self.partition.n_blocks

    @property
    def n_nonzero(self) -> int:
        return len(self.partition.nonzero_blocks)

    @property
    def b_min(self) -> int:
        return int(self.partition.sizes.min())


@dataclass(frozen=True)
class FitResult:
    mu_hat: np.ndarray = field(repr=False)
    partition: BlockPartition
    objective: float
    params: TuningParams
    loss_kind: LossKind

    @property
    def n(self) -> int:
        return int(self.mu_hat.size)

    @property
    def n_blocks(self) -> int:
        return self.partition.n_blocks

    def df_hat(self) -> int:
        return len(self.partition.nonzero_blocks)
