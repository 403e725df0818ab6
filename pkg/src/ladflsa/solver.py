"""Exact solvers for the LAD and least-squares fused lasso signal approximators.

Both problems are

    minimize  sum_i loss(y_i - mu_i) + lambda1 sum_i |mu_i|
                                     + lambda2 sum_{i>=1} |mu_i - mu_{i-1}|

with ``loss`` the absolute value (LAD) or the square (LS).  The solution
is computed by a forward pass over convex one-dimensional messages and a
backward clipping pass (see :mod:`ladflsa._kernels`), so it is exact up
to floating point round-off.  When the LAD minimiser is not unique the
backward pass picks, coordinate by coordinate from the right, the left
end of each minimising interval.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import MERGE_TOL, fused_dp
from .model import (DEFAULT_ZERO_TOL, EXACT_JUMP_TOL, FitResult, LossKind,
                    TuningParams, as_signal, blocks_of)


@dataclass(frozen=True)
class SolverOptions:
    loss_kind: LossKind = LossKind.LAD
    merge_tol: float = MERGE_TOL
    max_breakpoints: int | None = None
    jump_tol: float = EXACT_JUMP_TOL
    zero_tol: float = DEFAULT_ZERO_TOL

    def __post_init__(self):
        if self.merge_tol < 0:
            raise ValueError("merge_tol must be nonnegative")
        object.__setattr__(self, "loss_kind", LossKind(self.loss_kind))


def _params(params) -> TuningParams:
    if isinstance(params, TuningParams):
        return params
    lam1, lam2 = params
    return TuningParams(lam1, lam2)


def objective(y, mu, params, loss_kind=LossKind.LAD) -> float:
    """Value of the penalised LAD or LS criterion at ``mu``."""
    y = as_signal(y)
    mu = as_signal(mu, "mu")
    if y.shape != mu.shape:
        raise ValueError(f"length mismatch: y has {y.size}, mu has {mu.size}")
    p = _params(params)
    r = y - mu
    loss = np.sum(r * r) if LossKind(loss_kind) is LossKind.LS else np.sum(np.abs(r))
    return float(loss + p.lambda1 * np.sum(np.abs(mu))
                 + p.lambda2 * np.sum(np.abs(np.diff(mu))))


def fit_vector(y, lambda1: float, lambda2: float, loss_kind=LossKind.LAD,
               return_peak: bool = False):
    """Bare solver: returns the fitted vector only (no validation)."""
    y = np.ascontiguousarray(y, dtype=float)
    n = y.size
    lo = np.empty(max(n - 1, 1))
    hi = np.empty(max(n - 1, 1))
    mu = np.empty(n)
    peak = fused_dp(y, float(lambda1), float(lambda2),
                    LossKind(loss_kind) is LossKind.LS, lo, hi, mu)
    return (mu, peak) if return_peak else mu


def solve(y, params, options: SolverOptions | None = None) -> FitResult:
    opts = options or SolverOptions()
    y = as_signal(y)
    p = _params(params)
    mu, peak = fit_vector(y, p.lambda1, p.lambda2, opts.loss_kind, return_peak=True)
    if opts.max_breakpoints is not None and peak > opts.max_breakpoints:
        import warnings
        warnings.warn(f"message held {peak} breakpoints (cap {opts.max_breakpoints})",
                      RuntimeWarning, stacklevel=2)
    return FitResult(
        mu_hat=mu,
        partition=blocks_of(mu, opts.jump_tol, opts.zero_tol),
        objective=objective(y, mu, p, opts.loss_kind),
        params=p,
        loss_kind=opts.loss_kind,
    )


def solve_lad_flsa(y, params, **kw) -> FitResult:
    """LAD fused lasso signal approximator."""
    return solve(y, params, SolverOptions(loss_kind=LossKind.LAD, **kw))


def solve_ls_flsa(y, params, **kw) -> FitResult:
    """Least-squares fused lasso signal approximator."""
    return solve(y, params, SolverOptions(loss_kind=LossKind.LS, **kw))


def solve_lad_fsa(y, lambda2: float, **kw) -> FitResult:
    """LAD fit with the total-variation penalty only (``lambda1 = 0``)."""
    return solve_lad_flsa(y, TuningParams(0.0, lambda2), **kw)
