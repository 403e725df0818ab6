"""Brute-force solvers for tiny instances and KKT certificates.

The oracles here share no code with the compiled solver.

LAD enumeration
    For a fixed partition into contiguous blocks, the LAD objective is
    piecewise linear in each block level, with kinks at the block's own
    observations, at 0 and at the neighbouring levels.  A minimiser
    therefore sits at a vertex where every level equals 0, one of its
    block's observations, or a neighbour's level.  The last case is the
    same vector as a coarser partition, so minimising over all
    ``2**(n-1)`` partitions with per-block candidates ``{0} | {y_k}``
    reaches the global minimum.

LS coordinate descent
    Plain coordinate descent can stall on fused problems, so the sweep
    also shifts every contiguous run as a unit.  The iterate's block and
    sign structure is then polished in closed form and accepted only if
    it passes the KKT check.

KKT residuals
    With ``r_i`` the negative loss subgradient at ``i``, ``z_i`` a
    subgradient of ``|mu_i|`` and ``u_i`` one of ``|mu_i - mu_{i-1}|``,
    stationarity reads ``lambda2 u_{i+1} = lambda2 u_i + lambda1 z_i - r_i``
    with ``u_0 = u_n = 0``.  Within a block the reachable set of
    ``lambda2 u`` is an interval; it must stay in ``[-lambda2, lambda2]``
    inside the block and hit ``lambda2 * sign(jump)`` at the block end.
    Exact-fit points (``y_i = mu_i``, LAD only) and zero blocks contribute
    whole intervals, so the residual is a distance to a set rather than a
    pointwise sign choice.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .model import (DEFAULT_ZERO_TOL, FitResult, LossKind, TuningParams, as_signal,
                    blocks_of, sign_vector)
from .piecewise import PiecewiseConvexFn
from .solver import objective

ORACLE_MAX_N = 10
DEFAULT_KKT_TOL = 1e-6


def _guard(y):
    y = as_signal(y)
    if y.size > ORACLE_MAX_N:
        raise ValueError(f"oracle size cap: n={y.size} > {ORACLE_MAX_N}")
    return y


def _as_params(params) -> TuningParams:
    return params if isinstance(params, TuningParams) else TuningParams(*params)


def _fit(y, mu, p, loss) -> FitResult:
    return FitResult(mu, blocks_of(mu, 0.0, DEFAULT_ZERO_TOL),
                     objective(y, mu, p, loss), p, loss)


def _compositions(n):
    """Yield block sizes for every partition of ``n`` ordered points."""
    for mask in range(1 << (n - 1)):
        sizes, run = [], 1
        for k in range(n - 1):
            if mask >> k & 1:
                sizes.append(run)
                run = 1
            else:
                run += 1
        sizes.append(run)
        yield sizes


def brute_force_lad_flsa(y, params) -> FitResult:
    """Exact LAD-FLSA minimiser by enumeration (``n <= 10``).

    Ties are broken by the lexicographically smallest fitted vector.
    """
    y = _guard(y)
    p = _as_params(params)
    n = y.size
    best = np.inf
    winners: list[np.ndarray] = []
    for sizes in _compositions(n):
        starts = np.concatenate(([0], np.cumsum(sizes)[:-1]))
        cands = [np.unique(np.append(y[s:s + b], 0.0)) for s, b in zip(starts, sizes)]
        levels = np.array(list(itertools.product(*cands)))
        mu = np.repeat(levels, sizes, axis=1)
        obj = (np.abs(y - mu).sum(axis=1) + p.lambda1 * np.abs(mu).sum(axis=1)
               + p.lambda2 * np.abs(np.diff(mu, axis=1)).sum(axis=1))
        m = obj.min()
        tol = 1e-10 * (1 + abs(min(m, best)))
        if m < best - tol:
            best, winners = m, []
        if m <= best + tol:
            winners.extend(mu[obj <= best + tol])
            best = min(best, m)
    tol = 1e-10 * (1 + abs(best))
    winners = np.array([w for w in winners if objective(y, w, p) <= best + tol])
    mu = winners[np.lexsort(winners.T[::-1])[0]]
    return _fit(y, mu.copy(), p, LossKind.LAD)


def _polish_ls(y, mu, p, tol=1e-9):
    """Closed-form LS solution for the block/sign structure of ``mu``."""
    part = blocks_of(mu, tol, tol)
    lv = np.array(part.levels)
    s = sign_vector(lv, tol)
    d = np.concatenate(([0], np.sign(np.diff(lv)), [0]))
    b = part.sizes
    sums = np.add.reduceat(y, np.array(part.starts))
    nu = (2 * sums - p.lambda1 * b * s - p.lambda2 * (d[:-1] - d[1:])) / (2 * b)
    nu[s == 0] = 0.0
    return np.repeat(nu, b)


def _cd_sweep(y, mu, p):
    n = y.size
    for a in range(n):
        for e in range(a, n):
            seg = slice(a, e + 1)
            terms = [(p.lambda1, -m) for m in mu[seg]]
            if a > 0:
                terms.append((p.lambda2, mu[a - 1] - mu[a]))
            if e < n - 1:
                terms.append((p.lambda2, mu[e + 1] - mu[e]))
            f = PiecewiseConvexFn.from_terms(
                quad=float(e - a + 1), lin=-2.0 * float(np.sum(y[seg] - mu[seg])),
                abs_terms=terms)
            t = f.argmin()
            if t != 0.0:
                mu[seg] += t
    return mu


def brute_force_ls_flsa(y, params, restarts: int = 20, seed: int = 0,
                        max_sweeps: int = 100_000, cert_tol: float = 1e-8) -> FitResult:
    """LS-FLSA minimiser by restarted run-shift coordinate descent (``n <= 10``).

    The objective is strictly convex, so the first restart whose polished
    iterate passes the KKT check at ``cert_tol`` is returned.
    """
    y = _guard(y)
    p = _as_params(params)
    rng = np.random.default_rng(seed)
    scale = float(np.std(y)) + 1.0
    best = None
    for r in range(restarts):
        mu = y + rng.normal(0.0, scale, y.size) if r else y.copy()
        prev = objective(y, mu, p, LossKind.LS)
        for _ in range(max_sweeps):
            mu = _cd_sweep(y, mu, p)
            cur = objective(y, mu, p, LossKind.LS)
            cand = _polish_ls(y, mu, p)
            fit = _fit(y, cand, p, LossKind.LS)
            if kkt_residual_ls_flsa(y, fit, p, tol=cert_tol).passed:
                return fit
            if prev - cur <= 1e-12:
                break
            prev = cur
        else:
            raise RuntimeError("coordinate descent did not converge")
        if best is None or cur < best[0]:
            best = (cur, mu.copy())
    raise RuntimeError(f"no restart certified by KKT (best objective {best[0]!r})")


@dataclass(frozen=True)
class KktReport:
    """Worst violations of the optimality system.

    ``max_equality_residual`` is the block-end mismatch divided by block
    size; ``max_inequality_slack_violation`` is the worst excursion of the
    interior dual path outside ``[-lambda2, lambda2]``.
    """

    max_equality_residual: float
    max_inequality_slack_violation: float
    tol: float
    block_sign_sums: np.ndarray = field(repr=False, default=None)
    block_subgradients: np.ndarray = field(repr=False, default=None)

    @property
    def passed(self) -> bool:
        return (self.max_equality_residual <= self.tol
                and self.max_inequality_slack_violation <= self.tol)


def block_subgradients(levels, sizes, lambda2: float) -> np.ndarray:
    """Per-point fusion subgradient ``c_j`` of every block.

    ``b_j c_j = lambda2 * (sign(nu_{j+1} - nu_j) - sign(nu_j - nu_{j-1}))``
    with the missing neighbour terms of the first and last block set to 0.
    """
    lv = np.asarray(levels, dtype=float)
    d = np.concatenate(([0.0], np.sign(np.diff(lv)), [0.0]))
    return lambda2 * (d[1:] - d[:-1]) / np.asarray(sizes, dtype=float)


def _kkt(y, mu, lam1, lam2, loss, tol, fit_tol=1e-9, zero_tol=DEFAULT_ZERO_TOL):
    y = as_signal(y)
    mu = as_signal(mu, "mu")
    if y.shape != mu.shape:
        raise ValueError(f"length mismatch: y has {y.size}, fit has {mu.size}")
    part = blocks_of(mu, 0.0, zero_tol)
    lv = np.array(part.levels)
    jump_sign = np.concatenate(([0.0], np.sign(np.diff(lv)), [0.0]))
    resid = y - mu
    if loss is LossKind.LS:
        r_lo = r_hi = 2.0 * resid
    else:
        exact = np.abs(resid) <= fit_tol * (1.0 + np.abs(y))
        r_lo = np.where(exact, -1.0, np.sign(resid))
        r_hi = np.where(exact, 1.0, np.sign(resid))
    eq = ineq = 0.0
    sums = np.empty(part.n_blocks)
    for j, (a, e) in enumerate(zip(part.starts, part.ends)):
        zero = abs(lv[j]) <= zero_tol
        z = 0.0 if zero else np.sign(lv[j])
        lo = hi = lam2 * jump_sign[j]
        sums[j] = 0.5 * (r_lo[a:e].sum() + r_hi[a:e].sum())
        for i in range(a, e):
            if zero:
                lo += -lam1 - r_hi[i]
                hi += lam1 - r_lo[i]
            else:
                lo += lam1 * z - r_hi[i]
                hi += lam1 * z - r_lo[i]
            if i < e - 1:
                if lo > lam2:
                    ineq = max(ineq, lo - lam2)
                    lo = hi = lam2
                elif hi < -lam2:
                    ineq = max(ineq, -lam2 - hi)
                    lo = hi = -lam2
                else:
                    lo, hi = max(lo, -lam2), min(hi, lam2)
        target = lam2 * jump_sign[j + 1]
        gap = max(lo - target, target - hi, 0.0)
        eq = max(eq, gap / (e - a))
    c = block_subgradients(lv, part.sizes, lam2)
    return KktReport(eq, ineq, tol, sums, c)


def kkt_residual_lad_flsa(y, fit: FitResult, params=None, tol: float = DEFAULT_KKT_TOL,
                          **kw) -> KktReport:
    p = _as_params(params) if params is not None else fit.params
    return _kkt(y, fit.mu_hat, p.lambda1, p.lambda2, LossKind.LAD, tol, **kw)


def kkt_residual_lad_fsa(y, fit: FitResult, lambda2: float | None = None,
                         tol: float = DEFAULT_KKT_TOL, **kw) -> KktReport:
    lam2 = fit.params.lambda2 if lambda2 is None else float(lambda2)
    return _kkt(y, fit.mu_hat, 0.0, lam2, LossKind.LAD, tol, **kw)


def kkt_residual_ls_flsa(y, fit: FitResult, params=None, tol: float = DEFAULT_KKT_TOL,
                         **kw) -> KktReport:
    p = _as_params(params) if params is not None else fit.params
    return _kkt(y, fit.mu_hat, p.lambda1, p.lambda2, LossKind.LS, tol, **kw)


def kkt_residual(y, fit: FitResult, tol: float = DEFAULT_KKT_TOL, **kw) -> KktReport:
    """KKT check matching the fit's own loss and parameters."""
    p = fit.params
    return _kkt(y, fit.mu_hat, p.lambda1, p.lambda2, LossKind(fit.loss_kind), tol, **kw)


@dataclass(frozen=True)
class Lemma1Check:
    applicable: bool
    bound: float | None
    n_blocks: int
    holds: bool | None
    ls_bound: float | None = None
    ls_holds: bool | None = None


def check_lemma1_bounds(fit: FitResult, params=None, n: int | None = None) -> Lemma1Check:
    """Block-count bound ``J <= n / (lambda2 - n lambda1) + 1`` for ``lambda2 > n lambda1``.

    For least-squares fits the bound ``16 n / (lambda2^2 - 2 n^2 lambda1^2) + 1``
    is reported as a diagnostic only (``ls_holds``); it is proved for a
    pseudo-data estimator, not for the fit itself.
    """
    p = _as_params(params) if params is not None else fit.params
    n = fit.n if n is None else int(n)
    J = fit.partition.n_blocks
    ls_bound = ls_holds = None
    if fit.loss_kind is LossKind.LS:
        den = p.lambda2 ** 2 - 2 * n ** 2 * p.lambda1 ** 2
        if den > 0:
            ls_bound = 16 * n / den + 1
            ls_holds = J <= ls_bound
    den = p.lambda2 - n * p.lambda1
    if den <= 0:
        return Lemma1Check(False, None, J, None, ls_bound, ls_holds)
    bound = n / den + 1
    return Lemma1Check(True, bound, J, J <= bound, ls_bound, ls_holds)


def write_golden(path, records) -> None:
    """Write oracle results as JSON lines ``{y, lambda1, lambda2, objective, mu_hat}``."""
    with open(path, "w") as fh:
        for r in records:
            fh.write(json.dumps({k: (v.tolist() if isinstance(v, np.ndarray) else v)
                                 for k, v in r.items()}) + "\n")


def read_golden(path) -> list[dict]:
    return [json.loads(line) for line in Path(path).read_text().splitlines() if line.strip()]


def golden_record(y, fit: FitResult) -> dict:
    return {"y": list(map(float, y)), "lambda1": fit.params.lambda1,
            "lambda2": fit.params.lambda2, "objective": fit.objective,
            "mu_hat": fit.mu_hat.tolist(), "loss": fit.loss_kind.value}
