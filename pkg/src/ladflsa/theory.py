"""Sufficient-condition evaluators and consistency outcomes.

The conditions are inequalities between the tuning parameters and
features of the true signal: the number of blocks ``J0``, the number of
nonzero blocks ``K0``, the smallest block size ``b_min``, the smallest
jump ``a_n``, the smallest nonzero level ``rho_n`` and the error density
at zero ``f0``.  Clauses stated only as limits cannot be checked at a
fixed ``n`` and are reported with status ``"asymptotic"``; clauses whose
logarithm degenerates (a count of at most one) are ``"vacuous"``.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .model import (DEFAULT_ZERO_TOL, EXACT_JUMP_TOL, FitResult, TrueModel,
                    TuningParams, as_signal, blocks_of, sign_vector)

SATISFIED = "satisfied"
VIOLATED = "violated"
VACUOUS = "vacuous"
ASYMPTOTIC = "asymptotic"


def lambda_n(n: int, params) -> float | None:
    """Block-count bound ``max{16n/(l2^2 - 2n^2 l1^2), n/(l2 - n l1)} + 1``.

    ``None`` when ``l2^2 <= 2 n^2 l1^2`` (the bound is undefined there).
    """
    p = params if isinstance(params, TuningParams) else TuningParams(*params)
    l1, l2 = p.lambda1, p.lambda2
    d1 = l2 * l2 - 2.0 * n * n * l1 * l1
    if d1 <= 0:
        return None
    return max(16.0 * n / d1, n / (l2 - n * l1)) + 1.0


@dataclass(frozen=True)
class ConditionRecord:
    name: str
    lhs: float | None
    rhs: float | None
    status: str
    note: str = ""

    @property
    def satisfied(self) -> bool | None:
        """True/False for checkable clauses, None otherwise."""
        if self.status in (SATISFIED, VIOLATED):
            return self.status == SATISFIED
        return None


@dataclass
class ConditionReport:
    records: list[ConditionRecord] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def aggregate(self) -> bool:
        """All checkable clauses hold."""
        return all(r.satisfied for r in self.records if r.satisfied is not None)

    def __getitem__(self, name: str) -> ConditionRecord:
        for r in self.records:
            if r.name == name:
                return r
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {"records": [asdict(r) | {"satisfied": r.satisfied} for r in self.records],
                "aggregate": self.aggregate, "notes": list(self.notes)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, allow_nan=True)


def _less(name, lhs, rhs, note=""):
    return ConditionRecord(name, float(lhs), float(rhs),
                           SATISFIED if lhs < rhs else VIOLATED, note)


def _greater(name, lhs, rhs, note=""):
    return ConditionRecord(name, float(lhs), float(rhs),
                           SATISFIED if lhs > rhs else VIOLATED, note)


def _vacuous(name, why):
    return ConditionRecord(name, None, None, VACUOUS, why)


def _asymptotic(name, what):
    return ConditionRecord(name, None, None, ASYMPTOTIC,
                           f"{what}; not checkable at fixed n")


def _check_f0(f0, delta):
    if not f0 > 0:
        raise ValueError("f0 must be positive")
    if not delta > 0:
        raise ValueError("delta must be positive")


def check_conditions_B(truth: TrueModel, lambda2: float, f0: float,
                       delta: float = 0.1, n: int | None = None) -> ConditionReport:
    """Conditions for recovering the jumps with the fusion penalty alone."""
    _check_f0(f0, delta)
    n = truth.n if n is None else int(n)
    J0 = truth.n_blocks
    rep = ConditionReport()
    names = ("B1-a", "B1-b", "B2-a", "B2-b", "B3")
    if J0 < 2:
        rep.records = [_vacuous(k, "truth has no jumps") for k in names]
        return rep
    b_min, a_n = truth.b_min, truth.a_n
    rep.records.append(_asymptotic("B1-a", "lambda2 -> infinity"))
    if n - J0 > 1:
        rep.records.append(_greater("B1-b", lambda2 / math.sqrt(math.log(n - J0)),
                                    (1 + delta) / 2))
    else:
        rep.records.append(_vacuous("B1-b", "log(n - J0) <= 0"))
    rep.records.append(_asymptotic("B2-a", "sqrt(b_min) a_n -> infinity"))
    if J0 > 1 and math.log(J0) > 0:
        rep.records.append(_greater("B2-b", math.sqrt(b_min / math.log(J0)) * a_n,
                                    3 * (1 + delta) / (math.sqrt(2) * f0),
                                    "evaluated at the given n"))
    else:
        rep.records.append(_vacuous("B2-b", "log(J0) <= 0"))
    rep.records.append(_less("B3", lambda2, f0 / 3 * b_min * a_n,
                             "evaluated at the given n"))
    return rep


def check_conditions_C(truth: TrueModel, params, f0: float,
                       delta: float = 0.1) -> ConditionReport:
    """Conditions for separating zero blocks from nonzero ones."""
    _check_f0(f0, delta)
    p = params if isinstance(params, TuningParams) else TuningParams(*params)
    l1, l2 = p.lambda1, p.lambda2
    J0, K0 = truth.n_blocks, truth.n_nonzero
    b_min, rho = truth.b_min, truth.rho_n
    rep = ConditionReport()
    rep.records.append(_asymptotic("C1-a", "lambda1 sqrt(b_min) -> infinity"))
    if J0 - K0 > 1:
        rep.records.append(_greater("C1-b", l1 * math.sqrt(b_min / math.log(J0 - K0)),
                                    4 * math.sqrt(2) * (1 + delta)))
    else:
        rep.records.append(_vacuous("C1-b", "log(J0 - K0) <= 0"))
    rep.records.append(_less("C2", l2 / b_min, l1 / 8, "evaluated at the given n"))
    rep.records.append(_asymptotic("C3-a", "rho_n sqrt(b_min) -> infinity"))
    if K0 > 1:
        rep.records.append(_greater("C3-b", rho * math.sqrt(b_min / math.log(K0)),
                                    2 * math.sqrt(2) * (1 + delta) / f0))
    else:
        rep.records.append(_vacuous("C3-b", "log(K0) <= 0"))
    if K0 == 0:
        rep.records.append(_vacuous("C4", "no nonzero blocks"))
        rep.records.append(_vacuous("C5", "no nonzero blocks"))
    else:
        rep.records.append(_less("C4", l2 / b_min, f0 * rho / 3, "evaluated at the given n"))
        rep.records.append(_less("C5", l1, f0 * rho / 2, "evaluated at the given n"))
    rep.notes.append("C2 and C5 together imply C4, so C4 is redundant when both hold")
    return rep


@dataclass(frozen=True)
class ConsistencyOutcome:
    jump_selection: bool
    jump_sign: bool
    block_selection: bool
    block_sign: bool
    l2n_error: float


def consistency_outcome(fit, truth: TrueModel, jump_tol: float = EXACT_JUMP_TOL,
                        zero_tol: float = DEFAULT_ZERO_TOL) -> ConsistencyOutcome:
    """Compare the block structure of ``fit`` with ``truth``.

    ``fit`` may be a :class:`FitResult` or a plain vector.
    """
    mu = fit.mu_hat if isinstance(fit, FitResult) else as_signal(fit, "mu")
    mu0 = truth.mu0
    if mu.shape != mu0.shape:
        raise ValueError(f"length mismatch: fit has {mu.size}, truth has {mu0.size}")
    est = blocks_of(mu, jump_tol, zero_tol)
    ref = truth.partition
    jump_sel = est.jump_set == ref.jump_set
    jump_sgn = jump_sel
    if jump_sel and ref.jump_set:
        idx = np.array(ref.jump_set)
        jump_sgn = bool(np.all(np.sign(mu[idx] - mu[idx - 1])
                               == np.sign(mu0[idx] - mu0[idx - 1])))
    # the truth partition uses zero_tol 0; compare with the caller's zero_tol
    true_nz = tuple(j for j, v in enumerate(ref.levels) if v != 0)
    block_sel = jump_sel and est.nonzero_blocks == true_nz
    block_sgn = block_sel and bool(np.all(est.level_signs()
                                          == sign_vector(ref.levels)))
    err = float(np.sqrt(np.mean((mu - mu0) ** 2)))
    return ConsistencyOutcome(jump_sel, jump_sgn, block_sel, block_sgn, err)


def density_at_zero(family: str, sigma: float) -> float:
    """Error density at zero for the harness noise families with scale ``sigma``."""
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    fam = family.lower()
    if fam == "normal":
        return 1.0 / (sigma * math.sqrt(2 * math.pi))
    if fam in ("double_exponential", "doubleexponential", "laplace"):
        return 1.0 / (sigma * math.sqrt(2))
    if fam == "cauchy":
        return 1.0 / (0.1 * sigma * math.pi)
    raise ValueError(f"unknown noise family {family!r}")
