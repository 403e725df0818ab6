from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ladflsa import solve_lad_flsa, solve_lad_fsa, solve_ls_flsa
from ladflsa.model import FitResult, LossKind, TuningParams, blocks_of
from ladflsa.oracle import (ORACLE_MAX_N, brute_force_lad_flsa, brute_force_ls_flsa,
                            kkt_residual_lad_flsa, kkt_residual_lad_fsa,
                            kkt_residual_ls_flsa, read_golden)
from ladflsa.solver import objective

GOLDEN = read_golden(Path(__file__).parent / "golden" / "oracle.jsonl")


def _as_fit(y, mu, params, loss=LossKind.LAD):
    p = TuningParams(*params)
    return FitResult(np.asarray(mu, float), blocks_of(mu), objective(y, mu, p, loss), p, loss)


@pytest.mark.parametrize("rec", GOLDEN, ids=lambda r: f"{r['loss']}-n{len(r['y'])}")
def test_solver_reproduces_golden_objectives(rec):
    y, params = np.array(rec["y"]), (rec["lambda1"], rec["lambda2"])
    solver = solve_lad_flsa if rec["loss"] == "lad" else solve_ls_flsa
    fit = solver(y, params)
    assert abs(fit.objective - rec["objective"]) <= 1e-8 * (1 + abs(rec["objective"]))
    # the frozen vector is itself optimal for its recorded objective
    loss = LossKind(rec["loss"])
    assert objective(y, rec["mu_hat"], params, loss) == pytest.approx(rec["objective"], abs=1e-10)
    if loss is LossKind.LS:
        np.testing.assert_allclose(fit.mu_hat, rec["mu_hat"], atol=1e-7)


def test_brute_force_examples():
    assert brute_force_lad_flsa([5.0], (2.0, 0.0)).mu_hat.tolist() == [0.0]
    fit = brute_force_lad_flsa([1.0, 1.0], (0.0, 10.0))
    assert fit.mu_hat.tolist() == [1.0, 1.0] and fit.objective == 0.0
    assert brute_force_ls_flsa([1.0, -2.0, 3.0], (0, 0)).mu_hat == pytest.approx([1, -2, 3])
    assert brute_force_ls_flsa([2.0, 2.0, 2.0], (0, 5)).mu_hat == pytest.approx([2, 2, 2])


def test_size_cap():
    with pytest.raises(ValueError, match="oracle size cap"):
        brute_force_lad_flsa(np.zeros(ORACLE_MAX_N + 1), (0, 1))
    with pytest.raises(ValueError, match="oracle size cap"):
        brute_force_ls_flsa(np.zeros(ORACLE_MAX_N + 1), (0, 1))


def test_lad_tie_break_is_lexicographic():
    # |1 - m| + |m| is flat on [0, 1] at lambda1 = 1; smallest vector wins
    assert brute_force_lad_flsa([1.0], (1.0, 0.0)).mu_hat.tolist() == [0.0]
    assert brute_force_lad_flsa([-1.0], (1.0, 0.0)).mu_hat.tolist() == [-1.0]


def test_kkt_passes_on_solver_output(rng):
    y = rng.normal(0, 1, 50)
    assert kkt_residual_lad_fsa(y, solve_lad_fsa(y, 3.0)).passed
    y = rng.normal(0, 1, 100)
    assert kkt_residual_lad_flsa(y, solve_lad_flsa(y, (0.2, 2.0))).passed
    assert kkt_residual_ls_flsa(y, solve_ls_flsa(y, (0.2, 2.0))).passed


def test_kkt_fails_after_block_perturbation(rng):
    y = np.repeat([0.0, 3.0, -2.0], 20) + rng.normal(0, 0.3, 60)
    fit = solve_lad_fsa(y, 3.0)
    mu = fit.mu_hat.copy()
    a, b = fit.partition.starts[1], fit.partition.ends[1]
    mu[a:b] += 0.5
    rep = kkt_residual_lad_fsa(y, _as_fit(y, mu, (0, 3.0)))
    assert not rep.passed
    assert rep.max_equality_residual > 1e-3


def test_kkt_constant_median_fit_with_huge_lambda():
    y = np.array([3.0, -1.0, 0.5, 2.0, 7.0])
    mu = np.full(5, 2.0)
    assert kkt_residual_lad_fsa(y, _as_fit(y, mu, (0, 1e6)), lambda2=1e6).passed


def test_kkt_detects_zero_block_violation():
    # every observation positive: a zero block needs |sum sgn| <= lambda1 * b
    y = np.array([1.0, 2.0, 1.5, 3.0])
    rep = kkt_residual_lad_flsa(y, _as_fit(y, np.zeros(4), (0.1, 0.5)))
    assert not rep.passed


def test_kkt_all_zero_data():
    y = np.zeros(6)
    for params in [(0, 0), (0.3, 2.0), (2.0, 0.1)]:
        assert kkt_residual_lad_flsa(y, _as_fit(y, np.zeros(6), params)).passed


def test_kkt_length_mismatch():
    y = np.zeros(3)
    with pytest.raises(ValueError, match="length mismatch"):
        kkt_residual_lad_flsa(np.zeros(4), _as_fit(y, y, (0, 1)))


def test_ls_kkt_rejects_lad_solution():
    y = np.array([0.0, 0.0, 5.0, 5.0, 9.0])
    fit = solve_lad_flsa(y, (0.1, 0.3))
    assert not kkt_residual_ls_flsa(y, fit).passed


@given(st.lists(st.floats(-5, 5), min_size=2, max_size=30).map(np.array),
       st.floats(0, 0.5), st.floats(0.1, 5), st.integers(0, 1000))
def test_perturbation_breaks_kkt(y, l1, l2, seed):
    fit = solve_ls_flsa(y, (l1, l2))
    j = np.random.default_rng(seed).integers(fit.n_blocks)
    mu = fit.mu_hat.copy()
    sl = fit.partition.block_slices()[j]
    mu[sl] += 0.5
    # strict convexity: any other vector is not stationary
    assert not kkt_residual_ls_flsa(y, _as_fit(y, mu, (l1, l2), LossKind.LS)).passed


@given(st.lists(st.integers(-3, 3), min_size=1, max_size=7).map(lambda v: np.array(v, float)),
       st.sampled_from([0.0, 0.2, 0.7]), st.sampled_from([0.0, 0.4, 2.0]))
def test_oracle_never_beaten(y, l1, l2):
    ref = brute_force_lad_flsa(y, (l1, l2))
    assert ref.objective <= solve_lad_flsa(y, (l1, l2)).objective + 1e-9
    assert kkt_residual_lad_flsa(y, ref).passed
