import time
import warnings

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from ladflsa import (SolverOptions, TuningParams, objective, solve, solve_lad_flsa,
                     solve_lad_fsa, solve_ls_flsa)
from ladflsa.oracle import (brute_force_lad_flsa, brute_force_ls_flsa, check_lemma1_bounds,
                            kkt_residual)

small_y = st.lists(st.integers(-3, 3), min_size=1, max_size=8).map(lambda v: np.array(v, float))
real_y = st.lists(st.floats(-10, 10, allow_subnormal=False), min_size=1, max_size=60).map(np.array)
lam = st.sampled_from([0.0, 0.1, 0.5, 1.2, 3.0])


def test_zero_penalties_reproduce_data():
    fit = solve_lad_flsa([3, -1, 4], (0, 0))
    assert fit.mu_hat.tolist() == [3, -1, 4]
    assert fit.objective == 0.0
    assert solve_ls_flsa([3, -1, 4], (0, 0)).mu_hat.tolist() == [3, -1, 4]
    assert solve_lad_fsa([3, -1, 4], 0.0).mu_hat.tolist() == [3, -1, 4]


@given(real_y, st.floats(1.0, 50.0), st.floats(0.0, 50.0))
def test_large_lambda1_gives_zero(y, l1, l2):
    assert np.all(solve_lad_flsa(y, (l1, l2)).mu_hat == 0.0)


def test_fusion_dominance_gives_median():
    y = np.array([1, 2, 10, 2, 1.0])
    fit = solve_lad_flsa(y, (0.0, y.size * np.abs(y).max()))
    assert np.all(fit.mu_hat == 2.0)
    y4 = np.array([1.0, 5.0, 3.0, 2.0])
    mu = solve_lad_fsa(y4, 4 * (y4.max() - y4.min())).mu_hat
    assert np.ptp(mu) == 0 and 2.0 <= mu[0] <= 3.0


def test_constant_data_ls():
    fit = solve_ls_flsa(np.full(7, 2.5), (0.0, 3.0))
    assert np.allclose(fit.mu_hat, 2.5)


@pytest.mark.parametrize("y,l1,l2", [((0, 0, 5, 5), 0.1, 0.3), ((1, 1, -1, -1), 0.0, 0.4),
                                     ((1, 1, -1), 0.1, 0.3)])
def test_small_examples_match_oracles(y, l1, l2):
    y = np.array(y, float)
    ref = brute_force_lad_flsa(y, (l1, l2))
    assert solve_lad_flsa(y, (l1, l2)).objective == pytest.approx(ref.objective, abs=1e-10)
    ref = brute_force_ls_flsa(y, (l1, l2))
    assert solve_ls_flsa(y, (l1, l2)).objective == pytest.approx(ref.objective, abs=1e-10)


def test_objective_examples():
    assert objective([1, 2], [1, 2], (0, 0)) == 0
    assert objective([1, 2], [0, 0], (1, 1)) == 3
    assert objective([0, 4], [1, 3], (0.5, 2)) == 8
    assert objective([0, 4], [1, 3], (0.5, 2), "ls") == pytest.approx(1 + 1 + 2 + 4)
    with pytest.raises(ValueError, match="length mismatch"):
        objective([1, 2], [1], (0, 0))


def test_input_validation():
    with pytest.raises(ValueError):
        solve_lad_flsa([1.0, np.nan], (0, 1))
    with pytest.raises(ValueError):
        solve_lad_flsa([1.0, 2.0], (-0.1, 1))
    with pytest.raises(ValueError):
        SolverOptions(merge_tol=-1)


@pytest.mark.parametrize("y,l1,expected", [(3.0, 0.5, 3.0), (3.0, 1.5, 0.0), (-2.0, 0.2, -2.0)])
def test_single_point_lad(y, l1, expected):
    assert solve_lad_flsa([y], (l1, 4.0)).mu_hat.tolist() == [expected]


@pytest.mark.parametrize("y,l1", [(3.0, 0.5), (0.2, 1.0), (-2.0, 1.0)])
def test_single_point_ls_soft_threshold(y, l1):
    expected = np.sign(y) * max(abs(y) - l1 / 2, 0.0)
    assert solve_ls_flsa([y], (l1, 1.0)).mu_hat[0] == pytest.approx(expected)


@given(small_y, lam, lam)
def test_lad_matches_enumeration(y, l1, l2):
    ref = brute_force_lad_flsa(y, (l1, l2))
    fit = solve_lad_flsa(y, (l1, l2))
    assert abs(fit.objective - ref.objective) <= 1e-8 * (1 + abs(ref.objective))


@given(small_y, lam, lam)
def test_ls_matches_coordinate_descent(y, l1, l2):
    ref = brute_force_ls_flsa(y, (l1, l2))
    fit = solve_ls_flsa(y, (l1, l2))
    assert abs(fit.objective - ref.objective) <= 1e-8 * (1 + abs(ref.objective))


@given(real_y, st.floats(0, 2), st.floats(0, 20), st.sampled_from(["lad", "ls"]))
def test_outputs_pass_kkt(y, l1, l2, loss):
    fit = solve(y, (l1, l2), SolverOptions(loss_kind=loss))
    assert kkt_residual(y, fit).passed
    assert fit.objective == pytest.approx(objective(y, fit.mu_hat, (l1, l2), loss), rel=1e-10)
    assert fit.partition.sizes.sum() == y.size


@given(real_y, st.floats(0, 0.9), st.floats(0, 20))
def test_lad_levels_are_zero_or_observations(y, l1, l2):
    fit = solve_lad_flsa(y, (l1, l2))
    for v in fit.partition.levels:
        assert v == 0.0 or np.min(np.abs(y - v)) <= 1e-9 * (1 + abs(v))


@given(real_y, st.floats(0, 20), st.floats(-100, 100))
def test_fsa_shift_equivariance(y, l2, c):
    a = solve_lad_fsa(y, l2)
    b = solve_lad_fsa(y + c, l2)
    # the minimiser may not be unique; compare objective values
    assert b.objective == pytest.approx(a.objective, abs=1e-7 * (1 + abs(a.objective)))
    assert objective(y + c, a.mu_hat + c, (0, l2)) == pytest.approx(b.objective, abs=1e-7 * (1 + b.objective))


def test_block_count_monotone_in_lambda2_diagnostic(rng):
    # not a theorem: report instances where the count increases instead of failing
    y = np.repeat([0.0, 2.0, -1.0, 1.0], 50) + rng.laplace(0, 0.4, 200)
    counts = [solve_lad_flsa(y, (0.05, l2)).n_blocks for l2 in np.linspace(0.5, 30, 40)]
    ups = sum(b > a for a, b in zip(counts, counts[1:]))
    if ups:
        warnings.warn(f"block count increased {ups} times along the lambda2 grid")
    assert counts[-1] <= counts[0]


def test_lemma1_bound_on_noisy_instances(rng):
    for _ in range(20):
        y = rng.normal(0, 1, 500)
        fit = solve_lad_flsa(y, (0.001, 25.0))
        chk = check_lemma1_bounds(fit)
        assert chk.applicable and chk.bound == pytest.approx(500 / 24.5 + 1)
        assert chk.holds


def test_lemma1_bound_fails_on_a_ramp():
    # a strictly increasing ramp: fusion keeps a staircase of about n - 2 lambda2 steps
    n, l2 = 100, 20.0
    fit = solve_lad_fsa(np.arange(n, dtype=float), l2)
    chk = check_lemma1_bounds(fit)
    assert chk.applicable and chk.bound == 6.0
    assert chk.n_blocks == pytest.approx(n - 2 * l2 + 1, abs=2)
    assert not chk.holds


def test_lemma1_not_applicable():
    fit = solve_lad_flsa(np.arange(10.0), (1.0, 5.0))
    assert not check_lemma1_bounds(fit).applicable


def test_large_instance_speed(rng):
    y = np.repeat(rng.normal(0, 2, 50), 100) + rng.standard_t(2, 5000)
    solve_lad_flsa(y, (0.05, 5.0))
    t0 = time.perf_counter()
    for l2 in (5.0, 20.0):
        solve_lad_flsa(y, (0.05, l2))
        solve_ls_flsa(y, (0.05, l2))
    assert (time.perf_counter() - t0) / 4 < 0.1


def test_breakpoint_cap_is_diagnostic(rng):
    y = rng.normal(0, 1, 300)
    with pytest.warns(RuntimeWarning):
        fit = solve(y, (0.0, 0.5), SolverOptions(max_breakpoints=1))
    assert kkt_residual(y, fit).passed
