import numpy as np
import pytest
from hypothesis import given, strategies as st

from ladflsa.model import (BlockPartition, TrueModel, TuningParams, as_signal, blocks_of,
                           expand, sign_vector)


def test_constant_zero_is_one_empty_block():
    p = blocks_of([0.0, 0.0, 0.0], 0.0)
    assert p.n_blocks == 1
    assert p.levels == (0.0,)
    assert p.nonzero_blocks == ()
    assert p.jump_set == ()


def test_blocks_jumps_and_nonzero_set():
    p = blocks_of([0, 0, 2, 2, -1], 0.0, 0.0)
    assert [list(range(a, b)) for a, b in zip(p.starts, p.ends)] == [[0, 1], [2, 3], [4]]
    assert p.levels == (0.0, 2.0, -1.0)
    # 1-based jump indices 3 and 5, nonzero blocks 2 and 3
    assert [i + 1 for i in p.jump_set] == [3, 5]
    assert [j + 1 for j in p.nonzero_blocks] == [2, 3]


def test_jump_tolerance_merges_small_steps():
    p = blocks_of([1.00, 1.05, 3.0], 0.1)
    assert p.n_blocks == 2
    assert p.starts[1] + 1 == 3
    assert p.levels[0] == 1.00


def test_empty_signal_rejected():
    with pytest.raises(ValueError, match="empty signal"):
        blocks_of([])


@pytest.mark.parametrize("bad", [[np.nan, 1.0], [np.inf], [[1.0, 2.0]]])
def test_invalid_signals_rejected(bad):
    with pytest.raises(ValueError):
        as_signal(bad)


def test_expand_examples():
    assert expand(BlockPartition((0,), (5.0,), 3)).tolist() == [5, 5, 5]
    assert expand(BlockPartition((0, 2), (0.0, 1.0), 3)).tolist() == [0, 0, 1]
    with pytest.raises(ValueError):
        expand(BlockPartition((0,), (5.0,), 3), n=4)


def test_round_trip_benchmark_levels():
    part = BlockPartition((0, 3, 5, 9, 10, 14), (0.0, 2.0, -2.0, 3.0, 0.0, 2.0), 17, 0.0)
    assert blocks_of(expand(part), 0.0, 0.0) == part


def test_sign_vector_examples():
    assert sign_vector([-2, 0, 3]).tolist() == [-1, 0, 1]
    assert sign_vector([1e-12, -1e-12], 1e-9).tolist() == [0, 0]
    assert sign_vector([0.5, -0.5, 0.0], 0.1).tolist() == [1, -1, 0]


def test_partition_validation():
    with pytest.raises(ValueError):
        BlockPartition((1,), (0.0,), 3)
    with pytest.raises(ValueError):
        BlockPartition((0, 2, 2), (0.0, 1.0, 2.0), 3)
    with pytest.raises(ValueError):
        TuningParams(-1.0, 0.0)
    with pytest.raises(ValueError):
        TuningParams(0.0, float("nan"))


def test_true_model_summaries():
    t = TrueModel.from_levels([0, 2, -1], [3, 4, 2])
    assert (t.n, t.n_blocks, t.n_nonzero, t.b_min) == (9, 3, 2, 2)
    assert t.a_n == 2.0 and t.rho_n == 1.0


levels = st.lists(st.integers(-5, 5), min_size=1, max_size=8)


@given(levels, st.data())
def test_blocks_of_expand_is_identity(lv, data):
    # force distinct adjacent levels
    lv = [v for k, v in enumerate(lv) if k == 0 or v != lv[k - 1]]
    sizes = data.draw(st.lists(st.integers(1, 4), min_size=len(lv), max_size=len(lv)))
    mu = np.repeat(np.array(lv, float), sizes)
    p = blocks_of(mu, 0.5, 0.0)
    assert p.n_blocks == len(lv)
    assert np.array_equal(expand(p), mu)
    assert p.sizes.sum() == mu.size
    assert len(p.nonzero_blocks) <= p.n_blocks


@given(st.lists(st.floats(-10, 10), min_size=1, max_size=20), st.floats(0, 1))
def test_expansion_within_jump_tol(x, tol):
    mu = np.array(x)
    p = blocks_of(mu, tol)
    for j in p.jump_set:
        assert abs(mu[j] - mu[j - 1]) > tol
    # within a block consecutive steps are at most tol
    for a, b in zip(p.starts, p.ends):
        assert np.all(np.abs(np.diff(mu[a:b])) <= tol)


@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=20), st.floats(0, 1))
def test_sign_vector_is_odd(x, tol):
    x = np.array(x)
    assert np.array_equal(sign_vector(-x, tol), -sign_vector(x, tol))
