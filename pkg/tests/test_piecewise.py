import numpy as np
import pytest
from hypothesis import given, strategies as st

from ladflsa.piecewise import PiecewiseConvexFn

terms = st.lists(st.tuples(st.floats(0, 5), st.floats(-5, 5)), max_size=6)


@given(st.floats(0.01, 3), st.floats(-5, 5), terms)
def test_convex_continuous_and_minimised(q, lin, abs_terms):
    f = PiecewiseConvexFn.from_terms(q, lin, 0.0, abs_terms)
    assert f.is_convex()
    assert f.continuity_gap() < 1e-9
    t = f.argmin()
    grid = np.linspace(t - 5, t + 5, 401)
    assert f(t) <= min(f(g) for g in grid) + 1e-9
    # direct evaluation agrees with the term-wise formula
    for s in (t - 1.3, t, t + 0.7):
        ref = q * s * s + lin * s + sum(w * abs(s - p) for w, p in abs_terms)
        assert f(s) == pytest.approx(ref, abs=1e-8 * (1 + abs(ref)))


def test_linear_minimiser_is_left_endpoint():
    # |t - 1| + |t - 3| is flat on [1, 3]
    f = PiecewiseConvexFn.from_terms(0.0, 0.0, 0.0, [(1, 1.0), (1, 3.0)])
    assert f.argmin() == 1.0
    assert f.derivative(2.0) == 0.0


def test_unbounded_rejected():
    f = PiecewiseConvexFn.from_terms(0.0, 1.0, 0.0, [(0.5, 0.0)])
    with pytest.raises(ValueError):
        f.argmin()
    with pytest.raises(ValueError):
        PiecewiseConvexFn.from_terms(-1.0)


@given(terms, terms)
def test_sum_matches_pointwise(a, b):
    f = PiecewiseConvexFn.from_terms(1.0, 0.5, 0.0, a)
    g = PiecewiseConvexFn.from_terms(0.5, -1.0, 2.0, b)
    h = f + g
    assert h.is_convex()
    for s in np.linspace(-6, 6, 25):
        assert h(s) == pytest.approx(f(s) + g(s), abs=1e-8)
