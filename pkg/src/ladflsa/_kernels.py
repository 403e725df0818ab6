"""Compiled forward/backward dynamic programme for 1-D fused problems.

The forward message ``m_i`` is a convex function of one scalar.  It is
stored through its right derivative ``g_i``, which is piecewise linear:
a sorted list of breakpoints ``xs`` carrying jumps ``(da, db)`` in the
derivative's coefficients, plus the coefficients ``(aL, bL)`` left of the
first breakpoint and ``(aR, bR)`` right of the last one.  For the LAD
loss every ``a`` is zero and the derivative is a step function.

One step of the recursion is

    m_{i+1}(u) = l_{i+1}(u) + min_v  m_i(v) + lam2 |u - v|

and the inner minimisation clips ``g_i`` to ``[-lam2, lam2]``.  The two
clipping points are stored; the backward pass is
``mu_i = clip(mu_{i+1}, lo_i, hi_i)``.

When the inner minimiser is an interval (flat LAD derivative at
``+-lam2``) both clip points are the left ends of their plateaus, so the
backward pass returns left endpoints.
"""

import numpy as np
from numba import njit

MERGE_TOL = 1e-12


@njit(cache=True)
def _recentre(xs, da, db, head, tail):
    cap = xs.size
    m = tail - head
    new_head = (cap - m) // 2
    if new_head == head:
        return head, tail
    tmp_x = xs[head:tail].copy()
    tmp_a = da[head:tail].copy()
    tmp_b = db[head:tail].copy()
    xs[new_head:new_head + m] = tmp_x
    da[new_head:new_head + m] = tmp_a
    db[new_head:new_head + m] = tmp_b
    return new_head, new_head + m


@njit(cache=True)
def _insert(xs, da, db, head, tail, x, dA, dB):
    # binary search for first breakpoint >= x
    lo = head
    hi = tail
    while lo < hi:
        mid = (lo + hi) // 2
        if xs[mid] < x:
            lo = mid + 1
        else:
            hi = mid
    pos = lo
    # on a merge an exact zero wins, so lasso-thresholded fits stay exactly 0
    if pos < tail and xs[pos] - x <= MERGE_TOL:
        da[pos] += dA
        db[pos] += dB
        if x == 0.0:
            xs[pos] = 0.0
        return head, tail
    if pos > head and x - xs[pos - 1] <= MERGE_TOL:
        da[pos - 1] += dA
        db[pos - 1] += dB
        if x == 0.0:
            xs[pos - 1] = 0.0
        return head, tail
    if head == 0 or tail == xs.size:
        shift = head
        head, tail = _recentre(xs, da, db, head, tail)
        pos += head - shift
    if pos - head < tail - pos:
        for k in range(head, pos):
            xs[k - 1] = xs[k]
            da[k - 1] = da[k]
            db[k - 1] = db[k]
        head -= 1
        pos -= 1
    else:
        for k in range(tail, pos, -1):
            xs[k] = xs[k - 1]
            da[k] = da[k - 1]
            db[k] = db[k - 1]
        tail += 1
    xs[pos] = x
    da[pos] = dA
    db[pos] = dB
    return head, tail


@njit(cache=True)
def _lower_crossing(xs, da, db, head, tail, aL, bL, aR, bR, level):
    """Smallest u with g(u+) >= level.

    Returns (t, k, a, b): the crossing, the index of the first breakpoint
    strictly right of the segment containing it, and that segment's
    coefficients.  ``t`` is -inf when g already exceeds ``level`` at -inf.
    """
    a = aL
    b = bL
    left = -np.inf
    for k in range(head, tail + 1):
        if k < tail:
            right = xs[k]
            reached = a * right + b >= level
        else:
            right = np.inf
            reached = True
        if reached:
            if a == 0.0:
                if b >= level or k == tail:
                    return left, k, a, b
            t = (level - b) / a if a != 0.0 else left
            if t < left:
                t = left
            if t > right:
                t = right
            return t, k, a, b
        a += da[k]
        b += db[k]
        left = right
    return left, tail, a, b


@njit(cache=True)
def _upper_crossing(xs, da, db, head, tail, aL, bL, aR, bR, level):
    """Smallest u with g(u+) >= level, scanning from the right.

    Returns (t, k, a, b) where breakpoints ``k..tail-1`` lie at or right of
    the segment's right end and ``(a, b)`` are the segment coefficients.
    ``t`` is +inf when g stays below ``level``.
    """
    a = aR
    b = bR
    right = np.inf
    for k in range(tail - 1, head - 2, -1):
        if k >= head:
            left = xs[k]
            below = a * left + b < level
        else:
            left = -np.inf
            below = True
            if a == 0.0 and b >= level:
                return -np.inf, head, a, b
        if below:
            if a == 0.0:
                return right, k + 1, a, b
            t = (level - b) / a
            if t < left:
                t = left
            if t > right:
                t = right
            return t, k + 1, a, b
        if k >= head:
            a -= da[k]
            b -= db[k]
            right = left
    return -np.inf, head, a, b


@njit(cache=True)
def fused_dp(y, lam1, lam2, quad, lo_out, hi_out, mu_out):
    """Solve min sum loss(y_i - mu_i) + lam1 |mu_i| + lam2 |mu_i - mu_{i-1}|.

    ``quad`` selects the squared loss; otherwise the absolute loss.
    Returns the number of breakpoints held at the peak.
    """
    n = y.size
    if not quad and lam1 >= 1.0:
        # every loss subgradient is dominated by the lasso term: zero is a
        # minimiser, and at lam1 == 1 it is chosen over the tied left ends
        mu_out[:] = 0.0
        return 0
    cap = 8 * n + 64
    xs = np.empty(cap)
    da = np.zeros(cap)
    db = np.zeros(cap)
    head = cap // 2
    tail = head
    aL = 0.0
    bL = 0.0
    aR = 0.0
    bR = 0.0
    peak = 0
    for i in range(n):
        yi = y[i]
        if quad:
            aL += 2.0
            aR += 2.0
            bL += -2.0 * yi - lam1
            bR += -2.0 * yi + lam1
        else:
            bL -= 1.0 + lam1
            bR += 1.0 + lam1
            head, tail = _insert(xs, da, db, head, tail, yi, 0.0, 2.0)
        if lam1 > 0.0:
            head, tail = _insert(xs, da, db, head, tail, 0.0, 0.0, 2.0 * lam1)
        if tail - head > peak:
            peak = tail - head
        if i == n - 1:
            break
        # clip from above first so the lam2 = 0 case sees the raw derivative
        t, k, a, b = _upper_crossing(xs, da, db, head, tail, aL, bL, aR, bR, lam2)
        hi_out[i] = t
        if t == -np.inf:
            tail = head
            aL = 0.0
            aR = 0.0
            bL = lam2
            bR = lam2
        elif t != np.inf:
            tail = k
            aR = 0.0
            bR = lam2
            dA = -a
            dB = lam2 - b
            if dA != 0.0 or dB != 0.0:
                if tail == xs.size:
                    head, tail = _recentre(xs, da, db, head, tail)
                if tail > head and t < xs[tail - 1]:
                    t = xs[tail - 1]
                if tail > head and t - xs[tail - 1] <= MERGE_TOL:
                    da[tail - 1] += dA
                    db[tail - 1] += dB
                else:
                    xs[tail] = t
                    da[tail] = dA
                    db[tail] = dB
                    tail += 1
        t, k, a, b = _lower_crossing(xs, da, db, head, tail, aL, bL, aR, bR, -lam2)
        lo_out[i] = t
        if t != -np.inf:
            head = k
            aL = 0.0
            bL = -lam2
            dA = a
            dB = b + lam2
            if dA != 0.0 or dB != 0.0:
                if head == 0:
                    head, tail = _recentre(xs, da, db, head, tail)
                if tail > head and t > xs[head]:
                    t = xs[head]
                if tail > head and xs[head] - t <= MERGE_TOL:
                    da[head] += dA
                    db[head] += dB
                else:
                    head -= 1
                    xs[head] = t
                    da[head] = dA
                    db[head] = dB
    t, k, a, b = _lower_crossing(xs, da, db, head, tail, aL, bL, aR, bR, 0.0)
    mu_out[n - 1] = t
    for i in range(n - 2, -1, -1):
        v = mu_out[i + 1]
        if v < lo_out[i]:
            v = lo_out[i]
        if v > hi_out[i]:
            v = hi_out[i]
        mu_out[i] = v
    return peak


@njit(cache=True)
def _fit_summary(y, mu, quad, zero_tol):
    """Residual (l1 or squared) and number of nonzero exact blocks."""
    n = y.size
    res = 0.0
    for i in range(n):
        r = y[i] - mu[i]
        res += r * r if quad else abs(r)
    k = 0
    for i in range(n):
        if i == 0 or mu[i] != mu[i - 1]:
            if abs(mu[i]) > zero_tol:
                k += 1
    return res, k


@njit(cache=True)
def grid_scan(y, lam1s, lam2s, quad, zero_tol, res_l1, dfs):
    """Fit every (lam1, lam2) pair; record l1 residual and nonzero-block count."""
    n = y.size
    lo = np.empty(max(n - 1, 1))
    hi = np.empty(max(n - 1, 1))
    mu = np.empty(n)
    for p in range(lam1s.size):
        for q in range(lam2s.size):
            fused_dp(y, lam1s[p], lam2s[q], quad, lo, hi, mu)
            r, k = _fit_summary(y, mu, False, zero_tol)
            res_l1[p, q] = r
            dfs[p, q] = k
