"""Convex piecewise-quadratic functions of one real variable.

Pure-Python counterpart of the compiled solver messages.  It is used by
the coordinate-descent oracle, where every coordinate update minimises
a function of the form

    q t**2 + l t + c + sum_k w_k |t - p_k|,     q >= 0, w_k >= 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PiecewiseConvexFn:
    """Breakpoints ``x_1 < ... < x_m`` and per-segment coefficients.

    Segment ``k`` (``0 <= k <= m``) covers ``(x_k, x_{k+1})`` with
    ``x_0 = -inf`` and ``x_{m+1} = +inf``; on it the function equals
    ``curvature[k] t**2 + slope[k] t + intercept[k]``.
    """

    breakpoints: np.ndarray
    curvature: np.ndarray
    slope: np.ndarray
    intercept: np.ndarray

    @classmethod
    def from_terms(cls, quad=0.0, lin=0.0, const=0.0, abs_terms=()):
        """Build ``quad t^2 + lin t + const + sum w |t - p|`` from ``(w, p)`` pairs."""
        if quad < 0:
            raise ValueError("curvature must be nonnegative")
        pts: dict[float, float] = {}
        for w, p in abs_terms:
            if w < 0:
                raise ValueError("absolute-value weights must be nonnegative")
            if w > 0:
                pts[float(p)] = pts.get(float(p), 0.0) + float(w)
        xs = np.array(sorted(pts))
        ws = np.array([pts[x] for x in xs])
        m = xs.size
        # left of everything: every |t - p| = p - t
        s0 = lin - ws.sum()
        c0 = const + float(np.dot(ws, xs))
        slope = s0 + 2.0 * np.concatenate(([0.0], np.cumsum(ws)))
        intercept = c0 - 2.0 * np.concatenate(([0.0], np.cumsum(ws * xs)))
        curvature = np.full(m + 1, float(quad))
        return cls(xs, curvature, slope, intercept)

    def _segment(self, t: float, right: bool = True) -> int:
        side = "right" if right else "left"
        return int(np.searchsorted(self.breakpoints, t, side=side))

    def __call__(self, t: float) -> float:
        k = self._segment(t)
        return float(self.curvature[k] * t * t + self.slope[k] * t + self.intercept[k])

    def derivative(self, t: float, right: bool = True) -> float:
        k = self._segment(t, right)
        return float(2.0 * self.curvature[k] * t + self.slope[k])

    def __add__(self, other: "PiecewiseConvexFn") -> "PiecewiseConvexFn":
        xs = np.union1d(self.breakpoints, other.breakpoints)
        # probe each segment at an interior point to read off coefficients
        edges = np.concatenate(([xs[0] - 1.0] if xs.size else [0.0],
                                (xs[:-1] + xs[1:]) / 2.0,
                                [xs[-1] + 1.0] if xs.size else []))
        ks = np.searchsorted(self.breakpoints, edges, side="right")
        ls = np.searchsorted(other.breakpoints, edges, side="right")
        return PiecewiseConvexFn(
            xs,
            self.curvature[ks] + other.curvature[ls],
            self.slope[ks] + other.slope[ls],
            self.intercept[ks] + other.intercept[ls],
        )

    def is_convex(self, tol: float = 1e-12) -> bool:
        if np.any(self.curvature < -tol):
            return False
        x = self.breakpoints
        left = 2 * self.curvature[:-1] * x + self.slope[:-1]
        right = 2 * self.curvature[1:] * x + self.slope[1:]
        return bool(np.all(right - left >= -tol * (1 + np.abs(left))))

    def continuity_gap(self) -> float:
        """Largest relative jump in value across a breakpoint."""
        x = self.breakpoints
        if x.size == 0:
            return 0.0
        lv = self.curvature[:-1] * x * x + self.slope[:-1] * x + self.intercept[:-1]
        rv = self.curvature[1:] * x * x + self.slope[1:] * x + self.intercept[1:]
        return float(np.max(np.abs(lv - rv) / (1.0 + np.abs(lv))))

    def argmin(self) -> float:
        """Left end of the minimising set."""
        xs = self.breakpoints
        m = xs.size
        for k in range(m + 1):
            left = xs[k - 1] if k > 0 else -np.inf
            right = xs[k] if k < m else np.inf
            q, s = self.curvature[k], self.slope[k]
            if q > 0:
                t = -s / (2 * q)
                if t <= right:
                    return float(max(t, left))
            elif s >= 0:
                if left == -np.inf:
                    raise ValueError("function is unbounded below or flat at -inf")
                return float(left)
        raise ValueError("function is unbounded below")
