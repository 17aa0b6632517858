"""C2 cubic Bezier splines through ordered point sets.

The intermediate control points of the open spline solve a tridiagonal
system; the closed spline's system is cyclic tridiagonal plus two extra
wrap entries, folded in with a rank-2 Woodbury correction so both fits
stay O(n).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .banded import solve_banded_corrected, solve_tridiagonal, tridiagonal_ab
from .errors import DegenerateInputError, DomainError, InputSizeError


def bbox_diameter(points):
    """Diagonal of the bounding box; the length scale for tolerances."""
    pts = np.asarray(points, float)
    span = pts.max(axis=0) - pts.min(axis=0)
    return float(np.hypot(span[0], span[1]))


@dataclass(frozen=True)
class PointSet:
    """Ordered sample points with open/closed topology.

    End slopes (curve derivatives at the two endpoints) are required for
    open point sets and must be absent for closed ones.
    """

    points: np.ndarray
    closed: bool
    slope_left: np.ndarray | None = None
    slope_right: np.ndarray | None = None

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, float))
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise DegenerateInputError("points must be an (n+1, 2) array")
        if not np.all(np.isfinite(pts)):
            raise DegenerateInputError("points must be finite")
        need = 3 if self.closed else 2
        if len(pts) < need:
            raise InputSizeError(f"need at least {need} points")
        seg = np.diff(pts, axis=0)
        if np.any(np.hypot(seg[:, 0], seg[:, 1]) == 0.0):
            raise DegenerateInputError("consecutive points must be distinct")
        if self.closed and np.hypot(*(pts[-1] - pts[0])) == 0.0:
            raise DegenerateInputError("closed input must not repeat the first point")
        object.__setattr__(self, "points", pts)
        if self.closed:
            if self.slope_left is not None or self.slope_right is not None:
                raise DegenerateInputError("closed point sets take no end slopes")
        else:
            if self.slope_left is None or self.slope_right is None:
                raise DegenerateInputError("open point sets need both end slopes")
            object.__setattr__(self, "slope_left", np.asarray(self.slope_left, float))
            object.__setattr__(self, "slope_right", np.asarray(self.slope_right, float))

    @property
    def n_points(self) -> int:
        return len(self.points)

    @property
    def scale(self) -> float:
        return bbox_diameter(self.points)


@dataclass(frozen=True)
class BezierSpline:
    """Cubic segments as an (m, 4, 2) control array; domain is [0, m]."""

    control: np.ndarray
    closed: bool

    @property
    def n_segments(self) -> int:
        return len(self.control)

    @property
    def L(self) -> float:
        return float(self.n_segments)


def fit_open_spline(pts: PointSet) -> BezierSpline:
    """C2 spline through an open point set with prescribed end slopes."""
    if pts.closed:
        raise DegenerateInputError("expected an open point set")
    C = pts.points
    n = len(C) - 1  # segments
    cl, cr = pts.slope_left, pts.slope_right
    if n == 1:
        ctrl = np.empty((1, 4, 2))
        ctrl[0, 0] = C[0]
        ctrl[0, 1] = C[0] + cl / 3.0
        ctrl[0, 2] = C[1] - cr / 3.0
        ctrl[0, 3] = C[1]
        return BezierSpline(ctrl, closed=False)

    diag = np.full(n, 4.0)
    lower = np.ones(n - 1)
    upper = np.ones(n - 1)
    diag[0] = 1.0
    upper[0] = 0.0
    rhs = np.empty((n, 2))
    rhs[0] = C[0] + cl / 3.0
    i = np.arange(1, n - 1)
    rhs[1:-1] = 2.0 * C[i + 1] + 4.0 * C[i]
    rhs[-1] = 4.0 * C[n - 1] + C[n] - cr / 3.0
    u = solve_tridiagonal(lower, diag, upper, rhs)  # P_11 .. P_n1

    ctrl = np.empty((n, 4, 2))
    ctrl[:, 0] = C[:-1]
    ctrl[:, 3] = C[1:]
    ctrl[:, 1] = u
    ctrl[:-1, 2] = 2.0 * C[1:-1] - u[1:]
    ctrl[-1, 2] = C[n] - cr / 3.0
    return BezierSpline(ctrl, closed=False)


def fit_closed_spline(pts: PointSet) -> BezierSpline:
    """C2 periodic spline through a closed point set, n+1 segments."""
    if not pts.closed:
        raise DegenerateInputError("expected a closed point set")
    C = pts.points
    m = len(C)  # segments = points for a closed loop
    n = m - 1

    # unknowns u_j = P_(j+1)1; rows: wrap second-derivative condition,
    # interior three-term rows, wrap first-derivative condition
    diag = np.full(m, 4.0)
    lower = np.ones(m - 1)
    upper = np.ones(m - 1)
    diag[0] = -2.0
    upper[0] = -1.0
    rhs = np.empty((m, 2))
    rhs[0] = -2.0 * C[1] + 8.0 * C[n]
    r = np.arange(1, m - 1)
    rhs[1:-1] = 2.0 * C[r + 1] + 4.0 * C[r]
    rhs[-1] = 2.0 * C[0] + 4.0 * C[n]

    if m <= 4:
        A = np.diag(diag) + np.diag(lower, -1) + np.diag(upper, 1)
        A[0, m - 2] += 2.0
        A[0, m - 1] += 7.0
        A[m - 1, 0] += 1.0
        try:
            u = np.linalg.solve(A, rhs)
        except np.linalg.LinAlgError as exc:
            raise DegenerateInputError(f"singular closed-spline system: {exc}") from exc
    else:
        ab = tridiagonal_ab(lower, diag, upper)
        corrections = [(0, m - 2, 2.0), (0, m - 1, 7.0), (m - 1, 0, 1.0)]
        u = solve_banded_corrected((1, 1), ab, rhs, corrections)

    nxt = np.arange(1, m + 1) % m
    ctrl = np.empty((m, 4, 2))
    ctrl[:, 0] = C
    ctrl[:, 3] = C[nxt]
    ctrl[:, 1] = u
    ctrl[:, 2] = 2.0 * C[nxt] - u[nxt]
    return BezierSpline(ctrl, closed=True)


def fit_spline(pts: PointSet) -> BezierSpline:
    return fit_closed_spline(pts) if pts.closed else fit_open_spline(pts)


def _segment_local(spline, t):
    t = np.atleast_1d(np.asarray(t, float))
    m = spline.n_segments
    if spline.closed:
        t = np.mod(t, m)
    else:
        slack = 1e-12 * max(m, 1)
        if np.any(t < -slack) or np.any(t > m + slack):
            raise DomainError("parameter outside [0, L] on an open spline")
        t = np.clip(t, 0.0, m)
    i = np.clip(np.ceil(t), 1, m).astype(int)
    return i - 1, t - (i - 1)


def eval_spline(spline: BezierSpline, t):
    """Point on the spline at parameter t (vectorized; closed splines wrap)."""
    seg, u = _segment_local(spline, t)
    P = spline.control[seg]
    u = u[:, None]
    b = 1.0 - u
    out = b**3 * P[:, 0] + 3 * b**2 * u * P[:, 1] + 3 * b * u**2 * P[:, 2] + u**3 * P[:, 3]
    return out


def eval_spline_derivative(spline: BezierSpline, t, order=1):
    """First or second derivative with respect to t."""
    seg, u = _segment_local(spline, t)
    P = spline.control[seg]
    u = u[:, None]
    b = 1.0 - u
    if order == 1:
        return 3.0 * (b**2 * (P[:, 1] - P[:, 0]) + 2 * b * u * (P[:, 2] - P[:, 1]) + u**2 * (P[:, 3] - P[:, 2]))
    if order == 2:
        return 6.0 * (b * (P[:, 2] - 2 * P[:, 1] + P[:, 0]) + u * (P[:, 3] - 2 * P[:, 2] + P[:, 1]))
    raise ValueError("order must be 1 or 2")


def knot_continuity(spline: BezierSpline):
    """Maximum first- and second-derivative jumps across knots.

    Includes the wrap-around knot for closed splines.
    """
    m = spline.n_segments
    if spline.closed:
        left = np.arange(m)
        right = (left + 1) % m
    else:
        if m == 1:
            return 0.0, 0.0
        left = np.arange(m - 1)
        right = left + 1
    ones = np.ones(len(left))
    zeros = np.zeros(len(right))
    P = spline.control
    d1l = eval_spline_derivative(BezierSpline(P[left], False), ones)
    d1r = eval_spline_derivative(BezierSpline(P[right], False), zeros)
    d2l = eval_spline_derivative(BezierSpline(P[left], False), ones, order=2)
    d2r = eval_spline_derivative(BezierSpline(P[right], False), zeros, order=2)
    c1 = float(np.max(np.hypot(*(d1l - d1r).T)))
    c2 = float(np.max(np.hypot(*(d2l - d2r).T)))
    return c1, c2
