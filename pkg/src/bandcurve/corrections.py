"""Per-iteration corrections: re-closing, rigid repositioning, perturbation.

Filtering opens closed curves, drifts the whole curve, and breaks
interpolation.  The three operations here undo that damage: s' is
orthogonalized against cos(theta) and sin(theta); the curve is rotated and
translated onto the data by a least-squares rigid motion; and Gaussian
bumps centered at the fixed nearest parameters restore exact
interpolation through an effectively banded linear solve.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .banded import solve_banded_corrected
from .bezier import PointSet, bbox_diameter
from .errors import DegenerateInputError, SingularSystemError
from .kinematics import CurveState, eval_state, state_series
from . import spectral

# image terms below this are invisible at double precision
_IMAGE_FLOOR = 1e-17

_DEGENERATE_NORM = 1e-24


def close_sprime(theta, sprime):
    """Project s' so its closure sums against cos/sin(theta) vanish.

    Two plain Gram-Schmidt steps with uniform (trapezoidal) weights: remove
    the cos(theta) component, then the component along sin(theta) with its
    own cos(theta) part removed.
    """
    theta = np.asarray(theta, float)
    s = np.asarray(sprime, float).copy()
    cos_t = np.cos(theta)
    sin_t = np.sin(theta)
    cc = np.mean(cos_t * cos_t)
    if cc < _DEGENERATE_NORM:
        raise DegenerateInputError("cos(theta) is numerically zero; cannot close")
    s -= cos_t * (np.mean(s * cos_t) / cc)
    lam = sin_t - cos_t * (np.mean(sin_t * cos_t) / cc)
    ll = np.mean(lam * lam)
    if ll < _DEGENERATE_NORM:
        raise DegenerateInputError("sin(theta) is parallel to cos(theta); cannot close")
    s -= lam * (np.mean(s * lam) / ll)
    return s


@dataclass(frozen=True)
class NearestParams:
    """Curve parameters of the closest points, plus per-point bump widths.

    Computed once on the seed curve and reused at every iteration.
    """

    tpar: np.ndarray
    sigma: np.ndarray


def _eval_bundle(state: CurveState, coeff_mat, t):
    """Evaluate several same-length series (columns of coeff_mat) at t."""
    t = np.asarray(t, float)
    n = coeff_mat.shape[0]
    out = np.empty((len(t), coeff_mat.shape[1]), dtype=coeff_mat.dtype)
    step = max(1, spectral._EVAL_CHUNK // max(n, 1))
    if state.basis == spectral.FOURIER:
        k = np.arange(-(n // 2), n // 2)
        for lo in range(0, len(t), step):
            hi = min(lo + step, len(t))
            E = np.exp(2j * np.pi * np.outer(t[lo:hi], k) / state.L)
            out[lo:hi] = E @ coeff_mat
        return out.real
    kk = np.arange(n)
    ang = np.arccos(np.clip(2.0 * t / state.L - 1.0, -1.0, 1.0))
    for lo in range(0, len(t), step):
        hi = min(lo + step, len(t))
        out[lo:hi] = np.cos(np.outer(ang[lo:hi], kk)) @ coeff_mat
    return out


def _bump_widths(tpar, L, closed, n_bands, eps):
    """sigma_i = log(1/eps) L^2 / D_i^2, D_i the n_bands-th neighbor gap.

    Makes the perturbation matrix numerically banded with half-bandwidth
    n_bands by construction.
    """
    m = len(tpar)
    if m == 1:
        delta = np.array([L], float)
    else:
        order = np.argsort(tpar)
        ts = tpar[order]
        k = min(n_bands, m - 1)
        cand = np.full((m, 2 * k), np.inf)
        for o in range(1, k + 1):
            if closed:
                right = (np.roll(ts, -o) - ts) % L
                left = (ts - np.roll(ts, o)) % L
                cand[:, 2 * (o - 1)] = np.where(right == 0.0, L, right)
                cand[:, 2 * (o - 1) + 1] = np.where(left == 0.0, L, left)
            else:
                cand[:-o, 2 * (o - 1)] = ts[o:] - ts[:-o]
                cand[o:, 2 * (o - 1) + 1] = ts[o:] - ts[:-o]
        kth = np.partition(cand, k - 1, axis=1)[:, k - 1]
        delta = np.empty(m)
        delta[order] = kth
    sigma = np.log(1.0 / eps) * (L / delta) ** 2
    return sigma


def nearest_parameters(state: CurveState, pts: PointSet, n_bands=8, eps=1e-16, max_iter=30):
    """Closest-point parameters on the curve for every data point.

    Coarse argmin over the N samples, then damped Newton on the squared
    distance using the spectral derivatives of the coordinate series.
    """
    data = pts.points
    nodes = state.nodes
    L = state.L
    tol = 1e-12 * L

    # coarse scan, chunked over data points to bound the distance matrix
    t = np.empty(len(data))
    step = max(1, spectral._EVAL_CHUNK // max(state.N, 1))
    for lo in range(0, len(data), step):
        hi = min(lo + step, len(data))
        d2 = (data[lo:hi, 0:1] - state.x) ** 2 + (data[lo:hi, 1:2] - state.y) ** 2
        t[lo:hi] = nodes[np.argmin(d2, axis=1)]

    xs, ys = state_series(state)
    xp = spectral.differentiate(xs)
    yp = spectral.differentiate(ys)
    xpp = spectral.differentiate(xp)
    ypp = spectral.differentiate(yp)
    bundle = np.column_stack([xs.coeffs, ys.coeffs, xp.coeffs, yp.coeffs, xpp.coeffs, ypp.coeffs])

    max_step = 2.0 * float(np.max(np.diff(nodes))) if state.N > 1 else L
    active = np.arange(len(data))
    for _ in range(max_iter):
        vals = _eval_bundle(state, bundle, t[active])
        gx, gy, dgx, dgy, ddgx, ddgy = vals.T
        rx = gx - data[active, 0]
        ry = gy - data[active, 1]
        d1 = 2.0 * (rx * dgx + ry * dgy)
        d2 = 2.0 * (dgx * dgx + dgy * dgy + rx * ddgx + ry * ddgy)
        with np.errstate(divide="ignore", invalid="ignore"):
            delta = np.where(d2 > 0.0, -d1 / d2, -np.sign(d1) * max_step)
        delta = np.clip(delta, -max_step, max_step)
        tn = t[active] + delta
        if state.closed:
            tn = np.mod(tn, L)
        else:
            tn = np.clip(tn, 0.0, L)
        moved = np.abs(tn - t[active])
        t[active] = tn
        if state.closed:
            done = moved < tol
        else:
            stuck = ((tn == 0.0) & (delta < 0.0)) | ((tn == L) & (delta > 0.0))
            done = (moved < tol) | stuck
        active = active[~done]
        if len(active) == 0:
            break

    sigma = _bump_widths(t, L, state.closed, n_bands, eps)
    return NearestParams(tpar=t, sigma=sigma)


@dataclass(frozen=True)
class PerturbationBasis:
    """Matrix-free evaluator of the Gaussian bumps g_i(t).

    Closed curves periodize each bump by an image sum over shifts of L;
    the number of images keeps the truncated tail below double precision.
    """

    tpar: np.ndarray
    sigma: np.ndarray
    L: float
    closed: bool
    n_images: int

    def matrix(self, t):
        """G[j, i] = g_i(t_j), built in chunks."""
        t = np.asarray(t, float)
        m = len(self.tpar)
        G = np.empty((len(t), m))
        step = max(1, spectral._EVAL_CHUNK // max(m, 1))
        for lo in range(0, len(t), step):
            hi = min(lo + step, len(t))
            u = (t[lo:hi, None] - self.tpar[None, :]) / self.L
            if self.closed:
                acc = np.zeros_like(u)
                for k in range(-self.n_images, self.n_images + 1):
                    acc += np.exp(-self.sigma[None, :] * (u + k) ** 2)
                G[lo:hi] = acc
            else:
                G[lo:hi] = np.exp(-self.sigma[None, :] * u * u)
        return G

    def evaluate_one(self, i, t):
        """g_i at parameters t."""
        t = np.asarray(t, float)
        u = (t - self.tpar[i]) / self.L
        if not self.closed:
            return np.exp(-self.sigma[i] * u * u)
        acc = np.zeros_like(u)
        for k in range(-self.n_images, self.n_images + 1):
            acc += np.exp(-self.sigma[i] * (u + k) ** 2)
        return acc

    def apply(self, t, cx, cy):
        """(sum_i cx_i g_i(t), sum_i cy_i g_i(t)) without storing all of G."""
        t = np.asarray(t, float)
        dx = np.empty(len(t))
        dy = np.empty(len(t))
        step = max(1, spectral._EVAL_CHUNK // max(len(self.tpar), 1))
        for lo in range(0, len(t), step):
            hi = min(lo + step, len(t))
            G = self.matrix(t[lo:hi])
            dx[lo:hi] = G @ cx
            dy[lo:hi] = G @ cy
        return dx, dy


def perturbation_basis(nearest: NearestParams, L, closed) -> PerturbationBasis:
    n_images = 0
    if closed:
        smin = float(np.min(nearest.sigma))
        n_images = 1 + int(np.ceil(np.sqrt(np.log(1.0 / _IMAGE_FLOOR) / smin)))
    return PerturbationBasis(nearest.tpar, nearest.sigma, float(L), bool(closed), n_images)


@dataclass(frozen=True)
class RigidFix:
    """Rotation by psi about the closest-point centroid plus a translation."""

    psi: float
    dx: float
    dy: float
    center: tuple[float, float]
    r: np.ndarray
    phi: np.ndarray


def _rigid_objective(params, center, r, phi, data):
    psi, dx, dy = params
    u = center[0] + dx + r * np.cos(phi + psi) - data[:, 0]
    v = center[1] + dy + r * np.sin(phi + psi) - data[:, 1]
    return float(np.sum(u * u + v * v))


def _rigid_grad_hess(params, center, r, phi, data):
    psi, dx, dy = params
    cs = r * np.cos(phi + psi)
    sn = r * np.sin(phi + psi)
    u = center[0] + dx + cs - data[:, 0]
    v = center[1] + dy + sn - data[:, 1]
    g = np.array([
        2.0 * np.sum(-u * sn + v * cs),
        2.0 * np.sum(u),
        2.0 * np.sum(v),
    ])
    H = np.empty((3, 3))
    H[0, 0] = 2.0 * np.sum(r * r - u * cs - v * sn)
    H[0, 1] = H[1, 0] = 2.0 * np.sum(-sn)
    H[0, 2] = H[2, 0] = 2.0 * np.sum(cs)
    H[1, 1] = H[2, 2] = 2.0 * len(r)
    H[1, 2] = H[2, 1] = 0.0
    return g, H


def _rigid_closed_form(center, r, phi, data):
    """Exact minimizer: translation to the centroid, Procrustes angle."""
    dxy = data.mean(axis=0) - np.asarray(center)
    q = data - data.mean(axis=0)
    px = r * np.cos(phi)
    py = r * np.sin(phi)
    A = np.sum(q[:, 0] * px + q[:, 1] * py)
    B = np.sum(q[:, 1] * px - q[:, 0] * py)
    psi = float(np.arctan2(B, A)) if (A != 0.0 or B != 0.0) else 0.0
    return np.array([psi, dxy[0], dxy[1]])


def reposition(state: CurveState, nearest: NearestParams, pts: PointSet, max_iter=50):
    """Rotate + translate the curve onto the data, least squares.

    Newton from (0, 0, 0) with step halving; if it stalls, falls back to
    the closed-form minimizer of the same objective.
    """
    data = pts.points
    close = eval_state(state, nearest.tpar)
    center = close.mean(axis=0)
    rel = close - center
    r = np.hypot(rel[:, 0], rel[:, 1])
    phi = np.arctan2(rel[:, 1], rel[:, 0])
    scale = bbox_diameter(data)
    gtol = 1e-12 * max(scale, 1e-30) ** 2

    params = np.zeros(3)
    f = _rigid_objective(params, center, r, phi, data)
    for _ in range(max_iter):
        g, H = _rigid_grad_hess(params, center, r, phi, data)
        if np.linalg.norm(g) <= gtol:
            break
        try:
            step = -np.linalg.solve(H, g)
        except np.linalg.LinAlgError:
            break
        lam = 1.0
        while lam > 1e-12:
            trial = params + lam * step
            ft = _rigid_objective(trial, center, r, phi, data)
            if ft <= f:
                params, f = trial, ft
                break
            lam *= 0.5
        else:
            break

    g, _ = _rigid_grad_hess(params, center, r, phi, data)
    if np.linalg.norm(g) > gtol:
        alt = _rigid_closed_form(center, r, phi, data)
        fa = _rigid_objective(alt, center, r, phi, data)
        if fa <= f:
            params, f = alt, fa

    psi, dx, dy = params
    fix = RigidFix(float(psi), float(dx), float(dy), (float(center[0]), float(center[1])), r, phi)
    cp, sp = np.cos(psi), np.sin(psi)
    xr = state.x - center[0]
    yr = state.y - center[1]
    xn = center[0] + dx + cp * xr - sp * yr
    yn = center[1] + dy + sp * xr + cp * yr
    return fix, replace(state, x=xn, y=yn)


def solve_perturbation_coefficients(state: CurveState, nearest: NearestParams, pts: PointSet, n_bands=8):
    """Bump coefficients that restore interpolation at the fixed parameters.

    The collocation matrix A[i, j] = g_j(tpar_i) is treated as banded with
    half-bandwidth n_bands; closed curves add their wrap entries back as a
    low-rank correction.
    """
    basis = perturbation_basis(nearest, state.L, state.closed)
    A = basis.matrix(nearest.tpar)
    cur = eval_state(state, nearest.tpar)
    rhs = pts.points - cur
    m = len(A)
    hb = min(n_bands, m - 1)

    if m <= 2 * hb + 2:
        try:
            sol = np.linalg.solve(A, rhs)
        except np.linalg.LinAlgError as exc:
            raise SingularSystemError(f"perturbation system is singular: {exc}") from exc
        return sol[:, 0], sol[:, 1]

    ab = np.zeros((2 * hb + 1, m))
    for d in range(-hb, hb + 1):
        diag = np.diagonal(A, offset=d)
        ab[hb - d, max(0, d) : max(0, d) + len(diag)] = diag
    corrections = []
    if state.closed:
        for i in range(hb):
            for j in range(m - hb + i, m):
                corrections.append((i, j, A[i, j]))
        for j in range(hb):
            for i in range(m - hb + j, m):
                corrections.append((i, j, A[i, j]))
    try:
        sol = solve_banded_corrected((hb, hb), ab, rhs, corrections)
    except SingularSystemError as exc:
        raise SingularSystemError(
            "perturbation system is ill-conditioned; points may be too close "
            f"for n_bands={n_bands}: {exc}"
        ) from exc
    return sol[:, 0], sol[:, 1]


def apply_perturbations(state: CurveState, nearest: NearestParams, pts: PointSet, n_bands=8):
    """Add the Gaussian bumps so the curve passes through the data again."""
    cx, cy = solve_perturbation_coefficients(state, nearest, pts, n_bands)
    basis = perturbation_basis(nearest, state.L, state.closed)
    dx, dy = basis.apply(state.nodes, cx, cy)
    return replace(state, x=state.x + dx, y=state.y + dy)
