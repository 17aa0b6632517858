"""Between the sampled curve (x, y) and its kinematics (theta, s').

Open curves live on Chebyshev nodes, closed curves on equispaced nodes;
the basis tag of a CurveState encodes which.  theta is the unwrapped
tangential angle, s' the parametrization speed, and c the linear ramp
theta(L) - theta(0) = 2 pi w that detrending removes on closed curves.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np

from . import spectral
from .bezier import BezierSpline, eval_spline
from .errors import ConfigError, NonPeriodicIntegrandError, NotClosedError, SingularParametrizationError
from .spectral import CHEBYSHEV, FOURIER, SpectralSeries


@dataclass(frozen=True)
class CurveState:
    """Samples of a curve and, once extracted, of its kinematics."""

    basis: str
    L: float
    x: np.ndarray
    y: np.ndarray
    theta: np.ndarray | None = None
    sprime: np.ndarray | None = None
    c: float = 0.0

    @property
    def N(self) -> int:
        return len(self.x)

    @property
    def closed(self) -> bool:
        return self.basis == FOURIER

    @property
    def nodes(self) -> np.ndarray:
        return spectral.basis_nodes(self.basis, self.N, self.L)

    @property
    def anchor(self):
        return float(self.x[0]), float(self.y[0])


def discretize_spline(spline: BezierSpline, N: int) -> CurveState:
    """Sample the seed spline at N basis nodes on [0, L]."""
    L = spline.L
    if N < 4 * (spline.n_segments + 1):
        warnings.warn(
            f"N={N} is small for {spline.n_segments} segments; kinematics may alias",
            stacklevel=2,
        )
    if spline.closed:
        if N % 2 != 0:
            raise ConfigError("closed curves need an even node count")
        basis = FOURIER
    else:
        basis = CHEBYSHEV
    t = spectral.basis_nodes(basis, N, L)
    p = eval_spline(spline, t)
    return CurveState(basis=basis, L=L, x=p[:, 0], y=p[:, 1])


def unwrap_angles(theta_raw):
    """Remove the 2 pi branch-cut jumps; the first entry is unchanged."""
    return np.unwrap(np.asarray(theta_raw, float))


def extract_kinematics(state: CurveState) -> CurveState:
    """Fill theta, s' (and c on closed curves) by spectral differentiation."""
    xs = spectral.forward(state.x, state.L, state.basis)
    ys = spectral.forward(state.y, state.L, state.basis)
    dx = spectral.inverse(spectral.differentiate(xs))
    dy = spectral.inverse(spectral.differentiate(ys))
    if state.basis == FOURIER:
        dx = dx.real
        dy = dy.real
    sprime = np.hypot(dx, dy)
    if not np.all(np.isfinite(sprime)) or np.any(sprime <= 0.0):
        raise SingularParametrizationError("parametrization speed vanished or is non-finite")
    theta = unwrap_angles(np.arctan2(dy, dx))
    c = 0.0
    if state.closed:
        c = 2.0 * np.pi * round((theta[-1] - theta[0]) / (2.0 * np.pi))
    return replace(state, theta=theta, sprime=sprime, c=c)


def detrend_theta(state: CurveState) -> CurveState:
    """Subtract the ramp (c/L) t so theta becomes periodic."""
    return replace(state, theta=state.theta - (state.c / state.L) * state.nodes)


def retrend_theta(state: CurveState) -> CurveState:
    return replace(state, theta=state.theta + (state.c / state.L) * state.nodes)


def reconstruct_curve(state: CurveState) -> CurveState:
    """Rebuild (x, y) from theta and s' by spectral integration.

    theta must be the actual (retrended) angle.  The anchor is the current
    first sample, which pins the integration constant at t = 0.
    """
    u = state.sprime * np.cos(state.theta)
    v = state.sprime * np.sin(state.theta)
    ax, ay = state.anchor
    if state.basis == FOURIER:
        us = spectral.fourier_forward(u, state.L)
        vs = spectral.fourier_forward(v, state.L)
        mid = us.n // 2
        try:
            ux = spectral.fourier_integrate(us)
            uy = spectral.fourier_integrate(vs)
        except NonPeriodicIntegrandError as exc:
            raise NotClosedError(f"closure residual too large to reconstruct: {exc}") from exc
        x = ax + spectral.fourier_inverse(ux).real
        y = ay + spectral.fourier_inverse(uy).real
    else:
        ux = spectral.cheb_integrate(spectral.cheb_forward(u, state.L))
        uy = spectral.cheb_integrate(spectral.cheb_forward(v, state.L))
        x = ax + spectral.cheb_inverse(ux, n_nodes=state.N)
        y = ay + spectral.cheb_inverse(uy, n_nodes=state.N)
    return replace(state, x=x, y=y)


def state_series(state: CurveState) -> tuple[SpectralSeries, SpectralSeries]:
    """Forward transforms of the coordinate samples."""
    return (
        spectral.forward(state.x, state.L, state.basis),
        spectral.forward(state.y, state.L, state.basis),
    )


def eval_state(state: CurveState, t) -> np.ndarray:
    """Evaluate the state's interpolating series at arbitrary parameters."""
    xs, ys = state_series(state)
    x = spectral.inverse(xs, t)
    y = spectral.inverse(ys, t)
    if state.basis == FOURIER:
        x = x.real
        y = y.real
    return np.column_stack([x, y])
