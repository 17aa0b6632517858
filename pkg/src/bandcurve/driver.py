"""The outer continuation loop: filter schedule, thresholds, termination.

Each iteration transforms theta and s' to coefficients, checks whether the
counts above the noise thresholds fit inside the coefficient budgets,
filters with a shrinking Gaussian bandwidth, re-closes (closed case),
reconstructs, repositions, and repairs interpolation with smooth
perturbations.  On success the first n_coefs coefficients of x and y are
returned.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import spectral
from .bezier import PointSet, bbox_diameter, fit_spline
from .corrections import (
    NearestParams,
    apply_perturbations,
    close_sprime,
    nearest_parameters,
    reposition,
)
from .errors import ConfigError, DomainError, SingularParametrizationError
from .kinematics import (
    CurveState,
    detrend_theta,
    discretize_spline,
    extract_kinematics,
    reconstruct_curve,
    state_series,
)
from .spectral import CHEBYSHEV, FOURIER, SpectralSeries


@dataclass(frozen=True)
class FitConfig:
    """Knobs of one continuation run.

    closed and the end slopes may be left unset; the point set is then the
    sole authority on topology.
    """

    N: int
    n_coefs: int
    h_filter: float
    n_iters: int = 60
    eps: float = 1e-16
    n_bands: int = 8
    closed: bool | None = None
    slope_left: tuple[float, float] | None = None
    slope_right: tuple[float, float] | None = None

    def validate(self, pts: PointSet | None = None):
        if not (0.0 < self.h_filter < 1.0):
            raise ConfigError("h_filter must lie in (0, 1)")
        if not (0.0 < self.eps < 1.0):
            raise ConfigError("eps must lie in (0, 1)")
        if not (4 <= self.n_coefs <= self.N):
            raise ConfigError("need 4 <= n_coefs <= N")
        if self.n_bands < 1:
            raise ConfigError("n_bands must be at least 1")
        if self.n_iters < 1:
            raise ConfigError("n_iters must be at least 1")
        closed = self.closed if pts is None else pts.closed
        if self.closed is not None and pts is not None and self.closed != pts.closed:
            raise ConfigError("config and point set disagree on closedness")
        if closed:
            if self.N % 2 != 0:
                raise ConfigError("closed curves need an even N")
            if self.n_coefs % 2 != 0:
                raise ConfigError("closed curves need an even n_coefs")

    def echo(self) -> str:
        return (
            f"N={self.N} n_iters={self.n_iters} h_filter={self.h_filter!r} "
            f"eps={self.eps!r} n_coefs={self.n_coefs} n_bands={self.n_bands}"
        )


@dataclass(frozen=True)
class IterationRecord:
    m: int
    bandwidth: float
    cutoff: float
    count_theta: int
    count_sprime: int
    interp_residual: float
    closure_gap: float
    seconds: float


@dataclass
class FitResult:
    """Truncated coefficient representation of the fitted curve."""

    basis: str
    L: float
    closed: bool
    x_coefs: np.ndarray
    y_coefs: np.ndarray
    n_coefs: int
    n_stop: int
    e_samp: float
    converged: bool
    decay_theta: int
    decay_sprime: int
    delta_theta: float
    delta_sprime: float
    budget_theta: int
    budget_sprime: int
    scale: float
    config: FitConfig | None = None
    iterations: list[IterationRecord] = field(default_factory=list)
    state: CurveState | None = None
    nearest: NearestParams | None = None

    def eval(self, t) -> np.ndarray:
        """Points of the truncated-coefficient curve at parameters t."""
        x = spectral.eval_series(self.basis, self.x_coefs, self.L, t)
        y = spectral.eval_series(self.basis, self.y_coefs, self.L, t)
        return np.column_stack([x, y])


def compute_thresholds(state: CurveState, eps: float):
    """Noise floors (delta_theta, delta_sprime) from the seed state.

    The error of spectral differentiation scales with the conditioning of
    the differentiation matrix: about N^(3/2) with Clenshaw-Curtis weights
    for the open case, about N with uniform weights L/N for the closed one.
    """
    N = state.N
    if state.closed:
        w = np.full(N, state.L / N)
        condfac = float(N)
    else:
        w = spectral.clenshaw_curtis_weights(N, state.L)
        condfac = float(N) ** 1.5
    xs, ys = state_series(state)
    dx = spectral.inverse(spectral.differentiate(xs))
    dy = spectral.inverse(spectral.differentiate(ys))
    if state.closed:
        dx, dy = dx.real, dy.real
    norm2 = math.sqrt(float(np.sum(state.x**2 * w) + np.sum(state.y**2 * w)))
    delta_sprime = eps * condfac * norm2
    tang = np.sqrt(dx * dx * w + dy * dy * w)
    mn = float(np.min(tang))
    if not np.isfinite(mn) or mn <= 0.0:
        raise SingularParametrizationError("tangent norm vanished while computing thresholds")
    delta_theta = delta_sprime / mn
    return delta_theta, delta_sprime


def coef_budget(n_coefs: int, eps: float, delta: float) -> int:
    """ceil(n_coefs * log(1/delta) / log(1/eps)), the count allowed above delta."""
    if not (0.0 < delta < 1.0):
        raise DomainError("delta must lie in (0, 1)")
    if not (0.0 < eps < 1.0):
        raise DomainError("eps must lie in (0, 1)")
    return math.ceil(n_coefs * math.log(1.0 / delta) / math.log(1.0 / eps))


def filter_cutoff(m: int, cfg: FitConfig, closed: bool) -> float:
    K = cfg.N / 2.0 if closed else float(cfg.N - 1)
    return K * (1.0 - cfg.h_filter) ** m


def filter_bandwidth(m: int, cfg: FitConfig, closed: bool | None = None) -> float:
    """Gaussian bandwidth a_m with gain exactly eps at the cutoff index.

    The cutoff shrinks geometrically, pushing the top h_filter fraction of
    surviving indices below eps at every iteration.
    """
    if m < 1:
        raise DomainError("iteration index is 1-based")
    closed = cfg.closed if closed is None else closed
    if closed is None:
        raise ConfigError("closedness unknown; pass closed= explicitly")
    k_cut = filter_cutoff(m, cfg, closed)
    return k_cut * math.sqrt(math.pi / math.log(1.0 / cfg.eps))


def count_above(series: SpectralSeries, delta: float) -> int:
    """Coefficients with magnitude above delta; Fourier counts every centered index."""
    return int(np.sum(np.abs(series.coeffs) > delta))


def decay_index(series: SpectralSeries, delta: float) -> int:
    """Largest index (|k| for Fourier) whose coefficient still exceeds delta."""
    mask = np.abs(series.coeffs) > delta
    if not np.any(mask):
        return 0
    return int(np.max(np.abs(series.wavenumbers[mask])))


def check_termination(theta_series, sprime_series, thresholds, budgets) -> bool:
    d_theta, d_sprime = thresholds
    b_theta, b_sprime = budgets
    return (
        count_above(theta_series, d_theta) <= b_theta
        and count_above(sprime_series, d_sprime) <= b_sprime
    )


def truncate_coefficients(series: SpectralSeries, n_coefs: int) -> np.ndarray:
    """First n_coefs coefficients: low orders (Chebyshev) or low |k| (Fourier)."""
    if series.basis == CHEBYSHEV:
        return series.coeffs[:n_coefs].copy()
    half = n_coefs // 2
    mid = series.n // 2
    return series.coeffs[mid - half : mid + half].copy()


def residual_at_samples(result: FitResult, pts: PointSet, nearest: NearestParams) -> float:
    """Max distance between the truncated curve at the fixed parameters and the data."""
    p = result.eval(nearest.tpar)
    d = p - pts.points
    return float(np.max(np.hypot(d[:, 0], d[:, 1])))


def _interp_residual(state: CurveState, nearest: NearestParams, pts: PointSet) -> float:
    from .kinematics import eval_state

    p = eval_state(state, nearest.tpar)
    d = p - pts.points
    return float(np.max(np.hypot(d[:, 0], d[:, 1])))


def run_continuation(pts: PointSet, cfg: FitConfig) -> FitResult:
    """Fit a bandlimited curve through pts; see the module docstring.

    Exhausting n_iters yields a best-effort result flagged converged=False
    rather than an exception.
    """
    cfg.validate(pts)
    scale = bbox_diameter(pts.points)

    spline = fit_spline(pts)
    state = extract_kinematics(discretize_spline(spline, cfg.N))
    closed = state.closed
    L = state.L
    nodes = state.nodes

    nearest = nearest_parameters(state, pts, n_bands=cfg.n_bands, eps=cfg.eps)
    d_theta, d_sprime = compute_thresholds(state, cfg.eps)
    b_theta = coef_budget(cfg.n_coefs, cfg.eps, d_theta)
    b_sprime = coef_budget(cfg.n_coefs, cfg.eps, d_sprime)

    records: list[IterationRecord] = []
    converged = False
    n_stop = cfg.n_iters
    th_series = sp_series = None

    # theta and s' are filtered cumulatively across iterations; the repaired
    # curve samples are rebuilt from them every pass but never differentiated
    # back, so the perturbations cannot leak spectrum into the filtered state
    # and the coefficient counts contract monotonically.
    for m in range(1, cfg.n_iters + 2):
        theta_flat = detrend_theta(state).theta if closed else state.theta
        th_series = spectral.forward(theta_flat, L, state.basis)
        sp_series = spectral.forward(state.sprime, L, state.basis)
        cth = count_above(th_series, d_theta)
        csp = count_above(sp_series, d_sprime)
        if cth <= b_theta and csp <= b_sprime:
            converged = True
            n_stop = m - 1
            break
        if m > cfg.n_iters:
            break

        t0 = time.perf_counter()
        a = filter_bandwidth(m, cfg, closed)
        th_f = spectral.filter_series(th_series, a)
        sp_f = spectral.filter_series(sp_series, a)
        theta_new = spectral.inverse(th_f)
        sprime_new = spectral.inverse(sp_f)
        if closed:
            theta_new = theta_new.real + (state.c / L) * nodes
            sprime_new = close_sprime(theta_new, sprime_new.real)
        else:
            theta_new = theta_new.real if np.iscomplexobj(theta_new) else theta_new
            sprime_new = sprime_new.real if np.iscomplexobj(sprime_new) else sprime_new
        state = replace(state, theta=theta_new, sprime=sprime_new)
        state = reconstruct_curve(state)
        fix, state = reposition(state, nearest, pts)
        # the rotation turned every tangent by psi; keep theta in sync
        state = replace(state, theta=state.theta + fix.psi)
        state = apply_perturbations(state, nearest, pts, cfg.n_bands)

        resid = _interp_residual(state, nearest, pts)
        gap = 0.0
        if closed:
            from .kinematics import eval_state

            ends = eval_state(state, np.array([0.0, L]))
            gap = float(np.hypot(*(ends[1] - ends[0])))
        records.append(
            IterationRecord(
                m=m,
                bandwidth=a,
                cutoff=filter_cutoff(m, cfg, closed),
                count_theta=cth,
                count_sprime=csp,
                interp_residual=resid,
                closure_gap=gap,
                seconds=time.perf_counter() - t0,
            )
        )

    xs, ys = state_series(state)
    result = FitResult(
        basis=state.basis,
        L=L,
        closed=closed,
        x_coefs=truncate_coefficients(xs, cfg.n_coefs),
        y_coefs=truncate_coefficients(ys, cfg.n_coefs),
        n_coefs=cfg.n_coefs,
        n_stop=n_stop,
        e_samp=0.0,
        converged=converged,
        decay_theta=decay_index(th_series, d_theta),
        decay_sprime=decay_index(sp_series, d_sprime),
        delta_theta=d_theta,
        delta_sprime=d_sprime,
        budget_theta=b_theta,
        budget_sprime=b_sprime,
        scale=scale,
        config=cfg,
        iterations=records,
        state=state,
        nearest=nearest,
    )
    result.e_samp = residual_at_samples(result, pts, nearest)
    return result
