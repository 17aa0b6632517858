"""Chebyshev and Fourier series: transforms, calculus, Gaussian filtering.

Chebyshev series live on [0, L], sampled at the practical (Gauss-Lobatto)
nodes t_j = (1 - cos(pi j / (N-1))) L/2, ascending, endpoints included.
Fourier series live on the circle of circumference L, sampled at the
equispaced nodes t_j = j L / N, with centered coefficient indices
k = -N/2 .. N/2-1 and the forward transform scaled by 1/N, so that the
coefficients approximate the continuous Fourier coefficients of a periodic
function of period L.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import fft as sfft

from .errors import DomainError, InputSizeError, NonPeriodicIntegrandError

CHEBYSHEV = "chebyshev"
FOURIER = "fourier"

# workspace cap (matrix entries) for dense evaluations at arbitrary parameters
_EVAL_CHUNK = 4_000_000

# relative slack allowed when checking that a query parameter is in [0, L]
_DOMAIN_SLACK = 1e-12


@dataclass(frozen=True)
class SpectralSeries:
    """Coefficient vector plus basis metadata.

    Chebyshev coefficients are real, indexed k = 0..n-1.  Fourier
    coefficients are complex, indexed k = -n/2..n/2-1 (n even).
    """

    basis: str
    coeffs: np.ndarray
    L: float

    def __post_init__(self):
        if self.basis not in (CHEBYSHEV, FOURIER):
            raise ValueError(f"unknown basis {self.basis!r}")
        c = np.asarray(self.coeffs)
        if c.ndim != 1 or len(c) == 0:
            raise InputSizeError("coefficient vector must be 1-d and non-empty")
        if self.basis == FOURIER and len(c) % 2 != 0:
            raise InputSizeError("Fourier series needs an even number of coefficients")
        object.__setattr__(self, "coeffs", c)

    @property
    def n(self) -> int:
        return len(self.coeffs)

    @property
    def wavenumbers(self) -> np.ndarray:
        """Coefficient indices: 0..n-1 (Chebyshev) or -n/2..n/2-1 (Fourier)."""
        if self.basis == CHEBYSHEV:
            return np.arange(self.n)
        return np.arange(-(self.n // 2), self.n // 2)


def cheb_nodes(N, L):
    """Practical Chebyshev nodes on [0, L], ascending, endpoints exact."""
    if N < 2:
        raise InputSizeError("need at least 2 Chebyshev nodes")
    t = (1.0 - np.cos(np.pi * np.arange(N) / (N - 1))) * (L / 2.0)
    t[0] = 0.0
    t[-1] = L
    return t


def fourier_nodes(N, L):
    """Equispaced nodes t_j = j L / N, j = 0..N-1."""
    if N < 2:
        raise InputSizeError("need at least 2 Fourier nodes")
    return np.arange(N) * (L / N)


# ----------------------------- Chebyshev ---------------------------------


def cheb_forward(values, L):
    """Values at the practical nodes -> interpolating Chebyshev coefficients.

    The coefficients satisfy the collocation identity
    f(t_j) = sum_k a_k T_k(2 t_j / L - 1) at every node; computed with a
    type-I cosine transform in O(N log N).
    """
    v = np.asarray(values, float)
    if v.ndim != 1 or len(v) < 2:
        raise InputSizeError("need at least 2 samples")
    n = len(v)
    # reverse: our nodes ascend, the classical Lobatto grid cos(pi j/(n-1)) descends
    a = sfft.dct(v[::-1], type=1) / (n - 1)
    a[0] *= 0.5
    a[-1] *= 0.5
    return SpectralSeries(CHEBYSHEV, a, float(L))


def _cheb_synthesize_at_nodes(coeffs, n_nodes):
    """Evaluate sum_k a_k T_k at the n_nodes-point practical grid (ascending).

    Coefficients beyond the grid's DCT order (k >= n_nodes) are summed in
    directly; there is at most a handful of them in practice.
    """
    a = np.asarray(coeffs, float)
    n = len(a)
    m = min(n, n_nodes)
    b = np.zeros(n_nodes)
    b[:m] = a[:m]
    b[1 : n_nodes - 1] *= 0.5
    vals = sfft.dct(b, type=1)  # descending grid
    if n > n_nodes:
        j = np.arange(n_nodes)
        for k in range(n_nodes, n):
            vals += a[k] * np.cos(k * np.pi * j / (n_nodes - 1))
    return vals[::-1]


def _cheb_eval(coeffs, L, t):
    t = np.asarray(t, float)
    slack = _DOMAIN_SLACK * max(L, 1.0)
    if np.any(t < -slack) or np.any(t > L + slack):
        raise DomainError("query parameter outside [0, L]")
    ang = np.arccos(np.clip(2.0 * t / L - 1.0, -1.0, 1.0))
    a = np.asarray(coeffs, float)
    k = np.arange(len(a))
    out = np.empty_like(ang)
    step = max(1, _EVAL_CHUNK // max(len(a), 1))
    for lo in range(0, len(ang), step):
        hi = min(lo + step, len(ang))
        out[lo:hi] = np.cos(np.outer(ang[lo:hi], k)) @ a
    return out


def cheb_inverse(series, t=None, n_nodes=None):
    """Evaluate a Chebyshev series at the practical nodes (t=None) or at t.

    n_nodes selects the grid size for the at-nodes path; it defaults to the
    coefficient count.
    """
    if t is None:
        return _cheb_synthesize_at_nodes(series.coeffs, n_nodes or series.n)
    return _cheb_eval(series.coeffs, series.L, t)


def cheb_differentiate(series):
    """Coefficients of d/dt, including the 2/L factor of the [0,L] map."""
    a = series.coeffs
    n = len(a)
    b = np.zeros(n)
    if n > 1:
        w = 2.0 * np.arange(n) * a
        s = np.cumsum(w[n - 1 :: -2])
        tgt = b[n - 2 :: -2]
        tgt[:] = s[: len(tgt)]
        if n > 2:
            s = np.cumsum(w[n - 2 :: -2])
            tgt = b[n - 3 :: -2]
            tgt[:] = s[: len(tgt)]
        b[0] *= 0.5
    b *= 2.0 / series.L
    return SpectralSeries(CHEBYSHEV, b, series.L)


def cheb_integrate(series):
    """Coefficients of t -> integral_0^t f, one term longer than the input."""
    a = series.coeffs
    n = len(a)
    apad = np.concatenate([a, [0.0, 0.0]])
    k = np.arange(1, n + 1)
    A = np.zeros(n + 1)
    A[1:] = (apad[k - 1] - apad[k + 1]) / (2.0 * k)
    A[1] += apad[0] / 2.0  # the k=1 rule is a_0 - a_2/2
    A *= series.L / 2.0
    sgn = np.where(k % 2 == 0, 1.0, -1.0)
    A[0] = -np.sum(sgn * A[1:])  # antiderivative vanishes at t = 0
    return SpectralSeries(CHEBYSHEV, A, series.L)


# ------------------------------ Fourier ----------------------------------


def fourier_forward(values, L):
    """Samples at N equispaced nodes -> centered, 1/N-scaled coefficients."""
    v = np.asarray(values)
    if v.ndim != 1 or len(v) < 2:
        raise InputSizeError("need at least 2 samples")
    if len(v) % 2 != 0:
        raise InputSizeError("Fourier transform needs an even sample count")
    c = np.fft.fftshift(sfft.fft(v.astype(complex))) / len(v)
    return SpectralSeries(FOURIER, c, float(L))


def _fourier_eval(coeffs, L, t):
    t = np.asarray(t, float)
    c = np.asarray(coeffs, complex)
    n = len(c)
    k = np.arange(-(n // 2), n // 2)
    out = np.empty(len(t), complex)
    step = max(1, _EVAL_CHUNK // max(n, 1))
    for lo in range(0, len(t), step):
        hi = min(lo + step, len(t))
        out[lo:hi] = np.exp(2j * np.pi * np.outer(t[lo:hi], k) / L) @ c
    return out


def fourier_inverse(series, t=None):
    """Evaluate a Fourier series at the equispaced nodes (t=None) or at t."""
    if t is None:
        return sfft.ifft(np.fft.ifftshift(series.coeffs)) * series.n
    return _fourier_eval(series.coeffs, series.L, t)


def fourier_differentiate(series):
    """Multiply coefficient k by 2 pi i k / L."""
    k = series.wavenumbers
    return SpectralSeries(FOURIER, series.coeffs * (2j * np.pi * k / series.L), series.L)


def fourier_integrate(series, rel_tol=1e-10):
    """Antiderivative coefficients, vanishing at t = 0.

    Requires a (numerically) zero-mean integrand: |c_0| must not exceed
    rel_tol * max|c|, else the antiderivative is not periodic.
    """
    c = series.coeffs
    n = len(c)
    mid = n // 2
    cmax = np.max(np.abs(c))
    if cmax > 0 and np.abs(c[mid]) > rel_tol * cmax:
        raise NonPeriodicIntegrandError(
            f"mean coefficient {np.abs(c[mid]):.3e} exceeds {rel_tol:.1e} * max|c|"
        )
    k = series.wavenumbers.astype(float)
    k[mid] = 1.0  # placeholder, overwritten below
    out = c * series.L / (2j * np.pi * k)
    out[mid] = 0.0
    out[mid] = -np.sum(out)
    return SpectralSeries(FOURIER, out, series.L)


# ------------------------------ filtering --------------------------------


def gaussian_gain(k, a):
    """Gaussian low-pass gain exp(-pi k^2 / a^2); equals 1 at k = 0."""
    if a <= 0:
        raise DomainError("bandwidth parameter must be positive")
    k = np.asarray(k, float)
    return np.exp(-np.pi * k * k / (a * a))


def filter_fourier(series, a):
    """Multiply each centered coefficient by the Gaussian gain at its index."""
    return SpectralSeries(FOURIER, series.coeffs * gaussian_gain(series.wavenumbers, a), series.L)


def filter_chebyshev(series, a):
    """Gain product on Chebyshev coefficients.

    Under the even extension f_hat(-k) = f_hat(k) the Chebyshev series is a
    cosine series, so filtering it as a Fourier series in the angular
    variable reduces to the same coefficient-wise gain.
    """
    return SpectralSeries(CHEBYSHEV, series.coeffs * gaussian_gain(series.wavenumbers, a), series.L)


def filter_series(series, a):
    if series.basis == CHEBYSHEV:
        return filter_chebyshev(series, a)
    return filter_fourier(series, a)


# --------------------------- basis dispatchers ---------------------------


def forward(values, L, basis):
    if basis == CHEBYSHEV:
        return cheb_forward(values, L)
    return fourier_forward(values, L)


def inverse(series, t=None, n_nodes=None):
    if series.basis == CHEBYSHEV:
        return cheb_inverse(series, t, n_nodes=n_nodes)
    return fourier_inverse(series, t)


def differentiate(series):
    if series.basis == CHEBYSHEV:
        return cheb_differentiate(series)
    return fourier_differentiate(series)


def integrate(series):
    if series.basis == CHEBYSHEV:
        return cheb_integrate(series)
    return fourier_integrate(series)


def basis_nodes(basis, N, L):
    if basis == CHEBYSHEV:
        return cheb_nodes(N, L)
    return fourier_nodes(N, L)


def eval_series(basis, coeffs, L, t):
    """Evaluate a real-valued series given as a raw coefficient vector."""
    t = np.atleast_1d(np.asarray(t, float))
    if basis == CHEBYSHEV:
        return _cheb_eval(coeffs, L, t)
    return _fourier_eval(coeffs, L, np.mod(t, L)).real


# ------------------------------ quadrature -------------------------------


def clenshaw_curtis_weights(N, L):
    """Quadrature weights for the N practical Chebyshev nodes on [0, L].

    Integrates the degree-(N-1) interpolant exactly:
    integral_0^L f dt ~= sum_j f(t_j) w_j.
    """
    if N < 2:
        raise InputSizeError("need at least 2 nodes")
    n = N - 1
    m = np.zeros(N)
    keven = np.arange(0, n + 1, 2)
    mu = np.empty(len(keven))
    mu[0] = 2.0
    if len(keven) > 1:
        mu[1:] = 2.0 / (1.0 - keven[1:].astype(float) ** 2)
    p = np.where((keven == 0) | (keven == n), 1.0, 2.0)
    m[keven] = p * mu
    b = m.copy()
    b[1:-1] *= 0.5
    s = sfft.dct(b, type=1)  # sum_k m_k cos(pi k j / n), symmetric in j
    w = s / n
    w[0] *= 0.5
    w[-1] *= 0.5
    return w * (L / 2.0)
