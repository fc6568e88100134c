"""Fourier-domain primitives for regularly sampled series.

Conventions used throughout the package:

* frequencies are angular (radians per time unit) and live on the discrete
  Fourier grid ``(2*pi/(n*delta)) * k`` for ``k = -ceil(n/2)+1, ..., floor(n/2)``,
  stored in ascending order;
* the periodogram is ``I(w) = |J(w)|^2`` with
  ``J(w) = sqrt(delta/n) * sum_t x_t exp(-i w t delta)``, so spectra carry units
  of power per unit angular frequency and ``E{I}`` of unit-variance white noise
  is ``delta``.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .tapers import Taper

__all__ = [
    "TimeSeries",
    "FrequencyGrid",
    "AutocovarianceSequence",
    "SpectralEstimate",
    "fourier_grid",
    "periodogram",
    "tapered_periodogram",
    "fejer_kernel",
    "expected_periodogram",
    "expected_tapered_spectrum",
    "difference_series",
    "difference_autocovariance",
    "dynamic_range_diagnostic",
]

# Relative floor (times s(0)*delta) applied to expected spectra; exact in real
# arithmetic, the FFT evaluation can go slightly negative by cancellation.
SPECTRUM_FLOOR_EPS = 1e-12


def _as_1d(values, name):
    a = np.asarray(values)
    if a.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {a.shape}")
    if np.iscomplexobj(a):
        return np.ascontiguousarray(a, dtype=complex)
    return np.ascontiguousarray(a, dtype=float)


@dataclass
class TimeSeries:
    """A regularly sampled real- or complex-valued series."""

    values: np.ndarray
    delta: float

    def __post_init__(self):
        self.values = _as_1d(self.values, "values")
        self.delta = float(self.delta)
        if self.values.size < 2:
            raise ValueError("a time series needs at least 2 samples")
        if self.delta <= 0:
            raise ValueError("sampling interval delta must be positive")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("time series values must be finite")

    @property
    def n(self):
        return self.values.size

    @property
    def is_complex(self):
        return np.iscomplexobj(self.values)


@dataclass
class FrequencyGrid:
    """The discrete Fourier frequencies of an n-point series sampled at delta."""

    n: int
    delta: float
    frequencies: np.ndarray = field(init=False)

    def __post_init__(self):
        self.n = int(self.n)
        self.delta = float(self.delta)
        if self.n < 2:
            raise ValueError("frequency grid needs n >= 2")
        if self.delta <= 0:
            raise ValueError("sampling interval delta must be positive")
        k = np.arange(-((self.n + 1) // 2) + 1, self.n // 2 + 1)
        self.frequencies = 2.0 * np.pi * k / (self.n * self.delta)

    def __len__(self):
        return self.n


def fourier_grid(n, delta):
    """Ascending grid of the n discrete Fourier frequencies at spacing 2*pi/(n*delta)."""
    return FrequencyGrid(n, delta)


@dataclass
class AutocovarianceSequence:
    """Model autocovariances s(tau) at lags tau = 0, ..., nlags-1."""

    values: np.ndarray
    delta: float

    def __post_init__(self):
        self.values = _as_1d(self.values, "autocovariance values")
        self.delta = float(self.delta)
        if self.delta <= 0:
            raise ValueError("sampling interval delta must be positive")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("autocovariance values must be finite")
        s0 = self.values[0]
        if abs(s0.imag if np.iscomplexobj(self.values) else 0.0) > 1e-12 * abs(s0):
            raise ValueError("s(0) must be real")
        s0 = float(np.real(s0))
        # s(0) = 0 is admitted only for the identically-zero degenerate case
        # (e.g. the differenced autocovariance of a fully correlated process).
        if s0 < 0:
            raise ValueError("s(0) must be nonnegative")
        # Cauchy-Schwarz, with a little slack for rounding in callers.
        if np.any(np.abs(self.values) > s0 * (1.0 + 1e-9)):
            raise ValueError("|s(tau)| must not exceed s(0)")

    @property
    def nlags(self):
        return self.values.size

    @property
    def variance(self):
        return float(np.real(self.values[0]))


@dataclass
class SpectralEstimate:
    """Nonnegative spectrum values, one per frequency of the attached grid."""

    grid: FrequencyGrid
    values: np.ndarray
    n_clamped: int = 0

    def __post_init__(self):
        self.values = np.ascontiguousarray(self.values, dtype=float)
        if self.values.shape != (self.grid.n,):
            raise ValueError("spectrum length must equal grid length")
        if np.any(self.values < 0):
            raise ValueError("spectrum values must be nonnegative")


def _grid_roll(n):
    """Shift taking FFT-native frequency order to the ascending grid order."""
    return (n - 1) // 2


def fft_to_grid_order(values, n):
    """Reorder FFT-native frequency values (k = 0..n-1 mod n) to ascending grid order."""
    return np.roll(values, _grid_roll(n))


def grid_to_fft_order(values, n):
    """Inverse of :func:`fft_to_grid_order`."""
    return np.roll(values, -_grid_roll(n))


def periodogram(x: TimeSeries) -> SpectralEstimate:
    """Periodogram |J(w)|^2 at every Fourier frequency, via one FFT.

    Parameters
    ----------
    x : TimeSeries
        Real or complex series of length n >= 2.

    Returns
    -------
    SpectralEstimate
        ``(delta/n) |FFT(x)|^2`` reordered onto the ascending frequency grid.
        The DFT is indexed from t = 1, which only contributes a phase and so
        does not affect the squared modulus.
    """
    n = x.n
    raw = (x.delta / n) * np.abs(np.fft.fft(x.values)) ** 2
    return SpectralEstimate(fourier_grid(n, x.delta), fft_to_grid_order(raw, n))


def tapered_periodogram(x: TimeSeries, h: Taper) -> SpectralEstimate:
    """Direct spectral estimate |sqrt(delta) * sum_t h_t x_t e^{-iwt delta}|^2.

    The taper must have unit energy and the same length as the series; the
    uniform taper reproduces :func:`periodogram` exactly.
    """
    n = x.n
    if h.n != n:
        raise ValueError(f"taper length {h.n} does not match series length {n}")
    raw = x.delta * np.abs(np.fft.fft(h.weights * x.values)) ** 2
    return SpectralEstimate(fourier_grid(n, x.delta), fft_to_grid_order(raw, n))


def fejer_kernel(omega, n, delta=1.0):
    """Fejer kernel (delta/(2 pi n)) * sin^2(n w delta/2) / sin^2(w delta/2).

    Vectorized in ``omega``.  At w = 0 (and any multiple of 2*pi/delta) the
    removable singularity is filled with the limit value n*delta/(2*pi).
    The kernel is nonnegative, even, 2*pi/delta-periodic, and integrates to
    one over a full period.
    """
    n = int(n)
    if n < 1 or delta <= 0:
        raise ValueError("need n >= 1 and delta > 0")
    omega = np.asarray(omega, dtype=float)
    half = omega * delta / 2.0
    s = np.sin(half)
    limit = n * delta / (2.0 * np.pi)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.sin(n * half) / s
        vals = (delta / (2.0 * np.pi * n)) * ratio**2
    out = np.where(np.abs(s) < 1e-14, limit, vals)
    return out if out.ndim else float(out)


def _triangle_weights(n):
    return 1.0 - np.arange(n) / n


def _expected_periodogram_raw(s_values, delta, weights):
    """Weighted-autocovariance FFT shared by the plain and tapered variants.

    Returns (values in FFT order, clamp count).  Complex autocovariances are
    supported by the same formula because s(-tau) = conj(s(tau)) folds into
    twice the real part.
    """
    g = weights * s_values
    fvals = np.fft.fft(g)
    s0 = float(np.real(s_values[0]))
    return _kernels.debias_post(fvals, s0, delta, SPECTRUM_FLOOR_EPS)


def expected_periodogram(s: AutocovarianceSequence, n: int) -> SpectralEstimate:
    """Exact E{I(w)} of an n-point sample, from model autocovariances.

    Evaluates ``2 delta Re{sum_tau (1 - tau/n) s(tau) e^{-i w tau delta}} -
    delta s(0)`` at every Fourier frequency with a single length-n FFT, which
    folds aliasing and finite-sample blurring into the model spectrum in one
    O(n log n) operation.

    Parameters
    ----------
    s : AutocovarianceSequence
        Must provide at least lags 0, ..., n-1.
    n : int
        Sample length the expectation refers to.

    Returns
    -------
    SpectralEstimate
        Values are clamped from below at ``1e-12 * s(0) * delta`` (tiny
        negatives can appear through floating-point cancellation); the number
        of clamped frequencies is reported in ``n_clamped``.
    """
    n = int(n)
    if n < 2:
        raise ValueError("need n >= 2")
    if s.nlags < n:
        raise ValueError(f"need autocovariance lags 0..{n - 1}, got {s.nlags}")
    vals, n_clamped = _expected_periodogram_raw(s.values[:n], s.delta, _triangle_weights(n))
    return SpectralEstimate(fourier_grid(n, s.delta), fft_to_grid_order(vals, n), n_clamped)


def expected_tapered_spectrum(s: AutocovarianceSequence, h: Taper, n: int) -> SpectralEstimate:
    """Exact E{I(w; h)} for a tapered estimate, from model autocovariances.

    Same computation as :func:`expected_periodogram` with the triangle factor
    replaced by the taper autocorrelation kernel ``sum_t h_t h_{t+tau}``; the
    kernel is precomputed once per taper and reused across calls.
    """
    n = int(n)
    if h.n != n:
        raise ValueError(f"taper length {h.n} does not match n={n}")
    if s.nlags < n:
        raise ValueError(f"need autocovariance lags 0..{n - 1}, got {s.nlags}")
    vals, n_clamped = _expected_periodogram_raw(s.values[:n], s.delta, h.kernel)
    return SpectralEstimate(fourier_grid(n, s.delta), fft_to_grid_order(vals, n), n_clamped)


def difference_series(x: TimeSeries) -> TimeSeries:
    """First differences y_t = x_{t+1} - x_t; length n-1, same delta."""
    if x.n < 3:
        raise ValueError("need at least 3 samples to difference")
    return TimeSeries(np.diff(x.values), x.delta)


def _difference_acv_values(v):
    """Raw-array core of difference_autocovariance (shared with the hot path)."""
    if v.size < 2:
        raise ValueError("need at least lags 0 and 1 to difference an autocovariance")
    prev = np.empty_like(v[:-1])
    prev[0] = np.conj(v[1])
    prev[1:] = v[: v.size - 2]
    return 2.0 * v[:-1] - v[1:] - prev


def difference_autocovariance(s: AutocovarianceSequence) -> AutocovarianceSequence:
    """Autocovariance of the first-differenced process.

    ``s_Y(tau) = 2 s(tau) - s(tau+1) - s(tau-1)`` with ``s(-1) = conj(s(1))``;
    consumes lag tau+1, so the output provides one lag fewer than the input.
    """
    return AutocovarianceSequence(_difference_acv_values(s.values), s.delta)


def dynamic_range_diagnostic(model, theta, n, delta=1.0, difference_order=0):
    """Per-parameter upper bound on the variance of the normalized score.

    Evaluates ``fmax^2 * sup_w |d fbar/d theta_i|^2 / (n * fmin^4)`` where
    ``fbar`` is the expected periodogram (of the ``difference_order``-times
    differenced process when requested) and fmax/fmin are its extrema over the
    frequency grid, a computable proxy for the true spectral bounds.  Large
    values signal a high dynamic range, i.e. that differencing before fitting
    will stabilize the estimates; comparing ``difference_order=0`` against
    ``difference_order=1`` makes that advice quantitative.

    Derivatives are central finite differences with step
    ``1e-5 * max(1, |theta_i|)``.  A degenerate model whose expected spectrum
    sits at the clamp floor yields an infinite bound rather than an error.
    """
    theta = np.asarray(theta, dtype=float)
    n = int(n)
    d = int(difference_order)
    m = n - d

    def fbar_of(t):
        acv = model.autocovariance(t, delta, n - 1)
        vals = acv.values
        for _ in range(d):
            vals = _difference_acv_values(vals)
        return expected_periodogram(AutocovarianceSequence(vals, delta), m).values

    base = fbar_of(theta)
    fmax = float(np.max(base))
    fmin = float(np.min(base))
    s0 = float(np.real(model.autocovariance(theta, delta, 0).values[0]))
    degenerate = fmin <= 10.0 * SPECTRUM_FLOOR_EPS * s0 * delta
    bounds = np.empty(theta.size)
    for i in range(theta.size):
        step = 1e-5 * max(1.0, abs(theta[i]))
        up = theta.copy()
        dn = theta.copy()
        up[i] += step
        dn[i] -= step
        deriv_sup = float(np.max(np.abs(fbar_of(up) - fbar_of(dn)) / (2.0 * step)))
        if degenerate:
            bounds[i] = 0.0 if deriv_sup == 0.0 else np.inf
        else:
            bounds[i] = fmax**2 * deriv_sup**2 / (m * fmin**4)
    return bounds
