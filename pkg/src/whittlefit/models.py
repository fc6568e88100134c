"""Parametric process models, primarily the three-parameter Matern family.

The Matern continuous-time spectrum is ``A^2 / (w^2 + c^2)^alpha`` with
amplitude A > 0, damping c > 0 (inverse time units) and slope alpha > 1/2; its
sampled autocovariance has the closed power-law-times-Bessel-K form evaluated
in the kernel layer.  Models expose the small interface the likelihoods and
the fit driver need: autocovariances to a given lag, the continuous spectrum,
parameter bounds, an initial guess, and derived quantities.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .spectral import AutocovarianceSequence, FrequencyGrid, SpectralEstimate, fourier_grid, periodogram

__all__ = [
    "MaternParams",
    "matern_spectrum",
    "matern_autocovariance",
    "complex_matern_autocovariance",
    "aliased_spectrum",
    "diffusivity",
    "ParametricModel",
    "MaternModel",
    "MaternDampingModel",
    "WhiteNoiseModel",
]


# Admissible box for the free Matern fit; damping is additionally confined to
# (1e-8/delta, pi/delta) at fit time.
MATERN_BOUNDS_AMPLITUDE = (1e-10, 1e10)
MATERN_BOUNDS_SLOPE = (0.51, 10.0)


@dataclass(frozen=True)
class MaternParams:
    """Matern parameters: amplitude A, damping c, slope alpha."""

    amplitude: float
    damping: float
    slope: float

    def __post_init__(self):
        if not (self.amplitude > 0):
            raise ValueError("amplitude must be positive")
        if not (self.damping > 0):
            raise ValueError("damping must be positive")
        if not (self.slope > 0.5):
            raise ValueError("slope must exceed 1/2 for an integrable spectrum")


def matern_spectrum(params: MaternParams, omega):
    """Continuous-time Matern spectrum A^2/(w^2 + c^2)^alpha, vectorized in omega."""
    omega = np.asarray(omega, dtype=float)
    out = params.amplitude**2 / (omega**2 + params.damping**2) ** params.slope
    return out if out.ndim else float(out)


def matern_autocovariance(params: MaternParams, delta, max_lag) -> AutocovarianceSequence:
    """Matern autocovariance at lags 0, ..., max_lag for sampling interval delta.

    Uses the closed Bessel-K form of the inverse Fourier transform of the
    spectrum; the lag-zero value comes from the closed variance formula.  The
    result is validated against independent quadrature of the spectrum in the
    test suite.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    max_lag = int(max_lag)
    if max_lag < 0:
        raise ValueError("max_lag must be nonnegative")
    vals = _kernels.matern_acv(params.amplitude, params.damping, params.slope, float(delta), max_lag + 1)
    return AutocovarianceSequence(vals, delta)


def complex_matern_autocovariance(params: MaternParams, delta, max_lag) -> AutocovarianceSequence:
    """Autocovariance E{Z_t conj(Z_{t-tau})} of the proper complex Matern process.

    With a symmetric spectrum the autocovariance is real and coincides with
    the real-process one; this wrapper exists so complex pipelines have an
    explicitly complex-typed model hook.
    """
    real = matern_autocovariance(params, delta, max_lag)
    return AutocovarianceSequence(real.values.astype(complex), delta)


def diffusivity(params: MaternParams) -> float:
    """Zero-frequency dispersion rate kappa = A^2 / (4 c^(2 alpha))."""
    return params.amplitude**2 / (4.0 * params.damping ** (2.0 * params.slope))


def aliased_spectrum(model, grid: FrequencyGrid, wrap_terms=None) -> SpectralEstimate:
    """Fold the continuous spectrum into the principal band by explicit wrapping.

    Approximates ``f(w) = sum_k fspec(w + 2 pi k / delta)`` by truncating the
    sum at ``|k| <= wrap_terms``.  When ``wrap_terms`` is omitted, starts at
    K=1000 and doubles until the result changes by less than 1e-6 relative.
    This is a diagnostic/oracle quantity; no likelihood uses it.
    """

    def partial(sofar, k_lo, k_hi):
        ks = np.arange(k_lo, k_hi)
        shifts = 2.0 * np.pi * ks / grid.delta
        for block in range(0, ks.size, 512):
            sl = shifts[block : block + 512]
            sofar = sofar + model.continuous_spectrum(
                model.theta, grid.frequencies[:, None] + sl[None, :], grid.delta
            ).sum(axis=1)
        return sofar

    if wrap_terms is not None:
        k = int(wrap_terms)
        if k < 1:
            raise ValueError("wrap_terms must be >= 1")
        vals = partial(np.zeros(grid.n), -k, k + 1)
        return SpectralEstimate(grid, vals)

    k = 1000
    vals = partial(np.zeros(grid.n), -k, k + 1)
    for _ in range(12):
        wider = partial(vals.copy(), -2 * k, -k)
        wider = partial(wider, k + 1, 2 * k + 1)
        if np.max(np.abs(wider - vals) / np.maximum(np.abs(wider), 1e-300)) < 1e-6:
            return SpectralEstimate(grid, wider)
        vals, k = wider, 2 * k
    return SpectralEstimate(grid, vals)


def matern_loglog_init(x) -> np.ndarray:
    """Least-squares initial guess (A0, c0, alpha0) from the log periodogram.

    Regresses log I(w) on log w over the band [pi/(4 delta), 3 pi/(4 delta)],
    where the spectrum is approximately ``A^2 w^(-2 alpha)``: the slope gives
    -2*alpha0 and the intercept 2*log(A0).  The damping guess is the mid-range
    value c0 = 100*pi/(n*delta), and everything is clipped into the admissible
    box.
    """
    if x.n < 16:
        raise ValueError("need n >= 16 for the spectral-slope initial guess")
    grid = fourier_grid(x.n, x.delta)
    pg = periodogram(x)
    w = grid.frequencies
    band = (w >= np.pi / (4.0 * x.delta)) & (w <= 3.0 * np.pi / (4.0 * x.delta))
    if np.count_nonzero(band) < 2:
        raise ValueError("too few Fourier frequencies in the initialization band")
    iv = pg.values[band]
    if np.any(iv <= 0):
        band &= pg.values > 0
        iv = pg.values[band]
        if iv.size < 2:
            raise ValueError("periodogram vanishes on the initialization band")
    slope, intercept = np.polyfit(np.log(w[band]), np.log(iv), 1)
    lo_a, hi_a = MATERN_BOUNDS_AMPLITUDE
    lo_s, hi_s = MATERN_BOUNDS_SLOPE
    alpha0 = float(np.clip(-slope / 2.0, lo_s, hi_s))
    a0 = float(np.clip(np.exp(intercept / 2.0), lo_a, hi_a))
    c0 = float(np.clip(100.0 * np.pi / (x.n * x.delta), 1e-8 / x.delta, np.pi / x.delta))
    return np.array([a0, c0, alpha0])


class ParametricModel:
    """Interface the likelihoods and fit driver evaluate models through.

    Instances are immutable and carry a reference parameter vector ``theta``
    (the "true" values for simulation studies, or just a starting point);
    every evaluation method takes the parameter vector explicitly so the same
    object can be shared across optimizer candidates and worker processes.
    """

    name = "model"
    param_names = ()

    @property
    def nparams(self):
        return len(self.param_names)

    @property
    def theta(self):
        raise NotImplementedError

    def bounds(self, delta):
        """Per-parameter admissible intervals [(lo, hi), ...]."""
        raise NotImplementedError

    def autocovariance(self, theta, delta, max_lag) -> AutocovarianceSequence:
        raise NotImplementedError

    def autocovariance_values(self, theta, delta, max_lag):
        """Raw autocovariance array for hot loops; skips container validation."""
        return self.autocovariance(theta, delta, max_lag).values

    def continuous_spectrum(self, theta, omega, delta):
        raise NotImplementedError

    def initial_theta(self, x) -> np.ndarray:
        raise NotImplementedError

    def derived(self, theta) -> dict:
        """Derived quantities reported alongside a fit; empty by default."""
        return {}

    def with_theta(self, theta):
        """A copy of this model carrying a different reference vector."""
        raise NotImplementedError


class MaternModel(ParametricModel):
    """Three-parameter Matern model; theta = (amplitude, damping, slope)."""

    name = "matern"
    param_names = ("amplitude", "damping", "slope")

    def __init__(self, params: MaternParams):
        self.params = params

    @property
    def theta(self):
        return np.array([self.params.amplitude, self.params.damping, self.params.slope])

    def _params(self, theta):
        return MaternParams(float(theta[0]), float(theta[1]), float(theta[2]))

    def bounds(self, delta):
        return [
            MATERN_BOUNDS_AMPLITUDE,
            (1e-8 / delta, np.pi / delta),
            MATERN_BOUNDS_SLOPE,
        ]

    def autocovariance(self, theta, delta, max_lag):
        return matern_autocovariance(self._params(theta), delta, max_lag)

    def autocovariance_values(self, theta, delta, max_lag):
        p = self._params(theta)
        return _kernels.matern_acv(p.amplitude, p.damping, p.slope, float(delta), int(max_lag) + 1)

    def continuous_spectrum(self, theta, omega, delta):
        return matern_spectrum(self._params(theta), omega)

    def initial_theta(self, x):
        return matern_loglog_init(x)

    def derived(self, theta):
        p = self._params(theta)
        return {
            "damping_timescale": 1.0 / p.damping,
            "spectral_slope": 2.0 * p.slope,
            "diffusivity": diffusivity(p),
        }

    def with_theta(self, theta):
        return MaternModel(self._params(theta))


class MaternDampingModel(ParametricModel):
    """One-parameter Matern fit of the damping c, with A = ratio * c and fixed slope.

    This is the benchmark configuration where only the damping is treated as
    unknown while the amplitude is known up to a proportion of it and the
    slope is known exactly; theta = (damping,).
    """

    name = "matern_damping"
    param_names = ("damping",)

    def __init__(self, damping, amplitude_ratio=1.7725, slope=1.5):
        self.amplitude_ratio = float(amplitude_ratio)
        self.slope = float(slope)
        self.damping = float(damping)
        self._check(self.damping)

    def _check(self, c):
        MaternParams(self.amplitude_ratio * c, c, self.slope)

    def _params(self, theta):
        c = float(theta[0])
        return MaternParams(self.amplitude_ratio * c, c, self.slope)

    @property
    def theta(self):
        return np.array([self.damping])

    def bounds(self, delta):
        return [(1e-8 / delta, np.pi / delta)]

    def autocovariance(self, theta, delta, max_lag):
        return matern_autocovariance(self._params(theta), delta, max_lag)

    def autocovariance_values(self, theta, delta, max_lag):
        p = self._params(theta)
        return _kernels.matern_acv(p.amplitude, p.damping, p.slope, float(delta), int(max_lag) + 1)

    def continuous_spectrum(self, theta, omega, delta):
        return matern_spectrum(self._params(theta), omega)

    def initial_theta(self, x):
        return np.array([float(np.clip(100.0 * np.pi / (x.n * x.delta), 1e-8 / x.delta, np.pi / x.delta))])

    def derived(self, theta):
        p = self._params(theta)
        return {
            "amplitude": p.amplitude,
            "damping_timescale": 1.0 / p.damping,
            "spectral_slope": 2.0 * p.slope,
            "diffusivity": diffusivity(p),
        }

    def with_theta(self, theta):
        return MaternDampingModel(float(theta[0]), self.amplitude_ratio, self.slope)


class WhiteNoiseModel(ParametricModel):
    """Discrete white noise; theta = (variance,).

    The spectrum is flat at ``variance * delta`` (power per unit angular
    frequency over the principal band), so the expected periodogram equals the
    model spectrum exactly and all likelihood variants share their maximizer.
    """

    name = "white_noise"
    param_names = ("variance",)

    def __init__(self, variance=1.0):
        if variance <= 0:
            raise ValueError("variance must be positive")
        self.variance = float(variance)

    @property
    def theta(self):
        return np.array([self.variance])

    def bounds(self, delta):
        return [(1e-12, 1e12)]

    def autocovariance(self, theta, delta, max_lag):
        vals = np.zeros(int(max_lag) + 1)
        vals[0] = float(theta[0])
        return AutocovarianceSequence(vals, delta)

    def continuous_spectrum(self, theta, omega, delta):
        omega = np.asarray(omega, dtype=float)
        out = np.full(omega.shape, float(theta[0]) * delta)
        return out if out.ndim else float(out)

    def initial_theta(self, x):
        return np.array([float(np.mean(np.abs(x.values) ** 2))])

    def with_theta(self, theta):
        return WhiteNoiseModel(float(theta[0]))
