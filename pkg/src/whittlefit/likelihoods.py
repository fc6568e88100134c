"""Objective functions: exact Gaussian log-likelihood and the Whittle family.

All log-likelihoods drop parameter-free additive and multiplicative
constants, so values are only comparable within one variant; estimators are
compared through their maximizers, never through objective values.

The frequency-domain variants share one evaluation pipeline: difference the
data ``difference_order`` times, form the (optionally tapered) periodogram
once, then per candidate theta compare it against either the plain model
spectrum (Whittle) or the exactly computed expectation of the data spectrum
(bias-corrected Whittle).  A `_Prepared` object caches everything that does
not depend on theta; the public functions build it per call, while the fit
driver reuses one across all optimizer evaluations.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .spectral import (
    TimeSeries,
    fourier_grid,
    grid_to_fft_order,
    _difference_acv_values,
    _triangle_weights,
)
from .tapers import Taper

__all__ = [
    "LikelihoodSpec",
    "ObjectiveValue",
    "CovarianceMatrixView",
    "exact_log_likelihood",
    "whittle",
    "debiased_whittle",
    "evaluate_likelihood",
    "score_and_hessian_fd",
]

VARIANTS = ("exact_ml", "whittle", "debiased_whittle")

# A model spectrum below this at a masked-in frequency means the mask is wrong
# (e.g. zero frequency kept after differencing); fail loudly instead of
# returning -inf.
_SPECTRUM_TINY = 1e-300


@dataclass
class LikelihoodSpec:
    """Which objective to evaluate and how the frequency sum is restricted.

    Parameters
    ----------
    variant : str
        One of ``"exact_ml"``, ``"whittle"``, ``"debiased_whittle"``.
    taper : Taper, optional
        Data taper; its length must equal the series length after
        differencing.  Not allowed for exact ML.
    difference_order : int
        Number of first-differencing passes applied to data and model,
        0 to 2.
    frequency_mask : callable, optional
        Predicate mapping the array of grid frequencies to a boolean
        selection.  Defaults to all frequencies, or all nonzero frequencies
        once the data has been differenced (the differenced spectrum vanishes
        at zero).  Not allowed for exact ML.
    """

    variant: str
    taper: Taper | None = None
    difference_order: int = 0
    frequency_mask: object = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}; expected one of {VARIANTS}")
        self.difference_order = int(self.difference_order)
        if not 0 <= self.difference_order <= 2:
            raise ValueError("difference_order must be 0, 1, or 2")
        if self.variant == "exact_ml":
            if self.taper is not None:
                raise ValueError("exact_ml does not admit a taper")
            if self.frequency_mask is not None:
                raise ValueError("exact_ml does not admit a frequency mask")


@dataclass
class ObjectiveValue:
    """A log-likelihood value with bookkeeping."""

    value: float
    n_frequencies_used: int
    warnings: list = field(default_factory=list)


@dataclass
class CovarianceMatrixView:
    """Implicit Toeplitz covariance C_ij = s(i - j) of an n-sample window.

    The exact likelihood never materializes C (the recursion consumes the
    autocovariance directly, keeping memory O(n)); this view serves
    diagnostics and tests that want the dense matrix or a definiteness check.
    """

    acv: object
    order: int

    def __post_init__(self):
        self.order = int(self.order)
        if self.order < 1 or self.acv.nlags < self.order:
            raise ValueError(f"need autocovariance lags 0..{self.order - 1}")

    def dense(self):
        """The order-n Toeplitz matrix (symmetric, or Hermitian for complex s)."""
        from scipy.linalg import toeplitz

        first = self.acv.values[: self.order]
        return toeplitz(first, np.conj(first))

    def is_positive_definite(self):
        """Whether a Cholesky factorization succeeds at working precision."""
        from scipy.linalg import cho_factor, LinAlgError

        try:
            cho_factor(self.dense(), lower=True)
            return True
        except LinAlgError:
            return False


def _levinson(acv, x):
    """Log-determinant and quadratic form of a Toeplitz Gaussian likelihood.

    Runs the Levinson-Durbin recursion on the model autocovariance, O(n^2)
    time and O(n) memory, accumulating log|C| from the one-step prediction
    error variances and X' C^{-1} X from the standardized innovations.
    Returns None when a nonpositive innovation variance is met (the candidate
    autocovariance is numerically not positive definite).
    """
    n = x.size
    v = acv[0]
    if v <= 0:
        return None
    logdet = np.log(v)
    quad = x[0] ** 2 / v
    phi = np.empty(n)
    for m in range(1, n):
        if m == 1:
            k = acv[1] / v
        else:
            k = (acv[m] - phi[1:m] @ acv[m - 1 : 0 : -1]) / v
        phi[1:m] = phi[1:m] - k * phi[m - 1 : 0 : -1]
        phi[m] = k
        v = v * (1.0 - k * k)
        if v <= 0 or not np.isfinite(v):
            return None
        e = x[m] - phi[1 : m + 1] @ x[m - 1 :: -1]
        quad += e * e / v
        logdet += np.log(v)
    return logdet, quad


def _exact_value(data, acv_values, theta):
    res = _levinson(np.real(acv_values), data)
    if res is None:
        raise ValueError(f"covariance factorization failed (not positive definite) at theta={theta.tolist()}")
    logdet, quad = res
    return float(-logdet - quad)


def exact_log_likelihood(x: TimeSeries, model, theta) -> ObjectiveValue:
    """Exact Gaussian log-likelihood -log|C(theta)| - X' C(theta)^{-1} X.

    Evaluated through the Levinson-Durbin recursion on the Toeplitz model
    covariance: O(n^2) time, O(n) memory, with the log-determinant accumulated
    from the prediction-error variances.  Constants free of theta are dropped.
    Only real-valued series are supported; complex proper processes are
    handled by the frequency-domain variants.
    """
    theta = np.asarray(theta, dtype=float)
    if x.is_complex:
        raise ValueError("exact_ml supports real-valued series only; use a Whittle variant for complex data")
    acv = model.autocovariance(theta, x.delta, x.n - 1)
    return ObjectiveValue(_exact_value(x.values, acv.values, theta), 0)


class _Prepared:
    """Everything about a frequency-domain objective that is theta-free."""

    def __init__(self, x: TimeSeries, model, spec: LikelihoodSpec):
        self.spec = spec
        self.delta = x.delta
        self.n_original = x.n
        if hasattr(model, "autocovariance_values"):
            self._acv_values = model.autocovariance_values
        else:
            self._acv_values = lambda t, delta, max_lag: model.autocovariance(t, delta, max_lag).values
        d = spec.difference_order

        values = x.values
        for _ in range(d):
            if values.size < 3:
                raise ValueError("series too short to difference")
            values = np.diff(values)
        m = values.size
        self.m = m

        grid = fourier_grid(m, x.delta)
        w = grid.frequencies
        if spec.frequency_mask is not None:
            # An explicit mask replaces the default entirely; keeping zero
            # frequency on differenced data then fails below with a pointer
            # at the mask rather than a silent -inf.
            mask = np.asarray(spec.frequency_mask(w), dtype=bool)
            if mask.shape != (m,):
                raise ValueError("frequency_mask must map the frequency array to a boolean array of the same length")
        else:
            mask = np.ones(m, dtype=bool)
            if d > 0:
                mask &= w != 0.0
        nparams = len(model.param_names)
        floor = max(8, 2 * nparams)
        if int(np.count_nonzero(mask)) < floor:
            raise ValueError(
                f"frequency mask keeps {int(np.count_nonzero(mask))} frequencies; "
                f"need at least {floor} to identify {nparams} parameters"
            )

        if spec.taper is not None:
            if spec.taper.n != m:
                raise ValueError(
                    f"taper length {spec.taper.n} does not match series length after differencing ({m})"
                )
            raw = x.delta * np.abs(np.fft.fft(spec.taper.weights * values)) ** 2
            self.weights = spec.taper.kernel
        else:
            raw = (x.delta / m) * np.abs(np.fft.fft(values)) ** 2
            self.weights = _triangle_weights(m)

        # Hot path works in FFT-native frequency order; the objective is a sum
        # over masked frequencies, so the ordering never surfaces.
        self.mask_fft = grid_to_fft_order(mask, m)
        self.data = np.ascontiguousarray(raw[self.mask_fft])
        self.omega = grid_to_fft_order(w, m)[self.mask_fft]
        self.n_used = int(self.data.size)
        self.diff_gain = (4.0 * np.sin(self.omega * x.delta / 2.0) ** 2) ** d if d else None

    def model_values(self, model, theta):
        """Model comparison spectrum at the masked frequencies, plus clamp count."""
        if self.spec.variant == "whittle":
            f = model.continuous_spectrum(theta, self.omega, self.delta)
            f = np.ascontiguousarray(f, dtype=float)
            if self.diff_gain is not None:
                f = f * self.diff_gain
            n_clamped = 0
        else:
            s = self._acv_values(theta, self.delta, self.n_original - 1)
            for _ in range(self.spec.difference_order):
                s = _kernels.acv_difference(s) if not np.iscomplexobj(s) else _difference_acv_values(s)
            m = self.m
            if np.iscomplexobj(s):
                fvals = np.fft.fft(self.weights * s)
                fbar, n_clamped = _kernels.debias_post(fvals, float(s[0].real), self.delta, 1e-12)
            else:
                # Real autocovariance: the expectation is even across the FFT
                # frequencies, so a half-spectrum rfft plus a mirror does the
                # same job at half the transform cost.
                half = np.fft.rfft(self.weights * s)
                fbar_half, n_half = _kernels.debias_post(half, float(s[0]), self.delta, 1e-12)
                tail = fbar_half[1 : (m + 1) // 2]
                fbar = np.concatenate((fbar_half, tail[::-1]))
                n_clamped = n_half
                if n_half:
                    floor = 1e-12 * float(s[0]) * self.delta
                    n_clamped += int(np.count_nonzero(tail == floor))
            f = fbar[self.mask_fft]
        if np.min(f) < _SPECTRUM_TINY:
            raise ValueError(
                "model spectrum vanishes at a masked-in frequency; "
                "adjust the frequency mask (e.g. exclude zero frequency after differencing)"
            )
        return f, n_clamped

    def value(self, model, theta):
        f, _ = self.model_values(model, theta)
        return -_kernels.whittle_terms(self.data, f)

    def objective_value(self, model, theta) -> ObjectiveValue:
        f, n_clamped = self.model_values(model, theta)
        warnings = []
        if n_clamped:
            warnings.append(f"expected spectrum clamped at {n_clamped} frequencies")
        return ObjectiveValue(-_kernels.whittle_terms(self.data, f), self.n_used, warnings)


def whittle(x: TimeSeries, model, theta, spec: LikelihoodSpec) -> ObjectiveValue:
    """Whittle log-likelihood -sum_w {log f(w) + I(w)/f(w)} over masked frequencies.

    The comparison spectrum f is the continuous-time model spectrum (no
    aliasing correction), multiplied by ``4 sin^2(w delta/2)`` per differencing
    pass; the data spectrum I is the (optionally tapered) periodogram of the
    differenced series.
    """
    if spec.variant != "whittle":
        raise ValueError(f"spec.variant is {spec.variant!r}, expected 'whittle'")
    return _Prepared(x, model, spec).objective_value(model, np.asarray(theta, dtype=float))


def debiased_whittle(x: TimeSeries, model, theta, spec: LikelihoodSpec) -> ObjectiveValue:
    """Bias-corrected Whittle log-likelihood using the expected data spectrum.

    Replaces the model spectrum by the exact expectation of the data spectrum
    under the model: the expected periodogram (plain), the expected tapered
    spectrum (tapered), or the expected periodogram of the differenced process
    (differenced), each computed from the model autocovariance with one FFT,
    so an evaluation costs O(n log n).

    Clamped expected-spectrum values are reported through
    ``ObjectiveValue.warnings``.
    """
    if spec.variant != "debiased_whittle":
        raise ValueError(f"spec.variant is {spec.variant!r}, expected 'debiased_whittle'")
    return _Prepared(x, model, spec).objective_value(model, np.asarray(theta, dtype=float))


def evaluate_likelihood(x: TimeSeries, model, theta, spec: LikelihoodSpec) -> ObjectiveValue:
    """Evaluate whichever objective the spec selects.

    For exact ML with a nonzero difference order, both the data and the model
    autocovariance are differenced before the time-domain likelihood is
    evaluated, so the objective remains the exact likelihood of the
    differenced sample.
    """
    if spec.variant == "exact_ml":
        theta = np.asarray(theta, dtype=float)
        if x.is_complex:
            raise ValueError("exact_ml supports real-valued series only")
        data = x.values
        acv = model.autocovariance(theta, x.delta, x.n - 1).values
        for _ in range(spec.difference_order):
            if data.size < 3:
                raise ValueError("series too short to difference")
            data = np.diff(data)
            acv = _difference_acv_values(acv)
        return ObjectiveValue(_exact_value(data, acv, theta), 0)
    if spec.variant == "whittle":
        return whittle(x, model, theta, spec)
    return debiased_whittle(x, model, theta, spec)


def score_and_hessian_fd(objective, theta, step_scale=1e-5):
    """Central-difference gradient and symmetrized Hessian of a scalar objective.

    Steps are ``step_scale * max(1, |theta_i|)`` per coordinate; theta must sit
    far enough inside any parameter bounds that every perturbed point is
    evaluable.
    """
    theta = np.asarray(theta, dtype=float)
    p = theta.size
    h = step_scale * np.maximum(1.0, np.abs(theta))

    def ev(t):
        v = float(objective(t))
        if not np.isfinite(v):
            raise ValueError(f"objective is not finite at theta={t.tolist()} (too close to a bound?)")
        return v

    f0 = ev(theta)
    grad = np.empty(p)
    hess = np.empty((p, p))
    fp = np.empty(p)
    fm = np.empty(p)
    for i in range(p):
        up = theta.copy()
        dn = theta.copy()
        up[i] += h[i]
        dn[i] -= h[i]
        fp[i] = ev(up)
        fm[i] = ev(dn)
        grad[i] = (fp[i] - fm[i]) / (2.0 * h[i])
        hess[i, i] = (fp[i] - 2.0 * f0 + fm[i]) / h[i] ** 2
    for i in range(p):
        for j in range(i + 1, p):
            pp = theta.copy()
            pm = theta.copy()
            mp = theta.copy()
            mm = theta.copy()
            pp[[i, j]] += [h[i], h[j]]
            pm[i] += h[i]
            pm[j] -= h[j]
            mp[i] -= h[i]
            mp[j] += h[j]
            mm[[i, j]] -= [h[i], h[j]]
            hij = (ev(pp) - ev(pm) - ev(mp) + ev(mm)) / (4.0 * h[i] * h[j])
            hess[i, j] = hess[j, i] = hij
    return grad, hess
