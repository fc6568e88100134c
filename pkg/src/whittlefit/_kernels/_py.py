"""Pure-NumPy implementations of the hot kernels.

These are the reference implementations; `whittlefit._kernels` rebinds to the
compiled Cython versions when available.  Both variants must agree to
floating-point accuracy (see tests/test_kernels.py).
"""

import numpy as np
from scipy.special import gammaln, kv

__all__ = ["matern_acv", "acv_difference", "taper_kernel_direct", "debias_post", "whittle_terms"]


def matern_acv(amplitude, damping, slope, delta, nlags):
    """Matern autocovariance s(tau) at lags tau = 0, ..., nlags-1.

    Closed Bessel form of the inverse transform of A^2/(w^2+c^2)^alpha:
    with nu = alpha - 1/2,

        s(lag) = A^2 * 2^(1-nu) * (c*lag)^nu * K_nu(c*lag)
                 / (2 sqrt(pi) Gamma(alpha) c^(2 alpha - 1)),

    and s(0) = A^2 Gamma(nu) / (2 sqrt(pi) Gamma(alpha) c^(2 alpha - 1)).
    """
    nu = slope - 0.5
    log_scale = (
        2.0 * np.log(amplitude)
        - np.log(2.0)
        - 0.5 * np.log(np.pi)
        - gammaln(slope)
        - (2.0 * slope - 1.0) * np.log(damping)
    )
    out = np.empty(nlags)
    out[0] = np.exp(log_scale + gammaln(nu))
    if nlags > 1:
        x = damping * delta * np.arange(1, nlags)
        with np.errstate(under="ignore"):
            out[1:] = np.exp(log_scale + (1.0 - nu) * np.log(2.0) + nu * np.log(x)) * kv(nu, x)
    return out


def acv_difference(s):
    """Autocovariance of first differences: 2 s(t) - s(t+1) - s(t-1), s(-1)=s(1)."""
    s = np.asarray(s, dtype=float)
    prev = np.empty(s.size - 1)
    prev[0] = s[1]
    prev[1:] = s[: s.size - 2]
    return 2.0 * s[:-1] - s[1:] - prev


def taper_kernel_direct(h):
    """Taper autocorrelation sum_t h[t] h[t+tau] by direct O(n^2) summation."""
    h = np.asarray(h, dtype=float)
    return np.correlate(h, h, mode="full")[h.size - 1 :]


def debias_post(fvals, s0, delta, floor_eps):
    """Turn the FFT of a weighted autocovariance into an expected spectrum.

    Computes 2*delta*Re(fvals) - delta*s0 and clamps values below
    floor_eps*s0*delta to that floor.  Returns (spectrum, n_clamped), with the
    spectrum in the FFT's native frequency ordering.
    """
    fbar = 2.0 * delta * np.real(fvals) - delta * s0
    floor = floor_eps * s0 * delta
    low = fbar < floor
    n_clamped = int(np.count_nonzero(low))
    if n_clamped:
        fbar[low] = floor
    return fbar, n_clamped


def whittle_terms(data, model):
    """Sum of log(model) + data/model over frequencies (both 1-d, same length)."""
    return float(np.sum(np.log(model) + data / model))
