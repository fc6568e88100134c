# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: Matern autocovariance, taper autocorrelation, and the
per-evaluation pieces of the frequency-domain objectives.

Must match whittlefit._kernels._py bit-for-bit up to floating-point rounding.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, log

from scipy.special.cython_special cimport gammaln, kv

cnp.import_array()

cdef double PI = 3.141592653589793238462643383279502884


def matern_acv(double amplitude, double damping, double slope, double delta,
               Py_ssize_t nlags):
    """Matern autocovariance s(tau) at lags tau = 0, ..., nlags-1."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(nlags)
    cdef double nu = slope - 0.5
    cdef double log_scale = (2.0 * log(amplitude) - log(2.0) - 0.5 * log(PI)
                             - gammaln(slope) - (2.0 * slope - 1.0) * log(damping))
    cdef double pref = log_scale + (1.0 - nu) * log(2.0)
    cdef double x, v
    cdef Py_ssize_t t
    out[0] = exp(log_scale + gammaln(nu))
    for t in range(1, nlags):
        x = damping * delta * t
        v = exp(pref + nu * log(x)) * kv(nu, x)
        out[t] = v
        if v == 0.0:
            # (x^nu) K_nu(x) decreases monotonically, so once a lag
            # underflows every later lag is exactly zero too.
            out[t + 1 :] = 0.0
            break
    return out


def acv_difference(double[::1] s):
    """Autocovariance of first differences: 2 s(t) - s(t+1) - s(t-1), s(-1)=s(1)."""
    cdef Py_ssize_t n = s.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n - 1)
    cdef Py_ssize_t t
    out[0] = 2.0 * s[0] - 2.0 * s[1]
    for t in range(1, n - 1):
        out[t] = 2.0 * s[t] - s[t + 1] - s[t - 1]
    return out


def debias_post(complex[::1] fvals, double s0, double delta, double floor_eps):
    """2*delta*Re(fvals) - delta*s0 with a clamp at floor_eps*s0*delta."""
    cdef Py_ssize_t n = fvals.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n)
    cdef double floor = floor_eps * s0 * delta
    cdef double v
    cdef Py_ssize_t i, n_clamped = 0
    for i in range(n):
        v = 2.0 * delta * fvals[i].real - delta * s0
        if v < floor:
            v = floor
            n_clamped += 1
        out[i] = v
    return out, n_clamped


def whittle_terms(double[::1] data, double[::1] model):
    """Sum of log(model) + data/model over frequencies."""
    cdef double acc = 0.0
    cdef Py_ssize_t i
    for i in range(data.shape[0]):
        acc += log(model[i]) + data[i] / model[i]
    return acc
