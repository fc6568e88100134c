"""Data tapers: the uniform taper and zeroth-order Slepian (DPSS) sequences."""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

from . import _kernels

__all__ = ["Taper", "uniform_taper", "dpss_taper", "taper_autocorrelation"]

# Direct O(n^2) kernel summation up to this length, FFT-based above; the two
# paths agree to rounding and are cross-checked in the tests.
_KERNEL_FFT_THRESHOLD = 4096


def taper_autocorrelation(weights):
    """Autocorrelation kernel sum_{t} h_t h_{t+tau} for tau = 0, ..., n-1."""
    h = np.ascontiguousarray(weights, dtype=float)
    if h.ndim != 1 or h.size < 1:
        raise ValueError("taper weights must be a nonempty 1-d array")
    if h.size <= _KERNEL_FFT_THRESHOLD:
        return _kernels.taper_kernel_direct(h)
    m = 2 * h.size
    return np.fft.irfft(np.abs(np.fft.rfft(h, m)) ** 2, m)[: h.size]


@dataclass
class Taper:
    """A unit-energy weight sequence with its precomputed autocorrelation kernel.

    The kernel is what the expected tapered spectrum multiplies the model
    autocovariance by, so it is computed once here and reused across all
    likelihood evaluations.
    """

    weights: np.ndarray
    bandwidth_product: float = 0.0
    kernel: np.ndarray = field(init=False)

    def __post_init__(self):
        self.weights = np.ascontiguousarray(self.weights, dtype=float)
        if self.weights.ndim != 1 or self.weights.size < 2:
            raise ValueError("taper weights must be a 1-d array of length >= 2")
        energy = float(np.sum(self.weights**2))
        if abs(energy - 1.0) > 1e-8:
            raise ValueError(f"taper must have unit energy, got sum h^2 = {energy!r}")
        self.kernel = taper_autocorrelation(self.weights)

    @property
    def n(self):
        return self.weights.size


def uniform_taper(n) -> Taper:
    """The flat taper h_t = 1/sqrt(n), whose kernel is the triangle 1 - tau/n.

    Tapering with it reproduces the plain periodogram exactly.
    """
    n = int(n)
    if n < 2:
        raise ValueError("need n >= 2")
    return Taper(np.full(n, 1.0 / np.sqrt(n)))


def dpss_taper(n, nw) -> Taper:
    """Zeroth-order discrete prolate spheroidal sequence of length n.

    Solves the standard symmetric tridiagonal eigenproblem that commutes with
    the concentration operator for half-bandwidth W = nw/n and keeps the top
    eigenvector: the maximally in-band-concentrated sequence.  O(n) memory.

    Parameters
    ----------
    n : int
        Sequence length (>= 2).
    nw : float
        Time-bandwidth product; must satisfy 1 <= nw < n/2.

    Returns
    -------
    Taper
        Unit-energy weights, sign-fixed so the midpoint weight is positive.
    """
    n = int(n)
    nw = float(nw)
    if n < 2:
        raise ValueError("need n >= 2")
    if not 1.0 <= nw < n / 2.0:
        raise ValueError(f"need 1 <= nw < n/2, got nw={nw} for n={n}")
    w = nw / n
    t = np.arange(n)
    diag = ((n - 1) / 2.0 - t) ** 2 * np.cos(2.0 * np.pi * w)
    off = t[1:] * (n - t[1:]) / 2.0
    _, vecs = eigh_tridiagonal(diag, off, select="i", select_range=(n - 1, n - 1))
    h = vecs[:, 0]
    h = h / np.linalg.norm(h)
    if h[n // 2] < 0:
        h = -h
    return Taper(h, bandwidth_product=nw)
