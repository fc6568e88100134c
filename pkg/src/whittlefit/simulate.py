"""Exact Gaussian simulation from an autocovariance via circulant embedding.

The target Toeplitz covariance is embedded in a circulant matrix whose
eigenvalues come from one FFT of the symmetrized autocovariance; when they are
all nonnegative the draws are exactly Gaussian with the requested covariance
at every lag below the output length.  Lags beyond those supplied are treated
as zero, which leaves the covariance of the output exact for the supplied
range whenever the embedding admits it.

Reproducibility: replicate r of a plan with seed s uses the PCG64 stream
``numpy.random.default_rng(s + r)`` and converts uniforms to normals through
the inverse CDF (scipy.special.ndtri), so runs are identical whether
replicates are generated serially or in parallel.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtri

from .spectral import AutocovarianceSequence, TimeSeries

__all__ = ["SimulationPlan", "plan_simulation", "simulate_gaussian", "simulate_complex_proper"]

# Eigenvalues of the embedding may dip this far (times s(0)) below zero from
# rounding before we consider the embedding failed.
_EIG_TOL = 1e-8
_MAX_DOUBLINGS = 4


@dataclass
class SimulationPlan:
    """A validated circulant embedding ready to generate replicates."""

    acv: AutocovarianceSequence
    n: int
    embedding_size: int
    eigenvalues: np.ndarray
    seed: int
    _root: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self._root = np.sqrt(self.eigenvalues)


def plan_simulation(s: AutocovarianceSequence, n, seed=0) -> SimulationPlan:
    """Build and validate the circulant embedding for length-n output.

    The embedding size starts at the smallest power of two >= 2(n-1) and is
    doubled (up to four times) while the eigenvalue spectrum has negative
    entries beyond a small rounding tolerance; tiny negatives are clamped to
    zero.  Supplying autocovariance lags beyond n lets larger embeddings use
    them instead of zero padding.
    """
    n = int(n)
    if n < 2:
        raise ValueError("need n >= 2")
    if s.nlags < n:
        raise ValueError(f"autocovariance must cover lags 0..{n - 1}, got {s.nlags}")
    if np.iscomplexobj(s.values):
        if np.max(np.abs(s.values.imag)) > 1e-12 * s.variance:
            raise ValueError("circulant embedding requires a real autocovariance (symmetric spectrum)")
        vals = np.ascontiguousarray(s.values.real)
    else:
        vals = s.values

    size = 1 << int(np.ceil(np.log2(max(2 * (n - 1), 2))))
    tol = _EIG_TOL * s.variance
    for _ in range(_MAX_DOUBLINGS + 1):
        half = size // 2
        circ = np.zeros(size)
        m = min(vals.size, half + 1)
        circ[:m] = vals[:m]
        circ[size - m + 1 :] = vals[1:m][::-1]
        eig = np.fft.fft(circ).real
        worst = float(eig.min())
        if worst >= -tol:
            return SimulationPlan(s, n, size, np.maximum(eig, 0.0), int(seed))
        size *= 2
    raise ValueError(
        f"circulant embedding still has eigenvalues >= {abs(worst):.3e} below zero after "
        f"{_MAX_DOUBLINGS} doublings; the model may be near-nonstationary"
    )


def _standard_normal(rng, shape):
    # Inverse-CDF normals from the uniform stream; the clip keeps ndtri finite
    # on the (probability 2^-53) exact-zero draw.
    u = rng.random(shape)
    return ndtri(np.maximum(u, 2.0**-53))


def _draw(plan: SimulationPlan, replicate):
    rng = np.random.default_rng(plan.seed + replicate)
    z = _standard_normal(rng, (2, plan.embedding_size))
    spectrum_noise = plan._root * (z[0] + 1j * z[1])
    return np.sqrt(plan.embedding_size) * np.fft.ifft(spectrum_noise)


def simulate_gaussian(plan: SimulationPlan, replicates) -> list:
    """Exact zero-mean Gaussian replicates with the planned autocovariance."""
    return [TimeSeries(np.real(_draw(plan, r))[: plan.n], plan.acv.delta) for r in range(int(replicates))]


def simulate_complex_proper(plan: SimulationPlan, replicates) -> list:
    """Proper complex Gaussian replicates: E{Z_t conj(Z_{t-tau})} equals the
    planned autocovariance and the complementary covariance E{Z_t Z_{t-tau}}
    vanishes at all lags (real and imaginary parts are independent copies with
    half the variance each)."""
    return [TimeSeries(_draw(plan, r)[: plan.n] / np.sqrt(2.0), plan.acv.delta) for r in range(int(replicates))]
