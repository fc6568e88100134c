"""whittlefit: parametric spectral estimation for stationary time series.

Fits second-order stationary models by exact Gaussian maximum likelihood or
by Whittle-type pseudo-likelihoods, including the bias-corrected variant that
compares the periodogram against its exact model expectation (computed from
the autocovariance with one FFT), optionally combined with DPSS tapering and
differencing.  Ships an exact Gaussian simulator and a Monte Carlo harness
for estimator benchmarking.
"""

from ._kernels import ACTIVE as kernel_backend, HAVE_COMPILED as has_compiled_kernels
from .estimation import ConvergenceRow, FitConfig, FitResult, convergence_study, fit, initialize_matern
from .harness import (
    AggregateRow,
    ExperimentSpec,
    ingest_velocity_csv,
    negative_frequencies,
    positive_frequencies,
    run_experiment,
    semiparametric_sideband_fit,
    write_rows_csv,
)
from .likelihoods import (
    CovarianceMatrixView,
    LikelihoodSpec,
    ObjectiveValue,
    debiased_whittle,
    evaluate_likelihood,
    exact_log_likelihood,
    score_and_hessian_fd,
    whittle,
)
from .models import (
    MaternDampingModel,
    MaternModel,
    MaternParams,
    WhiteNoiseModel,
    aliased_spectrum,
    complex_matern_autocovariance,
    diffusivity,
    matern_autocovariance,
    matern_spectrum,
)
from .simulate import SimulationPlan, plan_simulation, simulate_complex_proper, simulate_gaussian
from .spectral import (
    AutocovarianceSequence,
    FrequencyGrid,
    SpectralEstimate,
    TimeSeries,
    difference_autocovariance,
    difference_series,
    dynamic_range_diagnostic,
    expected_periodogram,
    expected_tapered_spectrum,
    fejer_kernel,
    fourier_grid,
    periodogram,
    tapered_periodogram,
)
from .tapers import Taper, dpss_taper, taper_autocorrelation, uniform_taper

__version__ = "0.1.0"
