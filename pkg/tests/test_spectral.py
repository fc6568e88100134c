import numpy as np
import pytest
from scipy.integrate import quad

import whittlefit as wf
from oracles import (
    brute_force_expected_periodogram,
    fejer_kernel_direct,
    gauss_legendre_convolution,
    matern_spectrum_fn,
    taper_transfer,
    wrapped_spectrum,
)


class TestFourierGrid:
    def test_even_n(self):
        g = wf.fourier_grid(4, 1.0)
        np.testing.assert_allclose(g.frequencies, [-np.pi / 2, 0.0, np.pi / 2, np.pi], atol=1e-15)

    def test_odd_n(self):
        g = wf.fourier_grid(3, 1.0)
        np.testing.assert_allclose(g.frequencies, [-2 * np.pi / 3, 0.0, 2 * np.pi / 3], atol=1e-15)

    def test_delta_scaling(self):
        g = wf.fourier_grid(4, 0.5)
        np.testing.assert_allclose(g.frequencies, [-np.pi, 0.0, np.pi, 2 * np.pi], atol=1e-15)

    @pytest.mark.parametrize("n", [2, 3, 8, 17, 100, 101])
    def test_structure(self, n):
        delta = 0.7
        w = wf.fourier_grid(n, delta).frequencies
        assert len(w) == n
        assert np.all(np.diff(w) > 0)
        assert np.all((w > -np.pi / delta) & (w <= np.pi / delta + 1e-12))
        assert np.count_nonzero(w == 0.0) == 1

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            wf.fourier_grid(1, 1.0)
        with pytest.raises(ValueError):
            wf.fourier_grid(8, 0.0)


class TestPeriodogram:
    def test_impulse(self):
        est = wf.periodogram(wf.TimeSeries([1.0, 0.0, 0.0, 0.0], 1.0))
        np.testing.assert_allclose(est.values, 0.25)

    def test_zeros(self):
        est = wf.periodogram(wf.TimeSeries(np.zeros(8), 2.0))
        np.testing.assert_allclose(est.values, 0.0)

    def test_white_noise_mean_level(self):
        # E{I(w)} = delta * sigma^2 for white noise; Monte Carlo across
        # frequencies and replicates.
        rng = np.random.default_rng(11)
        n, reps, delta = 128, 5000, 1.0
        means = np.empty(reps)
        for r in range(reps):
            est = wf.periodogram(wf.TimeSeries(rng.standard_normal(n), delta))
            means[r] = est.values.mean()
        se = means.std(ddof=1) / np.sqrt(reps)
        assert abs(means.mean() - delta * 1.0) < 3 * se

    @pytest.mark.parametrize("seed,n,delta", [(0, 64, 1.0), (1, 65, 0.25), (2, 33, 3.0)])
    def test_parseval(self, seed, n, delta):
        rng = np.random.default_rng(seed)
        x = rng.standard_normal(n)
        est = wf.periodogram(wf.TimeSeries(x, delta))
        lhs = est.values.sum() / (n * delta)
        rhs = np.sum(x**2) / n
        assert abs(lhs - rhs) < 1e-10 * rhs

    def test_parseval_complex(self):
        rng = np.random.default_rng(3)
        z = rng.standard_normal(50) + 1j * rng.standard_normal(50)
        est = wf.periodogram(wf.TimeSeries(z, 0.5))
        assert abs(est.values.sum() / (50 * 0.5) - np.mean(np.abs(z) ** 2)) < 1e-10

    def test_unit_modulus_invariance(self):
        rng = np.random.default_rng(4)
        z = rng.standard_normal(40) + 1j * rng.standard_normal(40)
        a = wf.periodogram(wf.TimeSeries(z, 1.0)).values
        b = wf.periodogram(wf.TimeSeries(np.exp(1.3j) * z, 1.0)).values
        np.testing.assert_allclose(a, b, rtol=1e-12)

    def test_time_reversal_frequency_negation(self):
        rng = np.random.default_rng(5)
        x = rng.standard_normal(48)
        w = wf.fourier_grid(48, 1.0).frequencies
        fwd = wf.periodogram(wf.TimeSeries(x, 1.0))
        rev = wf.periodogram(wf.TimeSeries(x[::-1], 1.0))
        # I_rev(w) should equal I(-w); map each frequency to its negation
        # modulo the grid (the Nyquist line maps to itself).
        for i, wi in enumerate(w):
            target = -wi if -wi in w else wi
            j = int(np.nonzero(w == target)[0][0])
            assert abs(rev.values[i] - fwd.values[j]) < 1e-10 * (1 + fwd.values[j])


class TestTaperedPeriodogram:
    def test_uniform_taper_recovers_periodogram(self):
        rng = np.random.default_rng(6)
        x = wf.TimeSeries(rng.standard_normal(63), 0.5)
        plain = wf.periodogram(x).values
        tapered = wf.tapered_periodogram(x, wf.uniform_taper(63)).values
        np.testing.assert_allclose(tapered, plain, rtol=1e-12)

    def test_zero_series(self):
        x = wf.TimeSeries(np.zeros(32), 1.0)
        est = wf.tapered_periodogram(x, wf.dpss_taper(32, 4.0))
        np.testing.assert_allclose(est.values, 0.0)

    def test_impulse_impulse_taper(self):
        x = wf.TimeSeries([1.0, 0.0, 0.0, 0.0], 1.0)
        h = wf.Taper(np.array([1.0, 0.0, 0.0, 0.0]))
        np.testing.assert_allclose(wf.tapered_periodogram(x, h).values, 1.0, rtol=1e-12)

    def test_length_mismatch(self):
        x = wf.TimeSeries(np.ones(16), 1.0)
        with pytest.raises(ValueError, match="length"):
            wf.tapered_periodogram(x, wf.uniform_taper(8))


class TestFejerKernel:
    def test_limit_at_zero(self):
        assert abs(wf.fejer_kernel(0.0, 8, 1.0) - 8 / (2 * np.pi)) < 1e-14

    @pytest.mark.parametrize("n", [2, 5, 16, 101])
    def test_first_null(self, n):
        assert wf.fejer_kernel(2 * np.pi / n, n, 1.0) < 1e-20

    def test_integrates_to_one(self):
        val, _ = quad(lambda w: wf.fejer_kernel(w, 16, 1.0), -np.pi, np.pi,
                      points=2 * np.pi * np.arange(-7, 8) / 16, limit=200)
        assert abs(val - 1.0) < 1e-8

    def test_even_nonnegative_periodic(self):
        w = np.linspace(-3.0, 3.0, 301)
        vals = wf.fejer_kernel(w, 12, 0.5)
        np.testing.assert_allclose(vals, wf.fejer_kernel(-w, 12, 0.5), rtol=1e-12)
        assert np.all(vals >= 0)
        np.testing.assert_allclose(vals, wf.fejer_kernel(w + 2 * np.pi / 0.5, 12, 0.5), atol=1e-12)

    def test_matches_direct_formula(self):
        w = np.linspace(-6, 6, 401)
        np.testing.assert_allclose(wf.fejer_kernel(w, 24, 0.7), fejer_kernel_direct(w, 24, 0.7), rtol=1e-10)


class TestExpectedPeriodogram:
    def test_white_noise_flat(self):
        s = wf.AutocovarianceSequence(np.r_[2.5, np.zeros(31)], 0.5)
        est = wf.expected_periodogram(s, 32)
        np.testing.assert_allclose(est.values, 0.5 * 2.5, rtol=1e-12)

    def test_matches_fejer_convolution_of_aliased_spectrum(self):
        # Joint check of the weighted-FFT formula against a quadrature
        # convolution of the wrapped spectrum with the Fejer kernel.
        n, delta = 64, 1.0
        params = wf.MaternParams(1.0, 0.2, 1.5)
        s = wf.matern_autocovariance(params, delta, n - 1)
        est = wf.expected_periodogram(s, n)
        f_tilde = matern_spectrum_fn(1.0, 0.2, 1.5)
        oracle = gauss_legendre_convolution(
            lambda nu: wrapped_spectrum(f_tilde, nu, delta, 4000),
            lambda w: fejer_kernel_direct(w, n, delta),
            est.grid.frequencies,
            delta,
            pieces=4 * n,
        )
        np.testing.assert_allclose(est.values, oracle, rtol=1e-6)

    def test_mean_periodogram_matches(self):
        # Small-scale statistical version of the E{I} contract (the full
        # 5000-replicate check is an acceptance criterion).
        n, delta, reps = 64, 1.0, 1200
        params = wf.MaternParams(1.0, 0.2, 1.5)
        s = wf.matern_autocovariance(params, delta, n - 1)
        fbar = wf.expected_periodogram(s, n).values
        plan = wf.plan_simulation(s, n, seed=101)
        acc = np.zeros(n)
        for x in wf.simulate_gaussian(plan, reps):
            acc += wf.periodogram(x).values
        mean_i = acc / reps
        keep = fbar > 0.05 * fbar.max()
        assert np.all(np.abs(mean_i[keep] - fbar[keep]) / fbar[keep] < 0.15)

    @pytest.mark.parametrize("n", [8, 33, 64])
    def test_brute_force_double_sum(self, n):
        params = wf.MaternParams(0.8, 0.3, 1.2)
        s = wf.matern_autocovariance(params, 0.5, n - 1)
        est = wf.expected_periodogram(s, n)
        oracle = brute_force_expected_periodogram(s.values, n, 0.5, est.grid.frequencies)
        np.testing.assert_allclose(est.values, oracle, rtol=1e-10)

    def test_brute_force_double_sum_complex_acv(self):
        # Complex (proper-process) autocovariance goes through the same path.
        n = 24
        rng = np.random.default_rng(7)
        z = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        # Build a valid complex acv as the autocovariance of a short MA filter.
        taps = np.r_[1.0 + 0j, 0.4 * z]
        full = np.correlate(taps, taps, "full")
        acv_vals = np.conj(full[len(taps) - 1 :])
        acv_vals = np.r_[acv_vals, np.zeros(n - acv_vals.size, dtype=complex)]
        s = wf.AutocovarianceSequence(acv_vals, 1.0)
        est = wf.expected_periodogram(s, n)
        oracle = brute_force_expected_periodogram(s.values, n, 1.0, est.grid.frequencies)
        np.testing.assert_allclose(est.values, oracle, rtol=1e-10, atol=1e-13)

    def test_requires_enough_lags(self):
        s = wf.AutocovarianceSequence(np.r_[1.0, np.zeros(7)], 1.0)
        with pytest.raises(ValueError, match="lags"):
            wf.expected_periodogram(s, 16)

    def test_nonnegative_with_clamping(self):
        # A constant autocovariance drives heavy cancellation off the peak.
        s = wf.AutocovarianceSequence(np.full(64, 1.0), 1.0)
        est = wf.expected_periodogram(s, 64)
        assert np.all(est.values >= 0)


class TestExpectedTaperedSpectrum:
    def test_uniform_matches_plain(self):
        params = wf.MaternParams(1.0, 0.2, 2.5)
        s = wf.matern_autocovariance(params, 1.0, 47)
        a = wf.expected_periodogram(s, 48).values
        b = wf.expected_tapered_spectrum(s, wf.uniform_taper(48), 48).values
        np.testing.assert_allclose(b, a, rtol=1e-12)

    def test_white_noise_any_taper(self):
        s = wf.AutocovarianceSequence(np.r_[3.0, np.zeros(63)], 2.0)
        est = wf.expected_tapered_spectrum(s, wf.dpss_taper(64, 4.0), 64)
        np.testing.assert_allclose(est.values, 2.0 * 3.0, rtol=1e-12)

    def test_matches_transfer_function_convolution(self):
        n, delta = 64, 1.0
        h = wf.dpss_taper(n, 4.0)
        params = wf.MaternParams(1.0, 0.2, 2.5)
        s = wf.matern_autocovariance(params, delta, n - 1)
        est = wf.expected_tapered_spectrum(s, h, n)
        f_tilde = matern_spectrum_fn(1.0, 0.2, 2.5)
        oracle = gauss_legendre_convolution(
            lambda nu: wrapped_spectrum(f_tilde, nu, delta, 4000),
            lambda w: taper_transfer(h.weights, delta, w),
            est.grid.frequencies,
            delta,
            pieces=4 * n,
        )
        np.testing.assert_allclose(est.values, oracle, rtol=1e-6)

    def test_length_mismatch(self):
        s = wf.AutocovarianceSequence(np.r_[1.0, np.zeros(63)], 1.0)
        with pytest.raises(ValueError, match="match"):
            wf.expected_tapered_spectrum(s, wf.uniform_taper(32), 64)


class TestDifferencing:
    def test_series_examples(self):
        y = wf.difference_series(wf.TimeSeries([1.0, 3.0, 6.0], 1.0))
        np.testing.assert_allclose(y.values, [2.0, 3.0])
        assert y.delta == 1.0
        const = wf.difference_series(wf.TimeSeries(np.full(5, 2.0), 1.0))
        np.testing.assert_allclose(const.values, 0.0)
        twice = wf.difference_series(wf.difference_series(wf.TimeSeries([1.0, 3.0, 6.0, 10.0], 1.0)))
        np.testing.assert_allclose(twice.values, [1.0, 1.0])

    def test_series_too_short(self):
        with pytest.raises(ValueError):
            wf.difference_series(wf.TimeSeries([1.0, 2.0], 1.0))

    def test_acv_white_noise(self):
        s = wf.AutocovarianceSequence(np.r_[1.0, np.zeros(9)], 1.0)
        sy = wf.difference_autocovariance(s)
        np.testing.assert_allclose(sy.values, np.r_[2.0, -1.0, np.zeros(7)])

    def test_acv_constant_degenerate(self):
        s = wf.AutocovarianceSequence(np.full(8, 3.0), 1.0)
        sy = wf.difference_autocovariance(s)
        np.testing.assert_allclose(sy.values, 0.0)

    def test_acv_too_short(self):
        with pytest.raises(ValueError):
            wf.difference_autocovariance(wf.AutocovarianceSequence([1.0], 1.0))

    def test_differenced_expected_periodogram_vs_convolution(self):
        # E{I_Y} equals the convolution of 4 sin^2(w delta/2) times the
        # wrapped spectrum with the length-(n-1) Fejer kernel.
        n, delta = 64, 1.0
        params = wf.MaternParams(1.0, 0.2, 2.5)
        s = wf.matern_autocovariance(params, delta, n - 1)
        sy = wf.difference_autocovariance(s)
        est = wf.expected_periodogram(sy, n - 1)
        f_tilde = matern_spectrum_fn(1.0, 0.2, 2.5)

        def f_y(nu):
            return 4.0 * np.sin(nu * delta / 2.0) ** 2 * wrapped_spectrum(f_tilde, nu, delta, 4000)

        oracle = gauss_legendre_convolution(
            f_y,
            lambda w: fejer_kernel_direct(w, n - 1, delta),
            est.grid.frequencies,
            delta,
            pieces=4 * n,
        )
        np.testing.assert_allclose(est.values, oracle, rtol=1e-6)

    def test_matches_simulated_differences(self):
        # f_{n-1,Y} is the expectation of the periodogram of the differenced
        # sample; check by Monte Carlo.
        n, reps = 48, 1500
        params = wf.MaternParams(1.0, 0.3, 1.8)
        s = wf.matern_autocovariance(params, 1.0, n - 1)
        sy = wf.difference_autocovariance(s)
        fbar = wf.expected_periodogram(sy, n - 1).values
        plan = wf.plan_simulation(s, n, seed=55)
        acc = np.zeros(n - 1)
        for x in wf.simulate_gaussian(plan, reps):
            acc += wf.periodogram(wf.difference_series(x)).values
        keep = fbar > 0.05 * fbar.max()
        rel = np.abs(acc / reps - fbar)[keep] / fbar[keep]
        assert np.all(rel < 0.15)


class TestDynamicRangeDiagnostic:
    def test_white_noise_closed_form(self):
        bound = wf.dynamic_range_diagnostic(wf.WhiteNoiseModel(1.0), [1.0], 100, delta=1.0)
        np.testing.assert_allclose(bound, [0.01], rtol=1e-6)

    def test_differencing_shrinks_bound_for_steep_spectra(self):
        model = wf.MaternModel(wf.MaternParams(1.0, 0.2, 2.5))
        plain = wf.dynamic_range_diagnostic(model, model.theta, 1000)
        diffed = wf.dynamic_range_diagnostic(model, model.theta, 1000, difference_order=1)
        assert np.all(diffed < plain)

    def test_flat_parameter_gives_zero(self):
        class TwoParamNoise:
            param_names = ("variance", "unused")

            def autocovariance(self, theta, delta, max_lag):
                vals = np.zeros(int(max_lag) + 1)
                vals[0] = float(theta[0])
                return wf.AutocovarianceSequence(vals, delta)

        bound = wf.dynamic_range_diagnostic(TwoParamNoise(), [1.0, 5.0], 64)
        assert bound[1] == 0.0
        assert bound[0] > 0

    def test_degenerate_model_reports_infinite(self):
        class Degenerate:
            param_names = ("a",)

            def autocovariance(self, theta, delta, max_lag):
                # Fully correlated: expected periodogram vanishes off the peak.
                return wf.AutocovarianceSequence(np.full(int(max_lag) + 1, float(theta[0])), delta)

        bound = wf.dynamic_range_diagnostic(Degenerate(), [1.0], 64)
        assert np.isinf(bound[0])
