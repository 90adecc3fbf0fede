import numpy as np
import pytest
from scipy.integrate import quad

from fmxirs.multipath import (
    FrequencyPlan,
    StackLayout,
    complex_normal,
    condition_number_db,
    delay_phasor_mean,
    draw_channel_set,
    draw_path_set,
    draw_stacked_channels,
    evaluate_at_shift,
    pair_correlation,
    reflected_correlation_matrix,
    stack_branches,
    uniform_delay_moments,
)


def quad_moment(fn, freq, spread):
    """Numeric quadrature oracle for E{fn(2*pi*freq*tau)}, tau ~ U[0, spread]."""
    val, _ = quad(lambda t: fn(2.0 * np.pi * freq * t) / spread, 0.0, spread, limit=400)
    return val


class TestUniformDelayMoments:
    def test_zero_product_limit(self):
        assert uniform_delay_moments(0.0, 1.0) == (1.0, 0.0, 1.0, 0.0)
        assert uniform_delay_moments(3.0, 0.0) == (1.0, 0.0, 1.0, 0.0)

    def test_half_product(self):
        # freq*spread = 1/2: quadrature gives cos-moment 0 and sin-moment 2/pi
        m = uniform_delay_moments(0.5, 1.0)
        assert m.cos == pytest.approx(quad_moment(np.cos, 0.5, 1.0), abs=1e-12)
        assert m.cos == pytest.approx(0.0, abs=1e-15)
        assert m.sin == pytest.approx(quad_moment(np.sin, 0.5, 1.0), abs=1e-12)
        assert m.sin == pytest.approx(2.0 / np.pi, abs=1e-12)

    def test_quarter_product_cos_sq(self):
        m = uniform_delay_moments(0.25, 1.0)
        assert m.cos_sq == pytest.approx(quad_moment(lambda x: np.cos(x) ** 2, 0.25, 1.0), abs=1e-12)
        assert m.cos_sq == pytest.approx(0.5, abs=1e-15)

    @pytest.mark.parametrize("freq", [0.07, 0.31, 1.0, 2.5])
    @pytest.mark.parametrize("spread", [0.2, 1.0, 3.7])
    def test_matches_quadrature(self, freq, spread):
        m = uniform_delay_moments(freq, spread)
        assert m.cos == pytest.approx(quad_moment(np.cos, freq, spread), abs=1e-10)
        assert m.sin == pytest.approx(quad_moment(np.sin, freq, spread), abs=1e-10)
        assert m.cos_sq == pytest.approx(quad_moment(lambda x: np.cos(x) ** 2, freq, spread), abs=1e-10)
        assert m.sin_sq == pytest.approx(quad_moment(lambda x: np.sin(x) ** 2, freq, spread), abs=1e-10)


class TestDelayPhasorMean:
    def test_zero_frequency(self):
        assert delay_phasor_mean(0.0, 1.0) == 1.0 + 0.0j

    def test_against_monte_carlo(self):
        # tau_max = 1 => coherence spacing 0.5; check at 0.5 and 1.0 cycles
        rng = np.random.default_rng(123)
        tau = rng.uniform(0.0, 1.0, 10**6)
        for freq in (0.5, 1.0):
            mc = np.mean(np.exp(-2j * np.pi * freq * tau))
            assert delay_phasor_mean(freq, 1.0) == pytest.approx(mc, abs=4e-3)

    def test_known_values(self):
        # at the coherence spacing the mean is purely imaginary, -2j/pi
        assert delay_phasor_mean(0.5, 1.0) == pytest.approx(-2j / np.pi, abs=1e-14)
        assert abs(delay_phasor_mean(1.0, 1.0)) < 1e-15

    def test_array_input_and_conjugate_symmetry(self):
        freqs = np.array([-0.3, 0.0, 0.3, 1.7])
        vals = delay_phasor_mean(freqs, 0.8)
        assert vals.shape == freqs.shape
        assert vals[0] == pytest.approx(np.conj(vals[2]), abs=1e-15)
        assert np.all(np.abs(vals) <= 1.0 + 1e-15)


class TestPairCorrelation:
    def test_matches_phasor_mean_identity(self):
        # algebraic identity: rho(f) = |E{e^{-j*2*pi*(2f)*tau}}|
        for shift in np.linspace(0.01, 40.0, 500):
            assert pair_correlation(shift, 1.0) == pytest.approx(
                abs(delay_phasor_mean(2.0 * shift, 1.0)), abs=1e-12)

    def test_zero_at_integer_coherence_multiples(self):
        tau_max = 1.0
        coherence = 1.0 / (2.0 * tau_max)
        for i in range(1, 65):
            assert pair_correlation(i * coherence, tau_max) <= 1e-12

    def test_limits_and_half_spacing(self):
        assert pair_correlation(0.0, 1.0) == 1.0
        assert pair_correlation(1e-12, 1.0) == pytest.approx(1.0, abs=1e-9)
        # Monte-Carlo oracle: correlation of e^{-j*4*pi*f*tau} at f = coherence/2
        rng = np.random.default_rng(99)
        tau = rng.uniform(0.0, 1.0, 10**6)
        mc = abs(np.mean(np.exp(-4j * np.pi * 0.25 * tau)))
        assert pair_correlation(0.25, 1.0) == pytest.approx(mc, abs=4e-3)
        assert pair_correlation(0.25, 1.0) == pytest.approx(2.0 / np.pi, abs=1e-12)


class TestPathSet:
    def test_single_path_unit(self):
        rng = np.random.default_rng(0)
        p = draw_path_set(1, 1.0, rng, amplitude_law="constant")
        assert p.amplitudes[0] == 1.0
        for shift in (0.0, 3.0, -7.5):
            single = draw_path_set(1, 1e-12, rng, amplitude_law="constant")
            assert evaluate_at_shift(single, 100.0, shift) == pytest.approx(1.0, abs=1e-8)

    def test_delays_within_range(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            p = draw_path_set(64, 0.3, rng)
            assert np.all(p.delays >= 0.0) and np.all(p.delays <= 0.3)

    def test_mean_square_amplitude(self):
        rng = np.random.default_rng(2)
        p = draw_path_set(10**4, 1.0, rng)
        total = np.sum(p.amplitudes**2)
        # sum of L terms with E = 1/L each; Rayleigh power has unit relative variance
        se = 1.0 / np.sqrt(10**4)
        assert abs(total - 1.0) < 3.0 * se

    def test_invalid_args(self):
        rng = np.random.default_rng(3)
        with pytest.raises(ValueError):
            draw_path_set(0, 1.0, rng)
        with pytest.raises(ValueError):
            draw_path_set(4, -1.0, rng)
        with pytest.raises(ValueError):
            draw_path_set(4, 1.0, rng, amplitude_law="bogus")


class TestEvaluateAtShift:
    def test_gaussian_limit_moments(self):
        rng = np.random.default_rng(7)
        n = 4000
        vals = np.empty(n, dtype=complex)
        for k in range(n):
            p = draw_path_set(256, 1.0, rng)
            vals[k] = evaluate_at_shift(p, 1024.0, 3.0)
        assert abs(np.mean(vals)) < 3.0 / np.sqrt(n)
        assert np.mean(np.abs(vals) ** 2) == pytest.approx(1.0, abs=0.05)
        # complex-Gaussian fourth absolute moment is 2
        assert np.mean(np.abs(vals) ** 4) == pytest.approx(2.0, rel=0.08)

    def test_pair_correlation_emerges(self):
        rng = np.random.default_rng(8)
        n = 4000
        shift = 0.25  # half the coherence spacing for tau_max = 1
        prods = np.empty(n, dtype=complex)
        for k in range(n):
            p = draw_path_set(256, 1.0, rng)
            prods[k] = evaluate_at_shift(p, 1024.0, shift) * np.conj(
                evaluate_at_shift(p, 1024.0, -shift))
        assert abs(np.mean(prods)) == pytest.approx(
            pair_correlation(shift, 1.0), abs=3.0 / np.sqrt(n))


def make_plan(v=2, s=2, ratio=1.0, tau_max=1.0, carrier=1024.0):
    return FrequencyPlan(carrier=carrier, v=v, s=s,
                         spacing=ratio / (2.0 * tau_max), tau_max=tau_max)


class TestFrequencyPlan:
    def test_mixing_frequencies_increasing(self):
        plan = make_plan(v=2, s=3, ratio=0.7)
        freqs = plan.mixing_frequencies()
        assert freqs.shape == (6,)
        assert np.all(np.diff(freqs) > 0)
        assert plan.mixing_frequency(2, 3) == pytest.approx(6 * plan.spacing)
        assert plan.mixing_frequency(1, 1) == pytest.approx(plan.spacing)

    def test_shift_order(self):
        plan = make_plan(v=1, s=2)
        np.testing.assert_allclose(
            plan.shifts(),
            [plan.spacing, -plan.spacing, 2 * plan.spacing, -2 * plan.spacing])

    def test_spacing_ratio(self):
        plan = make_plan(ratio=1.5, tau_max=2.0)
        assert plan.spacing_ratio == pytest.approx(1.5)

    def test_validation(self):
        with pytest.raises(ValueError):
            FrequencyPlan(carrier=1.0, v=0, s=1, spacing=1.0, tau_max=1.0)
        with pytest.raises(ValueError):
            FrequencyPlan(carrier=1.0, v=1, s=1, spacing=0.5, tau_max=1.0, bandwidth=0.5)
        with pytest.raises(ValueError):
            FrequencyPlan(carrier=1.0, v=1, s=1, spacing=1.0, tau_max=0.0)


class TestChannelSet:
    def test_cascade_is_exact_half_product(self):
        rng = np.random.default_rng(11)
        cs = draw_channel_set(make_plan(), m=3, rng=rng, paths=16)
        expected = 0.5 * cs.user_surface[:, :, None] * cs.to_bs_plus
        assert np.array_equal(cs.cascade_plus, expected)

    def test_stacking_order(self):
        rng = np.random.default_rng(12)
        cs = draw_channel_set(make_plan(v=2, s=2), m=2, rng=rng, paths=8)
        h = cs.stacked()
        assert h.shape == ((2 * 4 + 1) * 2,)
        np.testing.assert_array_equal(h[:2], cs.direct)
        # branch order: +11, -11, +12, -12, +21, -21, +22, -22
        np.testing.assert_array_equal(h[2:4], cs.cascade_plus[0, 0])
        np.testing.assert_array_equal(h[4:6], cs.cascade_minus[0, 0])
        np.testing.assert_array_equal(h[6:8], cs.cascade_plus[0, 1])
        np.testing.assert_array_equal(h[-2:], cs.cascade_minus[1, 1])

    def test_layout_names_match_slices(self):
        layout = StackLayout(v=1, s=2, m=3)
        names = [name for name, _ in layout.branches()]
        assert names == ["direct", "plus_1_1", "minus_1_1", "plus_1_2", "minus_1_2"]
        slices = [sl for _, sl in layout.branches()]
        assert slices[0] == slice(0, 3)
        assert slices[-1] == slice(12, 15)
        assert layout.dim == 15

    def test_cascade_variance_and_pair_correlation(self):
        rng = np.random.default_rng(13)
        plan = make_plan(v=1, s=1, ratio=0.5)  # single module at half spacing
        n = 4000
        z_plus = np.empty(n, dtype=complex)
        g_pair = np.empty(n, dtype=complex)
        for k in range(n):
            cs = draw_channel_set(plan, m=1, rng=rng, paths=256)
            z_plus[k] = cs.cascade_plus[0, 0, 0]
            g_pair[k] = cs.to_bs_plus[0, 0, 0] * np.conj(cs.to_bs_minus[0, 0, 0])
        assert np.mean(np.abs(z_plus) ** 2) == pytest.approx(0.25, abs=0.02)
        assert abs(np.mean(z_plus)) < 3.0 * 0.5 / np.sqrt(n)
        rho = pair_correlation(plan.mixing_frequency(1, 1), plan.tau_max)
        assert abs(np.mean(g_pair)) == pytest.approx(rho, abs=3.0 / np.sqrt(n))

    def test_cross_module_independence(self):
        rng = np.random.default_rng(14)
        plan = make_plan(v=1, s=2, ratio=0.4)
        n = 4000
        prods = np.empty(n, dtype=complex)
        for k in range(n):
            cs = draw_channel_set(plan, m=1, rng=rng, paths=64)
            prods[k] = cs.to_bs_plus[0, 0, 0] * np.conj(cs.to_bs_plus[0, 1, 0])
        assert abs(np.mean(prods)) < 3.0 / np.sqrt(n)

    def test_batch_matches_format(self):
        rng = np.random.default_rng(15)
        plan = make_plan()
        batch = draw_stacked_channels(plan, m=2, trials=5, rng=rng, paths=8)
        assert batch.shape == (5, (2 * plan.n_modules + 1) * 2)

    def test_stack_branches_shape(self):
        direct = np.zeros((4, 3))
        casc = np.zeros((4, 2, 2, 3))
        assert stack_branches(direct, casc, casc).shape == (4, 27)


class TestCorrelationMatrix:
    def test_pair_only_identity_at_integer_ratio(self):
        for ratio in (1.0, 2.0, 3.0):
            plan = make_plan(v=2, s=2, ratio=ratio)
            f = reflected_correlation_matrix(plan, "pair_only")
            np.testing.assert_allclose(f, np.eye(8), atol=1e-12)

    def test_pair_only_half_ratio_off_diagonal(self):
        plan = make_plan(v=1, s=1, ratio=0.5)
        f = reflected_correlation_matrix(plan, "pair_only")
        assert abs(f[0, 1]) == pytest.approx(2.0 / np.pi, abs=1e-12)
        assert f[1, 0] == pytest.approx(np.conj(f[0, 1]), abs=1e-15)

    @pytest.mark.parametrize("model", ["pair_only", "shared_scatterers"])
    @pytest.mark.parametrize("ratio", [0.3, 0.5, 1.0, 2.7])
    def test_hermitian_unit_diagonal_psd(self, model, ratio):
        plan = make_plan(v=2, s=2, ratio=ratio)
        f = reflected_correlation_matrix(plan, model)
        np.testing.assert_allclose(f, f.conj().T, atol=1e-12)
        np.testing.assert_allclose(np.diag(f), np.ones(8), atol=1e-12)
        assert np.linalg.eigvalsh(f)[0] >= -1e-10

    def test_unknown_model(self):
        with pytest.raises(ValueError):
            reflected_correlation_matrix(make_plan(), "bogus")


class TestConditionNumber:
    def test_identity(self):
        assert condition_number_db(np.eye(6)) == 0.0

    def test_two_by_two_closed_form(self):
        # Hermitian unit-diagonal 2x2 block has singular values 1 +/- |c|
        c = 2.0 / np.pi
        f = np.array([[1.0, c], [c, 1.0]])
        expected = 10.0 * np.log10((1.0 + c) / (1.0 - c))
        assert condition_number_db(f) == pytest.approx(expected, abs=1e-12)
        assert condition_number_db(f) == pytest.approx(6.5358650104, abs=1e-6)

    def test_plan_at_integer_ratio_is_zero_db(self):
        plan = make_plan(v=2, s=2, ratio=1.0)
        f = reflected_correlation_matrix(plan, "pair_only")
        assert abs(condition_number_db(f)) < 1e-10

    def test_singular_matrix_sentinel(self):
        f = np.ones((2, 2))
        assert condition_number_db(f) == np.inf

    def test_non_square_rejected(self):
        with pytest.raises(ValueError):
            condition_number_db(np.ones((2, 3)))


class TestComplexNormal:
    def test_unit_variance(self):
        rng = np.random.default_rng(21)
        z = complex_normal(rng, 10**5)
        assert np.mean(np.abs(z) ** 2) == pytest.approx(1.0, abs=0.02)
        assert abs(np.mean(z)) < 0.01
