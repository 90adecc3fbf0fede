import numpy as np
import pytest

from fmxirs.errors import ConfigurationError, PreconditionError
from fmxirs.waveform import (
    BasebandWaveform,
    LinkScene,
    Reflector,
    SignalGrid,
    SinglePathLink,
    Tone,
    ToneSum,
    extract_tones,
    filter_response,
    frm_reflect,
    iq_demod_lowpass,
    lowpass_taps,
    propagate_single_path,
    simulate_link,
    upconvert,
)

GRID = SignalGrid()  # carrier 1024, 8192 samples/symbol


def closed_form_readout(scene, x):
    """Independent oracle: frequency-domain prediction assembled by hand.

    Direct bin carries gain*e^{-j*2*pi*fc*tau_d}*x; each mixing image carries
    half the two-hop gain with the second hop's phase taken at the shifted
    carrier.
    """
    fc = scene.grid.carrier
    out = {0.0: scene.direct.gain * np.exp(-2j * np.pi * fc * scene.direct.delay) * x}
    for r in scene.reflectors:
        h = r.to_surface.gain * np.exp(-2j * np.pi * fc * r.to_surface.delay)
        for sign in (1.0, -1.0):
            g = r.to_receiver.gain * np.exp(
                -2j * np.pi * (fc + sign * r.mixing) * r.to_receiver.delay)
            out[sign * float(r.mixing)] = 0.5 * h * g * x
    return out


def one_reflector_scene(direct=(1.0, 0.0), surface=(1.0, 0.0), receiver=(1.0, 0.0),
                        mixing=32):
    return LinkScene(
        direct=SinglePathLink(*direct),
        reflectors=(Reflector(to_surface=SinglePathLink(*surface),
                              to_receiver=SinglePathLink(*receiver),
                              mixing=mixing),),
        grid=GRID,
    )


class TestSignalGrid:
    def test_rejects_bad_units(self):
        with pytest.raises(ConfigurationError):
            SignalGrid(carrier=0)
        with pytest.raises(ConfigurationError):
            SignalGrid(carrier=1024, sample_rate=4096)  # below 8x margin
        with pytest.raises(ConfigurationError):
            SignalGrid(carrier=1024.5, sample_rate=8192)

    def test_mixing_bounds(self):
        GRID.check_mixing(8)
        with pytest.raises(ConfigurationError):
            GRID.check_mixing(1024)
        with pytest.raises(ConfigurationError):
            GRID.check_mixing(7.5)


class TestUpconvert:
    def test_real_symbol(self):
        wave = upconvert(1.0, GRID).render(GRID, 1)
        assert wave.samples[0] == pytest.approx(1.0, abs=1e-15)
        k = np.arange(8192)
        np.testing.assert_allclose(wave.samples, np.cos(2 * np.pi * 1024 * k / 8192), atol=1e-12)

    def test_quadrature_symbol(self):
        wave = upconvert(1j, GRID).render(GRID, 1)
        assert wave.samples[0] == pytest.approx(np.cos(np.pi / 2), abs=1e-15)

    def test_eighth_turn_symbol_sample_one(self):
        # oracle: evaluate the cosine directly at t = 1/8192
        x = np.exp(1j * np.pi / 4)
        wave = upconvert(x, GRID).render(GRID, 1)
        expected = np.cos(2 * np.pi * 1024 / 8192 + np.pi / 4)
        assert expected == pytest.approx(0.0, abs=1e-15)  # cos(pi/2)
        assert wave.samples[1] == pytest.approx(expected, abs=1e-12)

    def test_non_unit_symbol_rejected(self):
        with pytest.raises(ValueError):
            upconvert(2.0, GRID)


class TestPropagate:
    def test_identity_link(self):
        tones = upconvert(np.exp(0.3j), GRID)
        out = propagate_single_path(tones, SinglePathLink(gain=1.0, delay=0.0))
        assert out.tones == tones.tones

    def test_single_tone_delay_matches_time_shift(self):
        # |h| cos(2*pi*fc*(t - tau) + theta) evaluated directly as the oracle
        theta, gain, tau = 0.7, 0.6, 0.251953125
        out = propagate_single_path(upconvert(np.exp(1j * theta), GRID),
                                    SinglePathLink(gain=gain, delay=tau))
        wave = out.render(GRID, 1)
        t = wave.times()
        np.testing.assert_allclose(
            wave.samples, gain * np.cos(2 * np.pi * 1024 * (t - tau) + theta), atol=1e-12)

    def test_two_hop_phase_structure(self):
        # after mixing, the second hop rotates each image at its own carrier
        theta, tau_h, tau_g, fr = 0.4, 0.37, 0.81, 32
        at_surface = propagate_single_path(upconvert(np.exp(1j * theta), GRID),
                                           SinglePathLink(gain=0.5, delay=tau_h))
        reflected = frm_reflect(at_surface, fr, GRID)
        received = propagate_single_path(reflected, SinglePathLink(gain=0.25, delay=tau_g))
        by_freq = {t.frequency: t for t in received.tones}
        fc = GRID.carrier
        for sign in (1, -1):
            tone = by_freq[fc + sign * fr]
            assert tone.amplitude == pytest.approx(0.5 * 0.5 * 0.25, abs=1e-15)
            expected_phase = theta - 2 * np.pi * fc * tau_h - 2 * np.pi * (fc + sign * fr) * tau_g
            assert np.angle(np.exp(1j * (tone.phase - expected_phase))) == pytest.approx(0.0, abs=1e-12)


class TestFrmReflect:
    def test_tone_split(self):
        out = frm_reflect(ToneSum([Tone(1.0, 1024.0, 0.0)]), 32, GRID)
        freqs = sorted(t.frequency for t in out.tones)
        assert freqs == [992.0, 1056.0]
        assert all(t.amplitude == 0.5 for t in out.tones)

    def test_zero_mixing_is_identity(self):
        src = ToneSum([Tone(1.0, 1024.0, 0.3)])
        assert frm_reflect(src, 0, GRID).tones == src.tones

    def test_mixing_at_carrier_rejected(self):
        with pytest.raises(ConfigurationError):
            frm_reflect(ToneSum([Tone(1.0, 1024.0, 0.0)]), 1024, GRID)

    def test_energy_halves(self):
        # numeric mean-square over an integer window as the oracle
        src = upconvert(1.0, GRID)
        in_ms = np.mean(src.render(GRID, 1).samples ** 2)
        out_ms = np.mean(frm_reflect(src, 32, GRID).render(GRID, 1).samples ** 2)
        assert out_ms == pytest.approx(0.5 * in_ms, rel=1e-9)


class TestIqDemodLowpass:
    def test_direct_path_constant(self):
        wave = upconvert(1.0, GRID).render(GRID, 3)
        bb = iq_demod_lowpass(wave, GRID, cutoff=64.0)
        steady = bb.samples[2000:-2000]
        np.testing.assert_allclose(steady, np.ones_like(steady), atol=2e-4)

    def test_reflected_only_pure_mixing_tone(self):
        fr = 32
        reflected = frm_reflect(upconvert(1.0, GRID), fr, GRID)
        bb = iq_demod_lowpass(reflected.render(GRID, 3), GRID, cutoff=64.0)
        t = bb.times()[3000:-3000]
        steady = bb.samples[3000:-3000]
        np.testing.assert_allclose(steady, np.cos(2 * np.pi * fr * t), atol=5e-4)

    def test_passband_ripple_of_default_filter(self):
        # oracle: measure the filter's frequency response at the tone offsets
        taps = lowpass_taps(64.0, GRID.sample_rate, 1025)
        response = filter_response(taps, np.array([0.0, 32.0, -32.0]), GRID.sample_rate)
        assert np.max(np.abs(response - 1.0)) < 1e-4

    def test_cutoff_validation(self):
        wave = upconvert(1.0, GRID).render(GRID, 3)
        with pytest.raises(ConfigurationError):
            iq_demod_lowpass(wave, GRID, cutoff=1024.0)
        with pytest.raises(ConfigurationError):
            lowpass_taps(0.0, GRID.sample_rate)
        with pytest.raises(ConfigurationError):
            lowpass_taps(64.0, GRID.sample_rate, num_taps=1024)  # even


class TestExtractTones:
    def test_constant_waveform(self):
        c = 0.7 - 0.2j
        bb = BasebandWaveform(samples=np.full(8192, c), sample_rate=8192)
        out = extract_tones(bb, [0.0, 32.0, -32.0])
        assert out[0.0] == pytest.approx(c, abs=1e-12)
        assert abs(out[32.0]) < 1e-12
        assert abs(out[-32.0]) < 1e-12

    def test_non_integer_period_rejected(self):
        bb = BasebandWaveform(samples=np.zeros(8192), sample_rate=8192)
        with pytest.raises(PreconditionError):
            extract_tones(bb, [0.5])

    def test_close_offsets_rejected(self):
        bb = BasebandWaveform(samples=np.zeros(8192 * 2), sample_rate=8192)
        with pytest.raises(PreconditionError):
            extract_tones(bb, [0.0, 0.5])

    def test_respects_absolute_time(self):
        # a tone's projection must not depend on where the window starts
        f = 16.0
        t0 = 3.0 + 5000 / 8192.0
        t = t0 + np.arange(8192) / 8192.0
        bb = BasebandWaveform(samples=np.exp(1j * (2 * np.pi * f * t + 0.37)),
                              sample_rate=8192, start_time=t0)
        out = extract_tones(bb, [f])
        assert out[f] == pytest.approx(np.exp(0.37j), abs=1e-12)


class TestSimulateLink:
    def test_unit_scene(self):
        out = simulate_link(one_reflector_scene(), 1.0)
        assert out[0.0] == pytest.approx(1.0, abs=1e-3)
        assert out[32.0] == pytest.approx(0.5, abs=1e-3)
        assert out[-32.0] == pytest.approx(0.5, abs=1e-3)

    def test_randomized_scenes_match_closed_form(self):
        rng = np.random.default_rng(42)
        for _ in range(10):
            scene = one_reflector_scene(
                direct=(rng.uniform(0.1, 2.0), rng.uniform(0.0, 1.0)),
                surface=(rng.uniform(0.1, 2.0), rng.uniform(0.0, 1.0)),
                receiver=(rng.uniform(0.1, 2.0), rng.uniform(0.0, 1.0)),
                mixing=8 * int(rng.integers(1, 33)),
            )
            x = np.exp(1j * rng.uniform(0.0, 2 * np.pi))
            out = simulate_link(scene, x)
            expected = closed_form_readout(scene, x)
            for f, value in expected.items():
                assert abs(out[f] - value) / abs(value) < 1e-3

    def test_direct_bin_ignores_mixing_frequency(self):
        readouts = [simulate_link(one_reflector_scene(mixing=fr), 1.0)[0.0]
                    for fr in (16, 64, 128)]
        assert max(abs(r - readouts[0]) for r in readouts) < 1e-3

    def test_image_bins_ignore_direct_delay(self):
        base = one_reflector_scene(direct=(0.8, 0.125))
        moved = one_reflector_scene(direct=(0.8, 0.625))
        a = simulate_link(base, 1.0)
        b = simulate_link(moved, 1.0)
        assert abs(a[32.0] - b[32.0]) / abs(a[32.0]) < 1e-3
        assert abs(a[-32.0] - b[-32.0]) / abs(a[-32.0]) < 1e-3

    def test_phase_and_magnitude_laws(self):
        tau_g, fr = 0.613, 48
        scene = one_reflector_scene(surface=(0.7, 0.21), receiver=(0.9, tau_g), mixing=fr)
        x = np.exp(0.3j)
        out = simulate_link(scene, x)
        phase_gap = np.angle(out[float(fr)]) - np.angle(out[float(-fr)])
        expected = -4 * np.pi * fr * tau_g
        assert np.angle(np.exp(1j * (phase_gap - expected))) == pytest.approx(0.0, abs=1e-3)
        assert abs(out[float(fr)]) == pytest.approx(0.5 * 0.7 * 0.9, rel=1e-3)
        assert abs(out[float(-fr)]) == pytest.approx(0.5 * 0.7 * 0.9, rel=1e-3)

    def test_linearity_in_symbol(self):
        scene = one_reflector_scene(direct=(1.1, 0.3), surface=(0.6, 0.2),
                                    receiver=(0.5, 0.7))
        base = simulate_link(scene, 1.0)
        scale = np.exp(1j * 1.1)
        scaled = simulate_link(scene, scale)
        for f in base:
            assert scaled[f] == pytest.approx(scale * base[f], rel=1e-10)

    def test_two_reflectors_give_five_bins(self):
        scene = LinkScene(
            direct=SinglePathLink(1.0, 0.1),
            reflectors=(
                Reflector(SinglePathLink(0.8, 0.2), SinglePathLink(0.7, 0.3), mixing=8),
                Reflector(SinglePathLink(0.6, 0.4), SinglePathLink(0.5, 0.5), mixing=16),
            ),
            grid=GRID,
        )
        x = np.exp(0.2j)
        out = simulate_link(scene, x)
        assert sorted(out) == [-16.0, -8.0, 0.0, 8.0, 16.0]
        expected = closed_form_readout(scene, x)
        for f, value in expected.items():
            assert abs(out[f] - value) / abs(value) < 1e-3

    def test_duplicate_mixing_rejected(self):
        with pytest.raises(ConfigurationError):
            LinkScene(
                direct=SinglePathLink(1.0, 0.0),
                reflectors=(
                    Reflector(SinglePathLink(1.0, 0.0), SinglePathLink(1.0, 0.0), mixing=8),
                    Reflector(SinglePathLink(1.0, 0.0), SinglePathLink(1.0, 0.0), mixing=8),
                ),
                grid=GRID,
            )


class TestLinkValidation:
    def test_negative_gain_rejected(self):
        with pytest.raises(ValueError):
            SinglePathLink(gain=-0.1, delay=0.0)

    def test_delay_outside_symbol_rejected(self):
        with pytest.raises(ValueError):
            SinglePathLink(gain=1.0, delay=1.0)
