import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from winsim.impairments import NoiseSpec, QuantizerSpec, realize_clock
from winsim.multicoset import MulticosetConfig, interleave, interpolate, lowpass, sample_multicoset, sampling_instants
from winsim.waveform import DenseWaveform, PulseShape, generate_symbols, placed_pulse, render_pam
from winsim.window import SampleFrames

T = 50e-12
M = 8


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 3))
def test_rectangular_round_trip_exact(seed, bits):
    s = generate_symbols(10 * M, bits, seed, T)
    x = render_pam(s, PulseShape.rectangular(T), 16)
    fr = sample_multicoset(x, MulticosetConfig(M, T))
    assert np.array_equal(interleave(fr), s.values)


def test_equals_single_adc_nyquist_sampling():
    s = generate_symbols(12 * M, 1, 2, T)
    x = render_pam(s, PulseShape.led(T, T / 10), 32)
    fr = sample_multicoset(x, MulticosetConfig(M, T), n_frames=12)
    assert np.array_equal(interleave(fr), x.nyquist_samples(12 * M))


def test_interleave_definition():
    fr = SampleFrames(np.array([[1.0, 3.0], [2.0, 4.0]]), 2 * T)
    assert np.array_equal(interleave(fr), [1, 2, 3, 4])
    one = SampleFrames(np.array([[5.0, 6.0, 7.0]]), T)
    assert np.array_equal(interleave(one), [5, 6, 7])


def test_channel_lowpass_distorts_full_band_signal():
    s = generate_symbols(32 * M, 1, 3, T)
    x = render_pam(s, PulseShape.rectangular(T), 32)
    b = 1 / (2 * M * T)
    fr = sample_multicoset(x, MulticosetConfig(M, T, lpf_bandwidth=b))
    err = np.mean((interleave(fr) - s.values) ** 2)
    assert err > 0.1
    # the brick-wall filter itself keeps in-band content intact
    f0 = 0.3 * b
    t = x.times
    tone = x.with_samples(np.cos(2 * np.pi * f0 * t) * np.hanning(t.size))
    assert np.max(np.abs(lowpass(tone, 10 * f0).samples - tone.samples)) < 1e-3


def test_per_sample_noise_variance():
    n = 100_000 // M
    x = DenseWaveform(np.zeros(n * M * 8), 8, 0.0, T / 8)
    n0 = 1e-12
    unit = sample_multicoset(x, MulticosetConfig(M, T, noise_bandwidth=1.0), noise=NoiseSpec(n0, 1)).y
    assert np.var(unit) == pytest.approx(n0, rel=0.03)
    grid = sample_multicoset(x, MulticosetConfig(M, T), noise=NoiseSpec(n0, 1)).y
    assert np.var(grid) == pytest.approx(n0 / x.dt, rel=0.03)
    cfg = MulticosetConfig(M, T, lpf_bandwidth=1e9)
    assert cfg.sample_noise_variance(n0, x.dt) == pytest.approx(n0 * 2e9)


def test_config_validation():
    with pytest.raises(ValueError):
        MulticosetConfig(0, T)
    with pytest.raises(ValueError):
        MulticosetConfig(M, T, lpf_bandwidth=-1.0)
    with pytest.raises(ValueError):
        MulticosetConfig(M, T, noise_bandwidth=0.0)
    cfg = MulticosetConfig(M, T)
    assert np.allclose(cfg.delays, T * np.arange(M))
    assert cfg.frame_period == pytest.approx(M * T)


def test_rejects_bad_inputs():
    x = render_pam(generate_symbols(2 * M, 1, 0, T), PulseShape.rectangular(T), 4)
    with pytest.raises(ValueError):
        sample_multicoset(x, MulticosetConfig(M, T))  # osr too small
    x = render_pam(generate_symbols(2 * M, 1, 0, T), PulseShape.rectangular(T), 8)
    with pytest.raises(ValueError):
        sample_multicoset(x, MulticosetConfig(M, 2 * T))
    with pytest.raises(ValueError):
        sample_multicoset(x, MulticosetConfig(M, T), n_frames=3)


def test_quantizer_applied():
    s = generate_symbols(4 * M, 2, 0, T)
    x = render_pam(s, PulseShape.rectangular(T), 8)
    q = QuantizerSpec(2, 4.0)
    fr = sample_multicoset(x, MulticosetConfig(M, T), quant=q)
    assert set(np.unique(fr.y)) <= {-1.5, -0.5, 0.5, 1.5}
    assert fr.clipped == 0


def test_catmull_rom_accuracy_on_gaussian():
    g = PulseShape.gaussian_fwhm(T, T / 2)
    dt = T / 32
    t = dt * np.arange(-192, 192)
    x = DenseWaveform(placed_pulse(g, t), 32, t[0], dt)
    ti = np.random.default_rng(0).uniform(-2 * T, 2 * T, 500)
    assert np.max(np.abs(interpolate(x, ti) - placed_pulse(g, ti))) < 2e-4
    with pytest.raises(ValueError):
        interpolate(x, np.array([t[-1] + dt]))


def test_jitter_error_is_first_order_in_offset():
    # error ~ offset * x'(t) for small p on a smooth pulse
    s = generate_symbols(200 * M, 1, 4, T)
    x = render_pam(s, PulseShape.gaussian_fwhm(T, T / 2), 32)
    cfg = MulticosetConfig(M, T)
    ideal = interleave(sample_multicoset(x, cfg, n_frames=200))
    deriv = np.gradient(x.samples, x.dt)
    dx = x.with_samples(deriv)
    rms = []
    for p in (1e-6, 2e-6, 4e-6):
        clock = realize_clock(200 * M + 1, T, M * T, p, 6, restart=M)
        err = interleave(sample_multicoset(x, cfg, clock=clock, n_frames=200)) - ideal
        t_nom = sampling_instants(cfg, None, 200).T.reshape(-1)
        pred = clock.offsets()[: err.size] * interpolate(dx, t_nom)
        slope = np.dot(err, pred) / np.dot(pred, pred)
        assert slope == pytest.approx(1.0, abs=0.02)
        rms.append(np.sqrt(np.mean(err**2)))
    assert rms[1] / rms[0] == pytest.approx(2.0, rel=0.02)
    assert rms[2] / rms[1] == pytest.approx(2.0, rel=0.02)


def test_sampling_instants_layout():
    cfg = MulticosetConfig(4, T)
    t = sampling_instants(cfg, None, 3)
    assert t.shape == (4, 3)
    assert t[1, 2] == pytest.approx((2 * 4 + 1 + 0.5) * T)
