"""Multicoset (time-interleaved ADC) baseline front-end."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .impairments import ClockRealization, NoiseSpec, QuantizerSpec, count_overload, gaussian, quantize
from .waveform import DenseWaveform
from .window import SampleFrames


@dataclass(frozen=True)
class MulticosetConfig:
    """M delayed samplers at rate 1/(MT).

    ``noise_bandwidth`` is the equivalent noise bandwidth B of each sampler's
    front end, so a pointwise sample carries thermal variance ``N0 * B``.  When
    left as ``None`` it is the simulation grid rate ``1/dt``, i.e. exactly what
    pointwise sampling of :func:`~winsim.impairments.add_thermal_noise` output
    would see.  With an anti-aliasing filter of bandwidth ``b`` the noise
    bandwidth is capped at ``2b``.
    """

    channels: int
    symbol_period: float
    lpf_bandwidth: float | None = None
    noise_bandwidth: float | None = None

    def __post_init__(self):
        if self.channels < 1:
            raise ValueError("multicoset needs at least one channel")
        if self.lpf_bandwidth is not None and self.lpf_bandwidth <= 0:
            raise ValueError("LPF bandwidth must be positive")
        if self.noise_bandwidth is not None and self.noise_bandwidth <= 0:
            raise ValueError("noise bandwidth must be positive")

    @property
    def delays(self) -> np.ndarray:
        return self.symbol_period * np.arange(self.channels)

    @property
    def frame_period(self) -> float:
        return self.channels * self.symbol_period

    def sample_noise_variance(self, n0: float, dt: float) -> float:
        bw = self.noise_bandwidth if self.noise_bandwidth is not None else 1.0 / dt
        if self.lpf_bandwidth is not None:
            bw = min(bw, 2.0 * self.lpf_bandwidth)
        return n0 * bw


def lowpass(x: DenseWaveform, bandwidth: float) -> DenseWaveform:
    """Ideal brick-wall filter passing |f| <= bandwidth."""
    n = x.samples.size
    nfft = 1 << int(np.ceil(np.log2(2 * n)))
    spec = np.fft.fft(x.samples, nfft)
    spec[np.abs(np.fft.fftfreq(nfft, d=x.dt)) > bandwidth] = 0.0
    out = np.fft.ifft(spec)[:n]
    return x.with_samples(out if x.is_complex else out.real)


def interpolate(x: DenseWaveform, t: np.ndarray) -> np.ndarray:
    """Catmull-Rom cubic interpolation of the grid at arbitrary instants."""
    u = (np.asarray(t, dtype=float) - x.t0) / x.dt
    i = np.floor(u).astype(np.int64)
    s = u - i
    # Instants within 1e-9 of a grid point read the sample directly.
    snap = np.abs(s - np.round(s)) < 1e-9
    i = np.where(snap, np.round(u).astype(np.int64), i)
    s = np.where(snap, 0.0, s)
    n = x.samples.size
    on_grid_ok = (i >= 0) & (i < n)
    stencil_ok = (i >= 1) & (i + 2 < n)
    if not np.all(np.where(s > 0, stencil_ok, on_grid_ok)):
        raise ValueError("sampling instant outside the waveform")
    g = np.pad(x.samples, 2)
    i = i + 2
    p0, p1, p2, p3 = g[i - 1], g[i], g[i + 1], g[i + 2]
    return 0.5 * (
        2 * p1
        + (p2 - p0) * s
        + (2 * p0 - 5 * p1 + 4 * p2 - p3) * s**2
        + (3 * p1 - p0 - 3 * p2 + p3) * s**3
    )


def sampling_instants(cfg: MulticosetConfig, clock: ClockRealization | None, n_frames: int, start: float = 0.0) -> np.ndarray:
    """Instant of channel i in frame n: mid-interval of Nyquist slot nM+i, shifted by that slot's clock offset."""
    k = np.arange(n_frames * cfg.channels)
    t = start + (k + 0.5) * cfg.symbol_period
    if clock is not None and not clock.ideal:
        if len(clock) < k.size:
            raise ValueError(f"clock has {len(clock)} edges, need {k.size}")
        t = t + clock.offsets()[: k.size]
    return t.reshape(n_frames, cfg.channels).T


def sample_multicoset(
    x: DenseWaveform,
    cfg: MulticosetConfig,
    clock: ClockRealization | None = None,
    noise: NoiseSpec | None = None,
    quant: QuantizerSpec | None = None,
    start: float = 0.0,
    n_frames: int | None = None,
) -> SampleFrames:
    """Pointwise samples ``y[i, n] = x(nMT + iT + T/2 + jitter) + v``."""
    if not np.isclose(x.period, cfg.symbol_period, rtol=1e-9, atol=0.0):
        raise ValueError(f"waveform symbol period {x.period} != sampler period {cfg.symbol_period}")
    if x.osr < 8:
        raise ValueError("multicoset interpolation needs osr >= 8")
    first = x.index_of(start)
    avail = (x.samples.size - first) // (cfg.channels * x.osr)
    if n_frames is None:
        n_frames = avail
    if n_frames < 1 or n_frames > avail:
        raise ValueError(f"waveform holds {avail} whole frames after start, need {max(n_frames, 1)}")

    src = lowpass(x, cfg.lpf_bandwidth) if cfg.lpf_bandwidth is not None else x
    y = interpolate(src, sampling_instants(cfg, clock, n_frames, start))
    if noise is not None and noise.n0 > 0:
        sigma = np.sqrt(cfg.sample_noise_variance(noise.n0, x.dt))
        y = y + sigma * gaussian(noise.rng(), y.shape, x.is_complex)

    clipped = 0
    if quant is not None:
        clipped = count_overload(y, quant)
        y = quantize(y, quant)
    diag = {"reorders": clock.reorders if clock is not None else 0}
    return SampleFrames(y, cfg.frame_period, clipped, diag)


def interleave(frames: SampleFrames) -> np.ndarray:
    """Nyquist-rate stream ``s[nM + i] = y[i, n]``."""
    return frames.y.T.reshape(-1).copy()
