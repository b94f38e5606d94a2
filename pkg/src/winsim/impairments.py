"""Thermal noise, uniform quantization and the random-walk sampling clock."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .waveform import DenseWaveform


@dataclass(frozen=True)
class NoiseSpec:
    """White noise with two-sided spectral density ``n0`` (V^2 s)."""

    n0: float
    rng_seed: object = 0

    def __post_init__(self):
        if self.n0 < 0:
            raise ValueError("N0 must be >= 0")

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.rng_seed)


def gaussian(rng: np.random.Generator, shape, complex_valued: bool) -> np.ndarray:
    """Unit-variance real or circular complex normal draws."""
    if complex_valued:
        return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
    return rng.standard_normal(shape)


def add_thermal_noise(x: DenseWaveform, spec: NoiseSpec) -> DenseWaveform:
    """Add grid noise of variance ``N0/dt`` per point.

    Any integral of the noisy grid over length ``Ts`` then has variance
    ``N0 * Ts``; a complex waveform gets circular noise of the same total power.
    """
    if spec.n0 == 0:
        return x
    noise = np.sqrt(spec.n0 / x.dt) * gaussian(spec.rng(), x.samples.shape, x.is_complex)
    return x.with_samples(x.samples + noise)


@dataclass(frozen=True)
class QuantizerSpec:
    bits: int
    dynamic_range: float

    def __post_init__(self):
        if self.bits < 1:
            raise ValueError("quantizer needs at least one bit")
        if not self.dynamic_range > 0:
            raise ValueError("dynamic range must be positive")

    @property
    def step(self) -> float:
        return self.dynamic_range / 2**self.bits


def quantize(v, spec: QuantizerSpec):
    """Mid-rise uniform quantizer with levels ``(k + 1/2) q`` inside ``[-D/2, D/2]``.

    Complex input is quantized per component (an I/Q converter pair).
    """
    if np.iscomplexobj(v):
        return quantize(np.real(v), spec) + 1j * quantize(np.imag(v), spec)
    q = spec.step
    top = 0.5 * spec.dynamic_range - 0.5 * q
    out = q * (np.floor(np.asarray(v, dtype=float) / q) + 0.5)
    out = np.clip(out, -top, top)
    return out if np.ndim(out) else float(out)


def count_overload(v, spec: QuantizerSpec) -> int:
    """Samples beyond the quantizer's full scale (clipped by :func:`quantize`)."""
    half = 0.5 * spec.dynamic_range
    v = np.asarray(v)
    if np.iscomplexobj(v):
        return int(np.sum(np.abs(v.real) > half) + np.sum(np.abs(v.imag) > half))
    return int(np.sum(np.abs(v) > half))


def fit_dynamic_range(samples, nominal: float) -> float:
    """Full scale covering the observed samples, never below ``nominal``.

    Used when the quantizer is set over the dynamic range of the sampled signal
    rather than a fixed bound, so thermal noise is not clipped.
    """
    v = np.asarray(samples)
    peak = max(np.max(np.abs(v.real)), np.max(np.abs(v.imag)) if np.iscomplexobj(v) else 0.0) if v.size else 0.0
    return float(max(nominal, 2.0 * peak))


@dataclass(frozen=True)
class ClockRealization:
    """Clock edge instants ``edges[k]`` approximating ``k*T``."""

    edges: np.ndarray
    nominal_period: float
    rms_fraction: float
    reorders: int = 0

    def __len__(self) -> int:
        return self.edges.size

    @property
    def ideal(self) -> bool:
        return self.rms_fraction == 0

    def offsets(self) -> np.ndarray:
        return self.edges - self.nominal_period * np.arange(self.edges.size)


def walk_variance(T: float, Ts: float, p: float) -> float:
    """Per-step variance C = (T^3/Ts) p^2 giving RMS p*T over one frame."""
    return T**3 / Ts * p**2


def realize_clock(count: int, T: float, Ts: float, p: float, rng_seed, restart: int | None = None) -> ClockRealization:
    """Random-walk clock ``t_k = kT + sum_{n<k} sqrt(C) w_n``.

    ``restart`` re-anchors the walk every ``restart`` edges (edges at multiples
    of ``restart`` are exact), modelling a jitter-free frame-rate reference.
    Edges that would invert order are re-sorted and counted in ``reorders``.
    """
    if count < 1:
        raise ValueError("clock needs at least one edge")
    if not 0 <= p < 0.5:
        raise ValueError(f"jitter fraction p must be in [0, 0.5), got {p}")
    nominal = T * np.arange(count)
    if p == 0:
        return ClockRealization(nominal, T, 0.0)
    rng = np.random.default_rng(rng_seed)
    steps = np.sqrt(walk_variance(T, Ts, p)) * rng.standard_normal(count)
    offsets = np.empty(count)
    offsets[0] = 0.0
    if restart is None:
        offsets[1:] = np.cumsum(steps[:-1])
    else:
        if restart < 1:
            raise ValueError("restart period must be >= 1")
        nblk = -(-count // restart)
        blocks = np.zeros(nblk * restart)
        blocks[:count] = steps
        blocks = blocks.reshape(nblk, restart)
        walk = np.zeros_like(blocks)
        walk[:, 1:] = np.cumsum(blocks[:, :-1], axis=1)
        offsets = walk.reshape(-1)[:count]
    edges = nominal + offsets
    reorders = int(np.sum(np.diff(edges) <= 0))
    if reorders:
        edges = np.sort(edges)
    return ClockRealization(edges, T, p, reorders)


def ideal_clock(count: int, T: float) -> ClockRealization:
    return ClockRealization(T * np.arange(count), T, 0.0)
