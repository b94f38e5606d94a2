"""Fiber attenuation and chromatic dispersion.

The transfer function is applied with ordinary frequency ``f`` (Hz) and the
``exp(-j 2 pi f t)`` forward-transform sign used by :mod:`numpy.fft`:

    H(f) = a * exp(j b0) * exp(j L b1 f) * exp(j L (b2/2) f^2),   b2 = 2 pi lambda^2 D / c

With this convention a Gaussian ``exp(-t^2 / 2 T0^2)`` leaves the fiber as
``(T0/d) exp(-t^2 / 2 d^2)`` with ``d^2 = T0^2 - j lambda^2 D L / (2 pi c)``;
``tests/test_fiber.py`` locks the two together.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.constants import c as C_LIGHT

from .waveform import DenseWaveform

REAL_RESIDUE = 1e-6


@dataclass(frozen=True)
class FiberParams:
    length_km: float = 0.0
    alpha_db_per_km: float = 0.0
    dispersion_ps_nm_km: float = 17.0
    wavelength_nm: float = 1550.0
    beta0: float = 0.0
    beta1_s_per_km: float = 0.0
    attenuation: Literal["field", "intensity"] = "field"

    def __post_init__(self):
        if self.length_km < 0:
            raise ValueError("fiber length must be >= 0")
        if self.alpha_db_per_km < 0:
            raise ValueError("attenuation must be >= 0")
        if self.attenuation not in ("field", "intensity"):
            raise ValueError("attenuation convention must be 'field' or 'intensity'")

    @property
    def length_m(self) -> float:
        return self.length_km * 1e3

    @property
    def dispersion_si(self) -> float:
        """D in s/m^2."""
        return self.dispersion_ps_nm_km * 1e-12 / (1e-9 * 1e3)

    @property
    def wavelength_m(self) -> float:
        return self.wavelength_nm * 1e-9

    @property
    def beta2(self) -> float:
        """2 pi lambda^2 D / c in s^2/m."""
        return 2.0 * np.pi * self.wavelength_m**2 * self.dispersion_si / C_LIGHT

    @property
    def amplitude_factor(self) -> float:
        """Sampled-signal gain; intensity drops as 10^(-alpha L / 10)."""
        loss_db = self.alpha_db_per_km * self.length_km
        if self.attenuation == "field":
            return 10.0 ** (-loss_db / 20.0)
        return 10.0 ** (-loss_db / 10.0)

    def transfer(self, f: np.ndarray) -> np.ndarray:
        """H(f) = a exp(j(beta0 + L beta1 f + L beta2 f^2 / 2)), f in Hz.

        With numpy's FFT sign convention the beta1 term moves the waveform
        earlier by ``L beta1 / (2 pi)``.
        """
        phase = self.beta0 + self.length_km * self.beta1_s_per_km * f + self.length_m * 0.5 * self.beta2 * f**2
        return self.amplitude_factor * np.exp(1j * phase)

    def dispersion_spread(self) -> float:
        """sqrt(|lambda^2 D L / (2 pi c)|): the broadening scale of a short pulse, seconds."""
        return float(np.sqrt(abs(self.wavelength_m**2 * self.dispersion_si * self.length_m / (2 * np.pi * C_LIGHT))))


def _padding(x: DenseWaveform, params: FiberParams) -> int:
    widths = 8.0 * max(x.period, params.dispersion_spread())
    return int(np.ceil(widths / x.dt))


def apply_channel(x: DenseWaveform, params: FiberParams) -> DenseWaveform:
    """Filter a waveform through the fiber in the frequency domain.

    The waveform is zero-padded by eight pulse widths per side to keep circular
    wrap out of the returned window.  The result stays real when the imaginary
    part is below 1e-6 of the peak magnitude; check ``.is_complex`` otherwise.
    """
    if x.samples.size < 2:
        raise ValueError("waveform must have at least two samples")
    pad = _padding(x, params)
    n = x.samples.size + 2 * pad
    nfft = 1 << int(np.ceil(np.log2(n)))
    buf = np.zeros(nfft, dtype=complex)
    buf[pad:pad + x.samples.size] = x.samples
    f = np.fft.fftfreq(nfft, d=x.dt)
    out = np.fft.ifft(np.fft.fft(buf) * params.transfer(f))[pad:pad + x.samples.size]
    peak = np.max(np.abs(out)) if out.size else 0.0
    if peak == 0.0 or np.max(np.abs(out.imag)) <= REAL_RESIDUE * peak:
        out = out.real.copy()
    return x.with_samples(out)


def dispersed_gaussian(t0_width: float, params: FiberParams, t) -> np.ndarray:
    """Closed-form fiber output for a unit-peak Gaussian input (no attenuation)."""
    if t0_width <= 0:
        raise ValueError("T0 must be positive")
    delta2 = t0_width**2 - 1j * params.wavelength_m**2 * params.dispersion_si * params.length_m / (2 * np.pi * C_LIGHT)
    delta = np.sqrt(delta2)
    t = np.asarray(t, dtype=float)
    return (t0_width / delta) * np.exp(-0.5 * t**2 / delta2)


def received_gaussian(t0_width: float, params: FiberParams):
    """Callable received pulse including attenuation, for equalizer design."""
    gain = params.amplitude_factor

    def g(t):
        return gain * dispersed_gaussian(t0_width, params, t)

    return g
