"""PAM symbol generation and pulse rendering on an oversampled grid.

Time conventions used throughout the package:

* symbol ``k`` owns the Nyquist interval ``[kT, (k+1)T)``;
* a :class:`DenseWaveform` stores point samples at ``t0 + i*dt`` with
  ``dt = T/osr`` and ``t0`` a whole number of symbol periods, so Nyquist
  interval ``k`` is exactly the grid block ``[(k - t0/T)*osr, ...)``;
* the "Nyquist sample" of symbol ``k`` is the waveform value at mid-interval,
  ``kT + T/2``, which is a grid point for even ``osr``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy.integrate import trapezoid

TAIL_REL = 1e-9
# Gaussian tails are cheap to keep; cutting deeper keeps rendered grids exact to ~1e-13.
GAUSS_TAIL_REL = 1e-13

PulseKind = Literal["rectangular", "led", "gaussian", "laser"]


def pam_levels(bits_per_symbol: int) -> np.ndarray:
    """The ``2**B`` equispaced signed amplitudes spanning ``[-2**(B-1), 2**(B-1)]``."""
    half = 2.0 ** (bits_per_symbol - 1)
    return np.linspace(-half, half, 2**bits_per_symbol)


@dataclass(frozen=True)
class SymbolStream:
    """PAM symbols stored as level indices ``0 .. 2**B - 1``.

    ``values`` maps the indices onto :func:`pam_levels`; for 4-PAM the levels
    are ``-2, -2/3, 2/3, 2`` which is why the integer field holds indices.
    """

    indices: np.ndarray
    bits_per_symbol: int
    symbol_period: float

    def __post_init__(self):
        idx = np.asarray(self.indices)
        if idx.ndim != 1 or idx.size < 1:
            raise ValueError("a symbol stream needs at least one symbol")
        if not 1 <= self.bits_per_symbol <= 16:
            raise ValueError(f"bits_per_symbol must be in [1, 16], got {self.bits_per_symbol}")
        if idx.min() < 0 or idx.max() >= 2**self.bits_per_symbol:
            raise ValueError("symbol index outside the level set")
        object.__setattr__(self, "indices", idx.astype(np.int64))

    def __len__(self) -> int:
        return self.indices.size

    @property
    def levels(self) -> np.ndarray:
        return pam_levels(self.bits_per_symbol)

    @property
    def values(self) -> np.ndarray:
        return self.levels[self.indices]

    @classmethod
    def from_values(cls, values, bits_per_symbol: int, symbol_period: float) -> "SymbolStream":
        levels = pam_levels(bits_per_symbol)
        values = np.atleast_1d(np.asarray(values, dtype=float))
        idx = np.argmin(np.abs(values[:, None] - levels[None, :]), axis=1)
        if not np.allclose(levels[idx], values, rtol=0, atol=1e-12):
            raise ValueError("values are not on the PAM level set")
        return cls(idx, bits_per_symbol, symbol_period)


def generate_symbols(count: int, bits_per_symbol: int, rng_seed, symbol_period: float = 1.0) -> SymbolStream:
    """Uniform i.i.d. symbols; ``rng_seed`` is anything ``np.random.default_rng`` accepts."""
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    if not 1 <= bits_per_symbol <= 16:
        raise ValueError(f"bits_per_symbol must be in [1, 16], got {bits_per_symbol}")
    rng = np.random.default_rng(rng_seed)
    idx = rng.integers(0, 2**bits_per_symbol, size=count)
    return SymbolStream(idx, bits_per_symbol, symbol_period)


@dataclass(frozen=True)
class PulseShape:
    """Transmit pulse ``g_T``.

    ``scale`` multiplies the raw shape.  When left as ``None`` it is chosen so
    the pulse area equals ``T`` (rectangular and LED pulses come out at exactly
    1); Gaussian pulses keep unit peak so the dispersed closed form applies
    unchanged.
    """

    kind: PulseKind
    period: float
    tau: float | None = None
    t0_width: float | None = None
    table_t: np.ndarray | None = field(default=None, repr=False)
    table_g: np.ndarray | None = field(default=None, repr=False)
    scale: float | None = None

    def __post_init__(self):
        if self.period <= 0:
            raise ValueError("pulse period must be positive")
        if self.kind == "led" and not (self.tau and self.tau > 0):
            raise ValueError("LED pulse requires tau > 0")
        if self.kind == "gaussian" and not (self.t0_width and self.t0_width > 0):
            raise ValueError("Gaussian pulse requires T0 > 0")
        if self.kind == "laser":
            if self.table_t is None or self.table_g is None:
                raise ValueError("laser pulse requires a (t, g) lookup table")
            tt = np.asarray(self.table_t, dtype=float)
            gg = np.asarray(self.table_g, dtype=float)
            if tt.shape != gg.shape or tt.size < 2 or np.any(np.diff(tt) <= 0):
                raise ValueError("laser table needs >= 2 strictly increasing time points")
            object.__setattr__(self, "table_t", tt)
            object.__setattr__(self, "table_g", gg)
        if self.kind not in ("rectangular", "led", "gaussian", "laser"):
            raise ValueError(f"unknown pulse kind {self.kind!r}")
        if self.scale is None:
            object.__setattr__(self, "scale", self._area_scale())

    @classmethod
    def rectangular(cls, period: float) -> "PulseShape":
        return cls("rectangular", period)

    @classmethod
    def led(cls, period: float, tau: float) -> "PulseShape":
        return cls("led", period, tau=tau)

    @classmethod
    def gaussian(cls, period: float, t0_width: float) -> "PulseShape":
        return cls("gaussian", period, t0_width=t0_width)

    @classmethod
    def gaussian_fwhm(cls, period: float, fwhm: float) -> "PulseShape":
        return cls.gaussian(period, fwhm / (2.0 * np.sqrt(2.0 * np.log(2.0))))

    @classmethod
    def laser(cls, period: float, t, g) -> "PulseShape":
        return cls("laser", period, table_t=np.asarray(t), table_g=np.asarray(g))

    @property
    def center_offset(self) -> float:
        """Shift applied when placing the pulse inside its Nyquist interval."""
        return 0.5 * self.period if self.kind == "gaussian" else 0.0

    def _area_scale(self) -> float:
        T = self.period
        if self.kind in ("rectangular", "led"):
            # LED area: T - tau(1-e^{-T/tau}) on the rise plus the same on the decay.
            return 1.0
        if self.kind == "gaussian":
            return 1.0
        return T / trapezoid(self.table_g, self.table_t)

    def support(self) -> tuple[float, float]:
        """Interval (relative to the pulse's own origin) outside which |g| is negligible.

        The LED tail is cut at 1e-9 of the peak, the Gaussian at 1e-13.
        """
        T = self.period
        if self.kind == "rectangular":
            return 0.0, T
        if self.kind == "led":
            peak = 1.0 - np.exp(-T / self.tau)
            return 0.0, T + self.tau * np.log(peak / TAIL_REL)
        if self.kind == "gaussian":
            half = self.t0_width * np.sqrt(2.0 * np.log(1.0 / GAUSS_TAIL_REL))
            return -half, half
        return float(self.table_t[0]), float(self.table_t[-1])


def eval_pulse(shape: PulseShape, t) -> np.ndarray:
    """Raw pulse value (without ``scale``) in the pulse's own time origin.

    The LED pulse is the charging curve ``1 - exp(-t/tau)`` over ``[0, T)``
    followed by exponential discharge, i.e. the response of the LED time
    constant to one rectangular symbol.
    """
    t = np.asarray(t, dtype=float)
    T = shape.period
    if shape.kind == "rectangular":
        return ((t >= 0) & (t < T)).astype(float)
    if shape.kind == "gaussian":
        return np.exp(-0.5 * (t / shape.t0_width) ** 2)
    if shape.kind == "led":
        tau = shape.tau
        rise = -np.expm1(-np.clip(t, 0.0, None) / tau)
        fall = -np.expm1(-T / tau) * np.exp(-np.clip(t - T, 0.0, None) / tau)
        return np.where(t < 0, 0.0, np.where(t < T, rise, fall))
    return np.interp(t, shape.table_t, shape.table_g, left=0.0, right=0.0)


def placed_pulse(shape: PulseShape, t) -> np.ndarray:
    """Scaled pulse of symbol 0 as a function of absolute time."""
    return shape.scale * eval_pulse(shape, np.asarray(t, dtype=float) - shape.center_offset)


def nyquist_isi(shape: PulseShape, span: int = 4) -> np.ndarray:
    """Diagnostic: placed pulse at mid-interval instants ``nT + T/2``, n = -span..span.

    An ISI-free pulse returns a unit impulse at the centre.
    """
    n = np.arange(-span, span + 1)
    return placed_pulse(shape, (n + 0.5) * shape.period)


@dataclass(frozen=True)
class DenseWaveform:
    """Point samples ``samples[i] = x(t0 + i*dt)`` with ``dt = T/osr``."""

    samples: np.ndarray
    osr: int
    t0: float
    dt: float

    def __post_init__(self):
        if self.osr < 2:
            raise ValueError(f"osr must be >= 2, got {self.osr}")
        if self.samples.ndim != 1 or self.samples.size % self.osr:
            raise ValueError("waveform length must be a multiple of osr")

    @property
    def period(self) -> float:
        return self.dt * self.osr

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.samples)

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.samples.size)

    @property
    def lead_symbols(self) -> int:
        """Whole Nyquist intervals preceding t = 0."""
        return int(round(-self.t0 / self.period))

    def index_of(self, t: float) -> int:
        """Grid index of an instant that must lie on the grid."""
        pos = (t - self.t0) / self.dt
        i = int(round(pos))
        if abs(pos - i) > 1e-6:
            raise ValueError(f"instant {t!r} is not on the sample grid")
        return i

    def nyquist_samples(self, count: int) -> np.ndarray:
        """Values at ``kT + T/2`` for ``k = 0 .. count-1``."""
        if self.osr % 2:
            raise ValueError("mid-interval sampling needs an even osr")
        start = self.lead_symbols * self.osr + self.osr // 2
        idx = start + self.osr * np.arange(count)
        if idx[-1] >= self.samples.size:
            raise ValueError("waveform shorter than the requested symbol count")
        return self.samples[idx]

    def with_samples(self, samples: np.ndarray) -> "DenseWaveform":
        return DenseWaveform(samples, self.osr, self.t0, self.dt)


def render_pam(stream: SymbolStream, shape: PulseShape, osr: int = 32, padding: int = 0) -> DenseWaveform:
    """Superpose shifted pulses ``a_k g(t - kT)`` on the ``T/osr`` grid.

    The grid is padded by whole symbol periods on both sides to hold the pulse
    tails (truncated per :meth:`PulseShape.support`) plus ``padding`` extra
    periods, which is useful ahead of a dispersive channel.
    """
    if osr < 2:
        raise ValueError(f"osr must be >= 2, got {osr}")
    T = shape.period
    dt = T / osr
    lo, hi = shape.support()
    lo += shape.center_offset
    hi += shape.center_offset
    lead = max(0, int(np.ceil(-lo / T - 1e-9))) + padding
    tail = max(0, int(np.ceil((hi - T) / T - 1e-9))) + padding

    j_lo = int(np.floor(lo / dt))
    j_hi = int(np.ceil(hi / dt))
    kernel = placed_pulse(shape, np.arange(j_lo, j_hi + 1) * dt)

    n_sym = len(stream)
    n = (lead + n_sym + tail) * osr
    impulses = np.zeros(n_sym * osr)
    impulses[::osr] = stream.values
    full = np.convolve(impulses, kernel)
    # full[m] is x at grid offset (m + j_lo) relative to t = 0.
    out = np.zeros(n)
    first = lead * osr + j_lo
    a, b = max(first, 0), min(first + full.size, n)
    out[a:b] = full[a - first:b - first]
    return DenseWaveform(out, osr, -lead * T, dt)
