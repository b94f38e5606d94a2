"""Closed-form SNR of both samplers and the empirical error metrics."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .waveform import SymbolStream


@dataclass(frozen=True)
class SnrModel:
    """Parameters of the reconstruction-SNR formulas.

    ``bits_sample = None`` drops the quantization term.  ``noise_bandwidth`` is
    the multicoset sampler's equivalent noise bandwidth: its per-sample thermal
    variance is ``n0 * noise_bandwidth`` (1.0 treats ``n0`` as that variance).
    """

    system: Literal["window", "multicoset"]
    sigma_x2: float
    n0: float
    T: float
    L: int
    bits_in: int
    bits_sample: int | None
    noise_bandwidth: float = 1.0

    def __post_init__(self):
        if self.system not in ("window", "multicoset"):
            raise ValueError(f"unknown system {self.system!r}")
        if self.sigma_x2 <= 0 or self.n0 < 0 or self.T <= 0 or self.L < 1:
            raise ValueError("invalid SNR model parameters")


def _quant_term(bits_in: int, bits_sample: int | None) -> float:
    if bits_sample is None:
        return 0.0
    return 2.0 ** (2 * (bits_in - bits_sample)) / 12.0


def snr_window(m: SnrModel) -> float:
    """sigma_x^2 / (N0/T + 2^(2(Bin-Bs)) L / 12)."""
    denom = m.n0 / m.T + _quant_term(m.bits_in, m.bits_sample) * m.L
    return np.inf if denom == 0 else m.sigma_x2 / denom


def snr_multicoset(m: SnrModel) -> float:
    """sigma_x^2 / (N0 B + 2^(2(Bin-Bs)) / 12)."""
    denom = m.n0 * m.noise_bandwidth + _quant_term(m.bits_in, m.bits_sample)
    return np.inf if denom == 0 else m.sigma_x2 / denom


def snr(m: SnrModel) -> float:
    return snr_window(m) if m.system == "window" else snr_multicoset(m)


def db(x) -> np.ndarray:
    return 10.0 * np.log10(x)


def mse(a, b) -> float:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    return float(np.mean(np.abs(a - b) ** 2))


def gray_code(indices: np.ndarray) -> np.ndarray:
    return indices ^ (indices >> 1)


def symbol_bits(stream: SymbolStream) -> np.ndarray:
    """(N, B) bit matrix; natural binary for OOK, Gray for B >= 2."""
    idx = stream.indices
    if stream.bits_per_symbol >= 2:
        idx = gray_code(idx)
    shifts = np.arange(stream.bits_per_symbol - 1, -1, -1)
    return (idx[:, None] >> shifts[None, :]) & 1


def bit_errors(tx: SymbolStream, rx: SymbolStream) -> int:
    if len(tx) != len(rx) or tx.bits_per_symbol != rx.bits_per_symbol:
        raise ValueError("streams must match in length and bits per symbol")
    return int(np.sum(symbol_bits(tx) != symbol_bits(rx)))


def ber(tx: SymbolStream, rx: SymbolStream) -> float:
    return bit_errors(tx, rx) / (len(tx) * tx.bits_per_symbol)
