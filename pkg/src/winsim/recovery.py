"""Nyquist-sample recovery from WINDOW frames, MMSE equalization and slicing."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import qr, solve_triangular

from .waveform import SymbolStream, pam_levels
from .window import MixingBank, SampleFrames

MAX_CONDITION = 1e12


class EqualizerError(ValueError):
    """The MMSE normal equations are numerically singular."""


@dataclass(frozen=True)
class RecoveredStream:
    samples: np.ndarray
    symbol_period: float

    def __len__(self) -> int:
        return self.samples.size


def recover_frames(frames: SampleFrames, bank: MixingBank) -> RecoveredStream:
    """x_hat[n] = (1/T) P^+ y[n] for every frame, concatenated in time order."""
    P = bank.P
    M, L = P.shape
    if frames.channels != M:
        raise ValueError(f"frames have {frames.channels} channels, bank has {M}")
    T = bank.chip_period
    if bank.hadamard and M == L:
        # Integer P^T y first, then one division: P^-1 = P^T / L.
        x = (P.T @ frames.y) / (L * T)
    else:
        if M < L:
            raise ValueError(f"P is {M}x{L}; recovery needs M >= L")
        q, r = qr(P.astype(float), mode="economic")
        diag = np.abs(np.diag(r))
        if diag.min() <= 1e-10 * diag.max():
            raise ValueError("mixing matrix is rank deficient; Nyquist samples are not recoverable")
        x = solve_triangular(r, q.T @ frames.y) / T
    return RecoveredStream(x.T.reshape(-1).copy(), T)


@dataclass(frozen=True)
class EqualizerModel:
    """Linear MMSE equalizer over a window of n0 Nyquist samples.

    ``H[i, j] = g((kappa + i - j) T)`` maps the 2*n0-1 symbols around the
    current one (oldest first) onto the window; for an even pulse this is the
    same matrix as ``g((j - i - kappa) T)``.  A complex pulse is handled by
    stacking real and imaginary rows, in which case ``taps`` has length 2*n0.
    """

    n0: int
    H: np.ndarray
    h: np.ndarray
    noise_var: float
    taps: np.ndarray

    @property
    def kappa(self) -> int:
        return self.n0 // 2

    @property
    def stacked(self) -> bool:
        return self.taps.size == 2 * self.n0


def isi_matrix(g: Callable, n0: int, T: float) -> tuple[np.ndarray, np.ndarray]:
    kappa = n0 // 2
    i = np.arange(n0)[:, None]
    j = np.arange(2 * n0 - 1)[None, :]
    lag = kappa + i - j
    vals = np.asarray(g(lag * T))
    H = np.where((j - i >= 0) & (j - i <= 2 * kappa), vals, 0.0)
    h = np.asarray(g((np.arange(n0) - kappa) * T))
    return H, h


def build_equalizer(g: Callable, n0: int, T: float, snr: float, sigma_x2: float, symbol_var: float = 1.0) -> EqualizerModel:
    """c = (H H^T + sigma_n^2 I)^-1 h with sigma_n^2 = sigma_x2 / snr.

    ``symbol_var`` rescales the noise term for symbols that are not unit power
    (the closed form assumes E a a^T = I); the default reproduces it exactly.
    Pass ``snr = inf`` for a zero-forcing-like noiseless design.
    """
    if n0 < 1 or n0 % 2 == 0:
        raise ValueError(f"n0 must be a positive odd integer, got {n0}")
    if not snr > 0:
        raise ValueError("snr must be positive")
    noise_var = sigma_x2 / snr
    H, h = isi_matrix(g, n0, T)
    reg = noise_var / symbol_var
    if np.iscomplexobj(H) and np.any(np.imag(H) != 0):
        Hs = np.vstack([H.real, H.imag])
        hs = np.concatenate([h.real, h.imag])
        A = Hs @ Hs.T + 0.5 * reg * np.eye(2 * n0)
        rhs = hs
    else:
        H, h = np.real(H), np.real(h)
        A = H @ H.T + reg * np.eye(n0)
        rhs = h
    cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise EqualizerError(f"MMSE system condition number {cond:.3g} exceeds {MAX_CONDITION:g}")
    taps = np.linalg.solve(A, rhs)
    return EqualizerModel(n0, H, h, noise_var, taps)


def _windows(x: np.ndarray, n0: int) -> np.ndarray:
    kappa = n0 // 2
    padded = np.pad(x, kappa)
    return np.lib.stride_tricks.sliding_window_view(padded, n0)


def equalize(stream: RecoveredStream | np.ndarray, eq: EqualizerModel, count: int | None = None) -> np.ndarray:
    """Soft estimates ``c^T z[k]`` with z[k] the samples k-kappa .. k+kappa (zero-padded)."""
    x = stream.samples if isinstance(stream, RecoveredStream) else np.asarray(stream)
    if x.size < eq.n0:
        raise ValueError(f"stream shorter than the equalizer window ({eq.n0})")
    z = _windows(x, eq.n0)
    if count is not None:
        z = z[:count]
    if eq.stacked:
        z = np.concatenate([z.real, z.imag], axis=1)
    elif np.iscomplexobj(z):
        z = z.real
    return z @ eq.taps


def slice_levels(soft, bits_per_symbol: int) -> np.ndarray:
    """Nearest-level indices; a value exactly midway goes to the lower level."""
    levels = pam_levels(bits_per_symbol)
    thresholds = 0.5 * (levels[1:] + levels[:-1])
    return np.searchsorted(thresholds, np.real(soft), side="left")


def equalize_and_slice(stream: RecoveredStream | np.ndarray, eq: EqualizerModel, bits_per_symbol: int, symbol_period: float | None = None, count: int | None = None) -> SymbolStream:
    soft = equalize(stream, eq, count)
    T = symbol_period if symbol_period is not None else getattr(stream, "symbol_period", 1.0)
    return SymbolStream(slice_levels(soft, bits_per_symbol), bits_per_symbol, T)
