"""WINDOW front-end: +/-1 mixing bank, integrate-and-dump at the frame rate."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.linalg import hadamard as sylvester
from scipy.special import bernoulli

from .impairments import ClockRealization, NoiseSpec, QuantizerSpec, count_overload, gaussian, quantize
from .waveform import DenseWaveform

_MAX_LISTED_ORDER = 128


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, int(n**0.5) + 1))


def _paley(q: int) -> np.ndarray:
    """Paley type I Hadamard matrix of order q + 1 (q prime, q = 3 mod 4)."""
    residues = {(i * i) % q for i in range(1, q)}
    chi = np.array([0] + [1 if k in residues else -1 for k in range(1, q)])
    jac = chi[(np.arange(q)[None, :] - np.arange(q)[:, None]) % q]
    s = np.zeros((q + 1, q + 1), dtype=np.int64)
    s[0, 1:] = 1
    s[1:, 0] = -1
    s[1:, 1:] = jac
    return s + np.eye(q + 1, dtype=np.int64)


def _paley_core(order: int) -> int | None:
    """Split ``order = 2**a * (q + 1)`` with a Paley prime q, or None."""
    m = order
    while True:
        q = m - 1
        if q >= 3 and q % 4 == 3 and _is_prime(q):
            return q
        if m % 2:
            return None
        m //= 2


def _has_construction(order: int) -> bool:
    return order >= 1 and (order & (order - 1) == 0 or _paley_core(order) is not None)


def supported_orders(limit: int = _MAX_LISTED_ORDER) -> list[int]:
    return [n for n in range(1, limit + 1) if _has_construction(n)]


@lru_cache(maxsize=None)
def _hadamard_cached(order: int) -> np.ndarray:
    if order >= 1 and order & (order - 1) == 0:
        return sylvester(order).astype(np.int64)
    if not _has_construction(order):
        raise ValueError(
            f"no Hadamard construction for order {order}; supported orders up to "
            f"{_MAX_LISTED_ORDER}: {supported_orders()}"
        )
    h = _paley(_paley_core(order))
    while h.shape[0] < order:
        h = np.kron(np.array([[1, 1], [1, -1]], dtype=np.int64), h)
    return h


def hadamard_matrix(order: int) -> np.ndarray:
    """Sylvester (powers of two) or Sylvester-doubled Paley I construction."""
    return _hadamard_cached(int(order)).copy()


@dataclass(frozen=True)
class MixingBank:
    """M x L chip matrix; row m is one period of the mixing function p_m(t)."""

    P: np.ndarray
    chip_period: float
    hadamard: bool = False

    def __post_init__(self):
        P = np.asarray(self.P)
        if P.ndim != 2 or not np.all(np.abs(P) == 1):
            raise ValueError("mixing matrix entries must be +/-1")
        object.__setattr__(self, "P", P.astype(np.int64))

    @property
    def channels(self) -> int:
        return self.P.shape[0]

    @property
    def length(self) -> int:
        return self.P.shape[1]

    @property
    def frame_period(self) -> float:
        return self.length * self.chip_period


def hadamard_bank(L: int, T: float) -> MixingBank:
    return MixingBank(hadamard_matrix(L), T, hadamard=True)


@dataclass(frozen=True)
class SampleFrames:
    """Channel samples ``y[m, n]``, one column per frame."""

    y: np.ndarray
    frame_period: float
    clipped: int = 0
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.y.ndim != 2 or self.y.shape[1] < 1:
            raise ValueError("frames need shape (M, N) with N >= 1")
        if not np.all(np.isfinite(self.y)):
            raise ValueError("non-finite sample")

    @property
    def channels(self) -> int:
        return self.y.shape[0]


def _end_functional(nodes: np.ndarray) -> np.ndarray:
    """Weights on ``nodes`` (offsets from an end point, in dt) reproducing the
    Euler-Maclaurin end term ``f/2 - sum_k B_2k/(2k)! f^(2k-1)`` for
    polynomials of degree < len(nodes)."""
    k = nodes.size
    rhs = np.zeros(k)
    rhs[0] = 0.5
    for m in range(1, k, 2):
        rhs[m] = -bernoulli(m + 1)[-1] / (m + 1)
    scale = float(k)
    vander = (nodes[None, :] / scale) ** np.arange(k)[:, None]
    return np.linalg.solve(vander, rhs / scale ** np.arange(k))


@lru_cache(maxsize=None)
def chip_weights(osr: int, order: int = 6) -> np.ndarray:
    """Quadrature weights (in units of dt) for one chip from its osr left-aligned samples.

    Left-Riemann weights plus Gregory-type end corrections built from
    one-sided extrapolation over ``order`` in-chip nodes at each end.  Only
    in-chip samples are used and the corrections sum to zero, so signals that
    are constant on the chip (jumps at chip boundaries allowed) stay exact.
    """
    k = min(order, osr // 2)
    w = np.ones(osr)
    if k < 2:
        return w
    nodes = np.arange(k, dtype=float)
    w[:k] -= _end_functional(nodes)
    w[osr - k:] += _end_functional(nodes - k)
    return w


def _cumulative(x: np.ndarray) -> np.ndarray:
    out = np.zeros(x.size + 1, dtype=x.dtype)
    np.cumsum(x, out=out[1:])
    return out


def _partial_integral(x: DenseWaveform, cum: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Integral of the piecewise-constant (left sample) signal from t0 to t."""
    u = (np.asarray(t) - x.t0) / x.dt
    n = x.samples.size
    i = np.clip(np.floor(u).astype(np.int64), 0, n - 1)
    frac = u - i
    inside = np.where((u >= 0) & (u < n), x.samples[i] * frac, 0.0)
    below = u < 0
    total = np.where(below, 0.0, np.where(u >= n, cum[n], cum[i] + inside))
    return x.dt * total


def sample_window(
    x: DenseWaveform,
    bank: MixingBank,
    clock: ClockRealization | None = None,
    noise: NoiseSpec | None = None,
    quant: QuantizerSpec | None = None,
    start: float = 0.0,
    n_frames: int | None = None,
) -> SampleFrames:
    """Mix, integrate over each frame and dump; frame n covers chips nL .. nL+L-1.

    Chip k spans ``[start + e_k, start + e_{k+1})`` where ``e`` are the clock
    edges, so a jittered clock moves chip boundaries (and, without a clock
    restart, the dump instants too).  Thermal noise is drawn per chip with
    variance ``N0 * chip_length``, which reproduces ``N0 * Ts`` per sample.
    """
    T = bank.chip_period
    if not np.isclose(x.period, T, rtol=1e-9, atol=0.0):
        raise ValueError(f"waveform symbol period {x.period} != chip period {T}")
    first = x.index_of(start)
    L = bank.length
    avail = (x.samples.size - first) // (L * x.osr)
    if n_frames is None:
        n_frames = avail
    if n_frames < 1 or n_frames > avail:
        raise ValueError(f"waveform holds {avail} whole frames after start, need {max(n_frames, 1)}")
    n_chips = n_frames * L
    if clock is not None and len(clock) < n_chips + 1:
        raise ValueError(f"clock has {len(clock)} edges, need {n_chips + 1}")

    block = x.samples[first:first + n_chips * x.osr].reshape(n_chips, x.osr)
    chips = block @ chip_weights(x.osr) * x.dt
    nominal = start + T * np.arange(n_chips + 1)
    edges = nominal
    if clock is not None and not clock.ideal:
        edges = start + clock.edges[:n_chips + 1]
        cum = _cumulative(x.samples)
        shift = _partial_integral(x, cum, edges) - _partial_integral(x, cum, nominal)
        chips = chips + shift[1:] - shift[:-1]

    y = bank.P @ chips.reshape(n_frames, L).T
    if noise is not None and noise.n0 > 0:
        lengths = np.diff(edges).reshape(n_frames, L).T
        v = np.sqrt(noise.n0 * lengths) * gaussian(noise.rng(), lengths.shape, x.is_complex)
        y = y + bank.P @ v

    clipped = 0
    if quant is not None:
        clipped = count_overload(y, quant)
        y = quantize(y, quant)
    diag = {"reorders": clock.reorders if clock is not None else 0}
    return SampleFrames(y, bank.frame_period, clipped, diag)


def effective_mixing_matrix(bank: MixingBank, clock: ClockRealization, frame_index: int) -> np.ndarray:
    """P~ with ``y[n] = T P~ x[n]`` for noiseless sampling of chip-constant signals.

    Entry (m, l) is the average of the jittered mixing function over nominal
    chip l of the frame.  Portions of the jittered frame that fall outside its
    nominal span are not represented, so the identity is exact only when the
    frame's outer edges are unjittered.
    """
    L, T = bank.length, bank.chip_period
    base = frame_index * L
    if len(clock) < base + L + 1:
        raise ValueError("clock does not cover the requested frame")
    e = clock.edges[base:base + L + 1] - base * T
    nom = T * np.arange(L + 1)
    lo = np.maximum(e[:-1, None], nom[None, :-1])
    hi = np.minimum(e[1:, None], nom[None, 1:])
    overlap = np.clip(hi - lo, 0.0, None) / T
    return bank.P @ overlap
