"""Monte Carlo sweeps over SNR and clock jitter for both front-ends.

One trial is a batch of ``frames * L`` symbols sent through the channel and
sampled by every configured system.  Trials run in a fixed order and every
random stream is seeded from ``(seed, trial, purpose, ...)``, so results are
reproducible and points with the same trial index share symbols and clocks.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .analysis import SnrModel, bit_errors, snr as snr_theory
from .config import ExperimentConfig
from .fiber import FiberParams, apply_channel, received_gaussian
from .impairments import NoiseSpec, QuantizerSpec, count_overload, quantize, realize_clock
from .multicoset import MulticosetConfig, interleave, sample_multicoset
from .recovery import RecoveredStream, build_equalizer, equalize_and_slice, recover_frames
from .waveform import DenseWaveform, PulseShape, SymbolStream, generate_symbols, pam_levels, placed_pulse, render_pam
from .window import SampleFrames, chip_weights, hadamard_bank, sample_window

log = logging.getLogger(__name__)

SYSTEM_IDS = {"window": 0, "multicoset": 1}
MSE_REL_STDERR = 0.05

# purposes in the seed tuple
_SYMBOLS, _CLOCK, _NOISE = 0, 1, 2


@dataclass
class RowStats:
    """Accumulated statistics for one (snr, jitter, system, B_s) cell."""

    mse_trials: list = field(default_factory=list)
    bit_errors: int = 0
    bits: int = 0
    clipped: int = 0
    reorders: int = 0

    @property
    def trials(self) -> int:
        return len(self.mse_trials)

    def mse(self) -> tuple[float, float]:
        v = np.asarray(self.mse_trials)
        if v.size == 0:
            return math.nan, math.nan
        err = float(np.std(v, ddof=1) / np.sqrt(v.size)) if v.size > 1 else math.nan
        return float(v.mean()), err

    def ber(self) -> tuple[float, float]:
        if self.bits == 0:
            return math.nan, math.nan
        p = self.bit_errors / self.bits
        return p, math.sqrt(max(p * (1 - p), 0.0) / self.bits)


@dataclass
class SweepResult:
    config: ExperimentConfig
    fingerprint: str
    rows: list[dict]
    sigma_x2: float
    diagnostics: dict


def pulse_from_config(cfg: ExperimentConfig) -> PulseShape:
    s = cfg.signal
    T = s.symbol_period
    if s.pulse == "rectangular":
        return PulseShape.rectangular(T)
    if s.pulse == "led":
        return PulseShape.led(T, s.led_tau)
    if s.pulse == "gaussian":
        return PulseShape.gaussian_fwhm(T, s.gaussian_fwhm)
    return PulseShape.laser(T, np.asarray(s.laser_times) * T, np.asarray(s.laser_values))


def fiber_from_config(cfg: ExperimentConfig) -> FiberParams:
    c = cfg.channel
    return FiberParams(
        length_km=c.length / 1e3,
        alpha_db_per_km=c.alpha * 1e3,
        dispersion_ps_nm_km=c.dispersion * 1e6,
        wavelength_nm=c.wavelength * 1e9,
        beta0=c.beta0,
        beta1_s_per_km=c.beta1 * 1e3,
        attenuation=c.attenuation,
    )


def _has_channel(fiber: FiberParams) -> bool:
    return fiber.length_km > 0 or fiber.beta0 != 0


def padding_symbols(fiber: FiberParams, T: float) -> int:
    if not _has_channel(fiber):
        return 0
    spread = fiber.dispersion_spread() + fiber.length_km * abs(fiber.beta1_s_per_km)
    return int(np.ceil(8.0 * spread / T)) + 1


def single_pulse_response(shape: PulseShape, fiber: FiberParams, osr: int, span: int) -> DenseWaveform:
    """Received waveform of a unit symbol at k = 0 on ``[-span T, (span+1) T)``."""
    T = shape.period
    dt = T / osr
    t0 = -span * T
    t = t0 + dt * np.arange((2 * span + 1) * osr)
    x = DenseWaveform(placed_pulse(shape, t), osr, t0, dt)
    return apply_channel(x, fiber) if _has_channel(fiber) else x


@dataclass(frozen=True)
class PulseTaps:
    """Received pulse per symbol lag: point value at the mid-interval and chip average."""

    lags: np.ndarray
    point: np.ndarray
    chip: np.ndarray
    T: float

    def callable(self, kind: str):
        vals = self.point if kind == "point" else self.chip
        lag0 = -int(self.lags[0])

        def g(t):
            k = np.rint(np.asarray(t) / self.T).astype(np.int64) + lag0
            ok = (k >= 0) & (k < vals.size)
            return np.where(ok, vals[np.clip(k, 0, vals.size - 1)], 0.0)

        return g


def pulse_taps(shape: PulseShape, fiber: FiberParams, osr: int, span: int) -> PulseTaps:
    T = shape.period
    x = single_pulse_response(shape, fiber, osr, span)
    lags = np.arange(-span, span + 1)
    blocks = x.samples.reshape(-1, osr)
    chip = blocks @ chip_weights(osr) / osr
    point = blocks[:, osr // 2]
    if shape.kind == "gaussian":
        # Closed form of the dispersed Gaussian, centred on the Nyquist instant.
        point = received_gaussian(shape.t0_width, fiber)(lags * T)
        if not np.iscomplexobj(chip):
            point = point.real if np.max(np.abs(point.imag)) <= 1e-6 * np.max(np.abs(point)) else point
    return PulseTaps(lags, point, chip, T)


def _isi_span(cfg: ExperimentConfig, fiber: FiberParams, shape: PulseShape) -> int:
    T = cfg.signal.symbol_period
    lo, hi = shape.support()
    own = int(np.ceil(max(abs(lo), abs(hi)) / T)) + 1
    return max(own, padding_symbols(fiber, T), cfg.sweep.isi_order)


def _nominal_range(system: str, bits_in: int, L: int, T: float) -> float:
    full = 2.0**bits_in
    return full * L * T if system == "window" else full


class _Trial:
    """Symbols and received waveform for one trial index."""

    def __init__(self, cfg: ExperimentConfig, shape: PulseShape, fiber: FiberParams, trial: int):
        s = cfg.signal
        n_sym = cfg.sweep.frames * cfg.frame_length
        self.stream = generate_symbols(n_sym, s.bits_in, [cfg.sweep.seed, trial, _SYMBOLS], s.symbol_period)
        x = render_pam(self.stream, shape, s.osr, padding=padding_symbols(fiber, s.symbol_period))
        self.x = apply_channel(x, fiber) if _has_channel(fiber) else x
        self.truth = self.x.nyquist_samples(n_sym)


def _quantize_frames(frames: SampleFrames, system: str, bits: int | None, cfg: ExperimentConfig) -> tuple[SampleFrames, int]:
    if bits is None:
        return frames, 0
    fe = cfg.frontend
    L, T = cfg.frame_length, cfg.signal.symbol_period
    override = fe.window_dynamic_range if system == "window" else fe.multicoset_dynamic_range
    if override is not None:
        rng = override
    elif fe.dynamic_range == "nominal":
        rng = _nominal_range(system, cfg.signal.bits_in, L, T)
    else:
        # Full scale over the sampled signal's range (noise included).
        v = frames.y
        peak = np.max(np.abs(v.real))
        if np.iscomplexobj(v):
            peak = max(peak, np.max(np.abs(v.imag)))
        rng = 2.0 * peak if peak > 0 else _nominal_range(system, cfg.signal.bits_in, L, T)
    spec = QuantizerSpec(bits, rng)
    clipped = count_overload(frames.y, spec)
    return SampleFrames(quantize(frames.y, spec), frames.frame_period, clipped, frames.diagnostics), clipped


def _recover(system: str, frames: SampleFrames, bank, T: float) -> RecoveredStream:
    if system == "window":
        return recover_frames(frames, bank)
    return RecoveredStream(interleave(frames), T)


def run_sweep(cfg: ExperimentConfig, progress=None) -> SweepResult:
    """Run every (snr, jitter) point until its stopping rule is met.

    MSE cells stop once the standard error is below 5% of the mean (after
    ``min_trials``); BER cells stop after ``min_errors`` errors or ``max_bits``
    bits.  Every cell stops at ``max_trials``.
    """
    s, fe, imp, sw = cfg.signal, cfg.frontend, cfg.impairments, cfg.sweep
    T, L, osr = s.symbol_period, cfg.frame_length, s.osr
    shape = pulse_from_config(cfg)
    fiber = fiber_from_config(cfg)
    span = _isi_span(cfg, fiber, shape)
    taps = pulse_taps(shape, fiber, osr, span)
    levels = pam_levels(s.bits_in)
    symbol_var = float(np.mean(levels**2))
    # Signal power at the Nyquist instants, estimated on the trial-0 batch.
    pilot = _Trial(cfg, shape, fiber, 0)
    sigma_x2 = float(np.mean(np.abs(pilot.truth) ** 2))
    sigma_x2_model = symbol_var * float(np.sum(np.abs(taps.point) ** 2))

    bank = hadamard_bank(L, T)
    mc_cfg = MulticosetConfig(fe.channels, T, fe.lpf_bandwidth, fe.mc_noise_bandwidth)
    mc_bandwidth = mc_cfg.sample_noise_variance(1.0, T / osr)

    if imp.snr_db:
        n0_axis = [sigma_x2 * T / 10 ** (v / 10) for v in imp.snr_db]
    else:
        n0_axis = [imp.n0]
    snr_axis = [10 * np.log10(sigma_x2 * T / n0) if n0 > 0 else math.inf for n0 in n0_axis]
    want_mse = sw.metric in ("mse", "both")
    want_ber = sw.metric in ("ber", "both")

    cells: dict[tuple, RowStats] = {}
    points = [(i, j) for j in range(len(imp.jitter)) for i in range(len(n0_axis))]
    for i, j in points:
        for system in cfg.systems:
            for b in fe.bits_sample:
                cells[(i, j, system, b)] = RowStats()

    equalizers = {}
    if want_ber:
        for i, n0 in enumerate(n0_axis):
            for system in cfg.systems:
                g = taps.callable("chip" if system == "window" else "point")
                for b in fe.bits_sample:
                    model = SnrModel(system, sigma_x2, n0, T, L, s.bits_in, b, mc_bandwidth)
                    rho = snr_theory(model)
                    equalizers[(i, system, b)] = build_equalizer(g, sw.isi_order, T, rho, sigma_x2, symbol_var)

    def cell_done(c: RowStats) -> bool:
        if c.trials >= sw.max_trials:
            return True
        if c.trials < sw.min_trials:
            return False
        ok = True
        if want_mse:
            m, e = c.mse()
            ok &= (m == 0) or (np.isfinite(e) and e <= MSE_REL_STDERR * m)
        if want_ber:
            ok &= c.bit_errors >= sw.min_errors or c.bits >= sw.max_bits
        return bool(ok)

    def point_done(i, j) -> bool:
        return all(cell_done(cells[(i, j, sy, b)]) for sy in cfg.systems for b in fe.bits_sample)

    n_frames = sw.frames
    for trial in range(sw.max_trials):
        active = [(i, j) for i, j in points if not point_done(i, j)]
        if not active:
            break
        tr = pilot if trial == 0 else _Trial(cfg, shape, fiber, trial)
        clocks = {}
        for j in sorted({j for _, j in active}):
            p = imp.jitter[j]
            clocks[j] = None if p == 0 else realize_clock(
                n_frames * L + 1, T, L * T, p, [sw.seed, trial, _CLOCK, j], restart=L
            )
        for i, j in active:
            n0 = n0_axis[i]
            for system in cfg.systems:
                if all(cell_done(cells[(i, j, system, b)]) for b in fe.bits_sample):
                    continue
                sid = SYSTEM_IDS[system]
                noise = NoiseSpec(n0, [sw.seed, trial, _NOISE, i, j, sid]) if n0 > 0 else None
                if system == "window":
                    raw = sample_window(tr.x, bank, clocks[j], noise, None, 0.0, n_frames)
                else:
                    raw = sample_multicoset(tr.x, mc_cfg, clocks[j], noise, None, 0.0, n_frames)
                for b in fe.bits_sample:
                    c = cells[(i, j, system, b)]
                    if cell_done(c):
                        continue
                    frames, clipped = _quantize_frames(raw, system, b, cfg)
                    rec = _recover(system, frames, bank, T)
                    c.mse_trials.append(float(np.mean(np.abs(rec.samples - tr.truth) ** 2)) / sigma_x2)
                    c.clipped += clipped
                    c.reorders += raw.diagnostics.get("reorders", 0)
                    if want_ber:
                        rx = equalize_and_slice(rec, equalizers[(i, system, b)], s.bits_in, T)
                        c.bit_errors += bit_errors(tr.stream, rx)
                        c.bits += len(tr.stream) * s.bits_in
        if progress is not None:
            progress(trial + 1, len(active), len(points))
        log.debug("trial %d: %d active points", trial, len(active))

    rows = []
    fp = cfg.fingerprint()
    for (i, j, system, b), c in cells.items():
        m, me = c.mse()
        br, be = c.ber() if want_ber else (math.nan, math.nan)
        model = SnrModel(system, sigma_x2, n0_axis[i], T, L, s.bits_in, b, mc_bandwidth)
        rows.append({
            "config_hash": fp,
            "snr_db": float(snr_axis[i]),
            "system": system,
            "B_s": "inf" if b is None else int(b),
            "jitter_p": float(imp.jitter[j]),
            "mse": m,
            "mse_bound": 1.0 / snr_theory(model),
            "mse_stderr": me,
            "ber": br,
            "ber_stderr": be,
            "trials": c.trials,
            "bit_errors": c.bit_errors,
            "bits": c.bits,
            "clipped": c.clipped,
            "reorders": c.reorders,
        })
    rows.sort(key=lambda r: (r["system"], str(r["B_s"]), r["jitter_p"], r["snr_db"]))
    diag = {
        "sigma_x2": sigma_x2,
        "sigma_x2_model": sigma_x2_model,
        "n0": n0_axis,
        "multicoset_noise_bandwidth_hz": mc_bandwidth,
        "isi_span_symbols": span,
        "padding_symbols": padding_symbols(fiber, T),
        "total_clipped": int(sum(c.clipped for c in cells.values())),
        "total_reorders": int(sum(c.reorders for c in cells.values())),
    }
    return SweepResult(cfg, fp, rows, sigma_x2, diag)

