"""Experiment configuration: TOML files with explicit physical units.

Quantities are strings such as ``"20 GHz"`` or ``"17 ps/(nm km)"``; they are
converted to SI on load.  Validation reports every problem at once.
"""
from __future__ import annotations

import hashlib
import json
import re
from dataclasses import asdict, dataclass, field, replace
from importlib import resources
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .window import supported_orders, _has_construction

PRESETS = ("exp_a", "exp_a_rect", "exp_b", "exp_c")

# unit -> (dimension, factor to SI)
_UNITS = {
    "hz": ("frequency", 1.0), "khz": ("frequency", 1e3), "mhz": ("frequency", 1e6),
    "ghz": ("frequency", 1e9), "thz": ("frequency", 1e12),
    "s": ("time", 1.0), "ms": ("time", 1e-3), "us": ("time", 1e-6), "ns": ("time", 1e-9),
    "ps": ("time", 1e-12), "fs": ("time", 1e-15),
    "m": ("length", 1.0), "km": ("length", 1e3), "mm": ("length", 1e-3), "um": ("length", 1e-6),
    "nm": ("length", 1e-9),
    "db/km": ("attenuation", 1e-3),
    "ps/(nm*km)": ("dispersion", 1e-12 / (1e-9 * 1e3)), "ps/nm/km": ("dispersion", 1e-12 / (1e-9 * 1e3)),
    "s/m^2": ("dispersion", 1.0),
    "s/km": ("delay", 1e-3), "ps/km": ("delay", 1e-15), "s/m": ("delay", 1.0),
    "rad": ("angle", 1.0),
    "%": ("fraction", 1e-2), "ui": ("fraction", 1.0),
    "v^2*s": ("psd", 1.0), "v^2/hz": ("psd", 1.0),
    "v*s": ("charge", 1.0), "v": ("voltage", 1.0),
}

_QTY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*(.*?)\s*$")


class ConfigError(ValueError):
    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("invalid configuration:\n  - " + "\n  - ".join(self.errors))


def _norm_unit(unit: str) -> str:
    u = unit.strip().lower().replace("·", "*").replace("²", "^2")
    u = re.sub(r"\s*\*\s*|\s+", "*", u)
    return u


def parse_quantity(value, dimension: str) -> float:
    """Convert ``"2.5 GHz"`` style strings to SI; bare numbers only for fractions/angles."""
    if isinstance(value, bool):
        raise ValueError(f"expected a {dimension} quantity, got {value!r}")
    if isinstance(value, (int, float)):
        if dimension in ("fraction", "angle") or value == 0:
            return float(value)
        raise ValueError(f"{value!r} has no unit (expected {dimension})")
    m = _QTY.match(str(value))
    if not m:
        raise ValueError(f"cannot parse quantity {value!r}")
    number, unit = float(m.group(1)), _norm_unit(m.group(2))
    if not unit:
        if dimension in ("fraction", "angle"):
            return number
        raise ValueError(f"{value!r} has no unit (expected {dimension})")
    if unit not in _UNITS:
        raise ValueError(f"unknown unit {m.group(2)!r} in {value!r}")
    dim, factor = _UNITS[unit]
    if dim != dimension:
        raise ValueError(f"{value!r} is a {dim}, expected {dimension}")
    return number * factor


@dataclass(frozen=True)
class SignalConfig:
    pulse: str
    f_nyq: float
    bits_in: int
    osr: int = 32
    led_tau: float | None = None
    gaussian_fwhm: float | None = None
    laser_times: tuple[float, ...] | None = None
    laser_values: tuple[float, ...] | None = None

    @property
    def symbol_period(self) -> float:
        return 1.0 / self.f_nyq


@dataclass(frozen=True)
class ChannelConfig:
    length: float = 0.0
    alpha: float = 0.0
    dispersion: float = 17e-6
    wavelength: float = 1550e-9
    beta0: float = 0.0
    beta1: float = 0.0
    attenuation: str = "field"


@dataclass(frozen=True)
class FrontendConfig:
    channels: int
    f_s: float
    bits_sample: tuple[int | None, ...] = (None,)
    dynamic_range: str = "auto"
    window_dynamic_range: float | None = None
    multicoset_dynamic_range: float | None = None
    lpf_bandwidth: float | None = None
    mc_noise_bandwidth: float | None = None


@dataclass(frozen=True)
class ImpairmentConfig:
    snr_db: tuple[float, ...] = ()
    n0: float | None = None
    jitter: tuple[float, ...] = (0.0,)


@dataclass(frozen=True)
class SweepConfig:
    metric: str = "mse"
    frames: int = 200
    min_trials: int = 5
    max_trials: int = 20
    seed: int = 1
    isi_order: int = 3
    min_errors: int = 100
    max_bits: int = 2_000_000


@dataclass(frozen=True)
class OutputConfig:
    directory: str = "results"
    plots: bool = True
    plot_data: bool = True


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    systems: tuple[str, ...]
    signal: SignalConfig
    channel: ChannelConfig
    frontend: FrontendConfig
    impairments: ImpairmentConfig
    sweep: SweepConfig = field(default_factory=SweepConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    @property
    def frame_length(self) -> int:
        return int(round(self.signal.f_nyq / self.frontend.f_s))

    def to_dict(self) -> dict:
        return asdict(self)

    def fingerprint(self) -> str:
        """Hash of the resolved configuration (output block excluded)."""
        d = self.to_dict()
        d.pop("output")
        blob = json.dumps(d, sort_keys=True, default=str).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    def with_overrides(self, seed: int | None = None, trials: int | None = None) -> "ExperimentConfig":
        sw = self.sweep
        if seed is not None:
            sw = replace(sw, seed=seed)
        if trials is not None:
            sw = replace(sw, max_trials=trials, min_trials=min(sw.min_trials, trials))
        return replace(self, sweep=sw)


_REQUIRED = {
    "experiment": ["name", "systems"],
    "signal": ["pulse", "f_nyq", "bits_in"],
    "frontend": ["channels", "f_s"],
    "impairments": [],
}


def _axis(value) -> tuple[float, ...]:
    if isinstance(value, dict):
        start, stop, step = float(value["start"]), float(value["stop"]), float(value["step"])
        n = int(round((stop - start) / step)) + 1
        return tuple(round(start + i * step, 10) for i in range(n))
    if isinstance(value, (list, tuple)):
        return tuple(float(v) for v in value)
    return (float(value),)


class _Collector:
    def __init__(self):
        self.errors: list[str] = []

    def get(self, table: dict, section: str, key: str, conv, default=None, required=False):
        if key not in table:
            if required:
                self.errors.append(f"missing required field [{section}] {key}")
            return default
        try:
            return conv(table[key])
        except (ValueError, TypeError, KeyError) as exc:
            self.errors.append(f"[{section}] {key}: {exc}")
            return default


def _bits_list(v) -> tuple[int | None, ...]:
    items = v if isinstance(v, (list, tuple)) else [v]
    out = []
    for item in items:
        if isinstance(item, str) and item.lower() in ("none", "inf", "off"):
            out.append(None)
        else:
            b = int(item)
            if b < 1:
                raise ValueError("B_s must be >= 1")
            out.append(b)
    return tuple(out)


def _jitter_list(v) -> tuple[float, ...]:
    items = v if isinstance(v, (list, tuple)) else [v]
    return tuple(parse_quantity(item, "fraction") for item in items)


def config_from_dict(data: dict) -> ExperimentConfig:
    c = _Collector()
    for section, keys in _REQUIRED.items():
        if section not in data:
            c.errors.append(f"missing section [{section}]" + (f" (fields: {', '.join(keys)})" if keys else ""))
            for key in keys:
                c.errors.append(f"missing required field [{section}] {key}")
    exp = data.get("experiment", {})
    sig = data.get("signal", {})
    ch = data.get("channel", {})
    fe = data.get("frontend", {})
    imp = data.get("impairments", {})
    sw = data.get("sweep", {})
    out = data.get("output", {})
    req = "experiment" in data

    name = c.get(exp, "experiment", "name", str, "unnamed", required=req)
    systems = c.get(exp, "experiment", "systems", lambda v: tuple(str(s) for s in v), (), required=req)
    for s in systems or ():
        if s not in ("window", "multicoset"):
            c.errors.append(f"[experiment] systems: unknown system {s!r}")

    q = lambda dim: (lambda v: parse_quantity(v, dim))
    sreq = "signal" in data
    pulse = c.get(sig, "signal", "pulse", str, "rectangular", required=sreq)
    if pulse not in ("rectangular", "led", "gaussian", "laser"):
        c.errors.append(f"[signal] pulse: unknown pulse {pulse!r}")
    f_nyq = c.get(sig, "signal", "f_nyq", q("frequency"), None, required=sreq)
    bits_in = c.get(sig, "signal", "bits_in", int, 1, required=sreq)
    if bits_in is not None and not 1 <= bits_in <= 16:
        c.errors.append("[signal] bits_in must be in [1, 16]")
    osr = c.get(sig, "signal", "osr", int, 32)
    if osr is not None and (osr < 8 or osr % 2):
        c.errors.append("[signal] osr must be even and >= 8")
    led_tau = c.get(sig, "signal", "led_tau", q("time"), None, required=pulse == "led" and sreq)
    fwhm = c.get(sig, "signal", "gaussian_fwhm", q("time"), None, required=pulse == "gaussian" and sreq)
    lt = c.get(sig, "signal", "laser_times", lambda v: tuple(float(x) for x in v), None, required=pulse == "laser" and sreq)
    lv = c.get(sig, "signal", "laser_values", lambda v: tuple(float(x) for x in v), None, required=pulse == "laser" and sreq)

    channel = ChannelConfig(
        length=c.get(ch, "channel", "length", q("length"), 0.0),
        alpha=c.get(ch, "channel", "alpha", q("attenuation"), 0.0),
        dispersion=c.get(ch, "channel", "dispersion", q("dispersion"), 17e-6),
        wavelength=c.get(ch, "channel", "wavelength", q("length"), 1550e-9),
        beta0=c.get(ch, "channel", "beta0", q("angle"), 0.0),
        beta1=c.get(ch, "channel", "beta1", q("delay"), 0.0),
        attenuation=c.get(ch, "channel", "attenuation", str, "field"),
    )
    if channel.length is not None and channel.length < 0:
        c.errors.append("[channel] length must be >= 0")
    if channel.alpha is not None and channel.alpha < 0:
        c.errors.append("[channel] alpha must be >= 0")
    if channel.attenuation not in ("field", "intensity"):
        c.errors.append("[channel] attenuation must be 'field' or 'intensity'")

    freq = "frontend" in data
    channels = c.get(fe, "frontend", "channels", int, None, required=freq)
    f_s = c.get(fe, "frontend", "f_s", q("frequency"), None, required=freq)
    frontend = FrontendConfig(
        channels=channels,
        f_s=f_s,
        bits_sample=c.get(fe, "frontend", "bits_sample", _bits_list, (None,)),
        dynamic_range=c.get(fe, "frontend", "dynamic_range", str, "auto"),
        window_dynamic_range=c.get(fe, "frontend", "window_dynamic_range", q("charge"), None),
        multicoset_dynamic_range=c.get(fe, "frontend", "multicoset_dynamic_range", q("voltage"), None),
        lpf_bandwidth=c.get(fe, "frontend", "lpf_bandwidth", q("frequency"), None),
        mc_noise_bandwidth=c.get(fe, "frontend", "mc_noise_bandwidth", q("frequency"), None),
    )
    if frontend.dynamic_range not in ("auto", "nominal"):
        c.errors.append("[frontend] dynamic_range must be 'auto' or 'nominal'")
    if f_nyq and f_s:
        ratio = f_nyq / f_s
        if abs(ratio - round(ratio)) > 1e-9 or round(ratio) < 1:
            c.errors.append(f"[frontend] f_nyq/f_s = L = {ratio:.4g} is not an integer")
        else:
            L = int(round(ratio))
            if "window" in (systems or ()) and not _has_construction(L):
                c.errors.append(f"[frontend] L = {L} has no Hadamard construction; valid orders: {supported_orders(64)}")
            if channels is not None and channels != L:
                c.errors.append(f"[frontend] channels = {channels} must equal L = f_nyq/f_s = {L}")

    snr_axis = c.get(imp, "impairments", "snr_db", _axis, ())
    n0 = c.get(imp, "impairments", "n0", q("psd"), None)
    if "impairments" in data and not snr_axis and n0 is None:
        c.errors.append("[impairments] one of snr_db or n0 is required")
    jitter = c.get(imp, "impairments", "jitter", _jitter_list, (0.0,))
    for p in jitter or ():
        if not 0 <= p < 0.5:
            c.errors.append(f"[impairments] jitter {p} outside [0, 0.5)")
    impairments = ImpairmentConfig(tuple(snr_axis or ()), n0, tuple(jitter or (0.0,)))

    sweep = SweepConfig(
        metric=c.get(sw, "sweep", "metric", str, "mse"),
        frames=c.get(sw, "sweep", "frames", int, 200),
        min_trials=c.get(sw, "sweep", "min_trials", int, 5),
        max_trials=c.get(sw, "sweep", "max_trials", int, 20),
        seed=c.get(sw, "sweep", "seed", int, 1),
        isi_order=c.get(sw, "sweep", "isi_order", int, 3),
        min_errors=c.get(sw, "sweep", "min_errors", int, 100),
        max_bits=c.get(sw, "sweep", "max_bits", int, 2_000_000),
    )
    if sweep.metric not in ("mse", "ber", "both"):
        c.errors.append("[sweep] metric must be 'mse', 'ber' or 'both'")
    if sweep.isi_order is not None and (sweep.isi_order < 1 or sweep.isi_order % 2 == 0):
        c.errors.append("[sweep] isi_order must be odd and >= 1")
    if sweep.frames is not None and sweep.frames < 1:
        c.errors.append("[sweep] frames must be >= 1")

    output = OutputConfig(
        directory=c.get(out, "output", "directory", str, "results"),
        plots=c.get(out, "output", "plots", bool, True),
        plot_data=c.get(out, "output", "plot_data", bool, True),
    )
    if c.errors:
        raise ConfigError(c.errors)
    signal = SignalConfig(pulse, f_nyq, bits_in, osr, led_tau, fwhm, lt, lv)
    return ExperimentConfig(name, systems, signal, channel, frontend, impairments, sweep, output)


def parse_config(path) -> ExperimentConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError([f"config file not found: {path}"])
    try:
        data = tomllib.loads(path.read_text(encoding="utf-8"))
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError([f"{path}: {exc}"]) from exc
    return config_from_dict(data)


def preset_path(name: str) -> Path:
    if name not in PRESETS:
        raise ConfigError([f"unknown preset {name!r}; choose from {', '.join(PRESETS)}"])
    return Path(str(resources.files("winsim") / "presets" / f"{name}.toml"))


def load_preset(name: str) -> ExperimentConfig:
    return parse_config(preset_path(name))
