"""Simulation of WINDOW (mixing + integrate-and-dump) and multicoset sampling of optical PAM signals."""
from .analysis import SnrModel, ber, bit_errors, mse, snr_multicoset, snr_window
from .config import ConfigError, ExperimentConfig, load_preset, parse_config
from .fiber import FiberParams, apply_channel, dispersed_gaussian
from .impairments import NoiseSpec, QuantizerSpec, quantize, realize_clock
from .multicoset import MulticosetConfig, sample_multicoset
from .recovery import build_equalizer, equalize_and_slice, recover_frames
from .sweep import SweepResult, run_sweep
from .waveform import DenseWaveform, PulseShape, SymbolStream, generate_symbols, render_pam
from .window import MixingBank, hadamard_bank, hadamard_matrix, sample_window

__all__ = [
    "ConfigError", "DenseWaveform", "ExperimentConfig", "FiberParams", "MixingBank", "MulticosetConfig",
    "NoiseSpec", "PulseShape", "QuantizerSpec", "SnrModel", "SweepResult", "SymbolStream",
    "apply_channel", "ber", "bit_errors", "build_equalizer", "dispersed_gaussian", "equalize_and_slice",
    "generate_symbols", "hadamard_bank", "hadamard_matrix", "load_preset", "mse", "parse_config",
    "quantize", "realize_clock", "recover_frames", "render_pam", "run_sweep", "sample_multicoset",
    "sample_window", "snr_multicoset", "snr_window",
]
