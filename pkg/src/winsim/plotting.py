"""Static figures of sweep results (PNG, non-interactive backend)."""
from __future__ import annotations

from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _series(rows, key):
    groups = defaultdict(list)
    for r in rows:
        groups[(r["system"], str(r["B_s"]), r["jitter_p"])].append(r)
    for k in groups:
        groups[k].sort(key=lambda r: r["snr_db"])
    return dict(sorted(groups.items()))


def _label(system, bits, p, many_bits, many_p):
    parts = [system]
    if many_bits:
        parts.append(f"B_s={bits}")
    if many_p:
        parts.append(f"p={p:g}")
    return ", ".join(parts)


def plot_mse(rows, path: Path, fingerprint: str, title: str = "") -> Path:
    groups = _series(rows, "mse")
    many_bits = len({k[1] for k in groups}) > 1
    many_p = len({k[2] for k in groups}) > 1
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    for i, ((system, bits, p), rs) in enumerate(groups.items()):
        snr = [r["snr_db"] for r in rs]
        color = f"C{i}"
        label = _label(system, bits, p, many_bits, many_p)
        ax.plot(snr, 10 * np.log10([r["mse"] for r in rs]), "o-", color=color, ms=3, label=f"{label} (e)")
        ax.plot(snr, 10 * np.log10([r["mse_bound"] for r in rs]), "--", color=color, label=f"{label} (t)")
    ax.set_xlabel("SNR [dB]")
    ax.set_ylabel("MSE / sigma_x^2 [dB]")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=7)
    ax.set_title(title or "Nyquist-sample recovery error")
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata={"Description": f"config_hash={fingerprint}"})
    plt.close(fig)
    return path


def plot_ber(rows, path: Path, fingerprint: str, title: str = "") -> Path:
    groups = _series(rows, "ber")
    many_bits = len({k[1] for k in groups}) > 1
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    for (system, bits, p), rs in groups.items():
        snr = [r["snr_db"] for r in rs]
        ber = np.array([r["ber"] for r in rs], dtype=float)
        ber[ber <= 0] = np.nan
        style = "o-" if system == "window" else "s--"
        ax.semilogy(snr, ber, style, ms=3, label=_label(system, bits, p, many_bits, True))
    ax.set_xlabel("SNR [dB]")
    ax.set_ylabel("BER")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=7)
    ax.set_title(title or "Bit error rate after equalization")
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata={"Description": f"config_hash={fingerprint}"})
    plt.close(fig)
    return path
