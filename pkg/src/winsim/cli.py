"""Command line: ``winsim run <config> [--out DIR] [--seed N] [--trials N] [--preset NAME]``.

Exit status 0 on success, 1 for configuration errors, 2 for runtime errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import platform
import sys
from collections import defaultdict
from importlib import metadata
from pathlib import Path

import numpy as np

from .config import PRESETS, ConfigError, load_preset, parse_config
from .sweep import SweepResult, run_sweep

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2

CSV_COLUMNS = (
    "config_hash", "snr_db", "system", "B_s", "jitter_p",
    "mse", "mse_bound", "mse_stderr", "ber", "ber_stderr",
    "trials", "bit_errors", "bits", "clipped", "reorders",
)
PLOT_COLUMNS = ("snr_db", "mse", "mse_bound", "mse_stderr", "ber", "ber_stderr", "trials")

SNR_AXIS_DEFINITION = (
    "snr_db = 10 log10(sigma_x^2 / (N0 f_Nyq)): signal power at the Nyquist instants over thermal "
    "noise in one Nyquist band; N0 = sigma_x^2 T / 10^(snr_db/10). sigma_x^2 is measured on the "
    "trial-0 batch of rendered symbols. MSE columns are normalized by sigma_x^2."
)

log = logging.getLogger("winsim")


def _fmt(v) -> str:
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, ".10g")
    return str(v)


def results_csv(result: SweepResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in result.rows:
        w.writerow([_fmt(row[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "unknown"


def write_outputs(result: SweepResult, out: Path, plots: bool = True, plot_data: bool = True) -> list[Path]:
    out.mkdir(parents=True, exist_ok=True)
    fp = result.fingerprint
    written = []

    path = out / "results.csv"
    path.write_text(results_csv(result), encoding="utf-8")
    written.append(path)

    cfg = result.config
    meta = {
        "config_hash": fp,
        "experiment": cfg.name,
        "seed": cfg.sweep.seed,
        "library_version": _version(),
        "python": platform.python_version(),
        "numpy": np.__version__,
        "snr_axis_definition": SNR_AXIS_DEFINITION,
        "csv_columns": list(CSV_COLUMNS),
        "config": cfg.to_dict(),
        "diagnostics": result.diagnostics,
    }
    path = out / "meta.json"
    path.write_text(json.dumps(meta, indent=2, sort_keys=True, default=_json_default) + "\n", encoding="utf-8")
    written.append(path)

    if plot_data:
        groups = defaultdict(list)
        for r in result.rows:
            groups[(r["system"], r["B_s"], r["jitter_p"])].append(r)
        for (system, bits, p), rs in sorted(groups.items(), key=lambda kv: str(kv[0])):
            rs.sort(key=lambda r: r["snr_db"])
            path = out / f"curve_{system}_Bs{bits}_p{p:g}.dat"
            lines = [
                f"# config_hash: {fp}",
                f"# system: {system}  B_s: {bits}  jitter_p: {p:g}",
                "# " + " ".join(PLOT_COLUMNS),
            ]
            lines += [" ".join(_fmt(r[c]) for c in PLOT_COLUMNS) for r in rs]
            path.write_text("\n".join(lines) + "\n", encoding="utf-8")
            written.append(path)

    if plots:
        from .plotting import plot_ber, plot_mse

        if cfg.sweep.metric in ("mse", "both"):
            written.append(plot_mse(result.rows, out / "mse.png", fp, f"{cfg.name}: recovery MSE [{fp}]"))
        if cfg.sweep.metric in ("ber", "both"):
            written.append(plot_ber(result.rows, out / "ber.png", fp, f"{cfg.name}: BER [{fp}]"))
    return written


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    return str(o)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="winsim", description="WINDOW vs multicoset sampling simulations")
    sub = p.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run an experiment configuration")
    run.add_argument("config", nargs="?", help="TOML experiment file")
    run.add_argument("--preset", choices=PRESETS, help="use a bundled experiment instead of a file")
    run.add_argument("--out", type=Path, help="output directory (default: the config's output.directory)")
    run.add_argument("--seed", type=int, help="override the master seed")
    run.add_argument("--trials", type=int, help="override the maximum trials per point")
    run.add_argument("--no-plots", action="store_true", help="skip PNG figures")
    run.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if (args.config is None) == (args.preset is None):
            raise ConfigError(["give exactly one of a config file or --preset"])
        if args.trials is not None and args.trials < 1:
            raise ConfigError(["--trials must be >= 1"])
        cfg = load_preset(args.preset) if args.preset else parse_config(args.config)
        cfg = cfg.with_overrides(seed=args.seed, trials=args.trials)
    except ConfigError as exc:
        print(f"winsim: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    out = args.out if args.out is not None else Path(cfg.output.directory)
    try:
        result = run_sweep(cfg)
        files = write_outputs(result, out, plots=cfg.output.plots and not args.no_plots, plot_data=cfg.output.plot_data)
    except Exception as exc:  # any module failure is a runtime error for the caller
        log.debug("run failed", exc_info=True)
        print(f"winsim: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    print(f"config {result.fingerprint}: wrote {len(files)} files to {out}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
