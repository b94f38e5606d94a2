import json
import subprocess
import sys

import pytest

from winsim.cli import CSV_COLUMNS, EXIT_CONFIG, EXIT_OK, EXIT_RUNTIME, main


def read_csv_header(path):
    return path.read_text(encoding="utf-8").splitlines()[0].split(",")


def test_run_writes_all_outputs(small_config, tmp_path):
    out = tmp_path / "out"
    assert main(["run", str(small_config()), "--out", str(out)]) == EXIT_OK
    csv = out / "results.csv"
    assert read_csv_header(csv) == list(CSV_COLUMNS)
    meta = json.loads((out / "meta.json").read_text())
    fp = meta["config_hash"]
    assert meta["seed"] == 5 and "snr_axis_definition" in meta and meta["config"]["signal"]["pulse"] == "led"
    dats = sorted(out.glob("curve_*.dat"))
    assert len(dats) == 4
    for f in [csv, *dats]:
        assert fp in f.read_text()
    for png in ("mse.png", "ber.png"):
        data = (out / png).read_bytes()
        assert data[:4] == b"\x89PNG" and fp.encode() in data
    text = csv.read_text()
    assert ";" not in text and "," in text


def test_rerun_is_byte_identical(small_config, tmp_path):
    cfg = str(small_config())
    main(["run", cfg, "--out", str(tmp_path / "a"), "--no-plots"])
    main(["run", cfg, "--out", str(tmp_path / "b"), "--no-plots"])
    assert (tmp_path / "a" / "results.csv").read_bytes() == (tmp_path / "b" / "results.csv").read_bytes()


def test_seed_and_trials_overrides(small_config, tmp_path):
    main(["run", str(small_config()), "--out", str(tmp_path / "a"), "--no-plots", "--seed", "11", "--trials", "1"])
    meta = json.loads((tmp_path / "a" / "meta.json").read_text())
    assert meta["seed"] == 11 and meta["config"]["sweep"]["max_trials"] == 1
    rows = (tmp_path / "a" / "results.csv").read_text().splitlines()[1:]
    trials_col = CSV_COLUMNS.index("trials")
    assert all(r.split(",")[trials_col] == "1" for r in rows)


def test_config_errors_exit_1(tmp_path, capsys):
    bad = tmp_path / "bad.toml"
    bad.write_text("")
    assert main(["run", str(bad), "--out", str(tmp_path / "o")]) == EXIT_CONFIG
    assert "missing" in capsys.readouterr().err
    assert main(["run", str(tmp_path / "missing.toml")]) == EXIT_CONFIG
    assert main(["run"]) == EXIT_CONFIG
    assert main(["run", str(bad), "--preset", "exp_a"]) == EXIT_CONFIG
    assert main(["run", "--preset", "exp_a", "--trials", "0"]) == EXIT_CONFIG


def test_runtime_error_exit_2(small_config, tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["run", str(small_config()), "--out", str(blocker / "sub"), "--no-plots"]) == EXIT_RUNTIME
    assert "error" in capsys.readouterr().err


def test_preset_exp_a_schema(tmp_path):
    out = tmp_path / "a"
    assert main(["run", "--preset", "exp_a", "--out", str(out), "--trials", "1", "--no-plots"]) == EXIT_OK
    header = read_csv_header(out / "results.csv")
    for col in ("snr_db", "system", "B_s", "mse", "mse_bound"):
        assert col in header


def test_preset_exp_c_has_ber_for_each_jitter(tmp_path):
    out = tmp_path / "c"
    assert main(["run", "--preset", "exp_c", "--out", str(out), "--trials", "1", "--no-plots"]) == EXIT_OK
    lines = (out / "results.csv").read_text().splitlines()
    header = lines[0].split(",")
    rows = [dict(zip(header, line.split(","))) for line in lines[1:]]
    jitters = {r["jitter_p"] for r in rows}
    assert "0" in jitters and len(jitters) >= 2
    for r in rows:
        assert 0.0 <= float(r["ber"]) <= 1.0 and int(r["bits"]) > 0


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "winsim.cli", "run", "--preset", "exp_q"], capture_output=True, text=True)
    assert proc.returncode == 2  # argparse rejects the unknown preset choice
    proc = subprocess.run([sys.executable, "-m", "winsim.cli", "run", str(tmp_path / "none.toml")], capture_output=True, text=True)
    assert proc.returncode == EXIT_CONFIG
