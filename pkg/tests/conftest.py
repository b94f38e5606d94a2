import textwrap

import pytest

SMALL = """
[experiment]
name = "small"
systems = ["window", "multicoset"]

[signal]
pulse = "{pulse}"
f_nyq = "20 GHz"
bits_in = 1
osr = 16
led_tau = "2.5 ps"

[frontend]
channels = 4
f_s = "5 GHz"
bits_sample = [6]

[impairments]
snr_db = [0, 10]
jitter = [0.0, 0.1]

[sweep]
metric = "both"
frames = 50
min_trials = 2
max_trials = 3
seed = 5
"""


@pytest.fixture
def small_config(tmp_path):
    def make(pulse="led", extra=""):
        path = tmp_path / f"small_{pulse}.toml"
        path.write_text(textwrap.dedent(SMALL.format(pulse=pulse)) + extra)
        return path

    return make


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance") or __import__("sys").modules.get("tests.test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance")
        for line in lines:
            terminalreporter.write_line(line)
