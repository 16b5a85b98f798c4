import copy
import json

import pytest

from handoffkit import _kernels
from handoffkit.scenario import load_scenario_dict, reference_scenario_path

# two overlapping wlan discs along the x axis, everything static
SMALL = {
    "name": "two-discs",
    "registry": {
        "RSS": [-100.0, -30.0],
        "SNR": [0.0, 70.0],
        "NBW": [0.0, 25.0],
        "NL": [0.0, 1.0],
        "ND": [0.0, 0.5],
        "price": [0.0, 1.0],
        "BL": [0.0, 1.0],
    },
    "networks": [
        {
            "id": "a", "provider": "P1", "technology": "wlan", "center": [0.0, 0.0], "radius": 120.0,
            "p0": -40.0, "d0": 1.0, "path_loss_exponent": 2.5, "bandwidth": 10.0, "delay": 0.02,
            "load": {"kind": "sine", "mean": 0.3, "amplitude": 0.0, "period": 10.0}, "price": 0.2,
        },
        {
            "id": "b", "provider": "P1", "technology": "wlan", "center": [200.0, 0.0], "radius": 120.0,
            "p0": -40.0, "d0": 1.0, "path_loss_exponent": 2.5, "bandwidth": 10.0, "delay": 0.02,
            "load": {"kind": "sine", "mean": 0.3, "amplitude": 0.0, "period": 10.0}, "price": 0.2,
        },
    ],
    "providers": {"P1": {"preference": 1.0, "home": True}},
    "terminal": {"position": [0.0, 0.0], "velocity": [10.0, 0.0], "battery_load": 1.0, "energy_rate": 0.0},
    "mobility": {"kind": "constant"},
    "correlations": [
        {"feature": "Seamlessness", "positives": {"RSS": 0.6, "NBW": 0.1}, "negatives": {"ND": 0.3}},
        {"feature": "Autonomy", "positives": {"BL": 1.0}},
        {"feature": "Security", "negatives": {"NL": 1.0}},
        {"feature": "Correctness", "positives": {"NBW": 0.5}, "negatives": {"price": 0.5}},
        {"feature": "Adaptability", "positives": {"SNR": 1.0}},
    ],
    "config": {
        "duration": 20.0, "dt": 0.1, "seed": 1, "hysteresis": 0.0, "dwell": 1, "confirm_steps": 1,
        "eval_cost": 0.0, "thresholds": {"RSS": -99.0},
        "execution": {"strategy": "make-before-break", "base_latency": 0.0},
    },
}


@pytest.fixture
def small_doc():
    return copy.deepcopy(SMALL)


@pytest.fixture
def small(small_doc):
    return load_scenario_dict(small_doc)


@pytest.fixture(scope="session")
def reference_doc():
    return json.loads(reference_scenario_path().read_text())


@pytest.fixture(scope="session", autouse=True)
def _jit():
    _kernels.warmup()


# one line per acceptance criterion, printed at the end of the session
ACCEPTANCE = []


class _Criterion:
    def __init__(self, tag, what):
        self.tag, self.what, self.detail = tag, what, ""

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        status = "PASS" if exc_type is None else "FAIL"
        line = f"{self.tag} {status}  {self.what}"
        if self.detail:
            line += f"  [{self.detail}]"
        if exc_type is not None and exc is not None and str(exc):
            line += f"  ({str(exc).splitlines()[0]})"
        ACCEPTANCE.append(line)
        print(line)
        return False


@pytest.fixture
def criterion():
    return _Criterion


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[0][2:])):
            terminalreporter.write_line(line)
