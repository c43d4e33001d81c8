import copy
import json
from pathlib import Path

import pytest

from fswsim.scenario import Scenario, scenario_from_dict

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"


def load_shipped(name: str) -> Scenario:
    return scenario_from_dict(json.loads((SCENARIO_DIR / f"{name}.json").read_text()))


def shipped_dict(name: str) -> dict:
    return json.loads((SCENARIO_DIR / f"{name}.json").read_text())


@pytest.fixture
def scenario_dir() -> Path:
    return SCENARIO_DIR


# One pass/fail line per acceptance criterion, shown after the test run.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for row in ACCEPTANCE_LINES:
            terminalreporter.write_line(row)


def small_scenario(**overrides) -> Scenario:
    """Minimal fast scenario for unit tests; override any top-level key."""
    data = {
        "name": "unit",
        "seed": 7,
        "duration_ticks": 100,
        "schedule": [
            {"target": "ST_CMD", "function": "REQ_DATA", "period": 10, "phase": 0},
            {"target": "ST_CMD", "function": "REQ_HK", "period": 10, "phase": 5},
        ],
        "initial_attitude": {"q": [0, 0, 0, 1], "omega": [0.0, 0.0, 0.1]},
        "operator_script": [{"tick": 3, "device": "ST", "command": "ENABLE"}],
    }
    data.update(copy.deepcopy(overrides))
    return scenario_from_dict(data)
