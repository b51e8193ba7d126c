import os
import sys
from importlib import resources

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from periodadapt import Task, TaskClass, TaskSet, load_scenario  # noqa: E402

SCENARIO_DIR = resources.files("periodadapt") / "scenarios"
BUNDLED = sorted(p.name for p in SCENARIO_DIR.iterdir() if p.name.endswith(".json"))


def bundled(name):
    return load_scenario(SCENARIO_DIR / name)


@pytest.fixture
def table1():
    weights = [0.30, 0.30, 0.18, 0.12, 0.10]
    return TaskSet(Task(f"t{i + 1}", 18, 100, TaskClass.SOFT_BOUNDED, w, 50, 150)
                   for i, w in enumerate(weights))


@pytest.fixture
def table1_request(table1):
    return table1.replace_task(table1["t1"].with_fixed_period(50))


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
