import numpy as np
import pytest

from heatcast.schedules import default_schedule
from heatcast.synth import BuildingParams, generate


@pytest.fixture(scope="session")
def schedule():
    return default_schedule()


@pytest.fixture(scope="session")
def small_ds(schedule):
    """Ten synthetic days, enough for every split and feature path."""
    return generate(10, schedule, BuildingParams(seed=3))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_configure(config):
    config._criteria = []


@pytest.fixture
def criterion(request):
    """Record one acceptance verdict; the lines are echoed in the terminal summary."""

    def record(number, title, ok, detail=""):
        request.config._criteria.append((number, title, bool(ok), detail))
        return ok

    return record


def pytest_terminal_summary(terminalreporter, config):
    rows = sorted(getattr(config, "_criteria", []))
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, detail in rows:
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {title}  [{detail}]")
