"""Shared fixtures: bundled scenario paths and cached mission runs.

Full mission simulations take several seconds each, so every test that
needs one shares a session-scoped run. Mission fixtures also record the
per-cycle planner outputs by wrapping the replan entry point, which the
post-hoc feasibility checks consume.
"""

from pathlib import Path

import pytest

SCENARIO_DIR = Path(__file__).resolve().parents[1] / "scenarios"

# One line per acceptance criterion, echoed in the terminal summary.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def scenario_dir() -> Path:
    return SCENARIO_DIR


def run_recorded(scenario, **kwargs):
    """Run a mission while capturing every ReplanResult the loop produced."""
    import nurbsnav.planner as planner_mod
    from nurbsnav.scenario import run_mission

    original = planner_mod.replan_cycle
    results = []

    def recording(*args, **kw):
        result = original(*args, **kw)
        if result is not None:
            results.append(result)
        return result

    planner_mod.replan_cycle = recording
    try:
        log = run_mission(scenario, **kwargs)
    finally:
        planner_mod.replan_cycle = original
    return log, results


def _load(name):
    from nurbsnav.scenario import load_scenario
    return load_scenario(SCENARIO_DIR / name)


@pytest.fixture(scope="session")
def empty_run():
    return _load("empty_world.json"), *run_recorded(_load("empty_world.json"))


@pytest.fixture(scope="session")
def three_run():
    return _load("three_waypoints.json"), \
        *run_recorded(_load("three_waypoints.json"))


@pytest.fixture(scope="session")
def head_on_run():
    return _load("head_on.json"), *run_recorded(_load("head_on.json"))


@pytest.fixture(scope="session")
def head_on_no_vo_run():
    scenario = _load("head_on.json")
    log, results = run_recorded(scenario, disable_vo=True)
    return scenario, log, results
