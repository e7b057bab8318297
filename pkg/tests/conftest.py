"""Shared fixtures: numba warmup, a session-wide solve cache, and the
acceptance summary block printed after the run."""

import numpy as np
import pytest

from paysched import (GridSpec, Model, SimConfig, agent_deviation, build_terminal,
                      discrete_residual, dp_oracle, simulate_principal,
                      solve_initial, solve_period)

# one line per acceptance criterion, collected by tests/test_acceptance.py
ACCEPTANCE_LINES = []


def record_criterion(num, ok, detail):
    line = "criterion %02d %s  %s" % (num, "PASS" if ok else "FAIL", detail)
    ACCEPTANCE_LINES.append(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)


@pytest.fixture(scope="session", autouse=True)
def warm():
    # compile every numba kernel on a throwaway instance so timed tests
    # never pay the jit cost
    m = Model(2.0, 0.1, 2.0, 0.0, 0.0, (0.0, 0.05, 0.1))
    g = GridSpec(2.0, 16)
    sol = solve_initial(m, g)
    discrete_residual(sol.periods[0])
    solve_period(build_terminal(g, 2.0), 0.0, 0.0, m, g)
    dp_oracle(Model(2.0, 0.0, 2.0, 0.0, 0.0, (0.0, 0.05, 0.1)), 32, 16, 3, 2.0)
    cfg = SimConfig(0.5, n_paths=8, n_steps_per_period=4, seed=1)
    simulate_principal(sol, cfg, return_paths=True)
    agent_deviation(sol, cfg, 0.25)
    return True


@pytest.fixture(scope="session")
def solved():
    """Mutable per-session cache keyed by model label; acceptance tests
    share the expensive full-resolution solves through it."""
    return {}
