"""Monte Carlo forward checks and the trinomial oracle."""

import numpy as np
import pytest

from paysched import (GridSpec, Model, SimConfig, agent_deviation, dp_oracle,
                      simulate_principal, solve_initial)

G40 = GridSpec(4.0, 40)


@pytest.fixture(scope="module")
def small(solved):
    key = "sim-small"
    if key not in solved:
        m = Model(2.0, 0.0, 2.0, 0.0, 0.0, (0.0, 0.5, 1.0))
        solved[key] = solve_initial(m, G40)
    return solved[key]


def test_config_validation():
    with pytest.raises(ValueError, match="n_paths"):
        SimConfig(1.0, n_paths=0)
    with pytest.raises(ValueError, match="n_steps"):
        SimConfig(1.0, n_steps_per_period=0)
    with pytest.raises(ValueError, match="nonnegative"):
        SimConfig(-0.5)


def test_deterministic_replay(small):
    cfg = SimConfig(0.5, n_paths=300, n_steps_per_period=20, seed=99)
    r1 = simulate_principal(small, cfg)
    r2 = simulate_principal(small, cfg)
    assert r1 == r2


def test_zero_control_product_formula():
    # z frozen at 0 and payments off leave pure exponential drift, so the
    # sample is deterministic and must match the step-by-step product
    m = Model(2.0, 0.3, 2.0, 0.0, 0.0, (0.0, 1.0))
    sol = solve_initial(m, G40)
    cfg = SimConfig(1.0, n_paths=8, n_steps_per_period=25, seed=7)
    rep = simulate_principal(sol, cfg, z_override=0.0, payments_enabled=False)
    y = 1.0
    dt = 1.0 / 25
    for _ in range(25):
        y = y + (0.3 * y) * dt
    assert rep.estimate == -(y ** 2.0)
    assert rep.std_error == 0.0
    assert rep.clamp_fraction == 0.0


def test_zero_start_is_absorbed():
    m = Model(2.0, 0.1, 2.0, 0.0, 0.7, (0.0, 0.5, 1.0))
    sol = solve_initial(m, G40)
    rep = simulate_principal(sol, SimConfig(0.0, n_paths=16,
                                            n_steps_per_period=10, seed=3))
    assert rep.estimate == m.x0
    assert rep.std_error == 0.0 and rep.clamp_fraction == 0.0


def test_standard_error_scaling(small):
    r1 = simulate_principal(small, SimConfig(0.5, 800, 20, seed=11))
    r2 = simulate_principal(small, SimConfig(0.5, 3200, 20, seed=11))
    ratio = r1.std_error / r2.std_error
    assert 1.6 < ratio < 2.4


def test_z_score_field(small):
    rep = simulate_principal(small, SimConfig(0.5, 400, 20, seed=5))
    assert rep.z_score == (rep.estimate - rep.pde_value) / rep.std_error
    assert rep.n_paths == 400 and rep.seed == 5


def test_start_above_grid_raises(small):
    with pytest.raises(ValueError, match="outside the grid"):
        simulate_principal(small, SimConfig(4.5, 10, 5, seed=1))
    with pytest.raises(ValueError, match="outside the grid"):
        agent_deviation(small, SimConfig(4.5, 10, 5, seed=1), 0.0)


def test_return_paths_table(small):
    cfg = SimConfig(0.5, n_paths=250, n_steps_per_period=20, seed=21)
    rep, cols = simulate_principal(small, cfg, return_paths=True)
    assert set(cols) == {"payoff", "y_T", "eta_total"}
    assert all(len(cols[k]) == 250 for k in cols)
    assert float(np.mean(cols["payoff"])) == rep.estimate
    assert np.all(cols["y_T"] >= 0.0) and np.all(cols["eta_total"] >= 0.0)


def test_deviation_zero_is_exact(small):
    cfg = SimConfig(0.5, n_paths=500, n_steps_per_period=20, seed=13)
    rep = agent_deviation(small, cfg, 0.0)
    assert rep.j_dev == rep.j_star
    assert rep.se_diff == 0.0
    fn = agent_deviation(small, cfg, lambda t, y: 0.0)
    assert (fn.j_star, fn.j_dev, fn.se_diff) == (rep.j_star, rep.j_dev, 0.0)


def test_deviation_bound_enforced(small):
    cfg = SimConfig(0.5, n_paths=10, n_steps_per_period=5, seed=13)
    with pytest.raises(ValueError, match="unit bound"):
        agent_deviation(small, cfg, 1.5)
    with pytest.raises(ValueError, match="unit bound"):
        agent_deviation(small, cfg, lambda t, y: 2.0)


def test_deviation_never_profits(small):
    cfg = SimConfig(0.5, n_paths=4000, n_steps_per_period=50, seed=2024)
    for eps in (0.5, -0.5):
        rep = agent_deviation(small, cfg, eps)
        assert rep.j_dev <= rep.j_star + 3.0 * rep.se_diff


def test_oracle_zero_control_is_terminal():
    # a single z=0 control and no discounting leave the terminal data fixed
    m = Model(2.0, 0.0, 1.0, 0.0, 0.0, (0.0, 0.01))
    out = dp_oracle(m, 1, 20, 1, 4.0)
    ys = np.linspace(0.0, 4.0, 21)
    want = -(ys ** 2.0)
    want[0] = 0.0
    assert np.array_equal(out.values, want)
    assert out.dy == 0.2


def test_oracle_one_step_hand_value():
    # at y=1, z=1, dt=0.01, h=0.2: q=0.250625, r=0.025, drift term 0.01,
    # mixing the parabola gives 0.01 - 1.020025
    m = Model(2.0, 0.0, 1.0, 0.0, 0.0, (0.0, 0.01))
    out = dp_oracle(m, 1, 20, 2, 4.0)
    assert out.values[5] == pytest.approx(-1.0100250000000002, abs=1e-15)


def test_oracle_guards():
    with pytest.raises(ValueError, match="size guard"):
        dp_oracle(Model(2.0, 0.0, 1.0, 0.0, 0.0, (0.0, 1.0)), 1000, 1000, 11)
    with pytest.raises(ValueError, match="reduce the time step"):
        dp_oracle(Model(2.0, 0.0, 1.0, 0.0, 0.0, (0.0, 1.0)), 1, 20, 2, 4.0)
    with pytest.raises(ValueError, match="oracle needs"):
        dp_oracle(Model(2.0, 0.0, 1.0, 0.0, 0.0, (0.0, 1.0)), 0, 20, 2, 4.0)
