"""Parameter validation, the utility pair, grids and config parsing."""

import dataclasses
import json

import numpy as np
import pytest

from paysched import (GridSpec, Model, ModelParams, inverse_utility, load_model,
                      model_from_dict, utility, validate)
from paysched.model import CONFIG_KEYS


def test_validate_single_payment_model():
    m = validate(ModelParams(gamma=2.0, k_a=0.0, K=5.0, R_a=0.0,
                             schedule=(0.0, 4.0)))
    assert isinstance(m, Model)
    assert m.n_payments == 1
    assert m.horizon == 4.0
    assert m.period(1) == (0.0, 4.0)


def test_validate_named_errors():
    with pytest.raises(ValueError, match="gamma must exceed 1"):
        validate(ModelParams(gamma=1.0))
    with pytest.raises(ValueError, match="strictly increasing"):
        validate(ModelParams(schedule=(0.0, 2.0, 2.0, 4.0)))
    with pytest.raises(ValueError, match="k_a must be nonnegative"):
        validate(ModelParams(k_a=-0.1))
    with pytest.raises(ValueError, match="K must be positive"):
        validate(ModelParams(K=0.0))
    with pytest.raises(ValueError, match="R_a must be nonnegative"):
        validate(ModelParams(R_a=-1.0))
    with pytest.raises(ValueError, match="x0 must be finite"):
        validate(ModelParams(x0=float("nan")))
    with pytest.raises(ValueError, match="start at 0"):
        validate(ModelParams(schedule=(1.0, 2.0)))
    with pytest.raises(ValueError, match="at least two entries"):
        validate(ModelParams(schedule=(0.0,)))
    with pytest.raises(ValueError, match="finite"):
        validate(ModelParams(schedule=(0.0, float("inf"))))


def test_model_is_immutable():
    m = validate(ModelParams())
    with pytest.raises(dataclasses.FrozenInstanceError):
        m.gamma = 3.0


def test_period_index_guard():
    m = validate(ModelParams(schedule=(0.0, 1.0, 2.0)))
    assert m.period(2) == (1.0, 2.0)
    with pytest.raises(IndexError):
        m.period(0)
    with pytest.raises(IndexError):
        m.period(3)


def test_utility_values():
    assert utility(4.0, 2.0) == 2.0
    assert utility(0.0, 2.0) == 0.0
    assert utility(1.0, 3.7) == 1.0
    with pytest.raises(ValueError):
        utility(-1e-9, 2.0)


def test_inverse_utility_values():
    assert inverse_utility(3.0, 2.0) == 9.0
    assert inverse_utility(0.0, 2.0) == 0.0
    with pytest.raises(ValueError):
        inverse_utility(-0.5, 2.0)


def test_utility_round_trip():
    rng = np.random.default_rng(20240811)
    for _ in range(200):
        gamma = 1.0 + 5.0 * rng.random() + 1e-3
        eta = 50.0 * rng.random()
        back = utility(inverse_utility(eta, gamma), gamma)
        assert abs(back - eta) <= 1e-12 * max(1.0, eta)
    # the documented spot check
    assert abs(utility(inverse_utility(0.7)) - 0.7) <= 1e-12


def test_utility_vectorized():
    xi = np.array([0.0, 1.0, 4.0, 9.0])
    assert np.allclose(utility(xi, 2.0), [0.0, 1.0, 2.0, 3.0])
    assert np.allclose(inverse_utility(utility(xi, 2.5), 2.5), xi)


def test_gridspec_geometry():
    g = GridSpec(4.0, 40)
    assert g.dy == 0.1
    nodes = g.nodes
    assert nodes[0] == 0.0 and nodes[-1] == 4.0 and nodes.size == 41


def test_gridspec_guards():
    with pytest.raises(ValueError, match="n_y"):
        GridSpec(4.0, 8)
    with pytest.raises(ValueError, match="y_max"):
        GridSpec(-1.0, 40)
    with pytest.raises(ValueError, match="safety"):
        GridSpec(4.0, 40, safety=0.0)
    with pytest.raises(ValueError, match="safety"):
        GridSpec(4.0, 40, safety=1.5)
    with pytest.raises(ValueError, match="n_store"):
        GridSpec(4.0, 40, n_store=0)


def test_model_from_dict_defaults():
    m = model_from_dict({"schedule": [0.0, 1.0, 2.0]})
    assert m.gamma == 2.0 and m.k_a == 0.0 and m.K == 10.0
    assert m.R_a == 0.0 and m.x0 == 0.0


def test_model_from_dict_guards():
    with pytest.raises(ValueError, match="unknown config key 'frequency'"):
        model_from_dict({"schedule": [0.0, 1.0], "frequency": 3})
    with pytest.raises(ValueError, match="schedule"):
        model_from_dict({"gamma": 2.0})
    with pytest.raises(ValueError, match="array"):
        model_from_dict({"schedule": "0,1"})
    with pytest.raises(ValueError, match="JSON object"):
        model_from_dict([0.0, 1.0])


def test_config_keys_frozen():
    assert set(CONFIG_KEYS) == {"gamma", "k_a", "K", "R_a", "x0", "schedule"}


def test_load_model_round_trip(tmp_path):
    cfg = {"gamma": 2.5, "k_a": 0.1, "K": 3.0, "R_a": 0.4, "x0": 1.0,
           "schedule": [0.0, 2.0, 4.0]}
    path = tmp_path / "model.json"
    path.write_text(json.dumps(cfg))
    m = load_model(str(path))
    assert m.gamma == 2.5 and m.k_a == 0.1 and m.K == 3.0
    assert m.R_a == 0.4 and m.x0 == 1.0 and m.schedule == (0.0, 2.0, 4.0)
