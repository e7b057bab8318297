"""Problem data for the lump-sum payment scheduling model.

A risk-neutral principal hires a risk-averse agent over a finite horizon
and pays N lump sums at fixed calendar times 0 < T_1 < ... < T_N = T.
The agent has power utility u(x) = x**(1/gamma) with gamma > 1, discounts
at rate k_a >= 0, and must be promised at least R_a in utility units up
front.  Effort is capped at K in absolute value.  This module holds the
validated parameter bundle, the utility pair, the spatial grid, and JSON
config parsing used by the command line front end.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

DEFAULT_GAMMA = 2.0
DEFAULT_K = 10.0

# exact set of keys a config file may contain; anything else is an error
CONFIG_KEYS = ("gamma", "k_a", "K", "R_a", "x0", "schedule")


@dataclass(frozen=True)
class ModelParams:
    """Raw, possibly invalid, parameter bundle."""

    gamma: float = DEFAULT_GAMMA
    k_a: float = 0.0
    K: float = DEFAULT_K
    R_a: float = 0.0
    x0: float = 0.0
    schedule: tuple = (0.0, 1.0)


@dataclass(frozen=True)
class Model:
    """Validated immutable model.  Construct through validate()."""

    gamma: float
    k_a: float
    K: float
    R_a: float
    x0: float
    schedule: tuple

    @property
    def n_payments(self) -> int:
        return len(self.schedule) - 1

    @property
    def horizon(self) -> float:
        return self.schedule[-1]

    def period(self, i: int) -> tuple:
        """Closed interval [T_{i-1}, T_i] for payment index i in 1..N."""
        if not 1 <= i <= self.n_payments:
            raise IndexError("period index out of range")
        return (self.schedule[i - 1], self.schedule[i])


def validate(params) -> Model:
    """Check every model invariant; raise ValueError naming the first violated one."""
    gamma = float(params.gamma)
    k_a = float(params.k_a)
    K = float(params.K)
    R_a = float(params.R_a)
    x0 = float(params.x0)
    schedule = tuple(float(t) for t in params.schedule)

    if not math.isfinite(gamma) or gamma <= 1.0:
        raise ValueError("gamma must exceed 1")
    if not math.isfinite(k_a) or k_a < 0.0:
        raise ValueError("k_a must be nonnegative")
    if not math.isfinite(K) or K <= 0.0:
        raise ValueError("K must be positive")
    if not math.isfinite(R_a) or R_a < 0.0:
        raise ValueError("R_a must be nonnegative")
    if not math.isfinite(x0):
        raise ValueError("x0 must be finite")
    if len(schedule) < 2:
        raise ValueError("schedule needs at least two entries")
    if schedule[0] != 0.0:
        raise ValueError("schedule must start at 0")
    if any(not math.isfinite(t) for t in schedule):
        raise ValueError("schedule entries must be finite")
    if any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise ValueError("schedule must be strictly increasing")
    return Model(gamma, k_a, K, R_a, x0, schedule)


def utility(xi, gamma=DEFAULT_GAMMA):
    """Agent utility of a lump payment, u(xi) = xi**(1/gamma)."""
    arr = np.asarray(xi, dtype=float)
    if np.any(arr < 0.0):
        raise ValueError("payment must be nonnegative")
    out = arr ** (1.0 / gamma)
    return float(out) if out.ndim == 0 else out


def inverse_utility(eta, gamma=DEFAULT_GAMMA):
    """Payment delivering utility eta, the inverse of utility(); eta**gamma."""
    arr = np.asarray(eta, dtype=float)
    if np.any(arr < 0.0):
        raise ValueError("utility level must be nonnegative")
    out = arr ** gamma
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid on [0, y_max] with n_y cells (n_y + 1 nodes).

    safety scales the stability-limited time step; n_store caps how many
    time levels per period the solver keeps for interpolation and replay.
    """

    y_max: float = 4.0
    n_y: int = 400
    safety: float = 0.95
    n_store: int = 512

    def __post_init__(self):
        if not math.isfinite(self.y_max) or self.y_max <= 0.0:
            raise ValueError("y_max must be positive")
        if self.n_y < 16:
            raise ValueError("n_y must be at least 16")
        if not 0.0 < self.safety <= 1.0:
            raise ValueError("safety must lie in (0, 1]")
        if self.n_store < 1:
            raise ValueError("n_store must be positive")

    @property
    def dy(self) -> float:
        return self.y_max / self.n_y

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, self.y_max, self.n_y + 1)


def model_from_dict(cfg: dict) -> Model:
    """Build a validated Model from a config dictionary.

    Unknown keys are rejected; missing keys fall back to documented
    defaults (gamma=2, k_a=0, K=10, R_a=0, x0=0) except schedule, which
    is required.
    """
    if not isinstance(cfg, dict):
        raise ValueError("config must be a JSON object")
    unknown = sorted(set(cfg) - set(CONFIG_KEYS))
    if unknown:
        raise ValueError("unknown config key '%s'" % unknown[0])
    if "schedule" not in cfg:
        raise ValueError("config must provide a schedule")
    schedule = cfg["schedule"]
    if not isinstance(schedule, (list, tuple)):
        raise ValueError("schedule must be an array")
    params = ModelParams(
        gamma=cfg.get("gamma", DEFAULT_GAMMA),
        k_a=cfg.get("k_a", 0.0),
        K=cfg.get("K", DEFAULT_K),
        R_a=cfg.get("R_a", 0.0),
        x0=cfg.get("x0", 0.0),
        schedule=tuple(schedule),
    )
    return validate(params)


def load_model(path) -> Model:
    with open(path, "r", encoding="utf-8") as fh:
        cfg = json.load(fh)
    return model_from_dict(cfg)
