"""Forward verification of solved contracts.

simulate_principal drives the promised-utility state with the stored
feedback control through every period, applies the payment maps at the
scheduled dates, and compares the sample mean of the principal's payoff
against the PDE value.  agent_deviation reruns the same paths twice with
common random numbers, once at the contract's implied effort and once with
a bounded perturbation added, to confirm the agent cannot gain.

dp_oracle is an independent check built on none of the PDE machinery: a
trinomial chain on the same y-nodes, matched to the first two moments of
the state increment, maximized exhaustively over a z-grid each step and
over payment nodes at transaction dates.

Randomness is counter-based: step g draws from Philox keyed by
(seed, g), so path counts, vectorization order and deviation arms never
perturb each other's samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .hjb import GridFunction, eval_feedback, eval_surface, _bright
from .model import Model
from .pipeline import ContractSolution


@dataclass(frozen=True)
class SimConfig:
    y0: float
    n_paths: int = 10000
    n_steps_per_period: int = 200
    seed: int = 12345

    def __post_init__(self):
        if self.n_paths < 1:
            raise ValueError("n_paths must be at least 1")
        if self.n_steps_per_period < 1:
            raise ValueError("n_steps_per_period must be at least 1")
        if self.y0 < 0.0:
            raise ValueError("starting promise must be nonnegative")


@dataclass
class SimReport:
    estimate: float
    std_error: float
    pde_value: float
    z_score: float
    n_paths: int
    seed: int
    clamp_fraction: float


def _step_normals(seed, g, n):
    gen = np.random.Generator(np.random.Philox(key=np.array([seed, g], dtype=np.uint64)))
    return gen.standard_normal(n)


def simulate_principal(solution: ContractSolution, cfg: SimConfig,
                       z_override=None, payments_enabled=True,
                       return_paths=False):
    """Euler simulation of the promised-utility state under the solved
    feedback; per-path payoff is x0 + accumulated output drift minus payment
    costs minus the terminal settlement.

    z_override freezes the control at a constant (diagnostics); paths that
    get clamped at zero stay there because the stored control vanishes on
    the axis.  With return_paths the SimReport comes paired with the raw
    per-path columns (payoff, terminal promise, utils paid).
    """
    model = solution.model
    grid = solution.grid
    if cfg.y0 > grid.y_max:
        raise ValueError("starting promise outside the grid")
    gamma = model.gamma
    k_a = model.k_a
    n = cfg.n_paths

    Y = np.full(n, float(cfg.y0))
    gain = np.zeros(n)
    cost = np.zeros(n)
    eta_sum = np.zeros(n)
    ever_clamped = np.zeros(n, dtype=bool)
    g = 0
    n_periods = solution.n_periods
    for pi, sol in enumerate(solution.periods, start=1):
        span = sol.t_end - sol.t_start
        dt = span / cfg.n_steps_per_period
        sq = math.sqrt(dt)
        for s in range(cfg.n_steps_per_period):
            t = sol.t_start + span * (s / cfg.n_steps_per_period)
            if z_override is None:
                z = eval_feedback(sol, t, Y)
            else:
                z = np.full(n, float(z_override))
            xi = _step_normals(cfg.seed, g, n)
            Y = Y + (0.5 * z * z + k_a * Y) * dt + z * sq * xi
            gain += z * dt
            neg = Y < 0.0
            ever_clamped |= neg
            Y[neg] = 0.0
            g += 1
        if pi < n_periods and payments_enabled:
            layer = solution.layers[pi - 1]
            eta = np.interp(Y, sol.y, layer.eta_star)
            eta = np.clip(eta, 0.0, Y)
            cost += eta ** gamma
            eta_sum += eta
            Y = Y - eta

    payoff = model.x0 + gain - cost - Y ** gamma
    estimate = float(np.mean(payoff))
    se = float(np.std(payoff, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    pde = model.x0 + eval_surface(solution.periods[0], solution.periods[0].t_start, cfg.y0)
    z_score = (estimate - pde) / se if se > 0.0 else None
    report = SimReport(estimate, se, float(pde), z_score, n, cfg.seed,
                       float(np.mean(ever_clamped)))
    if return_paths:
        return report, {"payoff": payoff, "y_T": Y.copy(), "eta_total": eta_sum}
    return report


@dataclass
class DeviationReport:
    j_star: float
    se_star: float
    j_dev: float
    se_dev: float
    se_diff: float
    n_paths: int
    seed: int


def agent_deviation(solution: ContractSolution, cfg: SimConfig, deviation) -> DeviationReport:
    """Paired simulation of the agent's realized objective at the contract
    effort and at a perturbed effort, on common random numbers.

    deviation is a constant or a callable (t, y) -> shift; values must stay
    within [-1, 1].  The perturbed effort tilts the state drift by z*eps
    (the contract tracks output innovations, which the deviation biases)
    while the effort cost is charged at the shifted level.
    """
    if callable(deviation):
        eps_fn = deviation
    else:
        const = float(deviation)
        if abs(const) > 1.0:
            raise ValueError("deviation exceeds the unit bound")
        eps_fn = None

    model = solution.model
    grid = solution.grid
    if cfg.y0 > grid.y_max:
        raise ValueError("starting promise outside the grid")
    gamma = model.gamma
    k_a = model.k_a
    n = cfg.n_paths

    Ys = np.full(n, float(cfg.y0))
    Yd = np.full(n, float(cfg.y0))
    Js = np.zeros(n)
    Jd = np.zeros(n)
    g = 0
    n_periods = solution.n_periods
    for pi, sol in enumerate(solution.periods, start=1):
        span = sol.t_end - sol.t_start
        dt = span / cfg.n_steps_per_period
        sq = math.sqrt(dt)
        for s in range(cfg.n_steps_per_period):
            t = sol.t_start + span * (s / cfg.n_steps_per_period)
            disc = math.exp(-k_a * t)
            zs = eval_feedback(sol, t, Ys)
            zd = eval_feedback(sol, t, Yd)
            if eps_fn is None:
                eps = const
            else:
                eps = np.asarray(eps_fn(t, Yd), dtype=float)
                if np.any(np.abs(eps) > 1.0):
                    raise ValueError("deviation exceeds the unit bound")
            xi = _step_normals(cfg.seed, g, n)
            Ys = Ys + (0.5 * zs * zs + k_a * Ys) * dt + zs * sq * xi
            Yd = Yd + (0.5 * zd * zd + k_a * Yd + zd * eps) * dt + zd * sq * xi
            Js -= disc * 0.5 * zs * zs * dt
            Jd -= disc * 0.5 * (zd + eps) ** 2 * dt
            Ys[Ys < 0.0] = 0.0
            Yd[Yd < 0.0] = 0.0
            g += 1
        disc_i = math.exp(-k_a * sol.t_end)
        if pi < n_periods:
            layer = solution.layers[pi - 1]
            es = np.clip(np.interp(Ys, sol.y, layer.eta_star), 0.0, Ys)
            ed = np.clip(np.interp(Yd, sol.y, layer.eta_star), 0.0, Yd)
            Js += disc_i * es
            Jd += disc_i * ed
            Ys = Ys - es
            Yd = Yd - ed
        else:
            Js += disc_i * Ys
            Jd += disc_i * Yd

    sqn = math.sqrt(n)
    return DeviationReport(
        float(np.mean(Js)), float(np.std(Js, ddof=1) / sqn) if n > 1 else 0.0,
        float(np.mean(Jd)), float(np.std(Jd, ddof=1) / sqn) if n > 1 else 0.0,
        float(np.std(Jd - Js, ddof=1) / sqn) if n > 1 else 0.0,
        n, cfg.seed)


@njit(cache=True)
def _dp_step(W, ys, zs, k_a, dt, h, bright, out):
    """One backward trinomial step; returns (ok, bad_z, bad_y)."""
    n = W.shape[0]
    out[0] = 0.0
    for j in range(1, n - 1):
        yj = ys[j]
        best = -1e300
        for m in range(zs.shape[0]):
            z = zs[m]
            b = 0.5 * z * z + k_a * yj
            q = (z * z * dt + b * b * dt * dt) / (h * h)
            r = b * dt / h
            pu = 0.5 * (q + r)
            pd = 0.5 * (q - r)
            if pd < -1e-12 or q > 1.0 + 1e-12:
                return False, z, yj
            if pd < 0.0:
                pd = 0.0
            cand = z * dt + pu * W[j + 1] + (1.0 - pu - pd) * W[j] + pd * W[j - 1]
            if cand > best:
                best = cand
        out[j] = best
    out[n - 1] = bright
    return True, 0.0, 0.0


@njit(cache=True)
def _dp_pay(W, ys, gamma, out):
    # exhaustive rebate over grid nodes: pay down from node j to any l <= j
    n = W.shape[0]
    for j in range(n):
        best = -1e300
        for l in range(j + 1):
            cand = -((ys[j] - ys[l]) ** gamma) + W[l]
            if cand > best:
                best = cand
        out[j] = best
    out[0] = 0.0


def dp_oracle(model: Model, n_t, n_y, n_z, y_max=4.0) -> GridFunction:
    """Trinomial dynamic program on the y-nodes, exhaustive over a z-grid.

    Steps are split across periods in proportion to length; payment dates
    land exactly on step boundaries.  Returns the value slice at time zero.
    Sizes are capped because every (step, node, control) triple is visited.
    """
    if n_t < 1 or n_y < 2 or n_z < 1:
        raise ValueError("oracle needs n_t >= 1, n_y >= 2, n_z >= 1")
    if n_t * n_y * n_z > 10_000_000:
        raise ValueError("oracle size guard exceeded")
    K = model.K
    gamma = model.gamma
    k_a = model.k_a
    sched = model.schedule
    T = model.horizon
    h = y_max / n_y
    ys = np.linspace(0.0, y_max, n_y + 1)
    zs = np.array([0.0]) if n_z == 1 else np.linspace(-K, K, n_z)

    W = -(ys ** gamma)
    W[0] = 0.0
    out = np.empty_like(W)
    n_periods = model.n_payments
    for i in range(n_periods, 0, -1):
        t_lo, t_hi = sched[i - 1], sched[i]
        steps = max(1, int(round(n_t * (t_hi - t_lo) / T)))
        dt = (t_hi - t_lo) / steps
        for s in range(steps, 0, -1):
            t_dst = t_lo + (t_hi - t_lo) * ((s - 1) / steps)
            bright = _bright(gamma, k_a, t_hi, t_dst, y_max)
            ok, bz, by = _dp_step(W, ys, zs, k_a, dt, h, bright, out)
            if not ok:
                raise ValueError(
                    "trinomial moment matching infeasible at z=%.6g, y=%.6g; "
                    "reduce the time step" % (bz, by))
            W, out = out, W
        if i > 1:
            _dp_pay(W, ys, gamma, out)
            W, out = out, W
    return GridFunction(W.copy(), h)
