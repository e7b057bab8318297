"""Backward induction over contracting periods.

solve_initial chains the single-period solver and the payment map from the
final date back to time zero: the last period ends in the terminal slice
-y**gamma, every earlier period ends in the post-payment value f built from
the next period's start slice.  principal_value then optimizes the starting
promise over grid nodes at or above the reservation level.

solve_renegotiation treats each period as a stand-alone single-payment
contract: a fresh outside offer at a signing date is worth the same
time-proportional share of the outside option no matter where the date
falls, so every period is floored at (T_i - T_{i-1}) / T * R_a and the
per-period values are summed; with one period it reduces to the initial
problem exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .hjb import GridFunction, PeriodSolution, build_terminal, solve_period
from .model import GridSpec, Model
from .payments import PaymentLayer, intermediate_value

SLICE_TOL = 1e-9


@dataclass
class ContractSolution:
    """Everything the backward induction produced, periods in time order."""

    model: Model
    grid: GridSpec
    periods: list
    layers: list

    @property
    def n_periods(self) -> int:
        return len(self.periods)

    def start_values(self) -> np.ndarray:
        return self.periods[0].start_slice()


@dataclass
class NegotiationReport:
    """Optimized starting point of one negotiation setting."""

    v_p: float
    y0_star: float
    rent: float
    setting: str
    period_values: tuple = field(default=())
    period_starts: tuple = field(default=())


def solve_initial(model: Model, grid: GridSpec) -> ContractSolution:
    """Full backward induction: terminal slice, then alternate period solves
    and payment layers down to time zero."""
    sched = model.schedule
    n = model.n_payments
    terminal = build_terminal(grid, model.gamma)

    periods = [None] * n
    layers = [None] * (n - 1)
    tail = terminal
    for i in range(n, 0, -1):
        sol = solve_period(tail, sched[i - 1], sched[i], model, grid, index=i)
        periods[i - 1] = sol
        if i > 1:
            layer = intermediate_value(GridFunction(sol.start_slice(), grid.dy),
                                       model.gamma, index=i - 1)
            layers[i - 2] = layer
            tail = layer.f
    return ContractSolution(model, grid, periods, layers)


def principal_value(solution: ContractSolution, R_a=None) -> NegotiationReport:
    """Best starting promise at or above the reservation level.

    Maximizes v(0, y) over grid nodes y >= R_a, smallest node on ties, and
    adds the initial output level.  Any excess of the chosen node over R_a
    is the rent the principal concedes voluntarily.
    """
    model = solution.model
    if R_a is None:
        R_a = model.R_a
    grid = solution.grid
    if R_a > grid.y_max:
        raise ValueError("reservation utility exceeds the grid")
    v0 = solution.start_values()
    y = solution.periods[0].y
    ok = y >= R_a - 1e-12
    vals = np.where(ok, v0, -np.inf)
    best = int(np.argmax(vals))
    y0 = float(y[best])
    v_p = model.x0 + float(v0[best])
    return NegotiationReport(v_p, y0, max(0.0, y0 - R_a), "initial")


def employment_interval(solution: ContractSolution, i: int) -> np.ndarray:
    """Nodes where keeping the agent through period i weakly helps: the value
    at the period's start is at least the post-payment value at its end."""
    n = solution.n_periods
    if not 1 <= i <= n - 1:
        raise IndexError("period index out of range")
    before = solution.periods[i - 1].start_slice()
    after = solution.periods[i].start_slice()
    return before >= after - SLICE_TOL


def truncation_region(solution: ContractSolution, i: int) -> np.ndarray:
    """Nodes where the i-th payment map pays nothing."""
    n = solution.n_periods
    if not 1 <= i <= n - 1:
        raise IndexError("payment index out of range")
    return solution.layers[i - 1].eta_star <= 1e-10


def renegotiation_reservations(model: Model) -> list:
    """Per-period reservation levels restated in initial-date units: the
    time-proportional share of the outside option grown at the agent's
    rate to each signing date.  The renegotiation solver floors each
    period at the share as valued at the signing date itself, which drops
    the growth factor; these grown levels are the equivalent quotes for
    comparing periods on a common initial-date scale."""
    sched = model.schedule
    T = model.horizon
    k_a = model.k_a
    R_a = model.R_a
    out = []
    for i in range(1, model.n_payments + 1):
        out.append(math.exp(k_a * sched[i - 1]) * (sched[i] - sched[i - 1]) / T * R_a)
    return out


def solve_renegotiation(model: Model, grid: GridSpec):
    """Chain of stand-alone single-payment contracts, one per period.

    Each period i is solved on [T_{i-1}, T_i] with terminal -y**gamma and
    optimized over starting nodes y at or above the period's floor, the
    time-proportional share (T_i - T_{i-1}) / T * R_a of the outside option
    as valued at the signing date itself.  The floor does not grow with the
    calendar position: a fresh offer signed later is still a fresh offer.
    The principal's total is the sum, positioned at time zero.  Returns the
    report together with the per-period solutions.
    """
    sched = model.schedule
    n = model.n_payments
    T = model.horizon
    terminal = build_terminal(grid, model.gamma)
    y = grid.nodes

    total = model.x0
    period_values = []
    period_starts = []
    sols = []
    first_floor = 0.0
    for i in range(1, n + 1):
        floor = (sched[i] - sched[i - 1]) / T * model.R_a
        if i == 1:
            first_floor = floor
        if floor > grid.y_max:
            raise ValueError("per-period reservation exceeds the grid")
        sol = solve_period(terminal, sched[i - 1], sched[i], model, grid, index=i)
        sols.append(sol)
        v0 = sol.start_slice()
        ok = y >= floor - 1e-12
        vals = np.where(ok, v0, -np.inf)
        best = int(np.argmax(vals))
        period_values.append(float(v0[best]))
        period_starts.append(float(y[best]))
        total += float(v0[best])

    report = NegotiationReport(total, period_starts[0],
                               max(0.0, period_starts[0] - first_floor),
                               "renegotiation", tuple(period_values),
                               tuple(period_starts))
    return report, sols


@dataclass
class SettingComparison:
    initial: NegotiationReport
    renegotiation: NegotiationReport
    difference: float
    winner: str
    tolerance: float


def compare_settings(model: Model, grid: GridSpec, tolerance: float = 0.0) -> SettingComparison:
    """Solve both negotiation settings on the same grid and name the winner;
    a gap inside the tolerance is reported as indistinguishable."""
    initial = principal_value(solve_initial(model, grid))
    reneg, _ = solve_renegotiation(model, grid)
    diff = initial.v_p - reneg.v_p
    if abs(diff) <= tolerance:
        winner = "indistinguishable"
    elif diff > 0.0:
        winner = "initial"
    else:
        winner = "renegotiation"
    return SettingComparison(initial, reneg, diff, winner, tolerance)


def refinement_delta(model: Model, grid: GridSpec, y_cap=None,
                     fine_solution: ContractSolution = None) -> float:
    """Empirical scheme tolerance: change in v(0, .) when the spatial grid is
    coarsened by half (time step following the stability bound), measured on
    the coarse nodes up to y_cap.  Pass fine_solution to reuse a solve."""
    if grid.n_y % 2 != 0:
        raise ValueError("n_y must be even to compare against the halved grid")
    coarse = GridSpec(grid.y_max, grid.n_y // 2, grid.safety, grid.n_store)
    fine_sol = fine_solution if fine_solution is not None else solve_initial(model, grid)
    coarse_sol = solve_initial(model, coarse)
    vf = fine_sol.start_values()[::2]
    vc = coarse_sol.start_values()
    y = coarse_sol.periods[0].y
    if y_cap is None:
        y_cap = grid.y_max
    mask = y <= y_cap + 1e-12
    return float(np.max(np.abs(vf[mask] - vc[mask])))
