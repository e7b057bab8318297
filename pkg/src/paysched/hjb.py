"""Single-period solver for the principal's value PDE.

Between payment dates the reduced value v(t, y) solves, backward from a
terminal slice,

    v_t + k_a * y * v_y + sup_{|z|<=K} { z + 0.5*(v_y + v_yy)*z**2 } = 0

on (0, y_max) with v(t, 0) = 0 pinned (limited liability makes 0 absorbing)
and a Dirichlet right boundary set to the value of an explicit admissible
strategy: zero effort until the period's payment date t_anchor, then pay
everything, worth -exp(gamma*k_a*(t_anchor - t)) * y_max**gamma.  Anchoring
at the period's own payment date rather than the final horizon keeps the
data tight; with a discounting agent the far-horizon variant is orders of
magnitude too low and its upwind transport drags nearby nodes under the
analytic lower bound.

The scheme is explicit in time and monotone in space: central second
difference for the diffusion 0.5*z**2*v_yy, forward difference for the
nonnegative drift (0.5*z**2 + k_a*y)*v_y, plus the source z.  For each
frozen z the update is a convex combination of neighbor values whenever
dt <= dy**2 / (K**2 + (0.5*K**2 + k_a*y_max)*dy); maximizing the quadratic
update over z in [-K, K] has the same closed form as the pointwise
Hamiltonian, so the per-node control comes straight from that formula.

Storage: the full step-by-step surface can run to millions of time levels
at desk resolutions, so each period keeps at most n_store + 1 evenly spaced
time levels.  Alongside every stored level (except the terminal one) the
solver keeps the slice one sub-step later and the control used, which lets
discrete_residual replay each stored update bit-for-bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .model import GridSpec, Model


@dataclass
class GridFunction:
    """Values sampled on the uniform y-grid (node j at j*dy)."""

    values: np.ndarray
    dy: float

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1 or self.values.size < 2:
            raise ValueError("grid function needs a 1-d array of nodes")
        if self.dy <= 0.0:
            raise ValueError("dy must be positive")

    @property
    def y(self) -> np.ndarray:
        return np.linspace(0.0, self.dy * (self.values.size - 1), self.values.size)

    def interp(self, yq):
        return np.interp(yq, self.y, self.values)


def cfl_dt(grid: GridSpec, model: Model) -> float:
    """Largest stable explicit step: safety * dy^2 / (K^2 + (K^2/2 + k_a*y_max)*dy).

    Guarantees nonnegative stencil weights for every |z| <= K at every node.
    Callers cap the result at the period length, so a tiny K simply means
    one step per stored interval.
    """
    dy = grid.dy
    K = model.K
    return grid.safety * dy * dy / (K * K + (0.5 * K * K + model.k_a * grid.y_max) * dy)


@njit(cache=True)
def _bright(gamma, k_a, t_anchor, t, y_top):
    # zero-effort lower bound used as Dirichlet data on the right edge
    return -math.exp(gamma * k_a * (t_anchor - t)) * y_top ** gamma


@njit(cache=True)
def _node_update(vj, dp, d2, z, kay, dt):
    return vj + dt * (z + (0.5 * z * z + kay) * dp + 0.5 * z * z * d2)


@njit(cache=True)
def _policy_slice(v, y, inv_dy, inv_dy2, K, out_z):
    n = v.shape[0]
    out_z[0] = 0.0
    for j in range(1, n - 1):
        dp = (v[j + 1] - v[j]) * inv_dy
        d2 = (v[j + 1] - 2.0 * v[j] + v[j - 1]) * inv_dy2
        a = dp + d2
        if a < 0.0:
            z = -1.0 / a
            if z > K:
                z = K
        else:
            z = K
        out_z[j] = z
    out_z[n - 1] = out_z[n - 2]


@njit(cache=True)
def _step_policy(v, y, inv_dy, inv_dy2, k_a, K, dt, bright, out_v, out_z):
    n = v.shape[0]
    out_v[0] = 0.0
    out_z[0] = 0.0
    for j in range(1, n - 1):
        dp = (v[j + 1] - v[j]) * inv_dy
        d2 = (v[j + 1] - 2.0 * v[j] + v[j - 1]) * inv_dy2
        a = dp + d2
        if a < 0.0:
            z = -1.0 / a
            if z > K:
                z = K
        else:
            z = K
        out_v[j] = _node_update(v[j], dp, d2, z, k_a * y[j], dt)
        out_z[j] = z
    out_v[n - 1] = bright
    out_z[n - 1] = out_z[n - 2]


@njit(cache=True)
def _step_replay(v, z, y, inv_dy, inv_dy2, k_a, dt, bright, out_v):
    # same arithmetic as _step_policy with the control supplied, for replay checks
    n = v.shape[0]
    out_v[0] = 0.0
    for j in range(1, n - 1):
        dp = (v[j + 1] - v[j]) * inv_dy
        d2 = (v[j + 1] - 2.0 * v[j] + v[j - 1]) * inv_dy2
        out_v[j] = _node_update(v[j], dp, d2, z[j], k_a * y[j], dt)
    out_v[n - 1] = bright


@njit(cache=True)
def _sweep_gap(v_in, y, inv_dy, inv_dy2, k_a, K, gamma, t_hi, t_lo, n_sub,
               t_anchor, v_out, z_out, src_out):
    """March from t_hi down to t_lo in n_sub uniform sub-steps.

    v_out gets the slice at t_lo, z_out the control used on the final
    sub-step, src_out the slice one sub-step above t_lo.  Returns the dt
    of that final sub-step.
    """
    n = v_in.shape[0]
    cur = v_in.copy()
    nxt = np.empty(n)
    zs = np.empty(n)
    y_top = y[n - 1]
    dt_last = 0.0
    for s in range(n_sub):
        if s == n_sub - 1:
            t_dst = t_lo
        else:
            t_dst = t_hi + (t_lo - t_hi) * ((s + 1.0) / n_sub)
        if s == 0:
            t_src = t_hi
        else:
            t_src = t_hi + (t_lo - t_hi) * (s / n_sub)
        dt = t_src - t_dst
        bright = _bright(gamma, k_a, t_anchor, t_dst, y_top)
        _step_policy(cur, y, inv_dy, inv_dy2, k_a, K, dt, bright, nxt, zs)
        if s == n_sub - 1:
            src_out[:] = cur
            dt_last = dt
        tmp = cur
        cur = nxt
        nxt = tmp
    v_out[:] = cur
    z_out[:] = zs
    return dt_last


@dataclass
class PeriodSolution:
    """Value surface and feedback control for one inter-payment period.

    times is ascending with times[0] = t_start and times[-1] = t_end; the
    terminal row of surface is the supplied terminal slice.  step_src[k]
    and step_dt[k] describe the final sub-step that produced surface[k],
    so the update into every stored level can be replayed exactly.
    """

    index: int
    t_start: float
    t_end: float
    times: np.ndarray
    surface: np.ndarray
    feedback: np.ndarray
    step_src: np.ndarray
    step_dt: np.ndarray
    y: np.ndarray
    dy: float
    model: Model
    t_anchor: float
    n_steps: int

    def start_slice(self) -> np.ndarray:
        return self.surface[0]

    def end_slice(self) -> np.ndarray:
        return self.surface[-1]


def solve_period(terminal: GridFunction, t_start: float, t_end: float,
                 model: Model, grid: GridSpec, t_anchor=None, index: int = 0) -> PeriodSolution:
    """Solve one period backward from the terminal slice at t_end.

    t_anchor is the payment date the right-boundary strategy value pays at;
    it defaults to the period's own end.
    """
    if t_end < t_start:
        raise ValueError("t_end must not precede t_start")
    y = grid.nodes
    n = y.size
    vals = np.asarray(terminal.values, dtype=float)
    if vals.size != n:
        raise ValueError("terminal slice does not match the grid")
    if abs(terminal.dy - grid.dy) > 1e-12 * grid.dy:
        raise ValueError("terminal slice spacing does not match the grid")
    if not np.all(np.isfinite(vals)):
        raise ValueError("terminal slice must be finite")
    if abs(vals[0]) > 1e-12:
        raise ValueError("terminal slice must vanish at y = 0")
    if t_anchor is None:
        t_anchor = t_end

    term = vals.copy()
    term[0] = 0.0
    inv_dy = 1.0 / grid.dy
    inv_dy2 = inv_dy * inv_dy

    if t_end == t_start:
        z0 = np.empty(n)
        _policy_slice(term, y, inv_dy, inv_dy2, model.K, z0)
        z0[0] = 0.0
        return PeriodSolution(index, t_start, t_end, np.array([t_start]),
                              term[None, :].copy(), z0[None, :],
                              np.empty((0, n)), np.empty(0), y, grid.dy,
                              model, float(t_anchor), 0)

    dt_max = cfl_dt(grid, model)
    span = t_end - t_start
    total_steps = max(1, int(math.ceil(span / dt_max - 1e-12)))
    n_check = min(grid.n_store, total_steps)
    times = np.linspace(t_start, t_end, n_check + 1)

    surface = np.empty((n_check + 1, n))
    feedback = np.empty((n_check + 1, n))
    step_src = np.empty((n_check, n))
    step_dt = np.empty(n_check)

    surface[n_check] = term
    _policy_slice(term, y, inv_dy, inv_dy2, model.K, feedback[n_check])
    feedback[n_check, 0] = 0.0

    n_steps = 0
    for k in range(n_check - 1, -1, -1):
        t_hi = times[k + 1]
        t_lo = times[k]
        gap = t_hi - t_lo
        n_sub = max(1, int(math.ceil(gap / dt_max - 1e-12)))
        step_dt[k] = _sweep_gap(surface[k + 1], y, inv_dy, inv_dy2,
                                model.k_a, model.K, model.gamma,
                                t_hi, t_lo, n_sub, float(t_anchor),
                                surface[k], feedback[k], step_src[k])
        n_steps += n_sub
        if not np.all(np.isfinite(surface[k])):
            bad = int(np.flatnonzero(~np.isfinite(surface[k]))[0])
            raise RuntimeError(
                "non-finite value at t=%.6g, y=%.6g" % (t_lo, y[bad]))

    return PeriodSolution(index, t_start, t_end, times, surface, feedback,
                          step_src, step_dt, y, grid.dy, model,
                          float(t_anchor), n_steps)


def discrete_residual(sol: PeriodSolution) -> float:
    """Replay the final sub-step into every stored level with the stored
    control and return the worst absolute mismatch.  Zero up to float
    accumulation for an untouched solution; a perturbed surface shows up
    at roughly the size of the perturbation.
    """
    m = sol.times.size
    if m == 1:
        return 0.0
    inv_dy = 1.0 / sol.dy
    inv_dy2 = inv_dy * inv_dy
    y_top = sol.y[-1]
    buf = np.empty(sol.y.size)
    worst = 0.0
    for k in range(m - 1):
        bright = _bright(sol.model.gamma, sol.model.k_a, sol.t_anchor,
                         sol.times[k], y_top)
        _step_replay(sol.step_src[k], sol.feedback[k], sol.y, inv_dy, inv_dy2,
                     sol.model.k_a, sol.step_dt[k], bright, buf)
        diff = np.max(np.abs(sol.surface[k] - buf))
        if diff > worst:
            worst = float(diff)
    return worst


def _interp_time(times: np.ndarray, table: np.ndarray, t: float) -> np.ndarray:
    m = times.size
    if m == 1:
        return table[0]
    k = int(np.searchsorted(times, t, side="right")) - 1
    if k < 0:
        k = 0
    if k > m - 2:
        k = m - 2
    w = (t - times[k]) / (times[k + 1] - times[k])
    if w == 0.0:
        return table[k]
    return (1.0 - w) * table[k] + w * table[k + 1]


def eval_surface(sol: PeriodSolution, t: float, yq):
    """Bilinear interpolation of the stored value surface; exact at nodes."""
    tol = 1e-12 * max(1.0, abs(sol.t_end))
    if t < sol.t_start - tol or t > sol.t_end + tol:
        raise ValueError("time outside the period")
    yq_arr = np.asarray(yq, dtype=float)
    if np.any(yq_arr < -1e-12) or np.any(yq_arr > sol.y[-1] + 1e-12):
        raise ValueError("state outside the grid")
    t = min(max(t, sol.t_start), sol.t_end)
    row = _interp_time(sol.times, sol.surface, t)
    out = np.interp(yq_arr, sol.y, row)
    return float(out) if out.ndim == 0 else out


def eval_feedback(sol: PeriodSolution, t: float, yq):
    """Bilinear interpolation of the stored feedback control.

    Queries are clamped to the grid: simulated paths may drift past y_max,
    where the boundary-column control applies.
    """
    tol = 1e-12 * max(1.0, abs(sol.t_end))
    if t < sol.t_start - tol or t > sol.t_end + tol:
        raise ValueError("time outside the period")
    t = min(max(t, sol.t_start), sol.t_end)
    yq_arr = np.clip(np.asarray(yq, dtype=float), 0.0, sol.y[-1])
    row = _interp_time(sol.times, sol.feedback, t)
    out = np.interp(yq_arr, sol.y, row)
    return float(out) if out.ndim == 0 else out


def build_terminal(grid: GridSpec, gamma: float) -> GridFunction:
    """Terminal slice -y**gamma delivering the final promised utility."""
    y = grid.nodes
    vals = -(y ** gamma)
    vals[0] = 0.0
    return GridFunction(vals, grid.dy)
