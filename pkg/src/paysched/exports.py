"""Plain-text serialization of solver artifacts.

Everything is emitted at full double precision (%.17g round-trips binary64)
with fixed row and key ordering, so identical runs produce byte-identical
files.
"""

from __future__ import annotations

import json

import numpy as np

from .pipeline import ContractSolution, NegotiationReport


def _fmt(x) -> str:
    return "%.17g" % float(x)


def grid_csv_text(sol) -> str:
    """Value surface rows: t ascending, then y ascending."""
    lines = ["t,y,v,z_star"]
    for k in range(sol.times.size):
        t = sol.times[k]
        for j in range(sol.y.size):
            lines.append(",".join((_fmt(t), _fmt(sol.y[j]),
                                   _fmt(sol.surface[k, j]),
                                   _fmt(sol.feedback[k, j]))))
    return "\n".join(lines) + "\n"


def payment_csv_text(layer) -> str:
    lines = ["y,f,eta_star"]
    y = layer.f.y
    for j in range(y.size):
        lines.append(",".join((_fmt(y[j]), _fmt(layer.f.values[j]),
                               _fmt(layer.eta_star[j]))))
    return "\n".join(lines) + "\n"


def paths_csv_text(table) -> str:
    """Per-path simulation columns in path order."""
    lines = ["path,payoff,y_T,eta_total"]
    payoff = table["payoff"]
    y_t = table["y_T"]
    eta = table["eta_total"]
    for i in range(len(payoff)):
        lines.append(",".join((str(i), _fmt(payoff[i]), _fmt(y_t[i]),
                               _fmt(eta[i]))))
    return "\n".join(lines) + "\n"


def sweep_csv_text(param_name, rows, ra_grid) -> str:
    """Wide table: one row per parameter point, one V_p column per R_a."""
    header = [param_name] + ["V_p[R_a=%s]" % _fmt(r) for r in ra_grid]
    lines = [",".join(header)]
    for value, vps in rows:
        lines.append(",".join([_fmt(value)] + [_fmt(v) for v in vps]))
    return "\n".join(lines) + "\n"


def json_text(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _indices(mask) -> list:
    return [int(i) for i in np.flatnonzero(mask)]


def report_dict(report: NegotiationReport) -> dict:
    out = {"v_p": report.v_p, "y0_star": report.y0_star,
           "rent": report.rent, "setting": report.setting}
    if report.period_values:
        out["period_values"] = list(report.period_values)
        out["period_starts"] = list(report.period_starts)
    return out


def solution_summary(solution: ContractSolution, report: NegotiationReport) -> dict:
    from .pipeline import employment_interval, truncation_region

    m = solution.model
    summary = {
        "model": {"gamma": m.gamma, "k_a": m.k_a, "K": m.K, "R_a": m.R_a,
                  "x0": m.x0, "schedule": list(m.schedule)},
        "grid": {"y_max": solution.grid.y_max, "n_y": solution.grid.n_y,
                 "safety": solution.grid.safety},
        "report": report_dict(report),
        "employment": {}, "truncation": {},
    }
    for i in range(1, solution.n_periods):
        e = employment_interval(solution, i)
        t = truncation_region(solution, i)
        summary["employment"][str(i)] = {"count": int(e.sum()), "nodes": _indices(e)}
        summary["truncation"][str(i)] = {"count": int(t.sum()), "nodes": _indices(t)}
    return summary
