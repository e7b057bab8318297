"""Batch front-end for the solver, simulator, bounds and parameter sweeps.

Every command reads an optional JSON model config, applies --set overrides
(dedicated flags like --ny win over --set), computes in memory, and only
then writes its artifacts, so a failed run leaves no partial output tree.
Identical inputs produce byte-identical trees.

Exit codes: 0 success, 1 user error, 2 internal invariant violation.
Errors print one line to stderr: "user-error: ..." or "internal-error: ...".
"""

from __future__ import annotations

import argparse
import os
import sys

from . import bounds, exports, pipeline, simulate
from .model import GridSpec, Model, load_model, model_from_dict

DEFAULT_SCHEDULE = (0.0, 2.0, 4.0, 6.0, 8.0)

_FLOAT_KEYS = {"gamma", "k_a", "K", "R_a", "x0", "y_max", "safety", "y0",
               "t_total", "tol"}
_INT_KEYS = {"n_y", "n_store", "paths", "steps", "seed", "n_z", "n_t",
             "per_path"}
_FLOAT_LIST_KEYS = {"schedule", "ra_grid", "ka_list", "t1_list"}
_INT_LIST_KEYS = {"n_list"}
_MODEL_KEYS = {"gamma", "k_a", "K", "R_a", "x0", "schedule"}

DEFAULT_RA_GRID = (0.0, 0.5, 1.0, 1.5, 2.0)
DEFAULT_N_LIST = (1, 5, 10)
DEFAULT_KA_LIST = (0.0, 0.05, 0.2)
DEFAULT_T1_LIST = (1.0, 1.5, 2.0, 2.5, 3.0, 3.5)


class UserError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UserError(message)


def _parse_sets(pairs) -> dict:
    out = {}
    for item in pairs or ():
        if "=" not in item:
            raise UserError("--set needs key=value, got '%s'" % item)
        key, _, raw = item.partition("=")
        key = key.strip()
        raw = raw.strip()
        try:
            if key in _FLOAT_KEYS:
                out[key] = float(raw)
            elif key in _INT_KEYS:
                out[key] = int(raw)
            elif key in _FLOAT_LIST_KEYS:
                out[key] = tuple(float(v) for v in raw.split(",") if v != "")
            elif key in _INT_LIST_KEYS:
                out[key] = tuple(int(v) for v in raw.split(",") if v != "")
            else:
                raise UserError("unknown --set key '%s'" % key)
        except ValueError as exc:
            raise UserError("bad value for --set %s: %s" % (key, exc))
    return out


def _load_base_model(args, sets) -> Model:
    if args.config is not None:
        if not os.path.exists(args.config):
            raise UserError("config file not found: %s" % args.config)
        try:
            model = load_model(args.config)
        except ValueError as exc:
            raise UserError(str(exc))
        cfg = {"gamma": model.gamma, "k_a": model.k_a, "K": model.K,
               "R_a": model.R_a, "x0": model.x0,
               "schedule": model.schedule}
    else:
        cfg = {"schedule": DEFAULT_SCHEDULE}
    for key in _MODEL_KEYS & set(sets):
        cfg[key] = sets[key]
    try:
        return model_from_dict(cfg)
    except ValueError as exc:
        raise UserError(str(exc))


def _make_grid(args, sets, model) -> GridSpec:
    # default domain scales off the reservation level, wide enough that the
    # optimum promise sits well inside
    y_max = 4.0 * max(2.0 * model.R_a, 2.0)
    y_max = sets.get("y_max", y_max)
    n_y = sets.get("n_y", 400)
    safety = sets.get("safety", 0.95)
    n_store = sets.get("n_store", 512)
    if args.ymax is not None:
        y_max = args.ymax
    if args.ny is not None:
        n_y = args.ny
    try:
        return GridSpec(y_max, n_y, safety, n_store)
    except ValueError as exc:
        raise UserError(str(exc))


def _sim_inputs(args, sets):
    paths = sets.get("paths", 10000)
    seed = sets.get("seed", 12345)
    steps = sets.get("steps", 200)
    if args.paths is not None:
        paths = args.paths
    if args.seed is not None:
        seed = args.seed
    return paths, steps, seed


def _schedule_uniform(t_total, n):
    return tuple(i * t_total / n for i in range(n + 1))


def _check_ra(grid, ra_grid):
    for r_a in ra_grid:
        if r_a > grid.y_max:
            raise UserError("R_a grid point %.6g exceeds y_max %.6g" % (r_a, grid.y_max))


def cmd_solve(args, sets):
    model = _load_base_model(args, sets)
    grid = _make_grid(args, sets, model)
    solution = pipeline.solve_initial(model, grid)
    report = pipeline.principal_value(solution)
    outputs = {"summary.json": exports.json_text(
        exports.solution_summary(solution, report))}
    for sol in solution.periods:
        outputs["period_%d.csv" % sol.index] = exports.grid_csv_text(sol)
    for layer in solution.layers:
        outputs["payment_%d.csv" % layer.index] = exports.payment_csv_text(layer)
    return outputs


def cmd_simulate(args, sets):
    model = _load_base_model(args, sets)
    grid = _make_grid(args, sets, model)
    paths, steps, seed = _sim_inputs(args, sets)
    solution = pipeline.solve_initial(model, grid)
    report = pipeline.principal_value(solution)
    y0 = sets.get("y0", report.y0_star)
    per_path = bool(sets.get("per_path", 0))
    try:
        cfg = simulate.SimConfig(y0, paths, steps, seed)
        sim = simulate.simulate_principal(solution, cfg, return_paths=per_path)
    except ValueError as exc:
        raise UserError(str(exc))
    table = None
    if per_path:
        sim, table = sim
    payload = {"estimate": sim.estimate, "std_error": sim.std_error,
               "pde_value": sim.pde_value, "z_score": sim.z_score,
               "n_paths": sim.n_paths, "seed": sim.seed,
               "clamp_fraction": sim.clamp_fraction,
               "n_steps_per_period": steps, "y0": y0}
    outputs = {"sim_report.json": exports.json_text(payload)}
    if table is not None:
        outputs["paths.csv"] = exports.paths_csv_text(table)
    return outputs


def cmd_verify_bounds(args, sets):
    model = _load_base_model(args, sets)
    grid = _make_grid(args, sets, model)
    try:
        delta = bounds.search_delta0(model.gamma, model.n_payments, model.k_a,
                                     model.horizon, grid, model.K)
    except ValueError as exc:
        raise UserError(str(exc))
    residual = bounds.verify_supersolution(delta, model.gamma, model.n_payments,
                                           model.k_a, model.horizon, grid, model.K)
    solution = pipeline.solve_initial(model, grid)
    report = bounds.check_sandwich(solution, delta)
    payload = {
        "delta": {"b": delta.b, "c": delta.c, "M": delta.M},
        "min_residual": residual,
        "lower_margin": report.lower_margin,
        "upper_margin": report.upper_margin,
        "lower_at": list(report.lower_at),
        "upper_at": list(report.upper_at),
        "passed": report.passed(),
    }
    return {"bounds_report.json": exports.json_text(payload)}


def cmd_sweep_frequency(args, sets):
    model = _load_base_model(args, sets)
    t_total = sets.get("t_total", 10.0)
    n_list = sets.get("n_list", DEFAULT_N_LIST)
    ra_grid = sets.get("ra_grid", DEFAULT_RA_GRID)
    rows = []
    for n in n_list:
        cfg = {"gamma": model.gamma, "k_a": model.k_a, "K": model.K,
               "x0": model.x0, "schedule": _schedule_uniform(t_total, n)}
        m = model_from_dict(cfg)
        grid = _make_grid(args, sets, m)
        _check_ra(grid, ra_grid)
        solution = pipeline.solve_initial(m, grid)
        rows.append((n, [pipeline.principal_value(solution, r).v_p for r in ra_grid]))
    payload = {"t_total": t_total, "n_list": list(n_list),
               "ra_grid": list(ra_grid),
               "rows": [{"n_payments": n, "v_p": v} for n, v in rows]}
    return {"frequency.csv": exports.sweep_csv_text("n_payments", rows, ra_grid),
            "summary.json": exports.json_text(payload)}


def cmd_sweep_distribution(args, sets):
    model = _load_base_model(args, sets)
    t_total = sets.get("t_total", 4.0)
    t1_list = sets.get("t1_list", DEFAULT_T1_LIST)
    ra_grid = sets.get("ra_grid", DEFAULT_RA_GRID)
    rows = []
    for t1 in tuple(t1_list) + (t_total,):
        # t1 == t_total is the single-payment baseline
        sched = (0.0, t_total) if t1 >= t_total else (0.0, t1, t_total)
        cfg = {"gamma": model.gamma, "k_a": model.k_a, "K": model.K,
               "x0": model.x0, "schedule": sched}
        m = model_from_dict(cfg)
        grid = _make_grid(args, sets, m)
        _check_ra(grid, ra_grid)
        solution = pipeline.solve_initial(m, grid)
        rows.append((t1, [pipeline.principal_value(solution, r).v_p for r in ra_grid]))
    payload = {"t_total": t_total, "t1_list": list(t1_list),
               "ra_grid": list(ra_grid),
               "rows": [{"t1": t, "v_p": v} for t, v in rows]}
    return {"distribution.csv": exports.sweep_csv_text("t1", rows, ra_grid),
            "summary.json": exports.json_text(payload)}


def cmd_sweep_discount(args, sets):
    model = _load_base_model(args, sets)
    ka_list = sets.get("ka_list", DEFAULT_KA_LIST)
    ra_grid = sets.get("ra_grid", DEFAULT_RA_GRID)
    rows = []
    for k_a in ka_list:
        cfg = {"gamma": model.gamma, "k_a": k_a, "K": model.K,
               "x0": model.x0, "schedule": model.schedule}
        m = model_from_dict(cfg)
        grid = _make_grid(args, sets, m)
        _check_ra(grid, ra_grid)
        solution = pipeline.solve_initial(m, grid)
        rows.append((k_a, [pipeline.principal_value(solution, r).v_p for r in ra_grid]))
    payload = {"ka_list": list(ka_list), "ra_grid": list(ra_grid),
               "schedule": list(model.schedule),
               "rows": [{"k_a": k, "v_p": v} for k, v in rows]}
    return {"discount.csv": exports.sweep_csv_text("k_a", rows, ra_grid),
            "summary.json": exports.json_text(payload)}


def cmd_compare_negotiation(args, sets):
    model = _load_base_model(args, sets)
    grid = _make_grid(args, sets, model)
    tol = sets.get("tol", 0.0)
    comparison = pipeline.compare_settings(model, grid, tol)
    payload = {
        "initial": exports.report_dict(comparison.initial),
        "renegotiation": exports.report_dict(comparison.renegotiation),
        "difference": comparison.difference,
        "winner": comparison.winner,
        "tolerance": comparison.tolerance,
    }
    return {"comparison.json": exports.json_text(payload)}


def cmd_oracle_check(args, sets):
    # cross-check defaults: small single-payment benchmark where the
    # lattice oracle is exact enough to be meaningful and fits the size guard
    if args.config is None:
        sets = dict(sets)
        sets.setdefault("schedule", (0.0, 1.0))
        sets.setdefault("K", 2.0)
        sets.setdefault("y_max", 4.0)
        sets.setdefault("n_y", 40)
    model = _load_base_model(args, sets)
    grid = _make_grid(args, sets, model)
    n_z = sets.get("n_z", 81)
    solution = pipeline.solve_initial(model, grid)
    n_t = sets.get("n_t", sum(sol.n_steps for sol in solution.periods))
    try:
        oracle = simulate.dp_oracle(model, n_t, grid.n_y, n_z, grid.y_max)
    except ValueError as exc:
        raise UserError(str(exc))
    diff = float(abs(solution.start_values() - oracle.values).max())
    tol = 5e-2
    payload = {"sup_diff": diff, "tolerance": tol, "passed": diff <= tol,
               "n_t": n_t, "n_z": n_z, "n_y": grid.n_y, "y_max": grid.y_max}
    return {"oracle.json": exports.json_text(payload)}


_COMMANDS = {
    "solve": cmd_solve,
    "simulate": cmd_simulate,
    "verify-bounds": cmd_verify_bounds,
    "sweep-frequency": cmd_sweep_frequency,
    "sweep-distribution": cmd_sweep_distribution,
    "sweep-discount": cmd_sweep_discount,
    "compare-negotiation": cmd_compare_negotiation,
    "oracle-check": cmd_oracle_check,
}


def _build_parser() -> _Parser:
    parser = _Parser(prog="paysched",
                     description="Contract-schedule solver and verification suite")
    sub = parser.add_subparsers(dest="command", metavar="command")
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON model config")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--set", action="append", metavar="key=value",
                       help="override config or defaults (repeatable)")
        p.add_argument("--seed", type=int, help="simulation seed")
        p.add_argument("--paths", type=int, help="simulation path count")
        p.add_argument("--ny", type=int, help="spatial cells")
        p.add_argument("--ymax", type=float, help="domain truncation")
    return parser


def _write_outputs(out_dir, outputs):
    os.makedirs(out_dir, exist_ok=True)
    written = []
    try:
        for rel in sorted(outputs):
            path = os.path.join(out_dir, rel)
            with open(path, "wb") as fh:
                fh.write(outputs[rel].encode("utf-8"))
            written.append(path)
    except BaseException:
        # never leave a half-written output tree behind
        for path in written:
            try:
                os.remove(path)
            except OSError:
                pass
        raise


def main(argv=None) -> int:
    try:
        parser = _build_parser()
        args = parser.parse_args(argv)
        if args.command is None:
            raise UserError("a command is required (one of: %s)" %
                            ", ".join(sorted(_COMMANDS)))
        sets = _parse_sets(args.set)
        outputs = _COMMANDS[args.command](args, sets)
        _write_outputs(args.out, outputs)
        return 0
    except UserError as exc:
        print("user-error: %s" % str(exc).replace("\n", " "), file=sys.stderr)
        return 1
    except ValueError as exc:
        print("user-error: %s" % str(exc).replace("\n", " "), file=sys.stderr)
        return 1
    except OSError as exc:
        print("user-error: %s" % str(exc).replace("\n", " "), file=sys.stderr)
        return 1
    except RuntimeError as exc:
        print("internal-error: %s" % str(exc).replace("\n", " "), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
