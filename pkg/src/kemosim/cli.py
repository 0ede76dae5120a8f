"""Command-line entry point: audit structural conditions, run single
simulations, and sweep family parameters into an outcome table.

Exit codes: 0 success, 2 blow-up suspected, 3 configuration error,
4 audit verdict negative, 5 positivity lost / step-size underflow.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import dataclasses
import json
import math
import os
import sys

import numpy as np

from .config import (
    FAMILY_PARAM_KEYS,
    build_initial_state,
    emit_config,
    parse_config,
)
from .errors import ConfigError
from .hypothesis import audit, choose_exponents, algebraic_threshold
from .monitors import Monitor, MonitorConfig, growth_trend
from .stepper import RunStatus, run

__all__ = ["main", "entry", "cmd_audit", "cmd_run", "cmd_sweep"]

#: default v-scan for audits; wide enough that algebraic tails are resolved
AUDIT_V_MIN = 1e-3
AUDIT_V_MAX = 1e6
AUDIT_GRID_POINTS = 2048

_STATUS_EXIT = {
    RunStatus.COMPLETED: 0,
    RunStatus.BLOWUP_SUSPECTED: 2,
    RunStatus.DT_UNDERFLOW: 5,
    RunStatus.POSITIVITY_LOST: 5,
}


def _fmt(x):
    return repr(float(x))


def _lp_label(p):
    if math.isinf(p):
        return "inf"
    return str(int(p)) if float(p).is_integer() else f"{p:g}"


def write_series(path, records, lp_list):
    """series.csv: one row per monitor sample, repr-formatted floats."""
    cols = ["t", "mass_u", "int_v", "min_v", "min_gamma", "sup_u", "sup_grad_v"]
    cols += [f"lp_u_p{_lp_label(p)}" for p in lp_list]
    cols += ["W", "ineq_residual", "identity_residual"]
    with open(path, "w") as fh:
        fh.write(",".join(cols) + "\n")
        for r in records:
            vals = [r.t, r.mass_u, r.int_v, r.min_v, r.min_gamma, r.sup_u,
                    r.sup_grad_v, *r.lp_u, r.W, r.ineq_residual,
                    r.identity_residual]
            fh.write(",".join(_fmt(v) for v in vals) + "\n")


def write_snapshot(path, state):
    """snap_<t>.csv: one cell per row, coordinates then u and v, 17 digits."""
    grid = state.grid
    meshes = grid.meshes()
    header = ("x,u,v" if grid.n_dim == 1 else "x,y,u,v")
    u = state.u.values.ravel()
    v = state.v.values.ravel()
    coords = [m.ravel() if hasattr(m, "ravel") else m for m in meshes]
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for i in range(u.size):
            row = [c[i] for c in coords] + [u[i], v[i]]
            fh.write(",".join(f"{val:.17g}" for val in row) + "\n")


def _snapshot_name(t):
    return f"snap_{t:.6f}.csv"


def cmd_audit(cfg, out_dir):
    """Audit the structural conditions and write audit.json.

    For algebraic families the exit verdict comes from the exact closed-form
    threshold (the scan can sit a hair above a tail limit it only approaches);
    both values are reported.
    """
    os.makedirs(out_dir, exist_ok=True)
    report = audit(cfg.family, cfg.params, AUDIT_V_MIN, AUDIT_V_MAX,
                   AUDIT_GRID_POINTS)
    payload = report.as_dict()
    verdict = report.h3_ok
    if cfg.family_kind == "algebraic":
        fam = cfg.family
        closed, claim = algebraic_threshold(fam.sigma, fam.lam, fam.alpha,
                                           cfg.params.d, AUDIT_V_MIN,
                                           cfg.params.n_dim)
        payload["closed_form"] = {"inf_F_closed": closed,
                                  "bounded_claim": claim,
                                  "eta": AUDIT_V_MIN}
        verdict = claim
    with open(os.path.join(out_dir, "audit.json"), "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    print(f"audit: h1_ok={report.h1_ok} h2_ok={report.h2_ok} "
          f"inf_F={report.inf_F:.9g} at v={report.inf_F_location:.6g} "
          f"(tail_limited={report.tail_limited}) "
          f"h3_ok={verdict} margin={report.h3_margin:.6g}")
    return 0 if verdict else 4


def _pick_exponents(cfg):
    if cfg.exponents is not None:
        return cfg.exponents
    choice = choose_exponents(cfg.family, cfg.params, AUDIT_V_MIN, AUDIT_V_MAX)
    if choice.feasible:
        return choice.p, choice.q
    # monitoring still needs some exponents; use the midpoint of (0, cap)
    cap = min(0.5 * cfg.params.n_dim, choice.p)
    return choice.p, 0.5 * cap


def _execute_run(cfg, out_dir):
    """Run one configured simulation; returns (outcome, monitor, (p, q))."""
    if cfg.params.n_dim != len(cfg.cells):
        raise ConfigError([
            "model.n_dim: simulation requires n_dim to equal the grid rank "
            f"(got n_dim={cfg.params.n_dim} with a {len(cfg.cells)}D grid)"])
    os.makedirs(out_dir, exist_ok=True)
    state = build_initial_state(cfg)
    p, q = _pick_exponents(cfg)
    monitor = Monitor(cfg.family, cfg.params, MonitorConfig(p=p, q=q))

    next_snap = [state.t]

    def hook(s):
        monitor(s)
        if s.t >= next_snap[0] * (1.0 - 1e-14):
            write_snapshot(os.path.join(out_dir, _snapshot_name(s.t)), s)
            while next_snap[0] <= s.t:
                next_snap[0] += cfg.snapshots_every

    outcome = run(state, cfg.family, cfg.params, cfg.step, cfg.horizon,
                  monitor_hook=hook, sample_every=cfg.sample_every)
    write_snapshot(os.path.join(out_dir,
                                _snapshot_name(outcome.final_state.t)),
                   outcome.final_state)
    write_series(os.path.join(out_dir, "series.csv"), monitor.records,
                 monitor.config.lp_list)
    with open(os.path.join(out_dir, "effective_config.toml"), "w") as fh:
        fh.write(emit_config(cfg))
    return outcome, monitor, (p, q)


def cmd_run(cfg, out_dir):
    outcome, monitor, (p, q) = _execute_run(cfg, out_dir)
    print(f"run: status={outcome.status.value} steps={outcome.steps_taken} "
          f"t={outcome.final_state.t:.6g} p={p:.6g} q={q:.6g} "
          f"sup_u={monitor.records[-1].sup_u:.6g}")
    return _STATUS_EXIT[outcome.status]


def parse_axis(text):
    """'--axis chi=0.3:0.9:3' -> ('chi', array([0.3, 0.6, 0.9]))."""
    try:
        name, rng = text.split("=", 1)
        start, stop, count = rng.split(":")
        values = np.linspace(float(start), float(stop), int(count))
    except ValueError as exc:
        raise ConfigError([f"--axis: expected name=start:stop:count, got {text!r}"]) from exc
    if len(values) < 1:
        raise ConfigError([f"--axis {name}: empty range"])
    return name.strip(), values


_ATTR_FOR_KEY = {"lambda": "lam"}


def _point_config(cfg, assignment):
    """Derive a sweep-point config: family parameters replaced, resolution
    halved (>= 4 cells per axis)."""
    fam = cfg.family
    for key, val in assignment.items():
        fam = dataclasses.replace(fam, **{_ATTR_FOR_KEY.get(key, key): float(val)})
    cells = tuple(max(4, c // 2) for c in cfg.cells)
    return dataclasses.replace(cfg, family=fam, cells=cells)


def _sweep_point(args):
    """Worker for one sweep point: audit + reduced-resolution run."""
    cfg, point_dir, assignment = args
    report = audit(cfg.family, cfg.params, AUDIT_V_MIN, AUDIT_V_MAX,
                   AUDIT_GRID_POINTS)
    row = dict(assignment)
    row["audit_h3"] = report.h3_ok
    row["inf_F"] = report.inf_F
    try:
        outcome, monitor, _ = _execute_run(cfg, point_dir)
        last = monitor.records[-1]
        row["status"] = outcome.status.value
        row["final_sup_u"] = last.sup_u
        row["final_min_v"] = last.min_v
        row["sup_u_trend"] = growth_trend(monitor.series("sup_u"))
    except ConfigError as exc:
        row["status"] = f"ConfigError({'; '.join(exc.violations)})"
        row["final_sup_u"] = float("nan")
        row["final_min_v"] = float("nan")
        row["sup_u_trend"] = "n/a"
    return row


def cmd_sweep(cfg, axes, out_dir, threads=1):
    """Cross-product sweep over family parameters.

    Rows are appended to sweep.csv in deterministic submission order, each
    flushed as soon as its point finishes, so partial tables survive
    interruption.  An empty axis list degenerates to a single cmd_run point.
    """
    os.makedirs(out_dir, exist_ok=True)
    allowed = FAMILY_PARAM_KEYS[cfg.family_kind]
    for name, _ in axes:
        if name not in allowed:
            raise ConfigError([
                f"--axis {name}: not a parameter of the {cfg.family_kind!r} "
                f"family (choose from {', '.join(allowed)})"])

    assignments = [{}]
    for name, values in axes:
        assignments = [{**a, name: v} for a in assignments for v in values]

    tasks = []
    for k, assignment in enumerate(assignments):
        pcfg = _point_config(cfg, assignment)
        point_dir = os.path.join(out_dir, "points", f"point_{k:04d}")
        tasks.append((pcfg, point_dir, assignment))

    axis_names = [name for name, _ in axes]
    cols = axis_names + ["audit_h3", "inf_F", "status", "final_sup_u",
                         "final_min_v", "sup_u_trend"]

    def _row_line(row):
        vals = []
        for c in cols:
            v = row[c]
            vals.append(_fmt(v) if isinstance(v, float) else str(v))
        return ",".join(vals)

    table_path = os.path.join(out_dir, "sweep.csv")
    with open(table_path, "w") as fh:
        fh.write(",".join(cols) + "\n")
        fh.flush()
        if threads > 1:
            with concurrent.futures.ProcessPoolExecutor(max_workers=threads) as ex:
                futures = [ex.submit(_sweep_point, t) for t in tasks]
                for fut in futures:
                    fh.write(_row_line(fut.result()) + "\n")
                    fh.flush()
        else:
            for t in tasks:
                fh.write(_row_line(_sweep_point(t)) + "\n")
                fh.flush()
    print(f"sweep: {len(tasks)} point(s) -> {table_path}")
    return 0


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="kemosim",
        description="Chemotaxis-with-signal-dependent-motility laboratory: "
                    "audit structural conditions, simulate, sweep.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, doc in (("audit", "audit structural conditions"),
                      ("run", "run one simulation"),
                      ("sweep", "sweep family parameters")):
        sp = sub.add_parser(name, help=doc)
        sp.add_argument("-c", "--config", required=True, help="TOML config file")
        sp.add_argument("--out", default=None, help="output directory override")
        sp.add_argument("--threads", type=int, default=1,
                        help="worker processes for sweeps")
        sp.add_argument("--seed", type=int, default=None,
                        help="reserved for stochastic initial data")
        if name == "sweep":
            sp.add_argument("--axis", action="append", default=[],
                            metavar="NAME=START:STOP:COUNT",
                            help="family-parameter axis (repeatable)")
    args = parser.parse_args(argv)

    try:
        cfg = parse_config(args.config)
        out_dir = args.out if args.out is not None else cfg.out_dir
        if args.command == "audit":
            return cmd_audit(cfg, out_dir)
        if args.command == "run":
            return cmd_run(cfg, out_dir)
        axes = [parse_axis(a) for a in args.axis]
        return cmd_sweep(cfg, axes, out_dir, threads=max(1, args.threads))
    except ConfigError as exc:
        print(str(exc), file=sys.stderr)
        return 3


def entry():
    raise SystemExit(main())
