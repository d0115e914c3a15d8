"""Command-line front end: ``run``, ``verify-operator`` and ``sweep``.

Exit codes: 0 ok, 2 configuration error, 3 solver failure, 4 verification
tolerance breach.
"""

import argparse
import logging
import math
import os
import sys
import time

import numpy as np

from . import report as rp
from .config import PRESETS, ConfigError, RunConfig, initial_field, load_config
from .diagnostics import (audit_trajectory, holder_fit_space, holder_fit_time,
                          positivity_check, trajectory_diagnostics)
from .stepper import SolverError, epsilon_continuation, implicit_euler_run

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_VERIFY = 0, 2, 3, 4

log = logging.getLogger("fracfilm")


# ---------------------------------------------------------------------------
# run
# ---------------------------------------------------------------------------

def _holder_summaries(traj):
    out = {}
    try:
        out["space"] = holder_fit_space(traj.final, traj.params.alpha).summary()
    except ValueError as exc:
        out["space"] = {"error": str(exc)}
    if traj.n_steps >= 8:
        try:
            out["time"] = holder_fit_time(traj).summary()
        except ValueError as exc:
            out["time"] = {"error": str(exc)}
    else:
        out["time"] = {"error": "fewer than 8 steps"}
    return out


def write_run(outdir, cfg, traj, failure=None):
    """Write diagnostics.csv, snapshots.csv and report.json; return the report."""
    rp.ensure_dir(outdir)
    p = traj.params
    diags = trajectory_diagnostics(traj)
    audit = audit_trajectory(traj, diagnostics=diags)
    pos = positivity_check(traj, p, floor=cfg.positivity_floor, diagnostics=diags)
    rp.write_diagnostics(os.path.join(outdir, "diagnostics.csv"), diags)
    rp.write_snapshots(os.path.join(outdir, "snapshots.csv"), traj)
    report = {
        "schema": rp.SCHEMA,
        "status": "ok" if failure is None else "solver_failure",
        "failure": failure,
        "config": cfg.to_dict(),
        "eps": p.eps,
        "tau": traj.tau,
        "rows": len(diags),
        "audits": {a.name: a.summary() for a in (audit.mass, audit.energy, audit.entropy)},
        "all_audits_passed": audit.passed,
        "positivity": pos.summary(),
        "holder": _holder_summaries(traj),
        "solver": {
            "iterations": [s.iterations for s in traj.solves],
            "picard_steps": int(sum(s.picard_steps for s in traj.solves)),
            "max_residual": max((s.residual_norm for s in traj.solves), default=0.0),
        },
    }
    rp.write_json(os.path.join(outdir, "report.json"), report)
    return report


def _failure_record(exc):
    return {"step": exc.step, "message": str(exc), "residual_norm": exc.residual_norm,
            "eps": exc.eps}


def cmd_run(cfg, outdir=None):
    """Run one configuration (or an eps schedule) and write its artifacts."""
    outdir = outdir or cfg.output_dir
    rp.ensure_dir(outdir)
    u0 = initial_field(cfg)
    started = time.perf_counter()
    timings = {}
    code = EXIT_OK

    if not cfg.is_schedule:
        p = cfg.params()
        try:
            traj = implicit_euler_run(u0, cfg.T, cfg.n_steps, p)
            write_run(outdir, cfg, traj)
        except SolverError as exc:
            log.error("solver failure: %s", exc)
            if exc.partial is not None:
                write_run(outdir, cfg, exc.partial, failure=_failure_record(exc))
            code = EXIT_SOLVER
    else:
        members = []

        def save(eps, traj):
            sub = os.path.join(outdir, f"eps_{len(members):02d}")
            write_run(sub, cfg, traj)
            members.append((eps, traj))

        failure = None
        try:
            epsilon_continuation(u0, cfg.T, cfg.n_steps, cfg.params(), cfg.epsilon,
                                 callback=save)
        except SolverError as exc:
            log.error("solver failure at eps=%g: %s", exc.eps, exc)
            failure = _failure_record(exc)
            if exc.partial is not None:
                sub = os.path.join(outdir, f"eps_{len(members):02d}")
                write_run(sub, cfg, exc.partial, failure=failure)
            code = EXIT_SOLVER
        rows = _distance_rows([e for e, _ in members], [t.final for _, t in members])
        rp.write_convergence(os.path.join(outdir, "continuation.csv"), rows)
        rp.write_json(os.path.join(outdir, "report.json"), {
            "schema": rp.SCHEMA,
            "status": "ok" if failure is None else "solver_failure",
            "failure": failure,
            "config": cfg.to_dict(),
            "eps_completed": [e for e, _ in members],
            "distances": [r["distance"] for r in rows[1:]],
            "min_value": [float(min(d.min_value for d in trajectory_diagnostics(t)))
                          for _, t in members],
        })
    timings["total_seconds"] = time.perf_counter() - started
    # wall-clock data lives apart from the deterministic artifacts
    rp.write_json(os.path.join(outdir, "timings.json"), timings)
    return code


def _distance_rows(values, finals):
    rows = []
    for i, (v, u) in enumerate(zip(values, finals)):
        if i == 0:
            rows.append(dict(index=0, value=v, distance=math.nan, order=math.nan))
            continue
        prev = finals[i - 1]
        n = max(prev.n_modes, u.n_modes)
        d = float(np.linalg.norm(u.padded(n).coeffs - prev.padded(n).coeffs))
        order = math.nan
        if i >= 2:
            dprev = rows[i - 1]["distance"]
            ratio = abs(math.log(values[i - 1] / v))
            if d > 0 and dprev > 0 and ratio > 0:
                order = math.log(dprev / d) / ratio
        rows.append(dict(index=i, value=v, distance=d, order=order))
    return rows


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

SWEEP_AXES = ("tau", "epsilon", "modes")


def sweep_member(cfg, axis, value):
    if axis == "tau":
        steps = cfg.T / value
        if value <= 0 or abs(steps - round(steps)) > 1e-9 * max(1.0, steps):
            raise ConfigError(f"tau={value} does not divide T={cfg.T} into whole steps")
        return cfg.replace(n_steps=int(round(steps)))
    if axis == "epsilon":
        return cfg.replace(epsilon=[value])
    if axis == "modes":
        return cfg.replace(n_modes=value)
    raise ConfigError(f"axis must be one of {', '.join(SWEEP_AXES)}")


def cmd_sweep(cfg, axis, values, outdir=None):
    outdir = outdir or cfg.output_dir
    if axis not in SWEEP_AXES:
        raise ConfigError(f"axis must be one of {', '.join(SWEEP_AXES)}")
    values = [float(v) for v in values]
    if len(values) < 2:
        raise ConfigError("a sweep needs at least 2 axis values")
    members = [sweep_member(cfg, axis, v) for v in values]
    rp.ensure_dir(outdir)
    finals = []
    code = EXIT_OK
    for i, mcfg in enumerate(members):
        sub = os.path.join(outdir, f"member_{i:02d}")
        try:
            traj = implicit_euler_run(initial_field(mcfg), mcfg.T, mcfg.n_steps, mcfg.params())
        except SolverError as exc:
            log.error("sweep member %d failed: %s", i, exc)
            if exc.partial is not None:
                write_run(sub, mcfg, exc.partial, failure=_failure_record(exc))
            code = EXIT_SOLVER
            break
        write_run(sub, mcfg, traj)
        finals.append(traj.final)
    rows = _distance_rows(values[: len(finals)], finals)
    rp.write_convergence(os.path.join(outdir, "convergence.csv"), rows)
    return code, rows


# ---------------------------------------------------------------------------
# verify-operator
# ---------------------------------------------------------------------------

VERIFY_COLUMNS = ("check", "alpha", "value", "reference", "rel_error", "tolerance", "passed")


def format_verify_table(rows):
    lines = [rp.HEADER, ",".join(VERIFY_COLUMNS) + "\n"]
    for r in rows:
        cells = [r["check"], rp.fmt(r["alpha"]), rp.fmt(r["value"]), rp.fmt(r["reference"]),
                 rp.fmt(r["rel_error"]), rp.fmt(r["tolerance"]), "1" if r["passed"] else "0"]
        lines.append(",".join(cells) + "\n")
    return "".join(lines)


def cmd_verify_operator(alpha, n_modes=64, k_max=10_000, quad_points=10_000, seed=0,
                        output=None):
    from .verify import verify_operator

    if not (0.0 < alpha < 2.0):
        raise ConfigError(f"alpha must lie in (0, 2) for the kernel form, got {alpha}")
    if n_modes < 4 or k_max < 1 or quad_points < 16:
        raise ConfigError("need n_modes >= 4, k_max >= 1 and quad_points >= 16")
    rows = verify_operator(alpha, n_modes, k_max, quad_points, seed)
    table = format_verify_table(rows)
    if output:
        with open(output, "w", encoding="utf-8", newline="") as fh:
            fh.write(table)
    else:
        sys.stdout.write(table)
    return (EXIT_OK if all(r["passed"] for r in rows) else EXIT_VERIFY), rows


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

_RUN_FLAGS = [
    ("--alpha", float), ("--n", float), ("--epsilon", str), ("--T", float),
    ("--n-steps", int), ("--n-modes", int), ("--ic-level", float), ("--ic-coeffs", str),
    ("--bump-height", float), ("--bump-offset", float), ("--noise", float), ("--seed", int),
    ("--output-dir", str), ("--newton-tol", float), ("--newton-max-iter", int),
    ("--damping-min", float), ("--positivity-floor", float),
]


def _add_run_flags(sp):
    sp.add_argument("--config", help="flat 'key = value' file; flags override it")
    sp.add_argument("--initial-condition", choices=PRESETS)
    for flag, typ in _RUN_FLAGS:
        sp.add_argument(flag, type=typ, default=None)


def _overrides(ns):
    keys = ["initial_condition"] + [f.lstrip("-").replace("-", "_") for f, _ in _RUN_FLAGS]
    return {k: getattr(ns, k) for k in keys if getattr(ns, k) is not None}


def build_parser():
    parser = argparse.ArgumentParser(prog="fracfilm", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="implicit Euler run with diagnostics and audits")
    _add_run_flags(run)

    sweep = sub.add_parser("sweep", help="convergence sweep over tau, epsilon or modes")
    _add_run_flags(sweep)
    sweep.add_argument("--axis", required=True, choices=SWEEP_AXES)
    sweep.add_argument("--values", required=True, help="comma-separated axis values")

    ver = sub.add_parser("verify-operator", help="identity and kernel cross-checks for I")
    ver.add_argument("--alpha", type=float, required=True)
    ver.add_argument("--n-modes", type=int, default=64)
    ver.add_argument("--k-max", type=int, default=10_000)
    ver.add_argument("--quad-points", type=int, default=10_000)
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--output", default=None)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if ns.command == "run":
            return cmd_run(load_config(ns.config, _overrides(ns)))
        if ns.command == "sweep":
            cfg = load_config(ns.config, _overrides(ns))
            try:
                values = [float(v) for v in ns.values.split(",") if v.strip()]
            except ValueError as exc:
                raise ConfigError(f"bad --values: {exc}") from exc
            return cmd_sweep(cfg, ns.axis, values)[0]
        return cmd_verify_operator(ns.alpha, ns.n_modes, ns.k_max, ns.quad_points, ns.seed,
                                   ns.output)[0]
    except ConfigError as exc:
        print(f"fracfilm: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
