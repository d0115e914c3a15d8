"""Deterministic CSV / JSON writers for runs and sweeps."""

import json
import math
import os

from .diagnostics import StepDiagnostics

SCHEMA = "fracfilm-v1"
HEADER = f"# {SCHEMA}\n"


def fmt(x):
    """17 significant digits; inf/nan spelled out."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.17g}"


def _write(path, text):
    # newline="" keeps line endings identical across platforms
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def write_diagnostics(path, diags):
    lines = [HEADER, ",".join(StepDiagnostics.COLUMNS) + "\n"]
    lines += [",".join(fmt(v) for v in d.row()) + "\n" for d in diags]
    _write(path, "".join(lines))


def write_snapshots(path, traj):
    n = traj.params.n_modes
    lines = [HEADER, ",".join(["t"] + [f"c{k}" for k in range(n)]) + "\n"]
    for t, u in zip(traj.times, traj.states):
        lines.append(",".join([fmt(t)] + [fmt(c) for c in u.coeffs]) + "\n")
    _write(path, "".join(lines))


def write_convergence(path, rows):
    """rows: dicts with index, value, distance, order."""
    lines = [HEADER, "index,value,distance,order\n"]
    for r in rows:
        lines.append(",".join([str(r["index"]), fmt(r["value"]), fmt(r["distance"]),
                               fmt(r["order"])]) + "\n")
    _write(path, "".join(lines))


def write_json(path, obj):
    _write(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def ensure_dir(path):
    os.makedirs(path, exist_ok=True)
    return path
