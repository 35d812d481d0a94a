"""Serialisation: trajectory CSV and versioned JSON reports.

Both formats are byte-stable for a fixed configuration.  The only
time-dependent field is `header.timestamp` in JSON reports, and CSV
output carries no timestamp at all.
"""

from __future__ import annotations

import datetime as _dt
import json
import math
from typing import IO

import numpy as np

SCHEMA_VERSION = "1"


def _fmt(x) -> str:
    return "%.17g" % x


def _param_text(v) -> str:
    if isinstance(v, (list, tuple, np.ndarray)):
        return ",".join(_fmt(c) for c in v)
    if isinstance(v, (float, np.floating)):
        return _fmt(v)
    return str(v)


def write_trajectory_csv(stream: IO[str], run, seed: int | None = None) -> None:
    """Header comment, column row, one row per sample, closing closure comment."""
    traj = run.trajectory
    params = dict(traj.params)
    if seed is not None:
        params["seed"] = seed
    head = " ".join(f"{k}={_param_text(params[k])}" for k in sorted(params))
    stream.write(f"# flow={traj.flow_id} {head}\n")
    stream.write(",".join(["t", *run.columns, "constraint_drift", "energy_drift"]) + "\n")
    states = traj.states.reshape(len(traj.times), -1)
    for t, row, cd, ed in zip(traj.times, states, traj.constraint_drift, traj.energy_drift):
        stream.write(",".join(_fmt(v) for v in (t, *row, cd, ed)) + "\n")
    c = run.closure
    period = "none" if c.period is None else _fmt(c.period)
    stream.write(f"# closure period={period} distance={_fmt(c.distance)}\n")


def read_trajectory_csv(stream: IO[str]) -> tuple[dict, list, np.ndarray]:
    """(header fields, column names, data) from a file written above."""
    meta: dict = {}
    cols: list = []
    rows = []
    for line in stream:
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            for tok in line[1:].split():
                if "=" in tok:
                    k, v = tok.split("=", 1)
                    meta.setdefault("closure" if k in ("period", "distance") else "header", {})[k] = v
            continue
        if not cols:
            cols = line.split(",")
            continue
        rows.append([float(v) for v in line.split(",")])
    if not cols:
        raise ValueError("no column header found")
    data = np.array(rows, dtype=float).reshape(-1, len(cols))
    return meta, cols, data


def plain(obj):
    """Recursively convert numpy values to JSON-safe python ones; non-finite floats become strings."""
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [plain(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else repr(x)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def report(command: str, body: dict, seed: int | None = None, config: dict | None = None,
           timestamp: str | None = None) -> dict:
    if timestamp is None:
        timestamp = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    out = {
        "schema_version": SCHEMA_VERSION,
        "header": {"command": command, "timestamp": timestamp},
        "seed": seed,
        "config": config or {},
    }
    out.update(body)
    return plain(out)


def dumps(rep: dict) -> str:
    return json.dumps(rep, sort_keys=True, indent=2, allow_nan=False) + "\n"
