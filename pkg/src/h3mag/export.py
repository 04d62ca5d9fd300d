"""Byte-stable CSV/JSON rendering and atomic file output."""

import json
import math
import os
import sys
import tempfile

import numpy as np

SCHEMA_VERSION = 1
TRAJECTORY_COLUMNS = ("t", "x", "y", "z", "vx", "vy", "vz", "speed2", "first_integral",
                      "speed2_drift", "fi_drift")
CURVE_COLUMNS = ("t", "x", "y", "z")


def fmt(v) -> str:
    v = float(v)
    if math.isnan(v):
        return "nan"
    return format(v, ".17g")


def csv_text(columns, rows) -> str:
    lines = [",".join(columns)]
    lines += [",".join(fmt(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def trajectory_rows(traj) -> np.ndarray:
    n = len(traj.times)
    fi = traj.first_integral if traj.first_integral is not None else np.full(n, np.nan)
    return np.column_stack([traj.times, traj.states, traj.speed2, fi,
                            np.abs(traj.speed2 - traj.speed2[0]), np.abs(fi - fi[0])])


def json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n"


def rows_json(kind, columns, rows, **meta) -> str:
    doc = {"schema_version": SCHEMA_VERSION, "kind": kind, "columns": list(columns),
           "rows": [[float(v) for v in row] for row in rows]}
    doc.update(meta)
    return json_text(doc)


def write_atomic(path, text: str) -> None:
    """Write ``text`` to ``path`` via a temporary file and rename; '-' means stdout."""
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    path = os.fspath(path)
    folder = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
