"""Field files and JSON records.

A field is stored as two files: ``<stem>.json`` holding the header and
either ``<stem>.csv`` (header row ``x0,...,x{d-1},value`` then one row per
grid point in C order of the grid indices, last axis fastest) or
``<stem>.bin`` (the values alone as little-endian float64, same order).

Header keys: ``format``, ``dim``, ``n``, ``half_width``, ``center``,
``n_modes``, ``layout`` (optional ``[n_alice_modes, n_bob_modes]``).
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .phase_space import PhaseGrid, WignerField

__all__ = ["save_field", "load_field", "dump_json", "to_jsonable"]


def to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if not np.isfinite(v):
            return None
        return v
    return obj


def dump_json(obj, path) -> None:
    """Write ``obj`` as sorted, indented JSON (byte-stable for equal input)."""
    text = json.dumps(to_jsonable(obj), indent=2, sort_keys=True, allow_nan=False)
    Path(path).write_text(text + "\n")


def save_field(field: WignerField, stem, fmt: str = "csv", layout=None) -> list:
    """Write ``field`` to ``<stem>.json`` plus ``<stem>.csv`` or ``<stem>.bin``."""
    stem = Path(stem)
    g = field.grid
    header = {
        "format": fmt,
        "dim": g.dim,
        "n": g.n,
        "half_width": g.half_width,
        "center": list(g.center),
        "n_modes": field.n_modes,
        "layout": None if layout is None else [layout.n_alice_modes, layout.n_bob_modes],
    }
    data_path = stem.with_suffix("." + fmt)
    if fmt == "csv":
        pts = g.points().reshape(-1, g.dim)
        vals = field.values.reshape(-1)
        with open(data_path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow([f"x{i}" for i in range(g.dim)] + ["value"])
            for p, v in zip(pts, vals):
                w.writerow([repr(float(c)) for c in p] + [repr(float(v))])
    elif fmt == "bin":
        field.values.astype("<f8").tofile(data_path)
    else:
        raise ValueError("fmt must be 'csv' or 'bin'")
    dump_json(header, stem.with_suffix(".json"))
    return [stem.with_suffix(".json"), data_path]


def load_field(stem) -> WignerField:
    stem = Path(stem)
    header = json.loads(stem.with_suffix(".json").read_text())
    grid = PhaseGrid(header["half_width"], header["n"], header["dim"], tuple(header["center"]))
    data_path = stem.with_suffix("." + header["format"])
    if header["format"] == "csv":
        rows = np.loadtxt(data_path, delimiter=",", skiprows=1, ndmin=2)
        vals = rows[:, -1]
    else:
        vals = np.fromfile(data_path, dtype="<f8")
    return WignerField(grid, vals.reshape(grid.shape), header["n_modes"])
