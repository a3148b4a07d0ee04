"""Trajectory export: CSV and JSON-lines with a fixed column schema.

Column order (one row per recorded sample):

    tau, t, x1, x2, x3, u0, u1, u2, u3, <formulation block>,
    pi0, pi1, pi2, pi3, res_c1, res_c2, res_c3, res_g

where t is the coordinate time x0 and the formulation block is

    position:   y0, y1, y2, y3
    spintensor: d1, d2, d3, s1, s2, s3
    spinor:     phi1_re, phi1_im, ..., phi4_re, phi4_im

Floats are written with repr (shortest round-trip form), so identical
trajectories serialize to identical bytes.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .states import Trajectory

_COMMON_HEAD = ["tau", "t", "x1", "x2", "x3", "u0", "u1", "u2", "u3"]
_COMMON_TAIL = ["pi0", "pi1", "pi2", "pi3", "res_c1", "res_c2", "res_c3", "res_g"]

_BLOCKS = {
    "position": ["y0", "y1", "y2", "y3"],
    "spintensor": ["d1", "d2", "d3", "s1", "s2", "s3"],
    "spinor": [f"phi{i}_{part}" for i in range(1, 5) for part in ("re", "im")],
}


def column_names(formulation: str) -> list[str]:
    return _COMMON_HEAD + _BLOCKS[formulation] + _COMMON_TAIL


def _block_array(traj: Trajectory) -> np.ndarray:
    if traj.formulation == "position":
        assert traj.ys is not None
        return traj.ys
    if traj.formulation == "spintensor":
        assert traj.spins is not None
        return traj.spins
    assert traj.phis is not None
    out = np.empty((len(traj), 8))
    out[:, 0::2] = traj.phis.real
    out[:, 1::2] = traj.phis.imag
    return out


def row_table(traj: Trajectory) -> np.ndarray:
    """All columns as one float array (samples, columns)."""
    res = traj.residuals
    cols = [
        traj.taus,
        traj.xs[:, 0],
        traj.xs[:, 1],
        traj.xs[:, 2],
        traj.xs[:, 3],
        traj.us[:, 0],
        traj.us[:, 1],
        traj.us[:, 2],
        traj.us[:, 3],
    ]
    block = _block_array(traj)
    cols.extend(block[:, j] for j in range(block.shape[1]))
    cols.extend(traj.pis[:, j] for j in range(4))
    cols.extend(res[k] for k in ("c1", "c2", "c3", "g"))
    return np.column_stack(cols)


def write_csv(traj: Trajectory, path) -> None:
    names = column_names(traj.formulation)
    table = row_table(traj)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(names)
        for row in table:
            writer.writerow([repr(float(v)) for v in row])


def write_jsonl(traj: Trajectory, path) -> None:
    names = column_names(traj.formulation)
    table = row_table(traj)
    with open(path, "w") as fh:
        for row in table:
            rec = {name: float(v) for name, v in zip(names, row)}
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def read_csv(path) -> dict[str, np.ndarray]:
    """Columns of an exported CSV, keyed by name."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        names = next(reader)
        rows = [[float(v) for v in row] for row in reader]
    table = np.asarray(rows)
    return {name: table[:, j] for j, name in enumerate(names)}


def write_columns_csv(path, named_columns: dict[str, np.ndarray]) -> None:
    """Small helper for column extracts (tau plus requested variables)."""
    names = list(named_columns)
    table = np.column_stack([named_columns[n] for n in names])
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(names)
        for row in table:
            writer.writerow([repr(float(v)) for v in row])


def write_json_report(path, payload: dict) -> None:
    """Deterministic JSON artifact: sorted keys, trailing newline."""
    Path(path).write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")
