"""CSV/JSON readers and writers.  Every float is written with 17 significant
digits so that files round-trip bit-exactly."""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .dg_core import DGSolution
from .mesh import Mesh1D

__all__ = [
    "fmt",
    "read_solution",
    "read_table",
    "sidecar_path",
    "write_crossings",
    "write_curve",
    "write_dispersion",
    "write_filtered",
    "write_json",
    "write_rows",
    "write_solution",
    "write_table",
]

SOLUTION_HEADER = ("cell", "mode", "coeff")
FILTERED_HEADER = ("x", "u_filtered", "u_exact", "error")
TABLE_HEADER = ("n_cells", "l2", "l2_order", "linf", "linf_order", "filtered", "theta", "k", "t_final")
DISPERSION_HEADER = ("zeta", "re_lambda", "im_lambda", "dispersion_err", "dissipation")
CURVE_HEADER = ("cell", "xi", "x", "error")
CROSSINGS_HEADER = ("cell", "crossing_xi", "nearest_root_xi", "distance")


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def write_rows(path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])
    return path


def write_json(path, data: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    return path


def sidecar_path(path) -> Path:
    return Path(path).with_suffix(".json")


# {{{ DG solutions


def write_solution(path, u: DGSolution, theta: float) -> Path:
    """Write ``cell,mode,coeff`` rows plus a JSON sidecar with the mesh, degree,
    time and flux parameter."""
    rows = ((j, m, u.coeffs[j, m]) for j in range(u.mesh.n_cells) for m in range(u.k + 1))
    path = write_rows(path, SOLUTION_HEADER, rows)
    meta = {"a": u.mesh.a, "b": u.mesh.b, "n_cells": u.mesh.n_cells, "k": u.k, "t": u.t, "theta": theta}
    write_json(sidecar_path(path), meta)
    return path


def read_solution(path) -> tuple[DGSolution, float]:
    """Inverse of :func:`write_solution`; returns the solution and theta."""
    meta = json.loads(sidecar_path(path).read_text())
    mesh = Mesh1D(meta["a"], meta["b"], meta["n_cells"])
    coeffs = np.zeros((mesh.n_cells, meta["k"] + 1))
    with open(path, newline="") as f:
        reader = csv.reader(f)
        if tuple(next(reader)) != SOLUTION_HEADER:
            raise ValueError(f"{path}: unexpected header")
        for cell, mode, coeff in reader:
            coeffs[int(cell), int(mode)] = float(coeff)
    return DGSolution(mesh, meta["k"], coeffs, float(meta["t"])), float(meta["theta"])


# }}}


def write_filtered(path, x, u_filtered, u_exact) -> Path:
    x, uf, ue = (np.asarray(v, dtype=float) for v in (x, u_filtered, u_exact))
    return write_rows(path, FILTERED_HEADER, zip(x, uf, ue, uf - ue))


def write_table(path, tables) -> Path:
    rows = []
    for tab in tables:
        for n, l2, l2o, linf, linfo in tab.rows:
            rows.append((n, l2, l2o, linf, linfo, tab.filtered, tab.theta, tab.k, tab.t_final))
    return write_rows(path, TABLE_HEADER, rows)


def read_table(path) -> list[dict]:
    with open(path, newline="") as f:
        out = []
        for row in csv.DictReader(f):
            out.append(
                {
                    "n_cells": int(row["n_cells"]),
                    "l2": float(row["l2"]),
                    "l2_order": float(row["l2_order"]) if row["l2_order"] else None,
                    "linf": float(row["linf"]),
                    "linf_order": float(row["linf_order"]) if row["linf_order"] else None,
                    "filtered": row["filtered"] == "true",
                    "theta": float(row["theta"]),
                    "k": int(row["k"]),
                    "t_final": float(row["t_final"]),
                }
            )
    return out


def write_dispersion(path, reports) -> Path:
    """One row per eigenvalue, k+1 consecutive rows per zeta: the physical
    mode first, then the others by decreasing real part."""
    rows = []
    for rep in reports:
        order = [rep.physical_index] + sorted(
            (i for i in range(len(rep.eigenvalues)) if i != rep.physical_index),
            key=lambda i: -rep.eigenvalues[i].real,
        )
        for i in order:
            lam = complex(rep.eigenvalues[i] / rep.h)
            rows.append((rep.zeta, lam.real, lam.imag, abs(lam.imag + rep.omega), lam.real))
    return write_rows(path, DISPERSION_HEADER, rows)


def write_curve(path, curve) -> Path:
    rows = (
        (j, curve.xi[i], curve.x[j, i], curve.error[j, i])
        for j in range(curve.n_cells)
        for i in range(len(curve.xi))
    )
    return write_rows(path, CURVE_HEADER, rows)


def write_crossings(path, curve, roots) -> Path:
    rows = (
        (j, c, r, d)
        for j, cell in enumerate(curve.nearest_roots(roots))
        for c, r, d in cell
    )
    return write_rows(path, CROSSINGS_HEADER, rows)
