"""Deterministic CSV and legacy structured-grid text emission."""

from __future__ import annotations

import os

import numpy as np

from ..grid import Mapping, StaggeredGrid


def sci(x) -> str:
    """Scientific notation, 7 significant digits, stable across runs."""
    return f"{float(x):.6E}"


def format_cell(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if x is None:
        return ""
    return sci(x)


def write_csv(path: str, columns, rows, comments=()) -> str:
    """RFC-4180-style CSV ('.' decimal, scientific notation), with optional
    leading '#' comment lines recording provenance such as the RNG seed."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    lines = [f"# {c}" for c in comments]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(format_cell(c) for c in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def write_structured_grid(
    path: str,
    grid: StaggeredGrid,
    mapping: Mapping,
    fields: dict,
    title: str = "mimetic-curv snapshot",
) -> str:
    """Legacy ASCII structured-grid snapshot (point coordinates + values).

    Points are the scalar staggered set (boundary + centers per axis),
    x-fastest, matching the library's flattening.
    """
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    pts = grid.points("scalar")
    xyz = mapping(pts)
    n = xyz.shape[0]
    dims = [len(grid.scalar_axis(a)) for a in range(grid.dim)]
    while len(dims) < 3:
        dims.append(1)
    with open(path, "w") as fh:
        fh.write("# vtk DataFile Version 3.0\n")
        fh.write(f"{title}\n")
        fh.write("ASCII\n")
        fh.write("DATASET STRUCTURED_GRID\n")
        fh.write(f"DIMENSIONS {dims[0]} {dims[1]} {dims[2]}\n")
        fh.write(f"POINTS {n} double\n")
        for i in range(n):
            coords = [xyz[i, a] if a < grid.dim else 0.0 for a in range(3)]
            fh.write(" ".join(sci(c) for c in coords) + "\n")
        fh.write(f"POINT_DATA {n}\n")
        for name, values in fields.items():
            fh.write(f"SCALARS {name} double 1\n")
            fh.write("LOOKUP_TABLE default\n")
            for v in np.asarray(values):
                fh.write(sci(v) + "\n")
    return path
