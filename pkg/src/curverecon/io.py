"""Text formats for samples, fields, poses, tours and reports.

All text inputs accept ``#`` comments and blank lines.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import InvalidInputError
from .mesh import TriMesh

SCHEMA_VERSION = 1


def _rows(path) -> list[tuple[int, list[str]]]:
    out = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append((lineno, line.split()))
    return out


def read_indices(path) -> np.ndarray:
    """One non-negative integer per line."""
    vals = []
    for lineno, tok in _rows(path):
        if len(tok) != 1:
            raise InvalidInputError(f"{path}:{lineno}: expected one index per line")
        try:
            v = int(tok[0])
        except ValueError:
            raise InvalidInputError(f"{path}:{lineno}: not an integer: {tok[0]!r}") from None
        if v < 0:
            raise InvalidInputError(f"{path}:{lineno}: negative index {v}")
        vals.append(v)
    return np.array(vals, dtype=np.int64)


def format_indices(indices) -> str:
    return "".join(f"{int(i)}\n" for i in indices)


def write_indices(path, indices) -> None:
    Path(path).write_text(format_indices(indices))


def read_table(path, columns: int | None = None) -> np.ndarray:
    """Whitespace-separated floats with a fixed column count."""
    rows = []
    for lineno, tok in _rows(path):
        if columns is not None and len(tok) != columns:
            raise InvalidInputError(f"{path}:{lineno}: expected {columns} values, got {len(tok)}")
        try:
            rows.append([float(t) for t in tok])
        except ValueError:
            raise InvalidInputError(f"{path}:{lineno}: malformed number") from None
    if not rows:
        return np.zeros((0, columns or 0))
    if len({len(r) for r in rows}) != 1:
        raise InvalidInputError(f"{path}: rows have differing lengths")
    return np.array(rows, dtype=np.float64)


def read_field(path, n_vertices: int | None = None) -> np.ndarray:
    f = read_table(path, 1).ravel()
    if n_vertices is not None and f.shape[0] != n_vertices:
        raise InvalidInputError(f"{path}: {f.shape[0]} field values for {n_vertices} vertices")
    return f


def read_poses(path) -> np.ndarray:
    """Rows ``qw qx qy qz tx ty tz``."""
    return read_table(path, 7)


def format_tours(tours, chains=()) -> str:
    """One index per line, blocks separated by a blank line.

    Open chains, if any, follow the tours as further blocks after a
    ``# chains`` comment.
    """
    text = "\n".join(format_indices(t) for t in tours)
    if chains:
        text += "\n# chains\n" + "\n".join(format_indices(c) for c in chains)
    return text


def write_tours(path, tours, chains=()) -> None:
    Path(path).write_text(format_tours(tours, chains))


def read_tours(path) -> list[list[int]]:
    """Inverse of :func:`write_tours` (tours only)."""
    tours: list[list[int]] = []
    cur: list[int] = []
    for raw in Path(path).read_text().splitlines():
        if raw.startswith("# chains"):
            break
        line = raw.split("#", 1)[0].strip()
        if not line:
            if cur:
                tours.append(cur)
                cur = []
            continue
        cur.append(int(line))
    if cur:
        tours.append(cur)
    return tours


def format_report(payload: dict) -> str:
    """Deterministic JSON (sorted keys, fixed indent) with the schema tag."""
    return json.dumps({"schema": SCHEMA_VERSION, **payload}, indent=2, sort_keys=True) + "\n"


def write_report(path, payload: dict) -> None:
    Path(path).write_text(format_report(payload))


def write_obj_polylines(path, mesh: TriMesh, polylines) -> None:
    """Polylines as OBJ line elements over the used mesh vertices."""
    used = sorted({int(v) for pl in polylines for v in pl})
    remap = {v: k + 1 for k, v in enumerate(used)}
    lines = [f"v {x!r} {y!r} {z!r}" for x, y, z in mesh.vertices[used].tolist()]
    for pl in polylines:
        lines.append("l " + " ".join(str(remap[int(v)]) for v in pl))
    Path(path).write_text("\n".join(lines) + "\n")
