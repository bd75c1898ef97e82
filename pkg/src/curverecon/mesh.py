"""Triangle meshes: loading, manifold validation and the vertex-edge graph.

Geodesic computations elsewhere in the package run on the weighted graph
of mesh edges returned by :func:`edge_graph`.
"""

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import NamedTuple

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components

from .errors import InvalidInputError, MeshFormatError

logger = logging.getLogger(__name__)


class TriMesh:
    """Immutable indexed triangle mesh.

    Parameters
    ----------
    vertices : array_like, shape (n, 3) or (n, 2)
        Vertex positions. 2D input is padded with ``z = 0``.
    triangles : array_like of int, shape (m, 3)
        Oriented vertex-index triples.

    Raises
    ------
    InvalidInputError
        If there are no triangles, a triangle references an out-of-range or
        repeated vertex, or an edge has zero length.
    """

    def __init__(self, vertices, triangles):
        v = np.array(vertices, dtype=np.float64, ndmin=2)
        t = np.array(triangles, dtype=np.int64).reshape(-1, 3) if len(triangles) else np.empty((0, 3), np.int64)
        if v.ndim != 2 or v.shape[1] not in (2, 3):
            raise InvalidInputError(f"vertices must have shape (n, 3), got {v.shape}")
        if v.shape[1] == 2:
            v = np.column_stack([v, np.zeros(len(v))])
        if not np.all(np.isfinite(v)):
            raise InvalidInputError("vertex coordinates must be finite")
        if t.shape[0] == 0:
            raise InvalidInputError("mesh has no triangles")
        if t.min() < 0 or t.max() >= v.shape[0]:
            bad = int(np.flatnonzero((t < 0).any(axis=1) | (t >= v.shape[0]).any(axis=1))[0])
            raise InvalidInputError(
                f"triangle {bad} references a vertex outside [0, {v.shape[0]})"
            )
        if np.any((t[:, 0] == t[:, 1]) | (t[:, 1] == t[:, 2]) | (t[:, 0] == t[:, 2])):
            bad = int(np.flatnonzero((t[:, 0] == t[:, 1]) | (t[:, 1] == t[:, 2]) | (t[:, 0] == t[:, 2]))[0])
            raise InvalidInputError(f"triangle {bad} repeats a vertex")

        e = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
        e.sort(axis=1)
        edges = np.unique(e, axis=0)
        lengths = np.linalg.norm(v[edges[:, 0]] - v[edges[:, 1]], axis=1)
        if np.any(lengths <= 0.0):
            a, b = edges[np.flatnonzero(lengths <= 0.0)[0]]
            raise InvalidInputError(f"edge ({a}, {b}) has zero length")

        for arr in (v, t, edges, lengths):
            arr.setflags(write=False)
        self.vertices = v
        self.triangles = t
        self.edges = edges
        self.edge_lengths = lengths

    @property
    def n_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def n_triangles(self) -> int:
        return self.triangles.shape[0]

    @property
    def n_edges(self) -> int:
        return self.edges.shape[0]

    def euler_characteristic(self) -> int:
        return self.n_vertices - self.n_edges + self.n_triangles

    @cached_property
    def csr(self):
        """``(indptr, indices, weights)`` of the symmetric edge graph."""
        g = edge_graph(self)
        return g.indptr.astype(np.int64), g.indices.astype(np.int64), g.data.astype(np.float64)

    @cached_property
    def neighbors(self) -> list[np.ndarray]:
        indptr, indices, _ = self.csr
        return [indices[indptr[i]:indptr[i + 1]] for i in range(self.n_vertices)]

    def __repr__(self):
        return f"TriMesh(V={self.n_vertices}, E={self.n_edges}, F={self.n_triangles})"


class Defect(NamedTuple):
    kind: str  # "non-manifold-edge" (index into mesh.edges) or "non-manifold-vertex"
    index: int


@dataclass(frozen=True)
class ValidationReport:
    is_manifold: bool
    defects: list[Defect] = field(default_factory=list)
    component_count: int = 1


def edge_graph(mesh: TriMesh) -> sparse.csr_matrix:
    """Symmetric sparse adjacency of the mesh edges weighted by length."""
    n = mesh.n_vertices
    i, j = mesh.edges[:, 0], mesh.edges[:, 1]
    w = mesh.edge_lengths
    g = sparse.coo_matrix(
        (np.concatenate([w, w]), (np.concatenate([i, j]), np.concatenate([j, i]))),
        shape=(n, n),
    ).tocsr()
    g.sort_indices()
    return g


def validate_manifold(mesh: TriMesh) -> ValidationReport:
    """List non-manifold edges and vertices.

    An edge is non-manifold when more than two triangles share it. A vertex
    is non-manifold when its incident triangles do not form a single fan
    (connected through edges incident to the vertex). Boundary edges are
    allowed.
    """
    defects: list[Defect] = []
    edge_index = {(int(a), int(b)): k for k, (a, b) in enumerate(mesh.edges)}
    edge_tris: dict[int, list[int]] = defaultdict(list)
    vert_tris: dict[int, list[int]] = defaultdict(list)
    for f, tri in enumerate(mesh.triangles.tolist()):
        for a, b in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
            edge_tris[edge_index[(a, b) if a < b else (b, a)]].append(f)
        for a in tri:
            vert_tris[a].append(f)

    for k in sorted(edge_tris):
        if len(edge_tris[k]) > 2:
            defects.append(Defect("non-manifold-edge", k))

    tris = mesh.triangles.tolist()
    for v in sorted(vert_tris):
        fan = vert_tris[v]
        if len(fan) == 1:
            continue
        # union-find over the incident triangles, joined through spokes (v, x)
        parent = list(range(len(fan)))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        by_spoke: dict[int, int] = {}
        for slot, f in enumerate(fan):
            for x in tris[f]:
                if x == v:
                    continue
                if x in by_spoke:
                    ra, rb = find(slot), find(by_spoke[x])
                    if ra != rb:
                        parent[ra] = rb
                else:
                    by_spoke[x] = slot
        if len({find(s) for s in range(len(fan))}) > 1:
            defects.append(Defect("non-manifold-vertex", v))

    ncomp, _ = connected_components(edge_graph(mesh), directed=False)
    return ValidationReport(is_manifold=not defects, defects=defects, component_count=int(ncomp))


# ---------------------------------------------------------------------------
# file formats


def _data_lines(text: str):
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            yield line


def _parse_off(text: str):
    lines = _data_lines(text)
    try:
        head = next(lines)
    except StopIteration:
        raise MeshFormatError("empty OFF file") from None
    tokens = head.split()
    if tokens[0].upper() != "OFF":
        raise MeshFormatError(f"expected 'OFF' header, got {tokens[0]!r}")
    tokens = tokens[1:]
    if not tokens:
        try:
            tokens = next(lines).split()
        except StopIteration:
            raise MeshFormatError("OFF file missing counts line") from None
    try:
        nv, nf = int(tokens[0]), int(tokens[1])
    except (IndexError, ValueError):
        raise MeshFormatError(f"bad OFF counts line: {' '.join(tokens)!r}") from None
    verts, faces = [], []
    try:
        for _ in range(nv):
            xyz = next(lines).split()
            verts.append([float(x) for x in xyz[:3]])
        for _ in range(nf):
            tok = next(lines).split()
            k = int(tok[0])
            if k != 3:
                raise MeshFormatError(f"only triangles are supported, found a {k}-gon")
            faces.append([int(x) for x in tok[1:4]])
    except StopIteration:
        raise MeshFormatError("OFF file ended before all elements were read") from None
    except ValueError as exc:
        raise MeshFormatError(f"malformed OFF element: {exc}") from None
    return verts, faces


def _parse_obj(text: str):
    verts, faces = [], []
    for line in _data_lines(text):
        tok = line.split()
        if tok[0] == "v":
            try:
                verts.append([float(x) for x in tok[1:4]])
            except ValueError as exc:
                raise MeshFormatError(f"malformed OBJ vertex: {exc}") from None
        elif tok[0] == "f":
            corners = tok[1:]
            if len(corners) != 3:
                raise MeshFormatError(f"only triangles are supported, found a {len(corners)}-gon")
            face = []
            for c in corners:
                try:
                    k = int(c.split("/", 1)[0])
                except ValueError:
                    raise MeshFormatError(f"malformed OBJ face index {c!r}") from None
                face.append(k - 1 if k > 0 else len(verts) + k)
            faces.append(face)
    return verts, faces


def load_mesh(path, format: str | None = None) -> TriMesh:
    """Read an OFF or OBJ triangle mesh.

    ``format`` defaults to the file suffix.
    """
    path = Path(path)
    fmt = (format or path.suffix.lstrip(".")).upper()
    text = path.read_text()
    if fmt == "OFF":
        verts, faces = _parse_off(text)
    elif fmt == "OBJ":
        verts, faces = _parse_obj(text)
    else:
        raise MeshFormatError(f"unsupported mesh format {fmt!r}")
    if not faces:
        raise MeshFormatError(f"{path}: mesh has no triangles")
    if any(len(v) != 3 for v in verts):
        raise MeshFormatError(f"{path}: every vertex needs three coordinates")
    try:
        return TriMesh(verts, faces)
    except MeshFormatError:
        raise
    except InvalidInputError as exc:
        raise MeshFormatError(f"{path}: {exc}") from None


def save_mesh(mesh: TriMesh, path, format: str | None = None) -> None:
    """Write ``mesh`` as OFF or OBJ with round-trip float precision."""
    path = Path(path)
    fmt = (format or path.suffix.lstrip(".")).upper()
    out = []
    if fmt == "OFF":
        out.append("OFF")
        out.append(f"{mesh.n_vertices} {mesh.n_triangles} {mesh.n_edges}")
        out.extend(" ".join(repr(float(c)) for c in p) for p in mesh.vertices)
        out.extend("3 " + " ".join(str(int(i)) for i in t) for t in mesh.triangles)
    elif fmt == "OBJ":
        out.extend("v " + " ".join(repr(float(c)) for c in p) for p in mesh.vertices)
        out.extend("f " + " ".join(str(int(i) + 1) for i in t) for t in mesh.triangles)
    else:
        raise MeshFormatError(f"unsupported mesh format {fmt!r}")
    path.write_text("\n".join(out) + "\n")
