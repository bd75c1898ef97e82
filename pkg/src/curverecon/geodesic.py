"""Discrete geodesics on triangle meshes.

Geodesic distance is the shortest-path distance in the vertex-edge graph.
This is a true metric, which is all the reconstruction theory consumes; its
overestimate of the smooth geodesic distance shrinks under refinement.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DisconnectedError, InvalidInputError
from .graphs import ProximityGraph
from .mesh import TriMesh


@dataclass(frozen=True)
class VoronoiPartition:
    """Vertex-level geodesic Voronoi diagram.

    ``labels[v]`` is the sample index (position in ``sources``) of the cell
    containing vertex ``v``; ``distances[v]`` is the distance to that
    sample. Vertices unreachable from every source have label ``-1``.
    """

    labels: np.ndarray
    distances: np.ndarray
    sources: np.ndarray

    @property
    def generators(self) -> np.ndarray:
        """Per-vertex source vertex id (``-1`` when unreachable)."""
        return np.where(self.labels >= 0, self.sources[self.labels], -1)

    @property
    def n_samples(self) -> int:
        return len(self.sources)


def _check_samples(mesh: TriMesh, samples) -> np.ndarray:
    s = np.asarray(samples, dtype=np.int64).ravel()
    if s.size == 0:
        raise InvalidInputError("at least one sample vertex is required")
    if s.min() < 0 or s.max() >= mesh.n_vertices:
        raise InvalidInputError(f"sample vertex out of range [0, {mesh.n_vertices})")
    if np.unique(s).size != s.size:
        vals, counts = np.unique(s, return_counts=True)
        raise InvalidInputError(f"duplicate sample vertex {int(vals[counts > 1][0])}")
    return s


def multi_source_propagate(mesh: TriMesh, sources) -> VoronoiPartition:
    """Grow all sources at once; each vertex joins the nearest source.

    Equidistant vertices go to the source with the lower sample index.
    """
    src = _check_samples(mesh, sources)
    indptr, indices, weights = mesh.csr
    dist, label, _ = _kernels.dijkstra(indptr, indices, weights, src)
    return VoronoiPartition(labels=label, distances=dist, sources=src)


def distance_field(mesh: TriMesh, source: int) -> tuple[np.ndarray, np.ndarray]:
    """Single-source distances and shortest-path predecessors."""
    indptr, indices, weights = mesh.csr
    dist, _, pred = _kernels.dijkstra(indptr, indices, weights, np.array([source], dtype=np.int64))
    return dist, pred


def distance_fields(mesh: TriMesh, samples, threads: int = 1) -> np.ndarray:
    """Stack of single-source distance fields, one row per sample."""
    src = _check_samples(mesh, samples)
    if threads > 1 and len(src) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(lambda s: distance_field(mesh, int(s))[0], src))
    else:
        rows = [distance_field(mesh, int(s))[0] for s in src]
    return np.vstack(rows)


def pairwise_distances(mesh: TriMesh, samples, *, allow_disconnected: bool = False, threads: int = 1) -> np.ndarray:
    """Geodesic distance matrix between sample vertices.

    One propagation per sample; rows are computed independently (optionally
    on ``threads`` workers) and symmetrised by taking the smaller of the two
    directed values, so the result is exactly symmetric.

    Raises
    ------
    DisconnectedError
        If two samples lie in different components, unless
        ``allow_disconnected`` is set (the entry is then ``inf``).
    """
    src = _check_samples(mesh, samples)
    fields = distance_fields(mesh, src, threads=threads)
    D = fields[:, src]
    D = np.minimum(D, D.T)
    np.fill_diagonal(D, 0.0)
    if not allow_disconnected and not np.all(np.isfinite(D)):
        i, j = map(int, np.argwhere(~np.isfinite(D))[0])
        raise DisconnectedError(f"samples {i} and {j} (vertices {src[i]}, {src[j]}) are not connected")
    return D


def dual_voronoi_graph(partition: VoronoiPartition, mesh: TriMesh, D=None) -> ProximityGraph:
    """Join samples whose Voronoi cells touch.

    Two cells touch when some mesh edge has endpoints labelled by them. A
    triangle carrying three distinct labels joins all three pairs; those
    pairs are already witnessed by its edges, so the edge scan suffices.
    Weights are geodesic sample-to-sample distances (computed when ``D`` is
    not supplied).
    """
    k = partition.n_samples
    if partition.labels.shape[0] != mesh.n_vertices:
        raise InvalidInputError("partition was computed on a different mesh")
    if D is None:
        D = pairwise_distances(mesh, partition.sources, allow_disconnected=True)
    la = partition.labels[mesh.edges[:, 0]]
    lb = partition.labels[mesh.edges[:, 1]]
    keep = (la != lb) & (la >= 0) & (lb >= 0)
    pairs = np.unique(np.sort(np.column_stack([la[keep], lb[keep]]), axis=1), axis=0)
    return ProximityGraph(k, ((int(a), int(b), float(D[a, b]), "dual-voronoi") for a, b in pairs))


def shortest_vertex_path(mesh: TriMesh, a: int, b: int) -> list[int]:
    """Vertex sequence of a shortest edge path from ``a`` to ``b``."""
    if not (0 <= a < mesh.n_vertices and 0 <= b < mesh.n_vertices):
        raise InvalidInputError("path endpoint out of range")
    if a == b:
        return [int(a)]
    dist, pred = distance_field(mesh, a)
    if not np.isfinite(dist[b]):
        raise DisconnectedError(f"vertices {a} and {b} are not connected")
    path = [int(b)]
    while path[-1] != a:
        path.append(int(pred[path[-1]]))
    return path[::-1]


def path_length(mesh: TriMesh, path) -> float:
    p = np.asarray(path)
    if len(p) < 2:
        return 0.0
    return float(np.linalg.norm(mesh.vertices[p[1:]] - mesh.vertices[p[:-1]], axis=1).sum())
