"""End-to-end reconstruction on meshes, point clouds and pose sequences."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InvalidInputError, NonManifoldError
from .geodesic import dual_voronoi_graph, multi_source_propagate, pairwise_distances, shortest_vertex_path
from .graphs import ProximityGraph, as_distance_matrix, bridge_components, sig_graph, sigdv_graph
from .mesh import TriMesh, validate_manifold
from .metrics import EuclideanPointSet, RigidMotionSample, SE3PointSet, slerp, witness_dual_voronoi
from .sampling import SamplingReport, check_nonuniformity, consecutive_distances
from .tsp import Tour, minimum_spanning_tree, solve_tsp

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ReconstructionOptions:
    """Pipeline switches.

    ``single`` bridges SIGDV components into one curve; otherwise every
    component becomes its own curve. Pose-only fields are ignored elsewhere.
    """

    single: bool = False
    allow_nonmanifold: bool = False
    allow_disconnected: bool = False
    threads: int = 1
    diagnostics: bool = False
    polylines: bool = True
    w_rot: float = 1.0
    w_tr: float = 1.0
    bisector_tol: float = 0.25
    witness_neighbors: int = 3
    witness_steps: int = 16

    def __post_init__(self):
        if self.threads < 1:
            raise InvalidInputError("threads must be >= 1")
        if not self.bisector_tol > 0:
            raise InvalidInputError("bisector tolerance must be positive")
        if self.witness_neighbors < 1 or self.witness_steps < 1:
            raise InvalidInputError("witness counts must be positive")


@dataclass
class ReconstructionResult:
    """Tours and intermediate graphs; indices are sample positions."""

    tours: list[Tour]
    graph: ProximityGraph
    stages: dict[str, ProximityGraph]
    D: np.ndarray
    bridged_edges: list[tuple[int, int]] = field(default_factory=list)
    chains: list[list[int]] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    diagnostics: list[SamplingReport] | None = None
    polylines: list[list[int]] | None = None
    samples: np.ndarray | None = None

    @property
    def tour_vertices(self) -> list[list[int]]:
        """Tours as mesh vertex ids (requires ``samples``)."""
        if self.samples is None:
            raise InvalidInputError("result has no sample vertex ids")
        return [[int(self.samples[i]) for i in t.order] for t in self.tours]


@dataclass(frozen=True)
class BaselineResult:
    """Outcome of the spanning-tree chain baseline."""

    is_chain: bool
    tree: list[tuple[int, int]]
    branching: list[int]
    tour: Tour | None


def _solve_components(D, dual: ProximityGraph, single: bool) -> ReconstructionResult:
    sig = sig_graph(D)
    sigdv = sigdv_graph(dual, sig)
    stages = {"dual-voronoi": dual, "sig": sig, "sigdv": sigdv}
    warnings: list[str] = []
    if single:
        graph, added = bridge_components(sigdv, D)
        if added:
            warnings.append(f"bridged {len(added) + 1} components with {len(added)} extra edges")
        tour = solve_tsp(graph, D).canonical()
        return ReconstructionResult([tour], graph, stages, D, bridged_edges=added, warnings=warnings)

    tours, chains = [], []
    for comp in sigdv.components():
        if len(comp) < 3:
            chains.append(comp)
            warnings.append(f"component {comp} has fewer than 3 samples; returned as an open chain")
            continue
        sub = sigdv.subgraph(comp)
        Dsub = D[np.ix_(comp, comp)]
        local = solve_tsp(sub, Dsub)
        order = [comp[i] for i in local.order]
        tours.append(Tour(tuple(order), local.length).canonical())
    return ReconstructionResult(tours, sigdv, stages, D, chains=chains, warnings=warnings)


def _attach_diagnostics(result: ReconstructionResult) -> None:
    reports = []
    for t in result.tours:
        rep = SamplingReport()
        gaps = consecutive_distances(t.order, result.D)
        rep.theta_max = float(gaps.max())
        if np.all(gaps > 0):
            check_nonuniformity(list(t.order), result.D, np.inf, rep)
        reports.append(rep)
    result.diagnostics = reports


def _check_sample_count(n: int, what: str = "samples") -> None:
    if n < 3:
        raise InvalidInputError(f"need at least 3 {what}, got {n}")


def reconstruct(mesh: TriMesh, samples, opts: ReconstructionOptions | None = None) -> ReconstructionResult:
    """Reconstruct closed curves through sample vertices of ``mesh``.

    Geodesic Voronoi partition, its dual graph, SIG and SIGDV, then one
    tour per SIGDV component, or one bridged tour when ``opts.single``.
    """
    opts = opts or ReconstructionOptions()
    src = np.asarray(samples, dtype=np.int64).ravel()
    _check_sample_count(src.size)
    report = validate_manifold(mesh)
    if not report.is_manifold and not opts.allow_nonmanifold:
        kind, idx = report.defects[0]
        raise NonManifoldError(f"mesh is not manifold ({len(report.defects)} defects, first: {kind} {idx})")

    part = multi_source_propagate(mesh, src)
    allow_inf = opts.allow_disconnected or not opts.single
    D = pairwise_distances(mesh, src, allow_disconnected=allow_inf, threads=opts.threads)
    dual = dual_voronoi_graph(part, mesh, D)
    result = _solve_components(D, dual, opts.single)
    result.samples = src
    if not report.is_manifold:
        result.warnings.insert(0, "mesh is not manifold; proceeding as requested")
    if opts.polylines:
        result.polylines = [tour_polyline(mesh, verts) for verts in result.tour_vertices]
    if opts.diagnostics:
        _attach_diagnostics(result)
    return result


def reconstruct_multi(mesh: TriMesh, samples, opts: ReconstructionOptions | None = None) -> ReconstructionResult:
    """Multi-curve variant: never adds bridge edges."""
    opts = opts or ReconstructionOptions()
    if opts.single:
        opts = replace(opts, single=False)
    return reconstruct(mesh, samples, opts)


def reconstruct_points(points, opts: ReconstructionOptions | None = None) -> ReconstructionResult:
    """Reconstruction in Euclidean space with the exact Delaunay dual."""
    opts = opts or ReconstructionOptions()
    ps = EuclideanPointSet(points)
    _check_sample_count(ps.n, "points")
    D = ps.distance_matrix()
    if np.any(D[np.triu_indices(ps.n, 1)] == 0.0):
        raise InvalidInputError("duplicate points")
    result = _solve_components(D, ps.dual_adjacency(D), opts.single)
    if opts.diagnostics:
        _attach_diagnostics(result)
    return result


def interpolate_witnesses(poses: list[RigidMotionSample], D, neighbors: int = 3, steps: int = 16) -> list[RigidMotionSample]:
    """Poses along the geodesics from each pose to its nearest neighbours.

    Rotations are slerped and translations lerped at ``steps`` interior
    parameters ``(k + 0.5) / steps``. Each unordered pair is used once.
    """
    n = len(poses)
    k = min(neighbors, n - 1)
    pairs = set()
    for i in range(n):
        row = D[i].copy()
        row[i] = np.inf
        for j in np.argsort(row, kind="stable")[:k]:
            pairs.add((min(i, int(j)), max(i, int(j))))
    ts = (np.arange(steps) + 0.5) / steps
    out = []
    for i, j in sorted(pairs):
        a, b = poses[i], poses[j]
        for t in ts:
            q = slerp(a.rotation, b.rotation, float(t))
            q = q / np.linalg.norm(q)
            out.append(RigidMotionSample(q, (1 - t) * a.translation + t * b.translation))
    return out


def reconstruct_motion(poses, witnesses=None, opts: ReconstructionOptions | None = None) -> ReconstructionResult:
    """Order rigid-motion samples into closed paths under the SE(3) metric."""
    opts = opts or ReconstructionOptions()
    ps = SE3PointSet(poses, opts.w_rot, opts.w_tr)
    _check_sample_count(ps.n, "poses")
    D = ps.distance_matrix()
    iu = np.triu_indices(ps.n, 1)
    if np.any(D[iu] == 0.0):
        i, j = (int(x[np.flatnonzero(D[iu] == 0.0)[0]]) for x in iu)
        raise InvalidInputError(f"poses {i} and {j} are identical")
    if witnesses is None:
        witnesses = interpolate_witnesses(ps.poses, D, opts.witness_neighbors, opts.witness_steps)
    dual = witness_dual_voronoi(ps, witnesses, tau=opts.bisector_tol, D=D)
    result = _solve_components(D, dual, opts.single)
    if opts.diagnostics:
        _attach_diagnostics(result)
    return result


def extract_isoline_samples(mesh: TriMesh, field, value: float, tol: float) -> np.ndarray:
    """Vertices whose field value lies within ``tol`` of ``value``."""
    f = np.asarray(field, dtype=np.float64).ravel()
    if f.shape[0] != mesh.n_vertices:
        raise InvalidInputError(f"field has {f.shape[0]} values for {mesh.n_vertices} vertices")
    if not tol > 0:
        raise InvalidInputError("tolerance must be positive")
    return np.flatnonzero(np.abs(f - value) <= tol)


def decimate(indices, step: int) -> np.ndarray:
    """Keep every ``step``-th index; a generic thinning for dense isolines."""
    if step < 1:
        raise InvalidInputError("step must be >= 1")
    return np.asarray(indices)[::step]


def tour_polyline(mesh: TriMesh, vertices) -> list[int]:
    """Closed vertex path joining consecutive tour vertices by shortest paths."""
    path: list[int] = []
    n = len(vertices)
    for t in range(n):
        seg = shortest_vertex_path(mesh, int(vertices[t]), int(vertices[(t + 1) % n]))
        path.extend(seg[:-1])
    path.append(int(vertices[0]))
    return path


def mst_chain_baseline(D) -> BaselineResult:
    """Spanning tree of the complete graph; succeeds iff it is a simple path."""
    D = as_distance_matrix(D)
    n = D.shape[0]
    _check_sample_count(n)
    complete = ProximityGraph(n)
    for a in range(n):
        for b in range(a + 1, n):
            if D[a, b] > 0:
                complete.add_edge(a, b, float(D[a, b]), "dual-voronoi")
    tree = minimum_spanning_tree(complete, D)
    deg = np.zeros(n, dtype=np.int64)
    for a, b in tree:
        deg[a] += 1
        deg[b] += 1
    branching = [int(v) for v in np.flatnonzero(deg > 2)]
    if branching:
        return BaselineResult(False, tree, branching, None)
    adj: list[list[int]] = [[] for _ in range(n)]
    for a, b in tree:
        adj[a].append(b)
        adj[b].append(a)
    start = int(np.flatnonzero(deg == 1)[0])
    order, prev = [start], -1
    while len(order) < n:
        nxt = next(v for v in adj[order[-1]] if v != prev)
        prev = order[-1]
        order.append(nxt)
    return BaselineResult(True, tree, [], Tour.from_order(order, D).canonical())
