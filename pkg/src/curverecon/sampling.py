"""Sampling conditions for closed curves and a compliant subsampler.

Distances are measured in the ambient space: Euclidean for planar curves and
mesh-graph geodesics for curves whose points are mesh vertices. Local feature
size is approximated from a discrete medial axis and can be clamped by a
user-supplied lower bound on the injectivity radius.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import Delaunay, cKDTree

from . import _kernels
from .errors import InvalidInputError, UndefinedFeatureSizeError, UnsatisfiableSamplingError
from .geodesic import multi_source_propagate, shortest_vertex_path
from .mesh import TriMesh

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DiscreteCurve:
    """Ordered dense curve.

    ``points`` holds positions, shape ``(N, d)``, or mesh vertex ids, shape
    ``(N,)``, when ``mesh`` is given.
    """

    points: np.ndarray
    closed: bool = True
    mesh: TriMesh | None = None

    def __post_init__(self):
        if self.mesh is None:
            pts = np.asarray(self.points, dtype=np.float64)
            if pts.ndim != 2:
                raise InvalidInputError("planar curve points must be an (N, d) array")
        else:
            pts = np.asarray(self.points, dtype=np.int64).ravel()
            if pts.size and (pts.min() < 0 or pts.max() >= self.mesh.n_vertices):
                raise InvalidInputError("curve vertex out of range")
        object.__setattr__(self, "points", pts)
        n = len(pts)
        if self.closed and n < 3:
            raise InvalidInputError("a closed curve needs at least 3 points")
        if n < 2:
            raise InvalidInputError("a curve needs at least 2 points")
        seg = self.segment_lengths
        if np.any(seg <= 0.0):
            k = int(np.flatnonzero(seg <= 0.0)[0])
            raise InvalidInputError(f"consecutive curve points {k} and {(k + 1) % n} coincide")

    def __len__(self) -> int:
        return len(self.points)

    @property
    def positions(self) -> np.ndarray:
        if self.mesh is None:
            return self.points
        return self.mesh.vertices[self.points]

    @property
    def segment_lengths(self) -> np.ndarray:
        p = self.positions
        nxt = np.roll(p, -1, axis=0) if self.closed else p[1:]
        cur = p if self.closed else p[:-1]
        return np.linalg.norm(nxt - cur, axis=1)

    @classmethod
    def trace_on_mesh(cls, mesh: TriMesh, waypoints) -> DiscreteCurve:
        """Closed vertex curve through ``waypoints`` along shortest edge paths."""
        wp = [int(w) for w in waypoints]
        wp = [w for k, w in enumerate(wp) if k == 0 or w != wp[k - 1]]
        if len(wp) > 1 and wp[-1] == wp[0]:
            wp.pop()
        verts: list[int] = []
        for a, b in zip(wp, wp[1:] + wp[:1]):
            verts.extend(shortest_vertex_path(mesh, a, b)[:-1])
        # drop immediate back-and-forth spikes left where paths meet
        changed = True
        while changed and len(verts) > 3:
            changed = False
            n = len(verts)
            for k in range(n):
                if verts[k - 1] == verts[(k + 1) % n]:
                    drop = {k, (k + 1) % n}
                    verts = [v for i, v in enumerate(verts) if i not in drop]
                    changed = True
                    break
        return cls(np.array(verts), closed=True, mesh=mesh)


class CurveMetric:
    """Ambient distances between points of a dense curve, rows cached."""

    def __init__(self, curve: DiscreteCurve):
        self.curve = curve
        self._rows: dict[int, np.ndarray] = {}

    def row(self, i: int) -> np.ndarray:
        i = int(i)
        r = self._rows.get(i)
        if r is None:
            c = self.curve
            if c.mesh is None:
                r = np.linalg.norm(c.points - c.points[i], axis=1)
            else:
                indptr, indices, weights = c.mesh.csr
                dist, _, _ = _kernels.dijkstra(indptr, indices, weights, np.array([c.points[i]], dtype=np.int64))
                r = dist[c.points]
            self._rows[i] = r
        return r

    def __call__(self, i: int, j: int) -> float:
        return float(self.row(i)[int(j)])

    def matrix(self, indices) -> np.ndarray:
        idx = np.asarray(indices, dtype=np.int64)
        D = np.vstack([self.row(i)[idx] for i in idx])
        D = np.minimum(D, D.T)
        np.fill_diagonal(D, 0.0)
        return D


def distances_from(curve: DiscreteCurve, indices) -> np.ndarray:
    """Rows of ambient distances from the given curve points to all points."""
    m = CurveMetric(curve)
    return np.vstack([m.row(i) for i in np.atleast_1d(indices)])


@dataclass(frozen=True)
class MedialAxisApprox:
    points: np.ndarray
    method: str
    empty: bool = False
    vertices: np.ndarray | None = None  # mesh vertex ids for mesh-borne axes


@dataclass
class SamplingReport:
    """Per-sample and per-interval sampling diagnostics."""

    lfs: np.ndarray | None = None
    injectivity_bound: float | None = None
    interval_rho: np.ndarray | None = None
    u_values: np.ndarray | None = None
    theta_max: float | None = None
    thresholds: dict[str, float] = field(default_factory=dict)
    verdicts: dict[str, bool] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        def _max(a):
            return None if a is None or len(a) == 0 else float(np.max(a))

        return {
            "rho_worst": _max(self.interval_rho),
            "u_max": _max(self.u_values),
            "theta_max": self.theta_max,
            "lfs_min": None if self.lfs is None or len(self.lfs) == 0 else float(np.min(self.lfs)),
            "verdicts": dict(sorted(self.verdicts.items())),
            "thresholds": dict(sorted(self.thresholds.items())),
            "injectivity_bound": self.injectivity_bound,
            "warnings": list(self.warnings),
        }


# ---------------------------------------------------------------------------
# medial axis and local feature size


def _cyclic_gap(a, b, n: int, closed: bool):
    d = np.abs(a - b)
    return np.minimum(d, n - d) if closed else d


def approximate_medial_axis(dense: DiscreteCurve, density: float = 10.0) -> MedialAxisApprox:
    """Discrete medial axis of a dense curve.

    Planar curves: circumcenters of Delaunay triangles of the dense points
    whose circumradius exceeds twice the local spacing (Voronoi poles).

    Mesh curves: vertices adjacent to two vertices whose nearest curve points
    are at least a quarter of the curve apart, i.e. where the distance-to-
    curve field folds over. An empty result is flagged, not raised.

    Raises
    ------
    InvalidInputError
        If some segment is longer than ``1/density`` of the local feature size
        the axis implies (the curve is too sparse to trust the approximation).
    """
    n = len(dense)
    seg = dense.segment_lengths
    local = np.maximum(seg, np.roll(seg, 1)) if dense.closed else np.concatenate([[seg[0]], np.maximum(seg[1:], seg[:-1]), [seg[-1]]])

    if dense.mesh is None:
        pts = dense.points
        if pts.shape[1] != 2:
            raise InvalidInputError("planar medial axis needs 2D points")
        tri = Delaunay(pts)
        A, B, C = (pts[tri.simplices[:, k]] for k in range(3))
        a = A - C
        b = B - C
        cross = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
        ok = np.abs(cross) > 1e-300
        a2 = (a * a).sum(axis=1)
        b2 = (b * b).sum(axis=1)
        num = a2[:, None] * b - b2[:, None] * a
        cc = np.empty_like(a)
        cc[ok] = np.column_stack([num[ok, 1], -num[ok, 0]]) / (2.0 * cross[ok, None])
        center = C + cc
        radius = np.linalg.norm(cc, axis=1)
        spacing = local[tri.simplices].max(axis=1)
        keep = ok & (radius > 2.0 * spacing)
        axis = MedialAxisApprox(points=center[keep], method="voronoi-poles", empty=not np.any(keep))
    else:
        mesh = dense.mesh
        part = multi_source_propagate(mesh, dense.points)
        lab = part.labels
        flagged = []
        for v in range(mesh.n_vertices):
            nb = lab[mesh.neighbors[v]]
            nb = nb[nb >= 0]
            if nb.size < 2:
                continue
            gaps = _cyclic_gap(nb[:, None], nb[None, :], n, dense.closed)
            if gaps.max() >= 0.25 * n:
                flagged.append(v)
        verts = np.array(flagged, dtype=np.int64)
        axis = MedialAxisApprox(
            points=mesh.vertices[verts], method="distance-ridge", empty=verts.size == 0, vertices=verts,
        )

    if not axis.empty:
        lfs = local_feature_sizes(dense, axis)
        bad = np.flatnonzero(local * density > lfs)
        if bad.size:
            k = int(bad[0])
            raise InvalidInputError(
                f"curve too sparse near point {k}: spacing {local[k]:.4g} vs feature size {lfs[k]:.4g}"
            )
    return axis


def local_feature_sizes(dense: DiscreteCurve, axis: MedialAxisApprox, injectivity_bound: float | None = None) -> np.ndarray:
    """Approximate (injective) local feature size at every dense point."""
    if axis.empty:
        if injectivity_bound is None:
            raise UndefinedFeatureSizeError("medial axis is empty and no injectivity bound was given")
        return np.full(len(dense), float(injectivity_bound))
    if dense.mesh is None:
        lfs, _ = cKDTree(axis.points).query(dense.points)
    else:
        indptr, indices, weights = dense.mesh.csr
        dist, _, _ = _kernels.dijkstra(indptr, indices, weights, axis.vertices)
        lfs = dist[dense.points]
    if injectivity_bound is not None:
        lfs = np.minimum(lfs, injectivity_bound)
    return lfs


def local_feature_size(sample, axis: MedialAxisApprox, injectivity_bound: float | None = None, mesh: TriMesh | None = None) -> float:
    """Distance from one point to the medial axis, clamped by the bound.

    ``sample`` is a position, or a vertex id when ``mesh`` is given.
    """
    if axis.empty:
        if injectivity_bound is None:
            raise UndefinedFeatureSizeError("medial axis is empty and no injectivity bound was given")
        return float(injectivity_bound)
    if mesh is None:
        p = np.asarray(sample, dtype=np.float64)
        value = float(np.min(np.linalg.norm(axis.points - p, axis=1)))
    else:
        indptr, indices, weights = mesh.csr
        dist, _, _ = _kernels.dijkstra(indptr, indices, weights, np.array([int(sample)], dtype=np.int64))
        value = float(dist[axis.vertices].min())
    if injectivity_bound is not None:
        value = min(value, float(injectivity_bound))
    return value


# ---------------------------------------------------------------------------
# condition checkers


def _check_cyclic_order(samples, n: int, closed: bool) -> np.ndarray:
    s = np.asarray(samples, dtype=np.int64).ravel()
    if s.size < 2:
        raise InvalidInputError("need at least two samples")
    if s.min() < 0 or s.max() >= n:
        raise InvalidInputError("sample index outside the dense curve")
    if closed:
        k = int(np.argmin(s))
        s_rot = np.roll(s, -k)
    else:
        s_rot = s
    if np.any(np.diff(s_rot) <= 0):
        raise InvalidInputError("samples must follow the curve order")
    return s


def _intervals(samples: np.ndarray, n: int, closed: bool):
    """Yield (t, s0, s1, dense indices of [s0, s1]) for consecutive samples."""
    k = len(samples)
    last = k if closed else k - 1
    for t in range(last):
        s0 = int(samples[t])
        s1 = int(samples[(t + 1) % k])
        stop = s1 if s1 > s0 else s1 + n
        yield t, s0, s1, np.arange(s0, stop + 1) % n


def _glfs(lfs, injectivity_bound, report: SamplingReport | None) -> np.ndarray:
    glfs = np.asarray(lfs, dtype=np.float64)
    if injectivity_bound is not None:
        glfs = np.minimum(glfs, float(injectivity_bound))
    elif report is not None:
        msg = "no injectivity bound given: feature size not clamped by the injectivity radius"
        if msg not in report.warnings:
            report.warnings.append(msg)
    return glfs


def check_rho_sampling(
    dense: DiscreteCurve,
    samples,
    rho: float,
    lfs,
    injectivity_bound: float | None = None,
    report: SamplingReport | None = None,
    metric: CurveMetric | None = None,
) -> bool:
    """Every dense point is within ``rho`` times its interval's reach of an endpoint.

    ``samples`` are indices into ``dense`` in curve order; ``lfs`` holds the
    per-dense-point feature size. An interval's reach is the minimum
    (injective) feature size over its points. Per-interval worst ratios are
    written to ``report.interval_rho``.
    """
    n = len(dense)
    s = _check_cyclic_order(samples, n, dense.closed)
    glfs = _glfs(lfs, injectivity_bound, report)
    if glfs.shape[0] != n:
        raise InvalidInputError("lfs must have one value per dense point")
    metric = metric or CurveMetric(dense)
    ratios = []
    ok = True
    for _, s0, s1, idx in _intervals(s, n, dense.closed):
        reach = glfs[idx].min()
        worst = np.minimum(metric.row(s0)[idx], metric.row(s1)[idx]).max()
        ratios.append(worst / reach if reach > 0 else np.inf)
        if not worst < rho * reach:
            ok = False
    if report is not None:
        report.interval_rho = np.array(ratios)
        report.lfs = glfs[s]
        report.injectivity_bound = injectivity_bound
        report.thresholds["rho"] = float(rho)
        report.verdicts["rho_ok"] = ok
    return ok


def consecutive_distances(order, D) -> np.ndarray:
    """Cyclic consecutive distances ``D[order[t], order[t+1]]``."""
    order = np.asarray(order, dtype=np.int64)
    D = np.asarray(D, dtype=np.float64)
    return D[order, np.roll(order, -1)]


def check_uniform_sampling(order, D, theta: float, report: SamplingReport | None = None) -> bool:
    """All consecutive distances are strictly below ``theta``."""
    if len(order) < 2:
        raise InvalidInputError("need at least two samples")
    gaps = consecutive_distances(order, D)
    ok = bool(np.all(gaps < theta))
    if report is not None:
        report.theta_max = float(gaps.max())
        report.thresholds["theta"] = float(theta)
        report.verdicts["uniform_ok"] = ok
    return ok


def nonuniformity_ratios(order, D) -> np.ndarray:
    """Ratio of the longer to the shorter gap around each sample (cyclic)."""
    if len(order) < 3:
        raise InvalidInputError("non-uniformity needs at least three samples")
    after = consecutive_distances(order, D)
    before = np.roll(after, 1)
    if np.any(after <= 0.0):
        raise InvalidInputError("zero distance between consecutive samples")
    return np.maximum(before, after) / np.minimum(before, after)


def check_nonuniformity(order, D, u: float, report: SamplingReport | None = None) -> bool:
    values = nonuniformity_ratios(order, D)
    ok = bool(np.all(values < u))
    if report is not None:
        report.u_values = values
        report.thresholds["u"] = float(u)
        report.verdicts["u_ok"] = ok
    return ok


def analyze_sampling(
    dense: DiscreteCurve,
    samples,
    rho: float,
    u: float,
    theta: float | None = None,
    lfs=None,
    injectivity_bound: float | None = None,
) -> SamplingReport:
    """Run every checker and collect the results in one report."""
    report = SamplingReport()
    if lfs is None:
        axis = approximate_medial_axis(dense)
        if axis.empty:
            report.warnings.append("medial axis is empty")
        lfs = local_feature_sizes(dense, axis, injectivity_bound)
    metric = CurveMetric(dense)
    check_rho_sampling(dense, samples, rho, lfs, injectivity_bound, report, metric)
    D = metric.matrix(samples)
    order = np.arange(len(samples))
    check_nonuniformity(order, D, u, report)
    if theta is not None:
        check_uniform_sampling(order, D, theta, report)
    else:
        report.theta_max = float(consecutive_distances(order, D).max())
    return report


# ---------------------------------------------------------------------------
# subsampling


def subsample_curve(
    dense: DiscreteCurve,
    rho: float,
    u: float,
    lfs,
    injectivity_bound: float | None = None,
    max_steps: int = 200_000,
) -> list[int]:
    """Sparse sample subset meeting both the rho and non-uniformity targets.

    Walks the curve from point 0, always trying the farthest admissible next
    sample first and backtracking when the non-uniformity target cannot be
    kept or the loop cannot be closed. The result is re-verified with the
    checkers; no minimality is claimed.

    Raises
    ------
    UnsatisfiableSamplingError
        When the search space (or ``max_steps``) is exhausted.
    """
    if not dense.closed:
        raise InvalidInputError("subsampling is defined for closed curves")
    if rho <= 0 or u <= 1:
        raise InvalidInputError("need rho > 0 and u > 1")
    n = len(dense)
    glfs = _glfs(lfs, injectivity_bound, None)
    metric = CurveMetric(dense)

    def admissible(i: int) -> list[int]:
        """Forward reach from i (as unwrapped indices up to i + n), farthest first."""
        out = []
        ri = metric.row(i)
        for j in range(i + 1, i + n + 1):
            idx = np.arange(i, j + 1) % n
            reach = glfs[idx].min()
            worst = np.minimum(ri[idx], metric.row(j % n)[idx]).max()
            if worst < rho * reach:
                out.append(j)
            else:
                break
        return out[::-1]

    cand_cache: dict[int, list[int]] = {}

    def candidates(i: int) -> list[int]:
        if i not in cand_cache:
            cand_cache[i] = admissible(i)
        return cand_cache[i]

    def gap(i: int, j: int) -> float:
        return metric(i % n, j % n)

    def ratio_ok(g0: float, g1: float) -> bool:
        return max(g0, g1) / min(g0, g1) < u

    failed: set[tuple[int, int]] = set()
    path = [0]
    stack = [iter(candidates(0))]
    steps = 0
    while stack:
        steps += 1
        if steps > max_steps:
            break
        i = path[-1]
        nxt = next(stack[-1], None)
        if nxt is None:
            stack.pop()
            done = path.pop()
            if path:
                failed.add((path[-1], done))
            continue
        if nxt > n:
            continue
        if len(path) >= 2 and not ratio_ok(gap(path[-2], i), gap(i, nxt)):
            continue
        if nxt == n:
            if len(path) >= 3 and ratio_ok(gap(i, n), gap(0, path[1])):
                result = path
                break
            continue
        if (i, nxt) in failed:
            continue
        path.append(nxt)
        stack.append(iter(candidates(nxt)))
    else:
        result = None
    if steps > max_steps:
        result = None
    if not result:
        raise UnsatisfiableSamplingError(f"no sampling with rho < {rho} and u < {u} found")

    samples = list(result)
    D = metric.matrix(samples)
    if not check_rho_sampling(dense, samples, rho, glfs, metric=metric) or not check_nonuniformity(np.arange(len(samples)), D, u):
        raise UnsatisfiableSamplingError("subsampling result failed verification")
    return samples
