"""Metric backends the reconstruction is generic over.

A backend is any object with ``n``, ``distance(i, j)``, ``distance_matrix()``
and ``cross_distances(points)``; it may also provide ``dual_adjacency()``
returning the Voronoi-dual :class:`~curverecon.graphs.ProximityGraph`.

Rotations are unit quaternions ``(w, x, y, z)`` kept on the ``w > 0``
hemisphere. The rotation distance ``2 arccos(<p, q>)`` is a true metric on
that representation, and for samples whose pairwise dot products are
non-negative it ranks neighbours exactly like the Euclidean distance in
R^4, so Voronoi cells can be computed in the embedding.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol, runtime_checkable

import numpy as np
from scipy.spatial import Delaunay
from scipy.spatial.distance import cdist

from .errors import InvalidInputError
from .graphs import ProximityGraph

UNIT_TOL = 1e-6


@runtime_checkable
class MetricPointSet(Protocol):
    n: int

    def distance(self, i: int, j: int) -> float: ...

    def distance_matrix(self) -> np.ndarray: ...

    def cross_distances(self, points) -> np.ndarray: ...


# ---------------------------------------------------------------------------
# quaternions


def canonicalize(q) -> np.ndarray:
    """Normalise ``q`` and flip it onto the ``w > 0`` hemisphere.

    When ``w == 0`` the first non-zero of ``x, y, z`` is made positive.
    Raises if the input norm is more than 1e-6 away from 1.
    """
    q = np.asarray(q, dtype=np.float64)
    norm = np.linalg.norm(q)
    if abs(norm - 1.0) > UNIT_TOL:
        raise InvalidInputError(f"quaternion {q.tolist()} is not unit-norm (|q| = {norm:.9g})")
    q = q / norm
    lead = q[0]
    if lead == 0.0:
        nz = np.flatnonzero(q[1:])
        lead = q[1 + nz[0]] if nz.size else 1.0
    return -q if lead < 0 else q


def quat_multiply(a, b) -> np.ndarray:
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return np.array([
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    ])


def quat_to_matrix(q) -> np.ndarray:
    w, x, y, z = q
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


def quat_from_axis_angle(axis, angle: float) -> np.ndarray:
    axis = np.asarray(axis, dtype=np.float64)
    axis = axis / np.linalg.norm(axis)
    return np.concatenate([[np.cos(angle / 2)], np.sin(angle / 2) * axis])


def slerp(p, q, t: float) -> np.ndarray:
    """Spherical interpolation along the shorter arc."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    dot = float(np.dot(p, q))
    if dot < 0.0:
        q, dot = -q, -dot
    if dot > 1.0 - 1e-12:
        r = p + t * (q - p)
        return r / np.linalg.norm(r)
    theta = np.arccos(dot)
    s = np.sin(theta)
    return (np.sin((1 - t) * theta) * p + np.sin(t * theta) * q) / s


def _check_unit(q, name: str) -> np.ndarray:
    q = np.asarray(q, dtype=np.float64)
    if q.shape[-1] != 4:
        raise InvalidInputError(f"{name} must have 4 components")
    norm = np.linalg.norm(q, axis=-1)
    if np.any(np.abs(norm - 1.0) > UNIT_TOL):
        raise InvalidInputError(f"{name} is not unit-norm")
    return q


def so3_distance(p, q) -> float:
    """Rotation distance ``2 arccos(<p, q>)`` in radians."""
    p = _check_unit(p, "p")
    q = _check_unit(q, "q")
    return float(2.0 * np.arccos(np.clip(np.dot(p, q), -1.0, 1.0)))


def _so3_cross(P, Q) -> np.ndarray:
    return 2.0 * np.arccos(np.clip(P @ Q.T, -1.0, 1.0))


# ---------------------------------------------------------------------------
# rigid motions


@dataclass(frozen=True)
class RigidMotionSample:
    """A pose: canonical unit quaternion plus translation."""

    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        rot = canonicalize(self.rotation)
        tr = np.asarray(self.translation, dtype=np.float64).reshape(3)
        rot.setflags(write=False)
        tr.setflags(write=False)
        object.__setattr__(self, "rotation", rot)
        object.__setattr__(self, "translation", tr)

    @classmethod
    def from_array(cls, row) -> RigidMotionSample:
        row = np.asarray(row, dtype=np.float64)
        return cls(row[:4], row[4:7])

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.rotation, self.translation])


def _check_weights(w_rot: float, w_tr: float) -> None:
    if w_rot < 0 or w_tr < 0:
        raise InvalidInputError("metric weights must be non-negative")
    if w_rot == 0 and w_tr == 0:
        raise InvalidInputError("at least one metric weight must be positive")


def se3_distance(a: RigidMotionSample, b: RigidMotionSample, w_rot: float = 1.0, w_tr: float = 1.0) -> float:
    """Weighted product metric ``sqrt(w_rot * theta^2 + w_tr * |dt|^2)``."""
    _check_weights(w_rot, w_tr)
    theta = so3_distance(a.rotation, b.rotation)
    dt = a.translation - b.translation
    return float(np.sqrt(w_rot * theta * theta + w_tr * float(dt @ dt)))


def embed_se3_r7(s: RigidMotionSample, beta: float | None = None, w_rot: float = 1.0, w_tr: float = 1.0) -> np.ndarray:
    """Point ``(qw, qx, qy, qz, beta*tx, beta*ty, beta*tz)`` in R^7.

    The quaternion chord is ``2 sin(theta/4)``, about half the rotation
    angle, so the default ``beta = sqrt(w_tr / w_rot) / 2`` makes R^7
    distances proportional to :func:`se3_distance` (factor
    ``1 / (2 sqrt(w_rot))``) for small rotations.
    """
    if beta is None:
        _check_weights(w_rot, w_tr)
        if w_rot == 0:
            raise InvalidInputError("the R^7 embedding needs w_rot > 0")
        beta = 0.5 * np.sqrt(w_tr / w_rot)
    return np.concatenate([s.rotation, beta * s.translation])


# ---------------------------------------------------------------------------
# backends


class EuclideanPointSet:
    """Points in R^d with the Euclidean metric.

    ``dual_adjacency`` is the Delaunay graph (via Qhull) of the points in
    their affine hull; collinear points are chained in order along the line.
    """

    def __init__(self, points):
        pts = np.asarray(points, dtype=np.float64)
        if pts.ndim != 2:
            raise InvalidInputError("points must be an (n, d) array")
        self.points = pts
        self.n = pts.shape[0]

    def distance(self, i: int, j: int) -> float:
        return float(np.linalg.norm(self.points[i] - self.points[j]))

    def distance_matrix(self) -> np.ndarray:
        D = cdist(self.points, self.points)
        np.fill_diagonal(D, 0.0)
        return D

    def cross_distances(self, points) -> np.ndarray:
        return cdist(np.asarray(points, dtype=np.float64).reshape(-1, self.points.shape[1]), self.points)

    def dual_adjacency(self, D=None) -> ProximityGraph:
        if D is None:
            D = self.distance_matrix()
        centered = self.points - self.points.mean(axis=0)
        scale = max(1.0, float(np.abs(centered).max()))
        _, sv, vt = np.linalg.svd(centered, full_matrices=False)
        rank = int(np.sum(sv > 1e-12 * scale))
        pairs: set[tuple[int, int]] = set()
        if rank == 1:
            order = np.argsort(centered @ vt[0], kind="stable")
            pairs = {tuple(sorted((int(a), int(b)))) for a, b in zip(order[:-1], order[1:])}
        elif rank >= 2 and self.n <= rank + 1:
            pairs = {(i, j) for i in range(self.n) for j in range(i + 1, self.n)}
        elif rank >= 2:
            tri = Delaunay(centered @ vt[:rank].T)
            for simplex in tri.simplices:
                s = sorted(int(x) for x in simplex)
                for a in range(len(s)):
                    for b in range(a + 1, len(s)):
                        pairs.add((s[a], s[b]))
        return ProximityGraph(self.n, ((a, b, float(D[a, b]), "dual-voronoi") for a, b in sorted(pairs)))


class SE3PointSet:
    """Poses under :func:`se3_distance`."""

    def __init__(self, poses, w_rot: float = 1.0, w_tr: float = 1.0):
        _check_weights(w_rot, w_tr)
        self.poses = [p if isinstance(p, RigidMotionSample) else RigidMotionSample.from_array(p) for p in poses]
        self.n = len(self.poses)
        self.w_rot = float(w_rot)
        self.w_tr = float(w_tr)
        self._Q = np.array([p.rotation for p in self.poses]).reshape(-1, 4)
        self._T = np.array([p.translation for p in self.poses]).reshape(-1, 3)

    def distance(self, i: int, j: int) -> float:
        return se3_distance(self.poses[i], self.poses[j], self.w_rot, self.w_tr)

    def _cross(self, Q, T) -> np.ndarray:
        theta = _so3_cross(Q, self._Q)
        dt2 = cdist(T, self._T, "sqeuclidean")
        return np.sqrt(self.w_rot * theta * theta + self.w_tr * dt2)

    def distance_matrix(self) -> np.ndarray:
        D = self._cross(self._Q, self._T)
        D = np.minimum(D, D.T)
        np.fill_diagonal(D, 0.0)
        return D

    def cross_distances(self, points) -> np.ndarray:
        poses = [p if isinstance(p, RigidMotionSample) else RigidMotionSample.from_array(p) for p in points]
        Q = np.array([p.rotation for p in poses]).reshape(-1, 4)
        T = np.array([p.translation for p in poses]).reshape(-1, 3)
        return self._cross(Q, T)


def witness_dual_voronoi(samples, witnesses, tau: float = 0.25, D=None) -> ProximityGraph:
    """Approximate Voronoi-cell adjacency from witness points.

    Each witness votes for the pair formed by its two nearest samples when
    it lies near their bisector: ``(d2 - d1) < tau * d2``. Equal distances
    rank the lower sample index first. Edge weights are sample-to-sample
    distances.
    """
    if len(witnesses) == 0:
        raise InvalidInputError("witness set is empty")
    if samples.n < 2:
        return ProximityGraph(samples.n)
    if D is None:
        D = samples.distance_matrix()
    W = samples.cross_distances(witnesses)
    order = np.argsort(W, axis=1, kind="stable")[:, :2]
    rows = np.arange(W.shape[0])
    d1 = W[rows, order[:, 0]]
    d2 = W[rows, order[:, 1]]
    near = (d2 - d1) < tau * d2
    pairs = np.unique(np.sort(order[near], axis=1), axis=0)
    return ProximityGraph(samples.n, ((int(a), int(b), float(D[a, b]), "dual-voronoi") for a, b in pairs))
