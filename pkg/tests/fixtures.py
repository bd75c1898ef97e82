"""Shared synthetic curve fixtures with known ground-truth order."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from curverecon.metrics import EuclideanPointSet
from curverecon.geodesic import dual_voronoi_graph, multi_source_propagate, pairwise_distances
from curverecon.sampling import (
    CurveMetric,
    DiscreteCurve,
    MedialAxisApprox,
    approximate_medial_axis,
    check_rho_sampling,
    local_feature_sizes,
    nonuniformity_ratios,
)
from curverecon.shapes import icosphere, torus


@dataclass
class CurveFixture:
    name: str
    dense: DiscreteCurve
    lfs: np.ndarray
    injectivity_bound: float | None
    base_count: int

    def jittered(self, seed: int, count: int | None = None, jitter: float = 0.2) -> np.ndarray:
        """Dense indices of ``count`` near-equally spaced samples, jittered."""
        n = len(self.dense)
        k = count or self.base_count
        rng = np.random.default_rng(seed)
        base = np.arange(k) * n / k
        step = n / k
        idx = np.round(base + rng.uniform(-jitter, jitter, k) * step).astype(int) % n
        return np.sort(np.unique(idx))

    def sample_D(self, samples) -> np.ndarray:
        return CurveMetric(self.dense).matrix(samples)

    def passes(self, samples, rho=0.9, u=1.9) -> bool:
        ok = check_rho_sampling(self.dense, samples, rho, self.lfs, self.injectivity_bound)
        uv = nonuniformity_ratios(np.arange(len(samples)), self.sample_D(samples))
        return ok and bool(np.all(uv <= u))

    def dual_graph(self, samples, D):
        if self.dense.mesh is None:
            return EuclideanPointSet(self.dense.points[samples]).dual_adjacency(D)
        mesh = self.dense.mesh
        verts = self.dense.points[samples]
        return dual_voronoi_graph(multi_source_propagate(mesh, verts), mesh, D)

    def distances(self, samples) -> np.ndarray:
        if self.dense.mesh is None:
            return EuclideanPointSet(self.dense.points[samples]).distance_matrix()
        return pairwise_distances(self.dense.mesh, self.dense.points[samples])


def latitude_fixture(level: int = 4, height: float = 0.3) -> CurveFixture:
    """Circle of constant height about the axis through vertex 0.

    The medial axis of such a circle is the axis pair of antipodal vertices,
    so lfs is the graph distance to the nearer of them.
    """
    mesh = icosphere(level)
    V = mesh.vertices
    axis = V[0]
    anti = int(np.argmin(np.linalg.norm(V + axis, axis=1)))
    e1 = np.cross(axis, [0.0, 0.0, 1.0])
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(axis, e1)
    ang = np.linspace(0, 2 * np.pi, 90, endpoint=False)
    r = np.sqrt(1 - height**2)
    targets = height * axis + r * (np.outer(np.cos(ang), e1) + np.outer(np.sin(ang), e2))
    wp = [int(np.argmin(np.linalg.norm(V - p, axis=1))) for p in targets]
    dense = DiscreteCurve.trace_on_mesh(mesh, wp)
    medial = MedialAxisApprox(points=V[[0, anti]], method="analytic", vertices=np.array([0, anti]))
    lfs = local_feature_sizes(dense, medial)
    return CurveFixture("icosphere-latitude", dense, lfs, np.pi, 12)


def torus_fixture(major: float = 2.0, minor: float = 0.6) -> CurveFixture:
    """Outer equator of a torus: empty medial axis, lfs from the bound pi * minor."""
    n_major, n_minor = 96, 32
    mesh = torus(major, minor, n_major, n_minor)
    dense = DiscreteCurve(np.arange(n_major) * n_minor, closed=True, mesh=mesh)
    bound = np.pi * minor
    return CurveFixture("torus-loop", dense, np.full(n_major, bound), bound, 12)


def wavy_fixture(n: int = 720, amp: float = 0.15, lobes: int = 5) -> CurveFixture:
    """Planar star-shaped loop r = 1 + amp cos(lobes phi)."""
    phi = np.linspace(0, 2 * np.pi, n, endpoint=False)
    r = 1 + amp * np.cos(lobes * phi)
    dense = DiscreteCurve(np.c_[r * np.cos(phi), r * np.sin(phi)], closed=True)
    lfs = local_feature_sizes(dense, approximate_medial_axis(dense))
    return CurveFixture("planar-wavy", dense, lfs, None, 40)


ALL_FIXTURES = (latitude_fixture, torus_fixture, wavy_fixture)


def latitude_samples(mesh, height: float, count: int, offset: float = 0.0) -> np.ndarray:
    """Nearest vertices to ``count`` equally spaced points on the circle z = height."""
    V = mesh.vertices
    r = np.sqrt(1 - height**2)
    ang = offset + np.arange(count) * 2 * np.pi / count
    pts = np.c_[r * np.cos(ang), r * np.sin(ang), np.full(count, height)]
    return np.array([int(np.argmin(np.linalg.norm(V - p, axis=1))) for p in pts])


def two_turn_poses() -> np.ndarray:
    """Nine poses on a pinched loop whose two waist turns pass close together.

    Translations follow r = 1 + 0.64 cos(2 phi) in the xy-plane and the
    rotation angle about z grows with phi, so poses across the waist are
    near in space but differ in rotation. Rows are ``qw qx qy qz tx ty tz``
    in ground-truth order.
    """
    from curverecon.metrics import quat_from_axis_angle

    phi = np.array([0.0, 0.81, 1.69, 2.57, 3.38, 3.81, 4.27, 5.16, 5.83])
    r = 1 + 0.64 * np.cos(2 * phi)
    t = np.c_[r * np.cos(phi), r * np.sin(phi), np.zeros_like(phi)]
    return np.array([np.r_[quat_from_axis_angle([0, 0, 1], 0.23 * p), tt] for p, tt in zip(phi, t)])


def peanut_surface_curve(shift: int = 25):
    """Pinched closed curve on a fine icosphere, with its approximate lfs.

    The curve is r = 0.55 (1 + 0.6 cos 2 phi) lifted to the upper hemisphere
    and traced along mesh edges; ``shift`` rotates the starting point.
    """
    mesh = icosphere(6)
    V = mesh.vertices
    phi = np.linspace(0, 2 * np.pi, 240, endpoint=False)
    r = (1 + 0.6 * np.cos(2 * phi)) * 0.55
    x, y = r * np.cos(phi), r * np.sin(phi)
    P = np.c_[x, y, np.sqrt(1 - x * x - y * y)]
    c0 = DiscreteCurve.trace_on_mesh(mesh, [int(np.argmin(np.linalg.norm(V - p, axis=1))) for p in P])
    lfs0 = local_feature_sizes(c0, approximate_medial_axis(c0))
    return DiscreteCurve(np.roll(c0.points, -shift), mesh=mesh), np.roll(lfs0, -shift)
