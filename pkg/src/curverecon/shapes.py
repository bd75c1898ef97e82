"""Procedural test surfaces: icospheres, tori and planar triangulations."""

import numpy as np
from scipy.spatial import Delaunay

from .mesh import TriMesh


def icosphere(subdivisions: int = 3, radius: float = 1.0) -> TriMesh:
    """Unit-radius (by default) icosphere obtained by 4:1 subdivision.

    The base icosahedron is centrally symmetric and so is every level, so each
    vertex has an antipodal vertex.
    """
    phi = (1.0 + 5.0 ** 0.5) / 2.0
    verts = [
        (-1, phi, 0), (1, phi, 0), (-1, -phi, 0), (1, -phi, 0),
        (0, -1, phi), (0, 1, phi), (0, -1, -phi), (0, 1, -phi),
        (phi, 0, -1), (phi, 0, 1), (-phi, 0, -1), (-phi, 0, 1),
    ]
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    verts = [np.array(v, dtype=float) / np.linalg.norm(v) for v in verts]

    for _ in range(subdivisions):
        cache = {}

        def midpoint(a, b):
            key = (a, b) if a < b else (b, a)
            if key not in cache:
                m = verts[a] + verts[b]
                verts.append(m / np.linalg.norm(m))
                cache[key] = len(verts) - 1
            return cache[key]

        new_faces = []
        for a, b, c in faces:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            new_faces += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = new_faces

    return TriMesh(np.array(verts) * radius, faces)


def torus(major: float = 2.0, minor: float = 0.6, n_major: int = 96, n_minor: int = 32) -> TriMesh:
    """Torus around the z axis, parametrised on a regular (u, v) grid.

    Vertex ``i * n_minor + j`` sits at ``u = 2*pi*i/n_major`` (around the
    hole) and ``v = 2*pi*j/n_minor`` (around the tube, ``v = 0`` on the outer
    equator).
    """
    u = 2 * np.pi * np.arange(n_major) / n_major
    v = 2 * np.pi * np.arange(n_minor) / n_minor
    U, V = np.meshgrid(u, v, indexing="ij")
    x = (major + minor * np.cos(V)) * np.cos(U)
    y = (major + minor * np.cos(V)) * np.sin(U)
    z = minor * np.sin(V)
    verts = np.column_stack([x.ravel(), y.ravel(), z.ravel()])

    def vid(i, j):
        return (i % n_major) * n_minor + (j % n_minor)

    faces = []
    for i in range(n_major):
        for j in range(n_minor):
            a, b, c, d = vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)
            faces += [(a, b, c), (a, c, d)]
    return TriMesh(verts, faces)


def triangulate_points(points) -> TriMesh:
    """Delaunay triangulation of planar points, as a flat mesh (z = 0)."""
    pts = np.asarray(points, dtype=float)
    tri = Delaunay(pts)
    return TriMesh(pts, tri.simplices)


def random_planar_mesh(n_points: int, rng, extra_points=None, bounds=(0.0, 1.0)) -> TriMesh:
    """Delaunay mesh over uniform random points in a square.

    ``extra_points`` are prepended so they become vertices ``0..k-1``. The
    square's perimeter is seeded at the mean point spacing so the convex hull
    carries no long sliver edges.
    """
    lo, hi = bounds
    pts = rng.uniform(lo, hi, size=(n_points, 2))
    m = max(2, int(np.ceil(np.sqrt(n_points))))
    t = np.linspace(lo, hi, m + 1)[:-1]
    ring = np.vstack([
        np.column_stack([t, np.full(m, lo)]),
        np.column_stack([np.full(m, hi), t]),
        np.column_stack([t[::-1] + (hi - lo) / m, np.full(m, hi)]),
        np.column_stack([np.full(m, lo), t[::-1] + (hi - lo) / m]),
    ])
    pts = np.vstack([pts, ring])
    if extra_points is not None:
        pts = np.vstack([np.asarray(extra_points, dtype=float), pts])
    return triangulate_points(pts)


def grid_mesh(nx: int, ny: int, spacing: float = 1.0) -> TriMesh:
    """Regular grid split along one diagonal per cell."""
    xs, ys = np.meshgrid(np.arange(nx) * spacing, np.arange(ny) * spacing, indexing="ij")
    verts = np.column_stack([xs.ravel(), ys.ravel()])
    faces = []
    for i in range(nx - 1):
        for j in range(ny - 1):
            a = i * ny + j
            b, c, d = a + ny, a + ny + 1, a + 1
            faces += [(a, b, c), (a, c, d)]
    return TriMesh(verts, faces)
