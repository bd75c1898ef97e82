"""Proximity graphs over samples: SIG, SIGDV and component bridging.

All graphs are weighted by a precomputed distance matrix ``D``; weights are
never recomputed from coordinates.
"""

from __future__ import annotations

import heapq
from collections.abc import Iterable

import numpy as np

from .errors import InvalidInputError

TAGS = ("dual-voronoi", "sig", "sigdv", "bridge")


def as_distance_matrix(D) -> np.ndarray:
    """Validate and return ``D`` as a square float array."""
    D = np.asarray(D, dtype=np.float64)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise InvalidInputError(f"distance matrix must be square, got shape {D.shape}")
    if np.any(np.diag(D) != 0.0):
        raise InvalidInputError("distance matrix must have a zero diagonal")
    if np.any(D < 0.0) or np.any(np.isnan(D)):
        raise InvalidInputError("distances must be non-negative")
    return D


class ProximityGraph:
    """Undirected weighted graph over sample indices ``0..n-1``.

    Every edge carries a provenance tag (one of :data:`TAGS`). Self-loops,
    duplicate edges and non-positive weights are rejected.
    """

    def __init__(self, n: int, edges: Iterable[tuple[int, int, float, str]] = ()):
        self.n = int(n)
        self._weight: dict[tuple[int, int], float] = {}
        self._tag: dict[tuple[int, int], str] = {}
        for a, b, w, tag in edges:
            self.add_edge(a, b, w, tag)

    @staticmethod
    def _key(a: int, b: int) -> tuple[int, int]:
        a, b = int(a), int(b)
        return (a, b) if a < b else (b, a)

    def add_edge(self, a: int, b: int, weight: float, tag: str) -> None:
        if a == b:
            raise InvalidInputError(f"self-loop at node {a}")
        if not (0 <= a < self.n and 0 <= b < self.n):
            raise InvalidInputError(f"edge ({a}, {b}) out of range for {self.n} nodes")
        if not weight > 0.0:
            raise InvalidInputError(f"edge ({a}, {b}) has non-positive weight {weight}")
        if tag not in TAGS:
            raise InvalidInputError(f"unknown edge tag {tag!r}")
        key = self._key(a, b)
        if key in self._weight:
            raise InvalidInputError(f"duplicate edge {key}")
        self._weight[key] = float(weight)
        self._tag[key] = tag

    def has_edge(self, a: int, b: int) -> bool:
        return self._key(a, b) in self._weight

    def __contains__(self, ab) -> bool:
        return self.has_edge(*ab)

    def weight(self, a: int, b: int) -> float:
        return self._weight[self._key(a, b)]

    def tag(self, a: int, b: int) -> str:
        return self._tag[self._key(a, b)]

    @property
    def edges(self) -> list[tuple[int, int]]:
        return sorted(self._weight)

    def edge_set(self) -> set[tuple[int, int]]:
        return set(self._weight)

    def __len__(self) -> int:
        return len(self._weight)

    def __iter__(self):
        for key in self.edges:
            yield key[0], key[1], self._weight[key], self._tag[key]

    def tag_counts(self) -> dict[str, int]:
        counts = {t: 0 for t in TAGS}
        for t in self._tag.values():
            counts[t] += 1
        return counts

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        for row in adj:
            row.sort()
        return adj

    def components(self) -> list[list[int]]:
        """Connected components as sorted node lists, ordered by smallest node."""
        adj = self.adjacency()
        seen = [False] * self.n
        comps = []
        for s in range(self.n):
            if seen[s]:
                continue
            seen[s] = True
            stack, comp = [s], []
            while stack:
                u = stack.pop()
                comp.append(u)
                for v in adj[u]:
                    if not seen[v]:
                        seen[v] = True
                        stack.append(v)
            comps.append(sorted(comp))
        return comps

    def is_connected(self) -> bool:
        return self.n <= 1 or len(self.components()) == 1

    def subgraph(self, nodes: list[int]) -> ProximityGraph:
        """Induced subgraph, relabelled so ``nodes[i]`` becomes ``i``."""
        index = {int(v): i for i, v in enumerate(nodes)}
        sub = ProximityGraph(len(nodes))
        for (a, b), w in self._weight.items():
            if a in index and b in index:
                sub.add_edge(index[a], index[b], w, self._tag[(a, b)])
        return sub

    def copy(self) -> ProximityGraph:
        return ProximityGraph(self.n, iter(self))

    def __repr__(self):
        return f"ProximityGraph(n={self.n}, edges={len(self)})"


def nearest_neighbor_distances(D) -> np.ndarray:
    """Distance from each sample to its nearest other sample."""
    D = as_distance_matrix(D)
    n = D.shape[0]
    if n < 2:
        raise InvalidInputError("nearest-neighbor distances need at least two samples")
    off = D + np.diag(np.full(n, np.inf))
    return off.min(axis=1)


def sig_graph(D) -> ProximityGraph:
    """Spheres-of-Influence graph.

    ``i`` and ``j`` are joined iff ``D[i, j] <= nn[i] + nn[j]`` where ``nn`` is
    the nearest-neighbor distance; boundary ties are included.
    """
    D = as_distance_matrix(D)
    nn = nearest_neighbor_distances(D)
    mask = (D <= nn[:, None] + nn[None, :]) & np.isfinite(D)
    ii, jj = np.nonzero(np.triu(mask, k=1))
    return ProximityGraph(D.shape[0], ((i, j, D[i, j], "sig") for i, j in zip(ii.tolist(), jj.tolist())))


def sigdv_graph(dual: ProximityGraph, sig: ProximityGraph) -> ProximityGraph:
    """Edge intersection of the dual Voronoi graph and the SIG."""
    if dual.n != sig.n:
        raise InvalidInputError(f"node count mismatch: {dual.n} vs {sig.n}")
    common = sorted(dual.edge_set() & sig.edge_set())
    return ProximityGraph(dual.n, ((a, b, dual.weight(a, b), "sigdv") for a, b in common))


def bridge_components(g: ProximityGraph, D) -> tuple[ProximityGraph, list[tuple[int, int]]]:
    """Connect the components of ``g`` with the shortest possible extra edges.

    Builds the complete graph over components, weighting each pair by the
    smallest sample-to-sample distance between them, takes its minimum
    spanning tree and adds the sample pair realising each tree edge (tagged
    ``"bridge"``). Equal distances resolve to the lexicographically smallest
    sample pair.

    Returns the bridged copy of ``g`` and the added edges.
    """
    D = as_distance_matrix(D)
    if D.shape[0] != g.n:
        raise InvalidInputError(f"distance matrix is {D.shape[0]}x{D.shape[0]} but graph has {g.n} nodes")
    comps = g.components()
    out = g.copy()
    if len(comps) <= 1:
        return out, []

    c = len(comps)
    best: dict[tuple[int, int], tuple[float, int, int]] = {}
    for i in range(c):
        Ni = np.asarray(comps[i])
        for j in range(i + 1, c):
            Nj = np.asarray(comps[j])
            block = D[np.ix_(Ni, Nj)]
            m = block.min()
            cand = [(min(int(Ni[r]), int(Nj[s])), max(int(Ni[r]), int(Nj[s]))) for r, s in zip(*np.nonzero(block == m))]
            u, v = min(cand)
            best[(i, j)] = (float(m), u, v)

    # Prim over the component graph; ties by (weight, sample pair)
    in_tree = [False] * c
    in_tree[0] = True
    heap = [(best[(0, j)][0], best[(0, j)][1], best[(0, j)][2], j) for j in range(1, c)]
    heapq.heapify(heap)
    added = []
    while heap:
        w, u, v, j = heapq.heappop(heap)
        if in_tree[j]:
            continue
        in_tree[j] = True
        out.add_edge(u, v, w, "bridge")
        added.append((u, v))
        for k in range(c):
            if not in_tree[k]:
                bw, bu, bv = best[(min(j, k), max(j, k))]
                heapq.heappush(heap, (bw, bu, bv, k))
    return out, added
