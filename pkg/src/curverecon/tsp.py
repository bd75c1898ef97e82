"""MST-seeded 2-opt tour construction over a proximity graph."""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DisconnectedError, InvalidInputError
from .graphs import ProximityGraph, as_distance_matrix

REL_TOL = 1e-12


def cycle_length(order, D) -> float:
    order = np.asarray(order, dtype=np.int64)
    if len(order) < 2:
        return 0.0
    return float(D[order, np.roll(order, -1)].sum())


@dataclass(frozen=True)
class Tour:
    """Closed visiting order of samples with its length under ``D``."""

    order: tuple[int, ...]
    length: float

    @classmethod
    def from_order(cls, order, D) -> Tour:
        order = tuple(int(i) for i in order)
        if len(set(order)) != len(order):
            raise InvalidInputError("tour visits a sample twice")
        return cls(order, cycle_length(order, D))

    def __len__(self) -> int:
        return len(self.order)

    def canonical(self) -> Tour:
        """Rotate to start at the smallest index; orient so ``order[1] < order[-1]``."""
        o = list(self.order)
        if len(o) < 3:
            return Tour(tuple(sorted(o)), self.length)
        k = o.index(min(o))
        o = o[k:] + o[:k]
        if o[1] > o[-1]:
            o = [o[0]] + o[:0:-1]
        return Tour(tuple(o), self.length)

    def edges(self) -> set[tuple[int, int]]:
        o = self.order
        n = len(o)
        if n < 2:
            return set()
        return {tuple(sorted((o[t], o[(t + 1) % n]))) for t in range(n)}


def minimum_spanning_tree(g: ProximityGraph, D, root: int = 0) -> list[tuple[int, int]]:
    """Prim's tree over the edges of ``g`` only, weighted by ``D``.

    Ties go to the lexicographically smallest edge. Returned edges are
    ``(parent, child)`` in insertion order.

    Raises
    ------
    DisconnectedError
        If ``g`` does not span all its nodes.
    """
    D = as_distance_matrix(D)
    n = g.n
    if D.shape[0] != n:
        raise InvalidInputError("distance matrix does not match the graph")
    if n == 0:
        return []
    adj = g.adjacency()
    in_tree = [False] * n
    in_tree[root] = True
    heap = [(float(D[root, v]), min(root, v), max(root, v), root, v) for v in adj[root]]
    heapq.heapify(heap)
    tree = []
    while heap and len(tree) < n - 1:
        _, _, _, u, v = heapq.heappop(heap)
        if in_tree[v]:
            continue
        in_tree[v] = True
        tree.append((u, v))
        for x in adj[v]:
            if not in_tree[x]:
                heapq.heappush(heap, (float(D[v, x]), min(v, x), max(v, x), v, x))
    if len(tree) != n - 1:
        missing = in_tree.index(False)
        raise DisconnectedError(f"graph is disconnected (node {missing} unreachable from {root})")
    return tree


def tree_weight(tree, D) -> float:
    return float(sum(D[a, b] for a, b in tree))


def preorder_tour(tree, D, root: int = 0, n: int | None = None) -> Tour:
    """First-visit DFS order of the tree, children in ascending index order."""
    if n is None:
        n = len(tree) + 1
    adj: list[list[int]] = [[] for _ in range(n)]
    for a, b in tree:
        adj[a].append(b)
        adj[b].append(a)
    order = []
    seen = [False] * n
    stack = [root]
    while stack:
        u = stack.pop()
        if seen[u]:
            continue
        seen[u] = True
        order.append(u)
        kids = sorted(v for v in adj[u] if not seen[v])
        stack.extend(reversed(kids))
    if len(order) != n:
        raise InvalidInputError("tree does not span all nodes")
    return Tour.from_order(order, D)


def two_opt_refine(t: Tour, D) -> Tour:
    """First-improvement 2-opt until no swap shortens the tour.

    Pairs ``(i, l)`` are scanned lexicographically and the scan restarts
    after every applied swap; a swap counts only if it gains more than
    ``1e-12`` times the current length.
    """
    D = np.ascontiguousarray(as_distance_matrix(D))
    if len(t) < 4:
        return t
    order, _ = _kernels.two_opt(np.asarray(t.order, dtype=np.int64), D, REL_TOL)
    return Tour.from_order(order, D)


def improving_swaps(order, D, rel_tol: float = REL_TOL) -> list[tuple[int, int]]:
    """All position pairs whose 2-opt swap would shorten the tour."""
    P = list(order)
    n = len(P)
    if n < 4:
        return []
    length = cycle_length(P, D)
    out = []
    for i in range(n - 2):
        for l in range(i + 2, n if i else n - 1):
            a, b, c, d = P[i], P[i + 1], P[l], P[(l + 1) % n]
            if D[a, b] + D[c, d] - D[a, c] - D[b, d] > rel_tol * length:
                out.append((i, l))
    return out


def solve_tsp(g: ProximityGraph, D) -> Tour:
    """MST of ``g``, preorder walk from sample 0, then 2-opt over full ``D``."""
    D = as_distance_matrix(D)
    if g.n < 3:
        raise InvalidInputError("a closed tour needs at least 3 samples")
    tree = minimum_spanning_tree(g, D, root=0)
    return two_opt_refine(preorder_tour(tree, D, root=0, n=g.n), D)
