"""Pure-Python reference kernels.

These are the fallback used when the compiled extension is unavailable, and
the reference the compiled kernels are checked against bit for bit.
"""

import heapq

import numpy as np


def dijkstra(indptr, indices, weights, sources):
    """Multi-source shortest paths over a CSR graph.

    Returns ``(dist, label, pred)``. ``label[v]`` is the position in
    ``sources`` of the generator reaching ``v``; ties go to the lower
    position, then to the lower predecessor index. Unreached vertices get
    ``inf`` / ``-1`` / ``-1``.
    """
    indptr = np.asarray(indptr, dtype=np.int64)
    indices = np.asarray(indices, dtype=np.int64)
    weights = np.asarray(weights, dtype=np.float64)
    sources = np.asarray(sources, dtype=np.int64)
    n = indptr.shape[0] - 1

    dist = [float("inf")] * n
    label = [-1] * n
    pred = [-1] * n
    done = [False] * n
    ip = indptr.tolist()
    ix = indices.tolist()
    wt = weights.tolist()

    heap = []
    for k, s in enumerate(sources.tolist()):
        if label[s] == -1 or k < label[s]:
            dist[s] = 0.0
            label[s] = k
            heap.append((0.0, k, s))
    heapq.heapify(heap)

    while heap:
        d, lab, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for e in range(ip[u], ip[u + 1]):
            v = ix[e]
            if done[v]:
                continue
            nd = d + wt[e]
            dv = dist[v]
            if nd < dv or (nd == dv and (lab < label[v] or (lab == label[v] and u < pred[v]))):
                dist[v] = nd
                label[v] = lab
                pred[v] = u
                heapq.heappush(heap, (nd, lab, v))

    return (
        np.array(dist, dtype=np.float64),
        np.array(label, dtype=np.int64),
        np.array(pred, dtype=np.int64),
    )


def two_opt(order, D, rel_tol):
    """First-improvement 2-opt, restarting the scan after every applied move.

    Returns ``(order, n_moves)``.
    """
    P = [int(x) for x in order]
    n = len(P)
    if n < 4:
        return np.array(P, dtype=np.int64), 0
    Dl = np.asarray(D, dtype=np.float64).tolist()
    length = 0.0
    for i in range(n):
        length += Dl[P[i]][P[(i + 1) % n]]

    moves = 0
    improved = True
    while improved:
        improved = False
        for i in range(n - 2):
            a = P[i]
            b = P[i + 1]
            Da = Dl[a]
            Db = Dl[b]
            dab = Da[b]
            stop = n - 1 if i == 0 else n
            for l in range(i + 2, stop):
                c = P[l]
                d = P[l + 1] if l + 1 < n else P[0]
                delta = dab + Dl[c][d] - Da[c] - Db[d]
                if delta > rel_tol * length:
                    P[i + 1:l + 1] = P[i + 1:l + 1][::-1]
                    length -= delta
                    moves += 1
                    improved = True
                    break
            if improved:
                break
    return np.array(P, dtype=np.int64), moves
