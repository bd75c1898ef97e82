# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: multi-source Dijkstra and first-improvement 2-opt.

Semantics match ``_pykernels`` exactly, including tie-breaking, so either
backend produces identical arrays.
"""

import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free
from libc.math cimport INFINITY

cnp.import_array()


cdef struct Entry:
    double d
    long lab
    long v


cdef inline bint _less(Entry* a, Entry* b) noexcept nogil:
    if a.d != b.d:
        return a.d < b.d
    if a.lab != b.lab:
        return a.lab < b.lab
    return a.v < b.v


cdef inline void _push(Entry* heap, long* size, double d, long lab, long v) noexcept nogil:
    cdef long i = size[0]
    cdef long parent
    cdef Entry e
    e.d = d
    e.lab = lab
    e.v = v
    size[0] += 1
    while i > 0:
        parent = (i - 1) >> 1
        if _less(&e, &heap[parent]):
            heap[i] = heap[parent]
            i = parent
        else:
            break
    heap[i] = e


cdef inline Entry _pop(Entry* heap, long* size) noexcept nogil:
    cdef Entry top = heap[0]
    cdef Entry last
    cdef long n, i, child
    size[0] -= 1
    n = size[0]
    if n > 0:
        last = heap[n]
        i = 0
        while True:
            child = 2 * i + 1
            if child >= n:
                break
            if child + 1 < n and _less(&heap[child + 1], &heap[child]):
                child += 1
            if _less(&heap[child], &last):
                heap[i] = heap[child]
                i = child
            else:
                break
        heap[i] = last
    return top


def dijkstra(indptr, indices, weights, sources):
    cdef cnp.int64_t[::1] ip = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef cnp.int64_t[::1] ix = np.ascontiguousarray(indices, dtype=np.int64)
    cdef double[::1] wt = np.ascontiguousarray(weights, dtype=np.float64)
    cdef cnp.int64_t[::1] src = np.ascontiguousarray(sources, dtype=np.int64)
    cdef long n = ip.shape[0] - 1
    cdef long nsrc = src.shape[0]

    dist_arr = np.full(n, np.inf, dtype=np.float64)
    label_arr = np.full(n, -1, dtype=np.int64)
    pred_arr = np.full(n, -1, dtype=np.int64)
    cdef double[::1] dist = dist_arr
    cdef cnp.int64_t[::1] label = label_arr
    cdef cnp.int64_t[::1] pred = pred_arr

    cdef long cap = ix.shape[0] + nsrc + 1
    cdef Entry* heap = <Entry*> malloc(cap * sizeof(Entry))
    cdef char* done = <char*> malloc((n + 1) * sizeof(char))
    if heap == NULL or done == NULL:
        free(heap)
        free(done)
        raise MemoryError()

    cdef long size = 0
    cdef long k, s, u, v, e, lab
    cdef double d, nd, dv
    cdef Entry top

    with nogil:
        for k in range(n):
            done[k] = 0
        for k in range(nsrc):
            s = src[k]
            if label[s] == -1 or k < label[s]:
                dist[s] = 0.0
                label[s] = k
                _push(heap, &size, 0.0, k, s)
        while size > 0:
            top = _pop(heap, &size)
            d = top.d
            lab = top.lab
            u = top.v
            if done[u]:
                continue
            done[u] = 1
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
                    if size >= cap:
                        # cannot happen: one push per relaxation, one relaxation per directed edge
                        break
                    _push(heap, &size, nd, lab, v)

    free(heap)
    free(done)
    return dist_arr, label_arr, pred_arr


def two_opt(order, D, double rel_tol):
    P_arr = np.array(order, dtype=np.int64, copy=True)
    cdef cnp.int64_t[::1] P = P_arr
    cdef double[:, ::1] M = np.ascontiguousarray(D, dtype=np.float64)
    cdef long n = P.shape[0]
    cdef long i, l, a, b, c, d, stop, lo, hi, tmp
    cdef long moves = 0
    cdef double length = 0.0
    cdef double delta, dab
    cdef bint improved = True

    if n < 4:
        return P_arr, 0

    with nogil:
        for i in range(n):
            length += M[P[i], P[(i + 1) % n]]
        while improved:
            improved = False
            for i in range(n - 2):
                a = P[i]
                b = P[i + 1]
                dab = M[a, b]
                stop = n - 1 if i == 0 else n
                for l in range(i + 2, stop):
                    c = P[l]
                    d = P[l + 1] if l + 1 < n else P[0]
                    delta = dab + M[c, d] - M[a, c] - M[b, d]
                    if delta > rel_tol * length:
                        lo = i + 1
                        hi = l
                        while lo < hi:
                            tmp = P[lo]
                            P[lo] = P[hi]
                            P[hi] = tmp
                            lo += 1
                            hi -= 1
                        length -= delta
                        moves += 1
                        improved = True
                        break
                if improved:
                    break
    return P_arr, moves
