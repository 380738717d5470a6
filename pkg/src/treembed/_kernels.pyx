# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; see ``_pykernels`` for the reference semantics."""

import numpy as np

from libc.stdint cimport int64_t, uint64_t


cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil
    int __builtin_ctzll(unsigned long long) nogil

cdef int64_t INF = 1 << 60


def prufer_decode(code, Py_ssize_t n):
    cdef int64_t[::1] seq = np.ascontiguousarray(code, dtype=np.int64)
    cdef Py_ssize_t m = seq.shape[0]
    cdef int64_t[::1] degree = np.ones(n, dtype=np.int64)
    out = np.empty((n - 1, 2), dtype=np.int64)
    cdef int64_t[:, ::1] edges = out
    cdef Py_ssize_t i, ptr = 0
    cdef int64_t v, leaf
    for i in range(m):
        degree[seq[i]] += 1
    while degree[ptr] != 1:
        ptr += 1
    leaf = ptr
    for i in range(m):
        v = seq[i]
        edges[i, 0] = leaf
        edges[i, 1] = v
        degree[v] -= 1
        if degree[v] == 1 and v < ptr:
            leaf = v
        else:
            ptr += 1
            while degree[ptr] != 1:
                ptr += 1
            leaf = ptr
    edges[n - 2, 0] = leaf
    edges[n - 2, 1] = n - 1
    return out


def hopcroft_karp(indptr, indices, Py_ssize_t n_left, Py_ssize_t n_right):
    cdef int64_t[::1] ptr = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef int64_t[::1] idx = np.ascontiguousarray(indices, dtype=np.int64)
    result = np.full(n_left, -1, dtype=np.int64)
    cdef int64_t[::1] match_l = result
    cdef int64_t[::1] match_r = np.full(max(n_right, 1), -1, dtype=np.int64)
    cdef int64_t[::1] dist = np.zeros(max(n_left, 1), dtype=np.int64)
    cdef int64_t[::1] queue = np.zeros(max(n_left, 1), dtype=np.int64)
    cdef int64_t[::1] it = np.zeros(max(n_left, 1), dtype=np.int64)
    cdef int64_t[::1] stack = np.zeros(max(n_left, 1), dtype=np.int64)
    cdef int64_t[::1] via = np.zeros(max(n_left, 1), dtype=np.int64)
    cdef Py_ssize_t head, tail, u, e, w, v, root, top, j, x
    cdef bint found
    while True:
        head = 0
        tail = 0
        for u in range(n_left):
            if match_l[u] < 0:
                dist[u] = 0
                queue[tail] = u
                tail += 1
            else:
                dist[u] = INF
        found = False
        while head < tail:
            u = queue[head]
            head += 1
            for e in range(ptr[u], ptr[u + 1]):
                w = match_r[idx[e]]
                if w < 0:
                    found = True
                elif dist[w] == INF:
                    dist[w] = dist[u] + 1
                    queue[tail] = w
                    tail += 1
        if not found:
            break
        for u in range(n_left):
            it[u] = ptr[u]
        for root in range(n_left):
            if match_l[root] >= 0:
                continue
            top = 0
            stack[0] = root
            while top >= 0:
                u = stack[top]
                if it[u] == ptr[u + 1]:
                    dist[u] = INF
                    top -= 1
                    continue
                v = idx[it[u]]
                it[u] += 1
                w = match_r[v]
                if w < 0:
                    via[top] = v
                    for j in range(top + 1):
                        x = stack[j]
                        match_l[x] = via[j]
                        match_r[via[j]] = x
                    break
                if dist[w] == dist[u] + 1:
                    via[top] = v
                    top += 1
                    stack[top] = w
    return result


cdef int _search(const uint64_t* closed, int n, int k, uint64_t full,
                 uint64_t covered, int depth, int* chosen,
                 long long* nodes, long long budget, int* found_depth) nogil:
    cdef uint64_t uncovered, rest, low
    cdef int need, best_gain, g, v, u, w, d, pivot, pivot_deg, status, i, j, ncand
    cdef int cand[64]
    cdef int gain[64]
    if covered == full:
        found_depth[0] = depth
        return 1
    if depth == k:
        return 0
    nodes[0] += 1
    if nodes[0] > budget:
        return -1
    uncovered = full & ~covered
    need = __builtin_popcountll(uncovered)
    best_gain = 0
    for v in range(n):
        g = __builtin_popcountll(closed[v] & uncovered)
        if g > best_gain:
            best_gain = g
    if depth + (need + best_gain - 1) // best_gain > k:
        return 0
    pivot = -1
    pivot_deg = n + 1
    rest = uncovered
    while rest:
        u = __builtin_ctzll(rest)
        rest &= rest - 1
        d = __builtin_popcountll(closed[u])
        if d < pivot_deg:
            pivot = u
            pivot_deg = d
    ncand = 0
    rest = closed[pivot]
    while rest:
        w = __builtin_ctzll(rest)
        rest &= rest - 1
        g = __builtin_popcountll(closed[w] & uncovered)
        # insertion sort: gain descending, label ascending
        i = ncand
        while i > 0 and gain[i - 1] < g:
            cand[i] = cand[i - 1]
            gain[i] = gain[i - 1]
            i -= 1
        cand[i] = w
        gain[i] = g
        ncand += 1
    for j in range(ncand):
        w = cand[j]
        chosen[depth] = w
        status = _search(closed, n, k, full, covered | closed[w], depth + 1, chosen, nodes, budget, found_depth)
        if status != 0:
            return status
    return 0


def dominating_bnb(closed, int n, int k, long long budget):
    if n > 64:
        raise ValueError("bitmask kernel supports at most 64 vertices")
    cdef uint64_t[::1] masks = np.asarray([int(c) for c in closed], dtype=np.uint64)
    cdef uint64_t full = (<uint64_t>0xFFFFFFFFFFFFFFFF) if n == 64 else ((<uint64_t>1 << n) - 1)
    cdef int chosen[64]
    cdef long long nodes = 0
    cdef int status
    cdef int found_depth = 0
    cdef int kk = min(k, 64)
    if n == 0:
        return 1, [], 0
    status = _search(&masks[0], n, kk, full, 0, 0, chosen, &nodes, budget, &found_depth)
    witness = sorted([chosen[i] for i in range(found_depth)]) if status == 1 else []
    return status, witness, nodes
