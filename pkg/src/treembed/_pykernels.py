"""Pure-Python implementations of the hot kernels.

These mirror ``_kernels.pyx`` function for function and are used whenever
the compiled extension is unavailable (or ``TREEMBED_PURE_PYTHON`` is set).
Inputs are numpy arrays; outputs are numpy arrays or plain Python values.
"""

from __future__ import annotations

from collections import deque

import numpy as np

_INF = 1 << 60


def prufer_decode(code: np.ndarray, n: int) -> np.ndarray:
    """Decode a Prüfer sequence of length ``n - 2`` into an ``(n-1, 2)`` edge array."""
    seq = [int(x) for x in code]
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    ptr = 0
    while degree[ptr] != 1:
        ptr += 1
    leaf = ptr
    edges = []
    for v in seq:
        edges.append((leaf, v))
        degree[v] -= 1
        if degree[v] == 1 and v < ptr:
            leaf = v
        else:
            ptr += 1
            while degree[ptr] != 1:
                ptr += 1
            leaf = ptr
    edges.append((leaf, n - 1))
    return np.asarray(edges, dtype=np.int64).reshape(-1, 2)


def hopcroft_karp(indptr: np.ndarray, indices: np.ndarray, n_left: int, n_right: int) -> np.ndarray:
    """Maximum bipartite matching on a CSR left-to-right adjacency.

    Returns ``match_left`` where ``match_left[u]`` is the matched right
    vertex of ``u`` or ``-1``.
    """
    ptr = indptr.tolist()
    idx = indices.tolist()
    match_l = [-1] * n_left
    match_r = [-1] * n_right
    dist = [0] * n_left

    while True:
        queue = deque()
        for u in range(n_left):
            if match_l[u] < 0:
                dist[u] = 0
                queue.append(u)
            else:
                dist[u] = _INF
        found = False
        while queue:
            u = queue.popleft()
            du = dist[u] + 1
            for e in range(ptr[u], ptr[u + 1]):
                w = match_r[idx[e]]
                if w < 0:
                    found = True
                elif dist[w] == _INF:
                    dist[w] = du
                    queue.append(w)
        if not found:
            break

        it = ptr[:-1]
        for root in range(n_left):
            if match_l[root] >= 0:
                continue
            stack = [root]
            via = []
            while stack:
                u = stack[-1]
                if it[u] == ptr[u + 1]:
                    dist[u] = _INF
                    stack.pop()
                    if via:
                        via.pop()
                    continue
                v = idx[it[u]]
                it[u] += 1
                w = match_r[v]
                if w < 0:
                    via.append(v)
                    for x, y in zip(stack, via):
                        match_l[x] = y
                        match_r[y] = x
                    break
                if dist[w] == dist[u] + 1:
                    via.append(v)
                    stack.append(w)
    return np.asarray(match_l, dtype=np.int64)


def dominating_bnb(closed: list[int], n: int, k: int, budget: int) -> tuple[int, list[int], int]:
    """Exact search for a dominating set of size at most ``k``.

    ``closed[v]`` is the bitmask of the closed neighbourhood of ``v``.
    Returns ``(status, witness, nodes)`` with status 1 (found), 0 (proven
    none) or -1 (node budget exhausted).
    """
    closed = [int(c) for c in closed]
    full = (1 << n) - 1
    chosen: list[int] = []
    nodes = 0

    def search(covered: int, depth: int) -> int:
        nonlocal nodes
        if covered == full:
            return 1
        if depth == k:
            return 0
        nodes += 1
        if nodes > budget:
            return -1
        uncovered = full & ~covered
        need = uncovered.bit_count()
        best_gain = 0
        for v in range(n):
            g = (closed[v] & uncovered).bit_count()
            if g > best_gain:
                best_gain = g
        if depth + -(-need // best_gain) > k:
            return 0
        # Branch on the uncovered vertex with the fewest possible dominators.
        pivot = -1
        pivot_deg = n + 1
        rest = uncovered
        while rest:
            low = rest & -rest
            u = low.bit_length() - 1
            rest ^= low
            d = closed[u].bit_count()
            if d < pivot_deg:
                pivot, pivot_deg = u, d
        cands = []
        rest = closed[pivot]
        while rest:
            low = rest & -rest
            w = low.bit_length() - 1
            rest ^= low
            cands.append(((closed[w] & uncovered).bit_count(), w))
        cands.sort(key=lambda t: (-t[0], t[1]))
        for _, w in cands:
            chosen.append(w)
            status = search(covered | closed[w], depth + 1)
            if status != 0:
                return status
            chosen.pop()
        return 0

    status = search(0, 0)
    return status, (sorted(chosen) if status == 1 else []), nodes
