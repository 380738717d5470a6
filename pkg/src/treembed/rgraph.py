"""Host graphs and their random generators.

Graphs are stored in CSR form with sorted neighbour lists, which makes both
per-vertex scans and vectorised edge-membership queries cheap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .rng import derive_seed, stream

__all__ = [
    "BipartiteGraph",
    "Graph",
    "TwoRoundGraph",
    "bipartite_gnp",
    "gnp",
    "gnp_two_round",
    "per_round_probability",
    "restrict_bipartite",
    "split_two_round",
]

DENSE_CUTOFF = 0.2
_ROW_BLOCK = 256


def _check_p(p: float) -> None:
    if not 0.0 <= p <= 1.0 or math.isnan(p):
        raise ValueError(f"probability must lie in [0, 1], got {p}")


class Graph:
    """Simple undirected graph on ``0..n-1``."""

    def __init__(self, n: int, indptr: np.ndarray, indices: np.ndarray, p: float | None = None):
        self.n = n
        self.indptr = indptr
        self.indices = indices
        self.p = p

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]] | np.ndarray, p: float | None = None) -> Graph:
        arr = np.asarray(edges if isinstance(edges, np.ndarray) else list(edges), dtype=np.int64).reshape(-1, 2)
        if arr.size and (arr.min() < 0 or arr.max() >= n):
            raise ValueError(f"edge endpoint outside 0..{n - 1}")
        if np.any(arr[:, 0] == arr[:, 1]):
            raise ValueError("self-loops are not allowed")
        lo = np.minimum(arr[:, 0], arr[:, 1])
        hi = np.maximum(arr[:, 0], arr[:, 1])
        keys = np.unique(lo * n + hi)
        return cls._from_upper_keys(n, keys, p)

    @classmethod
    def _from_upper_keys(cls, n: int, keys: np.ndarray, p: float | None) -> Graph:
        keys = np.asarray(keys, dtype=np.int64)
        lo, hi = np.divmod(keys, n) if n else (keys, keys)
        # both orientations as row-major keys; one sort yields CSR order
        both = np.concatenate([keys, hi * n + lo])
        both.sort()
        src, dst = np.divmod(both, n) if n else (both, both)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
        return cls(n, indptr, dst, p)

    @classmethod
    def empty(cls, n: int) -> Graph:
        return cls(n, np.zeros(n + 1, dtype=np.int64), np.zeros(0, dtype=np.int64), 0.0)

    @classmethod
    def complete(cls, n: int) -> Graph:
        i, j = np.triu_indices(n, 1)
        return cls._from_upper_keys(n, i.astype(np.int64) * n + j, 1.0)

    @property
    def m(self) -> int:
        return len(self.indices) // 2

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v] : self.indptr[v + 1]]

    def degree(self, v: int) -> int:
        return int(self.indptr[v + 1] - self.indptr[v])

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    @cached_property
    def _keys(self) -> np.ndarray:
        rows = np.repeat(np.arange(self.n, dtype=np.int64), np.diff(self.indptr))
        return rows * self.n + self.indices

    def has_edges(self, us: np.ndarray, vs: np.ndarray) -> np.ndarray:
        """Vectorised membership test for the pairs ``(us[i], vs[i])``."""
        us = np.asarray(us, dtype=np.int64)
        vs = np.asarray(vs, dtype=np.int64)
        if len(self._keys) == 0:
            return np.zeros(us.shape, dtype=bool)
        q = us * self.n + vs
        pos = np.searchsorted(self._keys, q)
        pos = np.minimum(pos, len(self._keys) - 1)
        return self._keys[pos] == q

    def has_edge(self, u: int, v: int) -> bool:
        nb = self.neighbors(u)
        i = np.searchsorted(nb, v)
        return bool(i < len(nb) and nb[i] == v)

    def edges(self) -> np.ndarray:
        """``(m, 2)`` array of edges with ``u < v``, lexicographically sorted."""
        rows = np.repeat(np.arange(self.n, dtype=np.int64), np.diff(self.indptr))
        mask = rows < self.indices
        return np.stack([rows[mask], self.indices[mask]], axis=1)

    def union(self, other: Graph) -> Graph:
        if other.n != self.n:
            raise ValueError("union of graphs on different vertex counts")
        keys = np.union1d(self._upper_keys(), other._upper_keys())
        return Graph._from_upper_keys(self.n, keys, None)

    def _upper_keys(self) -> np.ndarray:
        e = self.edges()
        return e[:, 0] * self.n + e[:, 1]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.indptr, other.indptr) and np.array_equal(self.indices, other.indices)

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


# --------------------------------------------------------------------------
# G(n, p)


def _sparse_keys(n: int, p: float, rng: np.random.Generator) -> np.ndarray:
    lin = _skip_sample(n * (n - 1) // 2, p, rng)
    # row i owns linear positions [off[i], off[i+1])
    rows = np.arange(n, dtype=np.int64)
    off = rows * (2 * n - rows - 1) // 2
    i = np.searchsorted(off, lin, side="right") - 1
    j = lin - off[i] + i + 1
    return i * n + j


def _dense_keys(n: int, p: float, rng: np.random.Generator) -> np.ndarray:
    parts = []
    cols = np.arange(n, dtype=np.int64)
    for start in range(0, n, _ROW_BLOCK):
        stop = min(start + _ROW_BLOCK, n)
        hit = rng.random((stop - start, n)) < p
        hit &= cols[None, :] > np.arange(start, stop)[:, None]
        r, c = np.nonzero(hit)
        parts.append((r + start).astype(np.int64) * n + c)
    return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)


def gnp(n: int, p: float, seed: int) -> Graph:
    """Binomial random graph; each pair is an edge independently with probability ``p``.

    Uses geometric skipping over the pair sequence for ``p <= 0.2`` and
    blockwise dense sampling above.
    """
    _check_p(p)
    if n < 0:
        raise ValueError("n must be non-negative")
    if n < 2 or p == 0.0:
        g = Graph.empty(n)
        g.p = p
        return g
    if p == 1.0:
        return Graph.complete(n)
    rng = stream(seed, "gnp")
    keys = _sparse_keys(n, p, rng) if p <= DENSE_CUTOFF else _dense_keys(n, p, rng)
    return Graph._from_upper_keys(n, keys, p)


def per_round_probability(p: float) -> float:
    """Symmetric split: ``1 - p = (1 - p')**2``."""
    _check_p(p)
    return -math.expm1(0.5 * math.log1p(-p)) if p < 1.0 else 1.0


@dataclass(frozen=True, eq=False)
class TwoRoundGraph:
    """``G(n, p)`` as the union of two independent ``G(n, p')`` rounds."""

    g1: Graph
    g2: Graph
    p: float
    p_prime: float

    def __post_init__(self) -> None:
        if self.g1.n != self.g2.n:
            raise ValueError("rounds live on different vertex sets")

    @property
    def n(self) -> int:
        return self.g1.n

    @cached_property
    def union(self) -> Graph:
        g = self.g1.union(self.g2)
        g.p = self.p
        return g


def gnp_two_round(n: int, p: float, seed: int) -> TwoRoundGraph:
    pp = per_round_probability(p)
    g1 = gnp(n, pp, derive_seed(seed, "G1"))
    g2 = gnp(n, pp, derive_seed(seed, "G2"))
    return TwoRoundGraph(g1, g2, p, pp)


def split_two_round(g: Graph, seed: int, p: float | None = None) -> TwoRoundGraph:
    """Split a fixed host into two rounds whose union is exactly ``g``.

    Every edge is placed in both rounds, only the first, or only the
    second with the conditional probabilities that ``G(n, p)`` exposed in
    two independent rounds would give it.  ``p`` defaults to the edge
    density of ``g``.
    """
    n = g.n
    if p is None:
        pairs = n * (n - 1) // 2
        p = g.m / pairs if pairs else 0.0
    pp = per_round_probability(p)
    edges = g.edges()
    if p == 0.0 or len(edges) == 0:
        return TwoRoundGraph(Graph.from_edges(n, edges), Graph.from_edges(n, edges), p, pp)
    both = pp * pp / p
    only = (1.0 - both) / 2.0
    u = stream(seed, "split").random(len(edges))
    in1 = u < both + only
    in2 = (u < both) | (u >= both + only)
    return TwoRoundGraph(Graph.from_edges(n, edges[in1], pp), Graph.from_edges(n, edges[in2], pp), p, pp)


# --------------------------------------------------------------------------
# Bipartite graphs


class BipartiteGraph:
    """Bipartite graph between labelled sides; adjacency is kept left to right.

    ``indices`` holds *positions* into ``right``; use :meth:`edges` for
    labels.
    """

    def __init__(self, left: Sequence[int], right: Sequence[int], indptr: np.ndarray, indices: np.ndarray):
        self.left = tuple(int(x) for x in left)
        self.right = tuple(int(x) for x in right)
        if set(self.left) & set(self.right):
            raise ValueError("bipartite sides overlap")
        self.indptr = indptr
        self.indices = indices

    @classmethod
    def from_edges(cls, left: Sequence[int], right: Sequence[int], edges: Iterable[tuple[int, int]]) -> BipartiteGraph:
        lpos = {v: i for i, v in enumerate(left)}
        rpos = {v: i for i, v in enumerate(right)}
        rows: list[set[int]] = [set() for _ in left]
        for a, b in edges:
            if a not in lpos or b not in rpos:
                raise ValueError(f"edge ({a}, {b}) is not between the declared sides")
            rows[lpos[a]].add(rpos[b])
        return cls._from_rows(left, right, [sorted(r) for r in rows])

    @classmethod
    def _from_rows(cls, left, right, rows: list[list[int]]) -> BipartiteGraph:
        indptr = np.zeros(len(rows) + 1, dtype=np.int64)
        np.cumsum([len(r) for r in rows], out=indptr[1:])
        flat = [x for r in rows for x in r]
        return cls(left, right, indptr, np.asarray(flat, dtype=np.int64))

    @property
    def m(self) -> int:
        return len(self.indices)

    def neighbors(self, i: int) -> np.ndarray:
        """Right positions adjacent to the left vertex at position ``i``."""
        return self.indices[self.indptr[i] : self.indptr[i + 1]]

    def edges(self) -> list[tuple[int, int]]:
        return [(self.left[i], self.right[j]) for i in range(len(self.left)) for j in self.neighbors(i).tolist()]

    def __repr__(self) -> str:
        return f"BipartiteGraph({len(self.left)}x{len(self.right)}, m={self.m})"


def _skip_sample(total: int, p: float, rng: np.random.Generator) -> np.ndarray:
    """Sorted positions in ``0..total-1``, each present independently with probability ``p``."""
    if total == 0 or p == 0.0:
        return np.zeros(0, dtype=np.int64)
    mean = total * p
    chunk = int(mean + 10 * math.sqrt(mean) + 64)
    out = []
    pos = -1
    while True:
        # capping a gap at total + 1 changes nothing but keeps the cumsum from overflowing
        gaps = np.minimum(rng.geometric(p, size=chunk), total + 1)
        idx = pos + np.cumsum(gaps)
        if idx[-1] >= total:
            out.append(idx[idx < total])
            break
        out.append(idx)
        pos = int(idx[-1])
    return np.concatenate(out).astype(np.int64)


def bipartite_gnp(a_size: int, b_size: int, p: float, seed: int) -> BipartiteGraph:
    """Random bipartite graph with left ``0..a-1`` and right ``a..a+b-1``."""
    _check_p(p)
    rng = stream(seed, "bipartite")
    if p <= DENSE_CUTOFF:
        r, c = np.divmod(_skip_sample(a_size * b_size, p, rng), b_size) if b_size else (np.zeros(0, np.int64),) * 2
    else:
        r, c = np.nonzero(rng.random((a_size, b_size)) < p)
    indptr = np.zeros(a_size + 1, dtype=np.int64)
    np.cumsum(np.bincount(r, minlength=a_size), out=indptr[1:])
    return BipartiteGraph(range(a_size), range(a_size, a_size + b_size), indptr, c.astype(np.int64))


def restrict_bipartite(g: Graph, left: Sequence[int], right: Sequence[int]) -> BipartiteGraph:
    """Edges of ``g`` with one end in ``left`` and the other in ``right``."""
    left = [int(x) for x in left]
    right = [int(x) for x in right]
    if set(left) & set(right):
        raise ValueError("bipartite sides overlap")
    rpos = np.full(g.n, -1, dtype=np.int64)
    rpos[np.asarray(right, dtype=np.int64)] = np.arange(len(right))
    rows = []
    for a in left:
        pos = rpos[g.neighbors(a)]
        rows.append(np.sort(pos[pos >= 0]).tolist())
    return BipartiteGraph._from_rows(left, right, rows)
