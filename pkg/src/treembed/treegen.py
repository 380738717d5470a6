"""Trees: representation, named families, degree classes, bare paths.

A bare path is a path in a tree whose vertices all have degree exactly
two.  ``bare_path_decomposition`` cuts vertex-disjoint bare paths of a fixed
length out of a tree and returns the forest that remains once their internal
vertices are removed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .rng import stream

__all__ = [
    "BareDecomposition",
    "BarePath",
    "DegreeClasses",
    "Tree",
    "TreeError",
    "bare_path_decomposition",
    "classify_degrees",
    "comb_tree",
    "path_count_bound",
    "path_tree",
    "random_bounded_degree_tree",
    "random_tree",
    "star_tree",
    "t_n_delta",
    "tree_from_edges",
]


class TreeError(ValueError):
    """Raised when an edge list does not describe a tree."""


@dataclass(frozen=True, eq=False)
class Tree:
    """Labelled tree on vertices ``0..n-1``.

    Build through :func:`tree_from_edges` (validating) rather than directly.
    """

    n: int
    adjacency: tuple[tuple[int, ...], ...]

    @cached_property
    def degrees(self) -> tuple[int, ...]:
        return tuple(len(a) for a in self.adjacency)

    @cached_property
    def max_degree(self) -> int:
        return max(self.degrees, default=0)

    def edges(self) -> list[tuple[int, int]]:
        """Edges as ``(u, v)`` with ``u < v``, sorted."""
        return [(u, v) for u in range(self.n) for v in self.adjacency[u] if u < v]

    def leaves(self) -> list[int]:
        return [v for v, d in enumerate(self.degrees) if d == 1]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Tree):
            return NotImplemented
        return self.n == other.n and self.adjacency == other.adjacency

    def __hash__(self) -> int:
        return hash((self.n, self.adjacency))

    def __repr__(self) -> str:
        return f"Tree(n={self.n}, max_degree={self.max_degree})"


def tree_from_edges(n: int, edges: Iterable[Sequence[int]]) -> Tree:
    """Validate an edge list and build a :class:`Tree`.

    Raises:
        TreeError: wrong edge count, out-of-range label, self-loop,
            duplicate edge, cycle, or a disconnected vertex set.
    """
    if n < 1:
        raise TreeError(f"a tree needs at least one vertex, got n={n}")
    pairs = [(int(e[0]), int(e[1])) for e in edges]
    seen: set[tuple[int, int]] = set()
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in pairs:
        if not (0 <= u < n and 0 <= v < n):
            raise TreeError(f"edge ({u}, {v}) has a label outside 0..{n - 1}")
        if u == v:
            raise TreeError(f"self-loop at {u}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise TreeError(f"duplicate edge {key}")
        seen.add(key)
        ru, rv = find(u), find(v)
        if ru == rv:
            raise TreeError(f"edge {key} closes a cycle")
        parent[ru] = rv
        adj[u].append(v)
        adj[v].append(u)
    if len(pairs) != n - 1:
        raise TreeError(f"disconnected: {len(pairs)} edges on {n} vertices, expected {n - 1}")
    return Tree(n, tuple(tuple(sorted(a)) for a in adj))


def _tree_unchecked(n: int, edges: Iterable[Sequence[int]]) -> Tree:
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    return Tree(n, tuple(tuple(sorted(a)) for a in adj))


@dataclass(frozen=True)
class DegreeClasses:
    v1: tuple[int, ...]
    v2: tuple[int, ...]
    v3: tuple[int, ...]

    @property
    def leaf_count(self) -> int:
        return len(self.v1)


def classify_degrees(tree: Tree) -> DegreeClasses:
    """Split vertices into degree 1, degree 2 and degree at least 3."""
    if tree.n < 2:
        raise ValueError("degree classes need n >= 2")
    v1, v2, v3 = [], [], []
    for v, d in enumerate(tree.degrees):
        (v1 if d == 1 else v2 if d == 2 else v3).append(v)
    return DegreeClasses(tuple(v1), tuple(v2), tuple(v3))


# --------------------------------------------------------------------------
# Named families


def path_tree(n: int) -> Tree:
    return _tree_unchecked(n, [(i, i + 1) for i in range(n - 1)])


def star_tree(n: int) -> Tree:
    """``K_{1, n-1}`` centred at vertex 0."""
    return _tree_unchecked(n, [(0, i) for i in range(1, n)])


def comb_tree(n: int) -> Tree:
    """Spine of ``sqrt(n)`` vertices, each carrying a hanging path of ``sqrt(n) - 1`` edges.

    Spine vertices are labelled ``0..s-1``; tooth ``i`` follows as
    ``s + i*(s-1) .. s + (i+1)*(s-1) - 1`` from its spine vertex outwards.
    """
    s = math.isqrt(n)
    if n < 4 or s * s != n:
        raise ValueError(f"comb needs a perfect square n >= 4, got {n}")
    edges = [(i, i + 1) for i in range(s - 1)]
    nxt = s
    for i in range(s):
        prev = i
        for _ in range(s - 1):
            edges.append((prev, nxt))
            prev = nxt
            nxt += 1
    return _tree_unchecked(n, edges)


def t_n_delta(n: int, delta: int) -> Tree:
    """Spine of ``ceil(n/(delta-1))`` vertices, each carrying a star.

    With ``k`` spine vertices and ``r = (delta-1)k - n``, the first ``k-1``
    spine vertices get ``delta-2`` pendant leaves and the last one gets
    ``delta-2-r``.  The spine is labelled first, then leaves in attachment
    order.  A ``delta`` of ``n - 1`` or more gives a star.
    """
    if delta < 3 or n < 2:
        raise ValueError(f"need delta >= 3 and n >= 2, got n={n}, delta={delta}")
    k = -(-n // (delta - 1))
    r = (delta - 1) * k - n
    edges = [(i, i + 1) for i in range(k - 1)]
    nxt = k
    for i in range(k):
        for _ in range(delta - 2 if i < k - 1 else max(delta - 2 - r, 0)):
            edges.append((i, nxt))
            nxt += 1
    assert nxt == n
    return _tree_unchecked(n, edges)


def tndelta_spine(n: int, delta: int) -> int:
    """Number of spine vertices of :func:`t_n_delta`."""
    return -(-n // (delta - 1))


def random_tree(n: int, seed: int) -> Tree:
    """Uniform labelled tree from a random Prüfer sequence."""
    if n < 2:
        raise ValueError("random_tree needs n >= 2")
    code = stream(seed, "prufer").integers(0, n, size=n - 2)
    return _tree_unchecked(n, kernels.prufer_decode(code, n).tolist())


def random_bounded_degree_tree(n: int, delta: int, seed: int) -> Tree:
    """Random attachment tree with maximum degree at most ``delta``.

    Vertex ``i`` joins a uniformly chosen earlier vertex whose degree is
    still below the cap; labels are then shuffled.  With ``delta = 2`` this
    always yields a path.
    """
    if delta < 2:
        raise ValueError("delta must be at least 2")
    if n < 1:
        raise ValueError("n must be positive")
    rng = stream(seed, "bounded-tree")
    degree = [0] * n
    open_ = [0]
    slot = {0: 0}
    edges = []
    picks = rng.random(n)
    for i in range(1, n):
        j = open_[int(picks[i] * len(open_))]
        edges.append((i, j))
        for v in (i, j):
            degree[v] += 1
        open_.append(i)
        slot[i] = len(open_) - 1
        for v in (j, i):
            if degree[v] >= delta and v in slot:
                pos = slot.pop(v)
                last = open_.pop()
                if last != v:
                    open_[pos] = last
                    slot[last] = pos
    perm = rng.permutation(n).tolist()
    return _tree_unchecked(n, [(perm[u], perm[v]) for u, v in edges])


# --------------------------------------------------------------------------
# Bare-path decomposition


@dataclass(frozen=True)
class BarePath:
    """Bare path ``a, internal..., b``; ``b`` and ``a`` stay in the forest."""

    a: int
    b: int
    internal: tuple[int, ...]

    @property
    def vertices(self) -> tuple[int, ...]:
        return (self.a, *self.internal, self.b)


@dataclass(frozen=True)
class BareDecomposition:
    k: int
    paths: tuple[BarePath, ...]
    forest_vertices: frozenset[int]
    removed: frozenset[int] = field(repr=False)

    def forest_edges(self, tree: Tree) -> list[tuple[int, int]]:
        """Tree edges with both ends in the remainder forest."""
        fv = self.forest_vertices
        return [(u, v) for u, v in tree.edges() if u in fv and v in fv]

    def truncated(self, count: int) -> BareDecomposition:
        """Keep only the first ``count`` paths."""
        paths = self.paths[:count]
        removed = frozenset(v for p in paths for v in p.internal)
        n = len(self.forest_vertices) + len(self.removed)
        return BareDecomposition(self.k, paths, frozenset(range(n)) - removed, removed)


def path_count_bound(n: int, leaves: int, k: int) -> float:
    """Guaranteed number of disjoint bare paths of length ``k``."""
    return (n - (2 * leaves - 2) * (k + 1)) / (k + 1)


def _segments(tree: Tree) -> list[list[int]]:
    """Interior vertex runs of the maximal degree-2 paths between terminals.

    Each run is oriented away from its lower-labelled terminal.
    """
    deg = tree.degrees
    adj = tree.adjacency
    runs = []
    for t in range(tree.n):
        if deg[t] == 2:
            continue
        for first in adj[t]:
            run = []
            prev, cur = t, first
            while deg[cur] == 2:
                run.append(cur)
                a, b = adj[cur]
                prev, cur = cur, (b if a == prev else a)
            if run and t < cur:
                runs.append(run)
    return runs


def bare_path_decomposition(tree: Tree, k: int) -> BareDecomposition:
    """Greedily chop every degree-2 run into consecutive blocks of ``k + 1`` vertices.

    Each block is a bare path of ``k`` edges; its ``k - 1`` interior
    vertices are removed, its two ends remain in the forest.  A run of
    ``m`` vertices yields ``m // (k + 1)`` paths, which is optimal for a
    single run.
    """
    if k < 1:
        raise ValueError("path length k must be at least 1")
    if tree.n < 2:
        raise ValueError("decomposition needs n >= 2")
    paths = []
    for run in _segments(tree):
        for start in range(0, len(run) - k, k + 1):
            block = run[start : start + k + 1]
            paths.append(BarePath(block[0], block[-1], tuple(block[1:-1])))
    removed = frozenset(v for p in paths for v in p.internal)
    return BareDecomposition(k, tuple(paths), frozenset(range(tree.n)) - removed, removed)
