"""Star completion by b-matching.

Each center ``a_i`` must receive ``d_i`` private leaves from the pool ``B``,
with ``B`` used up exactly.  Center ``a_i`` is cloned ``d_i`` times, every
clone inheriting the full neighbourhood of ``a_i``; a perfect matching of
the cloned graph, projected back onto the centers, is exactly such a star
family.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .rgraph import BipartiteGraph

__all__ = [
    "StarCompletionError",
    "StarInstance",
    "StarSolution",
    "check_star_solution",
    "hall_violator",
    "max_bipartite_matching",
    "star_completion",
]


def _match_positions(h: BipartiteGraph) -> np.ndarray:
    return kernels.hopcroft_karp(h.indptr, h.indices, len(h.left), len(h.right))


def max_bipartite_matching(h: BipartiteGraph) -> dict[int, int]:
    """Maximum-cardinality matching as ``{left label: right label}``."""
    match = _match_positions(h)
    return {h.left[i]: h.right[j] for i, j in enumerate(match.tolist()) if j >= 0}


def hall_violator(h: BipartiteGraph, match: np.ndarray) -> list[int]:
    """Left positions reachable from unmatched left vertices by alternating paths.

    For a maximum matching with an unmatched left vertex this set ``Z``
    satisfies ``|N(Z)| < |Z|``.  Empty when the left side is saturated.
    """
    match_r = np.full(len(h.right), -1, dtype=np.int64)
    for i, j in enumerate(match.tolist()):
        if j >= 0:
            match_r[j] = i
    seen_l = [False] * len(h.left)
    seen_r = [False] * len(h.right)
    queue = deque(i for i, j in enumerate(match.tolist()) if j < 0)
    for i in queue:
        seen_l[i] = True
    while queue:
        i = queue.popleft()
        for j in h.neighbors(i).tolist():
            if seen_r[j]:
                continue
            seen_r[j] = True
            w = int(match_r[j])
            if w >= 0 and not seen_l[w]:
                seen_l[w] = True
                queue.append(w)
    return [i for i, s in enumerate(seen_l) if s]


@dataclass(frozen=True)
class StarInstance:
    centers: tuple[int, ...]
    demands: tuple[int, ...]
    pool: tuple[int, ...]
    max_degree: int | None = None

    def __init__(self, centers: Sequence[int], demands: Sequence[int], pool: Sequence[int], max_degree: int | None = None):
        object.__setattr__(self, "centers", tuple(int(c) for c in centers))
        object.__setattr__(self, "demands", tuple(int(d) for d in demands))
        object.__setattr__(self, "pool", tuple(int(b) for b in pool))
        object.__setattr__(self, "max_degree", max_degree)
        if len(self.centers) != len(self.demands):
            raise ValueError("one demand per center")
        if len(set(self.centers)) != len(self.centers):
            raise ValueError("centers must be distinct")
        if set(self.centers) & set(self.pool):
            raise ValueError("centers and pool overlap")
        if any(d < 1 for d in self.demands):
            raise ValueError("demands must be positive")
        if max_degree is not None and any(d > max_degree for d in self.demands):
            raise ValueError(f"a demand exceeds the declared maximum degree {max_degree}")
        if sum(self.demands) != len(self.pool):
            raise ValueError(f"demands sum to {sum(self.demands)} but the pool has {len(self.pool)} vertices")


@dataclass(frozen=True)
class StarSolution:
    stars: dict[int, tuple[int, ...]]


class StarCompletionError(Exception):
    """No star family exists; ``hall_witness`` lists ``(center, copy)`` clones."""

    def __init__(self, hall_witness: list[tuple[int, int]], neighbourhood: int):
        self.hall_witness = hall_witness
        self.neighbourhood = neighbourhood
        super().__init__(f"{len(hall_witness)} clones see only {neighbourhood} pool vertices")

    @property
    def witness_centers(self) -> set[int]:
        return {c for c, _ in self.hall_witness}


def star_completion(h: BipartiteGraph, inst: StarInstance) -> StarSolution:
    """Find vertex-disjoint stars centred at ``inst.centers`` covering the pool.

    Raises:
        StarCompletionError: the cloned graph has no perfect matching.
    """
    lpos = {v: i for i, v in enumerate(h.left)}
    rpos = {v: i for i, v in enumerate(h.right)}
    missing = [c for c in inst.centers if c not in lpos]
    if missing:
        raise ValueError(f"centers {missing} are not on the left side of the graph")
    pool_pos = np.full(len(h.right), -1, dtype=np.int64)
    for i, b in enumerate(inst.pool):
        if b not in rpos:
            raise ValueError(f"pool vertex {b} is not on the right side of the graph")
        pool_pos[rpos[b]] = i

    # clone i of center c gets a copy of c's pool neighbourhood
    hoods = []
    for c in inst.centers:
        nb = pool_pos[h.neighbors(lpos[c])]
        hoods.append(np.sort(nb[nb >= 0]))
    demands = np.asarray(inst.demands, dtype=np.int64)
    sizes = np.repeat(np.array([len(x) for x in hoods], dtype=np.int64), demands)
    indptr = np.zeros(len(sizes) + 1, dtype=np.int64)
    np.cumsum(sizes, out=indptr[1:])
    parts = [np.tile(x, d) for x, d in zip(hoods, inst.demands)]
    indices = np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)
    owners = [(c, copy) for c, d in zip(inst.centers, inst.demands) for copy in range(d)]
    n_clones, n_pool = len(owners), len(inst.pool)
    cloned = BipartiteGraph(range(n_clones), range(n_clones, n_clones + n_pool), indptr, indices.astype(np.int64))
    match = _match_positions(cloned)
    if (match < 0).any():
        z = hall_violator(cloned, match)
        hood = set(np.concatenate([cloned.neighbors(i) for i in z]).tolist()) if z else set()
        raise StarCompletionError([owners[i] for i in z], len(hood))

    leaves: dict[int, list[int]] = {c: [] for c in inst.centers}
    for (c, _), j in zip(owners, match.tolist()):
        leaves[c].append(inst.pool[j])
    return StarSolution({c: tuple(sorted(v)) for c, v in leaves.items()})


def check_star_solution(h: BipartiteGraph, inst: StarInstance, sol: StarSolution) -> bool:
    """Leaf lists partition the pool, meet the demands, and use only edges of ``h``."""
    edges = set(h.edges())
    if set(sol.stars) != set(inst.centers):
        return False
    used: list[int] = []
    for c, d in zip(inst.centers, inst.demands):
        got = sol.stars[c]
        if len(got) != d or any((c, b) not in edges for b in got):
            return False
        used.extend(got)
    return len(used) == len(set(used)) and set(used) == set(inst.pool)
