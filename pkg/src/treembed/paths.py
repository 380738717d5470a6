"""Routing prescribed pairs through layers by vertex-disjoint paths.

Pair ``(s_i, t_i)`` must be joined by a path ``s_i, u_1, ..., u_{k-1}, t_i``
with ``u_j`` taken from layer ``V_j``; paths are vertex disjoint and every
layer is used up exactly.  Contracting each pair into one vertex ``x_i``,
this is a factor of ``k``-cycles that cross the parts ``X, V_1, ...,
V_{k-1}`` in order.

``insert_paths`` searches for such a factor:

1. perfect matchings between consecutive layers; the middle ones chain the
   layer vertices into ``n0`` candidate routes ``u_1 .. u_{k-1}``;
2. routes are assigned to pairs by a maximum matching (pair ``i`` accepts
   a route whose head sees ``s_i`` and whose tail sees ``t_i``).  Pairs
   left without a route are the non-fixed points of the permutation of
   ``X`` induced by the closing matchings;
3. repair swaps two edges inside one middle matching, which exchanges
   route tails, and keeps the swap only when the assignment grows;
4. fresh random matchings on stall; small instances fall back to
   :func:`exact_disjoint_paths`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .rgraph import BipartiteGraph, Graph
from .rng import stream

__all__ = [
    "InstanceTooLarge",
    "PathBudget",
    "PathInsertionError",
    "PathInstance",
    "PathSolution",
    "check_path_solution",
    "exact_disjoint_paths",
    "insert_paths",
]


@dataclass(frozen=True, eq=False)
class PathInstance:
    pairs: tuple[tuple[int, int], ...]
    layers: tuple[tuple[int, ...], ...]
    host: Graph

    def __init__(self, pairs: Sequence[tuple[int, int]], layers: Sequence[Sequence[int]], host: Graph):
        object.__setattr__(self, "pairs", tuple((int(s), int(t)) for s, t in pairs))
        object.__setattr__(self, "layers", tuple(tuple(int(v) for v in layer) for layer in layers))
        object.__setattr__(self, "host", host)
        n0 = len(self.pairs)
        if self.k < 3:
            raise ValueError(f"path length must be at least 3, got {self.k}")
        if any(len(layer) != n0 for layer in self.layers):
            raise ValueError(f"every layer must have exactly {n0} vertices")
        everything = [v for p in self.pairs for v in p] + [v for layer in self.layers for v in layer]
        if len(set(everything)) != len(everything):
            raise ValueError("endpoints and layers must be pairwise disjoint")
        if any(not 0 <= v < host.n for v in everything):
            raise ValueError("instance vertex outside the host")

    @property
    def k(self) -> int:
        return len(self.layers) + 1

    @property
    def n0(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True)
class PathSolution:
    """One vertex sequence ``s_i, u_1, ..., u_{k-1}, t_i`` per pair, in pair order."""

    paths: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class PathBudget:
    restarts: int = 5
    stall_limit: int = 50
    exact_threshold: int = 8


class PathInsertionError(Exception):
    """``phase`` is ``"matching"``, ``"repair"``, ``"budget"`` or ``"exact"``.

    Only ``"matching"`` and ``"exact"`` certify that no solution exists.
    """

    def __init__(self, phase: str, detail: str = ""):
        self.phase = phase
        super().__init__(f"{phase}: {detail}" if detail else phase)


class InstanceTooLarge(ValueError):
    pass


def check_path_solution(inst: PathInstance, sol: PathSolution) -> bool:
    """Layer order, endpoints, disjointness and host edges."""
    if len(sol.paths) != inst.n0:
        return False
    seen: set[int] = set()
    for (s, t), path in zip(inst.pairs, sol.paths):
        if len(path) != inst.k + 1 or path[0] != s or path[-1] != t:
            return False
        for j, u in enumerate(path[1:-1]):
            if u not in inst.layers[j] or u in seen:
                return False
            seen.add(u)
        arr = np.asarray(path, dtype=np.int64)
        if not inst.host.has_edges(arr[:-1], arr[1:]).all():
            return False
    return len(seen) == inst.n0 * (inst.k - 1)


def _neighbour_sets(inst: PathInstance) -> dict[int, set[int]]:
    members = [v for p in inst.pairs for v in p] + [v for layer in inst.layers for v in layer]
    return {v: set(inst.host.neighbors(v).tolist()) for v in members}


def _perfect_matching(rows: list[list[int]], n_right: int) -> np.ndarray | None:
    h = BipartiteGraph._from_rows(range(len(rows)), range(len(rows), len(rows) + n_right), rows)
    match = kernels.hopcroft_karp(h.indptr, h.indices, len(rows), n_right)
    return None if (match < 0).any() else match


def _layer_rows(nbr: dict[int, set[int]], src: Sequence[int], dst: Sequence[int]) -> list[list[int]]:
    pos = {v: i for i, v in enumerate(dst)}
    return [sorted(pos[w] for w in nbr[u] if w in pos) for u in src]


class _Router:
    """Mutable state of one restart: routes and their assignment to pairs."""

    def __init__(self, inst: PathInstance, nbr: dict[int, set[int]], routes: list[list[int]]):
        self.inst = inst
        self.nbr = nbr
        self.routes = routes
        n0 = inst.n0
        head_of = {r[0]: c for c, r in enumerate(routes)}
        # routes are anchored at their layer-1 vertex, so heads never move
        self.head_routes = [sorted(head_of[u] for u in nbr[s] if u in head_of) for s, _ in inst.pairs]
        self.pairs_of = [[] for _ in range(n0)]
        for j, cs in enumerate(self.head_routes):
            for c in cs:
                self.pairs_of[c].append(j)
        self.t_nbr = [nbr[t] for _, t in inst.pairs]
        # comp[j]: routes whose head sees s_j and whose tail sees t_j
        self.comp = [{c for c in self.head_routes[j] if routes[c][-1] in self.t_nbr[j]} for j in range(n0)]
        self.match_x = [-1] * n0
        self.match_r = [-1] * n0
        self.matched = 0

    def _refresh(self, c: int) -> None:
        tail = self.routes[c][-1]
        for j in self.pairs_of[c]:
            if tail in self.t_nbr[j]:
                self.comp[j].add(c)
            else:
                self.comp[j].discard(c)

    def augment(self, j: int) -> bool:
        """Kuhn augmenting path from pair ``j``."""
        comp, match_r, match_x = self.comp, self.match_r, self.match_x
        seen = set()
        stack = [(j, iter(comp[j]))]
        trail: list[int] = []
        while stack:
            x, it = stack[-1]
            advanced = False
            for c in it:
                if c in seen:
                    continue
                seen.add(c)
                owner = match_r[c]
                trail.append(c)
                if owner < 0:
                    for (xx, _), cc in zip(stack, trail):
                        match_x[xx] = cc
                        match_r[cc] = xx
                    self.matched += 1
                    return True
                stack.append((owner, iter(comp[owner])))
                advanced = True
                break
            if not advanced:
                stack.pop()
                if trail:
                    trail.pop()
        return False

    def size(self) -> int:
        return self.matched

    def fill(self) -> int:
        for j in range(self.inst.n0):
            if self.match_x[j] < 0:
                self.augment(j)
        return self.matched

    def _release(self, c: int) -> int:
        x = self.match_r[c]
        if x >= 0:
            self.match_x[x] = -1
            self.match_r[c] = -1
            self.matched -= 1
        return x

    def _set_routes(self, c: int, rc: list[int], d: int, rd: list[int]) -> None:
        self.routes[c], self.routes[d] = rc, rd
        self._refresh(c)
        self._refresh(d)

    def try_swap(self, c: int, d: int, i: int, j: int) -> bool:
        """Exchange the tails of routes ``c`` and ``d`` after position ``i``.

        Kept only if the assignment grows; pair ``j`` is the one the move
        targets.
        """
        before = self.matched
        rc, rd = self.routes[c], self.routes[d]
        saved_x, saved_r = self.match_x[:], self.match_r[:]
        self._set_routes(c, rc[: i + 1] + rd[i + 1 :], d, rd[: i + 1] + rc[i + 1 :])
        freed = [self._release(c), self._release(d)]
        for x in [j, *freed]:
            if x >= 0 and self.match_x[x] < 0:
                self.augment(x)
        if self.matched > before:
            return True
        self._set_routes(c, rc, d, rd)
        self.match_x, self.match_r = saved_x, saved_r
        self.matched = before
        return False

    def solution(self) -> PathSolution:
        out = []
        for j, (s, t) in enumerate(self.inst.pairs):
            out.append((s, *self.routes[self.match_x[j]], t))
        return PathSolution(tuple(out))


def _random_routes(inst: PathInstance, nbr, rng: np.random.Generator, middle_rows) -> list[list[int]] | None:
    layers = inst.layers
    n0 = inst.n0
    routes = [[u] for u in layers[0]]
    for j in range(len(layers) - 1):
        rows = middle_rows[j]
        perm_l = rng.permutation(n0)
        perm_r = rng.permutation(n0)
        inv_r = np.argsort(perm_r)
        shuffled = [sorted(int(inv_r[w]) for w in rows[u]) for u in perm_l.tolist()]
        # neighbour order is randomised through the relabelled right side
        match = _perfect_matching(shuffled, n0)
        if match is None:
            return None
        nxt = {}
        for a, b in enumerate(match.tolist()):
            nxt[int(perm_l[a])] = layers[j + 1][int(perm_r[b])]
        pos = {v: i for i, v in enumerate(layers[j])}
        for r in routes:
            r.append(nxt[pos[r[-1]]])
    return routes


def insert_paths(inst: PathInstance, budget: PathBudget | None = None, seed: int = 0) -> PathSolution:
    """Search for disjoint layered paths joining every pair.

    Raises:
        PathInsertionError: ``"matching"`` when some consecutive-layer
            bipartite graph has no perfect matching (then no solution
            exists); ``"exact"`` when the small-instance fallback proves
            infeasibility; ``"budget"`` otherwise.
    """
    budget = budget or PathBudget()
    nbr = _neighbour_sets(inst)
    n0 = inst.n0
    layers = inst.layers
    if n0 == 0:
        return PathSolution(())

    starts = [s for s, _ in inst.pairs]
    ends = [t for _, t in inst.pairs]
    if _perfect_matching(_layer_rows(nbr, starts, layers[0]), n0) is None:
        raise PathInsertionError("matching", "start pairs to layer 1")
    if _perfect_matching(_layer_rows(nbr, layers[-1], ends), n0) is None:
        raise PathInsertionError("matching", f"layer {len(layers)} to end pairs")
    middle_rows = [_layer_rows(nbr, layers[j], layers[j + 1]) for j in range(len(layers) - 1)]
    for j, rows in enumerate(middle_rows):
        if _perfect_matching(rows, n0) is None:
            raise PathInsertionError("matching", f"layer {j + 1} to layer {j + 2}")

    rng = stream(seed, "insert-paths")
    tail_layer = set(layers[-1])
    for _ in range(budget.restarts):
        routes = _random_routes(inst, nbr, rng, middle_rows)
        router = _Router(inst, nbr, routes)
        if router.fill() == n0:
            return router.solution()
        # sweeps are exhaustive, so one sweep without progress is a stall
        for _ in range(budget.stall_limit):
            if not _sweep(router, inst, nbr, rng, tail_layer):
                break
            if router.fill() == n0:
                return router.solution()

    if n0 <= budget.exact_threshold and inst.k <= 5:
        sol = exact_disjoint_paths(inst)
        if sol is None:
            raise PathInsertionError("exact", "no disjoint routing exists")
        return sol
    raise PathInsertionError("budget", f"{budget.restarts} restarts exhausted")


def _sweep(router: _Router, inst: PathInstance, nbr, rng, tail_layer) -> bool:
    """Try every feasible tail swap for each unassigned pair; True if the assignment grew."""
    routes = router.routes
    improved = False
    unassigned = [j for j in range(inst.n0) if router.match_x[j] < 0]
    rng.shuffle(unassigned)
    depth = inst.k - 2
    for j in unassigned:
        if router.match_x[j] >= 0:
            continue
        tail_owner = {r[-1]: c for c, r in enumerate(routes)}
        tails = [tail_owner[w] for w in router.t_nbr[j] if w in tail_layer]
        feasible = []
        for c in router.head_routes[j]:
            rc = routes[c]
            for d in tails:
                if c == d:
                    continue
                rd = routes[d]
                for i in range(depth):
                    # swap edges (rc[i], rc[i+1]) and (rd[i], rd[i+1]) of one middle matching
                    if rd[i + 1] in nbr[rc[i]] and rc[i + 1] in nbr[rd[i]]:
                        feasible.append((c, d, i))
        rng.shuffle(feasible)
        for c, d, i in feasible:
            if router.try_swap(c, d, i, j):
                improved = True
                break
    return improved


def exact_disjoint_paths(inst: PathInstance, max_n0: int = 8, max_k: int = 5) -> PathSolution | None:
    """Exhaustive search; ``None`` means no disjoint routing exists.

    Raises:
        InstanceTooLarge: ``n0 > max_n0`` or ``k > max_k``.
    """
    n0, k = inst.n0, inst.k
    if n0 > max_n0 or k > max_k:
        raise InstanceTooLarge(f"exact search limited to n0 <= {max_n0}, k <= {max_k}; got n0={n0}, k={k}")
    nbr = _neighbour_sets(inst)
    layers = inst.layers
    # adjacency as bitmasks over layer positions
    pos = [{v: i for i, v in enumerate(layer)} for layer in layers]
    start_mask = [sum(1 << pos[0][w] for w in nbr[s] if w in pos[0]) for s, _ in inst.pairs]
    end_ok = [{pos[-1][w] for w in nbr[t] if w in pos[-1]} for _, t in inst.pairs]
    step_mask = [
        [sum(1 << pos[j + 1][w] for w in nbr[u] if w in pos[j + 1]) for u in layers[j]] for j in range(len(layers) - 1)
    ]
    failed: set[tuple[int, tuple[int, ...]]] = set()
    chosen: list[list[int]] = []

    def routes_for(i: int, used: tuple[int, ...]):
        def walk(j: int, u: int, acc: list[int]):
            if j == len(layers) - 1:
                if u in end_ok[i]:
                    yield acc
                return
            options = step_mask[j][u] & ~used[j + 1]
            while options:
                low = options & -options
                w = low.bit_length() - 1
                options ^= low
                yield from walk(j + 1, w, acc + [w])

        options = start_mask[i] & ~used[0]
        while options:
            low = options & -options
            u = low.bit_length() - 1
            options ^= low
            yield from walk(0, u, [u])

    def search(i: int, used: tuple[int, ...]) -> bool:
        if i == n0:
            return True
        key = (i, used)
        if key in failed:
            return False
        for route in routes_for(i, used):
            chosen.append(route)
            if search(i + 1, tuple(m | (1 << r) for m, r in zip(used, route))):
                return True
            chosen.pop()
        failed.add(key)
        return False

    if not search(0, tuple(0 for _ in layers)):
        return None
    out = []
    for (s, t), route in zip(inst.pairs, chosen):
        out.append((s, *(layers[j][r] for j, r in enumerate(route)), t))
    return PathSolution(tuple(out))
