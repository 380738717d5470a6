"""Greedy breadth-first embedding of a forest into a host graph.

Each component is rooted at its lowest label (or at its preplaced
vertices) and processed in BFS order; all not-yet-placed children of a
vertex are placed in one batch on the lowest-indexed free neighbours of its
image.  There is no backtracking: if the image has too few free neighbours
the embedding fails at that vertex.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Literal, Mapping

import numpy as np

from .rgraph import Graph
from .treegen import Tree

__all__ = ["Embedding", "GreedyFailure", "greedy_embed", "is_partial_embedding", "verify_embedding"]

TieBreak = Literal["lowest", "lookahead"]


@dataclass(frozen=True)
class Embedding:
    """Injective map from tree vertices to host vertices."""

    mapping: dict[int, int] = field(default_factory=dict)

    @property
    def used(self) -> set[int]:
        return set(self.mapping.values())

    def __len__(self) -> int:
        return len(self.mapping)

    def dumps(self) -> str:
        return "".join(f"{t} {g}\n" for t, g in sorted(self.mapping.items()))

    @classmethod
    def loads(cls, text: str) -> Embedding:
        mapping = {}
        for line in text.splitlines():
            if line.strip():
                t, g = line.split()
                mapping[int(t)] = int(g)
        return cls(mapping)


class GreedyFailure(Exception):
    """The image of ``stuck_at`` had fewer free neighbours than children to place."""

    def __init__(self, stuck_at: int, needed: int, available: int):
        self.stuck_at = stuck_at
        self.needed = needed
        self.available = available
        super().__init__(f"tree vertex {stuck_at}: {needed} children, {available} free neighbours")


def greedy_embed(
    tree: Tree,
    host: Graph,
    vertices: Iterable[int] | None = None,
    preplaced: Mapping[int, int] | None = None,
    tiebreak: TieBreak = "lowest",
) -> Embedding:
    """Embed the subforest of ``tree`` induced by ``vertices`` into ``host``.

    Args:
        tree: the source tree.
        host: host graph.
        vertices: forest vertex set; defaults to the whole tree.
        preplaced: tree vertices whose images are fixed in advance.  They
            act as BFS sources of their components.
        tiebreak: ``"lowest"`` gives the children, in label order, the
            chosen images in index order.  ``"lookahead"`` hands the images
            with the most free neighbours to the children with the most
            children of their own.  Both choose the same image set.

    Raises:
        GreedyFailure: some vertex could not place its children.
    """
    n = tree.n
    in_forest = np.zeros(n, dtype=bool)
    if vertices is None:
        in_forest[:] = True
    else:
        in_forest[list(vertices)] = True
    preplaced = dict(preplaced or {})
    phi = [-1] * n
    free = np.ones(host.n, dtype=bool)
    for t, g in preplaced.items():
        if not in_forest[t]:
            raise ValueError(f"preplaced vertex {t} is not in the forest")
        if not free[g]:
            raise ValueError(f"host vertex {g} preplaced twice")
        phi[t] = g
        free[g] = False
    if in_forest.sum() > host.n:
        raise ValueError("forest has more vertices than the host")

    adj = tree.adjacency
    fdeg = [sum(1 for w in adj[v] if in_forest[w]) if in_forest[v] else 0 for v in range(n)]
    visited = [False] * n
    indptr, indices = host.indptr, host.indices
    cursor = 0  # lowest possibly-free host vertex, for roots

    by_component: dict[int, list[int]] = {}
    comp = [-1] * n
    for s in range(n):
        if not in_forest[s] or comp[s] >= 0:
            continue
        comp[s] = s
        stack = [s]
        members = [s]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if in_forest[w] and comp[w] < 0:
                    comp[w] = s
                    stack.append(w)
                    members.append(w)
        by_component[s] = members

    for root, members in by_component.items():
        sources = sorted(v for v in members if phi[v] >= 0)
        if not sources:
            while not free[cursor]:
                cursor += 1
            phi[root] = cursor
            free[cursor] = False
            sources = [root]
        queue = deque(sources)
        for s in sources:
            visited[s] = True
        parent = {s: -1 for s in sources}
        while queue:
            v = queue.popleft()
            gv = phi[v]
            children = []
            for w in adj[v]:
                if not in_forest[w] or w == parent[v]:
                    continue
                if phi[w] >= 0:
                    # preplaced vertex reached along a second route
                    if not visited[w]:
                        visited[w] = True
                        parent[w] = v
                        queue.append(w)
                    if not host.has_edge(gv, phi[w]):
                        raise GreedyFailure(v, 1, 0)
                    continue
                children.append(w)
            if not children:
                continue
            nb = indices[indptr[gv] : indptr[gv + 1]]
            avail = nb[free[nb]]
            if len(avail) < len(children):
                raise GreedyFailure(v, len(children), len(avail))
            chosen = avail[: len(children)]
            free[chosen] = False
            if tiebreak == "lookahead" and any(fdeg[c] > 1 for c in children):
                room = [int(np.count_nonzero(free[indices[indptr[g] : indptr[g + 1]]])) for g in chosen.tolist()]
                images = [g for _, g in sorted(zip(room, chosen.tolist()), key=lambda t: (-t[0], t[1]))]
                children.sort(key=lambda c: (-fdeg[c], c))
            else:
                images = chosen.tolist()
            for c, g in zip(children, images):
                phi[c] = g
                visited[c] = True
                parent[c] = v
                queue.append(c)

    return Embedding({v: phi[v] for v in range(n) if in_forest[v]})


def is_partial_embedding(edges: Iterable[tuple[int, int]], host: Graph, mapping: Mapping[int, int]) -> bool:
    """Injective, and every edge with both ends mapped lands on a host edge."""
    images = list(mapping.values())
    if len(set(images)) != len(images):
        return False
    if any(not 0 <= g < host.n for g in images):
        return False
    pairs = [(mapping[u], mapping[v]) for u, v in edges if u in mapping and v in mapping]
    if not pairs:
        return True
    arr = np.asarray(pairs, dtype=np.int64)
    return bool(host.has_edges(arr[:, 0], arr[:, 1]).all())


def verify_embedding(tree: Tree, host: Graph, phi: Embedding | Mapping[int, int]) -> bool:
    """True iff ``phi`` is total on ``tree``, injective, and edge preserving."""
    mapping = phi.mapping if isinstance(phi, Embedding) else dict(phi)
    if set(mapping) != set(range(tree.n)):
        return False
    return is_partial_embedding(tree.edges(), host, mapping)
