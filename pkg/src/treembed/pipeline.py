"""Two-round spanning-tree embedding.

With ``delta = eps/10`` and ``k = ceil(2/eps)``:

* **Case 1** (at least ``delta*n`` leaves): remove ``floor(delta*n)``
  leaves, embed the remaining tree greedily into the first round, then
  attach the removed leaves to their fathers' images by star completion
  over first-round-unused vertices, using second-round edges only.
* **Case 2** (fewer leaves): cut ``n0`` bare paths of length ``k`` out of
  the tree, embed the remaining forest greedily into the first round, split
  the unused vertices into ``k-1`` random layers and route the bare paths
  through them with second-round edges.

The result is checked against the union of both rounds before a success is
reported.
"""

from __future__ import annotations

import math
import time
from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Literal

from .greedy import Embedding, GreedyFailure, TieBreak, greedy_embed, verify_embedding
from .paths import PathBudget, PathInsertionError, PathInstance, insert_paths
from .rgraph import TwoRoundGraph, restrict_bipartite
from .rng import derive_seed, stream
from .stars import StarCompletionError, StarInstance, star_completion
from .treegen import Tree, bare_path_decomposition, path_count_bound

__all__ = [
    "DecompositionTooSmall",
    "ForestPhaseFailure",
    "PathPhaseFailure",
    "PipelineFailure",
    "PipelineParams",
    "PipelineReport",
    "StarPhaseFailure",
    "embed_spanning_tree",
    "select_leaves",
    "verify_embedding",
]

LeafSelection = Literal["spread", "lowest"]


class PipelineFailure(Exception):
    phase = "pipeline"


class ForestPhaseFailure(PipelineFailure):
    phase = "forest"


class StarPhaseFailure(PipelineFailure):
    phase = "stars"


class PathPhaseFailure(PipelineFailure):
    phase = "paths"


class DecompositionTooSmall(PipelineFailure):
    phase = "decomposition"


class VerificationFailure(PipelineFailure):
    phase = "verify"


@dataclass(frozen=True)
class PipelineParams:
    """Algorithm constants derived from ``epsilon``.

    ``leaf_selection`` and ``tiebreak`` pick among equally valid arbitrary
    choices: "spread" removes leaves round-robin over their fathers,
    latest fathers in BFS order first, and "lowest" removes the
    lowest-labelled leaves.
    """

    epsilon: float
    leaf_selection: LeafSelection = "spread"
    tiebreak: TieBreak = "lookahead"
    path_budget: PathBudget = field(default_factory=PathBudget)

    def __post_init__(self) -> None:
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")

    @property
    def delta(self) -> float:
        return self.epsilon / 10

    @property
    def k(self) -> int:
        return math.ceil(2 / self.epsilon - 1e-12)


@dataclass
class PipelineReport:
    case_taken: int
    phase_outcomes: dict[str, str]
    embedding: Embedding | None = None
    error: PipelineFailure | None = None
    millis: float = 0.0
    forest_zone: bool = False
    density_zone: bool = False
    details: dict = field(default_factory=dict)

    @property
    def success(self) -> bool:
        return self.embedding is not None

    @property
    def failed_phase(self) -> str:
        return "" if self.error is None else self.error.phase


def _bfs_rank(tree: Tree) -> list[int]:
    root = next((v for v in range(tree.n) if tree.degrees[v] > 1), 0)
    rank = [-1] * tree.n
    rank[root] = 0
    order = deque([root])
    r = 1
    while order:
        v = order.popleft()
        for w in tree.adjacency[v]:
            if rank[w] < 0:
                rank[w] = r
                r += 1
                order.append(w)
    return rank


def select_leaves(tree: Tree, count: int, how: LeafSelection = "spread") -> list[int]:
    """Choose ``count`` leaves to remove before the forest phase."""
    leaves = [v for v in tree.leaves() if tree.n > 2]
    if count > len(leaves):
        raise ValueError(f"asked for {count} leaves, tree has {len(leaves)}")
    if how == "lowest":
        return leaves[:count]
    by_father: dict[int, list[int]] = defaultdict(list)
    for leaf in leaves:
        by_father[tree.adjacency[leaf][0]].append(leaf)
    rank = _bfs_rank(tree)
    fathers = sorted(by_father, key=lambda f: -rank[f])
    queues = [deque(by_father[f]) for f in fathers]
    out: list[int] = []
    while len(out) < count:
        for q in queues:
            if q and len(out) < count:
                out.append(q.popleft())
    return sorted(out)


def _zones(tree: Tree, n: int, p: float, p_prime: float, removed: int, eps: float) -> tuple[bool, bool]:
    ln = math.log(n) if n > 1 else 0.0
    forest = (removed / n) * n * p_prime >= 3 * tree.max_degree + 5 * ln if n else False
    density = n * p >= (40 / eps) * tree.max_degree * ln + n**eps
    return forest, density


def embed_spanning_tree(tree: Tree, host: TwoRoundGraph, params: PipelineParams, seed: int = 0) -> PipelineReport:
    """Run the two-phase embedding of ``tree`` into ``host``; never raises for phase failures."""
    if host.n != tree.n:
        raise ValueError(f"spanning embedding needs a host on {tree.n} vertices, got {host.n}")
    start = time.perf_counter()
    n = tree.n
    leaves = tree.leaves() if n > 1 else []
    case = 1 if len(leaves) >= params.delta * n else 2
    report = PipelineReport(case, {})
    try:
        if case == 1:
            removed, mapping = _case_one(tree, host, params, report)
        else:
            removed, mapping = _case_two(tree, host, params, seed, report)
        emb = Embedding(mapping)
        if not verify_embedding(tree, host.union, emb):
            report.phase_outcomes["verify"] = "failed"
            raise VerificationFailure("assembled map is not an embedding")
        report.phase_outcomes["verify"] = "ok"
        report.embedding = emb
    except PipelineFailure as exc:
        report.error = exc
        removed = report.details.get("removed", 0)
    report.forest_zone, report.density_zone = _zones(tree, n, host.p, host.p_prime, removed, params.epsilon)
    report.millis = (time.perf_counter() - start) * 1000
    return report


def _forest(tree: Tree, host: TwoRoundGraph, vertices, params: PipelineParams, report: PipelineReport) -> dict[int, int]:
    try:
        emb = greedy_embed(tree, host.g1, vertices=vertices, tiebreak=params.tiebreak)
    except GreedyFailure as exc:
        report.phase_outcomes["forest"] = "failed"
        report.details["stuck_at"] = exc.stuck_at
        raise ForestPhaseFailure(str(exc)) from exc
    report.phase_outcomes["forest"] = "ok"
    return dict(emb.mapping)


def _case_one(tree: Tree, host: TwoRoundGraph, params: PipelineParams, report: PipelineReport):
    n = tree.n
    count = math.floor(params.delta * n)
    dropped = select_leaves(tree, count, params.leaf_selection) if count else []
    report.details["removed"] = len(dropped)
    drop = set(dropped)
    mapping = _forest(tree, host, [v for v in range(n) if v not in drop], params, report)
    if not dropped:
        report.phase_outcomes["stars"] = "skipped"
        return 0, mapping

    kids: dict[int, list[int]] = defaultdict(list)
    for leaf in dropped:
        kids[tree.adjacency[leaf][0]].append(leaf)
    fathers = sorted(kids)
    centers = [mapping[f] for f in fathers]
    used = set(mapping.values())
    pool = [v for v in range(n) if v not in used]
    inst = StarInstance(centers, [len(kids[f]) for f in fathers], pool, tree.max_degree)
    h = restrict_bipartite(host.g2, centers, pool)
    try:
        sol = star_completion(h, inst)
    except StarCompletionError as exc:
        report.phase_outcomes["stars"] = "failed"
        raise StarPhaseFailure(str(exc)) from exc
    report.phase_outcomes["stars"] = "ok"
    for f, c in zip(fathers, centers):
        for leaf, image in zip(sorted(kids[f]), sol.stars[c]):
            mapping[leaf] = image
    return len(dropped), mapping


def _case_two(tree: Tree, host: TwoRoundGraph, params: PipelineParams, seed: int, report: PipelineReport):
    n = tree.n
    k = params.k
    dn = math.floor(params.delta * n)
    n0 = math.floor(path_count_bound(n, dn, k))
    if n0 <= 0:
        report.phase_outcomes["decompose"] = "failed"
        raise DecompositionTooSmall(f"path budget n0={n0} for n={n}, k={k}")
    decomp = bare_path_decomposition(tree, k)
    available = len(decomp.paths)
    if available == 0:
        report.phase_outcomes["decompose"] = "failed"
        raise DecompositionTooSmall(f"no bare paths of length {k}")
    decomp = decomp.truncated(min(n0, available))
    report.phase_outcomes["decompose"] = "ok"
    report.details.update(n0=len(decomp.paths), removed=len(decomp.removed))

    mapping = _forest(tree, host, sorted(decomp.forest_vertices), params, report)
    used = set(mapping.values())
    free = [v for v in range(n) if v not in used]
    m = len(decomp.paths)
    order = stream(seed, "layers").permutation(len(free)).tolist()
    shuffled = [free[i] for i in order]
    layers = [shuffled[j * m : (j + 1) * m] for j in range(k - 1)]
    pairs = [(mapping[path.a], mapping[path.b]) for path in decomp.paths]
    inst = PathInstance(pairs, layers, host.g2)
    try:
        sol = insert_paths(inst, params.path_budget, seed=derive_seed(seed, "paths"))
    except PathInsertionError as exc:
        report.phase_outcomes["paths"] = "failed"
        report.details["path_phase"] = exc.phase
        raise PathPhaseFailure(str(exc)) from exc
    report.phase_outcomes["paths"] = "ok"
    for path, route in zip(decomp.paths, sol.paths):
        for t, g in zip(path.internal, route[1:-1]):
            mapping[t] = g
    return len(decomp.removed), mapping
