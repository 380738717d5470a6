"""Refuting embeddings of the spine-dominated tree ``T(n, Delta)``.

The ``ceil(n/(Delta-1))`` spine vertices of ``T(n, Delta)`` dominate the
whole tree, so a host without a dominating set of that size cannot contain
it.  This module decides domination exactly on small hosts and evaluates
the first-moment bound ``C(n,k) (1-(1-p)^k)^(n-k)`` on the probability that
a random host has a ``k``-vertex dominating set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

from . import kernels
from .rgraph import Graph

__all__ = [
    "DominationCertificate",
    "EXACT_LIMIT",
    "NODE_BUDGET",
    "dominates",
    "greedy_dominating_set",
    "has_dominating_set",
    "log_binomial",
    "refute_tndelta",
    "tndelta_probability",
    "union_bound_log",
]

EXACT_LIMIT = 64
NODE_BUDGET = 10**7
_EXACT_COMB_LIMIT = 20_000


def log_binomial(n: int, k: int) -> float:
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got n={n}, k={k}")
    if n <= _EXACT_COMB_LIMIT:
        return math.log(math.comb(n, k))
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def union_bound_log(n: int, k: int, p: float) -> float:
    """Natural log of ``C(n, k) * (1 - (1 - p)**k) ** (n - k)``."""
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got n={n}, k={k}")
    if not 0.0 < p <= 1.0:
        raise ValueError(f"need 0 < p <= 1, got {p}")
    lc = log_binomial(n, k)
    if k == n or p == 1.0:
        return lc
    # 1 - (1-p)^k = -expm1(k * log1p(-p))
    inner = math.log(-math.expm1(k * math.log1p(-p)))
    return lc + (n - k) * inner


def tndelta_probability(n: int, delta: int, constant: float) -> float:
    """Edge probability ``constant * Delta * ln(n) / n``."""
    return constant * delta * math.log(n) / n


@dataclass(frozen=True)
class DominationCertificate:
    """``answer`` is True/False, or None when the search could not decide."""

    answer: bool | None
    witness: tuple[int, ...] | None
    method: Literal["exact", "greedy-upper-bound-only"]
    k: int
    nodes: int = 0

    def to_json(self) -> dict:
        return {
            "answer": {True: "yes", False: "no", None: "unknown"}[self.answer],
            "witness": list(self.witness) if self.witness is not None else None,
            "method": self.method,
            "k": self.k,
            "nodes": self.nodes,
        }


def dominates(g: Graph, subset) -> bool:
    covered = set(int(v) for v in subset)
    for v in list(covered):
        covered.update(g.neighbors(v).tolist())
    return len(covered) == g.n


def greedy_dominating_set(g: Graph) -> list[int]:
    """Repeatedly take the vertex covering the most undominated vertices."""
    covered = [False] * g.n
    gain = [g.degree(v) + 1 for v in range(g.n)]
    remaining = g.n
    chosen = []
    while remaining:
        v = max(range(g.n), key=lambda u: (gain[u], -u))
        chosen.append(v)
        for w in [v, *g.neighbors(v).tolist()]:
            if not covered[w]:
                covered[w] = True
                remaining -= 1
                for x in [w, *g.neighbors(w).tolist()]:
                    gain[x] -= 1
    return sorted(chosen)


def has_dominating_set(g: Graph, k: int, exact_limit: int = EXACT_LIMIT, node_budget: int = NODE_BUDGET) -> DominationCertificate:
    """Decide whether ``g`` has a dominating set of at most ``k`` vertices.

    Exact branch and bound for ``n <= exact_limit``; above that only a
    greedy upper bound is available and "no" is never claimed.  Exhausting
    the node budget also yields an undecided answer.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    greedy = greedy_dominating_set(g)
    if len(greedy) <= k:
        method = "exact" if g.n <= exact_limit else "greedy-upper-bound-only"
        return DominationCertificate(True, tuple(greedy), method, k)
    max_cover = int(g.degrees().max(initial=0)) + 1
    if -(-g.n // max_cover) > k:
        # no k vertices can cover n when each covers at most max_cover
        return DominationCertificate(False, None, "exact", k)
    if g.n > min(exact_limit, EXACT_LIMIT):
        return DominationCertificate(None, None, "greedy-upper-bound-only", k)
    closed = [(1 << v) | sum(1 << w for w in g.neighbors(v).tolist()) for v in range(g.n)]
    status, witness, nodes = kernels.dominating_bnb(closed, g.n, min(k, g.n), node_budget)
    if status == 1:
        return DominationCertificate(True, tuple(witness), "exact", k, nodes)
    if status == 0:
        return DominationCertificate(False, None, "exact", k, nodes)
    return DominationCertificate(None, None, "exact", k, nodes)


def refute_tndelta(g: Graph, n: int, delta: int, **kwargs) -> bool:
    """True only if ``g`` provably cannot contain ``T(n, delta)``."""
    if g.n != n:
        raise ValueError(f"host has {g.n} vertices, expected {n}")
    k = -(-n // (delta - 1))
    return has_dominating_set(g, k, **kwargs).answer is False
