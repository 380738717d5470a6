"""Text formats shared by the command line tools.

Edge lists are ``n m`` followed by ``m`` lines ``u v`` (0-indexed).  A
two-round host is a header line ``p <p> p_prime <p'>`` followed by a ``G1``
and a ``G2`` section, each an edge list.  Embeddings are one
``tree_vertex graph_vertex`` line per tree vertex.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Sequence

from .greedy import Embedding
from .rgraph import Graph, TwoRoundGraph
from .treegen import Tree, tree_from_edges

__all__ = [
    "FormatError",
    "dumps_edge_list",
    "dumps_two_round",
    "loads_edge_list",
    "loads_two_round",
    "read_embedding",
    "read_graph",
    "read_tree",
    "read_two_round",
    "write_embedding",
    "write_graph",
    "write_tree",
    "write_two_round",
]


class FormatError(ValueError):
    pass


def dumps_edge_list(n: int, edges: Iterable[Sequence[int]]) -> str:
    rows = [f"{int(u)} {int(v)}" for u, v in edges]
    return "\n".join([f"{n} {len(rows)}", *rows]) + "\n"


def _parse_edges(lines: list[str], where: str) -> tuple[int, list[tuple[int, int]], int]:
    """Parse one edge list from the head of ``lines``; returns (n, edges, lines consumed)."""
    if not lines:
        raise FormatError(f"{where}: missing 'n m' header")
    head = lines[0].split()
    if len(head) != 2:
        raise FormatError(f"{where}: header must be 'n m', got {lines[0]!r}")
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError as exc:
        raise FormatError(f"{where}: header must be two integers") from exc
    if n < 0 or m < 0:
        raise FormatError(f"{where}: negative size in header")
    if len(lines) < m + 1:
        raise FormatError(f"{where}: header promises {m} edges, found {len(lines) - 1}")
    edges = []
    for i, line in enumerate(lines[1 : m + 1], start=2):
        parts = line.split()
        if len(parts) != 2:
            raise FormatError(f"{where}: line {i} is not 'u v'")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise FormatError(f"{where}: line {i} is not two integers") from exc
        if not (0 <= u < n and 0 <= v < n):
            raise FormatError(f"{where}: line {i} has a vertex outside 0..{n - 1}")
        edges.append((u, v))
    return n, edges, m + 1


def _content_lines(text: str) -> list[str]:
    return [ln for ln in (raw.strip() for raw in text.splitlines()) if ln]


def loads_edge_list(text: str) -> tuple[int, list[tuple[int, int]]]:
    lines = _content_lines(text)
    n, edges, used = _parse_edges(lines, "edge list")
    if used != len(lines):
        raise FormatError(f"edge list: {len(lines) - used} trailing lines after the declared edges")
    return n, edges


def write_graph(path: str | Path, g: Graph) -> None:
    Path(path).write_text(dumps_edge_list(g.n, g.edges().tolist()))


def read_graph(path: str | Path, p: float | None = None) -> Graph:
    n, edges = loads_edge_list(Path(path).read_text())
    try:
        return Graph.from_edges(n, edges, p=p)
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from exc


def write_tree(path: str | Path, tree: Tree) -> None:
    Path(path).write_text(dumps_edge_list(tree.n, tree.edges()))


def read_tree(path: str | Path) -> Tree:
    n, edges = loads_edge_list(Path(path).read_text())
    return tree_from_edges(n, edges)


def dumps_two_round(h: TwoRoundGraph) -> str:
    return (
        f"p {h.p!r} p_prime {h.p_prime!r}\n"
        f"G1\n{dumps_edge_list(h.g1.n, h.g1.edges().tolist())}"
        f"G2\n{dumps_edge_list(h.g2.n, h.g2.edges().tolist())}"
    )


def loads_two_round(text: str) -> TwoRoundGraph:
    lines = _content_lines(text)
    if not lines:
        raise FormatError("two-round graph: empty input")
    head = lines[0].split()
    if len(head) != 4 or head[0] != "p" or head[2] != "p_prime":
        raise FormatError("two-round graph: header must be 'p <p> p_prime <p_prime>'")
    try:
        p, p_prime = float(head[1]), float(head[3])
    except ValueError as exc:
        raise FormatError("two-round graph: probabilities must be numbers") from exc
    rest = lines[1:]
    rounds = []
    for tag in ("G1", "G2"):
        if not rest or rest[0] != tag:
            raise FormatError(f"two-round graph: expected section {tag}")
        n, edges, used = _parse_edges(rest[1:], tag)
        rounds.append(Graph.from_edges(n, edges, p=p_prime))
        rest = rest[1 + used :]
    if rest:
        raise FormatError("two-round graph: trailing lines after G2")
    if rounds[0].n != rounds[1].n:
        raise FormatError("two-round graph: G1 and G2 have different vertex counts")
    return TwoRoundGraph(rounds[0], rounds[1], p, p_prime)


def write_two_round(path: str | Path, h: TwoRoundGraph) -> None:
    Path(path).write_text(dumps_two_round(h))


def read_two_round(path: str | Path) -> TwoRoundGraph:
    return loads_two_round(Path(path).read_text())


def write_embedding(path: str | Path, emb: Embedding) -> None:
    Path(path).write_text(emb.dumps())


def read_embedding(path: str | Path) -> Embedding:
    try:
        return Embedding.loads(Path(path).read_text())
    except ValueError as exc:
        raise FormatError(f"{path}: embedding lines must be 'tree_vertex graph_vertex'") from exc
