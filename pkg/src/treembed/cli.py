"""Command line entry point ``treembed``."""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

from .harness import BracketError, ConfigError, estimate_threshold, read_config, run_experiment, success_rates
from .io import FormatError, loads_edge_list, loads_two_round, write_embedding, write_tree
from .lowerbound import has_dominating_set, tndelta_probability, union_bound_log
from .pipeline import PipelineParams, embed_spanning_tree
from .rgraph import Graph, gnp_two_round, split_two_round
from .rng import derive_seed
from .treegen import (
    TreeError,
    comb_tree,
    path_tree,
    random_bounded_degree_tree,
    random_tree,
    star_tree,
    t_n_delta,
)

EXIT_OK, EXIT_USAGE, EXIT_PHASE = 0, 1, 2
KINDS = ("path", "star", "comb", "random", "bounded", "tndelta")


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class UsageError(Exception):
    pass


def _make_tree(kind: str, n: int | None, delta: int | None, seed: int):
    if n is None:
        raise UsageError(f"tree kind {kind!r} needs --n")
    if kind in ("bounded", "tndelta") and delta is None:
        raise UsageError(f"tree kind {kind!r} needs --delta")
    return {
        "path": lambda: path_tree(n),
        "star": lambda: star_tree(n),
        "comb": lambda: comb_tree(n),
        "random": lambda: random_tree(n, seed),
        "bounded": lambda: random_bounded_degree_tree(n, delta, seed),
        "tndelta": lambda: t_n_delta(n, delta),
    }[kind]()


def _load_tree(spec: str, n: int | None, delta: int | None, seed: int):
    if spec in KINDS:
        return _make_tree(spec, n, delta, derive_seed(seed, "tree"))
    path = Path(spec)
    if not path.is_file():
        raise UsageError(f"--tree must be a file or one of {', '.join(KINDS)}; got {spec!r}")
    from .io import read_tree

    return read_tree(path)


def _load_host(path: str, seed: int, p: float | None):
    text = Path(path).read_text()
    if text.lstrip().startswith("p "):
        return loads_two_round(text)
    n, edges = loads_edge_list(text)
    return split_two_round(Graph.from_edges(n, edges), derive_seed(seed, "split"), p)


def cmd_gen_tree(args) -> int:
    tree = _make_tree(args.kind, args.n, args.delta, args.seed)
    if args.out:
        write_tree(args.out, tree)
    else:
        from .io import dumps_edge_list

        sys.stdout.write(dumps_edge_list(tree.n, tree.edges()))
    return EXIT_OK


def cmd_embed(args) -> int:
    tree = _load_tree(args.tree, args.n, args.delta, args.seed)
    if args.graph:
        host = _load_host(args.graph, args.seed, args.p)
    elif args.p is None:
        raise UsageError("embed needs --p or --graph")
    else:
        host = gnp_two_round(tree.n, args.p, derive_seed(args.seed, "host"))
    if host.n != tree.n:
        raise UsageError(f"tree has {tree.n} vertices but the host has {host.n}")
    report = embed_spanning_tree(tree, host, PipelineParams(args.eps), args.seed)
    doc = {
        "case": report.case_taken,
        "phase_outcomes": report.phase_outcomes,
        "n": tree.n,
        "p": host.p,
        "p_prime": host.p_prime,
        "seed": args.seed,
        "millis": round(report.millis, 3),
        "success": report.success,
    }
    if not report.success:
        doc["failed_phase"] = report.failed_phase
        doc["error"] = str(report.error)
    text = json.dumps(doc, indent=2)
    if args.report:
        Path(args.report).write_text(text + "\n")
    print(text)
    if report.success and args.out:
        write_embedding(args.out, report.embedding)
    return EXIT_OK if report.success else EXIT_PHASE


def cmd_experiment(args) -> int:
    cfg = read_config(args.config)
    if args.output:
        cfg = type(cfg).from_dict({**cfg.to_dict(), "output": args.output})
    records = run_experiment(cfg, threads=args.threads)
    for p, r in sorted(success_rates(records).items()):
        print(f"p={p:.6g} success={r:.3f}")
    return EXIT_OK


def cmd_threshold(args) -> int:
    cfg = read_config(args.config)
    est = estimate_threshold(cfg, target=args.target, rel_width=args.rel_width, threads=args.threads)
    print(json.dumps(est.to_json(), indent=2))
    return EXIT_OK


def cmd_bound(args) -> int:
    k, p = args.k, args.p
    if p is None or k is None:
        if args.delta is None:
            raise UsageError("bound needs --k and --p, or --delta to derive them")
        if k is None:
            k = -(-args.n // (args.delta - 1))
        if p is None:
            const = args.const if args.const is not None else args.eps / 2
            p = tndelta_probability(args.n, args.delta, const)
        print(f"k {k}")
        print(f"p {p:.12g}")
    v = union_bound_log(args.n, k, p)
    print(f"ln {v:.12g}")
    print(f"log10 {v / math.log(10):.12g}")
    return EXIT_OK


def cmd_dominate(args) -> int:
    n, edges = loads_edge_list(Path(args.graph).read_text())
    cert = has_dominating_set(Graph.from_edges(n, edges), args.k)
    print(json.dumps(cert.to_json()))
    return EXIT_OK


def _resolve_seed(flag: int | None) -> int:
    """TREEMBED_SEED, when set, overrides ``--seed``; the default is 0."""
    raw = os.environ.get("TREEMBED_SEED")
    if raw is None:
        return 0 if flag is None else flag
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"TREEMBED_SEED must be an integer, got {raw!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    # SUPPRESS keeps a flag given before the subcommand from being reset after it
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="master seed; TREEMBED_SEED overrides it")
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS, help="worker processes")

    parser = _Parser(prog="treembed", description=__doc__, parents=[common])
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-tree", parents=[common], help="write a tree as an edge list")
    g.add_argument("--kind", choices=KINDS, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--delta", type=int)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen_tree)

    e = sub.add_parser("embed", parents=[common], help="embed a spanning tree into a random graph")
    e.add_argument("--tree", required=True, help="edge-list file or tree kind")
    e.add_argument("--n", type=int)
    e.add_argument("--delta", type=int, help="degree parameter for bounded and tndelta trees")
    e.add_argument("--p", type=float)
    e.add_argument("--eps", type=float, default=0.5)
    e.add_argument("--graph", help="fixed host: edge list or two-round file")
    e.add_argument("--report", help="write the JSON report here")
    e.add_argument("--out", help="write the embedding here on success")
    e.set_defaults(func=cmd_embed)

    x = sub.add_parser("experiment", parents=[common], help="run a Monte Carlo experiment")
    x.add_argument("--config", required=True)
    x.add_argument("--output", help="CSV path, overriding the config")
    x.set_defaults(func=cmd_experiment)

    t = sub.add_parser("threshold", parents=[common], help="bisect for an empirical threshold")
    t.add_argument("--config", required=True)
    t.add_argument("--target", type=float, default=0.5)
    t.add_argument("--rel-width", type=float, default=0.1)
    t.set_defaults(func=cmd_threshold)

    b = sub.add_parser("bound", parents=[common], help="log of the dominating-set union bound")
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--k", type=int, help="default ceil(n/(delta-1))")
    b.add_argument("--p", type=float, help="default const*delta*ln(n)/n")
    b.add_argument("--delta", type=int, help="maximum degree of T(n, delta)")
    b.add_argument("--eps", type=float, default=0.5, help="const defaults to eps/2")
    b.add_argument("--const", type=float)
    b.set_defaults(func=cmd_bound)

    d = sub.add_parser("dominate", parents=[common], help="decide domination by k vertices")
    d.add_argument("--graph", required=True)
    d.add_argument("--k", type=int, required=True)
    d.set_defaults(func=cmd_dominate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.seed = _resolve_seed(getattr(args, "seed", None))
        if not hasattr(args, "threads"):
            args.threads = 1
        if args.seed < 0:
            raise UsageError("--seed must be non-negative")
        return args.func(args)
    except (UsageError, FormatError, ConfigError, TreeError, BracketError, ValueError, OSError) as exc:
        print(f"treembed: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
