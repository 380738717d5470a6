"""Monte Carlo experiments over edge probabilities.

A config names a problem (the full pipeline, or one of its two completion
subproblems in isolation), a list of ``p`` values and a trial count.  Trial
``t`` at point ``i`` runs with seed ``derive_seed(master_seed, i, t)``, so
every record can be reproduced on its own.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Sequence

from .paths import PathBudget, PathInsertionError, PathInstance, check_path_solution, insert_paths
from .pipeline import PipelineParams, embed_spanning_tree
from .rgraph import bipartite_gnp, gnp, gnp_two_round
from .rng import derive_seed
from .stars import StarCompletionError, StarInstance, check_star_solution, star_completion
from .treegen import Tree, comb_tree, path_tree, random_bounded_degree_tree, random_tree, star_tree, t_n_delta

__all__ = [
    "BracketError",
    "CSV_FIELDS",
    "ConfigError",
    "ExperimentConfig",
    "ThresholdEstimate",
    "TrialRecord",
    "build_tree",
    "estimate_threshold",
    "read_config",
    "read_csv",
    "run_experiment",
    "run_trial",
    "success_rates",
    "write_config",
    "write_csv",
]

CSV_FIELDS = ("n", "delta", "p", "p_prime", "seed", "case", "success", "failed_phase", "millis")
TREE_KINDS = ("path", "star", "comb", "random", "bounded", "tndelta", "file")
PROBLEMS = ("embed", "stars", "paths")
_TOP_KEYS = {"problem", "tree", "n", "epsilon", "p", "trials", "master_seed", "output", "params", "timing"}
_TREE_KEYS = {"kind", "delta", "path"}
_SWEEP_KEYS = {"low", "high", "points"}
_PARAM_KEYS = {
    "embed": {"leaf_selection", "tiebreak", "restarts", "stall_limit"},
    "stars": {"delta"},
    "paths": {"k", "restarts", "stall_limit"},
}


class ConfigError(ValueError):
    pass


class BracketError(RuntimeError):
    """The success rate does not cross the target between the bracket ends."""


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment.

    ``n`` is the tree size for ``"embed"``, the pool size ``l`` for
    ``"stars"`` and the pair count ``n0`` for ``"paths"``.  ``p`` is either a
    list or a geometric sweep ``{"low", "high", "points"}``; ``p_values``
    expands it.  ``timing`` off records zero milliseconds so that output is
    a pure function of the config.
    """

    n: int
    p: tuple[float, ...] | dict
    trials: int = 1
    master_seed: int = 0
    problem: str = "embed"
    tree: dict = field(default_factory=lambda: {"kind": "random"})
    epsilon: float = 0.5
    output: str | None = None
    params: dict = field(default_factory=dict)
    timing: bool = False

    def __post_init__(self) -> None:
        if isinstance(self.p, list):
            object.__setattr__(self, "p", tuple(self.p))
        self.validate()

    def validate(self) -> None:
        if self.problem not in PROBLEMS:
            raise ConfigError(f"problem must be one of {PROBLEMS}, got {self.problem!r}")
        if not isinstance(self.n, int) or isinstance(self.n, bool) or self.n < 1:
            raise ConfigError(f"n must be a positive integer, got {self.n!r}")
        if not isinstance(self.trials, int) or isinstance(self.trials, bool) or self.trials < 1:
            raise ConfigError(f"trials must be at least 1, got {self.trials!r}")
        if not isinstance(self.master_seed, int) or self.master_seed < 0:
            raise ConfigError("master_seed must be a non-negative integer")
        if isinstance(self.p, dict):
            extra = set(self.p) - _SWEEP_KEYS
            if extra or set(self.p) != _SWEEP_KEYS:
                raise ConfigError(f"a p sweep needs exactly the keys {sorted(_SWEEP_KEYS)}")
            if not isinstance(self.p["points"], int) or self.p["points"] < 1:
                raise ConfigError("sweep points must be a positive integer")
            if not self.p["low"] <= self.p["high"]:
                raise ConfigError("sweep low must not exceed high")
        elif not self.p:
            raise ConfigError("at least one p value is required")
        for q in self.p_values:
            if not 0.0 < q <= 1.0:
                raise ConfigError(f"p values must lie in (0, 1], got {q}")
        extra = set(self.params) - _PARAM_KEYS[self.problem]
        if extra:
            raise ConfigError(f"unknown params for {self.problem}: {sorted(extra)}")
        if self.problem == "embed":
            if not 0.0 < self.epsilon < 1.0:
                raise ConfigError(f"epsilon must lie in (0, 1), got {self.epsilon}")
            extra = set(self.tree) - _TREE_KEYS
            if extra:
                raise ConfigError(f"unknown tree keys: {sorted(extra)}")
            kind = self.tree.get("kind")
            if kind not in TREE_KINDS:
                raise ConfigError(f"tree kind must be one of {TREE_KINDS}, got {kind!r}")
            if kind in ("bounded", "tndelta") and not isinstance(self.tree.get("delta"), int):
                raise ConfigError(f"tree kind {kind!r} needs an integer delta")
            if kind == "file" and not self.tree.get("path"):
                raise ConfigError("tree kind 'file' needs a path")

    @property
    def p_values(self) -> tuple[float, ...]:
        if not isinstance(self.p, dict):
            return tuple(float(q) for q in self.p)
        lo, hi, k = float(self.p["low"]), float(self.p["high"]), self.p["points"]
        if k == 1:
            return (lo,)
        ratio = (hi / lo) ** (1.0 / (k - 1))
        return tuple([lo * ratio**i for i in range(k - 1)] + [hi])

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        if not isinstance(self.p, dict):
            d["p"] = list(self.p)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> ExperimentConfig:
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        extra = set(d) - _TOP_KEYS
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        missing = {"n", "p"} - set(d)
        if missing:
            raise ConfigError(f"missing config keys: {sorted(missing)}")
        try:
            return cls(**d)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc


def read_config(path: str | Path) -> ExperimentConfig:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from exc
    return ExperimentConfig.from_dict(doc)


def write_config(path: str | Path, cfg: ExperimentConfig) -> None:
    Path(path).write_text(json.dumps(cfg.to_dict(), indent=2, sort_keys=True) + "\n")


@dataclass(frozen=True)
class TrialRecord:
    n: int
    delta: int
    p: float
    p_prime: float
    seed: int
    case: int
    success: bool
    failed_phase: str
    millis: float

    def row(self) -> list[str]:
        return [
            str(self.n),
            str(self.delta),
            repr(self.p),
            repr(self.p_prime),
            str(self.seed),
            str(self.case),
            "1" if self.success else "0",
            self.failed_phase,
            f"{self.millis:.3f}",
        ]


def write_csv(records: Sequence[TrialRecord], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_FIELDS)
        for r in records:
            w.writerow(r.row())


def read_csv(path: str | Path) -> list[TrialRecord]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != CSV_FIELDS:
        raise ConfigError(f"{path}: header does not match {','.join(CSV_FIELDS)}")
    out = []
    for row in rows[1:]:
        if len(row) != len(CSV_FIELDS):
            raise ConfigError(f"{path}: row with {len(row)} fields")
        n, delta, p, pp, seed, case, ok, phase, ms = row
        out.append(TrialRecord(int(n), int(delta), float(p), float(pp), int(seed), int(case), ok == "1", phase, float(ms)))
    return out


def build_tree(spec: dict, n: int, seed: int) -> Tree:
    kind = spec["kind"]
    if kind == "path":
        return path_tree(n)
    if kind == "star":
        return star_tree(n)
    if kind == "comb":
        return comb_tree(n)
    if kind == "random":
        return random_tree(n, derive_seed(seed, "tree"))
    if kind == "bounded":
        return random_bounded_degree_tree(n, spec["delta"], derive_seed(seed, "tree"))
    if kind == "tndelta":
        return t_n_delta(n, spec["delta"])
    if kind == "file":
        from .io import read_tree

        tree = read_tree(spec["path"])
        if tree.n != n:
            raise ConfigError(f"tree file has {tree.n} vertices, config says n={n}")
        return tree
    raise ConfigError(f"unknown tree kind {kind!r}")


def _budget(params: dict) -> PathBudget:
    kw = {k: params[k] for k in ("restarts", "stall_limit") if k in params}
    return PathBudget(**kw)


def _embed_trial(cfg: ExperimentConfig, p: float, seed: int) -> tuple[int, float, int, bool, str]:
    tree = build_tree(cfg.tree, cfg.n, seed)
    host = gnp_two_round(cfg.n, p, derive_seed(seed, "host"))
    params = PipelineParams(
        cfg.epsilon,
        leaf_selection=cfg.params.get("leaf_selection", "spread"),
        tiebreak=cfg.params.get("tiebreak", "lookahead"),
        path_budget=_budget(cfg.params),
    )
    report = embed_spanning_tree(tree, host, params, seed)
    return tree.max_degree, host.p_prime, report.case_taken, report.success, report.failed_phase


def _stars_trial(cfg: ExperimentConfig, p: float, seed: int) -> tuple[int, float, int, bool, str]:
    delta = cfg.params.get("delta", 10)
    if cfg.n % delta:
        raise ConfigError(f"pool size {cfg.n} is not a multiple of the demand {delta}")
    h = bipartite_gnp(cfg.n // delta, cfg.n, p, seed)
    inst = StarInstance(h.left, [delta] * len(h.left), h.right, delta)
    try:
        sol = star_completion(h, inst)
    except StarCompletionError:
        return delta, p, 1, False, "stars"
    return delta, p, 1, check_star_solution(h, inst, sol), ""


def path_subproblem(n0: int, k: int, q: float, seed: int) -> PathInstance:
    """Pairs ``(i, n0+i)`` and consecutive layers of ``n0`` vertices in ``G(n0(k+1), q)``."""
    g = gnp(n0 * (k + 1), q, seed)
    pairs = [(i, n0 + i) for i in range(n0)]
    layers = [range(n0 * (2 + j), n0 * (3 + j)) for j in range(k - 1)]
    return PathInstance(pairs, layers, g)


def _paths_trial(cfg: ExperimentConfig, p: float, seed: int) -> tuple[int, float, int, bool, str]:
    k = cfg.params.get("k", 3)
    inst = path_subproblem(cfg.n, k, p, seed)
    try:
        sol = insert_paths(inst, _budget(cfg.params), seed=derive_seed(seed, "solve"))
    except PathInsertionError as exc:
        return 2, p, 2, False, f"paths-{exc.phase}"
    return 2, p, 2, check_path_solution(inst, sol), ""


_TRIALS: dict[str, Callable] = {"embed": _embed_trial, "stars": _stars_trial, "paths": _paths_trial}


def run_trial(cfg: ExperimentConfig, p: float, seed: int) -> TrialRecord:
    """One trial at edge probability ``p``; a pure function of its arguments unless timing is on."""
    start = time.perf_counter()
    delta, pp, case, ok, phase = _TRIALS[cfg.problem](cfg, p, seed)
    millis = (time.perf_counter() - start) * 1000 if cfg.timing else 0.0
    return TrialRecord(cfg.n, delta, p, pp, seed, case, ok, "" if ok else phase, millis)


def _run_task(task: tuple[ExperimentConfig, float, int]) -> TrialRecord:
    return run_trial(*task)


def _map(tasks: list, threads: int) -> list[TrialRecord]:
    if threads <= 1 or len(tasks) <= 1:
        return [_run_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        # map preserves submission order, so records come back in (point, trial) order
        return list(pool.map(_run_task, tasks, chunksize=max(1, len(tasks) // (4 * threads))))


def run_experiment(cfg: ExperimentConfig, threads: int = 1) -> list[TrialRecord]:
    """All trials of ``cfg`` in (point, trial) order; writes ``cfg.output`` when set."""
    tasks = [
        (cfg, p, derive_seed(cfg.master_seed, i, t))
        for i, p in enumerate(cfg.p_values)
        for t in range(cfg.trials)
    ]
    records = _map(tasks, threads)
    if cfg.output:
        write_csv(records, cfg.output)
    return records


def success_rates(records: Sequence[TrialRecord]) -> dict[float, float]:
    by_p: dict[float, list[bool]] = {}
    for r in records:
        by_p.setdefault(r.p, []).append(r.success)
    return {p: sum(v) / len(v) for p, v in by_p.items()}


@dataclass(frozen=True)
class ThresholdEstimate:
    estimate: float
    low: float
    high: float
    probes: tuple[tuple[float, float], ...]
    records: tuple[TrialRecord, ...]

    def to_json(self) -> dict[str, Any]:
        return {
            "estimate": self.estimate,
            "bracket": [self.low, self.high],
            "probes": [{"p": p, "rate": r} for p, r in self.probes],
        }


def estimate_threshold(
    cfg: ExperimentConfig,
    target: float = 0.5,
    rel_width: float = 0.1,
    threads: int = 1,
    max_probes: int = 40,
) -> ThresholdEstimate:
    """Geometric bisection for the smallest ``p`` whose success rate reaches ``target``.

    The bracket is the smallest and largest of ``cfg.p_values``.  Every probe
    reuses the same trial seeds, so rates at different ``p`` are compared on
    common random numbers.

    Raises:
        BracketError: the rate at the low end already reaches the target, or
            the rate at the high end falls short of it.
    """
    if not 0.0 < target <= 1.0:
        raise ValueError("target must lie in (0, 1]")
    values = cfg.p_values
    lo, hi = min(values), max(values)
    seeds = [derive_seed(cfg.master_seed, "probe", t) for t in range(cfg.trials)]
    probes: list[tuple[float, float]] = []
    records: list[TrialRecord] = []

    def rate(p: float) -> float:
        recs = _map([(cfg, p, s) for s in seeds], threads)
        records.extend(recs)
        r = sum(x.success for x in recs) / len(recs)
        probes.append((p, r))
        return r

    r_hi = rate(hi)
    if r_hi < target:
        raise BracketError(f"success rate {r_hi:.3f} at p={hi} is below the target {target}")
    if lo < hi and rate(lo) >= target:
        raise BracketError(f"success rate at p={lo} already reaches the target {target}")
    while hi / lo > 1.0 + rel_width and len(probes) < max_probes:
        mid = math.sqrt(lo * hi)
        if rate(mid) >= target:
            hi = mid
        else:
            lo = mid
    return ThresholdEstimate(math.sqrt(lo * hi), lo, hi, tuple(probes), tuple(records))
