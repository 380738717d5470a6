import math

import pytest

from treembed import pipeline
from treembed.greedy import verify_embedding
from treembed.lowerbound import refute_tndelta
from treembed.pipeline import PipelineParams, embed_spanning_tree, select_leaves
from treembed.rgraph import Graph, TwoRoundGraph, gnp, gnp_two_round, split_two_round
from treembed.treegen import comb_tree, path_tree, random_tree, star_tree, t_n_delta


def complete_host(n):
    k = Graph.complete(n)
    return TwoRoundGraph(k, k, 1.0, 1.0)


def test_params_constants():
    assert PipelineParams(0.5).k == 4 and PipelineParams(0.5).delta == 0.05
    assert PipelineParams(0.99).k == 3
    assert PipelineParams(2 / 3).k == 3
    assert PipelineParams(0.1).k == 20
    with pytest.raises(ValueError):
        PipelineParams(1.0)
    with pytest.raises(ValueError):
        PipelineParams(0.0)


@pytest.mark.parametrize(
    "tree, case",
    [
        (star_tree(100), 1),
        (path_tree(400), 2),
        (comb_tree(400), 1),  # 20 leaves and delta*n = 20: the tie goes to Case 1
        (comb_tree(900), 2),
        (t_n_delta(300, 10), 1),
        (random_tree(500, 3), 1),
    ],
)
def test_complete_host_always_succeeds(tree, case):
    rep = embed_spanning_tree(tree, complete_host(tree.n), PipelineParams(0.5), seed=1)
    assert rep.case_taken == case
    assert rep.success, rep.error
    assert verify_embedding(tree, Graph.complete(tree.n), rep.embedding)
    assert rep.phase_outcomes["verify"] == "ok"


def test_case_two_geometry(monkeypatch):
    seen = {}
    real = pipeline.PathInstance

    def spy(pairs, layers, host):
        seen["layers"] = [len(layer) for layer in layers]
        seen["free"] = sum(len(layer) for layer in layers)
        return real(pairs, layers, host)

    monkeypatch.setattr(pipeline, "PathInstance", spy)
    tree = path_tree(400)
    params = PipelineParams(0.5)
    rep = embed_spanning_tree(tree, complete_host(400), params, seed=2)
    n0 = rep.details["n0"]
    assert seen["layers"] == [n0] * (params.k - 1)
    assert seen["free"] == n0 * (params.k - 1) == rep.details["removed"]
    # n0 is the floored bound from the floored number of allowed leaves
    assert n0 == min(math.floor((400 - (2 * 20 - 2) * 5) / 5), 400 // 5)


def test_decomposition_too_small(monkeypatch):
    # unreachable for real trees in Case 2; forced through the bound
    monkeypatch.setattr(pipeline, "path_count_bound", lambda n, leaves, k: 0.0)
    rep = embed_spanning_tree(path_tree(400), complete_host(400), PipelineParams(0.5), seed=0)
    assert rep.case_taken == 2
    assert not rep.success and rep.failed_phase == "decomposition"


def test_phase_isolation_by_spies(monkeypatch):
    host = gnp_two_round(400, 0.6, 5)
    calls = []
    real_greedy = pipeline.greedy_embed
    real_restrict = pipeline.restrict_bipartite
    real_paths = pipeline.PathInstance

    def greedy_spy(tree, g, **kw):
        calls.append(("forest", g is host.g1))
        return real_greedy(tree, g, **kw)

    def restrict_spy(g, left, right):
        calls.append(("stars", g is host.g2))
        return real_restrict(g, left, right)

    def paths_spy(pairs, layers, g):
        calls.append(("paths", g is host.g2))
        return real_paths(pairs, layers, g)

    monkeypatch.setattr(pipeline, "greedy_embed", greedy_spy)
    monkeypatch.setattr(pipeline, "restrict_bipartite", restrict_spy)
    monkeypatch.setattr(pipeline, "PathInstance", paths_spy)
    embed_spanning_tree(random_tree(400, 1), host, PipelineParams(0.5), seed=5)
    embed_spanning_tree(path_tree(400), host, PipelineParams(0.5), seed=5)
    assert [c[0] for c in calls] == ["forest", "stars", "forest", "paths"]
    assert all(ok for _, ok in calls)


def test_phase_isolation_by_one_sided_hosts():
    n = 400
    full, empty = Graph.complete(n), Graph.empty(n)
    for tree in (random_tree(n, 4), path_tree(n)):
        only_g1 = embed_spanning_tree(tree, TwoRoundGraph(full, empty, 1.0, 1.0), PipelineParams(0.5))
        assert not only_g1.success and only_g1.phase_outcomes["forest"] == "ok"
        assert only_g1.failed_phase in ("stars", "paths")
        only_g2 = embed_spanning_tree(tree, TwoRoundGraph(empty, full, 1.0, 1.0), PipelineParams(0.5))
        assert only_g2.failed_phase == "forest"


def test_select_leaves():
    tree = t_n_delta(40, 5)
    lowest = select_leaves(tree, 6, "lowest")
    assert lowest == sorted(tree.leaves())[:6]
    spread = select_leaves(tree, 6, "spread")
    fathers = [tree.adjacency[v][0] for v in spread]
    assert len(set(fathers)) == 6
    assert all(tree.degrees[v] == 1 for v in spread)
    with pytest.raises(ValueError):
        select_leaves(tree, 100)


def test_reports_failures_without_raising():
    tree = t_n_delta(300, 10)
    rep = embed_spanning_tree(tree, gnp_two_round(300, 0.01, 1), PipelineParams(0.5), seed=1)
    assert not rep.success and rep.embedding is None
    assert rep.failed_phase == "forest"
    with pytest.raises(ValueError):
        embed_spanning_tree(tree, gnp_two_round(200, 0.5, 1), PipelineParams(0.5))


def test_fixed_host_split_union_is_the_host():
    g = gnp(300, 0.5, 3)
    host = split_two_round(g, 4)
    rep = embed_spanning_tree(random_tree(300, 2), host, PipelineParams(0.5), seed=4)
    if rep.success:
        assert verify_embedding(random_tree(300, 2), g, rep.embedding)


def test_deterministic_given_seed():
    host = gnp_two_round(400, 0.3, 8)
    a = embed_spanning_tree(path_tree(400), host, PipelineParams(0.5), seed=8)
    b = embed_spanning_tree(path_tree(400), host, PipelineParams(0.5), seed=8)
    assert a.success == b.success
    assert a.embedding == b.embedding


def test_refuted_instances_never_embed():
    n, delta = 40, 5
    refuted = 0
    for seed in range(60):
        p = 0.03 + 0.005 * (seed % 20)
        host = gnp_two_round(n, p, seed)
        if refute_tndelta(host.union, n, delta):
            refuted += 1
            rep = embed_spanning_tree(t_n_delta(n, delta), host, PipelineParams(0.5), seed=seed)
            assert not rep.success
    assert refuted > 0


@pytest.mark.parametrize("seed", range(24))
def test_every_reported_success_verifies(seed):
    trees = [random_tree(400, seed), comb_tree(400), t_n_delta(400, 20), path_tree(400)]
    tree = trees[seed % 4]
    host = gnp_two_round(400, [0.05, 0.1, 0.3, 0.6][(seed // 4) % 4], seed)
    rep = embed_spanning_tree(tree, host, PipelineParams(0.5), seed=seed)
    if rep.success:
        assert verify_embedding(tree, host.union, rep.embedding)
    else:
        assert rep.failed_phase in ("forest", "stars", "paths", "decomposition")


def test_zone_flags():
    tree = t_n_delta(400, 8)
    # 20 removed leaves at p' = 1 fall short of 3*8 + 5 ln 400
    assert pipeline._zones(tree, 400, 1.0, 1.0, 20, 0.5) == (False, False)
    assert pipeline._zones(tree, 400, 1.0, 1.0, 60, 0.5)[0] is True
    assert pipeline._zones(path_tree(10_000), 10_000, 1.0, 1.0, 0, 0.9)[1] is True
    assert pipeline._zones(star_tree(10_000), 10_000, 0.5, 0.3, 1000, 0.5)[1] is False
