import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from treembed.rgraph import (
    BipartiteGraph,
    Graph,
    bipartite_gnp,
    gnp,
    gnp_two_round,
    per_round_probability,
    restrict_bipartite,
    split_two_round,
)
from treembed.rng import derive_seed, stream, tag_word


@st.composite
def graphs(draw, max_n=20):
    n = draw(st.integers(0, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return n, edges


@given(graphs())
def test_csr_round_trip(case):
    n, edges = case
    g = Graph.from_edges(n, edges)
    assert g.m == len(edges)
    assert sorted(map(tuple, g.edges().tolist())) == sorted(edges)
    for u, v in edges:
        assert g.has_edge(u, v) and g.has_edge(v, u)
    for v in range(n):
        nb = g.neighbors(v).tolist()
        assert nb == sorted(nb) and v not in nb
    if n:
        us, vs = np.meshgrid(np.arange(n), np.arange(n))
        got = g.has_edges(us.ravel(), vs.ravel())
        want = [(min(a, b), max(a, b)) in set(edges) for a, b in zip(us.ravel(), vs.ravel())]
        assert got.tolist() == want


def test_from_edges_rejects_bad_input():
    with pytest.raises(ValueError):
        Graph.from_edges(3, [(0, 3)])
    with pytest.raises(ValueError):
        Graph.from_edges(3, [(1, 1)])
    # duplicates collapse
    assert Graph.from_edges(3, [(0, 1), (1, 0)]).m == 1


def test_gnp_extremes():
    assert gnp(10, 0.0, 1).m == 0
    assert gnp(10, 1.0, 1).m == 45
    assert gnp(1, 0.5, 1).m == 0
    with pytest.raises(ValueError):
        gnp(10, 1.5, 1)


def test_gnp_is_deterministic_and_seed_sensitive():
    assert gnp(300, 0.05, 9) == gnp(300, 0.05, 9)
    assert gnp(300, 0.05, 9) != gnp(300, 0.05, 10)
    assert gnp(100, 0.5, 9) == gnp(100, 0.5, 9)


@pytest.mark.parametrize("n, p", [(400, 0.01), (400, 0.15), (300, 0.35), (200, 0.9)])
def test_gnp_edge_count_within_five_sigma(n, p):
    pairs = n * (n - 1) // 2
    sigma = math.sqrt(pairs * p * (1 - p))
    for seed in range(5):
        assert abs(gnp(n, p, seed).m - pairs * p) < 5 * sigma


@pytest.mark.parametrize("p", [0.1, 0.5])
def test_gnp_pair_frequencies_are_uniform(p):
    # each of the 15 pairs of K6 over 4000 draws; chi-square vs Binomial(4000, p)
    n, draws = 6, 4000
    counts = np.zeros((n, n))
    for s in range(draws):
        e = gnp(n, p, s).edges()
        counts[e[:, 0], e[:, 1]] += 1
    iu = np.triu_indices(n, 1)
    obs = counts[iu]
    z = (obs - draws * p) / math.sqrt(draws * p * (1 - p))
    assert np.abs(z).max() < 5
    # sum of 15 squared z-values is chi-square(15); 0.999 quantile 37.7
    assert float((z**2).sum()) < 37.7


def test_degree_distribution_matches_binomial():
    n, p = 2000, 0.01
    deg = gnp(n, p, 3).degrees()
    # mean degree is 2m/n with m ~ Binomial(C(n,2), p)
    pairs = n * (n - 1) // 2
    assert abs(deg.mean() - (n - 1) * p) < 5 * 2 * math.sqrt(pairs * p * (1 - p)) / n
    assert abs(deg.var() - (n - 1) * p * (1 - p)) < 0.15 * (n - 1) * p


@given(st.floats(0.0, 1.0))
def test_per_round_probability_identity(p):
    pp = per_round_probability(p)
    assert 0.0 <= pp <= p + 1e-15
    assert math.isclose((1 - pp) ** 2, 1 - p, rel_tol=1e-12, abs_tol=1e-15)


def test_per_round_probability_example():
    assert math.isclose(per_round_probability(0.19), 0.1, rel_tol=1e-12)


def test_two_round_union_and_determinism():
    h = gnp_two_round(200, 0.2, 5)
    u = h.union
    assert u.m >= max(h.g1.m, h.g2.m)
    assert set(map(tuple, u.edges().tolist())) == set(map(tuple, h.g1.edges().tolist())) | set(map(tuple, h.g2.edges().tolist()))
    assert gnp_two_round(200, 0.2, 5).g2 == h.g2
    assert h.g1 != h.g2


def test_two_round_marginal_edge_probability():
    # criterion-level check lives in the acceptance suite; this is the quick version
    p, trials = 0.3, 2000
    hits = sum(gnp_two_round(2, p, s).union.has_edge(0, 1) for s in range(trials))
    assert abs(hits / trials - p) < 5 * math.sqrt(p * (1 - p) / trials)


def test_split_two_round_recovers_host_and_marginals():
    g = gnp(300, 0.3, 2)
    h = split_two_round(g, 7)
    assert h.union == g
    p = g.m / (300 * 299 / 2)
    pp = per_round_probability(p)
    # each round keeps an edge of g with probability p'/p
    for r in (h.g1, h.g2):
        frac = r.m / g.m
        assert abs(frac - pp / p) < 5 * math.sqrt(pp / p * (1 - pp / p) / g.m)
    both = len(set(map(tuple, h.g1.edges().tolist())) & set(map(tuple, h.g2.edges().tolist())))
    assert abs(both / g.m - pp * pp / p) < 5 * math.sqrt(pp * pp / p / g.m)


def test_bipartite_generation_and_restriction():
    h = bipartite_gnp(5, 7, 1.0, 0)
    assert h.m == 35 and h.left == tuple(range(5)) and h.right == tuple(range(5, 12))
    assert bipartite_gnp(5, 7, 0.0, 0).m == 0
    g = Graph.from_edges(6, [(0, 3), (0, 1), (1, 4), (2, 5), (3, 4)])
    r = restrict_bipartite(g, [0, 1], [3, 4])
    assert sorted(r.edges()) == [(0, 3), (1, 4)]
    with pytest.raises(ValueError):
        restrict_bipartite(g, [0, 1], [1, 2])
    with pytest.raises(ValueError):
        BipartiteGraph.from_edges([0], [1], [(1, 0)])


def test_rng_streams_are_independent_and_stable():
    a = stream(5, "x").random(4)
    assert np.array_equal(a, stream(5, "x").random(4))
    assert not np.array_equal(a, stream(5, "y").random(4))
    assert not np.array_equal(a, stream(6, "x").random(4))
    assert derive_seed(1, 2, 3) == derive_seed(1, 2, 3) != derive_seed(1, 3, 2)
    assert 0 <= derive_seed(0, "a") < 2**63
    assert tag_word(7) == 7 and tag_word("abc") == tag_word("abc")


@pytest.mark.parametrize("p", [0.01, 0.15, 0.5])
def test_bipartite_edge_count_within_five_sigma(p):
    a, b = 120, 300
    sigma = math.sqrt(a * b * p * (1 - p))
    for seed in range(5):
        h = bipartite_gnp(a, b, p, seed)
        assert abs(h.m - a * b * p) < 5 * sigma
        assert all(0 <= j < b for j in h.indices.tolist())
        for i in range(a):
            nb = h.neighbors(i).tolist()
            assert nb == sorted(set(nb))
