import itertools
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import Bounds, LinearConstraint, milp

from treembed.lowerbound import (
    DominationCertificate,
    dominates,
    greedy_dominating_set,
    has_dominating_set,
    log_binomial,
    refute_tndelta,
    tndelta_probability,
    union_bound_log,
)
from treembed.rgraph import Graph, gnp

mpmath.mp.dps = 60


def oracle_log(n, k, p):
    p = mpmath.mpf(p)
    return mpmath.log(mpmath.binomial(n, k)) + (n - k) * mpmath.log(1 - (1 - p) ** k)


def test_union_bound_reference_value():
    # mpmath at 60 digits: ln[C(100,10) (1 - 0.9^10)^90]
    assert math.isclose(union_bound_log(100, 10, 0.1), -8.105339637305308, rel_tol=1e-12)
    assert math.isclose(float(oracle_log(100, 10, 0.1)), -8.105339637305308, rel_tol=1e-12)


def test_union_bound_limits():
    assert union_bound_log(50, 50, 0.3) == 0.0
    assert math.isclose(union_bound_log(80, 7, 1.0), math.log(math.comb(80, 7)), rel_tol=1e-15)
    assert math.isclose(union_bound_log(80, 7, 1 - 1e-12), math.log(math.comb(80, 7)), rel_tol=1e-6)
    with pytest.raises(ValueError):
        union_bound_log(10, 0, 0.5)
    with pytest.raises(ValueError):
        union_bound_log(10, 11, 0.5)
    with pytest.raises(ValueError):
        union_bound_log(10, 3, 0.0)


@given(st.integers(1, 5000), st.data(), st.floats(1e-6, 0.999))
def test_union_bound_matches_arbitrary_precision(n, data, p):
    k = data.draw(st.integers(1, n))
    want = oracle_log(n, k, p)
    got = union_bound_log(n, k, p)
    if want == 0:
        assert got == 0
    else:
        assert abs((got - want) / want) < 1e-9


def test_log_binomial_large_n_uses_lgamma_accurately():
    for n, k in [(10**5, 50), (10**6, 1000), (30_000, 15_000)]:
        want = mpmath.log(mpmath.binomial(n, k))
        assert abs((log_binomial(n, k) - want) / want) < 1e-12


def test_tndelta_low_point_is_strongly_negative():
    n, delta = 2000, 45
    k = -(-n // (delta - 1))
    p = tndelta_probability(n, delta, 0.1)
    v = union_bound_log(n, k, p)
    assert k == 46
    assert abs(v - float(oracle_log(n, k, p))) < 1e-9 * abs(v)
    assert v < -900


def cycle(n):
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def test_cycle_and_complete_examples():
    c = has_dominating_set(cycle(5), 2)
    assert c.answer is True and c.witness == (0, 2) and c.method == "exact"
    assert has_dominating_set(cycle(5), 1).answer is False
    k = has_dominating_set(Graph.complete(7), 1)
    assert k.answer is True and len(k.witness) == 1


def test_certificate_json():
    cert = DominationCertificate(None, None, "greedy-upper-bound-only", 4, 10)
    assert cert.to_json() == {"answer": "unknown", "witness": None, "method": "greedy-upper-bound-only", "k": 4, "nodes": 10}
    assert has_dominating_set(cycle(5), 2).to_json()["answer"] == "yes"


def naive_domination(g, k):
    """Subset enumeration over closed-neighbourhood bitmasks."""
    masks = [(1 << v) | sum(1 << int(w) for w in g.neighbors(v)) for v in range(g.n)]
    full = (1 << g.n) - 1
    for size in range(1, k + 1):
        for combo in itertools.combinations(masks, size):
            acc = 0
            for m in combo:
                acc |= m
            if acc == full:
                return True
    return False


@pytest.mark.parametrize("seed", range(200))
def test_exact_answers_agree_with_enumeration(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 21))
    p = float(rng.choice([0.05, 0.1, 0.2, 0.35]))
    g = gnp(n, p, seed)
    gamma = next(k for k in range(1, n + 1) if naive_domination(g, k))
    for k in {max(1, gamma - 1), gamma}:
        cert = has_dominating_set(g, k)
        assert cert.method == "exact"
        assert cert.answer is (k >= gamma)
        if cert.answer:
            assert len(cert.witness) <= k and dominates(g, cert.witness)


def milp_domination_number(g):
    n = g.n
    a = np.eye(n)
    for u, v in g.edges().tolist():
        a[u, v] = a[v, u] = 1
    res = milp(np.ones(n), constraints=LinearConstraint(a, lb=1), integrality=np.ones(n), bounds=Bounds(0, 1))
    assert res.success
    return int(round(res.fun))


@pytest.mark.parametrize("seed", range(20))
def test_n60_against_integer_programming(seed):
    g = gnp(60, 0.05, seed)
    gamma = milp_domination_number(g)
    for k in (gamma - 1, gamma):
        cert = has_dominating_set(g, k)
        assert cert.answer is (k >= gamma)
    # the T(60, 8) refutation uses k = ceil(60/7) = 9
    assert refute_tndelta(g, 60, 8) is (gamma > 9)


def test_above_exact_limit_never_says_no():
    g = gnp(200, 0.05, 1)
    cert = has_dominating_set(g, 3)
    # degree bound: max degree + 1 vertices per chosen vertex
    if -(-200 // (int(g.degrees().max()) + 1)) > 3:
        assert cert.answer is False
    g = gnp(200, 0.3, 1)
    cert = has_dominating_set(g, len(greedy_dominating_set(g)) - 1)
    assert cert.answer is None and cert.method == "greedy-upper-bound-only"


def test_budget_exhaustion_is_inconclusive():
    g = gnp(60, 0.15, 11)
    cert = has_dominating_set(g, 7, node_budget=3)
    assert cert.answer is None


def test_refute_examples():
    assert refute_tndelta(Graph.empty(30), 30, 5) is True
    assert refute_tndelta(Graph.complete(30), 30, 5) is False
    with pytest.raises(ValueError):
        refute_tndelta(Graph.empty(10), 11, 5)


@given(st.integers(1, 40), st.floats(0.0, 1.0), st.integers(0, 2**32))
def test_greedy_always_dominates(n, p, seed):
    g = gnp(n, p, seed)
    assert dominates(g, greedy_dominating_set(g))
