import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geoclique.approx import (
    IocpViolation,
    _trials_formula,
    decompose_layers,
    derive_params,
    mis_eptas,
    mis_exact_cycle_nbhd,
    mis_exact_occ,
    mis_iocp_recursive,
    mis_subexp,
    odd_cycle_cover,
    qptas_branch,
    qptas_threshold,
)
from geoclique.geom import intersection_graph
from geoclique.graph import Graph, bits, brute_force, complement, popcount, shortest_odd_cycle, to_mask

from helpers import cycle, disjoint_cycles, disk_instance, long_cycle_graph, random_bipartite


# -- parameters -------------------------------------------------------------------------

def test_params_first_example():
    p = derive_params(0.9, 1.0, 1)
    assert p.c == 27
    assert p.delta == pytest.approx(1 / 30)
    assert p.s == math.ceil(300 * math.log(30)) == 1021
    assert p.z == 7


def test_params_second_example():
    assert derive_params(0.5, 0.5).c == 168


def test_trials_formula_natural_log():
    assert _trials_formula(1.0, 3, 10**9) == 173
    p = derive_params(0.5, 1.0, 0, mode="theory")
    assert p.t == 1 and p.s == 0


@given(st.floats(0.01, 0.99), st.floats(0.01, 1.0))
def test_params_invariants(eps, beta):
    p = derive_params(eps, beta)
    assert p.c >= 24 and p.z >= 6
    assert p.delta <= eps / 24 + 1e-15


@pytest.mark.parametrize("eps,beta", [(0, 0.5), (1, 0.5), (0.5, 0), (0.5, 1.5)])
def test_params_rejects_out_of_range(eps, beta):
    with pytest.raises(ValueError):
        derive_params(eps, beta)


def test_practical_mode_overrides():
    p = derive_params(0.25, 0.25, 4, mode="practical", s=2, t=7)
    assert p.sample_size(100) == 2 and p.trials() == 7
    q = derive_params(0.25, 0.25)
    assert q.sample_size(18) == 2 and q.trials() == 50


# -- sampling EPTAS --------------------------------------------------------------------------

def test_eptas_bipartite_is_exact():
    rng = random.Random(1)
    for _ in range(20):
        g = random_bipartite(rng, rng.randint(1, 16))
        res = mis_eptas(g, derive_params(0.25, 1.0, s=1, t=3), seed=0)
        assert res.value == popcount(brute_force(g))


def test_eptas_complement_c7():
    # an independent set of the complement is a clique of C7, so alpha = 2
    g = complement(cycle(7))
    alpha = popcount(brute_force(g))
    assert alpha == 2
    res = mis_eptas(g, derive_params(0.3, 1.0, s=2, t=50), seed=0)
    assert res.value >= math.ceil((1 - 0.3) * alpha)
    assert g.is_independent(res.mask)


def test_eptas_iocp_two_raises_with_evidence():
    g = disjoint_cycles(3, 3)
    with pytest.raises(IocpViolation) as exc:
        mis_eptas(g, derive_params(0.5, 1.0, s=0, t=1))
    assert "odd_cycle" in exc.value.evidence


def test_eptas_seeded_determinism_and_workers():
    g = complement(intersection_graph(disk_instance(41, 14, 14)))
    p = derive_params(0.25, 0.25, t=30)
    a, b = mis_eptas(g, p, seed=9), mis_eptas(g, p, seed=9)
    c = mis_eptas(g, p, seed=9, workers=4)
    assert a.mask == b.mask == c.mask and a.paths == c.paths


def test_long_cycle_path_and_claim():
    rng = random.Random(4)
    p = derive_params(0.9, 1.0, s=1, t=20)
    longs = 0
    for _ in range(20):
        g = long_cycle_graph(rng, 29, rng.randint(0, 12))
        res = mis_eptas(g, p, seed=rng.randrange(1000))
        longs += res.paths["long"]
        if res.certificates.get("claim_proper") is not None:
            assert res.certificates["claim_proper"]
        assert res.value >= math.ceil((1 - 0.9) * popcount(brute_force(g, cap=64)))
    assert longs > 0


def test_decompose_cycle_alone():
    p = derive_params(0.9, 1.0)
    g = cycle(29)
    dec = decompose_layers(g, tuple(range(29)), p)
    assert dec.lam == 0
    union = 0
    for b in dec.blocks:
        assert not union & b
        union |= b
    assert union == g.all_mask


def test_decompose_pendant():
    p = derive_params(0.9, 1.0)
    g = Graph.from_edges(30, cycle(29).edges() + [(2, 29)])
    dec = decompose_layers(g, tuple(range(29)), p)
    assert dec.layers[0] == 1 << 29
    assert dec.stratum(1, 3) == 1 << 29


def test_decompose_rejects_short_cycle():
    with pytest.raises(ValueError):
        decompose_layers(cycle(5), tuple(range(5)), derive_params(0.9, 1.0))


def test_decompose_random_set_algebra():
    rng = random.Random(7)
    p = derive_params(0.9, 1.0)
    for _ in range(30):
        g = long_cycle_graph(rng, 29, rng.randint(5, 25))
        cyc = shortest_odd_cycle(g)
        dec = decompose_layers(g, cyc, p)
        for k in range(1, dec.lam + 1):
            parts = [dec.stratum(k, j) for j in range(1, dec.g + 1)]
            assert sum(popcount(x) for x in parts) == popcount(dec.layer(k))
            acc = 0
            for x in parts:
                acc |= x
            assert acc == dec.layer(k)
        seen = 0
        for b in dec.blocks:
            assert not seen & b
            seen |= b


# -- recursion and branching ----------------------------------------------------------

def test_recursive_two_pentagons():
    g = disjoint_cycles(5, 5)
    res = mis_iocp_recursive(g, derive_params(0.5, 1.0, i=2, s=1, t=10), seed=3)
    assert res.value >= 2 and g.is_independent(res.mask)


def test_recursive_bipartite_exact():
    g = random_bipartite(random.Random(2), 14, 0.3)
    res = mis_iocp_recursive(g, derive_params(0.5, 1.0, i=3, s=1, t=5))
    assert res.value == popcount(brute_force(g))


def test_recursive_i1_matches_eptas():
    g = complement(cycle(7))
    p = derive_params(0.3, 1.0, s=2, t=10)
    assert mis_iocp_recursive(g, p, seed=5).mask == mis_eptas(g, p, seed=5).mask


def test_qptas_threshold_small_n():
    # n / ln^4 n < 1 from n = 5 on; below that the leaves are exact anyway
    assert all(qptas_threshold(n) == 1 for n in range(5, 17))
    assert qptas_threshold(3) == 3 and qptas_threshold(4) == 2


def test_qptas_star():
    star = Graph.from_edges(10, [(0, k) for k in range(1, 10)])
    assert qptas_branch(star).value == 9


def test_qptas_bipartite_leaf():
    g = random_bipartite(random.Random(6), 12, 0.4)
    assert qptas_branch(g).value == popcount(brute_force(g))


# -- covers and exact solvers ----------------------------------------------------------

def test_odd_cycle_cover_examples():
    assert odd_cycle_cover(cycle(6)) == 0
    assert odd_cycle_cover(cycle(5)) == 0b11111
    assert popcount(odd_cycle_cover(disjoint_cycles(3, 3))) == 6


def test_exact_occ_examples():
    g = cycle(6)
    assert mis_exact_occ(g, 0).value == 3
    assert mis_exact_occ(cycle(5), [0]).value == 2
    with pytest.raises(ValueError):
        mis_exact_occ(disjoint_cycles(3, 3), [0])


def test_exact_cycle_nbhd_examples():
    assert mis_exact_cycle_nbhd(cycle(5), range(5)).value == 2
    g = complement(cycle(7))
    assert mis_exact_cycle_nbhd(g, shortest_odd_cycle(g)).value == popcount(brute_force(g)) == 2
    with pytest.raises(IocpViolation):
        mis_exact_cycle_nbhd(disjoint_cycles(5, 5), range(5))


def test_subexp_examples():
    g9 = complement(cycle(9))
    assert mis_subexp(g9).value == popcount(brute_force(g9)) == 2
    g = random_bipartite(random.Random(1), 15)
    assert mis_subexp(g).value == popcount(brute_force(g))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 5))
def test_weight_scaling_invariance(seed, scale):
    g = complement(intersection_graph(disk_instance(seed, 4, 12)))
    rng = random.Random(seed)
    w = [rng.randint(1, 9) for _ in range(g.n)]
    a = mis_subexp(g, w)
    b = mis_subexp(g, [scale * x for x in w])
    assert a.mask == b.mask and b.value == scale * a.value
    cover = odd_cycle_cover(g)
    c = mis_exact_occ(g, cover, [scale * x for x in w])
    assert c.value == b.value


def test_weighted_eptas_valid():
    rng = random.Random(3)
    for seed in range(10):
        g = complement(intersection_graph(disk_instance(seed, 8, 14)))
        w = [rng.randint(0, 5) for _ in range(g.n)]
        res = mis_eptas(g, derive_params(0.25, 0.25, s=2, t=20), seed=seed, weights=w)
        assert g.is_independent(res.mask)
        assert res.value == sum(w[v] for v in bits(res.mask))
        assert res.value >= 0.75 * sum(w[v] for v in bits(brute_force(g, "mis", w)))


def test_solve_result_json_shape():
    res = mis_subexp(cycle(5))
    out = res.to_json()
    assert set(out) >= {"value", "set", "trials", "paths", "seed"}
    assert to_mask(out["set"]) == res.mask
