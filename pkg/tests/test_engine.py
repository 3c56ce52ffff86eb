"""Two-phase pipeline: sample-count formulas, bounds, greedy selection."""

import itertools
import math

import numpy as np
import pytest

from tcim import (ContractViolation, DirectedGraph, MarginalGainVector,
                  ModelKind, RngStream, TcimParams, estimate_lb, greedy_select,
                  lambda_main, load_edge_list, node_selection, refine_lb,
                  sample_pool, score, tcim)
from tcim.engine import STREAM_ESTIMATE, STREAM_REFINE, _greedy_coicm_fast
from tcim.rapg import InstancePool

from conftest import make_instance, random_small_graph

MODELS = list(ModelKind)


# ---------------------------------------------------------------------------
# sample-count formulas
# ---------------------------------------------------------------------------

def test_lambda_main_frozen_value():
    # n=2, k=1, ell=1, eps=1: 10 * 2 * (ln2 + ln2 + ln2) / 1 = 60 ln 2
    assert lambda_main(2, 1, 1.0, 1.0) == pytest.approx(60 * math.log(2), rel=1e-12)


def test_lambda_main_k_equals_n():
    # binomial term vanishes when k = n
    n = 7
    expected = 10.0 * n * (math.log(n) + math.log(2))
    assert lambda_main(n, n, 1.0, 1.0) == pytest.approx(expected, rel=1e-12)


def test_lambda_main_epsilon_scaling():
    lo = lambda_main(50, 3, 1.0, 0.1)
    hi = lambda_main(50, 3, 1.0, 0.2)
    assert lo / hi == pytest.approx((8.2 / 8.4) * 4, rel=1e-12)


def test_lambda_main_binomial_is_overflow_safe():
    val = lambda_main(10**6, 500, 1.0, 0.5)
    assert math.isfinite(val) and val > 0


def test_lambda_main_domain_checks():
    with pytest.raises(ContractViolation):
        lambda_main(5, 0, 1.0, 0.5)
    with pytest.raises(ContractViolation):
        lambda_main(5, 6, 1.0, 0.5)
    with pytest.raises(ContractViolation):
        lambda_main(5, 1, 1.0, 1.5)
    with pytest.raises(ContractViolation):
        lambda_main(5, 1, 0.2, 0.5)


# ---------------------------------------------------------------------------
# lower-bound phases
# ---------------------------------------------------------------------------

def cycle_graph(n: int, p: float = 1.0) -> DirectedGraph:
    src = list(range(n))
    dst = [(u + 1) % n for u in src]
    return DirectedGraph.from_edges(n, src, dst, [p] * n)


def test_estimate_lb_saturated_statistic():
    # deterministic cycle, no opponent: every instance spans the graph and
    # its statistic is exactly 1, so round 1 fires with lb = n/2
    g = cycle_graph(4)
    for model in MODELS:
        lb, cached = estimate_lb(g, [], 1, model, 1.0, RngStream(3, STREAM_ESTIMATE))
        assert lb == pytest.approx(g.n / 2)
        assert len(cached) >= 1


def test_estimate_lb_all_dead_edges_falls_through():
    g = cycle_graph(8, p=0.0)
    lb, cached = estimate_lb(g, [], 1, ModelKind.COICM, 1.0, RngStream(1, 0))
    assert lb == 1.0
    # every round was exhausted and every instance retained
    log2n = math.log2(8)
    expected = sum(math.ceil((6 * math.log(8) + 6 * math.log(log2n)) * 2**i)
                   for i in (1, 2))
    assert len(cached) == expected


def test_estimate_lb_tiny_graph_returns_one():
    g = cycle_graph(3)
    lb, cached = estimate_lb(g, [], 1, ModelKind.COICM, 1.0, RngStream(0, 0))
    assert lb == 1.0
    assert len(cached) == 0  # no rounds run below n = 4


def test_refine_lb_epsilon_prime_frozen_value():
    # k = ell = 1, eps = 1: eps' = 5 * (1/2)^(1/3)
    eps_p = 5.0 * (1.0 * 1.0 / 2.0) ** (1 / 3)
    assert eps_p == pytest.approx(3.968502629920499)


def test_refine_lb_max_rule_and_growth():
    g = cycle_graph(6, p=0.5)
    for model in MODELS:
        lb_e, cached = estimate_lb(g, [0], 1, model, 1.0, RngStream(11, 0))
        lb_r, fresh = refine_lb(g, [0], 1, lb_e, cached, 0.5, 1.0, model,
                                RngStream(11, STREAM_REFINE))
        assert lb_r >= lb_e
        assert len(fresh) >= 1
    with pytest.raises(ContractViolation):
        refine_lb(g, [0], 1, 0.5, cached, 0.5, 1.0, ModelKind.COICM,
                  RngStream(11, 1))


# ---------------------------------------------------------------------------
# greedy selection
# ---------------------------------------------------------------------------

def singleton_instance(u: int):
    return make_instance(root=u, nodes=[u], dists=[0], sa_flags=[0],
                         edges=[], d_a=99, coins=0)


def test_greedy_single_instance():
    for model in MODELS:
        seeds, f = greedy_select([singleton_instance(4)], [], 1, model, n=6)
        assert seeds == {4}
        assert f == 1.0


def test_greedy_two_disjoint_instances():
    insts = [singleton_instance(2), singleton_instance(5)]
    for model in MODELS:
        seeds, f = greedy_select(insts, [], 2, model, n=6)
        assert seeds == {2, 5}
        assert f == 2.0
        # equal first-round gains: tie breaks toward the smaller id
        assert list(seeds)[0] == 2


def test_greedy_requires_enough_candidates():
    with pytest.raises(ContractViolation):
        greedy_select([singleton_instance(1)], [0, 2], 2, ModelKind.COICM, n=3)


def random_pool(rng, graph, count, seed, sa):
    return sample_pool(graph, sa, RngStream(seed, 0), count)


@pytest.mark.parametrize("model", MODELS, ids=[m.value for m in MODELS])
def test_greedy_bound_against_brute_force(model):
    rng = np.random.default_rng(100)
    for trial in range(25):
        g = random_small_graph(rng)
        sa = [int(rng.integers(0, g.n))]
        pool = sample_pool(g, sa, RngStream(trial, 0), int(rng.integers(2, 11)))
        k = int(rng.integers(1, 3))
        eligible = sorted(set(range(g.n)) - set(sa))
        if len(eligible) < k:
            continue
        seeds, f_greedy = greedy_select(pool, sa, k, model, g.n)
        best = max(sum(score(model, inst, combo) for inst in pool)
                   for combo in itertools.combinations(eligible, k))
        assert f_greedy >= (1 - 1 / math.e) * best - 1e-9
        check = sum(score(model, inst, sorted(seeds.as_set())) for inst in pool)
        assert f_greedy == pytest.approx(check, abs=1e-9)


def test_coicm_fast_path_matches_generic():
    rng = np.random.default_rng(55)
    for trial in range(20):
        g = random_small_graph(rng)
        sa = [int(rng.integers(0, g.n))]
        pool = sample_pool(g, sa, RngStream(trial, 2), 40)
        k = min(2, g.n - 1)
        fast = greedy_select(pool, sa, k, ModelKind.COICM, g.n, fast=True)
        slow = greedy_select(pool, sa, k, ModelKind.COICM, g.n, fast=False)
        assert fast[0].as_set() == slow[0].as_set()
        assert fast[1] == pytest.approx(slow[1], abs=1e-9)


@pytest.mark.parametrize("model", MODELS, ids=[m.value for m in MODELS])
def test_marginal_gain_vector_audit(model):
    """Incremental MG equals from-scratch recomputation at every round."""
    rng = np.random.default_rng(7)
    for trial in range(20):
        g = random_small_graph(rng)
        sa = [int(rng.integers(0, g.n))]
        pool = sample_pool(g, sa, RngStream(trial, 1), 25)
        mgv = MarginalGainVector(pool, model, g.n, sa)
        k = min(3, g.n - 1)
        for _ in range(k):
            audit_nodes = [u for u in range(g.n) if mgv.candidate[u]]
            for u in audit_nodes:
                assert mgv.mg[u] == pytest.approx(mgv.audit(u), abs=1e-9)
            v = mgv.pick()
            mgv.commit(v)


# ---------------------------------------------------------------------------
# node selection and full pipeline
# ---------------------------------------------------------------------------

def test_node_selection_determinism_and_theta_one():
    g = cycle_graph(5, p=0.7)
    for model in MODELS:
        s1, f1, pool1 = node_selection(g, [0], 2, 50, model, RngStream(8, 2))
        s2, f2, pool2 = node_selection(g, [0], 2, 50, model, RngStream(8, 2))
        assert s1.as_set() == s2.as_set() and f1 == f2
        s3, f3, pool3 = node_selection(g, [0], 1, 1, model, RngStream(8, 2))
        assert len(s3) == 1 and len(pool3) == 1
    with pytest.raises(ContractViolation):
        node_selection(g, [0], 1, 0, ModelKind.COICM, RngStream(8, 2))


def test_tcim_result_invariants():
    g = load_edge_list("0 1 0.6\n1 2 0.6\n2 3 0.6\n3 0 0.6\n0 2 0.4\n4 0 0.8\n4 3 0.5\n")
    for model in MODELS:
        params = TcimParams(k=2, epsilon=0.5, ell=1.0, model=model, seed=21)
        res = tcim(g, [3], params)
        assert len(res.seeds_B) == 2
        assert 3 not in res.seeds_B
        assert res.lb_refined >= res.lb_estimate
        ell_p = 1.0 + math.log(3) / math.log(g.n)
        lam = lambda_main(g.n, 2, ell_p, 0.5)
        assert res.theta == math.ceil(lam / res.lb_refined)
        assert res.spread_estimate >= 0
        assert res.instances_generated >= res.theta
        assert res.coins_total >= 0
        assert set(res.wall_times) == {"estimate_lb", "refine_lb", "node_selection"}
        assert res.peak_memory_estimate > 0


def test_tcim_only_eligible_node():
    g = cycle_graph(4, p=0.5)
    params = TcimParams(k=1, epsilon=0.5, ell=1.0, model=ModelKind.COICM, seed=1)
    res = tcim(g, [0, 1, 2], params)
    assert res.seeds_B == {3}


def test_tcim_budget_guard():
    g = cycle_graph(4, p=0.5)
    params = TcimParams(k=2, epsilon=0.5, ell=1.0, model=ModelKind.COICM, seed=1)
    with pytest.raises(ContractViolation):
        tcim(g, [0, 1, 2], params)


def test_tcim_params_validation():
    for bad in (dict(k=0), dict(epsilon=0.0), dict(epsilon=1.2), dict(ell=0.4)):
        kwargs = dict(k=1, epsilon=0.5, ell=1.0, model=ModelKind.COICM, seed=0)
        kwargs.update(bad)
        with pytest.raises(ContractViolation):
            TcimParams(**kwargs)


def test_tcim_reproducible():
    g = cycle_graph(6, p=0.6)
    for model in MODELS:
        params = TcimParams(k=2, epsilon=0.5, ell=1.0, model=model, seed=77)
        r1 = tcim(g, [5], params)
        r2 = tcim(g, [5], params)
        assert r1.seeds_B.as_set() == r2.seeds_B.as_set()
        assert r1.theta == r2.theta
        assert r1.lb_estimate == r2.lb_estimate
        assert r1.lb_refined == r2.lb_refined
        assert r1.spread_estimate == r2.spread_estimate


def test_phase_streams_are_isolated():
    # the two bound phases and node selection consume distinct stream
    # indices, so their first instances differ in general
    g = cycle_graph(8, p=0.5)
    p0 = sample_pool(g, [], RngStream(5, STREAM_ESTIMATE), 10)
    p1 = sample_pool(g, [], RngStream(5, STREAM_REFINE), 10)
    assert not np.array_equal(p0.roots, p1.roots)


def test_theta_monotone_in_lb():
    lam = lambda_main(100, 5, 1.0, 0.5)
    thetas = [math.ceil(lam / lb) for lb in (1.0, 2.0, 10.0, 50.0)]
    assert thetas == sorted(thetas, reverse=True)
