"""Model scoring: golden values, incremental updates, exact oracles."""

import itertools

import numpy as np
import pytest

from tcim import (ContractViolation, DirectedGraph, ModelKind, RngStream,
                  SizeGuardError, commit, exact_sigma, forward_simulate,
                  init_state, load_edge_list, marginal_gain, pool_scores,
                  sample_pool, score)
from tcim.rapg import InstancePool

from conftest import make_instance, random_small_graph, random_seed_sets

MODELS = list(ModelKind)


# ---------------------------------------------------------------------------
# golden worked example (converging two-hop paths, opponent seed at 3)
# ---------------------------------------------------------------------------

def test_golden_priority_model(worked_example):
    for u in (0, 1, 2, 4, 5):
        assert score(ModelKind.COICM, worked_example, [u]) == 1.0
    assert score(ModelKind.COICM, worked_example, [9]) == 0.0


def test_golden_distance_model(worked_example):
    assert score(ModelKind.DISTANCE, worked_example, [4, 5]) == pytest.approx(2 / 3, abs=1e-12)
    assert score(ModelKind.DISTANCE, worked_example, [4]) == pytest.approx(1 / 2, abs=1e-12)
    assert score(ModelKind.DISTANCE, worked_example, [5]) == pytest.approx(1 / 2, abs=1e-12)
    # closer than the opponent wins outright
    assert score(ModelKind.DISTANCE, worked_example, [1]) == 1.0


def test_golden_wave_model(worked_example):
    assert score(ModelKind.WAVE, worked_example, [4, 5]) == pytest.approx(3 / 4, abs=1e-12)
    assert score(ModelKind.WAVE, worked_example, [4]) == pytest.approx(3 / 4, abs=1e-12)
    assert score(ModelKind.WAVE, worked_example, [5]) == pytest.approx(1 / 2, abs=1e-12)
    # a seed strictly closer than the opponent wins the root outright
    assert score(ModelKind.WAVE, worked_example, [1]) == 1.0


def test_score_rejects_opponent_overlap(worked_example):
    for model in MODELS:
        with pytest.raises(ContractViolation):
            score(model, worked_example, [3])


def test_empty_seed_set_scores_zero(worked_example):
    for model in MODELS:
        assert score(model, worked_example, []) == 0.0
        assert init_state(model, worked_example).score == 0.0


def test_root_is_seed():
    inst = make_instance(root=2, nodes=[2], dists=[0], sa_flags=[0],
                         edges=[], d_a=5)
    for model in MODELS:
        assert score(model, inst, [2]) == 1.0


def test_distance_tie_at_root():
    # root itself is an opponent seed's tie layer: both seeds at distance 1
    inst = make_instance(root=0, nodes=[0, 1, 2], dists=[0, 1, 1],
                         sa_flags=[0, 1, 0], edges=[(1, 0), (2, 0)], d_a=1)
    assert score(ModelKind.DISTANCE, inst, [2]) == pytest.approx(0.5)
    assert score(ModelKind.COICM, inst, [2]) == 1.0  # priority tie-break
    assert score(ModelKind.WAVE, inst, [2]) == pytest.approx(0.5)


# ---------------------------------------------------------------------------
# incremental state == from-scratch score
# ---------------------------------------------------------------------------

def all_instances(rng, graphs=12, per_graph=15):
    out = []
    stream = RngStream(31, 0)
    sub = 0
    for _ in range(graphs):
        g = random_small_graph(rng)
        sa = [int(rng.integers(0, g.n))]
        pool = sample_pool(g, sa, stream, per_graph, start_sub=sub)
        sub += per_graph
        out.extend((g, sa, inst) for inst in pool)
    return out


@pytest.mark.parametrize("model", MODELS, ids=[m.value for m in MODELS])
def test_incremental_matches_scratch_randomized(model):
    rng = np.random.default_rng(17)
    cases = all_instances(rng)
    checked = 0
    for g, sa, inst in cases:
        eligible = [int(u) for u, f in zip(inst.nodes, inst.node_sa) if not f]
        outside = [u for u in range(g.n) if u not in set(sa)]
        for _ in range(4):
            seq = list(rng.permutation(outside))[:3]
            state = init_state(model, inst)
            running = 0.0
            for u in seq:
                gain = marginal_gain(model, inst, state, u)
                state = commit(model, inst, state, u)
                running += gain
                assert state.score == pytest.approx(
                    score(model, inst, state.committed), abs=1e-12)
                assert running == pytest.approx(state.score, abs=1e-12)
                checked += 1
    assert checked >= 300


def test_marginal_gain_contract_checks(worked_example):
    for model in MODELS:
        state = init_state(model, worked_example)
        state = commit(model, worked_example, state, 4)
        with pytest.raises(ContractViolation):
            marginal_gain(model, worked_example, state, 4)  # already committed
        with pytest.raises(ContractViolation):
            marginal_gain(model, worked_example, state, 3)  # opponent seed
        assert marginal_gain(model, worked_example, state, 77) == 0.0  # absent


# ---------------------------------------------------------------------------
# monotonicity and submodularity
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("model", MODELS, ids=[m.value for m in MODELS])
def test_monotone_submodular_exhaustive(model):
    rng = np.random.default_rng(8)
    stream = RngStream(64, 0)
    tested = 0
    for trial in range(60):
        # all-live graphs yield rich instances worth sweeping exhaustively
        n = int(rng.integers(4, 7))
        arcs = {(int(u), int(v)) for u, v in rng.integers(0, n, size=(12, 2))
                if u != v}
        src, dst = zip(*sorted(arcs))
        g = DirectedGraph.from_edges(n, src, dst, [1.0] * len(src))
        sa = [int(rng.integers(0, g.n))]
        inst = sample_pool(g, sa, stream, 1, start_sub=trial)[0]
        if len(inst) > 6:
            continue
        eligible = sorted(int(u) for u, f in zip(inst.nodes, inst.node_sa) if not f)
        subsets = []
        for r in range(len(eligible) + 1):
            subsets.extend(itertools.combinations(eligible, r))
        values = {s: score(model, inst, s) for s in subsets}
        for s1 in subsets:
            for s2 in subsets:
                if set(s1) <= set(s2):
                    assert values[s1] <= values[s2] + 1e-12  # monotone
                    for u in eligible:
                        if u in set(s2):
                            continue
                        g1 = values[tuple(sorted(set(s1) | {u}))] - values[s1]
                        g2 = values[tuple(sorted(set(s2) | {u}))] - values[s2]
                        assert g1 >= g2 - 1e-12  # submodular
                        tested += 1
    assert tested > 1000


# ---------------------------------------------------------------------------
# pooled scoring
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("model", MODELS, ids=[m.value for m in MODELS])
def test_pool_scores_match_scalar(model):
    rng = np.random.default_rng(23)
    for trial in range(10):
        g = random_small_graph(rng)
        sa, sb = random_seed_sets(rng, g.n)
        pool = sample_pool(g, sa, RngStream(trial, 0), 30)
        batch = pool_scores(pool, model, sb, g.n)
        for j, inst in enumerate(pool):
            assert batch[j] == pytest.approx(score(model, inst, sb), abs=1e-12)


# ---------------------------------------------------------------------------
# exact oracle and cascade simulation
# ---------------------------------------------------------------------------

def test_exact_sigma_single_edge():
    g = load_edge_list("0 1 0.5\n")
    for model in MODELS:
        assert exact_sigma(model, g, [], [0]) == pytest.approx(1.5)
        assert exact_sigma(model, g, [0], [1]) == pytest.approx(1.0)


def test_exact_sigma_contested_middle():
    # 0 -> 1 <- 2, deterministic edges, opponent at 0, we seed 2:
    # both sides reach node 1 simultaneously
    g = load_edge_list("0 1 1\n2 1 1\n")
    assert exact_sigma(ModelKind.COICM, g, [0], [2]) == pytest.approx(2.0)
    assert exact_sigma(ModelKind.DISTANCE, g, [0], [2]) == pytest.approx(1.5)
    assert exact_sigma(ModelKind.WAVE, g, [0], [2]) == pytest.approx(1.5)


def test_exact_sigma_two_hop_race():
    # opponent two hops away, we are one hop away: we always win the node
    g = load_edge_list("0 1 1\n1 2 1\n3 2 1\n")
    assert exact_sigma(ModelKind.COICM, g, [0], [3]) == pytest.approx(2.0)
    assert exact_sigma(ModelKind.DISTANCE, g, [0], [3]) == pytest.approx(2.0)


def test_exact_sigma_probability_weighting():
    g = load_edge_list("0 1 0.3\n0 2 0.7\n")
    for model in MODELS:
        assert exact_sigma(model, g, [], [0]) == pytest.approx(2.0)


def test_exact_sigma_guard():
    g = DirectedGraph.from_edges(
        30, list(range(29)), list(range(1, 30)), [0.5] * 29)
    with pytest.raises(SizeGuardError):
        exact_sigma(ModelKind.COICM, g, [], [0])


def test_exact_sigma_rejects_overlap():
    g = load_edge_list("0 1 0.5\n")
    with pytest.raises(ContractViolation):
        exact_sigma(ModelKind.COICM, g, [0], [0])


@pytest.mark.parametrize("model", MODELS, ids=[m.value for m in MODELS])
def test_forward_simulate_mean_matches_exact(model):
    rng = np.random.default_rng(5)
    for trial in range(4):
        g = random_small_graph(rng)
        sa, sb = random_seed_sets(rng, g.n)
        stream = RngStream(trial, 9)
        draws = np.array([forward_simulate(model, g, sa, sb, stream, draw=i)
                          for i in range(4000)])
        exact = exact_sigma(model, g, sa, sb)
        se = draws.std() / np.sqrt(len(draws)) + 1e-12
        assert abs(draws.mean() - exact) < 5 * se + 1e-9


def test_forward_simulate_deterministic_graph():
    g = load_edge_list("0 1 1\n1 2 1\n")
    for model in MODELS:
        assert forward_simulate(model, g, [], [0], RngStream(0, 0)) == 3.0
