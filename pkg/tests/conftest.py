"""Shared fixtures and helpers for the test suite."""

import numpy as np
import pytest

from tcim import DirectedGraph, ModelKind, exact_sigma
from tcim.rapg import RapgInstance


def random_small_graph(rng: np.random.Generator, n_max: int = 8,
                       m_max: int = 12, deterministic: bool = False) -> DirectedGraph:
    """Random directed graph with n <= n_max nodes and m <= m_max arcs."""
    n = int(rng.integers(3, n_max + 1))
    m = int(rng.integers(1, m_max + 1))
    arcs = set()
    for _ in range(m):
        u, v = rng.integers(0, n, size=2)
        if u != v:
            arcs.add((int(u), int(v)))
    if not arcs:
        arcs.add((0, 1))
    src, dst = zip(*sorted(arcs))
    if deterministic:
        prob = rng.choice([0.0, 1.0], size=len(src))
    else:
        prob = rng.choice([0.1, 0.3, 0.5, 0.8, 1.0], size=len(src))
    return DirectedGraph.from_edges(n, src, dst, prob)


def random_seed_sets(rng: np.random.Generator, n: int,
                     max_a: int = 2, max_b: int = 2) -> tuple[list[int], list[int]]:
    """Disjoint random (S_A, S_B), each nonempty when possible."""
    nodes = rng.permutation(n)
    ka = int(rng.integers(1, max_a + 1))
    kb = int(rng.integers(1, max_b + 1))
    ka = min(ka, n - 1)
    kb = min(kb, n - ka)
    return sorted(int(u) for u in nodes[:ka]), sorted(int(u) for u in nodes[ka:ka + kb])


def make_instance(root, nodes, dists, sa_flags, edges, d_a, coins=0) -> RapgInstance:
    """Hand-built instance for golden-value tests."""
    return RapgInstance(
        root=root,
        nodes=np.asarray(nodes, dtype=np.int64),
        dists=np.asarray(dists, dtype=np.int64),
        node_sa=np.asarray(sa_flags, dtype=np.uint8),
        edge_src=np.asarray([e[0] for e in edges], dtype=np.int64),
        edge_dst=np.asarray([e[1] for e in edges], dtype=np.int64),
        d_a=d_a,
        coin_count=coins,
    )


@pytest.fixture
def worked_example():
    """The six-node converging-paths instance with a distance-2 opponent
    seed; used for the golden score checks of all three models."""
    return make_instance(
        root=0,
        nodes=[0, 1, 2, 3, 4, 5],
        dists=[0, 1, 1, 2, 2, 2],
        sa_flags=[0, 0, 0, 1, 0, 0],
        edges=[(1, 0), (2, 0), (3, 1), (4, 1), (4, 2), (5, 2)],
        d_a=2,
        coins=6,
    )


def exact_evaluator(model: ModelKind, graph: DirectedGraph):
    """Noise-free spread evaluator with memoization, for baseline tests."""
    cache: dict[tuple, float] = {}

    def evaluate(sa, sb):
        key = (tuple(sorted(int(u) for u in sa)), tuple(sorted(int(u) for u in sb)))
        if key not in cache:
            cache[key] = exact_sigma(model, graph, key[0], key[1])
        return cache[key]

    return evaluate
