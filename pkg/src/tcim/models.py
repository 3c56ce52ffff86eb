"""The three competitive propagation models and their scoring contract.

Each model scores an instance in [0, 1] (the chance its root ends up
influenced by B), supports O(1)-ish incremental marginal gains during
greedy selection, and can evaluate a full cascade on the graph for one
live-edge draw.  Ties between simultaneous A and B arrivals always
resolve in B's favor; this is a fixed constant of the package, not a
knob.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from ._backend import kernels
from .errors import ContractViolation, SizeGuardError
from .graph import DirectedGraph, as_node_array
from .rapg import InstancePool, RapgInstance, seed_mask
from .rng import RngStream


class ModelKind(enum.Enum):
    COICM = "coicm"
    DISTANCE = "distance"
    WAVE = "wave"

    @property
    def kernel_id(self) -> int:
        return {"coicm": 0, "distance": 1, "wave": 2}[self.value]


# ---------------------------------------------------------------------------
# per-instance scoring state
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CoicmState:
    covered: bool
    committed: frozenset = frozenset()

    @property
    def score(self) -> float:
        return 1.0 if self.covered else 0.0


@dataclass(frozen=True)
class DistanceState:
    d_a: int
    n_a: int
    n_b: int
    covered: bool
    committed: frozenset = frozenset()

    @property
    def score(self) -> float:
        if self.covered:
            return 1.0
        if self.n_b == 0:
            return 0.0
        return self.n_b / (self.n_a + self.n_b)


@dataclass(frozen=True)
class WaveState:
    p_root: float
    committed: frozenset = frozenset()

    @property
    def score(self) -> float:
        return self.p_root


ScoreState = CoicmState | DistanceState | WaveState


def _check_candidate(instance: RapgInstance, state: ScoreState, u: int) -> Optional[int]:
    """Contract checks shared by marginal_gain/commit.  Returns the
    position of u inside the instance, or None when u is absent."""
    if u in state.committed:
        raise ContractViolation(f"node {u} is already a B seed")
    pos = instance.position.get(u)
    if pos is not None and _fast(instance).sa[pos]:
        raise ContractViolation(f"node {u} belongs to the opponent seed set")
    return pos


class _FastView:
    """Plain-Python mirror of an instance for tight scoring loops.

    Instances are tiny (a handful of nodes), where list indexing beats
    numpy dispatch by an order of magnitude.
    """

    __slots__ = ("dists", "sa", "in_nbrs", "n_a", "size")

    def __init__(self, instance: RapgInstance):
        self.size = len(instance)
        self.dists = instance.dists.tolist()
        self.sa = instance.node_sa.tolist()
        self.n_a = sum(self.sa)
        self.in_nbrs: list[list[int]] = [[] for _ in range(self.size)]
        pos = instance.position
        for u, v in zip(instance.edge_src.tolist(), instance.edge_dst.tolist()):
            self.in_nbrs[pos[v]].append(pos[u])


def _fast(instance: RapgInstance) -> _FastView:
    view = getattr(instance, "_fastview", None)
    if view is None:
        view = _FastView(instance)
        object.__setattr__(instance, "_fastview", view)
    return view


def _wave_score(instance: RapgInstance, seeds_b) -> float:
    """Layerwise averaging over the instance's shortest-path structure."""
    position = instance.position
    b_pos = [position[u] for u in seeds_b if u in position]
    if not b_pos:
        return 0.0
    fv = _fast(instance)
    dists = fv.dists
    d_star = min(dists[p] for p in b_pos)
    if instance.d_a < d_star:
        d_star = instance.d_a
    if d_star == 0:  # the root itself is a seed
        return 1.0 if 0 in b_pos else 0.0
    # a single closer-than-opponent wave always wins, and every node on a
    # reached shortest path inherits probability 1
    if d_star < instance.d_a and len(b_pos) == 1:
        return 1.0
    size = fv.size
    reach = [False] * size
    prob = [0.0] * size
    for p in b_pos:
        if dists[p] == d_star:
            reach[p] = True
            prob[p] = 1.0
    sa = fv.sa
    for p in range(size):
        if sa[p] and dists[p] == d_star:
            reach[p] = True
    in_nbrs = fv.in_nbrs
    # nodes are layer-ordered, so a reverse walk is a downward layer sweep;
    # instance edges always join adjacent layers
    for p in range(size - 1, -1, -1):
        if dists[p] >= d_star:
            continue
        total, cnt = 0.0, 0
        for q in in_nbrs[p]:
            if reach[q]:
                total += prob[q]
                cnt += 1
        if cnt:
            reach[p] = True
            prob[p] = total / cnt
    return prob[0] if reach[0] else 0.0


def score(model: ModelKind, instance: RapgInstance, seeds_b) -> float:
    """Full (from-scratch) score of a B seed set on one instance."""
    bs = frozenset(int(u) for u in seeds_b)
    for u in bs:
        pos = instance.position.get(u)
        if pos is not None and instance.node_sa[pos]:
            raise ContractViolation(f"B seed {u} overlaps the opponent seed set")
    if model == ModelKind.COICM:
        return 1.0 if any(u in instance.position for u in bs) else 0.0
    if model == ModelKind.DISTANCE:
        b_dists = [instance.dists[instance.position[u]]
                   for u in bs if u in instance.position]
        if not b_dists:
            return 0.0
        d_b = min(b_dists)
        if d_b < instance.d_a:
            return 1.0
        n_b = sum(1 for d in b_dists if d == instance.d_a)
        return n_b / (_fast(instance).n_a + n_b)
    return _wave_score(instance, bs)


def init_state(model: ModelKind, instance: RapgInstance) -> ScoreState:
    """State representing an empty B seed set (score 0)."""
    if model == ModelKind.COICM:
        return CoicmState(covered=False)
    if model == ModelKind.DISTANCE:
        return DistanceState(d_a=instance.d_a, n_a=_fast(instance).n_a,
                             n_b=0, covered=False)
    return WaveState(p_root=0.0)


def marginal_gain(model: ModelKind, instance: RapgInstance,
                  state: ScoreState, u: int) -> float:
    pos = _check_candidate(instance, state, u)
    if pos is None:
        return 0.0
    if model == ModelKind.COICM:
        return 0.0 if state.covered else 1.0
    if model == ModelKind.DISTANCE:
        if state.covered:
            return 0.0
        if _fast(instance).dists[pos] < state.d_a:
            return 1.0 - state.score
        return (state.n_b + 1) / (state.n_a + state.n_b + 1) - state.score
    return _wave_score(instance, state.committed | {u}) - state.p_root


def commit(model: ModelKind, instance: RapgInstance,
           state: ScoreState, u: int) -> ScoreState:
    pos = _check_candidate(instance, state, u)
    committed = state.committed | {u}
    if pos is None:
        return replace(state, committed=committed)
    if model == ModelKind.COICM:
        return CoicmState(covered=True, committed=committed)
    if model == ModelKind.DISTANCE:
        if state.covered:
            return replace(state, committed=committed)
        if _fast(instance).dists[pos] < state.d_a:
            return replace(state, covered=True, committed=committed)
        return replace(state, n_b=state.n_b + 1, committed=committed)
    return WaveState(p_root=_wave_score(instance, committed), committed=committed)


# ---------------------------------------------------------------------------
# batch scoring over pooled instances
# ---------------------------------------------------------------------------

def pool_scores(pool: InstancePool, model: ModelKind, seeds_b, n: int) -> np.ndarray:
    """Score every instance in the pool against a fixed B seed set."""
    if len(pool) == 0:
        return np.empty(0, dtype=np.float64)
    in_b = np.zeros(n, dtype=bool)
    in_b[as_node_array(seeds_b)] = True
    if model == ModelKind.WAVE:
        return np.asarray([_wave_score(inst, frozenset(
            int(u) for u in inst.nodes[in_b[inst.nodes]])) for inst in pool])
    member_b = in_b[pool.node_ids] & (pool.node_sa == 0)
    starts = pool.node_indptr[:-1]
    if model == ModelKind.COICM:
        hits = np.add.reduceat(member_b.astype(np.int64), starts)
        return (hits > 0).astype(np.float64)
    big = np.int64(np.iinfo(np.int64).max)
    d_b = np.minimum.reduceat(np.where(member_b, pool.node_dist, big), starts)
    n_a = np.add.reduceat(pool.node_sa.astype(np.int64), starts)
    d_a_per_node = np.repeat(pool.d_a, np.diff(pool.node_indptr))
    n_b = np.add.reduceat(
        (member_b & (pool.node_dist == d_a_per_node)).astype(np.int64), starts)
    out = np.zeros(len(pool), dtype=np.float64)
    win = d_b < pool.d_a
    out[win] = 1.0
    tie = (~win) & (n_b > 0)
    out[tie] = n_b[tie] / (n_a[tie] + n_b[tie])
    return out


# ---------------------------------------------------------------------------
# cascades on the full graph
# ---------------------------------------------------------------------------

def _check_disjoint(seeds_a, seeds_b) -> tuple[np.ndarray, np.ndarray]:
    sa = as_node_array(seeds_a)
    sb = as_node_array(seeds_b)
    if np.intersect1d(sa, sb).size:
        raise ContractViolation("seed sets for the two sources overlap")
    return sa, sb


def forward_simulate(model: ModelKind, graph: DirectedGraph, seeds_a, seeds_b,
                     stream: RngStream, draw: int = 0) -> float:
    """B-influenced mass for one live-edge draw (substream `draw`).

    The cascade outcome is returned as the expected mass given the draw:
    an integer count under COICM, a fractional sum for the other models.
    """
    sa, sb = _check_disjoint(seeds_a, seeds_b)
    if model == ModelKind.COICM:
        out = kernels.simulate_coicm_batch(
            graph.n, graph.fwd_indptr, graph.fwd_dst, graph.fwd_prob,
            sa, sb, 1, stream.seed, stream.index, draw)
        return float(out[0])
    active = kernels.sample_active_edges(
        graph.m, graph.fwd_prob, stream.seed, stream.index, draw)
    return _mass_given_active(model, graph, active, sa, sb)


def _mass_given_active(model: ModelKind, graph: DirectedGraph, active,
                       sa: np.ndarray, sb: np.ndarray) -> float:
    return float(kernels.b_mass_active(
        model.kernel_id, graph.n, graph.fwd_indptr, graph.fwd_dst,
        graph.rev_indptr, graph.rev_src, graph.rev_fwd_edge,
        active, seed_mask(graph.n, sa), seed_mask(graph.n, sb)))


def exact_sigma(model: ModelKind, graph: DirectedGraph, seeds_a, seeds_b,
                max_edges: int = 20) -> float:
    """Exact expected B influence by enumerating every live-edge set.

    Deterministic edges (p = 0 or 1) are fixed; the remaining ones are
    enumerated exhaustively, so this is limited to tiny graphs.
    """
    sa, sb = _check_disjoint(seeds_a, seeds_b)
    if graph.m > max_edges:
        raise SizeGuardError(f"exact enumeration refused for m={graph.m} > {max_edges}")
    prob = graph.fwd_prob
    free = np.flatnonzero((prob > 0.0) & (prob < 1.0))
    base = (prob >= 1.0).astype(np.uint8)
    total = 0.0
    for mask in range(1 << len(free)):
        active = base.copy()
        weight = 1.0
        for i, e in enumerate(free):
            if mask >> i & 1:
                active[e] = 1
                weight *= prob[e]
            else:
                weight *= 1.0 - prob[e]
        total += weight * _mass_given_active(model, graph, active, sa, sb)
    return total
