"""Two-phase competitive seed selection.

Phase one estimates a lower bound on the optimal spread with adaptive
sampling (estimate_lb) and tightens it with a trial greedy solution
(refine_lb).  Phase two draws theta = ceil(lambda / LB) fresh instances
and runs lazy incremental greedy over them (node_selection).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolation
from .graph import DirectedGraph, NodeSet, as_node_array, restricted_edge_count
from .models import (ModelKind, _wave_score, commit, init_state,
                     marginal_gain, pool_scores)
from .rapg import InstancePool, pool_alphas, sample_pool
from .rng import RngStream

# RNG stream indices, one per pipeline phase
STREAM_ESTIMATE = 0
STREAM_REFINE = 1
STREAM_SELECT = 2


@dataclass(frozen=True)
class TcimParams:
    k: int
    epsilon: float
    ell: float
    model: ModelKind
    seed: int

    def __post_init__(self):
        if self.k < 1:
            raise ContractViolation("k must be >= 1")
        if not (0.0 < self.epsilon <= 1.0):
            raise ContractViolation("epsilon must lie in (0, 1]")
        if self.ell < 0.5:
            raise ContractViolation("ell must be >= 0.5")


@dataclass(frozen=True)
class TcimResult:
    seeds_B: NodeSet
    theta: int
    lb_estimate: float
    lb_refined: float
    spread_estimate: float
    instances_generated: int
    coins_total: int
    wall_times: dict[str, float] = field(default_factory=dict)
    peak_memory_estimate: int = 0


def lambda_main(n: int, k: int, ell: float, epsilon: float) -> float:
    """Sample-count constant (8+2eps) * n * (ell ln n + ln C(n,k) + ln 2) / eps^2."""
    if not (1 <= k <= n):
        raise ContractViolation("need 1 <= k <= n")
    if not (0.0 < epsilon <= 1.0):
        raise ContractViolation("epsilon must lie in (0, 1]")
    if ell < 0.5:
        raise ContractViolation("ell must be >= 0.5")
    ln_binom = sum(math.log(n - k + i) - math.log(i) for i in range(1, k + 1))
    return (8.0 + 2.0 * epsilon) * n * (ell * math.log(n) + ln_binom + math.log(2.0)) / epsilon**2


# ---------------------------------------------------------------------------
# incremental greedy machinery
# ---------------------------------------------------------------------------

class MarginalGainVector:
    """Per-node accumulated marginal gains over an instance pool.

    Maintains MG(u) = sum over instances of the gain of adding u to the
    current B seed set, updated incrementally after each commit.  Only
    instances where the committed node had strictly positive gain are
    touched: zero gain plus monotone submodular scores means no other
    node's gain in that instance can have changed.
    """

    def __init__(self, pool: InstancePool, model: ModelKind, n: int, s_a) -> None:
        self.pool = pool
        self.model = model
        self.n = n
        self.candidate = np.ones(n, dtype=bool)
        self.candidate[as_node_array(s_a)] = False
        self._states: dict[int, object] = {}
        self._insts: dict[int, object] = {}
        # slot lookup: which instance owns each pooled node slot, and the
        # slots of any given node id (sorted view)
        self._slot_inst = np.repeat(np.arange(len(pool)), np.diff(pool.node_indptr))
        self._order = np.argsort(pool.node_ids, kind="stable")
        self._sorted_ids = pool.node_ids[self._order]
        self.f_value = 0.0
        self.mg = self._init_gains()

    def _init_gains(self) -> np.ndarray:
        """Singleton gain of every node, accumulated over instances.

        A lone seed strictly closer to the root than the opponent scores 1
        under every model, so only opponent-tie-layer slots need per-slot
        evaluation (and none do for the priority model).
        """
        pool, model = self.pool, self.model
        elig = pool.node_sa == 0
        gains = np.zeros(len(pool.node_ids), dtype=np.float64)
        if model == ModelKind.COICM:
            gains[elig] = 1.0
        else:
            d_a_per = np.repeat(pool.d_a, np.diff(pool.node_indptr))
            gains[elig & (pool.node_dist < d_a_per)] = 1.0
            tie = elig & (pool.node_dist == d_a_per)
            if model == ModelKind.DISTANCE:
                n_a = np.add.reduceat(pool.node_sa.astype(np.int64),
                                      pool.node_indptr[:-1]) \
                    if len(pool) else np.zeros(0, np.int64)
                gains[tie] = 1.0 / (n_a[self._slot_inst[tie]] + 1.0)
            else:
                for slot in np.flatnonzero(tie):
                    inst = self._inst(int(self._slot_inst[slot]))
                    gains[slot] = _wave_score(
                        inst, (int(pool.node_ids[slot]),))
        mg = np.zeros(self.n, dtype=np.float64)
        np.add.at(mg, pool.node_ids, gains)
        return mg

    def _inst(self, j: int):
        inst = self._insts.get(j)
        if inst is None:
            inst = self._insts[j] = self.pool[j]
        return inst

    def _state(self, j: int):
        state = self._states.get(j)
        if state is None:
            state = self._states[j] = init_state(self.model, self._inst(j))
        return state

    def _instances_with(self, v: int) -> np.ndarray:
        lo, hi = np.searchsorted(self._sorted_ids, [v, v + 1])
        slots = self._order[lo:hi]
        slots = slots[self.pool.node_sa[slots] == 0]
        return self._slot_inst[slots]

    def pick(self) -> int:
        masked = np.where(self.candidate, self.mg, -np.inf)
        v = int(np.argmax(masked))  # argmax keeps the smallest id on ties
        if not self.candidate[v]:
            raise ContractViolation("fewer eligible nodes than the seed budget")
        return v

    def commit(self, v: int) -> float:
        gained = 0.0
        model = self.model
        for j in self._instances_with(v):
            j = int(j)
            inst = self._inst(j)
            state = self._state(j)
            delta_v = marginal_gain(model, inst, state, v)
            if delta_v <= 0.0:
                continue
            gained += delta_v
            new_state = commit(model, inst, state, v)
            for pos, u in enumerate(inst.nodes.tolist()):
                if inst.node_sa[pos] or u == v or not self.candidate[u]:
                    continue
                old = marginal_gain(model, inst, state, u)
                new = marginal_gain(model, inst, new_state, u)
                self.mg[u] += new - old
            self._states[j] = new_state
        self.candidate[v] = False
        self.f_value += gained
        return gained

    def audit(self, u: int) -> float:
        """From-scratch MG(u) for cross-checking the incremental value."""
        if not self.candidate[u]:
            raise ContractViolation(f"node {u} is not a candidate")
        return sum(marginal_gain(self.model, self._inst(int(j)),
                                 self._state(int(j)), u)
                   for j in self._instances_with(u))


def _greedy_coicm_fast(pool: InstancePool, s_a, k: int, n: int) -> tuple[NodeSet, float]:
    """Vectorized greedy for the priority-tie model, where each instance
    contributes exactly 1 once any eligible member is a B seed."""
    candidate = np.ones(n, dtype=bool)
    candidate[as_node_array(s_a)] = False
    elig = pool.node_sa == 0
    mg = np.bincount(pool.node_ids[elig], minlength=n).astype(np.float64)
    covered = np.zeros(len(pool), dtype=bool)
    slot_inst = np.repeat(np.arange(len(pool)), np.diff(pool.node_indptr))
    # stable sort on the narrowest dtype that holds the ids (fewer radix passes)
    keys = pool.node_ids
    if n <= 1 << 16:
        keys = keys.astype(np.uint16)
    elif n <= 1 << 31:
        keys = keys.astype(np.int32)
    order = np.argsort(keys, kind="stable")
    sorted_ids = pool.node_ids[order]
    picked: list[int] = []
    f_value = 0.0
    for _ in range(k):
        masked = np.where(candidate, mg, -np.inf)
        v = int(np.argmax(masked))
        if not candidate[v]:
            raise ContractViolation("fewer eligible nodes than the seed budget")
        lo, hi = np.searchsorted(sorted_ids, [v, v + 1])
        slots = order[lo:hi]
        slots = slots[elig[slots]]
        newly = np.unique(slot_inst[slots])
        newly = newly[~covered[newly]]
        if newly.size:
            covered[newly] = True
            f_value += float(newly.size)
            starts = pool.node_indptr[newly]
            ends = pool.node_indptr[newly + 1]
            lens = ends - starts
            idx = np.repeat(starts + lens - lens.cumsum(), lens) + np.arange(lens.sum())
            members = pool.node_ids[idx[elig[idx]]]
            np.subtract.at(mg, members, 1.0)
        candidate[v] = False
        picked.append(v)
    return NodeSet(picked), f_value


def greedy_select(instances, s_a, k: int, model: ModelKind, n: int,
                  fast: bool = True) -> tuple[NodeSet, float]:
    """k rounds of argmax over incrementally maintained marginal gains.

    Ties break toward the smallest node id.  Returns the seed set and
    F = sum of per-instance scores of the selected set.
    """
    pool = instances if isinstance(instances, InstancePool) \
        else InstancePool.from_instances(list(instances))
    if fast and model == ModelKind.COICM:
        return _greedy_coicm_fast(pool, s_a, k, n)
    mgv = MarginalGainVector(pool, model, n, s_a)
    picked = []
    for _ in range(k):
        v = mgv.pick()
        mgv.commit(v)
        picked.append(v)
    return NodeSet(picked), mgv.f_value


def node_selection(graph: DirectedGraph, s_a, k: int, theta: int,
                   model: ModelKind, stream: RngStream) -> tuple[NodeSet, float, InstancePool]:
    if theta < 1:
        raise ContractViolation("theta must be >= 1")
    pool = sample_pool(graph, s_a, stream, theta)
    seeds, f_value = greedy_select(pool, s_a, k, model, graph.n)
    return seeds, f_value, pool


# ---------------------------------------------------------------------------
# lower-bound phases
# ---------------------------------------------------------------------------

def estimate_lb(graph: DirectedGraph, s_a, k: int, model: ModelKind,
                ell: float, stream: RngStream) -> tuple[float, InstancePool]:
    """Adaptive-sampling estimate of a lower bound on the optimum.

    Round i draws c_i = ceil((6 ell ln n + 6 ln log2 n) * 2^i) fresh
    instances and stops at the first round whose statistic sum exceeds
    c_i / 2^i.  Every drawn instance is retained for reuse downstream.
    """
    n = graph.n
    if n < 2:
        raise ContractViolation("graph must have at least 2 nodes")
    m_prime = restricted_edge_count(graph, s_a)
    log2n = math.log2(n)
    rounds = int(math.floor(log2n)) - 1
    pools: list[InstancePool] = []
    drawn = 0
    lb = 1.0
    for i in range(1, rounds + 1):
        c_i = math.ceil((6.0 * ell * math.log(n) + 6.0 * math.log(log2n)) * 2**i)
        pool = sample_pool(graph, s_a, stream, c_i, start_sub=drawn)
        drawn += c_i
        pools.append(pool)
        s_i = float(pool_alphas(pool, graph, model, m_prime, k).sum())
        if s_i > c_i / 2**i:
            lb = n * s_i / (2.0 * c_i)
            break
    return lb, InstancePool.concatenate(pools)


def refine_lb(graph: DirectedGraph, s_a, k: int, lb_estimate: float,
              cached: InstancePool, epsilon: float, ell: float,
              model: ModelKind, stream: RngStream) -> tuple[float, InstancePool]:
    """Tighten the estimate with a trial greedy solution scored on a
    fresh sample of size theta' = ceil(lambda' / lb_estimate)."""
    if lb_estimate < 1.0:
        raise ContractViolation("lb_estimate must be >= 1")
    n = graph.n
    seeds_trial, _ = greedy_select(cached, s_a, k, model, n)
    eps_p = 5.0 * (ell * epsilon**2 / (ell + k)) ** (1.0 / 3.0)
    lam_p = (2.0 + eps_p) * ell * n * math.log(n) / eps_p**2
    theta_p = math.ceil(lam_p / lb_estimate)
    fresh = sample_pool(graph, s_a, stream, theta_p)
    f_value = n * float(pool_scores(fresh, model, seeds_trial, n).sum()) / theta_p
    return max(f_value / (1.0 + eps_p), lb_estimate), fresh


def tcim(graph: DirectedGraph, s_a, params: TcimParams) -> TcimResult:
    """Full pipeline: bound estimation, refinement, and final selection."""
    n = graph.n
    sa = as_node_array(s_a)
    if sa.size and (sa.min() < 0 or sa.max() >= n):
        raise ContractViolation("opponent seed outside [0, n)")
    if params.k > n - sa.size:
        raise ContractViolation(
            f"seed budget k={params.k} exceeds the {n - sa.size} eligible nodes")
    ell_p = params.ell + math.log(3.0) / math.log(n)
    times: dict[str, float] = {}

    t0 = time.perf_counter()
    lb_e, cached = estimate_lb(graph, sa, params.k, params.model, ell_p,
                               RngStream(params.seed, STREAM_ESTIMATE))
    times["estimate_lb"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    lb_r, refine_pool = refine_lb(graph, sa, params.k, lb_e, cached,
                                  params.epsilon, ell_p, params.model,
                                  RngStream(params.seed, STREAM_REFINE))
    times["refine_lb"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    lam = lambda_main(n, params.k, ell_p, params.epsilon)
    theta = math.ceil(lam / lb_r)
    seeds, f_value, select_pool = node_selection(
        graph, sa, params.k, theta, params.model,
        RngStream(params.seed, STREAM_SELECT))
    times["node_selection"] = time.perf_counter() - t0

    peak = max(cached.slot_bytes() + refine_pool.slot_bytes(),
               select_pool.slot_bytes())
    return TcimResult(
        seeds_B=seeds,
        theta=theta,
        lb_estimate=lb_e,
        lb_refined=lb_r,
        spread_estimate=n * f_value / theta,
        instances_generated=len(cached) + len(refine_pool) + len(select_pool),
        coins_total=cached.coin_total + refine_pool.coin_total + select_pool.coin_total,
        wall_times=times,
        peak_memory_estimate=peak,
    )
