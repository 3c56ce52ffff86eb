"""Comparison algorithms and brute-force oracles.

Monte-Carlo greedy (with and without lazy evaluation), a structural
degree heuristic, and exhaustive optimum search for tiny graphs.
"""

from __future__ import annotations

import heapq
import itertools
import math
import time
from dataclasses import dataclass, field

import numpy as np

from ._backend import kernels
from .errors import ContractViolation, SizeGuardError
from .graph import DirectedGraph, NodeSet, as_node_array
from .models import ModelKind, exact_sigma, forward_simulate, _check_disjoint
from .rng import RngStream


@dataclass(frozen=True)
class BaselineResult:
    seeds_B: NodeSet
    spread_estimate: float
    simulations_used: int
    wall_time: float = 0.0
    evaluations: int = 0


def estimate_sigma_mc(model: ModelKind, graph: DirectedGraph, s_a, s_b,
                      num_sims: int, stream: RngStream) -> float:
    """Mean B-influenced mass over num_sims independent cascade draws.

    Draw i uses substream i of the given stream, matching
    forward_simulate(..., draw=i) one for one.
    """
    if num_sims < 1:
        raise ContractViolation("num_sims must be >= 1")
    sa, sb = _check_disjoint(s_a, s_b)
    if sb.size == 0:
        return 0.0
    if model == ModelKind.COICM:
        out = kernels.simulate_coicm_batch(
            graph.n, graph.fwd_indptr, graph.fwd_dst, graph.fwd_prob,
            sa, sb, num_sims, stream.seed, stream.index, 0)
        return float(out.mean())
    return float(np.mean([forward_simulate(model, graph, sa, sb, stream, draw=i)
                          for i in range(num_sims)]))


def greedymc_min_r(n: int, k: int, ell: float, epsilon: float,
                   opt_lower: float) -> int:
    """Simulation count guaranteeing the greedy baseline's accuracy:
    ceil((8k^2 + 2k*eps) * n * ((ell+1) ln n + ln k) / (eps^2 * opt))."""
    if opt_lower < 1:
        raise ContractViolation("opt_lower must be >= 1")
    if k < 1 or n < 1:
        raise ContractViolation("need k >= 1 and n >= 1")
    if not (0.0 < epsilon <= 1.0):
        raise ContractViolation("epsilon must lie in (0, 1]")
    num = (8.0 * k * k + 2.0 * k * epsilon) * n * ((ell + 1.0) * math.log(n) + math.log(k))
    return math.ceil(num / (epsilon**2 * opt_lower))


def _quantize(gain: float) -> float:
    """Snap a marginal gain to a 1e-9 grid before comparisons.

    Exact spread values computed along different algebraic routes can
    disagree by a few ulps; quantizing keeps tie-breaking consistent
    between the plain and the lazy greedy.
    """
    return round(gain, 9)


def _mc_evaluator(model, graph, r, stream):
    counter = itertools.count()

    def evaluate(sa, sb):
        return estimate_sigma_mc(model, graph, sa, sb, r,
                                 stream.substream(next(counter)))

    return evaluate


def greedy_mc(model: ModelKind, graph: DirectedGraph, s_a, k: int, r: int,
              stream: RngStream, evaluator=None) -> BaselineResult:
    """Plain greedy: every round re-estimates the marginal spread of every
    candidate with r simulations.  `evaluator` overrides the Monte-Carlo
    estimate (used by tests to run noise-free)."""
    t0 = time.perf_counter()
    sa = as_node_array(s_a)
    candidates = sorted(set(range(graph.n)) - set(sa.tolist()))
    if len(candidates) < k:
        raise ContractViolation("fewer eligible nodes than the seed budget")
    sims = 0
    if evaluator is None:
        evaluator = _mc_evaluator(model, graph, r, stream)
    picked: list[int] = []
    cur_sigma = 0.0
    for _ in range(k):
        best_u, best_gain, best_abs = None, -math.inf, 0.0
        for u in candidates:
            if u in picked:
                continue
            val = evaluator(sa, picked + [u])
            sims += r
            gain = _quantize(val - cur_sigma)
            if gain > best_gain:  # strict: ties keep the smallest id
                best_u, best_gain, best_abs = u, gain, val
        picked.append(best_u)
        cur_sigma = best_abs
    return BaselineResult(NodeSet(picked), cur_sigma, sims,
                          time.perf_counter() - t0,
                          evaluations=sims // max(r, 1))


def celf(model: ModelKind, graph: DirectedGraph, s_a, k: int, r: int,
         stream: RngStream, plus_plus_flag: bool = False,
         evaluator=None) -> BaselineResult:
    """Lazy greedy: stale marginal gains are only re-evaluated when they
    top the heap.  With plus_plus_flag, each entry also carries the gain
    with respect to the previously selected node, reused when that node
    turns out to be the one just picked."""
    t0 = time.perf_counter()
    sa = as_node_array(s_a)
    candidates = sorted(set(range(graph.n)) - set(sa.tolist()))
    if len(candidates) < k:
        raise ContractViolation("fewer eligible nodes than the seed budget")
    sims = 0
    evals = 0
    if evaluator is None:
        evaluator = _mc_evaluator(model, graph, r, stream)

    def sigma(sb):
        nonlocal sims, evals
        sims += r
        evals += 1
        return evaluator(sa, sb)

    picked: list[int] = []
    cur_sigma = 0.0
    # heap entries: (-gain, node, round_of_validity, abs_spread,
    # assumed_prev_pick, gain_given_prev, abs_spread_given_prev).
    # abs_spread is the full sigma of picked+[node] at evaluation time; it
    # restores cur_sigma exactly on acceptance so the marginal-gain
    # arithmetic stays identical to the plain greedy's round after round.
    # The cached gain_given_prev is reusable only when assumed_prev_pick
    # turns out to be the node actually selected that round.
    heap = []
    for u in candidates:
        abs_u = sigma([u])
        heap.append((-_quantize(abs_u), u, 0, abs_u, -1, math.inf, 0.0))
    heapq.heapify(heap)
    for rnd in range(k):
        while True:
            neg_gain, u, valid, abs_sigma, prev_node, gain_prev, abs_prev = \
                heapq.heappop(heap)
            if valid == rnd:
                picked.append(u)
                cur_sigma = abs_sigma
                break
            if (plus_plus_flag and valid == rnd - 1
                    and prev_node == picked[-1] and not math.isinf(gain_prev)):
                heapq.heappush(heap, (-_quantize(gain_prev), u, rnd, abs_prev,
                                      -1, math.inf, 0.0))
                continue
            abs_u = sigma(picked + [u])
            gain = _quantize(abs_u - cur_sigma)
            prev_best = heap[0][1] if (plus_plus_flag and rnd < k - 1 and heap) else -1
            if prev_best >= 0 and prev_best != u:
                abs_next = sigma(picked + [prev_best, u])
                gain_next = abs_next - sigma(picked + [prev_best])
            else:
                prev_best, gain_next, abs_next = -1, math.inf, 0.0
            heapq.heappush(heap, (-gain, u, rnd, abs_u, prev_best,
                                  gain_next, abs_next))
    return BaselineResult(NodeSet(picked), cur_sigma, sims,
                          time.perf_counter() - t0, evaluations=evals)


def single_discount(graph: DirectedGraph, s_a, k: int) -> BaselineResult:
    """Structural heuristic: repeatedly take the node with the most
    outgoing edges toward still-unseeded targets.  No simulations."""
    t0 = time.perf_counter()
    sa = set(as_node_array(s_a).tolist())
    eligible = [u for u in range(graph.n) if u not in sa]
    if len(eligible) < k:
        raise ContractViolation("fewer eligible nodes than the seed budget")
    seeded = set(sa)
    picked: list[int] = []
    for _ in range(k):
        best_u, best_deg = None, -1
        for u in eligible:
            if u in seeded:
                continue
            deg = sum(1 for v in graph.out_edges(u)[0] if int(v) not in seeded)
            if deg > best_deg:
                best_u, best_deg = u, deg
        picked.append(best_u)
        seeded.add(best_u)
    return BaselineResult(NodeSet(picked), float("nan"), 0,
                          time.perf_counter() - t0)


def exhaustive_opt(model: ModelKind, graph: DirectedGraph, s_a,
                   k: int) -> tuple[NodeSet, float]:
    """Global optimum by enumerating every k-subset of eligible nodes
    against the exact influence oracle.  Tiny graphs only."""
    sa = set(as_node_array(s_a).tolist())
    eligible = sorted(set(range(graph.n)) - sa)
    if len(eligible) < k:
        raise ContractViolation("fewer eligible nodes than the seed budget")
    n_subsets = math.comb(len(eligible), k)
    if n_subsets > 100_000:
        raise SizeGuardError(f"{n_subsets} candidate subsets exceed the guard")
    if graph.m > 20:
        raise SizeGuardError(f"exact enumeration refused for m={graph.m} > 20")
    best_set, best_val = None, -1.0
    for combo in itertools.combinations(eligible, k):
        val = exact_sigma(model, graph, sorted(sa), combo)
        if val > best_val:
            best_set, best_val = combo, val
    return NodeSet(best_set), best_val
