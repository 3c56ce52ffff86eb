"""Sampling of reverse instances and their lower-bound statistics.

An instance is the result of a randomized reverse breadth-first search
from a uniformly random root, truncated once the first opponent seed
layer completes.  Instances are stored in pooled flat arrays (layer
order) so batch scoring is a vectorized pass.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Sequence

import numpy as np

from ._backend import kernels
from .errors import ContractViolation
from .graph import DirectedGraph, as_node_array
from .rng import RngStream

# incremented whenever a width value had to be clamped to m' (diagnostic)
width_clamp_events = 0


@dataclass(frozen=True)
class RapgInstance:
    """One sampled reverse instance."""

    root: int
    nodes: np.ndarray      # int64, layer-ordered, nodes[0] == root
    dists: np.ndarray      # int64, hop count to root inside the instance
    node_sa: np.ndarray    # uint8, opponent-seed flag per node
    edge_src: np.ndarray   # int64, edge source (one hop farther from root)
    edge_dst: np.ndarray   # int64, edge target
    d_a: int               # opponent seed distance; n+1 sentinel = unreachable
    coin_count: int

    @cached_property
    def position(self) -> dict[int, int]:
        return {int(u): i for i, u in enumerate(self.nodes)}

    def dist_of(self, u: int) -> int | None:
        i = self.position.get(u)
        return None if i is None else int(self.dists[i])

    def __len__(self) -> int:
        return len(self.nodes)


class InstancePool:
    """A batch of instances in contiguous arrays."""

    def __init__(self, roots, d_a, coins, node_indptr, node_ids, node_dist,
                 node_sa, edge_indptr, edge_src, edge_dst):
        self.roots = roots
        self.d_a = d_a
        self.coins = coins
        self.node_indptr = node_indptr
        self.node_ids = node_ids
        self.node_dist = node_dist
        self.node_sa = node_sa
        self.edge_indptr = edge_indptr
        self.edge_src = edge_src
        self.edge_dst = edge_dst

    def __len__(self) -> int:
        return len(self.roots)

    def __getitem__(self, j: int) -> RapgInstance:
        ns, ne = self.node_indptr[j], self.node_indptr[j + 1]
        es, ee = self.edge_indptr[j], self.edge_indptr[j + 1]
        return RapgInstance(
            root=int(self.roots[j]),
            nodes=self.node_ids[ns:ne],
            dists=self.node_dist[ns:ne],
            node_sa=self.node_sa[ns:ne],
            edge_src=self.edge_src[es:ee],
            edge_dst=self.edge_dst[es:ee],
            d_a=int(self.d_a[j]),
            coin_count=int(self.coins[j]),
        )

    def __iter__(self) -> Iterator[RapgInstance]:
        return (self[j] for j in range(len(self)))

    @property
    def coin_total(self) -> int:
        return int(self.coins.sum())

    def slot_bytes(self) -> int:
        """Deterministic storage estimate: 8-byte slots for node ids,
        distances, and both edge endpoints."""
        return 16 * len(self.node_ids) + 16 * len(self.edge_src)

    @staticmethod
    def from_instances(instances: Sequence[RapgInstance]) -> "InstancePool":
        count = len(instances)
        node_indptr = np.zeros(count + 1, dtype=np.int64)
        edge_indptr = np.zeros(count + 1, dtype=np.int64)
        for j, inst in enumerate(instances):
            node_indptr[j + 1] = node_indptr[j] + len(inst.nodes)
            edge_indptr[j + 1] = edge_indptr[j] + len(inst.edge_src)
        cat = np.concatenate
        return InstancePool(
            roots=np.asarray([i.root for i in instances], dtype=np.int64),
            d_a=np.asarray([i.d_a for i in instances], dtype=np.int64),
            coins=np.asarray([i.coin_count for i in instances], dtype=np.int64),
            node_indptr=node_indptr,
            node_ids=cat([i.nodes for i in instances]) if count else np.empty(0, np.int64),
            node_dist=cat([i.dists for i in instances]) if count else np.empty(0, np.int64),
            node_sa=cat([i.node_sa for i in instances]) if count else np.empty(0, np.uint8),
            edge_indptr=edge_indptr,
            edge_src=cat([i.edge_src for i in instances]) if count else np.empty(0, np.int64),
            edge_dst=cat([i.edge_dst for i in instances]) if count else np.empty(0, np.int64),
        )

    @staticmethod
    def concatenate(pools: Sequence["InstancePool"]) -> "InstancePool":
        pools = [p for p in pools if len(p)]
        if not pools:
            return _empty_pool()
        cat = np.concatenate

        def join_indptr(name):
            parts = [getattr(pools[0], name)]
            for p in pools[1:]:
                parts.append(getattr(p, name)[1:] + parts[-1][-1])
            return cat(parts)

        return InstancePool(
            roots=cat([p.roots for p in pools]),
            d_a=cat([p.d_a for p in pools]),
            coins=cat([p.coins for p in pools]),
            node_indptr=join_indptr("node_indptr"),
            node_ids=cat([p.node_ids for p in pools]),
            node_dist=cat([p.node_dist for p in pools]),
            node_sa=cat([p.node_sa for p in pools]),
            edge_indptr=join_indptr("edge_indptr"),
            edge_src=cat([p.edge_src for p in pools]),
            edge_dst=cat([p.edge_dst for p in pools]),
        )


def _empty_pool() -> InstancePool:
    z = np.empty(0, dtype=np.int64)
    return InstancePool(z, z, z, np.zeros(1, np.int64), z, z,
                        np.empty(0, np.uint8), np.zeros(1, np.int64), z, z)


def seed_mask(n: int, seeds) -> np.ndarray:
    arr = as_node_array(seeds)
    if arr.size and (arr.min() < 0 or arr.max() >= n):
        raise ContractViolation("seed node outside [0, n)")
    mask = np.zeros(n, dtype=np.uint8)
    mask[arr] = 1
    return mask


def sample_pool(graph: DirectedGraph, seeds_a, stream: RngStream,
                count: int, start_sub: int = 0) -> InstancePool:
    """Sample `count` instances; instance j uses substream start_sub+j."""
    sa = seed_mask(graph.n, seeds_a)
    out = kernels.sample_rapg_pool(
        graph.n, graph.rev_indptr, graph.rev_src, graph.rev_prob, sa,
        count, stream.seed, stream.index, start_sub)
    return InstancePool(*out)


def sample_rapg(graph: DirectedGraph, seeds_a, stream: RngStream) -> RapgInstance:
    """Sample a single instance (reproducible from the stream identity)."""
    return sample_pool(graph, seeds_a, stream, 1)[0]


def _fully_covering_mask(pool: InstancePool, model) -> np.ndarray:
    """Mask over pooled node slots: nodes whose singleton score is 1."""
    from .models import ModelKind  # local import to avoid a cycle
    elig = pool.node_sa == 0
    if model == ModelKind.COICM:
        return elig
    d_a_per_node = np.repeat(pool.d_a, np.diff(pool.node_indptr))
    return elig & (pool.node_dist < d_a_per_node)


def pool_widths(pool: InstancePool, graph: DirectedGraph, model) -> np.ndarray:
    """Width per instance: full-graph in-degree summed over the nodes
    that would be fully covering if picked as the sole B seed."""
    mask = _fully_covering_mask(pool, model)
    vals = np.where(mask, graph.in_degree[pool.node_ids], 0).astype(np.float64)
    if len(pool) == 0:
        return np.empty(0, dtype=np.int64)
    widths = np.add.reduceat(vals, pool.node_indptr[:-1])
    widths[np.diff(pool.node_indptr) == 0] = 0.0
    return widths.astype(np.int64)


def rapg_width(instance: RapgInstance, graph: DirectedGraph, model) -> int:
    return int(pool_widths(InstancePool.from_instances([instance]), graph, model)[0])


def alpha(width: int, m_prime: int, k: int) -> float:
    """Per-instance lower-bound statistic 1 - (1 - w/m')^k."""
    global width_clamp_events
    if k < 1:
        raise ContractViolation("k must be >= 1")
    if width < 0:
        raise ContractViolation("width must be >= 0")
    if m_prime <= 0:
        return 0.0
    if width > m_prime:
        width_clamp_events += 1
        width = m_prime
    return 1.0 - (1.0 - width / m_prime) ** k


def pool_alphas(pool: InstancePool, graph: DirectedGraph, model,
                m_prime: int, k: int) -> np.ndarray:
    global width_clamp_events
    widths = pool_widths(pool, graph, model)
    if m_prime <= 0:
        return np.zeros(len(pool), dtype=np.float64)
    clamped = widths > m_prime
    if clamped.any():
        width_clamp_events += int(clamped.sum())
        widths = np.minimum(widths, m_prime)
    return 1.0 - (1.0 - widths / m_prime) ** k
