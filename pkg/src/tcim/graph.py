"""Immutable directed graphs with per-edge probabilities.

Adjacency is stored twice (CSR in both directions) because instance
sampling is dominated by reverse traversal while cascade simulation is
forward-dominant.  `rev_fwd_edge` maps every reverse-adjacency slot to
its forward edge id so that a single per-edge array (probabilities,
live-edge masks) serves both directions.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator

import numpy as np

from .errors import ContractViolation, EdgeListParseError


class NodeSet:
    """Ordered set of node ids with O(1) membership tests."""

    __slots__ = ("_order", "_members")

    def __init__(self, nodes: Iterable[int] = ()):
        self._order: list[int] = []
        self._members: set[int] = set()
        for u in nodes:
            self.add(int(u))

    def add(self, u: int) -> None:
        if u not in self._members:
            self._members.add(u)
            self._order.append(u)

    def __contains__(self, u: int) -> bool:
        return u in self._members

    def __iter__(self) -> Iterator[int]:
        return iter(self._order)

    def __len__(self) -> int:
        return len(self._order)

    def __eq__(self, other) -> bool:
        if isinstance(other, NodeSet):
            return self._members == other._members
        if isinstance(other, (set, frozenset)):
            return self._members == other
        return NotImplemented

    def __repr__(self) -> str:
        return f"NodeSet({self._order})"

    def as_array(self) -> np.ndarray:
        return np.asarray(self._order, dtype=np.int64)

    def as_set(self) -> set[int]:
        return set(self._members)


def as_node_array(nodes) -> np.ndarray:
    """Normalize any iterable of node ids to a sorted int64 array."""
    if isinstance(nodes, NodeSet):
        arr = nodes.as_array()
    else:
        arr = np.fromiter((int(u) for u in nodes), dtype=np.int64)
    return np.unique(arr)


@dataclass(frozen=True)
class DirectedGraph:
    """Weighted directed graph, never mutated after construction."""

    n: int
    m: int
    fwd_indptr: np.ndarray  # int64[n+1]
    fwd_dst: np.ndarray     # int64[m], sorted per source
    fwd_prob: np.ndarray    # float64[m]
    rev_indptr: np.ndarray  # int64[n+1]
    rev_src: np.ndarray     # int64[m]
    rev_fwd_edge: np.ndarray  # int64[m], forward edge id of each reverse slot
    in_degree: np.ndarray = field(repr=False, default=None)
    out_degree: np.ndarray = field(repr=False, default=None)

    @staticmethod
    def from_edges(n: int, src, dst, prob) -> "DirectedGraph":
        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        prob = np.asarray(prob, dtype=np.float64)
        m = src.size
        if m and (src.min() < 0 or dst.min() < 0 or max(src.max(), dst.max()) >= n):
            raise ContractViolation("edge endpoint outside [0, n)")
        if m and (prob.min() < 0.0 or prob.max() > 1.0):
            raise ContractViolation("edge probability outside [0, 1]")
        order = np.lexsort((dst, src))
        src, dst, prob = src[order], dst[order], prob[order]
        fwd_indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(fwd_indptr, src + 1, 1)
        np.cumsum(fwd_indptr, out=fwd_indptr)
        rorder = np.lexsort((src, dst))
        rev_indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(rev_indptr, dst + 1, 1)
        np.cumsum(rev_indptr, out=rev_indptr)
        g = DirectedGraph(
            n=n,
            m=int(m),
            fwd_indptr=fwd_indptr,
            fwd_dst=dst,
            fwd_prob=prob,
            rev_indptr=rev_indptr,
            rev_src=src[rorder],
            rev_fwd_edge=rorder.astype(np.int64),
            in_degree=np.diff(rev_indptr),
            out_degree=np.diff(fwd_indptr),
        )
        for arr in (g.fwd_indptr, g.fwd_dst, g.fwd_prob, g.rev_indptr,
                    g.rev_src, g.rev_fwd_edge, g.in_degree, g.out_degree):
            arr.setflags(write=False)
        return g

    @property
    def rev_prob(self) -> np.ndarray:
        return self.fwd_prob[self.rev_fwd_edge]

    def edge_sources(self) -> np.ndarray:
        """Source node of each forward edge id."""
        return np.repeat(np.arange(self.n, dtype=np.int64), np.diff(self.fwd_indptr))

    def out_edges(self, u: int):
        lo, hi = self.fwd_indptr[u], self.fwd_indptr[u + 1]
        return self.fwd_dst[lo:hi], self.fwd_prob[lo:hi]

    def in_edges(self, v: int):
        lo, hi = self.rev_indptr[v], self.rev_indptr[v + 1]
        return self.rev_src[lo:hi], self.fwd_prob[self.rev_fwd_edge[lo:hi]]

    def with_probabilities(self, prob: np.ndarray) -> "DirectedGraph":
        prob = np.asarray(prob, dtype=np.float64)
        if prob.shape != (self.m,):
            raise ContractViolation("probability array has wrong length")
        src = self.edge_sources()
        return DirectedGraph.from_edges(self.n, src, self.fwd_dst, prob)


def load_edge_list(stream: IO[str] | str, directed: bool = True) -> DirectedGraph:
    """Parse a whitespace-separated ``u v [p]`` edge list.

    `#`-prefixed lines are comments.  Missing probabilities are stored as
    the 0 placeholder (apply `assign_weighted_ic` or a constant later).
    Undirected input expands each line into both arcs.  Self-loops are
    dropped; duplicate arcs are merged keeping the max probability.
    """
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    edges: dict[tuple[int, int], float] = {}
    max_id = -1
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise EdgeListParseError(lineno, f"expected 'u v [p]', got {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise EdgeListParseError(lineno, f"non-integer node id in {line!r}") from None
        if u < 0 or v < 0:
            raise EdgeListParseError(lineno, "node ids must be nonnegative")
        p = 0.0
        if len(parts) == 3:
            try:
                p = float(parts[2])
            except ValueError:
                raise EdgeListParseError(lineno, f"bad probability in {line!r}") from None
            if not 0.0 <= p <= 1.0:
                raise ContractViolation(f"line {lineno}: probability {p} outside [0, 1]")
        max_id = max(max_id, u, v)
        arcs = [(u, v)] if directed else [(u, v), (v, u)]
        for a, b in arcs:
            if a == b:
                continue
            key = (a, b)
            if key in edges:
                edges[key] = max(edges[key], p)
            else:
                edges[key] = p
    n = max_id + 1
    if n <= 0:
        raise EdgeListParseError(0, "empty edge list")
    src = np.fromiter((u for u, _ in edges), dtype=np.int64, count=len(edges))
    dst = np.fromiter((v for _, v in edges), dtype=np.int64, count=len(edges))
    prob = np.fromiter(edges.values(), dtype=np.float64, count=len(edges))
    return DirectedGraph.from_edges(n, src, dst, prob)


def serialize_edge_list(graph: DirectedGraph, stream: IO[str]) -> None:
    """Inverse of `load_edge_list` for directed graphs."""
    src = graph.edge_sources()
    for u, v, p in zip(src, graph.fwd_dst, graph.fwd_prob):
        stream.write(f"{u} {v} {float(p)!r}\n")


def assign_weighted_ic(graph: DirectedGraph) -> DirectedGraph:
    """Set every edge probability to 1 / in-degree(target)."""
    indeg = graph.in_degree
    prob = 1.0 / indeg[graph.fwd_dst]
    return graph.with_probabilities(prob)


def restricted_edge_count(graph: DirectedGraph, seeds_a) -> int:
    """Number of edges whose target is outside the opponent seed set."""
    sa = as_node_array(seeds_a)
    if sa.size and (sa.min() < 0 or sa.max() >= graph.n):
        raise ContractViolation("opponent seed outside [0, n)")
    if sa.size == 0:
        return graph.m
    mask = np.zeros(graph.n, dtype=bool)
    mask[sa] = True
    return int(graph.m - np.count_nonzero(mask[graph.fwd_dst]))


def generate_synthetic(kind: str, n: int, param, seed: int) -> DirectedGraph:
    """Deterministic synthetic graph generator (probabilities left at 0).

    kinds: ``erdos_renyi`` (param = per-arc probability),
    ``random_k_out`` (param = out-degree per node), and
    ``power_law_out`` (param = mean out-degree; Pareto-tailed out-degrees
    with uniformly random targets, duplicates merged).
    """
    if n < 1:
        raise ContractViolation("n must be >= 1")
    rng = np.random.default_rng(seed)
    if kind == "erdos_renyi":
        p_edge = float(param)
        if not 0.0 <= p_edge <= 1.0:
            raise ContractViolation("erdos_renyi edge probability outside [0, 1]")
        if n == 1:
            return DirectedGraph.from_edges(1, [], [], [])
        mask = rng.random((n, n)) < p_edge
        np.fill_diagonal(mask, False)
        src, dst = np.nonzero(mask)
    elif kind == "random_k_out":
        k_out = int(param)
        if k_out < 0 or k_out >= n:
            raise ContractViolation("random_k_out requires 0 <= k_out < n")
        src = np.repeat(np.arange(n, dtype=np.int64), k_out)
        dst = np.empty(n * k_out, dtype=np.int64)
        for u in range(n):
            choices = rng.choice(n - 1, size=k_out, replace=False)
            choices[choices >= u] += 1  # skip the self-loop slot
            dst[u * k_out:(u + 1) * k_out] = choices
    elif kind == "power_law_out":
        mean_deg = float(param)
        if mean_deg <= 0 or mean_deg >= n:
            raise ContractViolation("power_law_out requires 0 < mean degree < n")
        # Pareto(2) + 1 has mean 2; scale to the requested mean and cap the
        # tail so no single hub dominates the edge budget
        deg = (rng.pareto(2.0, n) + 1.0) * (mean_deg / 2.0)
        deg = np.maximum(np.minimum(deg, n / 16), 1.0).astype(np.int64)
        src = np.repeat(np.arange(n, dtype=np.int64), deg)
        dst = rng.integers(0, n, size=src.size)
        keep = src != dst
        pairs = np.unique(np.stack([src[keep], dst[keep]], axis=1), axis=0)
        src, dst = pairs[:, 0], pairs[:, 1]
    else:
        raise ContractViolation(f"unknown synthetic kind {kind!r}")
    return DirectedGraph.from_edges(n, src, dst, np.zeros(len(src)))
