"""Pure-Python kernels.

Fallback twin of the compiled `tcim._kernels` extension: identical
signatures, identical randomness consumption, bit-identical outputs.
Fast enough for the desk-scale test graphs; the compiled backend exists
for the large benchmark runs.
"""

from __future__ import annotations

import numpy as np

from .rng import GOLDEN, MASK64, mix64, stream_state, substream_index

BACKEND_NAME = "python"

MODEL_COICM = 0
MODEL_DISTANCE = 1
MODEL_WAVE = 2

_INV53 = 1.0 / (1 << 53)


def _next(state: int) -> tuple[float, int]:
    state = (state + GOLDEN) & MASK64
    return (mix64(state) >> 11) * _INV53, state


def sample_rapg_pool(n, rev_indptr, rev_src, rev_prob, in_sa,
                     count, seed, base_index, start_sub):
    """Sample `count` reverse instances into pooled flat arrays.

    Instance j consumes substream `start_sub + j` of stream
    (seed, base_index).  Returns
    (roots, d_a, coins, node_indptr, node_ids, node_dist, node_sa,
     edge_indptr, edge_src, edge_dst).
    """
    inf = n + 1
    dist = np.full(n, -1, dtype=np.int64)
    roots = np.empty(count, dtype=np.int64)
    d_a_arr = np.empty(count, dtype=np.int64)
    coins_arr = np.empty(count, dtype=np.int64)
    node_indptr = np.zeros(count + 1, dtype=np.int64)
    edge_indptr = np.zeros(count + 1, dtype=np.int64)
    all_nodes: list[int] = []
    all_dist: list[int] = []
    all_sa: list[int] = []
    all_esrc: list[int] = []
    all_edst: list[int] = []

    for j in range(count):
        state = stream_state(seed, substream_index(base_index, start_sub + j))
        r, state = _next(state)
        root = min(int(r * n), n - 1)
        roots[j] = root
        queue = [root]
        dist[root] = 0
        coins = 0
        d_a = inf
        esrc: list[int] = []
        edst: list[int] = []
        if in_sa[root]:
            d_a = 0
        else:
            head = 0
            d_stop = -2
            while head < len(queue):
                v = queue[head]
                dv = dist[v]
                if d_stop != -2 and dv > d_stop:
                    break
                head += 1
                du_new = dv + 1
                for slot in range(rev_indptr[v], rev_indptr[v + 1]):
                    u = rev_src[slot]
                    du = dist[u]
                    if du != -1 and du < du_new:
                        continue
                    coins += 1
                    r, state = _next(state)
                    if r < rev_prob[slot]:
                        esrc.append(u)
                        edst.append(v)
                        if du == -1:
                            dist[u] = du_new
                            queue.append(u)
                            if in_sa[u] and d_a > n:
                                d_a = du_new
                                d_stop = dv
        d_a_arr[j] = d_a
        coins_arr[j] = coins
        node_indptr[j + 1] = node_indptr[j] + len(queue)
        edge_indptr[j + 1] = edge_indptr[j] + len(esrc)
        for u in queue:
            all_nodes.append(u)
            all_dist.append(dist[u])
            all_sa.append(1 if in_sa[u] else 0)
            dist[u] = -1
        all_esrc.extend(esrc)
        all_edst.extend(edst)

    return (
        roots, d_a_arr, coins_arr,
        node_indptr,
        np.asarray(all_nodes, dtype=np.int64),
        np.asarray(all_dist, dtype=np.int64),
        np.asarray(all_sa, dtype=np.uint8),
        edge_indptr,
        np.asarray(all_esrc, dtype=np.int64),
        np.asarray(all_edst, dtype=np.int64),
    )


def simulate_coicm_batch(n, fwd_indptr, fwd_dst, fwd_prob, seeds_a, seeds_b,
                         nsims, seed, base_index, start_sub):
    """Layer-synchronous competitive cascades with lazy edge coins.

    Within each step the B frontier expands before the A frontier, so
    simultaneous arrivals resolve in B's favor.  Returns the number of
    B-influenced nodes per simulation.
    """
    label = np.zeros(n, dtype=np.int8)  # 0 none, 1 A, 2 B
    out = np.empty(nsims, dtype=np.float64)
    for s in range(nsims):
        state = stream_state(seed, substream_index(base_index, start_sub + s))
        touched: list[int] = []
        cur_b: list[int] = []
        cur_a: list[int] = []
        for u in seeds_b:
            label[u] = 2
            touched.append(u)
            cur_b.append(u)
        for u in seeds_a:
            label[u] = 1
            touched.append(u)
            cur_a.append(u)
        mass = len(cur_b)
        while cur_b or cur_a:
            nxt_b: list[int] = []
            nxt_a: list[int] = []
            for frontier, lab, nxt in ((cur_b, 2, nxt_b), (cur_a, 1, nxt_a)):
                for u in frontier:
                    for e in range(fwd_indptr[u], fwd_indptr[u + 1]):
                        w = fwd_dst[e]
                        if label[w]:
                            continue
                        r, state = _next(state)
                        if r < fwd_prob[e]:
                            label[w] = lab
                            touched.append(w)
                            nxt.append(w)
                            if lab == 2:
                                mass += 1
            cur_b, cur_a = nxt_b, nxt_a
        out[s] = mass
        for u in touched:
            label[u] = 0
    return out


def sample_active_edges(m, fwd_prob, seed, base_index, sub):
    """One live-edge draw: coin per edge, in forward edge id order."""
    state = stream_state(seed, substream_index(base_index, sub))
    active = np.zeros(m, dtype=np.uint8)
    for e in range(m):
        r, state = _next(state)
        if r < fwd_prob[e]:
            active[e] = 1
    return active


def b_mass_active(model, n, fwd_indptr, fwd_dst, rev_indptr, rev_src,
                  rev_fwd_edge, active, in_sa, in_sb):
    """Expected B-influenced mass for a fixed set of live edges."""
    if model == MODEL_COICM:
        return _coicm_mass(n, fwd_indptr, fwd_dst, active, in_sa, in_sb)
    if model == MODEL_DISTANCE:
        return _distance_mass(n, fwd_indptr, fwd_dst, active, in_sa, in_sb)
    if model == MODEL_WAVE:
        return _wave_mass(n, fwd_indptr, fwd_dst, rev_indptr, rev_src,
                          rev_fwd_edge, active, in_sa, in_sb)
    raise ValueError(f"unknown model id {model}")


def _coicm_mass(n, fwd_indptr, fwd_dst, active, in_sa, in_sb):
    label = np.zeros(n, dtype=np.int8)
    cur_b = [u for u in range(n) if in_sb[u]]
    cur_a = [u for u in range(n) if in_sa[u]]
    for u in cur_b:
        label[u] = 2
    for u in cur_a:
        label[u] = 1
    mass = len(cur_b)
    while cur_b or cur_a:
        nxt_b: list[int] = []
        nxt_a: list[int] = []
        for frontier, lab, nxt in ((cur_b, 2, nxt_b), (cur_a, 1, nxt_a)):
            for u in frontier:
                for e in range(fwd_indptr[u], fwd_indptr[u + 1]):
                    if not active[e]:
                        continue
                    w = fwd_dst[e]
                    if label[w]:
                        continue
                    label[w] = lab
                    nxt.append(w)
                    if lab == 2:
                        mass += 1
        cur_b, cur_a = nxt_b, nxt_a
    return float(mass)


def _distance_mass(n, fwd_indptr, fwd_dst, active, in_sa, in_sb):
    inf = n + 1
    best = np.full(n, inf, dtype=np.int64)
    cnt_a = np.zeros(n, dtype=np.int64)
    cnt_b = np.zeros(n, dtype=np.int64)
    dist = np.full(n, -1, dtype=np.int64)
    seeds = [u for u in range(n) if in_sa[u] or in_sb[u]]
    for s in seeds:
        # distances from this seed over live edges
        dist[s] = 0
        queue = [s]
        head = 0
        while head < len(queue):
            u = queue[head]
            head += 1
            for e in range(fwd_indptr[u], fwd_indptr[u + 1]):
                if not active[e]:
                    continue
                w = fwd_dst[e]
                if dist[w] == -1:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        for u in queue:
            d = dist[u]
            if d < best[u]:
                best[u] = d
                cnt_a[u] = 0
                cnt_b[u] = 0
            if d == best[u]:
                if in_sb[s]:
                    cnt_b[u] += 1
                else:
                    cnt_a[u] += 1
            dist[u] = -1
    mass = 0.0
    for u in range(n):
        if cnt_b[u]:
            mass += cnt_b[u] / (cnt_a[u] + cnt_b[u])
    return mass


def _wave_mass(n, fwd_indptr, fwd_dst, rev_indptr, rev_src, rev_fwd_edge,
               active, in_sa, in_sb):
    dist = np.full(n, -1, dtype=np.int64)
    queue = [u for u in range(n) if in_sa[u] or in_sb[u]]
    for u in queue:
        dist[u] = 0
    head = 0
    while head < len(queue):
        u = queue[head]
        head += 1
        for e in range(fwd_indptr[u], fwd_indptr[u + 1]):
            if not active[e]:
                continue
            w = fwd_dst[e]
            if dist[w] == -1:
                dist[w] = dist[u] + 1
                queue.append(w)
    prob = np.zeros(n, dtype=np.float64)
    mass = 0.0
    for u in queue:  # BFS order: nondecreasing seed distance
        if dist[u] == 0:
            prob[u] = 1.0 if in_sb[u] else 0.0
        else:
            total = 0.0
            cnt = 0
            for slot in range(rev_indptr[u], rev_indptr[u + 1]):
                if not active[rev_fwd_edge[slot]]:
                    continue
                v = rev_src[slot]
                if dist[v] == dist[u] - 1:
                    total += prob[v]
                    cnt += 1
            prob[u] = total / cnt  # cnt >= 1: u was reached via such an edge
        mass += prob[u]
    return mass
