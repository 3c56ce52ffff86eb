# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: the hot inner loops of instance sampling and
cascade simulation.  Mirrors `tcim._kernels_py` exactly, including the
splitmix64 randomness consumption, so outputs are bit-identical."""

import numpy as np

cimport numpy as cnp
from libc.stdint cimport int8_t, int64_t, uint8_t, uint64_t

cnp.import_array()

BACKEND_NAME = "compiled"

MODEL_COICM = 0
MODEL_DISTANCE = 1
MODEL_WAVE = 2

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef double INV53 = 1.0 / 9007199254740992.0  # 2**-53


cdef inline uint64_t mix64(uint64_t z) nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline uint64_t stream_state(uint64_t seed, uint64_t index) nogil:
    return mix64((seed * GOLDEN) ^ mix64(index + GOLDEN))


cdef inline uint64_t substream_index(uint64_t index, uint64_t j) nogil:
    return mix64(index + GOLDEN * (j + 1))


cdef inline double next_double(uint64_t *state) nogil:
    state[0] += GOLDEN
    return <double>(mix64(state[0]) >> 11) * INV53


def sample_rapg_pool(int64_t n,
                     cnp.ndarray[int64_t, ndim=1] rev_indptr,
                     cnp.ndarray[int64_t, ndim=1] rev_src,
                     cnp.ndarray[double, ndim=1] rev_prob,
                     cnp.ndarray[uint8_t, ndim=1] in_sa,
                     int64_t count, object seed, object base_index,
                     object start_sub):
    cdef uint64_t seed_u = <uint64_t>(<object>seed & 0xFFFFFFFFFFFFFFFF)
    cdef uint64_t index_u = <uint64_t>(<object>base_index & 0xFFFFFFFFFFFFFFFF)
    cdef uint64_t sub0 = <uint64_t>(<object>start_sub & 0xFFFFFFFFFFFFFFFF)

    cdef cnp.ndarray[int64_t, ndim=1] dist = np.full(n, -1, dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] queue = np.empty(n, dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] roots = np.empty(count, dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] d_a_arr = np.empty(count, dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] coins_arr = np.empty(count, dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] node_indptr = np.zeros(count + 1, dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] edge_indptr = np.zeros(count + 1, dtype=np.int64)

    cdef int64_t node_cap = 4096, edge_cap = 4096
    cdef cnp.ndarray[int64_t, ndim=1] node_ids = np.empty(node_cap, dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] node_dist = np.empty(node_cap, dtype=np.int64)
    cdef cnp.ndarray[uint8_t, ndim=1] node_sa = np.empty(node_cap, dtype=np.uint8)
    cdef cnp.ndarray[int64_t, ndim=1] edge_s = np.empty(edge_cap, dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] edge_d = np.empty(edge_cap, dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] tmp_i
    cdef cnp.ndarray[uint8_t, ndim=1] tmp_u

    cdef int64_t node_len = 0, edge_len = 0
    cdef int64_t j, root, head, tail, v, dv, du, du_new, slot, u, coins
    cdef int64_t d_a, d_stop, i, inf = n + 1
    cdef uint64_t state
    cdef double r

    for j in range(count):
        state = stream_state(seed_u, substream_index(index_u, sub0 + <uint64_t>j))
        r = next_double(&state)
        root = <int64_t>(r * n)
        if root >= n:
            root = n - 1
        roots[j] = root
        queue[0] = root
        tail = 1
        dist[root] = 0
        coins = 0
        d_a = inf
        if in_sa[root]:
            d_a = 0
        else:
            head = 0
            d_stop = -2
            while head < tail:
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
                    r = next_double(&state)
                    if r < rev_prob[slot]:
                        if edge_len >= edge_cap:
                            edge_cap *= 2
                            tmp_i = np.empty(edge_cap, dtype=np.int64)
                            tmp_i[:edge_len] = edge_s[:edge_len]
                            edge_s = tmp_i
                            tmp_i = np.empty(edge_cap, dtype=np.int64)
                            tmp_i[:edge_len] = edge_d[:edge_len]
                            edge_d = tmp_i
                        edge_s[edge_len] = u
                        edge_d[edge_len] = v
                        edge_len += 1
                        if du == -1:
                            dist[u] = du_new
                            queue[tail] = u
                            tail += 1
                            if in_sa[u] and d_a > n:
                                d_a = du_new
                                d_stop = dv
        d_a_arr[j] = d_a
        coins_arr[j] = coins
        node_indptr[j + 1] = node_indptr[j] + tail
        edge_indptr[j + 1] = edge_len
        if node_len + tail > node_cap:
            while node_len + tail > node_cap:
                node_cap *= 2
            tmp_i = np.empty(node_cap, dtype=np.int64)
            tmp_i[:node_len] = node_ids[:node_len]
            node_ids = tmp_i
            tmp_i = np.empty(node_cap, dtype=np.int64)
            tmp_i[:node_len] = node_dist[:node_len]
            node_dist = tmp_i
            tmp_u = np.empty(node_cap, dtype=np.uint8)
            tmp_u[:node_len] = node_sa[:node_len]
            node_sa = tmp_u
        for i in range(tail):
            u = queue[i]
            node_ids[node_len] = u
            node_dist[node_len] = dist[u]
            node_sa[node_len] = in_sa[u]
            node_len += 1
            dist[u] = -1

    return (roots, d_a_arr, coins_arr, node_indptr,
            node_ids[:node_len].copy(), node_dist[:node_len].copy(),
            node_sa[:node_len].copy(), edge_indptr,
            edge_s[:edge_len].copy(), edge_d[:edge_len].copy())


def simulate_coicm_batch(int64_t n,
                         cnp.ndarray[int64_t, ndim=1] fwd_indptr,
                         cnp.ndarray[int64_t, ndim=1] fwd_dst,
                         cnp.ndarray[double, ndim=1] fwd_prob,
                         cnp.ndarray[int64_t, ndim=1] seeds_a,
                         cnp.ndarray[int64_t, ndim=1] seeds_b,
                         int64_t nsims, object seed, object base_index,
                         object start_sub):
    cdef uint64_t seed_u = <uint64_t>(<object>seed & 0xFFFFFFFFFFFFFFFF)
    cdef uint64_t index_u = <uint64_t>(<object>base_index & 0xFFFFFFFFFFFFFFFF)
    cdef uint64_t sub0 = <uint64_t>(<object>start_sub & 0xFFFFFFFFFFFFFFFF)

    cdef cnp.ndarray[int8_t, ndim=1] label = np.zeros(n, dtype=np.int8)
    cdef cnp.ndarray[int64_t, ndim=1] cur = np.empty(n, dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] nxt = np.empty(n, dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] touched = np.empty(n, dtype=np.int64)
    cdef cnp.ndarray[double, ndim=1] out = np.empty(nsims, dtype=np.float64)

    # cur/nxt hold the B frontier from the left and the A frontier from
    # the right so one buffer carries both.
    cdef int64_t s, i, u, w, e, mass, ntouch
    cdef int64_t cb, ca, nb, na
    cdef int64_t na_seeds = seeds_a.shape[0], nb_seeds = seeds_b.shape[0]
    cdef uint64_t state
    cdef double r

    for s in range(nsims):
        state = stream_state(seed_u, substream_index(index_u, sub0 + <uint64_t>s))
        ntouch = 0
        cb = 0
        ca = 0
        for i in range(nb_seeds):
            u = seeds_b[i]
            label[u] = 2
            cur[cb] = u
            cb += 1
            touched[ntouch] = u
            ntouch += 1
        for i in range(na_seeds):
            u = seeds_a[i]
            label[u] = 1
            cur[n - 1 - ca] = u
            ca += 1
            touched[ntouch] = u
            ntouch += 1
        mass = nb_seeds
        while cb > 0 or ca > 0:
            nb = 0
            na = 0
            for i in range(cb):
                u = cur[i]
                for e in range(fwd_indptr[u], fwd_indptr[u + 1]):
                    w = fwd_dst[e]
                    if label[w]:
                        continue
                    r = next_double(&state)
                    if r < fwd_prob[e]:
                        label[w] = 2
                        nxt[nb] = w
                        nb += 1
                        touched[ntouch] = w
                        ntouch += 1
                        mass += 1
            for i in range(ca):
                u = cur[n - 1 - i]
                for e in range(fwd_indptr[u], fwd_indptr[u + 1]):
                    w = fwd_dst[e]
                    if label[w]:
                        continue
                    r = next_double(&state)
                    if r < fwd_prob[e]:
                        label[w] = 1
                        nxt[n - 1 - na] = w
                        na += 1
                        touched[ntouch] = w
                        ntouch += 1
            cur, nxt = nxt, cur
            cb = nb
            ca = na
        out[s] = <double>mass
        for i in range(ntouch):
            label[touched[i]] = 0
    return out


def sample_active_edges(int64_t m, cnp.ndarray[double, ndim=1] fwd_prob,
                        object seed, object base_index, object sub):
    cdef uint64_t seed_u = <uint64_t>(<object>seed & 0xFFFFFFFFFFFFFFFF)
    cdef uint64_t index_u = <uint64_t>(<object>base_index & 0xFFFFFFFFFFFFFFFF)
    cdef uint64_t sub_u = <uint64_t>(<object>sub & 0xFFFFFFFFFFFFFFFF)
    cdef uint64_t state = stream_state(seed_u, substream_index(index_u, sub_u))
    cdef cnp.ndarray[uint8_t, ndim=1] active = np.zeros(m, dtype=np.uint8)
    cdef int64_t e
    for e in range(m):
        if next_double(&state) < fwd_prob[e]:
            active[e] = 1
    return active


def b_mass_active(int model, int64_t n,
                  cnp.ndarray[int64_t, ndim=1] fwd_indptr,
                  cnp.ndarray[int64_t, ndim=1] fwd_dst,
                  cnp.ndarray[int64_t, ndim=1] rev_indptr,
                  cnp.ndarray[int64_t, ndim=1] rev_src,
                  cnp.ndarray[int64_t, ndim=1] rev_fwd_edge,
                  cnp.ndarray[uint8_t, ndim=1] active,
                  cnp.ndarray[uint8_t, ndim=1] in_sa,
                  cnp.ndarray[uint8_t, ndim=1] in_sb):
    if model == MODEL_COICM:
        return _coicm_mass(n, fwd_indptr, fwd_dst, active, in_sa, in_sb)
    if model == MODEL_DISTANCE:
        return _distance_mass(n, fwd_indptr, fwd_dst, active, in_sa, in_sb)
    if model == MODEL_WAVE:
        return _wave_mass(n, fwd_indptr, fwd_dst, rev_indptr, rev_src,
                          rev_fwd_edge, active, in_sa, in_sb)
    raise ValueError(f"unknown model id {model}")


cdef double _coicm_mass(int64_t n,
                        cnp.ndarray[int64_t, ndim=1] fwd_indptr,
                        cnp.ndarray[int64_t, ndim=1] fwd_dst,
                        cnp.ndarray[uint8_t, ndim=1] active,
                        cnp.ndarray[uint8_t, ndim=1] in_sa,
                        cnp.ndarray[uint8_t, ndim=1] in_sb):
    cdef cnp.ndarray[int8_t, ndim=1] label = np.zeros(n, dtype=np.int8)
    cdef cnp.ndarray[int64_t, ndim=1] cur = np.empty(n, dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] nxt = np.empty(n, dtype=np.int64)
    cdef int64_t u, w, e, i, mass = 0
    cdef int64_t cb = 0, ca = 0, nb, na
    for u in range(n):
        if in_sb[u]:
            label[u] = 2
            cur[cb] = u
            cb += 1
            mass += 1
        elif in_sa[u]:
            label[u] = 1
            cur[n - 1 - ca] = u
            ca += 1
    while cb > 0 or ca > 0:
        nb = 0
        na = 0
        for i in range(cb):
            u = cur[i]
            for e in range(fwd_indptr[u], fwd_indptr[u + 1]):
                if not active[e]:
                    continue
                w = fwd_dst[e]
                if label[w]:
                    continue
                label[w] = 2
                nxt[nb] = w
                nb += 1
                mass += 1
        for i in range(ca):
            u = cur[n - 1 - i]
            for e in range(fwd_indptr[u], fwd_indptr[u + 1]):
                if not active[e]:
                    continue
                w = fwd_dst[e]
                if label[w]:
                    continue
                label[w] = 1
                nxt[n - 1 - na] = w
                na += 1
        cur, nxt = nxt, cur
        cb = nb
        ca = na
    return <double>mass


cdef double _distance_mass(int64_t n,
                           cnp.ndarray[int64_t, ndim=1] fwd_indptr,
                           cnp.ndarray[int64_t, ndim=1] fwd_dst,
                           cnp.ndarray[uint8_t, ndim=1] active,
                           cnp.ndarray[uint8_t, ndim=1] in_sa,
                           cnp.ndarray[uint8_t, ndim=1] in_sb):
    cdef int64_t inf = n + 1
    cdef cnp.ndarray[int64_t, ndim=1] best = np.full(n, inf, dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] cnt_a = np.zeros(n, dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] cnt_b = np.zeros(n, dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] dist = np.full(n, -1, dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] queue = np.empty(n, dtype=np.int64)
    cdef int64_t s, u, w, e, d, head, tail, i
    cdef double mass = 0.0
    for s in range(n):
        if not (in_sa[s] or in_sb[s]):
            continue
        dist[s] = 0
        queue[0] = s
        head = 0
        tail = 1
        while head < tail:
            u = queue[head]
            head += 1
            for e in range(fwd_indptr[u], fwd_indptr[u + 1]):
                if not active[e]:
                    continue
                w = fwd_dst[e]
                if dist[w] == -1:
                    dist[w] = dist[u] + 1
                    queue[tail] = w
                    tail += 1
        for i in range(tail):
            u = queue[i]
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
    for u in range(n):
        if cnt_b[u]:
            mass += <double>cnt_b[u] / <double>(cnt_a[u] + cnt_b[u])
    return mass


cdef double _wave_mass(int64_t n,
                       cnp.ndarray[int64_t, ndim=1] fwd_indptr,
                       cnp.ndarray[int64_t, ndim=1] fwd_dst,
                       cnp.ndarray[int64_t, ndim=1] rev_indptr,
                       cnp.ndarray[int64_t, ndim=1] rev_src,
                       cnp.ndarray[int64_t, ndim=1] rev_fwd_edge,
                       cnp.ndarray[uint8_t, ndim=1] active,
                       cnp.ndarray[uint8_t, ndim=1] in_sa,
                       cnp.ndarray[uint8_t, ndim=1] in_sb):
    cdef cnp.ndarray[int64_t, ndim=1] dist = np.full(n, -1, dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] queue = np.empty(n, dtype=np.int64)
    cdef cnp.ndarray[double, ndim=1] prob = np.zeros(n, dtype=np.float64)
    cdef int64_t u, w, e, slot, v, head, tail = 0, i, cnt
    cdef double mass = 0.0, total
    for u in range(n):
        if in_sa[u] or in_sb[u]:
            dist[u] = 0
            queue[tail] = u
            tail += 1
    head = 0
    while head < tail:
        u = queue[head]
        head += 1
        for e in range(fwd_indptr[u], fwd_indptr[u + 1]):
            if not active[e]:
                continue
            w = fwd_dst[e]
            if dist[w] == -1:
                dist[w] = dist[u] + 1
                queue[tail] = w
                tail += 1
    for i in range(tail):
        u = queue[i]
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
            prob[u] = total / cnt
        mass += prob[u]
    return mass
