# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled sweep kernels over integer-scaled allocation tables.

Networks are pair bitmasks; player sets are player bitmasks (bit k is player
k+1).  Callers scale rationals to a common denominator and check magnitudes
before calling, so int64 arithmetic here is exact.
"""

from libc.stdint cimport int64_t


cdef inline int64_t _res(const int64_t[:, :] phi, const int64_t[:] drop, long g,
                         int i, int j, long D) nogil:
    cdef long base = g & ~drop[D]
    cdef long gj = g & ~drop[D | (1 << j)]
    cdef long gi = g & ~drop[D | (1 << i)]
    return (phi[base, i] - phi[gj, i]) - (phi[base, j] - phi[gi, j])


def cycle_sum_sweep(int n, const int64_t[:, :] phi, const int64_t[:] drop,
                    const int64_t[:] cyc_len, const int64_t[:, :] cyc_vert,
                    const int64_t[:] cyc_mask, int max_report=10):
    """Evaluate both sides of the cycle-sum identity for every cycle of every network.

    Returns ``(cycles_checked, nonzero_lhs, mismatches)`` where each mismatch
    is ``(network_mask, cycle_index, lhs, rhs)``.
    """
    cdef long nets = phi.shape[0]
    cdef long ncyc = cyc_len.shape[0]
    cdef long g, c, cm, others, sub
    cdef int L, s, a, b, k, cnt
    cdef int64_t lhs, rhs, r
    cdef long checked = 0, nonzero = 0
    mism = []
    for g in range(nets):
        for c in range(ncyc):
            cm = cyc_mask[c]
            if (g & cm) != cm:
                continue
            L = cyc_len[c]
            lhs = 0
            rhs = 0
            for s in range(L):
                a = cyc_vert[c, s]
                b = cyc_vert[c, (s + 1) % L]
                lhs += _res(phi, drop, g, a, b, 0)
                others = 0
                for k in range(L):
                    if k != s and k != (s + 1) % L:
                        others |= 1 << cyc_vert[c, k]
                sub = others
                while sub:
                    r = _res(phi, drop, g, a, b, sub)
                    cnt = 0
                    k = 0
                    while k < n:
                        cnt += (sub >> k) & 1
                        k += 1
                    if cnt & 1:
                        rhs += r
                    else:
                        rhs -= r
                    sub = (sub - 1) & others
            checked += 1
            if lhs != 0:
                nonzero += 1
            if lhs != rhs and len(mism) < max_report:
                mism.append((g, c, lhs, rhs))
    return checked, nonzero, mism


cdef inline long _pieces_first(long C, const int64_t* adj, long remaining) nogil:
    cdef long seed = remaining & (-remaining)
    cdef long comp = seed, prev = 0, grow
    cdef int v
    while comp != prev:
        prev = comp
        grow = comp
        v = 0
        while (1 << v) <= prev:
            if (prev >> v) & 1:
                grow |= adj[v]
            v += 1
        comp = grow & C
    return comp


def fce_sweep(int n, const int64_t[:] pair_u, const int64_t[:] pair_v,
              const int64_t[:, :] worth, const int64_t[:] emb_coal,
              const int64_t[:] emb_keep, const int64_t[:, :] op, int64_t[:, :] out):
    """Scaled FCE payoffs for every network.

    ``worth[h, S]`` is the scaled worth of component ``S`` at network ``h``;
    ``emb_coal[e]`` / ``emb_keep[e]`` give the coalition and the within-block
    pair mask of embedded coalition ``e``; ``op[e, i]`` is the scaled weight of
    ``e`` in player ``i``'s PFF value.
    """
    cdef long nets = out.shape[0]
    cdef long E = emb_coal.shape[0]
    cdef int m = pair_u.shape[0]
    cdef long g, e, C, rem, piece, h
    cdef int k, i
    cdef int64_t val
    cdef int64_t adj[64]
    if n > 64:
        raise ValueError("at most 64 players")
    for g in range(nets):
        for i in range(n):
            adj[i] = 0
            out[g, i] = 0
        for k in range(m):
            if (g >> k) & 1:
                adj[pair_u[k]] |= 1 << pair_v[k]
                adj[pair_v[k]] |= 1 << pair_u[k]
        for e in range(E):
            C = emb_coal[e]
            h = g & emb_keep[e]
            val = 0
            rem = C
            while rem:
                piece = _pieces_first(C, adj, rem)
                val += worth[h, piece]
                rem &= ~piece
            if val:
                for i in range(n):
                    out[g, i] += op[e, i] * val
