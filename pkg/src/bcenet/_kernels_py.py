"""Pure-Python versions of the compiled sweep kernels (same signatures)."""

from __future__ import annotations


def _res(phi, drop, g, i, j, D):
    base = g & ~drop[D]
    gj = g & ~drop[D | (1 << j)]
    gi = g & ~drop[D | (1 << i)]
    return (phi[base][i] - phi[gj][i]) - (phi[base][j] - phi[gi][j])


def cycle_sum_sweep(n, phi, drop, cyc_len, cyc_vert, cyc_mask, max_report=10):
    phi = [list(row) for row in phi]
    drop = list(drop)
    checked = nonzero = 0
    mism = []
    for g in range(len(phi)):
        for c, cm in enumerate(cyc_mask):
            if g & cm != cm:
                continue
            L = cyc_len[c]
            vert = cyc_vert[c]
            lhs = rhs = 0
            for s in range(L):
                a, b = vert[s], vert[(s + 1) % L]
                lhs += _res(phi, drop, g, a, b, 0)
                others = 0
                for k in range(L):
                    if k != s and k != (s + 1) % L:
                        others |= 1 << vert[k]
                sub = others
                while sub:
                    r = _res(phi, drop, g, a, b, sub)
                    rhs += r if bin(sub).count("1") & 1 else -r
                    sub = (sub - 1) & others
            checked += 1
            nonzero += lhs != 0
            if lhs != rhs and len(mism) < max_report:
                mism.append((g, c, lhs, rhs))
    return checked, nonzero, mism


def _pieces(C, adj):
    rem = C
    while rem:
        comp = rem & -rem
        prev = 0
        while comp != prev:
            prev = comp
            grow = comp
            v = 0
            while (1 << v) <= prev:
                if prev >> v & 1:
                    grow |= adj[v]
                v += 1
            comp = grow & C
        yield comp
        rem &= ~comp


def fce_sweep(n, pair_u, pair_v, worth, emb_coal, emb_keep, op, out):
    m = len(pair_u)
    for g in range(len(out)):
        adj = [0] * n
        for k in range(m):
            if g >> k & 1:
                adj[pair_u[k]] |= 1 << pair_v[k]
                adj[pair_v[k]] |= 1 << pair_u[k]
        row = [0] * n
        for e, C in enumerate(emb_coal):
            h = g & emb_keep[e]
            val = sum(worth[h][piece] for piece in _pieces(C, adj))
            if val:
                ope = op[e]
                for i in range(n):
                    row[i] += ope[i] * val
        out[g] = row
