"""Exhaustive sweeps over every network on ``n`` players.

Allocation tables are indexed by network bitmask.  Rationals are scaled to a
common denominator so the hot loops run on integers; the compiled kernels are
used when importable and the integers fit in int64, the pure-Python kernels
otherwise.  Both give bit-identical results.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

from . import _kernels_py
from .games import Allocation, WorthFunction
from .netcore import Cycle, Network, _pair_bits, all_networks, components, cycles
from .values import pff_value_operator

try:
    if os.environ.get("BCENET_PURE"):
        raise ImportError("pure-Python kernels requested")
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

INT64_SAFE = 1 << 62


def backend_name() -> str:
    return "compiled" if _compiled is not None else "python"


def _pick(backend: str | None):
    if backend is None:
        return _compiled or _kernels_py
    if backend == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not built")
        return _compiled
    if backend == "python":
        return _kernels_py
    raise ValueError(f"unknown backend {backend!r}")


@dataclass(frozen=True)
class Layout:
    """Bitmask bookkeeping for networks on ``n`` players (players are bits ``0..n-1``)."""

    n: int
    pairs: tuple[tuple[int, int], ...]
    drop: tuple[int, ...]
    cycles: tuple[Cycle, ...]
    cycle_masks: tuple[int, ...]

    @property
    def networks(self) -> int:
        return 1 << len(self.pairs)


@lru_cache(maxsize=None)
def layout(n: int) -> Layout:
    bits = _pair_bits(n)
    pairs = tuple(bits)
    drop = []
    for D in range(1 << n):
        drop.append(sum(b for (i, j), b in bits.items() if D >> (i - 1) & 1 or D >> (j - 1) & 1))
    cyc = tuple(cycles(Network.complete(n))) if n >= 3 else ()
    masks = tuple(
        sum(bits[(min(a, b), max(a, b))] for a, b in c.edges()) for c in cyc
    )
    return Layout(n, pairs, tuple(drop), cyc, masks)


def tabulate(evaluate: Callable[[Network], Allocation], n: int) -> list[Allocation]:
    """``evaluate`` on every network, indexed by bitmask."""
    return [evaluate(g) for g in all_networks(n)]


def _scale(rows: Sequence[Sequence[Fraction]]) -> tuple[list[list[int]], int]:
    L = 1
    for row in rows:
        for x in row:
            L = math.lcm(L, Fraction(x).denominator)
    return [[int(Fraction(x) * L) for x in row] for row in rows], L


def _as_int64(rows):
    import numpy as np

    return np.ascontiguousarray(np.array(rows, dtype=np.int64))


@dataclass
class CycleSweepResult:
    n: int
    cycles_checked: int
    nonzero_lhs: int
    mismatches: list[tuple[Network, Cycle, Fraction, Fraction]]
    backend: str

    @property
    def all_equal(self) -> bool:
        return not self.mismatches


@dataclass
class KernelCall:
    """Prepared integer arguments for one kernel; ``run`` picks the backend."""

    name: str
    n: int
    args: tuple
    safe_for_int64: bool

    def run(self, kern, *extra, **kw):
        args = self.args
        if kern is _compiled:
            args = tuple(_as_int64(a) for a in args)
        return getattr(kern, self.name)(self.n, *args, *extra, **kw)


def cycle_sum_call(table: Sequence[Sequence[Fraction]], n: int) -> tuple[KernelCall, int]:
    """Scale ``table`` to integers and lay out the cycles; returns the call and the scale."""
    lay = layout(n)
    if len(table) != lay.networks:
        raise ValueError(f"table has {len(table)} rows, expected {lay.networks}")
    ints, L = _scale(table)
    biggest = max((abs(x) for row in ints for x in row), default=0)
    terms = 4 * n * (1 << max(n - 2, 0)) + 4 * n
    cyc_len = [len(c) for c in lay.cycles]
    cyc_vert = [[v - 1 for v in c.vertices] + [0] * (n - len(c)) for c in lay.cycles]
    args = (ints, list(lay.drop), cyc_len, cyc_vert, list(lay.cycle_masks))
    return KernelCall("cycle_sum_sweep", n, args, biggest * terms < INT64_SAFE), L


def cycle_sum_sweep(table: Sequence[Sequence[Fraction]], n: int, backend: str | None = None,
                    max_report: int = 10) -> CycleSweepResult:
    """Both sides of the cycle-sum identity for every cycle of every network.

    ``table[mask]`` is the rule's allocation at the network with that bitmask.
    """
    lay = layout(n)
    call, L = cycle_sum_call(table, n)
    kern = _pick(backend)
    if kern is _compiled and not call.safe_for_int64:
        kern = _kernels_py
    if not lay.cycles:
        checked, nonzero, raw = 0, 0, []
    else:
        checked, nonzero, raw = call.run(kern, max_report=max_report)
    mism = [
        (Network.from_mask(n, g), lay.cycles[c], Fraction(lhs, L), Fraction(rhs, L))
        for g, c, lhs, rhs in raw
    ]
    name = "compiled" if kern is _compiled else "python"
    return CycleSweepResult(n, checked, nonzero, mism, name)


def worth_table(w: WorthFunction, n: int) -> list[dict[int, Fraction]]:
    """``w(S, h)`` for every network ``h`` and component ``S``, keyed by player bitmask."""
    out = []
    for h in all_networks(n):
        row = {}
        for S in components(h).blocks:
            row[sum(1 << (i - 1) for i in S)] = w(S, h)
        out.append(row)
    return out


def fce_call(w: WorthFunction, n: int) -> tuple[KernelCall, int]:
    """Tabulate ``w`` and the PFF value operator as integers; returns the call and the scale."""
    lay = layout(n)
    wt = worth_table(w, n)
    Lw = 1
    for row in wt:
        for x in row.values():
            Lw = math.lcm(Lw, x.denominator)
    op = pff_value_operator(n)
    Lop = 1
    for _, vec in op:
        for x in vec:
            Lop = math.lcm(Lop, x.denominator)
    op_ints = [[int(x * Lop) for x in vec] for _, vec in op]
    bits = _pair_bits(n)
    emb_coal, emb_keep = [], []
    for (C, P), _ in op:
        emb_coal.append(sum(1 << (i - 1) for i in C))
        label = {i: k for k, b in enumerate(P.blocks) for i in b}
        emb_keep.append(sum(b for (i, j), b in bits.items() if label[i] == label[j]))
    dense = [[0] * (1 << n) for _ in range(lay.networks)]
    for h, row in enumerate(wt):
        for S, x in row.items():
            dense[h][S] = int(x * Lw)
    pair_u = [i - 1 for i, _ in lay.pairs]
    pair_v = [j - 1 for _, j in lay.pairs]
    biggest = max((abs(x) for row in dense for x in row), default=0)
    colsum = max((sum(abs(r[i]) for r in op_ints) for i in range(n)), default=0)
    args = (pair_u, pair_v, dense, emb_coal, emb_keep, op_ints)
    return KernelCall("fce_sweep", n, args, biggest * n * max(colsum, 1) < INT64_SAFE), Lw * Lop


def run_fce_call(call: KernelCall, kern) -> list[list[int]]:
    networks = 1 << (call.n * (call.n - 1) // 2)
    if kern is _compiled:
        import numpy as np

        out = np.zeros((networks, call.n), dtype=np.int64)
        call.run(kern, out)
        return out.tolist()
    out = [None] * networks
    call.run(kern, out)
    return out


def fce_table(w: WorthFunction, n: int, backend: str | None = None) -> list[Allocation]:
    """FCE payoffs (closed form through the PFF value) at every network on ``n`` players."""
    call, scale = fce_call(w, n)
    kern = _pick(backend)
    if kern is _compiled and not call.safe_for_int64:
        kern = _kernels_py
    return [Allocation(Fraction(x, scale) for x in row) for row in run_fce_call(call, kern)]
