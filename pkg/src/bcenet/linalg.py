"""Exact linear systems via fraction-free (Bareiss) elimination."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


@dataclass
class SolveResult:
    rank: int
    augmented_rank: int
    unknowns: int
    solution: tuple[Fraction, ...] | None

    @property
    def consistent(self) -> bool:
        return self.rank == self.augmented_rank

    @property
    def full_rank(self) -> bool:
        return self.rank == self.unknowns


def _integer_row(row: Sequence) -> list[int]:
    row = [Fraction(x) for x in row]
    L = math.lcm(*(x.denominator for x in row)) if row else 1
    return [int(x * L) for x in row]


def bareiss_echelon(rows: list[list[int]], ncols: int) -> tuple[list[list[int]], list[int]]:
    """Row echelon form of an integer matrix by Bareiss elimination.

    Works on the first ``ncols`` columns; any further columns ride along.
    Returns the reduced rows and the pivot columns.  All entries stay integral.
    """
    m = [list(r) for r in rows]
    pivots: list[int] = []
    prev = 1
    r = 0
    for c in range(ncols):
        if r == len(m):
            break
        k = next((k for k in range(r, len(m)) if m[k][c] != 0), None)
        if k is None:
            continue
        m[r], m[k] = m[k], m[r]
        p = m[r][c]
        for k in range(r + 1, len(m)):
            a = m[k][c]
            m[k] = [(p * m[k][t] - a * m[r][t]) // prev for t in range(len(m[k]))]
        prev = p
        pivots.append(c)
        r += 1
    return m, pivots


def solve_exact(A: Sequence[Sequence], b: Sequence) -> SolveResult:
    """Solve ``A x = b`` exactly, reporting rank and consistency.

    ``solution`` is set only when the system is consistent with full column rank.
    """
    nvars = len(A[0]) if A else 0
    rows = [_integer_row(list(a) + [bi]) for a, bi in zip(A, b)]
    m, pivots = bareiss_echelon(rows, nvars)
    rank = len(pivots)
    aug_rank = rank + sum(1 for row in m[rank:] if row[nvars] != 0)
    res = SolveResult(rank, min(aug_rank, rank + 1), nvars, None)
    if not (res.consistent and res.full_rank):
        return res
    x = [Fraction(0)] * nvars
    for r in range(rank - 1, -1, -1):
        c = pivots[r]
        acc = Fraction(m[r][nvars]) - sum(m[r][t] * x[t] for t in range(c + 1, nvars))
        x[c] = acc / m[r][c]
    res.solution = tuple(x)
    return res
