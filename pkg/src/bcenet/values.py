"""Allocation rules.

Shapley, Myerson, Jackson-Wolinsky, the externality-free value, the PFF value
through unanimity dividends, the FCE rule (closed form and direct recursion),
the BCE rule, and an independent linear-system oracle.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable

from .games import (
    Allocation,
    EmbeddedCoalition,
    PFFGame,
    PFFWorth,
    TUGame,
    WorthFunction,
    ef_tu_game,
    embedded_coalitions,
    graph_restrict_tu,
    jw_tu_game,
    pff_from_projected,
)
from .linalg import solve_exact
from .netcore import (
    LIMITS,
    BfsTree,
    DomainError,
    Network,
    Partition,
    ResourceLimitError,
    check_players,
    components,
    fmt_set,
    minimal_index_bfs,
    partitions_of,
    remove_players,
    tree_from_forest,
)


class WorthEvaluationError(DomainError):
    """A worth function failed while a rule was evaluating it."""

    def __init__(self, C, g, cause):
        super().__init__(f"evaluating w({fmt_set(C)}, {g!r}): {cause}")
        self.coalition = frozenset(C)
        self.network = g


def _worth(w: WorthFunction, C, g: Network) -> Fraction:
    try:
        return w(C, g)
    except WorthEvaluationError:
        raise
    except (DomainError, ValueError, TypeError) as e:
        raise WorthEvaluationError(C, g, e) from e


# -- TU values ---------------------------------------------------------------

def shapley(v: TUGame) -> Allocation:
    n = v.n
    check_players(n)
    vals = [v(frozenset(i + 1 for i in range(n) if mask >> i & 1)) for mask in range(1 << n)]
    weight = [Fraction(math.factorial(s) * math.factorial(n - s - 1), math.factorial(n)) for s in range(n)]
    phi = []
    for i in range(n):
        bit = 1 << i
        total = Fraction(0)
        for mask in range(1 << n):
            if mask & bit:
                continue
            d = vals[mask | bit] - vals[mask]
            if d:
                total += weight[mask.bit_count()] * d
        phi.append(total)
    return Allocation(phi)


def myerson(v: TUGame, g: Network) -> Allocation:
    return shapley(graph_restrict_tu(v, g))


def jw_value(w: WorthFunction, g: Network) -> Allocation:
    return shapley(jw_tu_game(w, g))


def ef_value(v: PFFGame | WorthFunction) -> Allocation:
    """Shapley value of the game where each coalition faces isolated outsiders."""
    return shapley(ef_tu_game(v))


# -- PFF value -----------------------------------------------------------------

@dataclass
class DividendTable:
    """Coefficients of a PFF game in the unanimity basis."""

    n: int
    coefficients: dict[EmbeddedCoalition, Fraction]

    def __getitem__(self, key) -> Fraction:
        return self.coefficients.get(key, Fraction(0))

    def nonzero(self) -> list[tuple[EmbeddedCoalition, Fraction]]:
        return [(k, b) for k, b in self.coefficients.items() if b != 0]


def _order_key(x: EmbeddedCoalition):
    return (len(x.coalition), -len(x.partition))


@lru_cache(maxsize=None)
def _refinements(P: Partition) -> tuple[Partition, ...]:
    per_block = [list(partitions_of(B)) for B in P.blocks]
    return tuple(
        Partition(P.n, tuple(sorted((b for part in combo for b in part), key=min)))
        for combo in itertools.product(*per_block)
    )


@lru_cache(maxsize=None)
def _coarsenings(P: Partition) -> tuple[Partition, ...]:
    out = []
    for grouping in partitions_of(range(len(P.blocks))):
        blocks = [frozenset().union(*(P.blocks[k] for k in grp)) for grp in grouping]
        out.append(Partition(P.n, tuple(sorted(blocks, key=min))))
    return tuple(out)


def pff_dividends(v: PFFGame) -> DividendTable:
    """Unanimity coefficients by a single pass of the Moebius recursion.

    Embedded coalitions are processed by coalition size ascending, then block
    count descending, so every strict predecessor is already known.
    """
    check_players(v.n, LIMITS.pff_players, "dividends")
    order = sorted(embedded_coalitions(v.n), key=_order_key)
    b: dict[EmbeddedCoalition, Fraction] = {}
    for T, Q in order:
        acc = v.worths.get((T, Q), Fraction(0))
        for Q2 in _refinements(Q):
            for C2 in Q2.blocks:
                if C2 <= T and not (C2 == T and Q2 == Q):
                    acc -= b[(C2, Q2)]
        b[EmbeddedCoalition(T, Q)] = acc
    return DividendTable(v.n, b)


def pff_value(v: PFFGame) -> Allocation:
    """Each dividend split equally among the members of its coalition."""
    phi = [Fraction(0)] * v.n
    for (T, _), coef in pff_dividends(v).nonzero():
        share = coef / len(T)
        for i in T:
            phi[i - 1] += share
    return Allocation(phi)


@lru_cache(maxsize=None)
def pff_value_operator(n: int) -> tuple[tuple[EmbeddedCoalition, tuple[Fraction, ...]], ...]:
    """The linear map ``v -> pff_value(v)`` as sparse per-coalition weight vectors.

    Solves the transposed zeta system from the top of the order down:
    ``a(x) = c(x) - sum of a(y) over strict successors y``, where ``c(x)`` is the
    equal split of a unit dividend on ``x``.
    """
    check_players(n, LIMITS.pff_players, "PFF value operator")
    order = sorted(embedded_coalitions(n), key=_order_key, reverse=True)
    a: dict[EmbeddedCoalition, list[Fraction]] = {}
    for C, P in order:
        vec = [Fraction(1, len(C)) if i in C else Fraction(0) for i in range(1, n + 1)]
        for Q in _coarsenings(P):
            T = Q.block_of(min(C))
            if Q == P:
                continue
            succ = a[(T, Q)]
            for k in range(n):
                vec[k] -= succ[k]
        a[EmbeddedCoalition(C, P)] = vec
    return tuple((x, tuple(vec)) for x, vec in a.items() if any(vec))


def pff_value_linear(v: PFFGame) -> Allocation:
    """Same as ``pff_value`` but through the precomputed linear operator."""
    phi = [Fraction(0)] * v.n
    for x, vec in pff_value_operator(v.n):
        val = v.worths.get(x)
        if val:
            for k in range(v.n):
                if vec[k]:
                    phi[k] += vec[k] * val
    return Allocation(phi)


# -- tree-based recursions -----------------------------------------------------

def _tree_allocation(C: frozenset[int], tree: BfsTree, worth: Fraction, edge_gap) -> dict[int, Fraction]:
    """Offsets along ``tree`` from ``edge_gap(child, parent)``, then equal split of the rest."""
    offset = {tree.root: Fraction(0)}
    for j in tree.order[1:]:
        p = tree.parent[j]
        offset[j] = offset[p] + edge_gap(j, p)
    share = (worth - sum(offset.values())) / len(C)
    return {i: share + offset[i] for i in C}


TreeChooser = Callable[[Network, frozenset], BfsTree]


class BceSolver:
    """Memoized BCE rule for one worth function.

    The cache key is the network itself, so ``g_{-D}`` reached through
    different deletion orders is computed once.  ``choose_tree`` replaces the
    minimal-index BFS tree; any spanning tree gives the same rule.
    """

    def __init__(self, w: WorthFunction, choose_tree: TreeChooser | None = None):
        self.w = w
        self.choose_tree = choose_tree or minimal_index_bfs
        self.cache: dict[Network, Allocation] = {}

    def __call__(self, g: Network) -> Allocation:
        hit = self.cache.get(g)
        if hit is not None:
            return hit
        if g.n != self.w.n:
            raise DomainError("worth function and network differ in player count")
        check_players(g.n)
        phi: dict[int, Fraction] = {}
        for C in components(g).blocks:
            worth = _worth(self.w, C, g)
            if len(C) == 1:
                phi[min(C)] = worth
                continue
            tree = self.choose_tree(g, C)

            def gap(j, p, g=g):
                # BCE_j(g_{-p}) - BCE_p(g_{-j})
                return self(remove_players(g, (p,)))[j] - self(remove_players(g, (j,)))[p]

            phi.update(_tree_allocation(C, tree, worth, gap))
        out = Allocation(phi[i] for i in range(1, g.n + 1))
        self.cache[g] = out
        return out

    def offsets(self, g: Network) -> dict[frozenset[int], dict[int, Fraction]]:
        """The per-component offsets (``root -> 0``) used at ``g``."""
        result = {}
        for C in components(g).blocks:
            if len(C) == 1:
                continue
            tree = self.choose_tree(g, C)
            off = {tree.root: Fraction(0)}
            for j in tree.order[1:]:
                p = tree.parent[j]
                off[j] = off[p] + self(remove_players(g, (p,)))[j] - self(remove_players(g, (j,)))[p]
            result[C] = off
        return result


def bce(w: WorthFunction, g: Network) -> Allocation:
    """The unique component-efficient rule with balanced contributions on every link."""
    return BceSolver(w)(g)


def bce_with_forest(w: WorthFunction, g: Network, forest: Iterable) -> Allocation:
    """BCE built on ``forest`` at ``g`` instead of the minimal-index BFS forest.

    Subnetworks reached by the recursion use the default trees.
    """
    forest = frozenset((min(e), max(e)) for e in forest)
    for e in forest:
        if e not in g:
            raise DomainError(f"forest link {{{e[0]},{e[1]}}} is not in the network")
    comps = [C for C in components(g).blocks if len(C) > 1]
    if len(forest) != sum(len(C) - 1 for C in comps):
        raise DomainError("forest does not span every component exactly")
    trees = {C: tree_from_forest(forest, C) for C in comps}

    def choose(h, C):
        if h == g:
            return trees[C]
        return minimal_index_bfs(h, C)

    return BceSolver(w, choose)(g)


class FceSolver:
    """Component efficiency plus fairness, by induction over single-link deletions."""

    def __init__(self, w: WorthFunction):
        self.w = w
        self.cache: dict[Network, Allocation] = {}

    def __call__(self, g: Network) -> Allocation:
        hit = self.cache.get(g)
        if hit is not None:
            return hit
        if len(g) > LIMITS.links:
            raise ResourceLimitError(f"{len(g)} links exceed cap {LIMITS.links}")
        phi: dict[int, Fraction] = {}
        for C in components(g).blocks:
            worth = _worth(self.w, C, g)
            if len(C) == 1:
                phi[min(C)] = worth
                continue

            def gap(j, p, g=g):
                smaller = self(g.without_link((j, p)))
                return smaller[j] - smaller[p]

            phi.update(_tree_allocation(C, minimal_index_bfs(g, C), worth, gap))
        out = Allocation(phi[i] for i in range(1, g.n + 1))
        self.cache[g] = out
        return out


def fce_direct(w: WorthFunction, g: Network) -> Allocation:
    return FceSolver(w)(g)


def fce_formula(w: WorthFunction, g: Network) -> Allocation:
    """PFF value of the game induced by the ``g``-projection of ``w``."""
    check_players(w.n, LIMITS.pff_players, "FCE formula")
    return pff_value_linear(pff_from_projected(w, g))


class FceFormula:
    """``fce_formula`` with a per-network cache, for sweeps over many networks."""

    def __init__(self, w: WorthFunction):
        self.w = w
        self.cache: dict[Network, Allocation] = {}

    def __call__(self, g: Network) -> Allocation:
        hit = self.cache.get(g)
        if hit is None:
            hit = self.cache[g] = fce_formula(self.w, g)
        return hit


def pff_bce(v: PFFGame, g: Network) -> Allocation:
    return bce(PFFWorth(v), g)


def pff_fce(v: PFFGame, g: Network) -> Allocation:
    return fce_formula(PFFWorth(v), g)


# -- oracle --------------------------------------------------------------------

@dataclass
class SystemReport:
    network: Network
    component: frozenset[int]
    equations: int
    unknowns: int
    rank: int
    consistent: bool
    rows: list = field(default_factory=list, repr=False)

    @property
    def full_rank(self) -> bool:
        return self.rank == self.unknowns


@dataclass
class OracleReport:
    axiom: str
    allocation: Allocation | None
    systems: list[SystemReport]

    @property
    def consistent(self) -> bool:
        return all(s.consistent for s in self.systems)

    @property
    def full_rank(self) -> bool:
        return all(s.full_rank for s in self.systems)

    @property
    def failure(self) -> SystemReport | None:
        return next((s for s in self.systems if not (s.consistent and s.full_rank)), None)


class _OracleFailure(Exception):
    pass


def oracle_solve(w: WorthFunction, g: Network, axiom: str = "BC") -> OracleReport:
    """Solve the full overdetermined CE + axiom system for every component, recursively.

    Every link of a component contributes one equation (not just tree links).
    Right-hand sides come from the oracle's own solutions on smaller networks.
    Inconsistent or rank-deficient systems stop the recursion and are reported.
    """
    axiom = axiom.upper()
    if axiom not in ("BC", "F"):
        raise ValueError(f"axiom must be BC or F, got {axiom!r}")
    if axiom == "F" and len(g) > LIMITS.links:
        raise ResourceLimitError(f"{len(g)} links exceed cap {LIMITS.links}")
    memo: dict[Network, Allocation] = {}
    systems: list[SystemReport] = []

    def solve(h: Network) -> Allocation:
        if h in memo:
            return memo[h]
        x = [Fraction(0)] * h.n
        for C in components(h).blocks:
            members = sorted(C)
            col = {i: k for k, i in enumerate(members)}
            A = [[1] * len(members)]
            b = [_worth(w, C, h)]
            for i, j in h.links:
                if i not in C:
                    continue
                if axiom == "BC":
                    rhs = solve(remove_players(h, (j,)))[i] - solve(remove_players(h, (i,)))[j]
                else:
                    smaller = solve(h.without_link((i, j)))
                    rhs = smaller[i] - smaller[j]
                row = [0] * len(members)
                row[col[i]], row[col[j]] = 1, -1
                A.append(row)
                b.append(rhs)
            res = solve_exact(A, b)
            rep = SystemReport(h, C, len(A), len(members), res.rank, res.consistent)
            systems.append(rep)
            if res.solution is None:
                rep.rows = list(zip(A, b))
                raise _OracleFailure
            for i, val in zip(members, res.solution):
                x[i - 1] = val
        memo[h] = Allocation(x)
        return memo[h]

    try:
        alloc = solve(g)
    except _OracleFailure:
        alloc = None
    return OracleReport(axiom, alloc, systems)
