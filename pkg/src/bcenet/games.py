"""Game representations and the conversions between them.

Worth functions map ``(C, g)`` with ``C`` a component of ``g`` to an exact
rational.  TU games and partition function form (PFF) games are map-backed
with unlisted entries reading as zero.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Iterator, Mapping, NamedTuple

from .netcore import (
    LIMITS,
    DomainError,
    Network,
    Partition,
    Permutation,
    ResourceLimitError,
    apply_permutation,
    check_players,
    components,
    enumerate_partitions,
    fmt_set,
    induced_subnetwork,
    is_component,
    partition_by_graph,
    players,
    remove_players,
    restrict_to_partition,
    split,
)

Rational = Fraction


class InconsistencyError(ValueError):
    """Raised when data that must be consistent is not; carries a witness."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


def to_rational(x) -> Fraction:
    """Exact rational from int, Fraction or a ``"p/q"`` string.  Floats are refused."""
    if isinstance(x, bool):
        raise TypeError("booleans are not worths")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except ValueError:
            raise ValueError(f"not a rational: {x!r}") from None
    raise TypeError(f"cannot read {type(x).__name__} {x!r} as an exact rational")


def fmt_rational(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


class Allocation(tuple):
    """Payoff vector over players ``1..n``; ``x[i]`` is player ``i``'s payoff."""

    def __new__(cls, payoffs: Iterable = ()):
        return super().__new__(cls, (to_rational(p) for p in payoffs))

    @classmethod
    def zeros(cls, n: int) -> "Allocation":
        return cls([0] * n)

    @property
    def n(self) -> int:
        return tuple.__len__(self)

    def __getitem__(self, i):
        if isinstance(i, slice):
            raise TypeError("allocations are indexed by player, not sliced")
        if not 1 <= i <= self.n:
            raise IndexError(f"player {i} not in 1..{self.n}")
        return tuple.__getitem__(self, i - 1)

    def __add__(self, other: "Allocation") -> "Allocation":
        return Allocation(a + b for a, b in zip(self, other, strict=True))

    def __sub__(self, other: "Allocation") -> "Allocation":
        return Allocation(a - b for a, b in zip(self, other, strict=True))

    def scale(self, alpha) -> "Allocation":
        return Allocation(alpha * a for a in self)

    def total(self, S: Iterable[int] | None = None) -> Fraction:
        if S is None:
            return sum(self, Fraction(0))
        return sum((self[i] for i in S), Fraction(0))

    def __repr__(self):
        return "(" + ", ".join(fmt_rational(p) for p in self) + ")"


class TUGame:
    """Transferable-utility game; ``v(S)`` is 0 for unlisted coalitions."""

    def __init__(self, n: int, worths: Mapping[Iterable[int], object] | None = None):
        self.n = n
        self.worths: dict[frozenset[int], Fraction] = {}
        N = players(n)
        for S, x in (worths or {}).items():
            S = frozenset(S)
            if not S <= N:
                raise DomainError(f"coalition {fmt_set(S)} outside players 1..{n}")
            x = to_rational(x)
            if not S and x != 0:
                raise DomainError("the empty coalition must have worth 0")
            if S and x != 0:
                self.worths[S] = x

    def __call__(self, S: Iterable[int]) -> Fraction:
        return self.worths.get(frozenset(S), Fraction(0))

    def __eq__(self, other):
        return isinstance(other, TUGame) and (self.n, self.worths) == (other.n, other.worths)

    def __repr__(self):
        return f"TUGame(n={self.n}, {len(self.worths)} nonzero)"

    @classmethod
    def from_function(cls, n: int, f: Callable[[frozenset[int]], object]) -> "TUGame":
        return cls(n, {S: f(S) for S in subsets(players(n)) if S})

    @classmethod
    def unanimity(cls, n: int, T: Iterable[int]) -> "TUGame":
        T = frozenset(T)
        return cls.from_function(n, lambda S: 1 if T <= S else 0)


def subsets(S: Iterable[int]) -> Iterator[frozenset[int]]:
    elems = sorted(S)
    for r in range(len(elems) + 1):
        for c in itertools.combinations(elems, r):
            yield frozenset(c)


class EmbeddedCoalition(NamedTuple):
    coalition: frozenset[int]
    partition: Partition


@lru_cache(maxsize=None)
def _embedded(n: int) -> tuple[EmbeddedCoalition, ...]:
    return tuple(
        EmbeddedCoalition(C, P) for P in enumerate_partitions(n) for C in P.blocks
    )


def embedded_coalitions(n: int) -> tuple[EmbeddedCoalition, ...]:
    """Every ``(C, P)`` with ``C`` a block of ``P``, grouped by partition."""
    check_players(n, LIMITS.pff_players, "embedded coalitions")
    return _embedded(n)


class PFFGame:
    """Partition function form game; unlisted embedded coalitions read as 0."""

    def __init__(self, n: int, worths: Mapping[tuple, object] | None = None):
        self.n = n
        self.worths: dict[EmbeddedCoalition, Fraction] = {}
        for (C, P), x in (worths or {}).items():
            key = _embedded_key(n, C, P)
            x = to_rational(x)
            if x != 0:
                self.worths[key] = x

    def __call__(self, C: Iterable[int], P: Partition) -> Fraction:
        C = frozenset(C)
        if C not in P.blocks:
            raise DomainError(f"{fmt_set(C)} is not a block of {P!r}")
        return self.worths.get((C, P), Fraction(0))

    def __eq__(self, other):
        return isinstance(other, PFFGame) and (self.n, self.worths) == (other.n, other.worths)

    def __repr__(self):
        return f"PFFGame(n={self.n}, {len(self.worths)} nonzero)"

    def __add__(self, other: "PFFGame") -> "PFFGame":
        keys = set(self.worths) | set(other.worths)
        return PFFGame(self.n, {k: self(*k) + other(*k) for k in keys})

    def scale(self, alpha) -> "PFFGame":
        return PFFGame(self.n, {k: alpha * x for k, x in self.worths.items()})

    @classmethod
    def from_function(cls, n: int, f: Callable[[frozenset[int], Partition], object]) -> "PFFGame":
        return cls(n, {(C, P): f(C, P) for C, P in embedded_coalitions(n)})

    @classmethod
    def unanimity(cls, T: Iterable[int], Q: Partition) -> "PFFGame":
        """The game worth 1 at ``(C, P)`` iff ``T`` is inside ``C`` and ``Q`` refines ``P``."""
        T = frozenset(T)
        _embedded_key(Q.n, T, Q)  # validates
        return cls.from_function(Q.n, lambda C, P: 1 if T <= C and Q.refines(P) else 0)


def _embedded_key(n: int, C, P) -> EmbeddedCoalition:
    C = frozenset(C)
    if not isinstance(P, Partition):
        P = Partition.of(n, P)
    if P.n != n:
        raise DomainError(f"partition on {P.n} players in a game on {n}")
    if C not in P.blocks:
        raise DomainError(f"{fmt_set(C)} is not a block of {P!r}")
    return EmbeddedCoalition(C, P)


class WorthFunction:
    """Base class: evaluable at ``(C, g)`` for ``C`` a component of ``g`` only."""

    n: int

    def __call__(self, C: Iterable[int], g: Network) -> Fraction:
        C = frozenset(C)
        if g.n != self.n:
            raise DomainError(f"network on {g.n} players, worth function on {self.n}")
        if not is_component(C, g):
            raise DomainError(f"{fmt_set(C)} is not a component of {g!r}")
        return self._eval(C, g)

    def _eval(self, C: frozenset[int], g: Network) -> Fraction:
        raise NotImplementedError

    def __add__(self, other: "WorthFunction") -> "WorthFunction":
        return LinearCombination(self.n, [(1, self), (1, other)])

    def __rmul__(self, alpha) -> "WorthFunction":
        return LinearCombination(self.n, [(alpha, self)])


class TableWorth(WorthFunction):
    """Explicit table over ``(component, network)``; unlisted pairs read as 0."""

    def __init__(self, n: int, entries: Mapping[tuple, object] | None = None):
        self.n = n
        self.entries: dict[tuple[frozenset[int], Network], Fraction] = {}
        for (C, g), x in (entries or {}).items():
            C = frozenset(C)
            if g.n != n:
                raise DomainError(f"table network on {g.n} players, expected {n}")
            if not is_component(C, g):
                raise DomainError(f"table key {fmt_set(C)} is not a component of {g!r}")
            x = to_rational(x)
            if x != 0:
                self.entries[(C, g)] = x

    def _eval(self, C, g):
        return self.entries.get((C, g), Fraction(0))

    def __repr__(self):
        return f"TableWorth(n={self.n}, {len(self.entries)} nonzero)"


class TUWorth(WorthFunction):
    """``w(C, g) = v(C)`` for a TU game ``v``."""

    def __init__(self, game: TUGame):
        self.n = game.n
        self.game = game

    def _eval(self, C, g):
        return self.game(C)


class PFFWorth(WorthFunction):
    """``w_v(C, g) = v(C, N/g)``."""

    def __init__(self, game: PFFGame):
        self.n = game.n
        self.game = game

    def _eval(self, C, g):
        return self.game.worths.get((C, components(g)), Fraction(0))


class LinkedBeneficiary(WorthFunction):
    """Worth 1 for the component holding ``beneficiary`` whenever ``pair`` is joined.

    With ``requires="component"`` the pair counts as joined when both players
    share a component of the network; with ``requires="link"`` the link itself
    must be present.
    """

    def __init__(self, n: int, beneficiary: int, pair: tuple[int, int], requires: str = "component"):
        i, j = pair
        for k in (beneficiary, i, j):
            if not 1 <= k <= n:
                raise DomainError(f"player {k} outside 1..{n}")
        if i == j:
            raise DomainError("pair must name two distinct players")
        if requires not in ("component", "link"):
            raise ValueError(f"requires must be 'component' or 'link', got {requires!r}")
        self.n = n
        self.beneficiary = beneficiary
        self.pair = (min(i, j), max(i, j))
        self.requires = requires

    def _eval(self, C, g):
        if self.beneficiary not in C:
            return Fraction(0)
        i, j = self.pair
        if self.requires == "link":
            return Fraction(int((i, j) in g))
        return Fraction(int(components(g).block_of(i) == components(g).block_of(j)))

    def __repr__(self):
        return (
            f"LinkedBeneficiary(n={self.n}, beneficiary={self.beneficiary}, "
            f"pair={self.pair}, requires={self.requires!r})"
        )


class FunctionWorth(WorthFunction):
    """Wraps an arbitrary callable ``f(C, g)``; used for parametric and random games."""

    def __init__(self, n: int, f: Callable[[frozenset[int], Network], object], name: str = "f"):
        self.n = n
        self.f = f
        self.name = name

    def _eval(self, C, g):
        return to_rational(self.f(C, g))

    def __repr__(self):
        return f"FunctionWorth({self.name}, n={self.n})"


class LinearCombination(WorthFunction):
    def __init__(self, n: int, terms: list[tuple[object, WorthFunction]]):
        self.n = n
        self.terms = [(to_rational(a), w) for a, w in terms]

    def _eval(self, C, g):
        return sum((a * w._eval(C, g) for a, w in self.terms), Fraction(0))


class PermutedWorth(WorthFunction):
    """``(pi w)(S, h) = w(pi^-1 S, pi^-1 h)``."""

    def __init__(self, w: WorthFunction, pi: Permutation):
        self.n = w.n
        self.base = w
        self.pi = pi
        self.inv = pi.inverse()

    def _eval(self, C, g):
        return self.base._eval(self.inv.subset(C), apply_permutation(g, self.inv))


class ProjectedWorth(WorthFunction):
    """``w^g(C, h) = sum over S in C/g of w(S, g|_{N/h})``."""

    def __init__(self, w: WorthFunction, g: Network):
        if w.n != g.n:
            raise DomainError("worth function and network differ in player count")
        self.n = w.n
        self.base = w
        self.g = g

    def _eval(self, C, h):
        ref = restrict_to_partition(self.g, components(h))
        return sum((self.base(S, ref) for S in split(C, self.g)), Fraction(0))

    def __repr__(self):
        return f"ProjectedWorth({self.base!r}, {self.g!r})"


def eval_worth(w: WorthFunction, C: Iterable[int], g: Network) -> Fraction:
    return w(C, g)


def induced_worth_from_pff(v: PFFGame) -> PFFWorth:
    return PFFWorth(v)


def realizations(P: Partition) -> Iterator[Network]:
    """Every network ``h`` with ``N/h == P``."""
    per_block = []
    for B in P.blocks:
        pairs = list(itertools.combinations(sorted(B), 2))
        options = []
        for r in range(len(B) - 1, len(pairs) + 1):
            for chosen in itertools.combinations(pairs, r):
                h = Network(P.n, chosen)
                if is_component(B, h):
                    options.append(chosen)
        per_block.append(options or [()])
    for combo in itertools.product(*per_block):
        yield Network(P.n, [e for part in combo for e in part])


def canonical_realization(P: Partition) -> Network:
    """The network that is complete on each block of ``P``."""
    return Network(P.n, [e for B in P.blocks for e in itertools.combinations(sorted(B), 2)])


def pff_from_worth(w: WorthFunction, verify: bool = True, verify_cap: int = 5) -> PFFGame:
    """The PFF game ``v_w`` with ``w_{v_w} = w``.

    For PFF-induced and projected worth functions this is exact by
    construction.  Otherwise ``w`` is read off the network that is complete on
    each block and, when ``verify`` is set, every other realization of every
    partition is checked to agree (raising ``InconsistencyError`` with a
    witness if one does not).
    """
    if isinstance(w, PFFWorth):
        return w.game
    if isinstance(w, ProjectedWorth):
        return pff_from_projected(w.base, w.g)
    if verify:
        check_players(w.n, verify_cap, "partition-measurability check")
    entries = {}
    for P in enumerate_partitions(w.n):
        ref = canonical_realization(P)
        vals = {C: w(C, ref) for C in P.blocks}
        if verify:
            for h in realizations(P):
                for C in P.blocks:
                    x = w(C, h)
                    if x != vals[C]:
                        raise InconsistencyError(
                            f"worth of {fmt_set(C)} differs between {ref!r} ({vals[C]}) "
                            f"and {h!r} ({x}) although both have components {P!r}",
                            witness=(C, ref, h),
                        )
        entries.update({(C, P): x for C, x in vals.items()})
    return PFFGame(w.n, entries)


def project_worth(w: WorthFunction, g: Network) -> ProjectedWorth:
    return ProjectedWorth(w, g)


def graph_restrict_pff(v: PFFGame, g: Network) -> PFFGame:
    """``v^g(C, P) = sum over S in C/g of v(S, g/P)``."""
    if v.n != g.n:
        raise DomainError("game and network differ in player count")
    entries = {}
    for C, P in embedded_coalitions(v.n):
        gP = partition_by_graph(P, g)
        entries[(C, P)] = sum((v(S, gP) for S in split(C, g)), Fraction(0))
    return PFFGame(v.n, entries)


def pff_from_projected(w: WorthFunction, g: Network) -> PFFGame:
    """``v_{w^g}(C, P) = sum over S in C/g of w(S, g|_P)``."""
    if w.n != g.n:
        raise DomainError("worth function and network differ in player count")
    entries = {}
    for P in enumerate_partitions(w.n):
        gP = restrict_to_partition(g, P)
        for C in P.blocks:
            entries[(C, P)] = sum((w(S, gP) for S in split(C, g)), Fraction(0))
    return PFFGame(w.n, entries)


def graph_restrict_tu(v: TUGame, g: Network) -> TUGame:
    """``v^g(S) = sum over C in S/g of v(C)``."""
    return TUGame.from_function(v.n, lambda S: sum((v(C) for C in split(S, g)), Fraction(0)))


def jw_tu_game(w: WorthFunction, g: Network) -> TUGame:
    """``v^JW(S) = sum over C in S/g of w(C, g_{-(N minus S)})``.

    Each ``C`` is a genuine component of ``g_{-(N minus S)}``; for worth
    functions without externalities this is the usual ``w(C, g|_C)``.
    """
    N = players(w.n)

    def worth(S):
        h = remove_players(g, N - S)
        return sum((w(C, h) for C in split(S, g)), Fraction(0))

    return TUGame.from_function(w.n, worth)


def ef_tu_game(v: PFFGame | WorthFunction) -> TUGame:
    """Each coalition evaluated with every outsider standing alone.

    For a PFF game ``v(S, {S} + singletons)``; for a worth function
    ``w(S, g^S)`` with ``g^S`` complete on ``S``.
    """
    n = v.n
    if isinstance(v, PFFGame):
        def worth(S):
            P = Partition.of(n, [S] + [{j} for j in range(1, n + 1) if j not in S])
            return v(S, P)
    else:
        def worth(S):
            return v(S, Network.complete(n, S))
    return TUGame.from_function(n, worth)


def is_externality_free(w: WorthFunction, g: Network):
    """Check ``w(C, h) == w(C, h|_C)`` for every link subset ``h`` of ``g``.

    Returns ``(True, None)`` or ``(False, (C, h))`` with the first offending pair.
    """
    if len(g) > LIMITS.links:
        raise ResourceLimitError(f"{len(g)} links exceed cap {LIMITS.links}")
    for h in g.subnetworks():
        for C in components(h).blocks:
            if w(C, h) != w(C, induced_subnetwork(h, C)):
                return False, (C, h)
    return True, None
