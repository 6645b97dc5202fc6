"""Graph substrate: players, networks, partitions, BFS trees, cycles, permutations.

Players are the integers ``1..n``.  A player subset is a ``frozenset[int]``.
Networks always carry their player count, so isolated players remain
first-class members and ``g.remove_players(D)`` keeps the player set intact.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Sequence


class DomainError(ValueError):
    """An operation was called outside the domain where it is defined."""


class ResourceLimitError(RuntimeError):
    """An enumeration would exceed a configured size cap."""


@dataclass
class Limits:
    players: int = 16
    pff_players: int = 10
    links: int = 20


LIMITS = Limits()


def check_players(n: int, cap: int | None = None, what: str = "players") -> None:
    cap = LIMITS.players if cap is None else cap
    if n > cap:
        raise ResourceLimitError(f"{what}: n={n} exceeds cap {cap}")


PlayerSet = frozenset


def players(n: int) -> frozenset[int]:
    return frozenset(range(1, n + 1))


def fmt_set(s: Iterable[int]) -> str:
    return "{" + ",".join(str(i) for i in sorted(s)) + "}"


@lru_cache(maxsize=None)
def _pair_bits(n: int) -> dict[tuple[int, int], int]:
    bits = {}
    for k, pair in enumerate(itertools.combinations(range(1, n + 1), 2)):
        bits[pair] = 1 << k
    return bits


class Network:
    """An undirected simple graph on players ``1..n``.

    Links are stored canonically as sorted ``(min, max)`` pairs.  Equality and
    hashing go through a bitmask over all possible pairs, so networks reached by
    different deletion orders collide in memo tables.
    """

    __slots__ = ("n", "links", "mask")

    def __init__(self, n: int, links: Iterable[Sequence[int]] = ()):
        if n < 1:
            raise DomainError(f"player count must be >= 1, got {n}")
        check_players(n)
        bits = _pair_bits(n)
        mask = 0
        for link in links:
            i, j = link
            if i == j:
                raise DomainError(f"self-loop at player {i}")
            if not (1 <= i <= n and 1 <= j <= n):
                raise DomainError(f"link {{{i},{j}}} has an endpoint outside 1..{n}")
            b = bits[(i, j) if i < j else (j, i)]
            if mask & b:
                raise DomainError(f"duplicate link {{{min(i, j)},{max(i, j)}}}")
            mask |= b
        self._set(n, mask)

    def _set(self, n: int, mask: int) -> None:
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "mask", mask)
        object.__setattr__(
            self, "links", tuple(p for p, b in _pair_bits(n).items() if mask & b)
        )

    @classmethod
    def from_mask(cls, n: int, mask: int) -> "Network":
        g = cls.__new__(cls)
        g._set(n, mask)
        return g

    @classmethod
    def empty(cls, n: int) -> "Network":
        return cls.from_mask(n, 0)

    @classmethod
    def complete(cls, n: int, on: Iterable[int] | None = None) -> "Network":
        """Complete network on ``on`` (default: all players); others isolated."""
        members = sorted(players(n) if on is None else on)
        return cls(n, itertools.combinations(members, 2))

    def __setattr__(self, name, value):
        raise AttributeError("Network is immutable")

    def __eq__(self, other):
        if not isinstance(other, Network):
            return NotImplemented
        return self.n == other.n and self.mask == other.mask

    def __hash__(self):
        return hash((self.n, self.mask))

    def __len__(self):
        return len(self.links)

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(self.links)

    def __contains__(self, link) -> bool:
        i, j = link
        b = _pair_bits(self.n).get((i, j) if i < j else (j, i))
        return b is not None and bool(self.mask & b)

    def __le__(self, other: "Network") -> bool:
        return self.n == other.n and (self.mask & ~other.mask) == 0

    def __repr__(self):
        body = ",".join(f"{{{i},{j}}}" for i, j in self.links)
        return f"Network(n={self.n}, {{{body}}})"

    @property
    def players(self) -> frozenset[int]:
        return players(self.n)

    def neighbors(self, i: int) -> tuple[int, ...]:
        return _adjacency(self)[i]

    def components(self) -> "Partition":
        return components(self)

    def remove_players(self, D: Iterable[int]) -> "Network":
        return remove_players(self, D)

    def without_link(self, link: Sequence[int]) -> "Network":
        i, j = link
        b = _pair_bits(self.n)[(i, j) if i < j else (j, i)]
        if not self.mask & b:
            raise DomainError(f"link {{{i},{j}}} not in network")
        return Network.from_mask(self.n, self.mask & ~b)

    def subnetworks(self) -> Iterator["Network"]:
        """All link subsets of this network (``2**len(self)`` of them)."""
        bits = [b for b in _pair_bits(self.n).values() if self.mask & b]
        for r in range(len(bits) + 1):
            for chosen in itertools.combinations(bits, r):
                yield Network.from_mask(self.n, sum(chosen))


@lru_cache(maxsize=1 << 16)
def _adjacency(g: Network) -> dict[int, tuple[int, ...]]:
    adj: dict[int, list[int]] = {i: [] for i in range(1, g.n + 1)}
    for i, j in g.links:
        adj[i].append(j)
        adj[j].append(i)
    return {i: tuple(sorted(v)) for i, v in adj.items()}


@dataclass(frozen=True)
class Partition:
    """A partition of ``1..n`` into nonempty blocks, sorted by minimum element."""

    n: int
    blocks: tuple[frozenset[int], ...]

    @classmethod
    def of(cls, n: int, blocks: Iterable[Iterable[int]]) -> "Partition":
        bl = [frozenset(b) for b in blocks]
        seen: set[int] = set()
        for b in bl:
            if not b:
                raise DomainError("partition has an empty block")
            if seen & b:
                raise DomainError(f"blocks overlap on {fmt_set(seen & b)}")
            seen |= b
        if seen != players(n):
            raise DomainError(f"blocks do not cover players 1..{n}")
        return cls(n, tuple(sorted(bl, key=min)))

    @classmethod
    def singletons(cls, n: int) -> "Partition":
        return cls(n, tuple(frozenset({i}) for i in range(1, n + 1)))

    @classmethod
    def grand(cls, n: int) -> "Partition":
        return cls(n, (players(n),))

    def __iter__(self) -> Iterator[frozenset[int]]:
        return iter(self.blocks)

    def __len__(self):
        return len(self.blocks)

    def __contains__(self, block) -> bool:
        return frozenset(block) in self.blocks

    def block_of(self, i: int) -> frozenset[int]:
        for b in self.blocks:
            if i in b:
                return b
        raise DomainError(f"player {i} not in partition")

    def refines(self, other: "Partition") -> bool:
        """True if every block of ``self`` lies inside a block of ``other``."""
        return all(any(b <= c for c in other.blocks) for b in self.blocks)

    def __repr__(self):
        return "Partition(" + "|".join(fmt_set(b) for b in self.blocks) + ")"


def split(S: Iterable[int], g: Network) -> tuple[frozenset[int], ...]:
    """``S/g``: the connected pieces of ``g|_S``, sorted by minimum."""
    S = frozenset(S)
    adj = _adjacency(g)
    out = []
    seen: set[int] = set()
    for r in sorted(S):
        if r in seen:
            continue
        comp = {r}
        stack = [r]
        while stack:
            k = stack.pop()
            for m in adj[k]:
                if m in S and m not in comp:
                    comp.add(m)
                    stack.append(m)
        seen |= comp
        out.append(frozenset(comp))
    return tuple(out)


@lru_cache(maxsize=1 << 16)
def components(g: Network) -> Partition:
    """``N/g``; isolated players come out as singleton blocks."""
    return Partition(g.n, split(range(1, g.n + 1), g))


def is_component(C: Iterable[int], g: Network) -> bool:
    return frozenset(C) in components(g).blocks


def _check_subset(S: Iterable[int], n: int) -> frozenset[int]:
    S = frozenset(S)
    bad = [i for i in S if not (isinstance(i, int) and 1 <= i <= n)]
    if bad:
        raise DomainError(f"unknown players {sorted(bad)} (players are 1..{n})")
    return S


def induced_subnetwork(g: Network, S: Iterable[int]) -> Network:
    """``g|_S``: links with both endpoints in ``S``."""
    S = _check_subset(S, g.n)
    bits = _pair_bits(g.n)
    keep = sum(b for (i, j), b in bits.items() if i in S and j in S)
    return Network.from_mask(g.n, g.mask & keep)


def remove_players(g: Network, D: Iterable[int]) -> Network:
    """``g_{-D}``: delete every link incident to a player in ``D``."""
    D = frozenset(D)
    if not D:
        return g
    bits = _pair_bits(g.n)
    drop = sum(b for (i, j), b in bits.items() if i in D or j in D)
    return Network.from_mask(g.n, g.mask & ~drop)


def restrict_to_partition(g: Network, P: Partition) -> Network:
    """``g|_P``: keep only links inside a single block of ``P``."""
    if P.n != g.n:
        raise DomainError("partition and network have different player counts")
    bits = _pair_bits(g.n)
    label = {i: k for k, b in enumerate(P.blocks) for i in b}
    keep = sum(b for (i, j), b in bits.items() if label[i] == label[j])
    return Network.from_mask(g.n, g.mask & keep)


def partition_by_graph(P: Partition, g: Network) -> Partition:
    """``g/P``: split every block of ``P`` into its ``g``-connected pieces."""
    pieces = [piece for b in P.blocks for piece in split(b, g)]
    return Partition(P.n, tuple(sorted(pieces, key=min)))


@dataclass(frozen=True)
class BfsTree:
    """A rooted spanning tree of one component."""

    root: int
    parent: Mapping[int, int]
    order: tuple[int, ...]

    @property
    def members(self) -> frozenset[int]:
        return frozenset(self.order)

    def edges(self) -> frozenset[tuple[int, int]]:
        return frozenset((min(j, p), max(j, p)) for j, p in self.parent.items())

    def path_to_root(self, i: int) -> list[int]:
        path = [i]
        while path[-1] != self.root:
            path.append(self.parent[path[-1]])
        return path


def _bfs(C: frozenset[int], adj: Mapping[int, Sequence[int]]) -> BfsTree:
    root = min(C)
    parent: dict[int, int] = {}
    order = [root]
    seen = {root}
    queue = deque([root])
    while queue:
        i = queue.popleft()
        for j in adj[i]:
            if j in C and j not in seen:
                seen.add(j)
                parent[j] = i
                order.append(j)
                queue.append(j)
    if seen != C:
        raise DomainError(f"{fmt_set(C)} is not connected by the given links")
    return BfsTree(root, parent, tuple(order))


def minimal_index_bfs(g: Network, C: Iterable[int]) -> BfsTree:
    """BFS tree of component ``C`` from ``min(C)``, neighbors taken in ascending order."""
    C = frozenset(C)
    if not is_component(C, g):
        raise DomainError(f"{fmt_set(C)} is not a component of {g!r}")
    return _bfs(C, _adjacency(g))


def tree_from_forest(forest: Iterable[Sequence[int]], C: Iterable[int]) -> BfsTree:
    """Root the part of ``forest`` spanning ``C`` at ``min(C)``."""
    C = frozenset(C)
    adj: dict[int, list[int]] = {i: [] for i in C}
    for i, j in forest:
        if i in C and j in C:
            adj[i].append(j)
            adj[j].append(i)
    return _bfs(C, {i: sorted(v) for i, v in adj.items()})


def spanning_forests(g: Network) -> Iterator[frozenset[tuple[int, int]]]:
    """Every spanning forest of ``g`` (one spanning tree per component)."""
    comps = components(g).blocks
    per_comp = []
    for C in comps:
        if len(C) == 1:
            continue
        links = [e for e in g.links if e[0] in C]
        trees = []
        for chosen in itertools.combinations(links, len(C) - 1):
            try:
                tree_from_forest(chosen, C)
            except DomainError:
                continue
            trees.append(chosen)
        per_comp.append(trees)
    for combo in itertools.product(*per_comp):
        yield frozenset(e for tree in combo for e in tree)


@dataclass(frozen=True)
class Cycle:
    vertices: tuple[int, ...]

    def __post_init__(self):
        if len(self.vertices) < 3:
            raise DomainError("a cycle needs at least 3 players")
        if len(set(self.vertices)) != len(self.vertices):
            raise DomainError(f"cycle repeats a player: {self.vertices}")

    def __len__(self):
        return len(self.vertices)

    def edges(self) -> list[tuple[int, int]]:
        """Consecutive pairs ``(i_s, i_{s+1})`` including the wrap-around."""
        v = self.vertices
        return [(v[s], v[(s + 1) % len(v)]) for s in range(len(v))]

    def check_in(self, g: Network) -> None:
        for i, j in self.edges():
            if (i, j) not in g:
                raise DomainError(f"{{{i},{j}}} of cycle {self.vertices} is not a link")


def fundamental_cycle(tree: BfsTree, e: Sequence[int]) -> Cycle:
    """The cycle formed by non-tree link ``e`` and the tree path between its ends.

    The cycle starts at the smaller endpoint ``a`` of ``e``, follows the tree
    path to the larger endpoint ``b`` and closes through ``e``.
    """
    a, b = sorted(e)
    if (a, b) in tree.edges():
        raise DomainError(f"{{{a},{b}}} is a tree edge")
    if a not in tree.members or b not in tree.members:
        raise DomainError(f"{{{a},{b}}} is not inside the tree's component")
    up_a = tree.path_to_root(a)
    up_b = tree.path_to_root(b)
    on_b = set(up_b)
    k = next(k for k, x in enumerate(up_a) if x in on_b)
    lca = up_a[k]
    down = up_b[: up_b.index(lca)]
    return Cycle(tuple(up_a[: k + 1]) + tuple(reversed(down)))


def cycles(g: Network) -> Iterator[Cycle]:
    """All simple cycles of ``g``, each once.

    A cycle is reported starting at its smallest player, with the second
    player smaller than the last one.
    """
    adj = _adjacency(g)
    for start in range(1, g.n + 1):
        path = [start]
        on_path = {start}

        def extend(i: int) -> Iterator[Cycle]:
            for j in adj[i]:
                if j <= start:
                    if j == start and len(path) >= 3 and path[1] < path[-1]:
                        yield Cycle(tuple(path))
                    continue
                if j in on_path:
                    continue
                path.append(j)
                on_path.add(j)
                yield from extend(j)
                path.pop()
                on_path.discard(j)

        yield from extend(start)


@dataclass(frozen=True)
class Permutation:
    """A bijection on ``1..n``; ``mapping[i-1]`` is the image of ``i``."""

    mapping: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.mapping) != list(range(1, len(self.mapping) + 1)):
            raise DomainError(f"not a permutation of 1..{len(self.mapping)}: {self.mapping}")

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def transposition(cls, n: int, i: int, j: int) -> "Permutation":
        m = list(range(1, n + 1))
        m[i - 1], m[j - 1] = j, i
        return cls(tuple(m))

    @property
    def n(self) -> int:
        return len(self.mapping)

    def __call__(self, i: int) -> int:
        return self.mapping[i - 1]

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, j in enumerate(self.mapping, start=1):
            inv[j - 1] = i
        return Permutation(tuple(inv))

    def then(self, other: "Permutation") -> "Permutation":
        """Apply ``self`` first, then ``other``."""
        return Permutation(tuple(other(self(i)) for i in range(1, self.n + 1)))

    def subset(self, S: Iterable[int]) -> frozenset[int]:
        return frozenset(self(i) for i in S)


def all_permutations(n: int) -> Iterator[Permutation]:
    for p in itertools.permutations(range(1, n + 1)):
        yield Permutation(p)


def apply_permutation(g: Network, pi: Permutation) -> Network:
    if pi.n != g.n:
        raise DomainError("permutation and network have different player counts")
    return Network(g.n, ((pi(i), pi(j)) for i, j in g.links))


def apply_permutation_partition(P: Partition, pi: Permutation) -> Partition:
    return Partition.of(P.n, (pi.subset(b) for b in P.blocks))


def apply_permutation_allocation(x: Sequence, pi: Permutation) -> tuple:
    """Move the payoff of player ``i`` to position ``pi(i)``."""
    out = [None] * len(x)
    for i in range(1, len(x) + 1):
        out[pi(i) - 1] = x[i - 1]
    return tuple(out)


def restricted_growth_strings(n: int) -> Iterator[tuple[int, ...]]:
    """Restricted growth strings of length ``n`` in lexicographic order."""
    if n == 0:
        yield ()
        return
    a = [0] * n
    while True:
        yield tuple(a)
        # find rightmost position that can be incremented
        k = n - 1
        while k > 0 and a[k] > max(a[:k]):
            k -= 1
        if k == 0:
            return
        a[k] += 1
        for m in range(k + 1, n):
            a[m] = 0


@lru_cache(maxsize=None)
def _partitions(n: int) -> tuple[Partition, ...]:
    out = []
    for rgs in restricted_growth_strings(n):
        blocks: dict[int, set[int]] = {}
        for i, label in enumerate(rgs, start=1):
            blocks.setdefault(label, set()).add(i)
        out.append(Partition(n, tuple(frozenset(blocks[k]) for k in sorted(blocks))))
    return tuple(out)


def enumerate_partitions(n: int) -> tuple[Partition, ...]:
    """All ``Bell(n)`` partitions of ``1..n`` in restricted-growth-string order."""
    check_players(n, LIMITS.pff_players, "partition enumeration")
    return _partitions(n)


def partitions_of(S: Iterable[int]) -> Iterator[tuple[frozenset[int], ...]]:
    """All set partitions of an arbitrary finite set ``S``."""
    elems = sorted(S)
    for rgs in restricted_growth_strings(len(elems)):
        blocks: dict[int, set[int]] = {}
        for x, label in zip(elems, rgs):
            blocks.setdefault(label, set()).add(x)
        yield tuple(frozenset(blocks[k]) for k in sorted(blocks))


def all_networks(n: int) -> Iterator[Network]:
    """Every network on ``1..n`` (``2**(n(n-1)/2)`` of them), ordered by mask."""
    m = n * (n - 1) // 2
    for mask in range(1 << m):
        yield Network.from_mask(n, mask)
