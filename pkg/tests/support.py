"""Shared generators for the test-suite: seeded worths, networks and games."""

from __future__ import annotations

import hashlib
import itertools
import random
from fractions import Fraction

from hypothesis import strategies as st

from bcenet.games import FunctionWorth, PFFGame, TUGame, embedded_coalitions
from bcenet.netcore import Network


def _hash_rational(*key, bound: int = 10) -> Fraction:
    h = hashlib.sha256(repr(key).encode()).digest()
    num = h[0] % (2 * bound + 1) - bound
    den = h[1] % bound + 1
    return Fraction(num, den)


def hashed_worth(seed: int, n: int) -> FunctionWorth:
    """A worth with externalities everywhere: a seeded hash of (component, network)."""
    return FunctionWorth(
        n, lambda C, g: _hash_rational(seed, tuple(sorted(C)), g.mask), name=f"hashed[{seed}]"
    )


def random_network(rng: random.Random, n: int, p: float = 0.5) -> Network:
    return Network(n, [e for e in itertools.combinations(range(1, n + 1), 2) if rng.random() < p])


def random_rational(rng: random.Random, bound: int = 10) -> Fraction:
    return Fraction(rng.randint(-bound, bound), rng.randint(1, bound))


def random_tu(rng: random.Random, n: int) -> TUGame:
    worths = {}
    for r in range(1, n + 1):
        for S in itertools.combinations(range(1, n + 1), r):
            worths[S] = random_rational(rng)
    return TUGame(n, worths)


def random_pff(rng: random.Random, n: int, density: float = 1.0) -> PFFGame:
    return PFFGame(n, {
        (C, P): random_rational(rng)
        for C, P in embedded_coalitions(n)
        if rng.random() < density
    })


def seeded_suite(count: int = 120, seed: int = 2024, max_n: int = 5):
    """``(label, worth, network)`` triples with 2..max_n players and mixed densities."""
    rng = random.Random(seed)
    out = []
    for k in range(count):
        n = 2 + k % (max_n - 1)
        p = (0.3, 0.55, 0.8)[k % 3]
        g = random_network(rng, n, p)
        out.append((f"s{k}", hashed_worth(seed * 1000 + k, n), g))
    return out


# -- hypothesis strategies -----------------------------------------------------

@st.composite
def networks(draw, min_players: int = 1, max_players: int = 6):
    n = draw(st.integers(min_players, max_players))
    pairs = list(itertools.combinations(range(1, n + 1), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return Network(n, chosen)


rationals = st.fractions(min_value=-10, max_value=10, max_denominator=10)
