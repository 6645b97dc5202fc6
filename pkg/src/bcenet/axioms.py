"""Axiom audits, BC residuals and the cycle-sum identity.

Every audit evaluates a rule exactly and records each failed equation as a
``Witness`` holding both sides, so a report can be re-checked from scratch.
"""

from __future__ import annotations

import hashlib
import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .games import Allocation, PermutedWorth, WorthFunction, fmt_rational
from .netcore import (
    Cycle,
    DomainError,
    Network,
    Permutation,
    all_permutations,
    apply_permutation,
    components,
    cycles,
    fmt_set,
    remove_players,
)
from .values import BceSolver, FceFormula, FceSolver, jw_value

Evaluator = Callable[[Network], Allocation]


@dataclass(frozen=True)
class RuleUnderTest:
    """A named allocation rule.

    ``bind(w)`` returns a network -> allocation evaluator with its own cache,
    so one audit never recomputes a subnetwork.
    """

    name: str
    factory: Callable[[WorthFunction], Evaluator]

    @classmethod
    def from_function(cls, name: str, fn: Callable[[WorthFunction, Network], Allocation]) -> "RuleUnderTest":
        def factory(w):
            cache: dict[Network, Allocation] = {}

            def evaluate(g):
                if g not in cache:
                    cache[g] = Allocation(fn(w, g))
                return cache[g]

            return evaluate

        return cls(name, factory)

    def bind(self, w: WorthFunction) -> Evaluator:
        return self.factory(w)

    def __call__(self, w: WorthFunction, g: Network) -> Allocation:
        return self.bind(w)(g)


BCE = RuleUnderTest("bce", BceSolver)
FCE = RuleUnderTest("fce", FceFormula)
FCE_DIRECT = RuleUnderTest("fce-direct", FceSolver)
JW = RuleUnderTest.from_function("jw", jw_value)
ZERO = RuleUnderTest.from_function("zero", lambda w, g: Allocation.zeros(g.n))


def adversarial_payoff(seed: int, i: int, g: Network) -> Fraction:
    """Deterministic pseudo-random small rational for player ``i`` at ``g``."""
    key = f"{seed}|{i}|{g.n}|{g.mask}".encode()
    h = hashlib.blake2b(key, digest_size=4).digest()
    return Fraction(h[0] % 19 - 9, h[1] % 6 + 1)


def adversarial_rule(seed: int = 0) -> RuleUnderTest:
    """A rule with no structure at all: payoffs are a seeded hash of (player, network)."""
    return RuleUnderTest.from_function(
        f"adversarial[{seed}]",
        lambda w, g: Allocation(adversarial_payoff(seed, i, g) for i in range(1, g.n + 1)),
    )


def dictator_rule(dictator: int = 1) -> RuleUnderTest:
    """Pays the worth of the dictator's component to the dictator alone."""

    def fn(w, g):
        x = [Fraction(0)] * g.n
        x[dictator - 1] = w(components(g).block_of(dictator), g)
        return Allocation(x)

    return RuleUnderTest.from_function(f"dictator[{dictator}]", fn)


RULES = {r.name: r for r in (BCE, FCE, FCE_DIRECT, JW, ZERO)}


# -- residuals and reports -----------------------------------------------------

@dataclass(frozen=True)
class ResidualValue:
    i: int
    j: int
    D: frozenset[int]
    value: Fraction


def _residual(phi: Evaluator, g: Network, i: int, j: int, D: Iterable[int] = ()) -> Fraction:
    base = remove_players(g, D)
    return (phi(base)[i] - phi(remove_players(base, (j,)))[i]) - (
        phi(base)[j] - phi(remove_players(base, (i,)))[j]
    )


def bc_residual(rule: RuleUnderTest | Evaluator, w: WorthFunction | None, g: Network,
                i: int, j: int, D: Iterable[int] = ()) -> ResidualValue:
    """``[phi_i(g_-D) - phi_i(g_-D-j)] - [phi_j(g_-D) - phi_j(g_-D-i)]``."""
    D = frozenset(D)
    if i in D or j in D:
        raise DomainError(f"removed set {fmt_set(D)} contains an endpoint of {{{i},{j}}}")
    if (i, j) not in remove_players(g, D):
        raise DomainError(f"{{{i},{j}}} is not a link of g_-{fmt_set(D)}")
    phi = rule.bind(w) if isinstance(rule, RuleUnderTest) else rule
    return ResidualValue(i, j, D, _residual(phi, g, i, j, D))


@dataclass
class Witness:
    """One failed equation: ``lhs != rhs`` for ``players`` at ``networks``."""

    players: tuple[int, ...]
    networks: tuple[Network, ...]
    lhs: Fraction
    rhs: Fraction
    note: str = ""

    def to_json(self) -> dict:
        return {
            "players": list(self.players),
            "networks": [[list(e) for e in h.links] for h in self.networks],
            "lhs": fmt_rational(self.lhs),
            "rhs": fmt_rational(self.rhs),
            "note": self.note,
        }


@dataclass
class AuditReport:
    axiom: str
    rule: str
    checked: int = 0
    violations: list[Witness] = field(default_factory=list)
    game: str = ""
    network: Network | None = None

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "axiom": self.axiom,
            "rule": self.rule,
            "game": self.game,
            "network": None if self.network is None else [list(e) for e in self.network.links],
            "checked": self.checked,
            "violations": [v.to_json() for v in self.violations],
        }


def check_ce(rule: RuleUnderTest, w: WorthFunction, g: Network, phi: Evaluator | None = None) -> AuditReport:
    phi = phi or rule.bind(w)
    rep = AuditReport("ce", rule.name, network=g)
    x = phi(g)
    for C in components(g).blocks:
        rep.checked += 1
        lhs, rhs = x.total(C), w(C, g)
        if lhs != rhs:
            rep.violations.append(Witness(tuple(sorted(C)), (g,), lhs, rhs, "sum over component vs worth"))
    return rep


def _gains(phi: Evaluator, g: Network, i: int, j: int, kind: str):
    """Both sides of the pairwise equation for ``kind`` in {bc, bcplus, f}."""
    x = phi(g)
    if kind == "f":
        h = g.without_link((i, j))
        return x[i] - phi(h)[i], x[j] - phi(h)[j], (g, h)
    gi, gj = remove_players(g, (j,)), remove_players(g, (i,))
    return x[i] - phi(gi)[i], x[j] - phi(gj)[j], (g, gi, gj)


def _pair_audit(kind: str, rule: RuleUnderTest, w: WorthFunction, g: Network, phi) -> AuditReport:
    phi = phi or rule.bind(w)
    rep = AuditReport(kind, rule.name, network=g)
    if kind == "bcplus":
        pairs = [p for C in components(g).blocks for p in itertools.combinations(sorted(C), 2)]
    else:
        pairs = list(g.links)
    for i, j in pairs:
        rep.checked += 1
        lhs, rhs, nets = _gains(phi, g, i, j, kind)
        if lhs != rhs:
            note = f"{i} and {j} in component {fmt_set(components(g).block_of(i))}"
            rep.violations.append(Witness((i, j), nets, lhs, rhs, note))
    return rep


def check_bc(rule, w, g, phi=None) -> AuditReport:
    return _pair_audit("bc", rule, w, g, phi)


def check_f(rule, w, g, phi=None) -> AuditReport:
    return _pair_audit("f", rule, w, g, phi)


def check_bcplus(rule, w, g, phi=None) -> AuditReport:
    return _pair_audit("bcplus", rule, w, g, phi)


def check_symmetry(rule: RuleUnderTest, w: WorthFunction, g: Network,
                   permutations: str | int | Sequence[Permutation] = "all",
                   seed: int = 0, phi: Evaluator | None = None) -> AuditReport:
    """``phi_{pi(i)}(pi w, pi g) == phi_i(w, g)`` for each permutation checked.

    ``permutations`` is ``"all"`` (n <= 6), a sample size, or an explicit list.
    """
    phi = phi or rule.bind(w)
    n = g.n
    if permutations == "all":
        if n > 6:
            raise DomainError("exhaustive symmetry audit needs n <= 6; pass a sample size")
        perms = list(all_permutations(n))
    elif isinstance(permutations, int):
        rng = random.Random(seed)
        perms = []
        for _ in range(permutations):
            m = list(range(1, n + 1))
            rng.shuffle(m)
            perms.append(Permutation(tuple(m)))
    else:
        perms = list(permutations)
    rep = AuditReport("sym", rule.name, network=g)
    x = phi(g)
    for pi in perms:
        rep.checked += 1
        pg = apply_permutation(g, pi)
        y = rule.bind(PermutedWorth(w, pi))(pg)
        for i in range(1, n + 1):
            if y[pi(i)] != x[i]:
                rep.violations.append(
                    Witness((i, pi(i)), (g, pg), x[i], y[pi(i)], f"permutation {pi.mapping}")
                )
    return rep


@dataclass(frozen=True)
class CycleSumResult:
    cycle: Cycle
    lhs: Fraction
    rhs: Fraction

    @property
    def equal(self) -> bool:
        return self.lhs == self.rhs


def cycle_sum_check(rule: RuleUnderTest | Evaluator, w: WorthFunction | None, g: Network,
                    Z: Cycle | Sequence[int]) -> CycleSumResult:
    """Both sides of the cycle-sum identity, computed separately.

    Left: the residuals around the cycle at ``g``.  Right: for every cycle
    edge and every nonempty ``D`` of the other cycle players, the residual at
    ``g_-D`` with sign ``(-1)^(|D|+1)``.
    """
    Z = Z if isinstance(Z, Cycle) else Cycle(tuple(Z))
    Z.check_in(g)
    phi = rule.bind(w) if isinstance(rule, RuleUnderTest) else rule
    lhs = sum((_residual(phi, g, a, b) for a, b in Z.edges()), Fraction(0))
    rhs = Fraction(0)
    for a, b in Z.edges():
        others = [k for k in Z.vertices if k not in (a, b)]
        for r in range(1, len(others) + 1):
            sign = 1 if r % 2 else -1
            for D in itertools.combinations(others, r):
                rhs += sign * _residual(phi, g, a, b, D)
    return CycleSumResult(Z, lhs, rhs)


AXIOMS = {
    "ce": check_ce,
    "bc": check_bc,
    "f": check_f,
    "bcplus": check_bcplus,
    "sym": check_symmetry,
}

# axioms each named rule is known to satisfy
EXPECTED = {
    "bce": {"ce", "bc", "sym"},
    "fce": {"ce", "f", "sym"},
    "fce-direct": {"ce", "f", "sym"},
}


@dataclass
class SuiteReport:
    reports: list[AuditReport]
    expected: list[bool]

    @property
    def ok(self) -> bool:
        return all(r.passed for r, exp in zip(self.reports, self.expected) if exp)

    def failures(self) -> list[AuditReport]:
        return [r for r, exp in zip(self.reports, self.expected) if exp and not r.passed]

    def to_json(self) -> list[dict]:
        return [dict(r.to_json(), expected_pass=exp) for r, exp in zip(self.reports, self.expected)]


def run_suite(rules: Sequence[RuleUnderTest], games: Sequence[tuple[str, WorthFunction]],
              networks: Sequence[Network], axioms: Sequence[str],
              expected: Callable[[str, str], bool] | None = None,
              permutations: str | int = "all", seed: int = 0) -> SuiteReport:
    """Cross product of audits in input order (rule, game, network, axiom).

    ``expected(rule_name, axiom)`` marks which cells must pass; by default the
    ``EXPECTED`` table.  Networks whose player count differs from a game's are
    skipped.  ``permutations`` and ``seed`` are passed to the symmetry audit.
    """
    if expected is None:
        def expected(rule, axiom):
            return axiom in EXPECTED.get(rule, set())
    for a in axioms:
        if a not in AXIOMS:
            raise ValueError(f"unknown axiom {a!r}; choose from {sorted(AXIOMS)}")
    reports, flags = [], []
    for rule in rules:
        for name, w in games:
            phi = rule.bind(w)
            for g in networks:
                if g.n != w.n:
                    continue
                for a in axioms:
                    if a == "sym":
                        rep = check_symmetry(rule, w, g, permutations, seed, phi=phi)
                    else:
                        rep = AXIOMS[a](rule, w, g, phi=phi)
                    rep.game = name
                    reports.append(rep)
                    flags.append(expected(rule.name, a))
    return SuiteReport(reports, flags)
