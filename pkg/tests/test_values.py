import itertools
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bcenet.games import (
    Allocation,
    FunctionWorth,
    LinkedBeneficiary,
    PFFGame,
    PFFWorth,
    PermutedWorth,
    TableWorth,
    TUGame,
    TUWorth,
    embedded_coalitions,
    graph_restrict_pff,
    project_worth,
)
from bcenet.netcore import (
    LIMITS,
    DomainError,
    Network,
    Partition,
    ResourceLimitError,
    all_permutations,
    apply_permutation,
    components,
    remove_players,
    spanning_forests,
)
from bcenet.values import (
    BceSolver,
    WorthEvaluationError,
    bce,
    bce_with_forest,
    ef_value,
    fce_direct,
    fce_formula,
    jw_value,
    myerson,
    oracle_solve,
    pff_dividends,
    pff_value,
    pff_value_linear,
    shapley,
)
from support import hashed_worth, random_network, random_pff, random_tu

FIG1 = LinkedBeneficiary(3, 3, (1, 2))
G1 = Network(3, [(1, 2)])
G1P = Network(3, [(1, 2), (1, 3)])
U5 = PFFGame.unanimity([3], Partition.of(3, [[1, 2], [3]]))
THIRDS = Allocation([Fraction(1, 3)] * 3)


def shapley_by_orderings(v: TUGame) -> list[Fraction]:
    n = v.n
    phi = [Fraction(0)] * n
    for order in itertools.permutations(range(1, n + 1)):
        S = set()
        for i in order:
            before = v(S)
            S.add(i)
            phi[i - 1] += v(S) - before
    return [x / math.factorial(n) for x in phi]


def brute_components(S, g):
    S = set(S)
    out = []
    while S:
        stack = [min(S)]
        comp = set(stack)
        while stack:
            i = stack.pop()
            for a, b in g.links:
                for x, y in ((a, b), (b, a)):
                    if x == i and y in S and y not in comp:
                        comp.add(y)
                        stack.append(y)
        out.append(frozenset(comp))
        S -= comp
    return out


# -- TU values -------------------------------------------------------------

@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_shapley_matches_orderings(n):
    v = random_tu(random.Random(n), n)
    assert list(shapley(v)) == shapley_by_orderings(v)


def test_shapley_examples():
    assert list(shapley(TUGame.unanimity(4, [1, 3]))) == [Fraction(1, 2), 0, Fraction(1, 2), 0]
    additive = TUGame.from_function(3, lambda S: sum(S))
    assert list(shapley(additive)) == [1, 2, 3]
    assert list(shapley(TUGame(2, {(1, 2): 1}))) == [Fraction(1, 2), Fraction(1, 2)]


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 5), st.integers(0, 10**6))
def test_shapley_efficiency_and_null_player(n, seed):
    rng = random.Random(seed)
    v = random_tu(rng, n)
    assert sum(shapley(v)) == v(range(1, n + 1))
    null = rng.randint(1, n)
    w = TUGame.from_function(n, lambda S: v(S - {null}))
    assert shapley(w)[null] == 0


def test_myerson_examples():
    v = random_tu(random.Random(2), 4)
    assert myerson(v, Network.complete(4)) == shapley(v)
    assert list(myerson(v, Network(4))) == [v({i}) for i in range(1, 5)]
    assert myerson(TUGame.unanimity(3, [1, 3]), Network(3, [(1, 2), (2, 3)])) == THIRDS


@pytest.mark.parametrize("seed", range(5))
def test_myerson_matches_brute_force(seed):
    rng = random.Random(seed)
    n = 4
    v = random_tu(rng, n)
    g = random_network(rng, n)
    vg = TUGame.from_function(n, lambda S: sum(v(C) for C in brute_components(S, g)))
    assert list(myerson(v, g)) == shapley_by_orderings(vg)


def test_jw_value_examples():
    v = TUGame(3, {(1, 2): 1})
    assert jw_value(TUWorth(v), G1) == Allocation([Fraction(1, 2), Fraction(1, 2), 0])
    assert jw_value(FunctionWorth(3, lambda C, h: 0), G1P) == Allocation.zeros(3)
    rng = random.Random(8)
    vb, g = random_tu(rng, 4), random_network(rng, 4)
    assert jw_value(TUWorth(vb), g) == myerson(vb, g)


# -- dividends and the PFF value ------------------------------------------------

def test_dividends_examples():
    table = pff_dividends(U5)
    assert [(tuple(sorted(C)), P, b) for (C, P), b in table.nonzero()] == [
        ((3,), Partition.of(3, [[1, 2], [3]]), 1)
    ]
    assert pff_dividends(PFFGame(3)).nonzero() == []


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_unanimity_games_are_basis_vectors(n):
    for T, Q in embedded_coalitions(n):
        nz = pff_dividends(PFFGame.unanimity(T, Q)).nonzero()
        assert [(k.coalition, k.partition, b) for k, b in nz] == [(T, Q, 1)]


def _reconstruct(table, n):
    out = PFFGame(n)
    for (C, P), b in table.nonzero():
        out = out + PFFGame.unanimity(C, P).scale(b)
    return out


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 4), st.integers(0, 10**6))
def test_dividends_reconstruct(n, seed):
    v = random_pff(random.Random(seed), n, density=0.7)
    assert _reconstruct(pff_dividends(v), n) == v


def test_pff_value_examples():
    assert pff_value(U5) == Allocation([0, 0, 1])
    assert pff_value(PFFGame.unanimity([1, 2], Partition.of(3, [[1, 2], [3]]))) == Allocation(
        [Fraction(1, 2), Fraction(1, 2), 0]
    )


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 4), st.integers(0, 10**6))
def test_pff_value_linear_and_efficient(n, seed):
    rng = random.Random(seed)
    v, v2 = random_pff(rng, n), random_pff(rng, n)
    assert pff_value(v + v2) == pff_value(v) + pff_value(v2)
    assert pff_value(v) == pff_value_linear(v)
    N = frozenset(range(1, n + 1))
    assert sum(pff_value(v)) == v(N, Partition.grand(n))


def test_ef_value_examples():
    assert ef_value(U5) == THIRDS
    vbar = random_tu(random.Random(4), 3)
    assert ef_value(PFFGame.from_function(3, lambda C, P: vbar(C))) == shapley(vbar)
    assert ef_value(PFFGame(3)) == Allocation.zeros(3)


# -- BCE -------------------------------------------------------------------------

def test_bce_examples():
    assert bce(FIG1, G1P) == THIRDS
    assert bce(FIG1, G1) == Allocation([0, 0, 1])
    assert bce(LinkedBeneficiary(4, 3, (1, 2)), Network(4, [(1, 2), (1, 4), (3, 4)])) == Allocation([0, 0, 1, 0])
    w = hashed_worth(5, 4)
    empty = Network(4)
    assert list(bce(w, empty)) == [w({i}, empty) for i in range(1, 5)]


def test_bce_offsets_root_is_zero():
    s = BceSolver(LinkedBeneficiary(4, 3, (1, 2)))
    g = Network(4, [(1, 2), (1, 4), (3, 4)])
    offsets = s.offsets(g)
    for C, gamma in offsets.items():
        assert gamma[min(C)] == 0
        assert set(gamma) == C


def test_bce_attaches_context_to_worth_errors():
    def bad(C, h):
        if len(h) == 0 and C == frozenset({2}):
            raise ValueError("boom")
        return 1

    with pytest.raises(WorthEvaluationError) as err:
        bce(FunctionWorth(3, bad), G1P)
    assert err.value.coalition == frozenset({2})
    assert err.value.network == Network(3)


def _bc_gap(phi, g, i, j):
    return (phi(g)[i] - phi(remove_players(g, [j]))[i]) - (phi(g)[j] - phi(remove_players(g, [i]))[j])


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.floats(0.1, 0.9), st.integers(0, 10**6))
def test_bce_ce_and_bc_on_every_link(n, p, seed):
    rng = random.Random(seed)
    w = hashed_worth(seed, n)
    g = random_network(rng, n, p)
    phi = BceSolver(w)
    x = phi(g)
    for C in components(g).blocks:
        assert sum(x[i] for i in C) == w(C, g)
    for i, j in g.links:
        assert _bc_gap(phi, g, i, j) == 0


def test_bce_with_forest_examples():
    tri = Network(3, [(1, 2), (1, 3), (2, 3)])
    w = hashed_worth(11, 3)
    a = bce_with_forest(w, tri, [(1, 2), (2, 3)])
    b = bce_with_forest(w, tri, [(1, 3), (2, 3)])
    assert a == b == bce(w, tri)
    path = Network(3, [(1, 2), (2, 3)])
    assert bce_with_forest(w, path, path.links) == bce(w, path)
    g3 = Network(4, [(1, 2), (1, 4), (3, 4), (2, 3)])
    w4 = LinkedBeneficiary(4, 3, (1, 2))
    assert bce_with_forest(w4, g3, [(1, 2), (2, 3), (3, 4)]) == bce(w4, g3)


def test_bce_with_forest_rejects_non_spanning():
    with pytest.raises(DomainError):
        bce_with_forest(FIG1, G1P, [(1, 2)])
    with pytest.raises(DomainError):
        bce_with_forest(FIG1, G1P, [(1, 2), (2, 3)])


@settings(max_examples=15, deadline=None)
@given(st.integers(3, 5), st.integers(0, 10**6))
def test_bce_forest_independence(n, seed):
    rng = random.Random(seed)
    w = hashed_worth(seed, n)
    g = random_network(rng, n, 0.6)
    ref = bce(w, g)
    for F in spanning_forests(g):
        assert bce_with_forest(w, g, F) == ref


@settings(max_examples=10, deadline=None)
@given(st.integers(2, 4), st.integers(0, 10**6))
def test_bce_symmetry(n, seed):
    rng = random.Random(seed)
    w = hashed_worth(seed, n)
    g = random_network(rng, n, 0.6)
    x = bce(w, g)
    for pi in all_permutations(n):
        y = bce(PermutedWorth(w, pi), apply_permutation(g, pi))
        assert all(y[pi(i)] == x[i] for i in range(1, n + 1))


@settings(max_examples=15, deadline=None)
@given(st.integers(2, 5), st.integers(0, 10**6))
def test_bce_is_linear_in_worth(n, seed):
    rng = random.Random(seed)
    w1, w2 = hashed_worth(seed, n), hashed_worth(seed + 1, n)
    a, b = Fraction(rng.randint(-5, 5), rng.randint(1, 5)), Fraction(rng.randint(-5, 5), rng.randint(1, 5))
    g = random_network(rng, n)
    combo = FunctionWorth(n, lambda C, h: a * w1(C, h) + b * w2(C, h))
    assert bce(combo, g) == bce(w1, g).scale(a) + bce(w2, g).scale(b)


@settings(max_examples=15, deadline=None)
@given(st.integers(2, 5), st.integers(0, 10**6))
def test_bce_and_fce_invariant_under_projection(n, seed):
    rng = random.Random(seed)
    w = hashed_worth(seed, n)
    g = random_network(rng, n)
    wg = project_worth(w, g)
    assert bce(w, g) == bce(wg, g)
    assert fce_formula(w, g) == fce_formula(wg, g)


@settings(max_examples=10, deadline=None)
@given(st.integers(2, 4), st.integers(0, 10**6))
def test_bce_pff_bridge(n, seed):
    rng = random.Random(seed)
    v = random_pff(rng, n)
    g = random_network(rng, n)
    assert bce(PFFWorth(v), g) == bce(PFFWorth(graph_restrict_pff(v, g)), g)


# -- FCE -------------------------------------------------------------------------

def test_fce_examples():
    assert fce_formula(FIG1, G1P) == Allocation([0, 0, 1])
    assert fce_direct(FIG1, G1P) == Allocation([0, 0, 1])
    for g in (G1, G1P):
        assert fce_formula(PFFWorth(U5), g) == Allocation([0, 0, 1])
    zero = FunctionWorth(3, lambda C, h: 0)
    assert fce_formula(zero, G1P) == Allocation.zeros(3)
    one_link = Network(2, [(1, 2)])
    w = TableWorth(2, {(frozenset({1, 2}), one_link): 1})
    assert fce_direct(w, one_link) == Allocation([Fraction(1, 2), Fraction(1, 2)])
    w3 = hashed_worth(3, 3)
    assert list(fce_direct(w3, Network(3))) == [w3({i}, Network(3)) for i in (1, 2, 3)]


def test_fce_direct_link_cap():
    old = LIMITS.links
    LIMITS.links = 2
    try:
        with pytest.raises(ResourceLimitError):
            fce_direct(FIG1, Network.complete(3))
    finally:
        LIMITS.links = old


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 5), st.integers(0, 10**6))
def test_fce_routes_agree_and_satisfy_fairness(n, seed):
    rng = random.Random(seed)
    w = hashed_worth(seed, n)
    g = random_network(rng, n)
    x = fce_formula(w, g)
    assert x == fce_direct(w, g)
    for C in components(g).blocks:
        assert sum(x[i] for i in C) == w(C, g)
    for i, j in g.links:
        y = fce_formula(w, g.without_link((i, j)))
        assert x[i] - y[i] == x[j] - y[j]


@settings(max_examples=15, deadline=None)
@given(st.integers(1, 5), st.integers(0, 10**6))
def test_tu_induced_worth_coincidences(n, seed):
    rng = random.Random(seed)
    vbar = random_tu(rng, n)
    g = random_network(rng, n)
    w = TUWorth(vbar)
    my = myerson(vbar, g)
    assert bce(w, g) == my == jw_value(w, g) == fce_formula(w, g)


# -- oracle --------------------------------------------------------------------

def test_oracle_examples():
    rep = oracle_solve(FIG1, G1P, "BC")
    assert rep.allocation == THIRDS and rep.consistent and rep.full_rank
    assert oracle_solve(FIG1, G1P, "F").allocation == Allocation([0, 0, 1])
    w = hashed_worth(2, 3)
    rep = oracle_solve(w, Network(3))
    assert list(rep.allocation) == [w({i}, Network(3)) for i in (1, 2, 3)]
    assert rep.consistent and rep.full_rank
    with pytest.raises(ValueError):
        oracle_solve(w, Network(3), "S")


def test_oracle_counts_every_link():
    tri = Network(3, [(1, 2), (1, 3), (2, 3)])
    rep = oracle_solve(hashed_worth(4, 3), tri, "BC")
    top = [s for s in rep.systems if s.network == tri]
    assert len(top) == 1 and top[0].equations == 4 and top[0].unknowns == 3


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 5), st.integers(0, 10**6))
def test_oracle_matches_constructions(n, seed):
    rng = random.Random(seed)
    w = hashed_worth(seed, n)
    g = random_network(rng, n)
    bc = oracle_solve(w, g, "BC")
    assert bc.consistent and bc.full_rank and bc.allocation == bce(w, g)
    f = oracle_solve(w, g, "F")
    assert f.consistent and f.full_rank and f.allocation == fce_formula(w, g)


def test_oracle_reports_unsolvable_systems(monkeypatch):
    from bcenet import values
    from bcenet.linalg import SolveResult

    monkeypatch.setattr(values, "solve_exact", lambda A, b: SolveResult(1, 2, len(A[0]), None))
    rep = oracle_solve(FIG1, G1P, "BC")
    assert rep.allocation is None
    assert not rep.consistent
    bad = rep.failure
    assert bad is not None and bad.rows
    assert len(bad.rows) == bad.equations
