import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bcenet.games import (
    Allocation,
    FunctionWorth,
    InconsistencyError,
    LinkedBeneficiary,
    PFFGame,
    TableWorth,
    TUGame,
    TUWorth,
    ef_tu_game,
    embedded_coalitions,
    eval_worth,
    fmt_rational,
    graph_restrict_pff,
    graph_restrict_tu,
    induced_worth_from_pff,
    is_externality_free,
    jw_tu_game,
    pff_from_projected,
    pff_from_worth,
    project_worth,
    realizations,
    to_rational,
)
from bcenet.netcore import DomainError, Network, Partition, all_networks, components, remove_players
from support import hashed_worth, random_network, random_pff, random_tu, rationals

U5 = PFFGame.unanimity([3], Partition.of(3, [[1, 2], [3]]))
EDGE_W = LinkedBeneficiary(3, 3, (1, 2), requires="link")


# -- scalars and allocations ---------------------------------------------------

def test_to_rational():
    assert to_rational("5/2") == Fraction(5, 2)
    assert to_rational("-4/6") == Fraction(-2, 3)
    assert to_rational(3) == 3
    for bad in (0.5, True, "1/0", "x"):
        with pytest.raises((TypeError, ValueError, ZeroDivisionError)):
            to_rational(bad)


@given(rationals)
def test_fmt_rational_round_trip(q):
    text = fmt_rational(q)
    assert to_rational(text) == q
    assert ("/" in text) == (q.denominator != 1)


def test_allocation_is_one_based():
    x = Allocation([1, Fraction(1, 2), 0])
    assert x[1] == 1 and x[2] == Fraction(1, 2)
    assert x.total({1, 2}) == Fraction(3, 2)
    assert (x + x)[2] == 1
    with pytest.raises(IndexError):
        x[0]


# -- map-backed games ------------------------------------------------------------

def test_tu_unlisted_is_zero_and_store_untouched():
    v = TUGame(3, {(1, 2): 5})
    before = dict(v.worths)
    assert v({1, 3}) == 0 and v(set()) == 0
    assert v.worths == before


def test_tu_rejects_nonzero_empty_worth():
    with pytest.raises(DomainError):
        TUGame(3, {(): 1})


def test_pff_unlisted_is_zero_and_validates_blocks():
    v = PFFGame(3, {})
    assert v({1}, Partition.singletons(3)) == 0
    assert v.worths == {}
    with pytest.raises(DomainError):
        v({1}, Partition.grand(3))


@pytest.mark.parametrize("n,count", [(1, 1), (2, 3), (3, 10), (4, 37), (5, 151)])
def test_embedded_coalition_counts(n, count):
    assert len(embedded_coalitions(n)) == count


# -- worth functions -------------------------------------------------------------

def test_linked_beneficiary_examples():
    w = LinkedBeneficiary(3, 3, (1, 2))
    assert w({3}, Network(3, [(1, 2)])) == 1
    assert w({1, 2}, Network(3, [(1, 2)])) == 0
    w4 = LinkedBeneficiary(4, 3, (1, 2))
    assert w4({3, 4}, Network(4, [(1, 2), (3, 4)])) == 1
    assert w4({1, 2, 3, 4}, Network(4, [(1, 2), (1, 4), (3, 4)])) == 1
    assert w4({3, 4}, Network(4, [(3, 4)])) == 0


def test_link_mode_checks_the_link_itself():
    h = Network(3, [(1, 3), (2, 3)])
    assert LinkedBeneficiary(3, 3, (1, 2))({1, 2, 3}, h) == 1
    assert EDGE_W({1, 2, 3}, h) == 0


def test_worth_outside_domain_is_an_error():
    with pytest.raises(DomainError):
        LinkedBeneficiary(3, 3, (1, 2))({1, 3}, Network(3, [(1, 2)]))
    with pytest.raises(DomainError):
        TUWorth(TUGame(3, {(1, 2): 5}))({1, 2, 3}, Network(3, [(1, 2)]))


def test_table_worth_reads_zero_when_unlisted():
    g = Network(3, [(1, 2)])
    w = TableWorth(3, {(frozenset({3}), g): 2})
    assert w({3}, g) == 2 and w({1, 2}, g) == 0
    with pytest.raises(DomainError):
        TableWorth(3, {(frozenset({1, 3}), g): 1})


def test_tu_worth_examples():
    w = TUWorth(TUGame(3, {(1, 2): 5}))
    assert eval_worth(w, {1, 2}, Network(3, [(1, 2)])) == 5
    assert eval_worth(TUWorth(TUGame(4, {(1, 2): 5})), {1, 2}, Network(4, [(1, 2), (3, 4)])) == 5


def test_induced_worth_from_pff_examples():
    w = induced_worth_from_pff(U5)
    assert w({3}, Network(3, [(1, 2)])) == 1
    assert w({1, 2}, Network(3, [(1, 2)])) == 0
    assert w({3}, Network(3)) == 0
    zero = induced_worth_from_pff(PFFGame(3))
    assert all(zero(C, h) == 0 for h in all_networks(3) for C in components(h).blocks)


# -- conversions --------------------------------------------------------------

def test_realizations_cover_each_partition():
    for h in all_networks(4):
        assert h in set(realizations(components(h)))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_pff_round_trip(n):
    rng = random.Random(n)
    for _ in range(5):
        v = random_pff(rng, n, density=0.6)
        assert pff_from_worth(induced_worth_from_pff(v)) == v


def test_pff_round_trip_through_general_worth():
    rng = random.Random(7)
    v = random_pff(rng, 4)
    w = FunctionWorth(4, lambda C, h: v(C, components(h)))
    assert pff_from_worth(w) == v


def test_linked_beneficiary_is_partition_measurable():
    v = pff_from_worth(LinkedBeneficiary(3, 3, (1, 2)))
    for h in all_networks(3):
        for C in components(h).blocks:
            assert v(C, components(h)) == LinkedBeneficiary(3, 3, (1, 2))(C, h)


def test_pff_from_worth_reports_non_measurable_witness():
    with pytest.raises(InconsistencyError) as err:
        pff_from_worth(EDGE_W)
    C, h1, h2 = err.value.witness
    assert components(h1) == components(h2)
    assert EDGE_W(C, h1) != EDGE_W(C, h2)


def test_pff_from_worth_single_realization_accepted():
    g = Network(3, [(1, 2)])
    assert len(list(realizations(components(g)))) == 1
    v = pff_from_worth(TableWorth(3, {(frozenset({1, 2}), g): 1}))
    assert v({1, 2}, Partition.of(3, [[1, 2], [3]])) == 1


def test_project_worth_example():
    g = Network(3, [(1, 2)])
    h = Network(3, [(1, 3), (2, 3)])
    wg = project_worth(EDGE_W, g)
    assert EDGE_W({1, 2, 3}, h) == 0
    assert wg({1, 2, 3}, h) == 1


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 4), st.integers(0, 10**6))
def test_projection_agrees_on_player_deletions(n, seed):
    rng = random.Random(seed)
    w = hashed_worth(seed, n)
    g = random_network(rng, n)
    wg = project_worth(w, g)
    for mask in range(1 << n):
        h = remove_players(g, [i for i in range(1, n + 1) if mask >> (i - 1) & 1])
        for C in components(h).blocks:
            assert wg(C, h) == w(C, h)


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 4), st.integers(0, 10**6))
def test_projection_is_idempotent_and_measurable(n, seed):
    rng = random.Random(seed)
    w = hashed_worth(seed, n)
    g = random_network(rng, n)
    wg = project_worth(w, g)
    wgg = project_worth(wg, g)
    by_partition = {}
    for h in all_networks(n):
        for C in components(h).blocks:
            assert wgg(C, h) == wg(C, h)
            key = (C, components(h))
            by_partition.setdefault(key, wg(C, h))
            assert by_partition[key] == wg(C, h)


def test_zero_worth_projects_to_zero():
    zero = FunctionWorth(3, lambda C, h: 0)
    wg = project_worth(zero, Network(3, [(1, 2)]))
    assert all(wg(C, h) == 0 for h in all_networks(3) for C in components(h).blocks)
    assert pff_from_projected(zero, Network(3, [(1, 2)])) == PFFGame(3)


@settings(max_examples=15, deadline=None)
@given(st.integers(2, 4), st.integers(0, 10**6))
def test_projection_of_pff_worth_is_restriction(n, seed):
    rng = random.Random(seed)
    v = random_pff(rng, n, density=0.5)
    g = random_network(rng, n)
    lhs = project_worth(induced_worth_from_pff(v), g)
    rhs = induced_worth_from_pff(graph_restrict_pff(v, g))
    for h in all_networks(n):
        for C in components(h).blocks:
            assert lhs(C, h) == rhs(C, h)


def test_graph_restrict_pff_examples():
    g, g2 = Network(3, [(1, 2)]), Network(3, [(1, 2), (1, 3)])
    assert graph_restrict_pff(U5, g) == graph_restrict_pff(U5, g2)
    assert graph_restrict_pff(PFFGame(3), g) == PFFGame(3)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_restriction_by_complete_network_is_identity(n):
    v = random_pff(random.Random(n), n)
    assert graph_restrict_pff(v, Network.complete(n)) == v


def test_pff_from_projected_example():
    assert pff_from_projected(EDGE_W, Network(3, [(1, 2)])) == U5


@pytest.mark.parametrize("n", [2, 3, 4])
def test_pff_from_projected_of_tu_worth(n):
    rng = random.Random(n)
    vbar = random_tu(rng, n)
    g = random_network(rng, n)
    v = pff_from_projected(TUWorth(vbar), g)
    for C, P in embedded_coalitions(n):
        pieces = components(Network(n, [e for e in g.links if e[0] in C and e[1] in C])).blocks
        assert v(C, P) == sum(vbar(S) for S in pieces if S <= C)


def test_graph_restrict_tu_examples():
    u13 = TUGame.unanimity(3, [1, 3])
    vg = graph_restrict_tu(u13, Network(3, [(1, 2), (2, 3)]))
    assert vg({1, 3}) == 0 and vg({1, 2, 3}) == 1
    assert graph_restrict_tu(u13, Network.complete(3)) == u13
    additive = TUGame(3, {(1,): 1, (2,): 2, (3,): 3, (1, 2): 3, (1, 3): 4, (2, 3): 5, (1, 2, 3): 6})
    assert graph_restrict_tu(additive, Network(3, [(1, 2)])) == additive


def test_jw_tu_game_examples():
    rng = random.Random(3)
    vbar = random_tu(rng, 4)
    g = random_network(rng, 4, 0.6)
    assert jw_tu_game(TUWorth(vbar), g) == graph_restrict_tu(vbar, g)
    assert jw_tu_game(FunctionWorth(4, lambda C, h: 0), g) == TUGame(4)
    w = hashed_worth(1, 4)
    for C in components(g).blocks:
        assert jw_tu_game(w, g)(C) == w(C, g)


def test_ef_tu_game_examples():
    ef = ef_tu_game(U5)
    assert ef({3}) == 0 and ef({1, 2}) == 0 and ef({1, 2, 3}) == 1
    v = random_pff(random.Random(5), 3)
    assert ef_tu_game(v)({2}) == v({2}, Partition.singletons(3))
    vbar = random_tu(random.Random(6), 3)
    free = PFFGame.from_function(3, lambda C, P: vbar(C))
    assert ef_tu_game(free) == vbar


def test_ef_tu_game_from_worth_uses_complete_subnetwork():
    w = hashed_worth(9, 4)
    ef = ef_tu_game(w)
    assert ef({1, 3, 4}) == w({1, 3, 4}, Network(4, [(1, 3), (1, 4), (3, 4)]))


def test_is_externality_free_examples():
    ok, witness = is_externality_free(TUWorth(random_tu(random.Random(1), 3)), Network.complete(3))
    assert ok and witness is None
    ok, witness = is_externality_free(LinkedBeneficiary(3, 3, (1, 2)), Network(3, [(1, 2)]))
    assert not ok
    assert witness == (frozenset({3}), Network(3, [(1, 2)]))
    ok, _ = is_externality_free(FunctionWorth(3, lambda C, h: 0), Network.complete(3))
    assert ok
