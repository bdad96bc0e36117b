import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from charrule.order import (
    FinitePoset,
    GuardExceeded,
    NotAnAntichain,
    PosetError,
    check_poset,
    count_antichains,
    enumerate_antichains,
    is_antichain,
    is_soc,
    minimals,
    soc_antichain_roundtrip,
    upward_closure,
)


def naturally_labeled_orders(k):
    """Every partial order on range(k) whose strict part only has pairs i < j.

    Every finite poset is isomorphic to at least one of these.
    """
    pairs = list(itertools.combinations(range(k), 2))
    for r in range(len(pairs) + 1):
        for rel in itertools.combinations(pairs, r):
            rel = set(rel)
            if all((i, l) in rel for (i, j) in rel for (j2, l) in rel if j == j2):
                yield rel


def poset_from(k, rel):
    return FinitePoset(range(k), lambda x, y: x == y or (x, y) in rel)


def naive_antichains(p: FinitePoset):
    els = p.elements
    out = []
    for r in range(len(els) + 1):
        for sub in itertools.combinations(els, r):
            if all(not p.comparable(x, y) for x, y in itertools.combinations(sub, 2)):
                out.append(frozenset(sub))
    return out


def naive_soc_sets(p: FinitePoset):
    els = p.elements
    return [frozenset(sub) for r in range(len(els) + 1) for sub in itertools.combinations(els, r)
            if all(y in sub for x in sub for y in els if p.leq(x, y))]


CHAIN = FinitePoset(range(3), lambda x, y: x <= y)


def test_order_counts_on_four_and_five_points():
    # labeled-order counts differ from unlabeled ones, but every shape appears
    assert sum(1 for _ in naturally_labeled_orders(3)) == 7
    assert sum(1 for _ in naturally_labeled_orders(4)) == 40


def test_chain_examples():
    assert is_soc({2}, CHAIN)
    assert not is_soc({0, 2}, CHAIN)
    assert CHAIN.soc_violation({0, 2}) == (0, 1)
    assert is_soc(set(range(3)), CHAIN)
    assert not is_antichain(set(range(3)), CHAIN)
    assert minimals({1, 2}, CHAIN) == {1}
    assert upward_closure({1}, CHAIN) == {1, 2}
    assert count_antichains(CHAIN) == 4


def test_upward_closure_rejects_non_antichain():
    with pytest.raises(NotAnAntichain) as exc:
        upward_closure({0, 2}, CHAIN)
    assert set(exc.value.witness) == {0, 2}


def test_empty_poset():
    p = FinitePoset([], lambda x, y: x == y)
    assert list(enumerate_antichains(p)) == [()]
    assert upward_closure((), p) == frozenset()


def test_check_poset_reports_axiom():
    els = [0, 1, 2]
    assert check_poset(els, lambda x, y: x <= y) is None
    assert check_poset(els, lambda x, y: x < y).axiom == "reflexivity"
    assert check_poset(els, lambda x, y: True).axiom == "antisymmetry"
    nontrans = {(0, 1), (1, 2)}
    assert check_poset(els, lambda x, y: x == y or (x, y) in nontrans).axiom == "transitivity"
    with pytest.raises(PosetError):
        FinitePoset(els, lambda x, y: True)
    with pytest.raises(PosetError):
        check_poset([0, 0], lambda x, y: x == y)


@pytest.mark.parametrize("k", [0, 1, 2, 3, 4, 5])
def test_all_small_posets(k):
    for rel in naturally_labeled_orders(k):
        p = poset_from(k, rel)
        assert soc_antichain_roundtrip(p) is None
        fast = [frozenset(a) for a in enumerate_antichains(p)]
        assert len(fast) == len(set(fast))
        assert set(fast) == set(naive_antichains(p))
        assert set(p.soc_sets()) == set(naive_soc_sets(p))
        # every element of a set dominates one of its minimal elements
        for r in range(k + 1):
            for X in itertools.combinations(range(k), r):
                M = p.minimals(X)
                assert M <= set(X)
                assert all(any(p.leq(m, x) for m in M) for x in X)


def test_antichains_come_out_in_lexicographic_index_order():
    p = FinitePoset("abcd", lambda x, y: x == y or (x, y) in {("a", "c"), ("b", "d")})
    out = [tuple(p.index(x) for x in a) for a in enumerate_antichains(p)]
    assert out == sorted(out)


@settings(max_examples=40)
@given(st.integers(6, 12), st.randoms(use_true_random=False))
def test_enumeration_matches_naive_filter_on_random_posets(k, rnd):
    # random natural labelling: take the transitive closure of random edges
    rel = {(i, j) for i in range(k) for j in range(i + 1, k) if rnd.random() < 0.25}
    changed = True
    while changed:
        extra = {(i, l) for (i, j) in rel for (j2, l) in rel if j == j2} - rel
        rel |= extra
        changed = bool(extra)
    p = poset_from(k, rel)
    assert sorted(map(sorted, (frozenset(a) for a in enumerate_antichains(p)))) == \
        sorted(map(sorted, naive_antichains(p)))


def test_guard_refuses_with_needed_count():
    antichain7 = FinitePoset(range(7), lambda x, y: x == y)
    with pytest.raises(GuardExceeded) as exc:
        count_antichains(antichain7, budget=100)
    assert exc.value.budget == 100 and exc.value.needed > 100
    assert count_antichains(antichain7, budget=128) == 128


def test_guard_budget_environment(monkeypatch):
    from charrule.order import guard_budget

    monkeypatch.setenv("CHARRULE_GUARD_BUDGET", "17")
    assert guard_budget() == 17
    antichain5 = FinitePoset(range(5), lambda x, y: x == y)
    with pytest.raises(GuardExceeded):
        count_antichains(antichain5)


def test_hasse_edges_of_diamond():
    rel = {(0, 1), (0, 2), (0, 3), (1, 3), (2, 3)}
    p = poset_from(4, rel)
    assert sorted(p.hasse_edges()) == [(0, 1), (0, 2), (1, 3), (2, 3)]
