import itertools
import json

import pytest
from hypothesis import given, settings

from charrule import fixtures as F
from charrule.characters import Level, make_character
from charrule.order import NotAnAntichain
from charrule.prefs import Domain
from charrule.rules import (
    CanonicalRule,
    NotMonotone,
    RuleError,
    ScfTable,
    committee_rule,
    extract_soc,
    from_antichain,
    from_soc,
    is_character_monotone,
    quota_rule,
    rule_from_json,
    table_from_json,
    table_to_json,
    to_soc,
    veto_for_a,
    veto_for_b,
)
from charrule import oracle

from conftest import cartesian_domains


def test_example_rule_evaluates_as_described():
    rule = F.c_tiebreak_rule()
    prof = F.c_tiebreak_profiles()
    a, b = rule.pair
    assert rule(prof["P"]) == b
    assert rule(prof["Q"]) == a
    table = ScfTable.from_function(rule.domain, F.c_tiebreak_choice)
    assert rule.table() == table


def test_eleven_agent_rule():
    rule = F.eleven_agent_rule()
    assert rule(F.eleven_agent_profile((3, 3, 1, 4))) == 0
    assert rule(F.eleven_agent_profile((4, 1, 1, 2))) == 1


def test_constant_rules():
    d = F.c_tiebreak_domain()
    char = make_character("general", d)
    assert set(CanonicalRule(char, []).table().values) == {1}
    assert from_soc(char, char.image).table() == ScfTable.constant(d, 0)
    assert extract_soc(ScfTable.constant(d, 0), char) == char.image
    assert extract_soc(ScfTable.constant(d, 1), char) == frozenset()


def test_singleton_domain_allows_both_constants():
    P = F.c_tiebreak_profiles()["P"]
    d = Domain([P], alternatives="abc", agents=("v1", "v2"))
    char = make_character("general", d)
    assert CanonicalRule(char, [char(P)])(P) == 0
    assert CanonicalRule(char, [])(P) == 1


def test_validation_rejects_comparable_minimals():
    d = F.strict_domain(2)
    with pytest.raises(NotAnAntichain):
        from_antichain("strict", [frozenset(), frozenset({0})], d)


def test_validation_rejects_values_outside_image():
    d = F.strict_domain(2)
    with pytest.raises(RuleError):
        from_antichain("strict", [frozenset({5})], d)
    with pytest.raises(RuleError):
        from_soc("strict", {frozenset({0})}, d)  # not upward closed


def test_two_profile_scf_is_not_monotone():
    phi = F.two_profile_table()
    with pytest.raises(NotMonotone) as exc:
        extract_soc(phi, "general")
    P_, Q_ = exc.value.witness
    prof = F.two_profile_profiles()
    # witness (Q, P): the profile picking b supports a at least as much as the one picking a
    assert (P_, Q_) == (prof["Q"], prof["P"])


@settings(max_examples=25, deadline=None)
@given(cartesian_domains(size_max=12))
def test_soc_roundtrip_and_membership(d):
    char = make_character("general", d)
    socs = list(char.poset.soc_sets())
    tables = set()
    a, b = d.pair
    for C in socs:
        rule = from_soc(char, C)
        assert to_soc(rule) == C
        t = rule.table()
        assert t.values == tuple(a if x in C else b for x in char.values)
        assert all(rule(P) == v for P, v in zip(d.profiles, t.values))
        assert extract_soc(t, char) == C
        tables.add(t.values)
    # distinct SOC sets give distinct rules
    assert len(tables) == len(socs)


@settings(max_examples=25, deadline=None)
@given(cartesian_domains(size_max=12))
def test_label_symmetry(d):
    """The swapped scf is parametrized by the b-side set under the swapped pair."""
    char = make_character("general", d)
    swapped_domain = d.with_pair((d.pair[1], d.pair[0]))
    char_ba = make_character("general", swapped_domain)
    for C in itertools.islice(char.poset.soc_sets(), 40):
        phi = from_soc(char, C).table()
        swapped = ScfTable(swapped_domain, phi.values)
        D = extract_soc(swapped, char_ba)
        assert D == {char_ba(P) for P, v in zip(d.profiles, phi.values) if v == d.pair[1]}
        assert from_soc(char_ba, D).table().values == phi.values


def test_anonymous_rules_are_permutation_invariant():
    d = F.two_alternative_domain(3)
    char = make_character("anon", d)
    for ac in char.poset.antichains():
        rule = CanonicalRule(char, ac)
        for P in d.profiles:
            for sigma in itertools.permutations(range(3)):
                assert rule(P.permute(sigma)) == rule(P)


def test_committee_rule():
    d = F.strict_domain(3)
    majority = [S for r in (2, 3) for S in itertools.combinations(range(3), r)]
    rule = committee_rule(majority, d)
    assert rule.table() == quota_rule(2, d).table()
    with pytest.raises(RuleError):
        committee_rule([(0, 1)], d)


def test_quota_rules():
    d = F.strict_domain(3)
    tables = {quota_rule(q, d).table().values for q in range(5)}
    assert len(tables) == 5
    assert set(quota_rule(0, d).table().values) == {0}
    assert set(quota_rule(4, d).table().values) == {1}
    with pytest.raises(RuleError):
        quota_rule(5, d)
    with pytest.raises(RuleError):
        quota_rule(1, F.two_alternative_domain(3))


def test_veto_rules():
    d = F.two_alternative_domain(3)
    (U,) = d.unanimous_indifference()
    a, b = d.pair
    vb = veto_for_b([], d)
    va = veto_for_a([U], d)
    for P in d.profiles:
        stances = [W.compare(a, b) for W in P]
        assert (vb(P) == a) == (1 in stances)
        assert (va(P) == a) == ((1 in stances and -1 not in stances) or P == U)
    assert Level(0) in to_soc(vb) and Level(0) not in to_soc(va)
    with pytest.raises(RuleError):
        veto_for_b([d.profiles[0]], d)


def test_is_character_monotone():
    assert is_character_monotone(ScfTable.from_function(F.c_tiebreak_domain(), F.c_tiebreak_choice), "general")
    assert not is_character_monotone(F.two_profile_table(), "general")


def test_rule_json_roundtrip():
    for rule in (F.c_tiebreak_rule(), F.eleven_agent_rule(), veto_for_a(F.sgsp_domain().unanimous_indifference(),
                                                               F.sgsp_domain())):
        obj = json.loads(json.dumps(rule.to_json()))
        back = rule_from_json(obj, rule.domain)
        assert back.minimals == rule.minimals
        assert json.dumps(back.to_json()) == json.dumps(rule.to_json())


def test_shipped_fixture_files_match_builders():
    from charrule.prefs import load_domain
    from charrule.rules import load_rule

    d = load_domain(F.fixture_path("c_tiebreak_domain.json"))
    assert d.profiles == F.c_tiebreak_domain().profiles
    assert load_rule(F.fixture_path("c_tiebreak_rule.json"), d).minimals == F.c_tiebreak_rule().minimals
    d11 = load_domain(F.fixture_path("eleven_agent_domain.json"))
    assert d11.factors == F.eleven_agent_domain().factors
    assert load_rule(F.fixture_path("eleven_agent_rule.json"), d11).minimals == F.eleven_agent_rule().minimals
    tp = load_domain(F.fixture_path("two_profile_domain.json"))
    obj = json.loads(F.fixture_path("two_profile_table.json").read_text())
    assert table_from_json(obj, tp) == F.two_profile_table()


def test_table_json_errors():
    d = F.strict_domain(2)
    obj = table_to_json(ScfTable.constant(d, 0))
    assert table_from_json(obj, d) == ScfTable.constant(d, 0)
    obj["table"] = obj["table"][1:]
    with pytest.raises(RuleError):
        table_from_json(obj, d)


def test_table_values_must_be_in_pair():
    d = Domain.universal(1, "abc")
    with pytest.raises(RuleError):
        ScfTable.constant(d, 2)


def test_wgsp_tables_are_character_monotone():
    d = F.guarded_abc_domain()
    for t in oracle.enumerate_nonmanipulable(d, "strong"):
        extract_soc(t, "general")
