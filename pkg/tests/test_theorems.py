import json

import pytest

from charrule import fixtures as F
from charrule.theorems import CHECKS, check_theorem, load_suite, run_instance, sgsp_family
from charrule import oracle


SMALL = {
    "twoalt2": lambda: F.two_alternative_domain(2),
    "strict2": lambda: F.strict_domain(2),
    "strict3": lambda: F.strict_domain(3),
    "twoalt3": lambda: F.two_alternative_domain(3),
    "guarded": F.guarded_abc_domain,
    "two_profile": F.two_profile_domain,
}


@pytest.mark.parametrize("name", sorted(SMALL))
@pytest.mark.parametrize("theorem", sorted(CHECKS))
def test_every_check_passes_or_declines(theorem, name):
    report = check_theorem(theorem, SMALL[name](), label=name)
    assert report.verdict in ("pass", "not-applicable"), report.witnesses
    if report.verdict == "pass":
        assert report.expected == report.observed and not report.witnesses
    else:
        assert report.notes


def test_converse_declined_on_two_profile_domain_with_counterexample():
    r = check_theorem("wgsp-implies-almost-monotone", F.two_profile_domain())
    assert r.verdict == "not-applicable"
    assert any("not almost monotone" in n for n in r.notes)
    r = check_theorem("almost-monotone-implies-wgsp", F.two_profile_domain())
    assert r.verdict == "pass"


def test_two_agent_strong_gsp_is_declined():
    r = check_theorem("sgsp-veto", F.two_alternative_domain(2))
    assert r.verdict == "not-applicable"


def test_sgsp_family_size():
    for d, u in ((F.two_alternative_domain(3), 1), (F.sgsp_domain(), 2)):
        assert len(d.unanimous_indifference()) == u
        fam = sgsp_family(d)
        assert len({r.table().values for r in fam}) == 2 + 2 * 2**u
        assert all(oracle.is_sgsp(r.table()) for r in fam)


def test_dedekind_counts_for_strict_domains():
    # antichains of the Boolean lattice on n agents: 3, 6, 20
    for n, m in ((1, 3), (2, 6), (3, 20)):
        r = check_theorem("strict-committee", F.strict_domain(n))
        assert r.verdict == "pass" and r.observed == m


def test_report_json_roundtrip():
    r = check_theorem("quota-majority", F.strict_domain(3))
    obj = json.loads(json.dumps(r.to_json()))
    assert obj["verdict"] == "pass" and obj["observed"] == 5


def test_unknown_theorem():
    with pytest.raises(ValueError):
        check_theorem("nope", F.strict_domain(2))


def test_suites():
    assert load_suite(F.fixture_path("empty_suite.json")) == []
    inst = load_suite(F.fixture_path("not_quasi_cartesian_suite.json"))
    assert [run_instance(i).verdict for i in inst] == ["not-applicable"]


def test_inline_suite(tmp_path):
    dom = {"alternatives": ["a", "b"], "agents": ["v1", "v2"], "strict_universal": True}
    (tmp_path / "s.json").write_text(json.dumps(
        {"instances": [{"theorem": "quota-majority", "domain": dom, "guards": {"budget": 100}}]}))
    (inst,) = load_suite(tmp_path / "s.json")
    assert inst["budget"] == 100 and run_instance(inst).verdict == "pass"
