import json

import pytest

from charrule.cli import main
from charrule.fixtures import fixture_path
from charrule.prefs import load_domain
from charrule.rules import load_rule


def fx(name):
    return str(fixture_path(name))


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_eval_eleven_agent_rule(capsys):
    code, out, _ = run(capsys, "eval", fx("eleven_agent_domain.json"), fx("eleven_agent_rule.json"),
                       "--select", "3,3,1,4", "--select", "4,1,1,2")
    assert code == 0
    assert [line.split()[-1] for line in out.splitlines()] == ["a", "b"]


def test_eval_example_profiles(capsys):
    code, out, _ = run(capsys, "eval", fx("c_tiebreak_domain.json"), fx("c_tiebreak_rule.json"),
                       "--profiles", fx("c_tiebreak_profiles.json"), "--json")
    assert code == 0
    assert {r["profile"]: r["choice"] for r in json.loads(out)} == {"P": "b", "Q": "a"}


def test_eval_constant_rule(capsys):
    code, out, _ = run(capsys, "eval", fx("c_tiebreak_domain.json"), fx("constant_b_rule.json"), "--json")
    recs = json.loads(out)
    assert code == 0 and len(recs) == 169 and {r["choice"] for r in recs} == {"b"}


def test_pair_flag_swaps_roles(capsys):
    code, out, _ = run(capsys, "eval", fx("strict2_domain.json"), fx("constant_b_rule.json"),
                       "--pair", "b,a", "--json")
    assert code == 0 and {r["choice"] for r in json.loads(out)} == {"a"}


def test_check_properties(capsys):
    code, out, _ = run(capsys, "check", fx("c_tiebreak_domain.json"), fx("c_tiebreak_table.json"), "wgsp", "apr")
    assert code == 0 and out.count("pass") == 2
    code, out, _ = run(capsys, "check", fx("two_profile_domain.json"), fx("two_profile_table.json"),
                       "almost-monotone", "--json")
    (rec,) = json.loads(out)
    assert code == 1 and rec["verdict"] == "fail" and "supports a" in rec["witness"]
    code, out, _ = run(capsys, "check", fx("strict3_domain.json"), fx("strict3_dictatorship_table.json"),
                       "anonymous")
    assert code == 1 and "swapping v1 and v2" in out


def test_check_not_applicable_is_exit_zero(capsys):
    code, out, err = run(capsys, "check", fx("two_profile_domain.json"), fx("two_profile_table.json"), "anonymous")
    assert code == 0 and "not-applicable" in out and err


def test_check_accepts_rule_files(capsys):
    code, _, _ = run(capsys, "check", fx("c_tiebreak_domain.json"), fx("c_tiebreak_rule.json"), "wgsp", "monotone")
    assert code == 0


@pytest.mark.parametrize("domain,cls,count", [
    ("strict2_domain.json", "wgsp", 6),
    ("strict3_domain.json", "quota", 5),
    ("strict3_domain.json", "committee", 20),
    ("twoalt3_domain.json", "wgsp-anon", 16),
    ("sgsp_domain.json", "sgsp", 10),
    ("twoalt3_domain.json", "sgsp", 6),
])
def test_enumerate_counts(capsys, domain, cls, count):
    code, out, _ = run(capsys, "enumerate", fx(domain), cls)
    assert code == 0 and out.splitlines()[-1] == f"count {count}"


def test_enumerate_round_trips_rule_files(capsys, tmp_path):
    code, out, _ = run(capsys, "enumerate", fx("twoalt2_domain.json"), "wgsp", "--out", str(tmp_path), "--json")
    assert code == 0
    listing = json.loads(out)
    d = load_domain(fx("twoalt2_domain.json"))
    files = sorted(tmp_path.iterdir())
    assert len(files) == listing["count"] == 20
    for path, rec in zip(files, listing["rules"]):
        rule = load_rule(path, d)
        assert rule.to_json() == rec
        assert json.loads(path.read_text()) == rule.to_json()


def test_enumerate_is_lexicographic(capsys):
    _, out, _ = run(capsys, "enumerate", fx("twoalt2_domain.json"), "wgsp", "--json")
    keys = [json.dumps(r["minimals"], sort_keys=True) for r in json.loads(out)["rules"]]
    assert keys == sorted(keys)


def test_enumerate_guard(capsys, monkeypatch):
    monkeypatch.setenv("CHARRULE_GUARD_BUDGET", "5")
    code, _, err = run(capsys, "enumerate", fx("twoalt3_domain.json"), "wgsp")
    assert code == 4 and "budget of 5" in err


def test_sgsp_needs_minimal_assumption(capsys):
    code, _, err = run(capsys, "enumerate", fx("strict3_domain.json"), "sgsp")
    assert code == 3 and err


def test_poset_dump(capsys):
    code, out, _ = run(capsys, "poset", fx("strict2_domain.json"), "--char", "strict", "--antichains", "--json")
    rec = json.loads(out)
    assert code == 0 and len(rec["elements"]) == 4 and len(rec["hasse"]) == 4 and rec["antichains"] == 6


def test_verify_default_suite_is_worker_independent(capsys):
    code1, out1, _ = run(capsys, "verify-theorems")
    code2, out2, _ = run(capsys, "verify-theorems", "--workers", "2")
    assert code1 == code2 == 0
    assert out1 == out2
    assert out1.splitlines()[-1].endswith("failed 0")


def test_verify_special_suites(capsys):
    code, out, _ = run(capsys, "verify-theorems", fx("empty_suite.json"))
    assert code == 0 and out.strip() == "count 0 failed 0"
    code, out, _ = run(capsys, "verify-theorems", fx("not_quasi_cartesian_suite.json"))
    assert code == 0 and "not-applicable" in out


def test_exit_codes_for_bad_inputs(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert run(capsys, "eval", str(bad), fx("eleven_agent_rule.json"))[0] == 2
    assert run(capsys, "eval", str(tmp_path / "missing.json"), fx("eleven_agent_rule.json"))[0] == 2
    comparable = tmp_path / "r.json"
    comparable.write_text(json.dumps({"char": "strict", "minimals": [[], ["v1"]]}))
    code, out, err = run(capsys, "eval", fx("strict2_domain.json"), str(comparable))
    assert code == 3 and not out and "comparable" in err
    unknown = tmp_path / "u.json"
    unknown.write_text(json.dumps({"char": "strict", "minimals": [["nobody"]]}))
    assert run(capsys, "eval", fx("strict2_domain.json"), str(unknown))[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["enumerate", fx("strict2_domain.json"), "bogus"])
    assert exc.value.code == 2
