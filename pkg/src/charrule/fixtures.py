"""Worked-example fixtures: domains, rules and profiles used by the acceptance
suite and shipped as JSON under ``charrule/fixtures/``.

Run ``python -m charrule.fixtures DIR`` to regenerate the JSON files.
"""

from __future__ import annotations

import json
import sys
from importlib import resources
from pathlib import Path

from .prefs import Domain, Preference, Profile, domain_to_json, profile_to_json
from .rules import ScfTable, extract_soc, from_soc, table_to_json
from .characters import make_character

ABC = ("a", "b", "c")
ABCD = ("a", "b", "c", "d")


def fixture_path(name: str) -> Path:
    return Path(str(resources.files("charrule") / "fixtures" / name))


def _p(text: str, labels=ABC) -> Preference:
    return Preference.parse(text, labels)


# two agents, three alternatives: the choice depends on c although only a or b is chosen

def c_tiebreak_domain() -> Domain:
    return Domain.universal(2, ABC, agents=("v1", "v2"))


def c_tiebreak_choice(P: Profile) -> int:
    """``b`` iff v1 prefers b to a, or v1 is a~b but puts c above both; else ``a``."""
    a, b, c = 0, 1, 2
    W = P[0]
    if W.prefers(b, a) or (not W.prefers(a, b) and W.prefers(c, a)):
        return b
    return a


def c_tiebreak_profiles() -> dict[str, Profile]:
    return {
        "P": Profile((_p("c > a ~ b"), _p("a > b > c"))),
        "Q": Profile((_p("a ~ b > c"), _p("a > b > c"))),
    }


def c_tiebreak_rule():
    d = c_tiebreak_domain()
    table = ScfTable.from_function(d, c_tiebreak_choice)
    return from_soc("general", extract_soc(table, "general"), d)


# two feasible profiles, wGSP yet not almost monotone

def two_profile_domain() -> Domain:
    P = Profile((_p("a > b > c > d", ABCD), _p("b > a > d > c", ABCD)))
    Q = Profile((_p("c > d > a > b", ABCD), _p("d > c > b > a", ABCD)))
    return Domain([P, Q], alternatives=ABCD, agents=("v1", "v2"))


def two_profile_profiles() -> dict[str, Profile]:
    d = two_profile_domain()
    P = Profile((_p("a > b > c > d", ABCD), _p("b > a > d > c", ABCD)))
    Q = Profile((_p("c > d > a > b", ABCD), _p("d > c > b > a", ABCD)))
    assert P in d and Q in d
    return {"P": P, "Q": Q}


def two_profile_table() -> ScfTable:
    d = two_profile_domain()
    prof = two_profile_profiles()
    return ScfTable.from_function(d, lambda R: 0 if R == prof["P"] else 1)


# eleven agents, three a~b preferences

ELEVEN_AGENT_OPTIONS = ("a > b > c", "b > a > c", "a ~ b > c", "a ~ b ~ c", "c > a ~ b")
ELEVEN_AGENT_MINIMALS = ((2, 4, 0, 3), (4, 1, 3, 1), (4, 2, 4, 0))


def eleven_agent_domain() -> Domain:
    opts = [_p(s) for s in ELEVEN_AGENT_OPTIONS]
    return Domain.cartesian([opts] * 11, alternatives=ABC, agents=[f"v{i}" for i in range(1, 12)])


def eleven_agent_profile(counts) -> Profile:
    """A profile with the given count vector; leftover agents prefer b."""
    d = eleven_agent_domain()
    k0, *ks = counts
    prefs = [_p("a > b > c")] * k0
    for W, k in zip(d.indiff_prefs, ks):
        prefs += [W] * k
    prefs += [_p("b > a > c")] * (d.n_agents - len(prefs))
    return Profile(tuple(prefs))


def eleven_agent_profiles() -> dict[str, Profile]:
    return {"P": eleven_agent_profile((3, 3, 1, 4)), "Q": eleven_agent_profile((4, 1, 1, 2))}


def eleven_agent_rule():
    from .rules import CanonicalRule

    return CanonicalRule(make_character("anon", eleven_agent_domain()), ELEVEN_AGENT_MINIMALS)


# small standard domains

def strict_domain(n: int) -> Domain:
    return Domain.universal(n, ("a", "b"), strict=True)


def two_alternative_domain(n: int) -> Domain:
    return Domain.universal(n, ("a", "b"))


def sgsp_domain() -> Domain:
    """Three agents satisfying the minimal assumption; v1 has two a~b preferences."""
    f1 = [_p(s) for s in ("a > b > c", "b > a > c", "c > a ~ b", "a ~ b > c")]
    f2 = [_p(s) for s in ("a > b > c", "b > a > c", "a ~ b > c")]
    return Domain.cartesian([f1, f2, f2], alternatives=ABC)


def guarded_abc_domain() -> Domain:
    """Two agents over a, b, c with four admissible preferences each."""
    opts = [_p(s) for s in ("a > b > c", "b > a > c", "c > a ~ b", "a ~ b > c")]
    return Domain.cartesian([opts, opts], alternatives=ABC)


def dictatorship_table(domain: Domain) -> ScfTable:
    a, b = domain.pair
    return ScfTable.from_function(domain, lambda P: a if P[0].prefers(a, b) else b)


def _profiles_json(profiles: dict[str, Profile], domain: Domain) -> dict:
    return {name: profile_to_json(P, domain) for name, P in profiles.items()}


def write_all(out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)

    def dump(name, obj):
        (out / name).write_text(json.dumps(obj, indent=2) + "\n", encoding="utf-8")

    d = c_tiebreak_domain()
    dump("c_tiebreak_domain.json", domain_to_json(d, expand=False))
    dump("c_tiebreak_rule.json", c_tiebreak_rule().to_json())
    dump("c_tiebreak_profiles.json", _profiles_json(c_tiebreak_profiles(), d))
    dump("c_tiebreak_table.json", table_to_json(ScfTable.from_function(d, c_tiebreak_choice)))

    d = two_profile_domain()
    dump("two_profile_domain.json", domain_to_json(d))
    dump("two_profile_table.json", table_to_json(two_profile_table()))
    dump("two_profile_profiles.json", _profiles_json(two_profile_profiles(), d))

    d = eleven_agent_domain()
    dump("eleven_agent_domain.json", domain_to_json(d, expand=False))
    dump("eleven_agent_rule.json", eleven_agent_rule().to_json())
    dump("eleven_agent_profiles.json", _profiles_json(eleven_agent_profiles(), d))

    for n in (2, 3):
        dump(f"strict{n}_domain.json", domain_to_json(strict_domain(n), expand=False))
        dump(f"twoalt{n}_domain.json", domain_to_json(two_alternative_domain(n), expand=False))
    dump("strict3_dictatorship_table.json", table_to_json(dictatorship_table(strict_domain(3))))
    dump("sgsp_domain.json", domain_to_json(sgsp_domain(), expand=False))
    dump("guarded_abc_domain.json", domain_to_json(guarded_abc_domain(), expand=False))

    constant_b = {"char": "general", "pair": ["a", "b"], "minimals": []}
    dump("constant_b_rule.json", constant_b)


if __name__ == "__main__":
    write_all(Path(sys.argv[1]) if len(sys.argv) > 1 else fixture_path(""))
