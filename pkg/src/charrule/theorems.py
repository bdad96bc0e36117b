"""Two-sided executable checks of the characterization results.

Every check compares a family of canonical rules (built from SOC sets or
antichains of a character image) with the tables found by the brute-force
oracle, by count and extensionally. A check whose hypotheses fail on the
given domain reports ``not-applicable`` rather than passing vacuously.
"""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Callable

import numpy as np

from . import oracle
from .characters import make_character
from .order import guard_budget
from .prefs import Domain, domain_from_json, load_domain, supports_at_least
from .rules import (
    CanonicalRule,
    NotMonotone,
    ScfTable,
    committee_rule,
    extract_soc,
    from_soc,
    quota_rule,
    veto_for_a,
    veto_for_b,
)

SEARCH_ORDER = "profile-pairs-lex/v1"

PASS, FAIL, NOT_APPLICABLE = "pass", "fail", "not-applicable"


@dataclass
class TheoremReport:
    theorem: str
    instance: str
    expected: object = None
    observed: object = None
    verdict: str = PASS
    witnesses: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    seconds: float = 0.0
    search_order: str = SEARCH_ORDER

    @property
    def ok(self) -> bool:
        return self.verdict in (PASS, NOT_APPLICABLE)

    def to_json(self) -> dict:
        return asdict(self)

    def line(self, timing: bool = True) -> str:
        extra = f" expected={self.expected} observed={self.observed}" if self.verdict != NOT_APPLICABLE else ""
        clock = f" ({self.seconds:.2f}s)" if timing else ""
        return f"{self.verdict:<15} {self.theorem:<32} {self.instance}{extra}{clock}"


def _finish(report: TheoremReport) -> TheoremReport:
    if report.verdict != NOT_APPLICABLE:
        report.verdict = PASS if report.expected == report.observed and not report.witnesses else FAIL
    return report


def _not_applicable(report: TheoremReport, why: str) -> TheoremReport:
    report.verdict = NOT_APPLICABLE
    report.notes.append(why)
    return report


def _describe(domain: Domain) -> str:
    flags = []
    if domain.is_universal:
        flags.append("universal")
    elif domain.is_strict_universal:
        flags.append("strict-universal")
    elif domain.is_cartesian:
        flags.append("cartesian")
    return (f"n={domain.n_agents} |A|={domain.n_alternatives} |P|={len(domain)}"
            + (f" [{' '.join(flags)}]" if flags else ""))


def _keys(tables) -> set[tuple[bool, ...]]:
    return {t.bits for t in tables}


def _compare_families(report, domain, canonical: list[ScfTable], brute: list[ScfTable], what: str):
    """Soundness, injectivity and completeness of a canonical family."""
    report.expected = len(brute)
    report.observed = len(canonical)
    canon_keys = _keys(canonical)
    if len(canon_keys) != len(canonical):
        report.witnesses.append(f"two parameters give the same {what} rule")
    brute_keys = _keys(brute)
    for t in canonical:
        if t.bits not in brute_keys:
            w = oracle.find_strong_manipulation(t)
            report.witnesses.append(f"canonical rule fails the oracle: {w.describe(domain) if w else t.bits}")
            break
    for t in brute:
        if t.bits not in canon_keys:
            report.witnesses.append(f"oracle-approved table is not canonical: {t.bits}")
            break


def _almost_monotone_constraints(domain: Domain) -> oracle.Constraints:
    """Forbidden pairs from the support relation: ``phi(Q) = a`` together with ``phi(P) = b``."""
    a = domain.pair[0]
    I, J = [], []
    for i, P in enumerate(domain.profiles):
        for j, Q in enumerate(domain.profiles):
            if i != j and supports_at_least(P, Q, a, domain.pair):
                I.append(j)  # phi(Q)=a together with phi(P)=b is forbidden
                J.append(i)
    return oracle.Constraints(np.array(I, dtype=np.int64), np.array(J, dtype=np.int64),
                              np.ones(len(I), dtype=bool), len(domain))


def _almost_monotone_tables(domain: Domain, budget: int) -> list[ScfTable]:
    cons = _almost_monotone_constraints(domain)
    N = len(domain)
    return [ScfTable.from_bits(domain, [(m >> i) & 1 for i in range(N)])
            for m in oracle._backtrack(domain, cons, budget)]


def check_almost_monotone_implies_wgsp(domain, *, budget, label=""):
    r = TheoremReport("almost-monotone-implies-wgsp", label or _describe(domain))
    tables = _almost_monotone_tables(domain, budget)
    r.expected = len(tables)
    good = oracle.filter_nonmanipulable(tables, "strong")
    r.observed = len(good)
    if len(good) != len(tables):
        bad = next(t for t in tables if t not in good)
        r.witnesses.append(oracle.find_strong_manipulation(bad).describe(domain))
    return _finish(r)


def check_wgsp_implies_almost_monotone(domain, *, budget, label=""):
    r = TheoremReport("wgsp-implies-almost-monotone", label or _describe(domain))
    tables = list(oracle.enumerate_nonmanipulable(domain, "strong", budget=budget))
    failures = []
    if tables:
        bits = np.array([t.bits for t in tables], dtype=bool)
        bad = _almost_monotone_constraints(domain).violated(bits)
        failures = [(t, oracle.find_monotonicity_violation(t)) for t, x in zip(tables, bad) if x]
    if not domain.is_quasi_cartesian:
        _not_applicable(r, "domain is not quasi-cartesian")
        for t, (P, Q) in failures[:3]:
            r.notes.append(
                f"wGSP table {t.bits} is not almost monotone: [{domain.format_profile(P)}] supports a "
                f"at least as [{domain.format_profile(Q)}] yet the choice drops from a to b")
        r.notes.append(f"{len(failures)} of {len(tables)} wGSP tables are not almost monotone")
        return r
    r.expected = len(tables)
    r.observed = len(tables) - len(failures)
    for t, (P, Q) in failures[:3]:
        r.witnesses.append(f"{t.bits}: P=[{domain.format_profile(P)}] Q=[{domain.format_profile(Q)}]")
    return _finish(r)


def check_wgsp_soc_bijection(domain, *, budget, label=""):
    r = TheoremReport("wgsp-soc-bijection", label or _describe(domain))
    if not domain.is_quasi_cartesian:
        return _not_applicable(r, "domain is not quasi-cartesian")
    char = make_character("general", domain)
    canonical = []
    for C in char.poset.soc_sets(budget):
        rule = from_soc(char, C)
        a, b = domain.pair
        canonical.append(ScfTable(domain, tuple(a if x in C else b for x in char.values)))
        if rule.to_soc() != C:
            r.witnesses.append("SOC set does not survive the minimal-element roundtrip")
            break
    brute = list(oracle.enumerate_nonmanipulable(domain, "strong", budget=budget))
    _compare_families(r, domain, canonical, brute, "SOC")
    return _finish(r)


def _rules_by_dominance(char, budget) -> list[ScfTable]:
    """Tables of the rules given by each antichain, evaluated profile by profile."""
    domain = char.domain
    a, b = domain.pair
    out = []
    for antichain in char.poset.antichains(budget):
        rule = CanonicalRule(char, antichain)
        out.append(ScfTable(domain, tuple(a if rule.selects_a(x) else b for x in char.values)))
    return out


def check_wgsp_antichain_bijection(domain, *, budget, label=""):
    r = TheoremReport("wgsp-antichain-bijection", label or _describe(domain))
    if not domain.is_cartesian:
        return _not_applicable(r, "domain is not cartesian")
    canonical = _rules_by_dominance(make_character("general", domain), budget)
    brute = list(oracle.enumerate_nonmanipulable(domain, "strong", budget=budget))
    _compare_families(r, domain, canonical, brute, "antichain")
    return _finish(r)


def _anonymous_applicable(domain) -> str | None:
    facs = domain.factors
    if not domain.is_cartesian:
        return "domain is not cartesian"
    if facs is None:
        facs = domain.agent_options
    if len(set(facs)) != 1:
        return "agents do not share one set of admissible preferences"
    return None


def check_anonymous_monotone(domain, *, budget, label=""):
    r = TheoremReport("anonymous-wgsp", label or _describe(domain))
    why = _anonymous_applicable(domain)
    if why:
        return _not_applicable(r, why)
    char = make_character("anon", domain)
    tables = list(oracle.enumerate_anonymous_scfs(domain))
    wgsp = {t.bits for t in oracle.filter_nonmanipulable(tables, "strong")}
    r.expected = len(tables)
    agree = 0
    for t in tables:
        try:
            extract_soc(t, char)
            mono = True
        except NotMonotone:
            mono = False
        if mono == (t.bits in wgsp):
            agree += 1
        elif len(r.witnesses) < 3:
            r.witnesses.append(f"{t.bits}: wGSP={t.bits in wgsp} count-monotone={mono}")
    r.observed = agree
    return _finish(r)


def check_anonymous_antichain(domain, *, budget, label=""):
    r = TheoremReport("anonymous-antichain-bijection", label or _describe(domain))
    why = _anonymous_applicable(domain)
    if why:
        return _not_applicable(r, why)
    canonical = _rules_by_dominance(make_character("anon", domain), budget)
    brute = oracle.filter_nonmanipulable(list(oracle.enumerate_anonymous_scfs(domain)), "strong")
    _compare_families(r, domain, canonical, brute, "antichain")
    for t in canonical:
        if oracle.find_anonymity_violation(t) is not None:
            r.witnesses.append(f"count-vector rule {t.bits} is not anonymous")
            break
    return _finish(r)


def check_strict_committee(domain, *, budget, label=""):
    r = TheoremReport("strict-committee", label or _describe(domain))
    if not domain.is_strict_universal:
        return _not_applicable(r, "domain is not the strict universal domain")
    n = domain.n_agents
    power = [frozenset(S) for k in range(n + 1) for S in combinations(range(n), k)]
    canonical = []
    for C in make_character("strict", domain).poset.soc_sets(budget):
        fam = [S for S in power if S in C]
        canonical.append(committee_rule(fam, domain).table())
    brute = list(oracle.enumerate_nonmanipulable(domain, "strong", budget=budget))
    _compare_families(r, domain, canonical, brute, "committee")
    return _finish(r)


def check_two_alternative_veto(domain, *, budget, label=""):
    r = TheoremReport("two-alternative-veto", label or _describe(domain))
    if domain.n_alternatives != 2:
        return _not_applicable(r, "domain has more than the two designated alternatives")
    if not domain.is_quasi_cartesian:
        return _not_applicable(r, "domain is not quasi-cartesian")
    canonical = _rules_by_dominance(make_character("bi", domain), budget)
    brute = list(oracle.enumerate_nonmanipulable(domain, "strong", budget=budget))
    _compare_families(r, domain, canonical, brute, "veto-pair")
    return _finish(r)


def check_quota(domain, *, budget, label=""):
    r = TheoremReport("quota-majority", label or _describe(domain))
    if not domain.is_strict_universal:
        return _not_applicable(r, "domain is not the strict universal domain")
    n = domain.n_agents
    canonical = [quota_rule(q, domain).table() for q in range(n + 2)]
    brute = oracle.filter_nonmanipulable(list(oracle.enumerate_anonymous_scfs(domain)), "strong")
    _compare_families(r, domain, canonical, brute, "quota")
    if len(brute) != n + 2:
        r.witnesses.append(f"expected n+2={n + 2} anonymous wGSP rules, oracle found {len(brute)}")
    return _finish(r)


def sgsp_family(domain: Domain) -> list[CanonicalRule]:
    """Constants, and veto for a / veto for b for every set of unanimous a~b profiles."""
    char = make_character("strong", domain)
    U_hat = domain.unanimous_indifference()
    rules = [from_soc(char, frozenset()), from_soc(char, char.image)]
    for k in range(len(U_hat) + 1):
        for U in combinations(U_hat, k):
            rules.append(veto_for_b(U, domain))
            rules.append(veto_for_a(U, domain))
    return rules


def check_sgsp_veto(domain, *, budget, label=""):
    r = TheoremReport("sgsp-veto", label or _describe(domain))
    if not domain.satisfies_minimal_assumption:
        return _not_applicable(r, "domain fails the minimal assumption (cartesian, each agent can be a~b, a>b, b>a)")
    if domain.n_agents < 3:
        return _not_applicable(r, "the veto characterization is only checked for three or more agents")
    canonical = [rule.table() for rule in sgsp_family(domain)]
    brute = list(oracle.enumerate_nonmanipulable(domain, "weak", budget=budget))
    _compare_families(r, domain, canonical, brute, "veto")
    for t in canonical:
        w = oracle.find_weak_manipulation(t)
        if w is not None:
            r.witnesses.append(w.describe(domain))
            break
    # second route: filter the antichain enumeration of all wGSP rules
    wgsp = _rules_by_dominance(make_character("general", domain), budget)
    filtered = _keys(oracle.filter_nonmanipulable(wgsp, "weak"))
    if filtered != _keys(canonical):
        r.witnesses.append(f"filtering {len(wgsp)} wGSP rules leaves {len(filtered)}, not the veto family")
    r.notes.append(f"|U_hat|={len(domain.unanimous_indifference())}, {len(wgsp)} wGSP rules filtered")
    return _finish(r)


def check_isp_wgsp(domain, *, budget, label=""):
    r = TheoremReport("isp-wgsp", label or _describe(domain))
    if not domain.is_cartesian:
        return _not_applicable(r, "domain is not cartesian")
    isp = list(oracle.enumerate_nonmanipulable(domain, "individual", budget=budget))
    wgsp = list(oracle.enumerate_nonmanipulable(domain, "strong", budget=budget))
    r.expected, r.observed = len(isp), len(wgsp)
    if _keys(isp) != _keys(wgsp):
        r.witnesses.append("individually strategy-proof and wGSP tables differ")
    return _finish(r)


CHECKS: dict[str, Callable[..., TheoremReport]] = {
    "almost-monotone-implies-wgsp": check_almost_monotone_implies_wgsp,
    "wgsp-implies-almost-monotone": check_wgsp_implies_almost_monotone,
    "wgsp-soc-bijection": check_wgsp_soc_bijection,
    "wgsp-antichain-bijection": check_wgsp_antichain_bijection,
    "anonymous-wgsp": check_anonymous_monotone,
    "anonymous-antichain-bijection": check_anonymous_antichain,
    "strict-committee": check_strict_committee,
    "two-alternative-veto": check_two_alternative_veto,
    "quota-majority": check_quota,
    "sgsp-veto": check_sgsp_veto,
    "isp-wgsp": check_isp_wgsp,
}


def check_theorem(theorem: str, domain: Domain, *, budget: int | None = None, label: str = "") -> TheoremReport:
    try:
        fn = CHECKS[theorem]
    except KeyError:
        raise ValueError(f"unknown theorem id {theorem!r}; known: {sorted(CHECKS)}") from None
    budget = guard_budget() if budget is None else budget
    start = time.perf_counter()
    report = fn(domain, budget=budget, label=label)
    report.seconds = round(time.perf_counter() - start, 3)
    return report


def load_suite(path: str | Path) -> list[dict]:
    """Read a suite file: ``{"instances": [{"theorem", "domain", "guards"?, "label"?}]}``.

    ``domain`` is a path relative to the suite file or an inline domain object.
    """
    path = Path(path)
    obj = json.loads(path.read_text(encoding="utf-8"))
    out = []
    for inst in obj.get("instances", []):
        dom = inst["domain"]
        if isinstance(dom, str):
            dom_path = (path.parent / dom).resolve()
            domain = load_domain(dom_path)
            label = inst.get("label", Path(dom).stem)
        else:
            domain = domain_from_json(dom)
            label = inst.get("label", "inline")
        out.append({"theorem": inst["theorem"], "domain": domain, "label": label,
                    "budget": inst.get("guards", {}).get("budget")})
    return out


def run_instance(inst: dict) -> TheoremReport:
    return check_theorem(inst["theorem"], inst["domain"], budget=inst.get("budget"), label=inst["label"])
