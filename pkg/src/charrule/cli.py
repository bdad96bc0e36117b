"""Command line entry point: ``charrule {eval,check,enumerate,poset,verify-theorems}``.

Exit codes: 0 success, 1 a checked property failed, 2 malformed input file,
3 input that parses but does not validate (e.g. a rule that is not an
antichain of the domain's character image), 4 a guard refused the work.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import oracle
from .characters import KINDS, make_character
from .fixtures import fixture_path
from .order import GuardExceeded, NotAnAntichain, guard_budget
from .prefs import Domain, DomainError, Profile, load_domain, profile_from_json
from .rules import (
    CanonicalRule,
    NotMonotone,
    RuleError,
    ScfTable,
    extract_soc,
    quota_rule,
    table_from_json,
)
from .theorems import CHECKS, TheoremReport, load_suite, run_instance, sgsp_family

EXIT_OK, EXIT_FAIL, EXIT_SCHEMA, EXIT_INVALID, EXIT_GUARD = 0, 1, 2, 3, 4

PROPERTIES = ("wgsp", "sgsp", "apr", "isp", "almost-monotone", "anonymous", "monotone")
CLASSES = ("wgsp", "wgsp-anon", "sgsp", "quota", "committee")


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _read_json(path) -> object:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise CliError(EXIT_SCHEMA, f"{path}: no such file") from None
    except json.JSONDecodeError as exc:
        raise CliError(EXIT_SCHEMA, f"{path}: invalid JSON: {exc}") from None


def _domain(args) -> Domain:
    try:
        domain = load_domain(args.domain)
    except FileNotFoundError:
        raise CliError(EXIT_SCHEMA, f"{args.domain}: no such file") from None
    except DomainError as exc:
        raise CliError(EXIT_SCHEMA, f"{args.domain}: {exc}") from None
    if getattr(args, "pair", None):
        labels = [s.strip() for s in args.pair.split(",")]
        if len(labels) != 2:
            raise CliError(EXIT_SCHEMA, "--pair needs two comma separated labels, e.g. a,b")
        try:
            domain = domain.with_pair(tuple(labels))
        except DomainError as exc:
            raise CliError(EXIT_SCHEMA, str(exc)) from None
    return domain


def _load_rule(path, domain: Domain, pair_from_cli: bool) -> CanonicalRule:
    obj = _read_json(path)
    if not isinstance(obj, dict) or "char" not in obj or "minimals" not in obj:
        raise CliError(EXIT_SCHEMA, f"{path}: a rule file needs 'char' and 'minimals'")
    if "pair" in obj and not pair_from_cli:
        try:
            domain = domain.with_pair(tuple(obj["pair"]))
        except (DomainError, ValueError, TypeError) as exc:
            raise CliError(EXIT_SCHEMA, f"{path}: {exc}") from None
    try:
        char = make_character(obj["char"], domain)
        minimals = [char.decode(m) for m in obj["minimals"]]
    except (DomainError, ValueError, TypeError) as exc:
        raise CliError(EXIT_SCHEMA, f"{path}: {exc}") from None
    try:
        return CanonicalRule(char, minimals)
    except NotAnAntichain as exc:
        x, y = exc.witness
        raise CliError(EXIT_INVALID, f"{path}: minimals are comparable: "
                                     f"{char.format(x)} <= {char.format(y)}") from None
    except (RuleError, DomainError) as exc:
        raise CliError(EXIT_INVALID, f"{path}: {exc}") from None


def _load_table(path, domain: Domain) -> ScfTable:
    obj = _read_json(path)
    if not isinstance(obj, dict) or "table" not in obj:
        raise CliError(EXIT_SCHEMA, f"{path}: a table file needs a 'table' list")
    try:
        return table_from_json(obj, domain)
    except (RuleError, DomainError, KeyError, TypeError) as exc:
        raise CliError(EXIT_INVALID, f"{path}: {exc}") from None


def _scf(args, domain: Domain) -> ScfTable:
    obj = _read_json(args.scf)
    if isinstance(obj, dict) and "minimals" in obj:
        return _load_rule(args.scf, domain, bool(args.pair)).table()
    return _load_table(args.scf, domain)


def _emit(args, records: list[dict], lines: list[str]) -> None:
    if args.json:
        print(json.dumps(records, indent=2, sort_keys=False))
    else:
        for line in lines:
            print(line)


def _align(rows: list[tuple]) -> list[str]:
    if not rows:
        return []
    widths = [max(len(str(r[i])) for r in rows) for i in range(len(rows[0]) - 1)]
    return ["  ".join([str(c).ljust(w) for c, w in zip(r, widths)] + [str(r[-1])]).rstrip() for r in rows]


# eval

def _profile_for_counts(text: str, rule: CanonicalRule) -> Profile:
    """Some feasible profile whose count vector equals ``text`` (anon rules only)."""
    char = rule.character
    if char.kind != "anon":
        raise CliError(EXIT_SCHEMA, "count-vector selectors need an anon rule")
    try:
        counts = tuple(int(s) for s in text.strip("()[] ").split(","))
    except ValueError:
        raise CliError(EXIT_SCHEMA, f"bad count vector {text!r}") from None
    if not char.in_image(counts):
        raise CliError(EXIT_INVALID, f"no feasible profile has count vector {counts}")
    domain = rule.domain
    a, b = domain.pair
    facs = domain.factors
    if facs is not None and len(set(facs)) == 1:
        opts = facs[0]
        pick_a = next((W for W in opts if W.prefers(a, b)), None)
        pick_b = next((W for W in opts if W.prefers(b, a)), None)
        prefs = [pick_a] * counts[0]
        for W, k in zip(char.indiff_prefs, counts[1:]):
            prefs += [W] * k
        prefs += [pick_b] * (domain.n_agents - len(prefs))
        return Profile(tuple(prefs))
    for P, x in zip(domain.profiles, char.values):
        if x == counts:
            return P
    raise CliError(EXIT_INVALID, f"no feasible profile has count vector {counts}")


def _select_profiles(args, rule: CanonicalRule) -> list[tuple[str, Profile]]:
    domain = rule.domain
    named: dict[str, Profile] = {}
    if args.profiles:
        obj = _read_json(args.profiles)
        if not isinstance(obj, dict):
            raise CliError(EXIT_SCHEMA, f"{args.profiles}: expected an object of named profiles")
        for name, p in obj.items():
            try:
                named[name] = profile_from_json(p, domain)
            except DomainError as exc:
                raise CliError(EXIT_SCHEMA, f"{args.profiles}: {name}: {exc}") from None
    if not args.select:
        if named:
            return list(named.items())
        return [(f"#{i}", P) for i, P in enumerate(domain.profiles)]
    out = []
    for sel in args.select:
        if sel in named:
            out.append((sel, named[sel]))
        elif sel.startswith("#") and sel[1:].isdigit():
            i = int(sel[1:])
            if i >= len(domain):
                raise CliError(EXIT_SCHEMA, f"profile index {i} out of range 0..{len(domain) - 1}")
            out.append((sel, domain.profiles[i]))
        elif "," in sel or sel.isdigit():
            out.append((sel, _profile_for_counts(sel, rule)))
        else:
            raise CliError(EXIT_SCHEMA, f"unknown profile selector {sel!r}")
    return out


def cmd_eval(args) -> int:
    domain = _domain(args)
    rule = _load_rule(args.rule, domain, bool(args.pair))
    char = rule.character
    labels = rule.domain.alternatives
    records, rows = [], []
    for name, P in _select_profiles(args, rule):
        if P not in rule.domain:
            raise CliError(EXIT_INVALID, f"profile {name} is not feasible in the domain")
        x = char(P)
        choice = labels[rule.eval(P)]
        records.append({"profile": name, "character": char.encode(x), "choice": choice})
        rows.append((name, json.dumps(char.encode(x)), choice))
    _emit(args, records, _align(rows))
    return EXIT_OK


# check

def _check_one(prop: str, phi: ScfTable, kind: str) -> dict:
    d = phi.domain
    rec = {"property": prop, "verdict": "pass"}
    if prop == "wgsp":
        w = oracle.find_strong_manipulation(phi)
        witness = w.describe(d) if w else None
    elif prop == "sgsp":
        w = oracle.find_weak_manipulation(phi)
        witness = w.describe(d) if w else None
    elif prop == "isp":
        v = oracle.find_isp_violation(phi)
        witness = (f"{d.agents[v[1]]} gains alone: honest [{d.format_profile(v[0])}] -> "
                   f"misreport [{d.format_profile(v[2])}]") if v else None
    elif prop == "apr":
        v = oracle.find_apr_violation(phi)
        witness = f"P=[{d.format_profile(v[0])}] Q=[{d.format_profile(v[1])}]" if v else None
    elif prop == "almost-monotone":
        v = oracle.find_monotonicity_violation(phi)
        witness = (f"[{d.format_profile(v[0])}] supports a at least as much as "
                   f"[{d.format_profile(v[1])}] but the choice moves from a to b") if v else None
    elif prop == "anonymous":
        if not d.is_permutation_closed:
            return {"property": prop, "verdict": "not-applicable",
                    "notice": "domain is not closed under permuting agents"}
        v = oracle.find_anonymity_violation(phi)
        witness = None
        if v:
            P, (i, j) = v
            witness = f"swapping {d.agents[i]} and {d.agents[j]} in [{d.format_profile(P)}] changes the choice"
    elif prop == "monotone":
        rec["character"] = kind
        try:
            extract_soc(phi, kind)
            witness = None
        except NotMonotone as exc:
            P, Q = exc.witness
            witness = f"chi([{d.format_profile(P)}]) >= chi([{d.format_profile(Q)}]) but a is chosen only at the latter"
        except DomainError as exc:
            return {"property": prop, "verdict": "not-applicable", "notice": str(exc)}
    else:
        raise CliError(EXIT_SCHEMA, f"unknown property {prop!r}")
    if witness:
        rec["verdict"] = "fail"
        rec["witness"] = witness
    return rec


def cmd_check(args) -> int:
    domain = _domain(args)
    phi = _scf(args, domain)
    props = args.properties or ["wgsp"]
    for p in props:
        if p not in PROPERTIES:
            raise CliError(EXIT_SCHEMA, f"unknown property {p!r}; choose from {', '.join(PROPERTIES)}")
    records = [_check_one(p, phi, args.char) for p in props]
    rows = []
    for r in records:
        detail = r.get("witness") or r.get("notice") or ""
        rows.append((r["property"], r["verdict"], detail))
    _emit(args, records, _align(rows))
    if any(r["verdict"] == "not-applicable" for r in records) and not args.json:
        print("note: properties marked not-applicable were not checked", file=sys.stderr)
    return EXIT_FAIL if any(r["verdict"] == "fail" for r in records) else EXIT_OK


# enumerate

def _enumerate_rules(domain: Domain, cls: str, budget: int) -> list[CanonicalRule]:
    if cls in ("wgsp", "wgsp-anon"):
        char = make_character("general" if cls == "wgsp" else "anon", domain)
        return [CanonicalRule(char, ac) for ac in char.poset.antichains(budget)]
    if cls == "quota":
        return [quota_rule(q, domain) for q in range(domain.n_agents + 2)]
    if cls == "committee":
        char = make_character("strict", domain)
        return [CanonicalRule(char, ac) for ac in char.poset.antichains(budget)]
    if cls == "sgsp":
        if not domain.satisfies_minimal_assumption:
            raise CliError(EXIT_INVALID, "sgsp enumeration needs a cartesian domain where every agent "
                                         "can prefer a, prefer b and be indifferent")
        return sgsp_family(domain)
    raise CliError(EXIT_SCHEMA, f"unknown class {cls!r}")


def _rule_sort_key(rule: CanonicalRule):
    return json.dumps(rule.to_json()["minimals"], sort_keys=True)


def cmd_enumerate(args) -> int:
    domain = _domain(args)
    budget = args.budget or guard_budget()
    try:
        rules = _enumerate_rules(domain, args.rule_class, budget)
    except (RuleError, DomainError) as exc:
        raise CliError(EXIT_INVALID, str(exc)) from None
    rules.sort(key=_rule_sort_key)
    out_dir = Path(args.out) if args.out else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)
    records, lines = [], []
    width = len(str(max(len(rules) - 1, 0)))
    for i, rule in enumerate(rules):
        obj = rule.to_json()
        records.append(obj)
        lines.append(f"{i:>{width}}  {json.dumps(obj['minimals'], sort_keys=True)}")
        if out_dir:
            (out_dir / f"rule_{i:0{width}d}.json").write_text(json.dumps(obj, indent=2) + "\n", encoding="utf-8")
    lines.append(f"count {len(rules)}")
    if args.json:
        print(json.dumps({"class": args.rule_class, "count": len(rules), "rules": records}, indent=2))
    else:
        print("\n".join(lines))
    return EXIT_OK


# poset

def cmd_poset(args) -> int:
    domain = _domain(args)
    try:
        char = make_character(args.char, domain)
        poset = char.poset
    except DomainError as exc:
        raise CliError(EXIT_INVALID, str(exc)) from None
    elements = [char.encode(x) for x in poset.elements]
    edges = [(poset.index(x), poset.index(y)) for x, y in poset.hasse_edges()]
    record = {"char": args.char, "elements": elements, "hasse": edges}
    if args.antichains:
        record["antichains"] = sum(1 for _ in poset.antichain_masks(args.budget or guard_budget()))
    if args.json:
        print(json.dumps(record, indent=2))
        return EXIT_OK
    for i, e in enumerate(elements):
        print(f"{i:>4}  {json.dumps(e)}")
    for i, j in edges:
        print(f"{i} < {j}")
    print(f"elements {len(elements)} covers {len(edges)}"
          + (f" antichains {record['antichains']}" if args.antichains else ""))
    return EXIT_OK


# verify-theorems

def cmd_verify_theorems(args) -> int:
    suite = args.suite or str(fixture_path("default_suite.json"))
    try:
        instances = load_suite(suite)
    except FileNotFoundError:
        raise CliError(EXIT_SCHEMA, f"{suite}: no such file") from None
    except (json.JSONDecodeError, KeyError, TypeError, DomainError) as exc:
        raise CliError(EXIT_SCHEMA, f"{suite}: {exc}") from None
    for inst in instances:
        if inst["theorem"] not in CHECKS:
            raise CliError(EXIT_SCHEMA, f"{suite}: unknown theorem id {inst['theorem']!r}")
        if args.budget:
            inst["budget"] = args.budget
    workers = max(1, args.workers or 1)
    if workers > 1 and len(instances) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reports: list[TheoremReport] = list(pool.map(run_instance, instances))
    else:
        reports = [run_instance(inst) for inst in instances]
    failed = sum(1 for r in reports if not r.ok)
    if args.json:
        records = [r.to_json() for r in reports]
        if not args.timings:
            for rec in records:
                rec.pop("seconds")
        print(json.dumps({"count": len(reports), "failed": failed, "reports": records}, indent=2))
    else:
        for r in reports:
            print(r.line(timing=args.timings))
            for w in r.witnesses:
                print(f"    witness: {w}")
            if r.verdict == "not-applicable":
                for note in r.notes[:1]:
                    print(f"    {note}")
        print(f"count {len(reports)} failed {failed}")
    return EXIT_FAIL if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="charrule", description="Character-based two-valued social choice rules.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, pair=True):
        p.add_argument("--json", action="store_true", help="machine-readable output")
        if pair:
            p.add_argument("--pair", help="alternative labels playing (a, b), e.g. 'a,b'")
        p.add_argument("--budget", type=int, help="enumeration guard (default CHARRULE_GUARD_BUDGET or 10^6)")

    p = sub.add_parser("eval", help="evaluate a canonical rule on selected profiles")
    p.add_argument("domain")
    p.add_argument("rule")
    p.add_argument("--profiles", help="JSON object of named profiles")
    p.add_argument("--select", action="append",
                   help="profile name, '#index', or a count vector like 3,3,1,4 (repeatable)")
    common(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("check", help="check properties of a rule or table")
    p.add_argument("domain")
    p.add_argument("scf", help="rule file (char/minimals) or table file")
    p.add_argument("properties", nargs="*", help=f"any of {', '.join(PROPERTIES)} (default wgsp)")
    p.add_argument("--char", default="general", choices=KINDS, help="character used by 'monotone'")
    common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("enumerate", help="list every rule of a class as its minimal antichain")
    p.add_argument("domain")
    p.add_argument("rule_class", metavar="class", choices=CLASSES)
    p.add_argument("--out", help="also write one rule file per rule into this directory")
    common(p)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("poset", help="dump the image poset of a character")
    p.add_argument("domain")
    p.add_argument("--char", default="general", choices=KINDS)
    p.add_argument("--antichains", action="store_true", help="also count antichains")
    common(p)
    p.set_defaults(func=cmd_poset)

    p = sub.add_parser("verify-theorems", help="run a suite of theorem checks")
    p.add_argument("suite", nargs="?", help="suite file (default: the shipped suite)")
    p.add_argument("--workers", type=int, default=1, help="worker processes; output does not depend on it")
    p.add_argument("--timings", action="store_true", help="include wall-clock seconds (not deterministic)")
    common(p, pair=False)
    p.set_defaults(func=cmd_verify_theorems)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"charrule: {exc}", file=sys.stderr)
        return exc.code
    except GuardExceeded as exc:
        print(f"charrule: {exc}", file=sys.stderr)
        return EXIT_GUARD


if __name__ == "__main__":
    sys.exit(main())
