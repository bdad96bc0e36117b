"""Canonical two-valued rules and explicit social choice tables.

A canonical rule picks the first alternative of the pair exactly when the
character of the profile dominates one of the rule's minimal elements, i.e.
when the character lies in the upward closure of those minimals.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Mapping

from .characters import Character, Level, Unanimous, make_character
from .order import NotAnAntichain
from .prefs import Domain, DomainError, Profile, d_set, profile_from_json, profile_to_json


class RuleError(ValueError):
    """A rule is malformed or does not fit its domain."""


class NotMonotone(Exception):
    """The scf is not monotone with respect to the character.

    ``witness`` is ``(P, Q)`` with ``chi(P) >= chi(Q)``, ``phi(Q) = a`` and ``phi(P) = b``.
    """

    def __init__(self, P: Profile, Q: Profile):
        self.witness = (P, Q)
        super().__init__("character order is not respected by the scf")


@dataclass(frozen=True, eq=False)
class ScfTable:
    """A social choice function given by its value on every feasible profile."""

    domain: Domain
    values: tuple[int, ...]

    def __post_init__(self):
        values = tuple(self.values)
        if len(values) != len(self.domain.profiles):
            raise RuleError(f"table has {len(values)} entries for {len(self.domain.profiles)} profiles")
        if not set(values) <= set(self.domain.pair):
            raise RuleError("table values must lie in the designated pair")
        object.__setattr__(self, "values", values)

    @classmethod
    def from_function(cls, domain: Domain, f: Callable[[Profile], int]) -> ScfTable:
        return cls(domain, tuple(f(P) for P in domain.profiles))

    @classmethod
    def from_bits(cls, domain: Domain, bits: Iterable[bool]) -> ScfTable:
        """``bits[i]`` true means the first alternative of the pair at profile ``i``."""
        a, b = domain.pair
        return cls(domain, tuple(a if x else b for x in bits))

    @classmethod
    def constant(cls, domain: Domain, x: int) -> ScfTable:
        return cls(domain, (x,) * len(domain.profiles))

    def __call__(self, P: Profile) -> int:
        return self.values[self.domain.index(P)]

    def __eq__(self, other):
        if not isinstance(other, ScfTable):
            return NotImplemented
        return self.values == other.values and self.domain.profiles == other.domain.profiles

    def __hash__(self):
        return hash(self.values)

    @property
    def bits(self) -> tuple[bool, ...]:
        a = self.domain.pair[0]
        return tuple(v == a for v in self.values)

    def swapped(self) -> ScfTable:
        a, b = self.domain.pair
        return ScfTable(self.domain, tuple(b if v == a else a for v in self.values))


class CanonicalRule:
    """``phi(P) = a`` iff ``chi(P)`` dominates some element of ``minimals``."""

    def __init__(self, character: Character, minimals: Iterable):
        self.character = character
        self.domain = character.domain
        self.pair = character.pair
        mins = list(dict.fromkeys(minimals))
        for x in mins:
            if not character.in_image(x):
                raise RuleError(f"{character.format(x)} is not a character value of any feasible profile")
        for x, y in itertools.permutations(mins, 2):
            if character.leq(x, y):
                raise NotAnAntichain(x, y)
        self.minimals = tuple(sorted(mins, key=character.key))

    @property
    def kind(self) -> str:
        return self.character.kind

    def __repr__(self):
        return f"CanonicalRule({self.kind}, {[self.character.encode(m) for m in self.minimals]})"

    def __eq__(self, other):
        return (isinstance(other, CanonicalRule) and self.kind == other.kind
                and self.domain is other.domain and self.minimals == other.minimals)

    def __hash__(self):
        return hash((self.kind, self.minimals))

    def selects_a(self, value) -> bool:
        leq = self.character.leq
        return any(leq(m, value) for m in self.minimals)

    def eval(self, P: Profile) -> int:
        if P not in self.domain:
            raise DomainError("profile is not feasible in the rule's domain")
        a, b = self.pair
        return a if self.selects_a(self.character(P)) else b

    __call__ = eval

    def to_soc(self) -> frozenset:
        return to_soc(self)

    def table(self) -> ScfTable:
        """Evaluate on every feasible profile through the image poset."""
        poset = self.character.poset
        closed = poset.closure_mask(poset.mask(self.minimals))
        a, b = self.pair
        idx = poset.index
        return ScfTable(self.domain, tuple(
            a if closed >> idx(x) & 1 else b for x in self.character.values))

    def to_json(self) -> dict:
        return {
            "char": self.kind,
            "pair": [self.domain.alternatives[x] for x in self.pair],
            "minimals": [self.character.encode(m) for m in self.minimals],
        }


def eval_rule(rule: CanonicalRule, P: Profile) -> int:
    return rule.eval(P)


def from_antichain(kind_or_char, minimals: Iterable, domain: Domain | None = None) -> CanonicalRule:
    return CanonicalRule(_character(kind_or_char, domain), minimals)


def from_soc(kind_or_char, C: Iterable, domain: Domain | None = None) -> CanonicalRule:
    """Rule parametrized by a SOC subset ``C`` of the character image."""
    char = _character(kind_or_char, domain)
    C = frozenset(C)
    outside = [x for x in C if not char.in_image(x)]
    if outside:
        raise RuleError(f"{char.format(outside[0])} is not in the character image")
    poset = char.poset
    bad = poset.soc_violation(C)
    if bad is not None:
        f, x = bad
        raise RuleError(f"set is not upward closed: {char.format(x)} >= {char.format(f)} is missing")
    return CanonicalRule(char, poset.minimals(C))


def to_soc(rule: CanonicalRule) -> frozenset:
    return rule.character.poset.upward_closure(rule.minimals)


def _character(kind_or_char, domain) -> Character:
    if isinstance(kind_or_char, Character):
        return kind_or_char
    if domain is None:
        raise TypeError("a domain is required when passing a character kind")
    return make_character(kind_or_char, domain)


def committee_rule(committee: Iterable[Iterable[int]], domain: Domain) -> CanonicalRule:
    """Voting by committee: ``a`` iff the a-supporters form a winning coalition."""
    fam = {frozenset(S) for S in committee}
    n = domain.n_agents
    agents = range(n)
    for S in fam:
        if not S <= set(agents):
            raise RuleError(f"coalition {sorted(S)} mentions unknown agents")
        for v in agents:
            if S | {v} not in fam:
                raise RuleError(f"family is not closed under supersets: {sorted(S | {v})} missing")
    char = make_character("strict", domain)
    minimal = [S for S in fam if not any(T < S for T in fam)]
    return CanonicalRule(char, [S for S in minimal if char.in_image(S)])


def quota_rule(q: int, domain: Domain) -> CanonicalRule:
    """``a`` iff at least ``q`` agents strictly prefer ``a``; ``q = n+1`` is constant ``b``."""
    n = domain.n_agents
    if not 0 <= q <= n + 1:
        raise RuleError(f"quota {q} outside 0..{n + 1}")
    if domain.indiff_prefs_in_use:
        raise RuleError("quota rules need a domain without a~b preferences")
    char = make_character("anon", domain)
    if q == n + 1:
        return CanonicalRule(char, [])
    # the smallest attainable count at or above q
    reach = sorted(x for x in char.image if x[0] >= q)
    return CanonicalRule(char, reach[:1])


def _unanimous_values(U: Iterable[Profile], domain: Domain) -> list[Unanimous]:
    a, b = domain.pair
    out = []
    for P in U:
        if P not in domain:
            raise RuleError("a listed profile is not feasible")
        if d_set(P, a, domain.pair) or d_set(P, b, domain.pair):
            raise RuleError("veto rules only accept unanimously indifferent profiles")
        out.append(Unanimous(P))
    return out


def veto_for_b(U: Iterable[Profile], domain: Domain) -> CanonicalRule:
    """``a`` iff someone strictly prefers ``a`` or the profile is in ``U``.

    For two agents these rules need not be strongly group strategy-proof.
    """
    char = make_character("strong", domain)
    C = {x for x in (Level(0), Level(1)) if char.in_image(x)} | set(_unanimous_values(U, domain))
    return from_soc(char, C)


def veto_for_a(U: Iterable[Profile], domain: Domain) -> CanonicalRule:
    """``a`` iff (someone prefers ``a`` and nobody prefers ``b``) or the profile is in ``U``."""
    char = make_character("strong", domain)
    C = {x for x in (Level(1),) if char.in_image(x)} | set(_unanimous_values(U, domain))
    return from_soc(char, C)


def extract_soc(phi: ScfTable, kind_or_char) -> frozenset:
    """The set ``{chi(P) : phi(P) = a}``, checked to be upward closed.

    Raises :class:`NotMonotone` with a witness otherwise. When it exists the
    set is the only SOC set whose canonical rule equals ``phi``.
    """
    char = _character(kind_or_char, phi.domain)
    if char.domain.profiles != phi.domain.profiles or char.pair != phi.domain.pair:
        raise RuleError("character and table are bound to different domains")
    a = char.pair[0]
    poset = char.poset
    values = char.values
    first_a: dict = {}
    for P, x, v in zip(phi.domain.profiles, values, phi.values):
        if v == a and x not in first_a:
            first_a[x] = P
    C = frozenset(first_a)
    closed = poset.closure_mask(poset.mask(C))
    for P, x, v in zip(phi.domain.profiles, values, phi.values):
        if v != a and closed >> poset.index(x) & 1:
            below = poset.down[poset.index(x)] & poset.mask(C)
            f = poset.members(below)[0]
            raise NotMonotone(P, first_a[f])
    return C


def is_character_monotone(phi: ScfTable, kind_or_char) -> bool:
    try:
        extract_soc(phi, kind_or_char)
    except NotMonotone:
        return False
    return True


# rule and table files

def rule_from_json(obj: Mapping, domain: Domain) -> CanonicalRule:
    try:
        kind = obj["char"]
        minimals = obj["minimals"]
    except (KeyError, TypeError) as exc:
        raise RuleError(f"rule file is missing {exc}") from None
    if "pair" in obj:
        domain = domain.with_pair(tuple(obj["pair"]))
    char = make_character(kind, domain)
    return CanonicalRule(char, [char.decode(m) for m in minimals])


def load_rule(path: str | Path, domain: Domain) -> CanonicalRule:
    with open(path, encoding="utf-8") as fh:
        return rule_from_json(json.load(fh), domain)


def dump_rule(rule: CanonicalRule, path: str | Path) -> None:
    Path(path).write_text(json.dumps(rule.to_json(), indent=2) + "\n", encoding="utf-8")


def table_to_json(phi: ScfTable) -> dict:
    d = phi.domain
    return {
        "pair": [d.alternatives[x] for x in d.pair],
        "table": [{"profile": profile_to_json(P, d), "value": d.alternatives[v]}
                  for P, v in zip(d.profiles, phi.values)],
    }


def table_from_json(obj: Mapping, domain: Domain) -> ScfTable:
    if "pair" in obj:
        domain = domain.with_pair(tuple(obj["pair"]))
    try:
        rows = obj["table"]
    except (KeyError, TypeError):
        raise RuleError("table file needs a 'table' list") from None
    lookup = {}
    for row in rows:
        P = profile_from_json(row["profile"], domain)
        if P not in domain:
            raise RuleError(f"table lists an infeasible profile: {domain.format_profile(P)}")
        try:
            lookup[P] = domain.alternatives.index(row["value"])
        except ValueError:
            raise RuleError(f"unknown alternative {row['value']!r}") from None
    missing = [P for P in domain.profiles if P not in lookup]
    if missing:
        raise RuleError(f"table is not total: {domain.format_profile(missing[0])} has no value")
    return ScfTable(domain, tuple(lookup[P] for P in domain.profiles))
