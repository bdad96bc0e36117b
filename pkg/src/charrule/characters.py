"""Character functions: maps from profiles into posets that carry exactly the
information a class of two-valued rules may depend on.

Five kinds are provided:

``general``  triples ``(S, T, pi)``: a-supporters, a~b agents and their full preferences
``anon``     count vectors ``(|D(a,P)|, |I_1(P)|, ..., |I_tau(P)|)``
``bi``       veto pairs ``(D(a,P), D(a,P) | I(P))``
``strict``   the set ``D(a,P)`` ordered by inclusion (no a~b agents allowed)
``strong``   levels -1/0/1 plus one incomparable element per unanimously indifferent profile
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

from .order import FinitePoset
from .prefs import (
    Domain,
    DomainError,
    Pair,
    PartialProfile,
    Preference,
    Profile,
    d_set,
    i_partition,
    i_set,
    preference_from_json,
    preference_to_json,
    profile_from_json,
    profile_to_json,
)

KINDS = ("general", "anon", "bi", "strict", "strong")


@dataclass(frozen=True)
class CharTriple:
    S: frozenset[int]
    T: frozenset[int]
    pi: PartialProfile

    def __post_init__(self):
        object.__setattr__(self, "S", frozenset(self.S))
        object.__setattr__(self, "T", frozenset(self.T))
        if self.S & self.T:
            raise DomainError("S and T must be disjoint")
        if self.pi.domain != self.T:
            raise DomainError("the partial profile must be defined exactly on T")

    def key(self):
        return (tuple(sorted(self.S)), tuple(sorted(self.T)), self.pi)


@dataclass(frozen=True)
class VetoPair:
    S: frozenset[int]
    W: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "S", frozenset(self.S))
        object.__setattr__(self, "W", frozenset(self.W))
        if not self.S <= self.W:
            raise DomainError("a veto pair needs S ⊆ W")

    def key(self):
        return (tuple(sorted(self.S)), tuple(sorted(self.W)))


@dataclass(frozen=True)
class Level:
    value: int

    def __post_init__(self):
        if self.value not in (-1, 0, 1):
            raise DomainError(f"level must be -1, 0 or 1, not {self.value}")


@dataclass(frozen=True)
class Unanimous:
    profile: Profile


StrongChar = Level | Unanimous


# character maps and their orders

def char_general(P: Profile, pair: Pair) -> CharTriple:
    T = i_set(P, pair)
    return CharTriple(d_set(P, pair[0], pair), T, PartialProfile.restrict(P, T))


def leq_D(t1: CharTriple, t2: CharTriple) -> bool:
    if not t1.S <= t2.S or not (t1.S | t1.T) <= (t2.S | t2.T):
        return False
    return all(t1.pi[v] == t2.pi[v] for v in t1.T & t2.T)


def leq_D_outside_supporters(t1: CharTriple, t2: CharTriple) -> bool:
    """Equivalent formulation: ``S ⊆ S'``, ``T∖S' ⊆ T'`` and ``pi`` agrees on ``T∖S'``."""
    rest = t1.T - t2.S
    if not t1.S <= t2.S or not rest <= t2.T:
        return False
    return all(t1.pi[v] == t2.pi[v] for v in rest)


def char_anon(P: Profile, pair: Pair, indiff_prefs: Sequence[Preference]) -> tuple[int, ...]:
    return (len(d_set(P, pair[0], pair)),) + i_partition(P, pair, indiff_prefs)


def leq_anon(k: Sequence[int], l: Sequence[int]) -> bool:
    if len(k) != len(l):
        raise ValueError(f"count vectors of different length {len(k)} and {len(l)}")
    excess = sum(max(ki - li, 0) for ki, li in zip(k[1:], l[1:]))
    return excess <= l[0] - k[0]


def leq_anon_subsets(k: Sequence[int], l: Sequence[int]) -> bool:
    """``k0 + sum_J k_i <= l0 + sum_J l_i`` for every index subset ``J``. Exponential."""
    if len(k) != len(l):
        raise ValueError(f"count vectors of different length {len(k)} and {len(l)}")
    idx = range(1, len(k))
    for r in range(len(k)):
        for J in itertools.combinations(idx, r):
            if k[0] + sum(k[i] for i in J) > l[0] + sum(l[i] for i in J):
                return False
    return True


def char_bi(P: Profile, pair: Pair) -> VetoPair:
    S = d_set(P, pair[0], pair)
    return VetoPair(S, S | i_set(P, pair))


def leq_veto(p1: VetoPair, p2: VetoPair) -> bool:
    return p1.S <= p2.S and p1.W <= p2.W


def char_strict(P: Profile, pair: Pair) -> frozenset[int]:
    ties = i_set(P, pair)
    if ties:
        raise DomainError(f"agents {sorted(ties)} are indifferent between the pair")
    return d_set(P, pair[0], pair)


def leq_strict(s1: frozenset, s2: frozenset) -> bool:
    return s1 <= s2


def char_strong(P: Profile, pair: Pair) -> StrongChar:
    da = bool(d_set(P, pair[0], pair))
    db = bool(d_set(P, pair[1], pair))
    if da and not db:
        return Level(1)
    if da and db:
        return Level(0)
    if db:
        return Level(-1)
    return Unanimous(P)


def leq_strong(c1: StrongChar, c2: StrongChar) -> bool:
    return c1 == c2 or c1 == Level(-1) or c2 == Level(1)


# character objects bound to a domain

class Character:
    """A character function bound to a domain and its designated pair."""

    kind = ""

    def __init__(self, domain: Domain):
        self.domain = domain
        self.pair = domain.pair

    def __call__(self, P: Profile):
        raise NotImplementedError

    def leq(self, x, y) -> bool:
        raise NotImplementedError

    def key(self, x):
        return x

    def encode(self, x):
        raise NotImplementedError

    def decode(self, obj):
        raise NotImplementedError

    @cached_property
    def values(self) -> tuple:
        """Character value of every profile, aligned with ``domain.profiles``."""
        return tuple(self(P) for P in self.domain.profiles)

    @cached_property
    def image(self) -> frozenset:
        return frozenset(self.values)

    def in_image(self, x) -> bool:
        return x in self.image

    @cached_property
    def poset(self) -> FinitePoset:
        return FinitePoset(self.image, self.leq, key=self.key)

    def format(self, x) -> str:
        try:
            return str(self.encode(x))
        except (IndexError, KeyError, TypeError, AttributeError):
            return repr(x)


class GeneralCharacter(Character):
    kind = "general"

    def __call__(self, P):
        return char_general(P, self.pair)

    def leq(self, x, y):
        return leq_D(x, y)

    def key(self, x):
        return x.key()

    def encode(self, x):
        d = self.domain
        return {
            "S": [d.agents[v] for v in sorted(x.S)],
            "T": [d.agents[v] for v in sorted(x.T)],
            "pi": {d.agents[v]: preference_to_json(W, d.alternatives)
                   for v, W in zip(x.pi.agents, x.pi.prefs)},
        }

    def decode(self, obj):
        d = self.domain
        try:
            S = {d.agents.index(v) for v in obj["S"]}
            T = {d.agents.index(v) for v in obj["T"]}
            pi = {d.agents.index(v): preference_from_json(W, d.alternatives)
                  for v, W in obj.get("pi", {}).items()}
        except (KeyError, ValueError, TypeError, AttributeError) as exc:
            raise DomainError(f"bad general character value {obj!r}: {exc}") from None
        return CharTriple(S, T, PartialProfile.from_mapping(pi))


class AnonCharacter(Character):
    kind = "anon"

    def __init__(self, domain: Domain):
        super().__init__(domain)
        self.indiff_prefs = domain.indiff_prefs

    @property
    def tau(self) -> int:
        return len(self.indiff_prefs)

    def __call__(self, P):
        return char_anon(P, self.pair, self.indiff_prefs)

    def leq(self, x, y):
        return leq_anon(x, y)

    def encode(self, x):
        return list(x)

    def decode(self, obj):
        if not isinstance(obj, list) or not all(isinstance(v, int) for v in obj):
            raise DomainError(f"bad count vector {obj!r}")
        if len(obj) != self.tau + 1:
            raise DomainError(f"count vector {obj} should have length {self.tau + 1}")
        return tuple(obj)

    def _identical_factors(self) -> tuple[Preference, ...] | None:
        facs = self.domain.factors
        if facs is not None and len(set(facs)) == 1:
            return facs[0]
        return None

    def _image_formula(self, x) -> bool:
        opts = self._identical_factors()
        stances = {W.compare(*self.pair) for W in opts}
        n = self.domain.n_agents
        if len(x) != self.tau + 1 or any(v < 0 for v in x) or sum(x) > n:
            return False
        if x[0] > 0 and 1 not in stances:
            return False
        return sum(x) == n or -1 in stances

    @cached_property
    def image(self) -> frozenset:
        if self._identical_factors() is None:
            return super().image
        n = self.domain.n_agents
        cands = itertools.product(range(n + 1), repeat=self.tau + 1)
        return frozenset(x for x in cands if self._image_formula(x))

    def in_image(self, x) -> bool:
        if self._identical_factors() is not None:
            return self._image_formula(tuple(x))
        return super().in_image(x)


class VetoCharacter(Character):
    kind = "bi"

    def __call__(self, P):
        return char_bi(P, self.pair)

    def leq(self, x, y):
        return leq_veto(x, y)

    def key(self, x):
        return x.key()

    def encode(self, x):
        ag = self.domain.agents
        return {"S": [ag[v] for v in sorted(x.S)], "W": [ag[v] for v in sorted(x.W)]}

    def decode(self, obj):
        ag = self.domain.agents
        try:
            return VetoPair({ag.index(v) for v in obj["S"]}, {ag.index(v) for v in obj["W"]})
        except (KeyError, ValueError, TypeError) as exc:
            raise DomainError(f"bad veto pair {obj!r}: {exc}") from None


class StrictCharacter(Character):
    kind = "strict"

    def __call__(self, P):
        return char_strict(P, self.pair)

    def leq(self, x, y):
        return leq_strict(x, y)

    def key(self, x):
        return (len(x), tuple(sorted(x)))

    def encode(self, x):
        return [self.domain.agents[v] for v in sorted(x)]

    def decode(self, obj):
        try:
            return frozenset(self.domain.agents.index(v) for v in obj)
        except (ValueError, TypeError) as exc:
            raise DomainError(f"bad agent set {obj!r}: {exc}") from None


class StrongCharacter(Character):
    kind = "strong"

    def __call__(self, P):
        return char_strong(P, self.pair)

    def leq(self, x, y):
        return leq_strong(x, y)

    def key(self, x):
        if isinstance(x, Level):
            return (0, x.value, ())
        return (1, 0, x.profile.prefs)

    def encode(self, x):
        if isinstance(x, Level):
            return {"level": x.value}
        return {"unanimous": profile_to_json(x.profile, self.domain)}

    def decode(self, obj):
        if isinstance(obj, dict) and "level" in obj:
            return Level(obj["level"])
        if isinstance(obj, dict) and "unanimous" in obj:
            return Unanimous(profile_from_json(obj["unanimous"], self.domain))
        raise DomainError(f"bad strong character value {obj!r}")


_CLASSES = {
    "general": GeneralCharacter,
    "anon": AnonCharacter,
    "bi": VetoCharacter,
    "strict": StrictCharacter,
    "strong": StrongCharacter,
}


def make_character(kind: str, domain: Domain) -> Character:
    try:
        cls = _CLASSES[kind]
    except KeyError:
        raise ValueError(f"unknown character kind {kind!r}; expected one of {KINDS}") from None
    return cls(domain)


def image_poset(domain: Domain, kind: str) -> FinitePoset:
    return make_character(kind, domain).poset
