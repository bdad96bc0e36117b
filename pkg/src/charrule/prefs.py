"""Preferences, profiles, partial profiles and feasible-profile domains.

Agents and alternatives are dense integer ids. Human-readable labels only
live on :class:`Domain` and in the JSON file format.

A preference is a weak order stored as an ordered partition of the
alternatives into indifference classes, best class first. Classes are kept
sorted so that two preferences are equal exactly when they induce the same
relation.
"""

from __future__ import annotations

import enum
import itertools
import json
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence

Pair = tuple[int, int]

DEFAULT_MAX_PROFILES = 1_000_000


class DomainError(ValueError):
    """Raised for malformed or inconsistent domain data."""


class Comparison(enum.IntEnum):
    X_PREFERRED = 1
    INDIFFERENT = 0
    Y_PREFERRED = -1


@dataclass(frozen=True, order=True)
class Preference:
    classes: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        classes = tuple(tuple(sorted(c)) for c in self.classes)
        if any(not c for c in classes):
            raise DomainError("indifference classes must be non-empty")
        flat = [x for c in classes for x in c]
        if sorted(flat) != list(range(len(flat))):
            raise DomainError(f"classes {classes} do not partition 0..{len(flat) - 1}")
        object.__setattr__(self, "classes", classes)

    @classmethod
    def from_ranking(cls, *classes: Iterable[int]) -> Preference:
        return cls(tuple(tuple(c) for c in classes))

    @classmethod
    def parse(cls, text: str, labels: Sequence[str]) -> Preference:
        """Parse ``"c > a ~ b"`` style notation against alternative labels."""
        lookup = {name: i for i, name in enumerate(labels)}
        try:
            classes = [
                tuple(lookup[tok.strip()] for tok in chunk.split("~"))
                for chunk in text.split(">")
            ]
        except KeyError as exc:
            raise DomainError(f"unknown alternative {exc.args[0]!r} in {text!r}") from None
        return cls(tuple(classes))

    @property
    def n_alternatives(self) -> int:
        return sum(len(c) for c in self.classes)

    @cached_property
    def rank(self) -> tuple[int, ...]:
        out = [0] * self.n_alternatives
        for i, c in enumerate(self.classes):
            for x in c:
                out[x] = i
        return tuple(out)

    @property
    def is_strict(self) -> bool:
        return all(len(c) == 1 for c in self.classes)

    def compare(self, x: int, y: int) -> Comparison:
        rank = self.rank
        if not (0 <= x < len(rank) and 0 <= y < len(rank)):
            raise DomainError(f"unknown alternative id in ({x}, {y})")
        if rank[x] < rank[y]:
            return Comparison.X_PREFERRED
        if rank[x] > rank[y]:
            return Comparison.Y_PREFERRED
        return Comparison.INDIFFERENT

    def prefers(self, x: int, y: int) -> bool:
        return self.compare(x, y) is Comparison.X_PREFERRED

    def weakly_prefers(self, x: int, y: int) -> bool:
        return self.compare(x, y) is not Comparison.Y_PREFERRED

    def format(self, labels: Sequence[str] | None = None) -> str:
        name = (lambda x: labels[x]) if labels else str
        return " > ".join("~".join(name(x) for x in c) for c in self.classes)


def compare(W: Preference, x: int, y: int) -> Comparison:
    return W.compare(x, y)


def all_weak_orders(m: int) -> list[Preference]:
    """Every complete transitive relation on ``m`` alternatives, canonically sorted."""
    out = set()
    for ranks in itertools.product(range(m), repeat=m):
        used = sorted(set(ranks))
        if used != list(range(len(used))):
            continue
        classes = [tuple(x for x in range(m) if ranks[x] == r) for r in used]
        out.add(Preference(tuple(classes)))
    return sorted(out)


def all_strict_orders(m: int) -> list[Preference]:
    return sorted(Preference(tuple((x,) for x in perm)) for perm in itertools.permutations(range(m)))


@dataclass(frozen=True, order=True)
class Profile:
    """A total assignment of preferences to agents ``0..n-1``."""

    prefs: tuple[Preference, ...]

    def __post_init__(self):
        prefs = tuple(self.prefs)
        if prefs and len({p.n_alternatives for p in prefs}) != 1:
            raise DomainError("all preferences in a profile must rank the same alternatives")
        object.__setattr__(self, "prefs", prefs)

    def __getitem__(self, v: int) -> Preference:
        return self.prefs[v]

    def __len__(self) -> int:
        return len(self.prefs)

    def __iter__(self) -> Iterator[Preference]:
        return iter(self.prefs)

    @property
    def n_agents(self) -> int:
        return len(self.prefs)

    def replace(self, v: int, W: Preference) -> Profile:
        prefs = list(self.prefs)
        prefs[v] = W
        return Profile(tuple(prefs))

    def permute(self, sigma: Sequence[int]) -> Profile:
        """The profile ``P∘σ``: agent ``v`` gets the preference of ``sigma[v]``."""
        return Profile(tuple(self.prefs[sigma[v]] for v in range(len(self.prefs))))


@dataclass(frozen=True, order=True)
class PartialProfile:
    """Preferences for a subset of agents; ``agents`` is sorted and aligned with ``prefs``."""

    agents: tuple[int, ...] = ()
    prefs: tuple[Preference, ...] = ()

    def __post_init__(self):
        if len(self.agents) != len(self.prefs):
            raise DomainError("partial profile agents and preferences differ in length")
        if len(set(self.agents)) != len(self.agents):
            raise DomainError("partial profile lists an agent twice")
        items = sorted(zip(self.agents, self.prefs))
        object.__setattr__(self, "agents", tuple(v for v, _ in items))
        object.__setattr__(self, "prefs", tuple(W for _, W in items))

    @classmethod
    def from_mapping(cls, prefs: Mapping[int, Preference]) -> PartialProfile:
        return cls(tuple(prefs), tuple(prefs.values()))

    @classmethod
    def restrict(cls, P: Profile, agents: Iterable[int]) -> PartialProfile:
        agents = sorted(agents)
        return cls(tuple(agents), tuple(P[v] for v in agents))

    @property
    def domain(self) -> frozenset[int]:
        return frozenset(self.agents)

    def as_dict(self) -> dict[int, Preference]:
        return dict(zip(self.agents, self.prefs))

    def __getitem__(self, v: int) -> Preference:
        try:
            return self.prefs[self.agents.index(v)]
        except ValueError:
            raise KeyError(v) from None

    def __len__(self) -> int:
        return len(self.agents)


def _check_pair_member(x: int, pair: Pair) -> int:
    if x not in pair:
        raise DomainError(f"alternative {x} is not in the designated pair {pair}")
    return pair[1] if x == pair[0] else pair[0]


def d_set(P: Profile, x: int, pair: Pair) -> frozenset[int]:
    """Agents who strictly prefer ``x`` to the other member of ``pair``."""
    y = _check_pair_member(x, pair)
    return frozenset(v for v, W in enumerate(P) if W.prefers(x, y))


def i_set(P: Profile, pair: Pair) -> frozenset[int]:
    a, b = pair
    return frozenset(v for v, W in enumerate(P) if W.compare(a, b) is Comparison.INDIFFERENT)


def tilde_d_set(P: Profile, x: int, pair: Pair) -> frozenset[int]:
    return d_set(P, x, pair) | i_set(P, pair)


def i_partition(P: Profile, pair: Pair, indiff_prefs: Sequence[Preference]) -> tuple[int, ...]:
    """Counts of agents holding each listed a~b preference, in list order."""
    a, b = pair
    for W in indiff_prefs:
        if W.compare(a, b) is not Comparison.INDIFFERENT:
            raise DomainError(f"{W.format()} is not indifferent between the pair")
    position = {W: i for i, W in enumerate(indiff_prefs)}
    counts = [0] * len(indiff_prefs)
    for W in P:
        i = position.get(W)
        if i is not None:
            counts[i] += 1
    return tuple(counts)


def splice(P: Profile, Q: Profile, T: Iterable[int]) -> Profile:
    """``[P_T, Q_{T^c}]``."""
    if len(P) != len(Q):
        raise DomainError("profiles have different agent sets")
    T = set(T)
    if not T <= set(range(len(P))):
        raise DomainError(f"{sorted(T - set(range(len(P))))} are not agents")
    return Profile(tuple(P[v] if v in T else Q[v] for v in range(len(P))))


def supports_at_least(P: Profile, Q: Profile, x: int, pair: Pair) -> bool:
    """Whether ``P`` supports ``x`` at least as much as ``Q`` does.

    ``D(x,Q) ⊆ D(x,P)`` and every agent indifferent under ``Q`` who does not
    move to ``x`` keeps exactly the same preference over all alternatives.
    """
    if len(P) != len(Q):
        raise DomainError("profiles have different agent sets")
    if len(P) and P[0].n_alternatives != Q[0].n_alternatives:
        raise DomainError("profiles rank different alternative sets")
    dp = d_set(P, x, pair)
    if not d_set(Q, x, pair) <= dp:
        return False
    return all(P[v] == Q[v] for v in i_set(Q, pair) - dp)


def stance(W: Preference, pair: Pair) -> int:
    """+1 if ``a`` is strictly preferred, -1 if ``b`` is, 0 when indifferent."""
    return int(W.compare(*pair))


class Domain:
    """A finite set of feasible profiles over shared agents and alternatives.

    Either pass ``profiles`` explicitly, or ``factors`` (one tuple of admissible
    preferences per agent) for a cartesian domain that is only expanded into
    profiles when something actually needs them.
    """

    def __init__(
        self,
        profiles: Iterable[Profile] | None = None,
        *,
        alternatives: Sequence[str],
        agents: Sequence[str],
        pair: Pair | Sequence[str] = (0, 1),
        factors: Sequence[Iterable[Preference]] | None = None,
        max_profiles: int = DEFAULT_MAX_PROFILES,
    ):
        self.alternatives = tuple(alternatives)
        self.agents = tuple(agents)
        if len(set(self.alternatives)) != len(self.alternatives):
            raise DomainError("duplicate alternative label")
        if len(set(self.agents)) != len(self.agents):
            raise DomainError("duplicate agent label")
        if len(self.alternatives) < 2:
            raise DomainError("need at least two alternatives")
        self.pair = self._resolve_pair(pair)
        self.max_profiles = max_profiles
        if (profiles is None) == (factors is None):
            raise DomainError("give exactly one of profiles or factors")
        self._factors: tuple[tuple[Preference, ...], ...] | None = None
        self._profiles: tuple[Profile, ...] | None = None
        if factors is not None:
            facs = tuple(tuple(sorted(set(f))) for f in factors)
            if len(facs) != self.n_agents:
                raise DomainError("need one factor per agent")
            if any(not f for f in facs):
                raise DomainError("every agent needs at least one admissible preference")
            for f in facs:
                for W in f:
                    self._check_pref(W)
            self._factors = facs
        else:
            profs = sorted(set(profiles))
            if not profs:
                raise DomainError("a domain needs at least one profile")
            for P in profs:
                if len(P) != self.n_agents:
                    raise DomainError(f"profile has {len(P)} agents, expected {self.n_agents}")
                for W in P:
                    self._check_pref(W)
            self._profiles = tuple(profs)

    def _resolve_pair(self, pair) -> Pair:
        a, b = pair
        if isinstance(a, str):
            try:
                a, b = self.alternatives.index(a), self.alternatives.index(b)
            except ValueError:
                raise DomainError(f"pair {pair} names an unknown alternative") from None
        if a == b:
            raise DomainError("the designated pair needs two distinct alternatives")
        m = len(self.alternatives)
        if not (0 <= a < m and 0 <= b < m):
            raise DomainError(f"pair {pair} out of range")
        return (a, b)

    def _check_pref(self, W: Preference) -> None:
        if W.n_alternatives != len(self.alternatives):
            raise DomainError(f"preference {W.format()} ranks the wrong number of alternatives")

    # construction helpers

    @classmethod
    def cartesian(cls, factors, *, alternatives, agents=None, pair=(0, 1), **kw) -> Domain:
        agents = agents or [f"v{i + 1}" for i in range(len(factors))]
        return cls(alternatives=alternatives, agents=agents, pair=pair, factors=factors, **kw)

    @classmethod
    def universal(cls, n_agents: int, alternatives, *, pair=(0, 1), strict=False, agents=None, **kw) -> Domain:
        m = len(alternatives)
        options = all_strict_orders(m) if strict else all_weak_orders(m)
        return cls.cartesian([options] * n_agents, alternatives=alternatives, agents=agents, pair=pair, **kw)

    def with_pair(self, pair) -> Domain:
        new = object.__new__(Domain)
        new.__dict__.update({k: v for k, v in self.__dict__.items()
                             if k in ("alternatives", "agents", "max_profiles", "_factors", "_profiles")})
        new.pair = new._resolve_pair(pair)
        return new

    # basic access

    @property
    def n_agents(self) -> int:
        return len(self.agents)

    @property
    def n_alternatives(self) -> int:
        return len(self.alternatives)

    @property
    def factors(self) -> tuple[tuple[Preference, ...], ...] | None:
        return self._factors

    def size(self) -> int:
        if self._profiles is not None:
            return len(self._profiles)
        return math.prod(len(f) for f in self._factors)

    __len__ = size

    @property
    def profiles(self) -> tuple[Profile, ...]:
        if self._profiles is None:
            if self.size() > self.max_profiles:
                raise DomainError(
                    f"domain has {self.size()} profiles, above the expansion budget {self.max_profiles}")
            self._profiles = tuple(Profile(p) for p in itertools.product(*self._factors))
        return self._profiles

    def __iter__(self) -> Iterator[Profile]:
        return iter(self.profiles)

    def __contains__(self, P: Profile) -> bool:
        if not isinstance(P, Profile) or len(P) != self.n_agents:
            return False
        if self._factors is not None:
            return all(W in f for W, f in zip(P, self._factors))
        return P in self._index

    @cached_property
    def _index(self) -> dict[Profile, int]:
        return {P: i for i, P in enumerate(self.profiles)}

    def index(self, P: Profile) -> int:
        try:
            return self._index[P]
        except KeyError:
            raise DomainError("profile is not feasible in this domain") from None

    # derived data

    @cached_property
    def agent_options(self) -> tuple[tuple[Preference, ...], ...]:
        """Per-agent admissible preferences (projections of the profile set)."""
        if self._factors is not None:
            return self._factors
        return tuple(tuple(sorted({P[v] for P in self.profiles})) for v in range(self.n_agents))

    @cached_property
    def preference_universe(self) -> tuple[Preference, ...]:
        return tuple(sorted({W for opts in self.agent_options for W in opts}))

    @property
    def indiff_prefs(self) -> tuple[Preference, ...]:
        """The a~b preferences of the universe in canonical order; fixes τ and indices."""
        a, b = self.pair
        return tuple(W for W in self.preference_universe
                     if W.compare(a, b) is Comparison.INDIFFERENT)

    @cached_property
    def pref_ids(self) -> tuple[tuple[int, ...], ...]:
        pos = {W: i for i, W in enumerate(self.preference_universe)}
        return tuple(tuple(pos[W] for W in P) for P in self.profiles)

    def stances(self) -> tuple[tuple[int, ...], ...]:
        key = ("_stances", self.pair)
        cache = self.__dict__.setdefault("_stance_cache", {})
        if key not in cache:
            cache[key] = tuple(tuple(stance(W, self.pair) for W in P) for P in self.profiles)
        return cache[key]

    # structure flags

    @cached_property
    def is_cartesian(self) -> bool:
        if self._factors is not None:
            return True
        return len(self.profiles) == math.prod(len(o) for o in self.agent_options)

    @cached_property
    def is_quasi_cartesian(self) -> bool:
        return quasi_cartesian_violation(self) is None

    @cached_property
    def is_universal(self) -> bool:
        full = set(all_weak_orders(self.n_alternatives))
        return self.is_cartesian and all(set(o) == full for o in self.agent_options)

    @cached_property
    def is_strict_universal(self) -> bool:
        full = set(all_strict_orders(self.n_alternatives))
        return self.is_cartesian and all(set(o) == full for o in self.agent_options)

    @property
    def is_strict_on_pair(self) -> bool:
        return not self.indiff_prefs_in_use

    @property
    def indiff_prefs_in_use(self) -> bool:
        a, b = self.pair
        return any(W.compare(a, b) is Comparison.INDIFFERENT for W in self.preference_universe)

    @cached_property
    def is_permutation_closed(self) -> bool:
        return permutation_closure_violation(self) is None

    @cached_property
    def satisfies_minimal_assumption(self) -> bool:
        """Cartesian, and every agent can report a~b, a≻b and b≻a."""
        if not self.is_cartesian:
            return False
        return all({stance(W, self.pair) for W in opts} == {-1, 0, 1}
                   for opts in self.agent_options)

    @property
    def flags(self) -> dict[str, bool]:
        return {
            "is_cartesian": self.is_cartesian,
            "is_quasi_cartesian": self.is_quasi_cartesian,
            "is_strict_universal": self.is_strict_universal,
            "is_universal": self.is_universal,
        }

    def unanimous_indifference(self) -> tuple[Profile, ...]:
        """Feasible profiles in which every agent is indifferent between the pair."""
        a, b = self.pair
        return tuple(P for P in self.profiles
                     if all(W.compare(a, b) is Comparison.INDIFFERENT for W in P))

    def format_profile(self, P: Profile) -> str:
        return "; ".join(f"{self.agents[v]}: {W.format(self.alternatives)}" for v, W in enumerate(P))


def is_cartesian(domain: Domain) -> bool:
    return domain.is_cartesian


def is_quasi_cartesian(domain: Domain, paranoid: bool = False) -> bool:
    if paranoid:
        return quasi_cartesian_violation(domain, paranoid=True) is None
    return domain.is_quasi_cartesian


def quasi_cartesian_violation(domain: Domain, paranoid: bool = False):
    """First ``(P, Q, T)`` whose splice ``[P_T, Q_{T^c}]`` is infeasible, else None.

    Single-agent splices suffice for finite agent sets: any ``T`` is reached
    by swapping in one agent at a time, each intermediate profile feasible.
    ``paranoid`` tries every ``T`` and is meant for ``n <= 4``.
    """
    if domain.factors is not None:
        return None
    n = domain.n_agents
    if paranoid:
        subsets = [set(T) for r in range(n + 1) for T in itertools.combinations(range(n), r)]
    else:
        subsets = [{v} for v in range(n)]
    for P in domain.profiles:
        for Q in domain.profiles:
            for T in subsets:
                R = splice(P, Q, T)
                if R not in domain:
                    return (P, Q, frozenset(T))
    return None


def permutation_closure_violation(domain: Domain):
    """First ``(P, (v, v+1))`` whose adjacent transposition leaves the domain."""
    n = domain.n_agents
    if domain.factors is not None:
        if len(set(domain.factors)) <= 1:
            return None
    for P in domain.profiles:
        for v in range(n - 1):
            sigma = list(range(n))
            sigma[v], sigma[v + 1] = v + 1, v
            if P.permute(sigma) not in domain:
                return (P, (v, v + 1))
    return None


# JSON file format

def preference_to_json(W: Preference, labels: Sequence[str]) -> list[list[str]]:
    return [[labels[x] for x in c] for c in W.classes]


def preference_from_json(obj, labels: Sequence[str]) -> Preference:
    lookup = {name: i for i, name in enumerate(labels)}
    try:
        return Preference(tuple(tuple(lookup[x] for x in c) for c in obj))
    except (KeyError, TypeError) as exc:
        raise DomainError(f"bad preference {obj!r}: {exc}") from None


def profile_to_json(P: Profile, domain: Domain) -> dict[str, list[list[str]]]:
    return {domain.agents[v]: preference_to_json(W, domain.alternatives) for v, W in enumerate(P)}


def profile_from_json(obj: Mapping, domain_or_labels) -> Profile:
    if isinstance(domain_or_labels, Domain):
        agents, alternatives = domain_or_labels.agents, domain_or_labels.alternatives
    else:
        agents, alternatives = domain_or_labels
    if not isinstance(obj, Mapping) or set(obj) != set(agents):
        raise DomainError(f"profile must give exactly the agents {list(agents)}")
    return Profile(tuple(preference_from_json(obj[v], alternatives) for v in agents))


def domain_from_json(obj: Mapping) -> Domain:
    """Build a domain from its JSON object.

    Besides an explicit ``"profiles"`` list, ``"universal": true``,
    ``"strict_universal": true``, ``"factors": {agent: [pref, ...]}`` or a shared
    ``"factor": [pref, ...]`` describe cartesian domains intensionally.
    """
    try:
        alternatives = list(obj["alternatives"])
        agents = list(obj["agents"])
        pair = tuple(obj.get("pair", alternatives[:2]))
    except (KeyError, TypeError) as exc:
        raise DomainError(f"domain file is missing {exc}") from None
    if len(pair) != 2:
        raise DomainError("pair must name two alternatives")
    kw = dict(alternatives=alternatives, agents=agents, pair=pair)
    if "profiles" in obj:
        return Domain((profile_from_json(p, (agents, alternatives)) for p in obj["profiles"]), **kw)
    if obj.get("universal"):
        return Domain.universal(len(agents), alternatives, agents=agents, pair=pair)
    if obj.get("strict_universal"):
        return Domain.universal(len(agents), alternatives, strict=True, agents=agents, pair=pair)
    if "factors" in obj:
        facs = obj["factors"]
        if set(facs) != set(agents):
            raise DomainError("factors must list every agent")
        factors = [[preference_from_json(W, alternatives) for W in facs[v]] for v in agents]
        return Domain(factors=factors, **kw)
    if "factor" in obj:
        shared = [preference_from_json(W, alternatives) for W in obj["factor"]]
        return Domain(factors=[shared] * len(agents), **kw)
    raise DomainError("domain needs profiles, factors, factor, universal or strict_universal")


def domain_to_json(domain: Domain, *, expand: bool = True) -> dict:
    out = {
        "alternatives": list(domain.alternatives),
        "pair": [domain.alternatives[x] for x in domain.pair],
        "agents": list(domain.agents),
    }
    if domain.factors is not None and not expand and len(set(domain.factors)) == 1:
        if domain.is_universal:
            out["universal"] = True
        elif domain.is_strict_universal:
            out["strict_universal"] = True
        else:
            out["factor"] = [preference_to_json(W, domain.alternatives) for W in domain.factors[0]]
    elif domain.factors is not None and not expand:
        out["factors"] = {
            domain.agents[v]: [preference_to_json(W, domain.alternatives) for W in f]
            for v, f in enumerate(domain.factors)
        }
    else:
        out["profiles"] = [profile_to_json(P, domain) for P in domain.profiles]
    return out


def load_domain(path: str | Path) -> Domain:
    with open(path, encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DomainError(f"invalid JSON: {exc}") from None
    return domain_from_json(obj)


def dump_domain(domain: Domain, path: str | Path, *, expand: bool = True) -> None:
    Path(path).write_text(json.dumps(domain_to_json(domain, expand=expand), indent=2) + "\n", encoding="utf-8")
