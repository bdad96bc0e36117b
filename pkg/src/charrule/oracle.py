"""Brute-force ground truth for manipulation properties of two-valued scfs.

Two independent routes are kept on purpose:

* the ``find_*`` checkers walk ordered profile pairs directly from the
  definitions and return the lexicographically first witness;
* :func:`manipulation_constraints` compiles the same definitions into
  forbidden value pairs once per domain, which the enumerators use to list
  every non-manipulable table (backtracking) or to filter batches of tables.

Coalitions never need to be enumerated. If a coalition ``D`` manipulates
``P`` through ``Q`` then ``D`` contains the disagreement set
``{v : P_v != Q_v}``; for strong manipulation the disagreement set itself
already manipulates. For weak manipulation agents outside the disagreement
set may join without changing their report, so it is enough that every
disagreeing agent weakly gains and *some* agent strictly gains.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from .order import GuardExceeded, guard_budget
from .prefs import Domain, DomainError, Profile, permutation_closure_violation, supports_at_least
from .rules import ScfTable

MAX_PAIRWISE_PROFILES = 4096
MAX_TABLE_PROFILES = 20


@dataclass(frozen=True)
class ManipulationWitness:
    coalition: frozenset[int]
    honest: Profile
    misreport: Profile
    kind: str  # "strong" | "weak"

    def describe(self, domain: Domain) -> str:
        who = ", ".join(domain.agents[v] for v in sorted(self.coalition))
        return (f"{self.kind} manipulation by {{{who}}}: honest [{domain.format_profile(self.honest)}]"
                f" -> misreport [{domain.format_profile(self.misreport)}]")


def _pairwise_guard(domain: Domain, limit: int | None = None) -> None:
    limit = MAX_PAIRWISE_PROFILES if limit is None else limit
    if len(domain) > limit:
        raise GuardExceeded("pairwise profile search", limit, len(domain))


def _views(phi: ScfTable):
    d = phi.domain
    return d.profiles, d.pref_ids, d.stances(), phi.values, d.pair


def find_strong_manipulation(phi: ScfTable, *, limit: int | None = None) -> ManipulationWitness | None:
    """First ``(P, Q)`` where the disagreeing agents all strictly gain by reporting ``Q``."""
    _pairwise_guard(phi.domain, limit)
    profiles, pids, stances, values, (a, b) = _views(phi)
    for i, P in enumerate(profiles):
        x = values[i]
        for j, Q in enumerate(profiles):
            y = values[j]
            if y == x:
                continue
            want = 1 if y == a else -1
            diff = [v for v, (p, q) in enumerate(zip(pids[i], pids[j])) if p != q]
            if all(stances[i][v] == want for v in diff):
                return ManipulationWitness(frozenset(diff), P, Q, "strong")
    return None


def is_wgsp(phi: ScfTable, **kw) -> bool:
    return find_strong_manipulation(phi, **kw) is None


def find_weak_manipulation(phi: ScfTable, *, limit: int | None = None) -> ManipulationWitness | None:
    """First ``(P, Q)`` where everyone involved weakly gains and someone strictly gains."""
    _pairwise_guard(phi.domain, limit)
    profiles, pids, stances, values, (a, b) = _views(phi)
    for i, P in enumerate(profiles):
        x = values[i]
        st = stances[i]
        for j, Q in enumerate(profiles):
            y = values[j]
            if y == x:
                continue
            want = 1 if y == a else -1
            diff = [v for v, (p, q) in enumerate(zip(pids[i], pids[j])) if p != q]
            if any(st[v] == -want for v in diff):
                continue
            gainers = [v for v in range(len(st)) if st[v] == want]
            if not gainers:
                continue
            coalition = set(diff)
            if not any(st[v] == want for v in diff):
                coalition.add(gainers[0])
            return ManipulationWitness(frozenset(coalition), P, Q, "weak")
    return None


def is_sgsp(phi: ScfTable, **kw) -> bool:
    return find_weak_manipulation(phi, **kw) is None


def find_apr_violation(phi: ScfTable, *, limit: int | None = None) -> tuple[Profile, Profile] | None:
    """First ``(P, Q)`` with different outcomes where no agent who changed
    preference weakly prefers the outcome at ``P``."""
    _pairwise_guard(phi.domain, limit)
    profiles = phi.domain.profiles
    values = phi.values
    for i, P in enumerate(profiles):
        for j, Q in enumerate(profiles):
            if values[i] == values[j]:
                continue
            if not any(P[v] != Q[v] and P[v].weakly_prefers(values[i], values[j])
                       for v in range(len(P))):
                return (P, Q)
    return None


def is_apr(phi: ScfTable, **kw) -> bool:
    return find_apr_violation(phi, **kw) is None


def find_isp_violation(phi: ScfTable, *, limit: int | None = None):
    """First ``(P, v, Q)``: agent ``v`` strictly gains by switching alone from ``P`` to ``Q``."""
    _pairwise_guard(phi.domain, limit)
    d = phi.domain
    pids = d.pref_ids
    values = phi.values
    best = None
    for v in range(d.n_agents):
        groups: dict[tuple, list[int]] = {}
        for i, row in enumerate(pids):
            groups.setdefault(row[:v] + row[v + 1:], []).append(i)
        for members in groups.values():
            for i in members:
                W = d.profiles[i][v]
                for j in members:
                    if j != i and W.prefers(values[j], values[i]):
                        if best is None or (i, j) < best[0]:
                            best = ((i, j), v)
                        break
    if best is None:
        return None
    (i, j), v = best
    return (d.profiles[i], v, d.profiles[j])


def is_isp(phi: ScfTable, **kw) -> bool:
    return find_isp_violation(phi, **kw) is None


def find_monotonicity_violation(phi: ScfTable, *, limit: int | None = None):
    """First ``(P, Q)`` with ``P`` supporting ``a`` at least as ``Q``, ``phi(Q)=a``, ``phi(P)=b``."""
    _pairwise_guard(phi.domain, limit)
    d = phi.domain
    a = d.pair[0]
    values = phi.values
    for i, P in enumerate(d.profiles):
        if values[i] == a:
            continue
        for j, Q in enumerate(d.profiles):
            if values[j] == a and supports_at_least(P, Q, a, d.pair):
                return (P, Q)
    return None


def is_almost_monotone(phi: ScfTable, **kw) -> bool:
    return find_monotonicity_violation(phi, **kw) is None


def find_anonymity_violation(phi: ScfTable):
    """First ``(P, (v, w))`` where swapping agents ``v`` and ``w`` changes the outcome.

    Adjacent transpositions generate every permutation, so checking them suffices.
    """
    d = phi.domain
    bad = permutation_closure_violation(d)
    if bad is not None:
        raise DomainError("anonymity needs a domain closed under permuting agents")
    values = phi.values
    n = d.n_agents
    for i, P in enumerate(d.profiles):
        for v in range(n - 1):
            sigma = list(range(n))
            sigma[v], sigma[v + 1] = v + 1, v
            if values[d.index(P.permute(sigma))] != values[i]:
                return (P, (v, v + 1))
    return None


def is_anonymous(phi: ScfTable) -> bool:
    return find_anonymity_violation(phi) is None


# compiled constraints

@dataclass(frozen=True)
class Constraints:
    """Forbidden patterns: ``bits[I] == XI`` together with ``bits[J] != XI``.

    ``bits[i]`` is True when the table picks the first alternative of the pair
    at profile ``i``; each row says the honest profile ``I`` is manipulated
    through ``J``.
    """

    I: np.ndarray
    J: np.ndarray
    XI: np.ndarray
    n_profiles: int

    def __len__(self):
        return len(self.I)

    def violated(self, bits: np.ndarray) -> np.ndarray:
        """Row-wise violation flags for a ``(tables, profiles)`` boolean matrix."""
        bits = np.atleast_2d(bits)
        out = np.zeros(len(bits), dtype=bool)
        if len(self.I) == 0:
            return out
        step = max(1, 2_000_000 // max(1, len(self.I)))
        for s in range(0, len(bits), step):
            chunk = bits[s:s + step]
            hit = (chunk[:, self.I] == self.XI) & (chunk[:, self.J] != self.XI)
            out[s:s + step] = hit.any(axis=1)
        return out


def manipulation_constraints(domain: Domain, kind: str = "strong") -> Constraints:
    """Compile manipulation opportunities of ``kind`` (strong, weak, individual)."""
    if kind not in ("strong", "weak", "individual"):
        raise ValueError(f"unknown manipulation kind {kind!r}")
    cache = domain.__dict__.setdefault("_constraint_cache", {})
    key = (kind, domain.pair)
    if key in cache:
        return cache[key]
    _pairwise_guard(domain)
    pid = np.asarray(domain.pref_ids, dtype=np.int32)
    st = np.asarray(domain.stances(), dtype=np.int8)
    N = len(pid)
    diff = pid[:, None, :] != pid[None, :, :]
    ndiff = diff.sum(axis=2)
    st_i = st[:, None, :]
    rows = []
    for xi, want in ((True, -1), (False, 1)):
        if kind == "weak":
            ok = np.all(~diff | (st_i != -want), axis=2) & np.any(st == want, axis=1)[:, None]
        else:
            ok = np.all(~diff | (st_i == want), axis=2)
        ok &= ndiff > 0
        if kind == "individual":
            ok &= ndiff == 1
        I, J = np.nonzero(ok)
        rows.append((I, J, np.full(len(I), xi)))
    I = np.concatenate([r[0] for r in rows])
    J = np.concatenate([r[1] for r in rows])
    XI = np.concatenate([r[2] for r in rows])
    order = np.lexsort((J, I))
    out = Constraints(I[order], J[order], XI[order], N)
    cache[key] = out
    return out


def _table_guard(domain: Domain, limit: int | None) -> None:
    limit = MAX_TABLE_PROFILES if limit is None else limit
    if len(domain) > limit:
        raise GuardExceeded(f"2^{len(domain)} table enumeration", 2**limit, 2 ** len(domain))


def enumerate_scfs(domain: Domain, predicate: Callable[[ScfTable], bool] | None = None, *,
                   limit: int | None = None) -> Iterator[ScfTable]:
    """Every map from the domain to the pair (filtered by ``predicate``).

    Order: lexicographic over profiles in domain order, ``b`` before ``a``.
    """
    _table_guard(domain, limit)
    for bits in itertools.product((False, True), repeat=len(domain)):
        phi = ScfTable.from_bits(domain, bits)
        if predicate is None or predicate(phi):
            yield phi


def _backtrack(domain: Domain, cons: Constraints, budget: int) -> Iterator[int]:
    N = cons.n_profiles
    # forbid[k][v] = (mask over j<k forbidden at bit 1, mask forbidden at bit 0)
    forbid = [[[0, 0], [0, 0]] for _ in range(N)]
    for i, j, xi in zip(cons.I.tolist(), cons.J.tolist(), cons.XI.tolist()):
        xj = not xi
        if i < j:
            forbid[j][xj][0 if xi else 1] |= 1 << i
        else:
            forbid[i][xi][0 if xj else 1] |= 1 << j
    count = 0
    stack = [(0, 0)]  # (next profile, assignment bits)
    while stack:
        k, assign = stack.pop()
        if k == N:
            count += 1
            if count > budget:
                raise GuardExceeded("non-manipulable table enumeration", budget, count)
            yield assign
            continue
        for v in (True, False):  # pushed in reverse: b is explored first
            on1, on0 = forbid[k][v]
            if assign & on1 or ~assign & on0:
                continue
            stack.append((k + 1, assign | (1 << k) if v else assign))


def enumerate_nonmanipulable(domain: Domain, kind: str = "strong", *,
                             budget: int | None = None) -> Iterator[ScfTable]:
    """All tables immune to ``kind`` manipulation, by constraint backtracking.

    Same order as :func:`enumerate_scfs`. ``kind="strong"`` lists the wGSP
    tables, ``"weak"`` the strongly group strategy-proof ones.
    """
    budget = guard_budget() if budget is None else budget
    cons = manipulation_constraints(domain, kind)
    N = len(domain)
    for assign in _backtrack(domain, cons, budget):
        yield ScfTable.from_bits(domain, [(assign >> i) & 1 for i in range(N)])


def anonymous_orbits(domain: Domain) -> list[list[int]]:
    """Profile indices grouped by multiset of preferences, ordered by first member."""
    groups: dict[tuple, list[int]] = {}
    for i, P in enumerate(domain.profiles):
        groups.setdefault(tuple(sorted(P.prefs)), []).append(i)
    return sorted(groups.values(), key=lambda g: g[0])


def enumerate_anonymous_scfs(domain: Domain, predicate: Callable[[ScfTable], bool] | None = None, *,
                             limit: int | None = None) -> Iterator[ScfTable]:
    """Every anonymous table, built on the space of preference multisets."""
    if permutation_closure_violation(domain) is not None:
        raise DomainError("anonymity needs a domain closed under permuting agents")
    orbits = anonymous_orbits(domain)
    limit = MAX_TABLE_PROFILES if limit is None else limit
    if len(orbits) > limit:
        raise GuardExceeded(f"2^{len(orbits)} anonymous table enumeration", 2**limit, 2 ** len(orbits))
    for choice in itertools.product((False, True), repeat=len(orbits)):
        bits = [False] * len(domain)
        for orbit, x in zip(orbits, choice):
            for i in orbit:
                bits[i] = x
        phi = ScfTable.from_bits(domain, bits)
        if predicate is None or predicate(phi):
            yield phi


def filter_nonmanipulable(tables: list[ScfTable], kind: str = "strong") -> list[ScfTable]:
    """Keep the tables with no ``kind`` manipulation, checked in numpy batches."""
    if not tables:
        return []
    cons = manipulation_constraints(tables[0].domain, kind)
    bits = np.array([t.bits for t in tables], dtype=bool)
    bad = cons.violated(bits)
    return [t for t, b in zip(tables, bad) if not b]
