"""Finite posets, super-order-closed (upward closed) sets and antichains.

Elements are opaque hashable values. The poset keeps them in a canonical
order (given by an optional sort key) and memoizes the order relation as
integer bitsets: bit ``j`` of ``up[i]`` is set when ``elements[i] <= elements[j]``.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Iterator, Sequence

DEFAULT_ANTICHAIN_BUDGET = 10**6
MAX_MEMO_ELEMENTS = 4096


def guard_budget(default: int = DEFAULT_ANTICHAIN_BUDGET) -> int:
    """The enumeration budget, overridable through ``CHARRULE_GUARD_BUDGET``."""
    raw = os.environ.get("CHARRULE_GUARD_BUDGET")
    if raw:
        try:
            return int(raw)
        except ValueError:
            pass
    return default


class GuardExceeded(RuntimeError):
    """An enumeration would exceed its configured budget."""

    def __init__(self, what: str, budget: int, needed: int | None = None):
        self.what, self.budget, self.needed = what, budget, needed
        msg = f"{what} exceeds the budget of {budget}"
        if needed is not None:
            msg += f" (needs at least {needed})"
        super().__init__(msg)


class PosetError(ValueError):
    pass


@dataclass(frozen=True)
class PosetViolation:
    axiom: str  # "reflexivity" | "antisymmetry" | "transitivity"
    elements: tuple

    def __str__(self):
        return f"{self.axiom} fails at {self.elements}"


class NotAnAntichain(ValueError):
    def __init__(self, x, y):
        self.witness = (x, y)
        super().__init__(f"{x!r} <= {y!r}, so the set is not an antichain")


def check_poset(elements: Sequence[Hashable], leq: Callable) -> PosetViolation | None:
    """Exhaustively test the partial order axioms; return the first failure."""
    elements = list(elements)
    if len(set(elements)) != len(elements):
        raise PosetError("duplicate element encodings")
    n = len(elements)
    rel = [[bool(leq(x, y)) for y in elements] for x in elements]
    for i in range(n):
        if not rel[i][i]:
            return PosetViolation("reflexivity", (elements[i],))
    for i in range(n):
        for j in range(i + 1, n):
            if rel[i][j] and rel[j][i]:
                return PosetViolation("antisymmetry", (elements[i], elements[j]))
    for i in range(n):
        for j in range(n):
            if not rel[i][j]:
                continue
            for k in range(n):
                if rel[j][k] and not rel[i][k]:
                    return PosetViolation("transitivity", (elements[i], elements[j], elements[k]))
    return None


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class FinitePoset:
    def __init__(self, elements: Iterable[Hashable], leq: Callable, *, key: Callable | None = None,
                 validate: bool = True):
        elements = list(elements)
        if len(set(elements)) != len(elements):
            raise PosetError("duplicate element encodings")
        if len(elements) > MAX_MEMO_ELEMENTS:
            raise GuardExceeded("poset size", MAX_MEMO_ELEMENTS, len(elements))
        self.elements: tuple = tuple(sorted(elements, key=key) if key else elements)
        self._leq = leq
        self._pos = {x: i for i, x in enumerate(self.elements)}
        n = len(self.elements)
        up = [0] * n
        down = [0] * n
        for i, x in enumerate(self.elements):
            for j, y in enumerate(self.elements):
                if leq(x, y):
                    up[i] |= 1 << j
                    down[j] |= 1 << i
        self.up, self.down = up, down
        if validate:
            bad = self._violation()
            if bad is not None:
                raise PosetError(str(bad))

    def _violation(self) -> PosetViolation | None:
        n = len(self.elements)
        for i in range(n):
            if not self.up[i] >> i & 1:
                return PosetViolation("reflexivity", (self.elements[i],))
            both = self.up[i] & self.down[i] & ~(1 << i)
            if both:
                j = next(_bits(both))
                return PosetViolation("antisymmetry", (self.elements[i], self.elements[j]))
            for j in _bits(self.up[i]):
                missing = self.up[j] & ~self.up[i]
                if missing:
                    k = next(_bits(missing))
                    return PosetViolation("transitivity",
                                          (self.elements[i], self.elements[j], self.elements[k]))
        return None

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x):
        return x in self._pos

    def index(self, x) -> int:
        try:
            return self._pos[x]
        except KeyError:
            raise PosetError(f"{x!r} is not an element of the poset") from None

    def leq(self, x, y) -> bool:
        return bool(self.up[self.index(x)] >> self.index(y) & 1)

    def comparable(self, x, y) -> bool:
        return self.leq(x, y) or self.leq(y, x)

    # bitmask helpers

    def mask(self, X: Iterable) -> int:
        m = 0
        for x in X:
            m |= 1 << self.index(x)
        return m

    def members(self, mask: int) -> tuple:
        return tuple(self.elements[i] for i in _bits(mask))

    def closure_mask(self, mask: int) -> int:
        out = 0
        for i in _bits(mask):
            out |= self.up[i]
        return out

    def minimals_mask(self, mask: int) -> int:
        out = 0
        for i in _bits(mask):
            if not (self.down[i] & mask) & ~(1 << i):
                out |= 1 << i
        return out

    # set-level operations

    def minimals(self, X: Iterable) -> frozenset:
        return frozenset(self.members(self.minimals_mask(self.mask(X))))

    def upward_closure(self, A: Iterable) -> frozenset:
        A = list(A)
        bad = self.antichain_violation(A)
        if bad is not None:
            raise NotAnAntichain(*bad)
        return frozenset(self.members(self.closure_mask(self.mask(A))))

    def soc_violation(self, X: Iterable):
        """First ``(f, x)`` with ``f`` in X, ``x >= f`` and ``x`` outside X; else None."""
        m = self.mask(X)
        for i in _bits(m):
            outside = self.up[i] & ~m
            if outside:
                return (self.elements[i], self.elements[next(_bits(outside))])
        return None

    def is_soc(self, X: Iterable) -> bool:
        return self.soc_violation(X) is None

    def antichain_violation(self, X: Iterable):
        """First ``(x, y)`` in X with ``x < y``; else None."""
        m = self.mask(X)
        for i in _bits(m):
            above = self.up[i] & m & ~(1 << i)
            if above:
                return (self.elements[i], self.elements[next(_bits(above))])
        return None

    def is_antichain(self, X: Iterable) -> bool:
        return self.antichain_violation(X) is None

    def hasse_edges(self) -> list[tuple]:
        """Covering pairs ``(x, y)`` with ``x < y`` and nothing strictly between."""
        edges = []
        for i in range(len(self.elements)):
            strict_up = self.up[i] & ~(1 << i)
            for j in _bits(strict_up):
                between = strict_up & self.down[j] & ~(1 << j)
                if not between:
                    edges.append((self.elements[i], self.elements[j]))
        return edges

    def antichain_masks(self, budget: int | None = None) -> Iterator[int]:
        """Depth-first antichain enumeration over the canonical element order.

        Yields bitmasks; the member-index tuples come out in lexicographic
        order. Raises :class:`GuardExceeded` before yielding item ``budget+1``.
        """
        budget = guard_budget() if budget is None else budget
        n = len(self.elements)
        full = (1 << n) - 1
        comparable = [self.up[i] | self.down[i] for i in range(n)]
        count = 0
        stack = [(0, full)]  # (chosen, candidates above the last chosen index)
        while stack:
            chosen, cand = stack.pop()
            count += 1
            if count > budget:
                raise GuardExceeded("antichain enumeration", budget, count)
            yield chosen
            children = []
            for i in _bits(cand):
                rest = cand & ~((1 << (i + 1)) - 1) & ~comparable[i]
                children.append((chosen | 1 << i, rest))
            stack.extend(reversed(children))

    def antichains(self, budget: int | None = None) -> Iterator[tuple]:
        for m in self.antichain_masks(budget):
            yield self.members(m)

    def soc_sets(self, budget: int | None = None) -> Iterator[frozenset]:
        for m in self.antichain_masks(budget):
            yield frozenset(self.members(self.closure_mask(m)))


def minimals(X: Iterable, poset: FinitePoset) -> frozenset:
    return poset.minimals(X)


def upward_closure(A: Iterable, poset: FinitePoset) -> frozenset:
    return poset.upward_closure(A)


def is_soc(X: Iterable, poset: FinitePoset) -> bool:
    return poset.is_soc(X)


def is_antichain(X: Iterable, poset: FinitePoset) -> bool:
    return poset.is_antichain(X)


def enumerate_antichains(poset: FinitePoset, budget: int | None = None) -> Iterator[tuple]:
    return poset.antichains(budget)


def count_antichains(poset: FinitePoset, budget: int | None = None) -> int:
    return sum(1 for _ in poset.antichain_masks(budget))


EXHAUSTIVE_ROUNDTRIP_LIMIT = 16


def soc_antichain_roundtrip(poset: FinitePoset, *, samples: int = 2000, seed: int = 0):
    """Check that minimal elements and upward closure are mutually inverse.

    Exhaustive over all subsets up to ``EXHAUSTIVE_ROUNDTRIP_LIMIT`` elements;
    above that, every enumerated antichain (within budget) plus ``samples``
    random subsets closed upward. Returns None or a ``(kind, mask_members)``
    counterexample.
    """
    n = len(poset)
    if n <= EXHAUSTIVE_ROUNDTRIP_LIMIT:
        socs, antichains = [], []
        for m in range(1 << n):
            if poset.soc_violation(poset.members(m)) is None:
                socs.append(m)
            if poset.antichain_violation(poset.members(m)) is None:
                antichains.append(m)
        if len(socs) != len(antichains):
            return ("count", (len(socs), len(antichains)))
    else:
        import random

        rng = random.Random(seed)
        antichains = list(itertools.islice(poset.antichain_masks(budget=10**9), 50_000))
        socs = [poset.closure_mask(rng.getrandbits(n) & rng.getrandbits(n)) for _ in range(samples)]
    for c in socs:
        if poset.closure_mask(poset.minimals_mask(c)) != c:
            return ("soc", poset.members(c))
    for a in antichains:
        if poset.minimals_mask(poset.closure_mask(a)) != a:
            return ("antichain", poset.members(a))
    return None
