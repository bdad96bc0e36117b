import itertools
import random
import sys

import pytest
from hypothesis import strategies as st

from charrule.prefs import Domain, Preference, Profile, all_weak_orders
from charrule.rules import ScfTable

LABELS = ("a", "b", "c", "d")


def alt_labels(m):
    return LABELS[:m]


def weak_orders(m):
    return st.sampled_from(all_weak_orders(m))


@st.composite
def profile_pairs(draw, n_max=3, m_max=3):
    """Two profiles over the same agents and alternatives."""
    n = draw(st.integers(1, n_max))
    m = draw(st.integers(2, m_max))
    P = Profile(tuple(draw(weak_orders(m)) for _ in range(n)))
    Q = Profile(tuple(draw(weak_orders(m)) for _ in range(n)))
    return P, Q


@st.composite
def cartesian_domains(draw, n_max=3, m_max=3, factor_max=3, size_max=27):
    n = draw(st.integers(1, n_max))
    m = draw(st.integers(2, m_max))
    orders = all_weak_orders(m)
    while True:
        facs = [draw(st.lists(st.sampled_from(orders), min_size=1, max_size=factor_max, unique=True))
                for _ in range(n)]
        size = 1
        for f in facs:
            size *= len(f)
        if size <= size_max:
            break
    return Domain.cartesian(facs, alternatives=alt_labels(m))


def random_cartesian_domain(rng: random.Random, n_max=3, m_max=3, size_max=12) -> Domain:
    while True:
        n = rng.randint(1, n_max)
        m = rng.randint(2, m_max)
        orders = all_weak_orders(m)
        facs = [rng.sample(orders, rng.randint(1, min(4, len(orders)))) for _ in range(n)]
        size = 1
        for f in facs:
            size *= len(f)
        if size <= size_max:
            return Domain.cartesian(facs, alternatives=alt_labels(m))


def all_tables(domain: Domain):
    for bits in itertools.product((True, False), repeat=len(domain)):
        yield ScfTable.from_bits(domain, bits)


def random_table(domain: Domain, rng: random.Random) -> ScfTable:
    return ScfTable.from_bits(domain, [rng.random() < 0.5 for _ in range(len(domain))])


def pref(text, m=3):
    return Preference.parse(text, alt_labels(m))


@pytest.fixture
def rng():
    return random.Random(20261016)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
