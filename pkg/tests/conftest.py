import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from rso.graph import Graph, Permutation

settings.register_profile("default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def brute_gamma(G) -> Fraction | None:
    """Independent oracle: min symdiff/moved over all permutations, via Python sets."""
    n = G.n
    edges = {frozenset(e) for e in G.edges}
    best = None
    for p in itertools.permutations(range(1, n + 1)):
        moved = sum(1 for v, w in enumerate(p, start=1) if v != w)
        if not moved:
            continue
        image = {frozenset((p[u - 1], p[v - 1])) for u, v in G.edges}
        r = Fraction(len(edges ^ image), moved)
        if best is None or r < best:
            best = r
    return best


def brute_expansion(G) -> Fraction:
    n = G.n
    adj = G.adjacency_lists
    best = None
    for k in range(1, n // 2 + 1):
        for S in itertools.combinations(range(1, n + 1), k):
            s = set(S)
            boundary = {y for x in S for y in adj[x]} - s
            r = Fraction(len(boundary), k)
            best = r if best is None or r < best else best
    return best


@st.composite
def small_graphs(draw, min_n=2, max_n=6):
    n = draw(st.integers(min_n, max_n))
    pairs = list(itertools.combinations(range(1, n + 1), 2))
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph(n, tuple(p for p, b in zip(pairs, mask) if b))


@st.composite
def permutations_of(draw, n):
    return Permutation(tuple(draw(st.permutations(list(range(1, n + 1))))))


@pytest.fixture(scope="session")
def path3():
    return Graph.from_edges(3, [(1, 2), (2, 3)])


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    from .test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for r in sorted(RESULTS, key=lambda r: r.number):
            terminalreporter.write_line(r.line())
