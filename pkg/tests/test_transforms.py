import itertools
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from rso.graph import ColoredMultiGraph, DirectedColoredMultiGraph, Graph
from rso.iso import is_isomorphic
from rso.transforms import (
    TransformError,
    check_eligible,
    cloud_vertex,
    degree_reduce_dense,
    directed_to_undirected,
    eligibility_pass,
    find_gadgets,
    gadgetize,
    make_regular_expanding,
    superimpose,
)
from rso.verify import colored_robustness_exact, directed_colored_robustness_exact, is_self_ordered

from .conftest import small_graphs


def test_eligibility_pass_recolors_parallels_and_adds_loops():
    M = ColoredMultiGraph(2, ((1, 2, 1), (1, 2, 1)))
    E = eligibility_pass(M, d=2, c=1)
    check_eligible(E)
    # second parallel copy moves to color d + 1; loops take color d*c + 1
    assert sorted(E.edges) == [(1, 1, 3), (1, 2, 1), (1, 2, 3), (2, 2, 3)]
    with pytest.raises(TransformError):
        check_eligible(M)


def test_gadgets_are_asymmetric_distinct_and_bounded():
    gs = find_gadgets(4, 3, 6, seed=0)
    gs.validate()
    graphs = [gs.for_color(c)[0] for c in (1, 2, 3)]
    for g in graphs:
        assert g.n == 6 and g.max_degree() <= 4 and g.is_connected()
        assert is_self_ordered(g)[0]
    for a, b in itertools.combinations(graphs, 2):
        assert not is_isomorphic(a, b)


def test_gadgetize_sizes():
    M = ColoredMultiGraph(2, ((1, 1, 1), (2, 2, 2), (1, 2, 3)))
    G, layout = gadgetize(M, find_gadgets(4, 3, 6, seed=0), with_layout=True)
    assert G.n == 2 + 3 * 6
    assert list(layout.sizes) == [6, 6, 6]
    assert isinstance(G, Graph)


def _valid_directed(draw_arcs, n):
    D = DirectedColoredMultiGraph(n, tuple(sorted(set(draw_arcs))))
    counts = D.incident_counts
    return D if all(c >= 3 for c in counts) else None


@st.composite
def directed_instances(draw):
    n = draw(st.integers(2, 3))
    arcs = draw(st.lists(st.tuples(st.integers(1, n), st.integers(1, n), st.integers(1, 2)), min_size=3, max_size=9 - n))
    D = _valid_directed(arcs, n)
    return D


def test_directed_to_undirected_layout():
    D = DirectedColoredMultiGraph(3, ((1, 2, 1), (2, 3, 1), (3, 1, 1), (1, 1, 2), (2, 3, 2)))
    U = directed_to_undirected(D)
    assert U.n == 3 + 5
    degs = U.degrees
    assert all(degs[a - 1] == 2 for a in range(4, 9))
    assert Counter(c for *_, c in U.edges) == Counter({1: 3, 2: 3, 3: 2, 4: 2})


@given(directed_instances())
@settings(max_examples=40)
def test_directed_to_undirected_keeps_asymmetry(D):
    """Positive directed robustness survives the transformation (the gamma/2 factor does not always)."""
    assume(D is not None and D.n + D.m <= 9)
    g = directed_colored_robustness_exact(D).gamma_exact
    gp = colored_robustness_exact(directed_to_undirected(D)).gamma_exact
    assert (g > 0) == (gp > 0)


def test_gamma_half_counterexample():
    D = DirectedColoredMultiGraph(3, ((2, 1, 1), (2, 3, 2), (3, 1, 1), (3, 1, 2), (3, 2, 2)))
    assert directed_colored_robustness_exact(D).gamma_exact == 1
    assert colored_robustness_exact(directed_to_undirected(D)).gamma_exact == Fraction(1, 3)


def test_directed_to_undirected_rejects_low_degree():
    with pytest.raises(TransformError):
        directed_to_undirected(DirectedColoredMultiGraph(2, ((1, 2, 1),)))


@given(small_graphs(min_n=2, max_n=7), st.data())
def test_superimpose_is_union(G, data):
    H = data.draw(small_graphs(min_n=G.n, max_n=G.n))
    S = superimpose(G, H)
    assert set(S.edges) == set(G.edges) | set(H.edges)


def test_make_regular_expanding_is_regular():
    G = Graph.from_edges(6, [(1, 2), (2, 3)])
    X = Graph.from_edges(6, [(i, i % 6 + 1) for i in range(1, 7)])
    M = make_regular_expanding(G, 4, X)
    assert set(M.degrees.tolist()) == {4}
    with pytest.raises(TransformError):
        make_regular_expanding(G, 2, X)


def test_degree_reduce_dense_layout():
    G = Graph.from_edges(5, [(1, 2), (2, 3), (1, 5)])
    M = degree_reduce_dense(G)
    assert M.n == 5 * 4
    cross = {(min(u, v), max(u, v)): c for u, v, c in M.edges if c != 1}
    for u, v in itertools.combinations(range(1, 6), 2):
        a, b = sorted((cloud_vertex(5, u, v), cloud_vertex(5, v, u)))
        assert cross[(a, b)] == (2 if G.has_edge(u, v) else 0)
    assert int(np.max(M.degrees)) <= 5
