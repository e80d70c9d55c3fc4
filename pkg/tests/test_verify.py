from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rso.dense import inner_product_table, random_dense
from rso.graph import ColoredMultiGraph, DirectedColoredMultiGraph, Graph, GraphError, Permutation, apply_permutation, symdiff
from rso.verify import (
    colored_robustness_exact,
    directed_colored_robustness_exact,
    enumerate_asymmetric,
    expansion_bounds,
    expansion_combinatorial,
    far_from_isomorphic,
    is_self_ordered,
    nm_extractor_error,
    quasi_orthogonality_error,
    robustness_adversarial,
    robustness_exact,
)

from .conftest import brute_expansion, brute_gamma, small_graphs


def test_path3_is_not_robust(path3):
    rep = robustness_exact(path3)
    assert rep.gamma_exact == 0
    assert rep.permutations_examined == 5
    assert apply_permutation(path3, rep.witness).edges == path3.edges


@given(small_graphs(min_n=2, max_n=6))
def test_exact_robustness_matches_brute_force(G):
    assert robustness_exact(G).gamma_exact == brute_gamma(G)


@given(small_graphs(min_n=3, max_n=7), st.integers(1, 6))
@settings(max_examples=25)
def test_partitioning_does_not_change_the_report(G, parts):
    a = robustness_exact(G)
    b = robustness_exact(G, partitions=parts, threads=2)
    assert a.to_dict() == b.to_dict()


@given(small_graphs(min_n=3, max_n=7), st.integers(0, 100))
@settings(max_examples=25)
def test_adversarial_is_an_upper_bound(G, seed):
    exact = robustness_exact(G).gamma_exact
    adv = robustness_adversarial(G, samples=200, seed=seed)
    assert adv.gamma_upper >= exact
    w = adv.witness
    assert Fraction(symdiff(G, apply_permutation(G, w)), w.num_nonfixed()) == adv.gamma_upper


def test_witness_ratio_matches_report():
    G = random_dense(8, 3)
    rep = robustness_exact(G)
    w = rep.witness
    assert Fraction(symdiff(G, apply_permutation(G, w)), w.num_nonfixed()) == rep.gamma_exact


def test_exact_limit_is_enforced():
    with pytest.raises(GraphError):
        robustness_exact(Graph(11), n_limit=10)


def test_asymmetric_counts():
    # 8 unlabeled asymmetric graphs on 6 vertices, each with 720 labelings
    assert [len(enumerate_asymmetric(n)) for n in range(2, 7)] == [0, 0, 0, 0, 8 * 720]


@given(small_graphs(min_n=2, max_n=6))
def test_self_ordered_iff_positive_gamma(G):
    ok, aut = is_self_ordered(G)
    assert ok == (robustness_exact(G).gamma_exact > 0)
    if not ok:
        assert not aut.is_identity() and apply_permutation(G, aut).edges == G.edges


def test_colored_and_directed_exact():
    M = ColoredMultiGraph(2, ((1, 1, 1), (2, 2, 2), (1, 2, 3)))
    assert colored_robustness_exact(M).gamma_exact == 2
    D = DirectedColoredMultiGraph(2, ((1, 2, 1),))
    assert directed_colored_robustness_exact(D).gamma_exact == 1
    U = ColoredMultiGraph(2, ((1, 2, 1),))
    assert colored_robustness_exact(U).gamma_exact == 0


@given(small_graphs(min_n=2, max_n=8))
@settings(max_examples=30)
def test_expansion_matches_brute_force(G):
    assert expansion_combinatorial(G).gamma_combinatorial == brute_expansion(G)


def test_expansion_bounds_bracket_the_exact_value():
    G = random_dense(14, 2)
    exact = expansion_combinatorial(G).gamma_combinatorial
    b = expansion_bounds(G, samples=500, seed=0)
    assert b.gamma_lower <= exact <= b.gamma_upper


def test_far_from_isomorphic_exact_and_sampled():
    G = Graph.from_edges(5, [(1, 2), (2, 3), (3, 4), (4, 5)])
    mu = Permutation((3, 5, 1, 2, 4))
    assert far_from_isomorphic(G, apply_permutation(G, mu)).upper == 0
    H = Graph.from_edges(5, [(1, 2), (2, 3), (3, 4), (4, 5), (1, 5)])
    r = far_from_isomorphic(G, H)
    assert r.lower == r.upper == 1
    s = far_from_isomorphic(G, H, mode="sampled", samples=300, seed=1)
    assert s.lower <= 1 <= s.upper


def test_quasi_orthogonality_of_inner_product():
    assert quasi_orthogonality_error(inner_product_table(2).table) == Fraction(1, 6)


def test_nm_error_constant_table_is_maximal():
    T = np.zeros((4, 4), dtype=np.uint8)
    assert nm_extractor_error(T) == Fraction(1, 2)
    assert quasi_orthogonality_error(T) == Fraction(1, 2)
