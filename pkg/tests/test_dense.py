from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rso.dense import (
    DenseError,
    TwoSourceFunction,
    appendix_counterexample,
    bipartite_restricted_robustness,
    check_efficient_so_params,
    combine_dense,
    efficient_so_graph,
    enforce_linear_degrees,
    inner_product_table,
    make_quasi_orthogonal,
    nmE_graph,
    random_dense,
    recover_ordering,
    reversal_check,
    search_small_nmE,
    small_bias_bipartite,
    small_bias_generator,
    tri_graph,
)
from rso.graph import Graph, GraphError, Permutation, apply_permutation
from rso.verify import quasi_orthogonality_error, robustness_exact


@pytest.fixture(scope="module")
def so_graph():
    return efficient_so_graph(100, 9, seed=0)


def test_small_bias_generator_example():
    assert format(small_bias_generator(0b1101, 4), "06b") == "110110"


def test_small_bias_bipartite_shape_and_error():
    B = small_bias_bipartite(4)
    assert B.table.shape == (15, 63)
    assert quasi_orthogonality_error(B.table) == Fraction(3, 10)


def test_inner_product_table():
    T = inner_product_table(2).table
    assert T.shape == (3, 3)
    assert quasi_orthogonality_error(T) == Fraction(1, 6)


def test_search_small_nmE_frozen_values():
    F = search_small_nmE(6, 0.35, seed=0)
    assert (F.eps_qo, F.eps_nm) == (Fraction(1, 3), Fraction(1, 3))
    assert TwoSourceFunction.from_dict(F.to_dict()).table.tolist() == F.table.tolist()
    with pytest.raises(DenseError):
        search_small_nmE(4, 0.01, seed=0, budget=20)


def test_nmE_graph_is_robust():
    F = search_small_nmE(4, 0.45, seed=0)
    G = nmE_graph(F)
    assert G.n == 8
    assert robustness_exact(G).gamma_exact == Fraction(1, 4)


def test_tri_graph_size():
    F = search_small_nmE(7, 0.4, seed=0, mode="sampled", samples=500)
    G = tri_graph(F, small_bias_bipartite(3))
    assert (G.n, G.m) == (45, 736)


def test_make_quasi_orthogonal_lowers_error():
    rng = np.random.default_rng(1)
    T = rng.integers(0, 2, (8, 8)).astype(np.uint8)
    before = quasi_orthogonality_error(T)
    F = make_quasi_orthogonal(T, k=1, target=Fraction(1, 5))
    assert F.table.shape[0] == F.table.shape[1]
    assert quasi_orthogonality_error(F.table) <= before


def test_enforce_linear_degrees_keeps_shape():
    F = search_small_nmE(6, 0.35, seed=0)
    G = enforce_linear_degrees(F, 0.1)
    assert G.table.shape == F.table.shape


def test_restricted_robustness_and_reversal():
    F = search_small_nmE(6, 0.35, seed=0)
    rr = bipartite_restricted_robustness(F)
    assert rr.pairs == 265 * 265
    rep = reversal_check(F, slack=0.1)
    assert rep.holds and rep.eps_restricted == Fraction(7, 18)


def test_reversal_is_skipped_for_symmetric_tables():
    assert reversal_check(np.zeros((4, 4), dtype=np.uint8)).skipped


@given(st.integers(0, 10_000))
@settings(max_examples=20)
def test_appendix_distance_is_one_half(seed):
    E = np.random.default_rng(seed).integers(0, 2, (4, 8))
    assert appendix_counterexample(E, samples=100).one_sided_distance == Fraction(1, 2)


def test_random_dense_is_seeded():
    assert random_dense(10, 5).edges == random_dense(10, 5).edges
    assert random_dense(10, 5).edges != random_dense(10, 6).edges


def test_efficient_so_param_checks():
    with pytest.raises(DenseError, match="2\\(4m - ell\\)"):
        check_efficient_so_params(100, 3)
    check_efficient_so_params(100, 9)


def test_efficient_so_degree_profile(so_graph):
    G = so_graph.graph
    assert G.n == 500
    deg = G.degrees
    assert deg.max() < 0.62 * G.n and deg.min() > 0.1 * G.n


def test_recover_ordering_identity_and_permuted(so_graph):
    assert recover_ordering(so_graph.graph, so_graph).is_identity()
    for seed in range(3):
        mu = Permutation.random(500, np.random.default_rng(seed))
        assert recover_ordering(apply_permutation(so_graph.graph, mu), so_graph) == mu.inverse()


def test_recover_ordering_rejects_extra_signature_edge(so_graph):
    E = so_graph
    edges = set(E.graph.edges) | {(1, E.m + E.ell + 5)}
    with pytest.raises(DenseError):
        recover_ordering(Graph(E.graph.n, tuple(sorted(edges))), E)


def test_combine_dense_requires_degree_gap():
    with pytest.raises(GraphError):
        combine_dense(random_dense(6, 0), Graph(3), [])
