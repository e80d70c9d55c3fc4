import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rso.graph import Graph, GraphError, LocalGraphOracle, Permutation
from rso.iso import is_isomorphic
from rso.local import (
    LocalOrderError,
    LocalOrderer,
    augment_for_local_ordering,
    local_reversed_self_order,
    local_self_order,
    permuted_oracle,
)
from rso.threestep import (
    PathFinder,
    SearchError,
    ThreeStepParams,
    assemble,
    build_three_step,
    combine_graphs,
    component_graph,
    componentwise_self_ordered,
    find_rso_small,
    local_neighbors,
    permutation_model_graph,
    random_regular_graph,
    two_cycle_matching_graph,
)
from rso.verify import is_self_ordered


@pytest.fixture(scope="module")
def small_code_params():
    return build_three_step(48, 12, 3, seed=0, local_code=True)


@pytest.fixture(scope="module")
def small_augmented(small_code_params):
    return augment_for_local_ordering(assemble(small_code_params), seed=0)


@pytest.fixture(scope="module")
def big_params():
    return build_three_step(1024, 16, 3, seed=1, local_code=True)


def test_random_regular_graph_is_regular():
    g = random_regular_graph(12, 3, np.random.default_rng(0))
    assert set(g.degrees.tolist()) == {3}
    assert random_regular_graph(5, 3, np.random.default_rng(0)) is None


def test_find_rso_small_returns_asymmetric_graph():
    # no cubic graph on 8 vertices is asymmetric, so use the bounded-degree mode
    g, rep = find_rso_small(8, 3, seed=0, regular=False)
    assert g.n == 8 and g.max_degree() == 3
    assert is_self_ordered(g)[0] and rep.gamma_exact > 0
    with pytest.raises(SearchError):
        find_rso_small(7, 3, seed=0)


def test_small_generators():
    P = permutation_model_graph(10, 4, seed=0)
    assert P.n == 10 and P.m == 20
    with pytest.raises(GraphError):
        permutation_model_graph(10, 3, seed=0)
    T = two_cycle_matching_graph(6, 2, seed=0)
    assert T.n == 12 and set(T.degrees.tolist()) == {4}


def test_component_graph_layout():
    gp = Graph.from_edges(3, [(1, 2), (2, 3)])
    gpp = Graph.from_edges(3, [(1, 2), (1, 3), (2, 3)])
    C = component_graph(gp, gpp, Permutation((2, 3, 1)))
    assert sorted(C.edges) == [(1, 2), (1, 5), (2, 3), (2, 6), (3, 4), (4, 5), (4, 6), (5, 6)]


def test_odd_ell_three_step_is_self_ordered():
    params = build_three_step(56, 7, 3, seed=0)
    G = assemble(params)
    assert not params.regular
    ok, msg = componentwise_self_ordered(G, 14)
    assert ok, msg
    comps = [G.induced(list(params.block(i))) for i in range(1, 5)]
    assert all(not is_isomorphic(a, b) for a, b in itertools.combinations(comps, 2))


def test_params_round_trip(small_code_params):
    again = ThreeStepParams.from_dict(small_code_params.to_dict())
    assert assemble(again).edges == assemble(small_code_params).edges


def test_code_mode_facts(big_params):
    G = assemble(big_params)
    assert big_params.regular and big_params.code.min_distance == 2
    assert set(G.degrees.tolist()) == {4, 5} and G.m == 2304
    for v in (1, 17, 500, 1024):
        assert local_neighbors(big_params, v) == list(G.neighbors(v))


def test_combine_graphs_checks_degree_gap():
    G1 = Graph(2)
    G2 = Graph.from_edges(3, [(1, 2), (2, 3), (1, 3)])
    G = combine_graphs(G1, G2, [(1, 1)])
    assert G.n == 5 and G.has_edge(1, 3) and G.m == 4
    with pytest.raises(GraphError):
        combine_graphs(G2, G1, [])


@given(st.integers(3, 6), st.data())
@settings(max_examples=40)
def test_pathfinder_paths_are_walks(ell_h, data):
    pf = PathFinder(ell_h, (1 << ell_h) * ell_h + data.draw(st.integers(0, 5)))
    G = pf.graph
    u = data.draw(st.integers(1, pf.n))
    v = data.draw(st.integers(1, pf.n))
    path = pf.find_path(u, v)
    assert path[0] == u and path[-1] == v
    assert len(set(path)) == len(path)
    assert all(G.has_edge(a, b) for a, b in zip(path, path[1:]))


def test_plain_local_order_inverts_permutation(small_code_params):
    G = assemble(small_code_params)
    oracle, mu = permuted_oracle(G, seed=4)
    orderer = local_self_order(oracle, small_code_params)
    inv = mu.inverse()
    assert all(orderer(v) == inv(v) for v in range(1, G.n + 1))
    assert orderer.last_queries <= orderer.budget


def test_augmented_order_and_reverse_everywhere(small_code_params, small_augmented):
    aug = small_augmented
    oracle, mu = permuted_oracle(aug.graph, seed=2)
    orderer = LocalOrderer(oracle, small_code_params, aug)
    inv = mu.inverse()
    start = mu(1)
    for v in range(1, aug.graph.n + 1, 5):
        assert orderer.order_any(v) == inv(v)
    for i in range(1, aug.graph.n + 1, 7):
        assert inv(orderer.reverse_any(i, start)) == i
    for i in range(1, small_code_params.n + 1):
        assert inv(local_reversed_self_order(orderer, i, start)) == i


def test_local_order_rejects_foreign_graph(small_code_params):
    G = assemble(small_code_params)
    edges = set(G.edges)
    edges.discard(next(iter(sorted(edges))))
    orderer = LocalOrderer(LocalGraphOracle.of_graph(Graph(G.n, tuple(sorted(edges)))), small_code_params)
    with pytest.raises(LocalOrderError):
        for v in range(1, G.n + 1):
            orderer(v)


def test_reverse_needs_augmentation(small_code_params):
    G = assemble(small_code_params)
    orderer = LocalOrderer(LocalGraphOracle.of_graph(G), small_code_params)
    with pytest.raises(LocalOrderError):
        orderer.reverse(3, 1)
