import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rso import io as gio
from rso.graph import (
    ColoredMultiGraph,
    DirectedColoredMultiGraph,
    Graph,
    GraphError,
    LocalGraphOracle,
    Permutation,
    apply_permutation,
    colored_symdiff,
    directed_colored_symdiff,
    local_representation,
    symdiff,
)

from .conftest import permutations_of, small_graphs


def test_graph_rejects_loops_and_out_of_range():
    with pytest.raises(GraphError):
        Graph.from_edges(3, [(1, 1)])
    with pytest.raises(GraphError):
        Graph.from_edges(3, [(1, 4)])


def test_permutation_basics():
    mu = Permutation.from_cycles(4, [(1, 2, 3)])
    assert mu.images == (2, 3, 1, 4)
    assert mu.inverse().compose(mu).is_identity()
    assert mu.nonfixed() == [1, 2, 3]
    with pytest.raises(GraphError):
        Permutation((1, 1, 2))


def test_transposition_on_path(path3):
    t = Permutation.transposition(3, 1, 2)
    H = apply_permutation(path3, t)
    assert sorted(H.edges) == [(1, 2), (1, 3)]
    assert symdiff(path3, H) == 2


def test_colored_symdiff_counts_per_color():
    M = ColoredMultiGraph(2, ((1, 1, 1), (2, 2, 2), (1, 2, 3)))
    assert colored_symdiff(M, Permutation((2, 1))) == 4


def test_directed_symdiff_sees_orientation():
    D = DirectedColoredMultiGraph(2, ((1, 2, 1),))
    assert directed_colored_symdiff(D, Permutation((2, 1))) == 2


@given(small_graphs(), st.data())
def test_symdiff_of_relabeling_is_symmetric(G, data):
    mu = data.draw(permutations_of(G.n))
    H = apply_permutation(G, mu)
    assert symdiff(G, H) == symdiff(H, G)
    assert symdiff(G, H) == symdiff(G, apply_permutation(G, mu.inverse()))
    assert H.m == G.m


@given(small_graphs(), st.data())
def test_relabeling_composes(G, data):
    a = data.draw(permutations_of(G.n))
    b = data.draw(permutations_of(G.n))
    assert apply_permutation(apply_permutation(G, b), a).edges == apply_permutation(G, a.compose(b)).edges


@given(small_graphs(), st.sampled_from(["json", "edgelist"]))
def test_serialization_round_trip(G, fmt):
    text = gio.dumps(G, fmt)
    assert gio.loads(text) == G
    assert gio.dumps(gio.loads(text), fmt) == text


def test_colored_and_directed_round_trip():
    M = ColoredMultiGraph(3, ((1, 1, 2), (1, 2, 1), (1, 2, 3)))
    D = DirectedColoredMultiGraph(3, ((2, 1, 1), (1, 1, 2)))
    for G in (M, D):
        for fmt in ("json", "edgelist"):
            # multigraph equality is order-sensitive; serialization sorts
            assert gio.to_dict(gio.loads(gio.dumps(G, fmt))) == gio.to_dict(G)


def test_parse_errors_name_the_line():
    with pytest.raises(gio.ParseError, match="line 3"):
        gio.from_edgelist("# n=3 colored=0 directed=0\n1 2\n1 9\n")
    with pytest.raises(gio.ParseError, match="header"):
        gio.from_dict({"edges": []})


def test_local_representation_oracles():
    M = ColoredMultiGraph(3, ((1, 2, 1), (2, 3, 2), (2, 2, 1)))
    L = local_representation(M)
    j = L.g1(2, 1)
    assert 2 in L.g2(j)[:2]
    assert L.g1(1, 5) == 0 and L.g2(99) == 0
    assert L.g3(1, int(M.degrees[1])) == 2
    assert L.counts == {"g1": 2, "g2": 2, "g3": 1}


def test_permuted_oracle_matches_relabeled_graph():
    G = Graph.from_edges(5, [(1, 2), (2, 3), (3, 4), (4, 5), (1, 3)])
    mu = Permutation.random(5, np.random.default_rng(0))
    H = apply_permutation(G, mu)
    orc = LocalGraphOracle.permuted(G, mu)
    for v in range(1, 6):
        assert orc.neighbors(v) == list(H.neighbors(v))
    assert orc.queries == 5
    with pytest.raises(GraphError):
        orc.neighbors(0)
