import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rso.dense import random_dense
from rso.graph import Graph, LocalGraphOracle, Permutation, apply_permutation, symdiff
from rso.local import augment_for_local_ordering
from rso.permutations import make_small_code
from rso.reduction import (
    DecodeError,
    codeword_property,
    codeword_tester,
    decode_graph_bd,
    decode_graph_dense,
    encode_string_bd,
    encode_string_dense,
    parity_checks,
    query_adapter_bd,
    restricted_distance_identity,
    reverse_reduction_bd,
)
from rso.threestep import assemble, build_three_step
from rso.verify import enumerate_asymmetric, is_self_ordered


@pytest.fixture(scope="module")
def base6():
    return enumerate_asymmetric(6)[0]


@pytest.fixture(scope="module")
def setting():
    params = build_three_step(48, 12, 3, seed=0, local_code=True)
    aug = augment_for_local_ordering(assemble(params), seed=0)
    code = make_small_code(6, 6 / aug.graph.n, seed=0, tries=2, length=aug.graph.n)
    return params, aug, code


def test_bd_encoding_example():
    G = Graph.from_edges(2, [(1, 2)])
    enc = encode_string_bd([1, 0], G)
    assert sorted(enc.edges) == [(1, 2), (1, 3), (1, 5), (2, 4), (2, 6), (3, 5)]


@given(st.lists(st.integers(0, 1), min_size=6, max_size=6), st.integers(0, 10_000))
@settings(max_examples=30)
def test_bd_round_trip_under_relabeling(base6, s, seed):
    enc = encode_string_bd(s, base6)
    assert decode_graph_bd(enc, base6) == s
    mu = Permutation.random(enc.n, np.random.default_rng(seed))
    assert decode_graph_bd(apply_permutation(enc, mu), base6) == s


def test_bd_membership_is_preserved(base6):
    C = make_small_code(3, 0.5, seed=0)
    prop = codeword_property(C)
    for i in range(1, C.size + 1):
        s = C.encode(i).tolist()
        assert s in prop
        assert decode_graph_bd(encode_string_bd(s, base6), base6) in prop


def test_bd_decode_rejects_broken_gadget(base6):
    enc = encode_string_bd([1] * 6, base6)
    bad = Graph(enc.n, tuple(e for e in enc.edges if e not in {(1, 7), (1, 13)}))
    with pytest.raises(DecodeError):
        decode_graph_bd(bad, base6)


def test_restricted_distance_identity_small_bases(base6):
    assert restricted_distance_identity(base6)
    assert restricted_distance_identity(Graph.from_edges(4, [(1, 2), (2, 3), (3, 4)]))


@given(st.lists(st.integers(0, 1), min_size=5, max_size=5), st.lists(st.integers(0, 1), min_size=5, max_size=5))
def test_symdiff_equals_hamming(s, r):
    G = Graph.from_edges(5, [(1, 2), (2, 3), (3, 4), (4, 5)])
    assert symdiff(encode_string_bd(s, G), encode_string_bd(r, G)) == sum(a != b for a, b in zip(s, r))


def test_query_adapter_log(base6):
    s = [1, 0, 1, 1, 0, 0]
    ad = query_adapter_bd(lambda i: s[i - 1], base6)
    assert ad.adjacent(1, 2) == int(base6.has_edge(1, 2))
    assert ad.log.string_queries == 0
    assert ad.adjacent(7, 13) == 1 and ad.log.string_queries == 1
    enc = encode_string_bd(s, base6)
    rng = np.random.default_rng(0)
    for _ in range(500):
        u, v = (int(x) for x in rng.integers(1, 19, 2))
        assert ad.adjacent(u, v) == int(u != v and enc.has_edge(min(u, v), max(u, v)))
        assert ad.neighbors(u) == list(enc.neighbors(u))
    log = ad.log
    assert log.string_queries <= log.graph_queries
    assert all(e["string_queries"] == int(e["gadget_pair"]) for e in log.events)


def test_local_decode(setting):
    params, aug, _ = setting
    s = np.random.default_rng(3).integers(0, 2, aug.graph.n).tolist()
    enc = encode_string_bd(s, aug.graph)
    mu = Permutation.random(enc.n, np.random.default_rng(9))
    assert decode_graph_bd(apply_permutation(enc, mu), aug.graph, mode="local", params=params, augmented=aug) == s


def test_parity_checks_annihilate_code(setting):
    _, _, C = setting
    H = parity_checks(C)
    assert H.shape == (C.L - C.k, C.L)
    assert not np.any(H.astype(np.int64) @ C.all_codewords().T.astype(np.int64) % 2)


def _oracle(G, seed):
    mu = Permutation.random(G.n, np.random.default_rng(seed))
    return LocalGraphOracle.permuted(G, mu)


def test_reverse_reduction_accepts_codewords(setting):
    params, aug, C = setting
    tester = codeword_tester(C)
    for i, seed in zip((1, 5, 17), range(3)):
        enc = encode_string_bd(C.encode(i).tolist(), aug.graph)
        v = reverse_reduction_bd(tester, _oracle(enc, seed), params, aug, seed=seed)
        assert v.accept, v.reason
        assert v.within_budget


def test_reverse_reduction_rejects_missing_gadgets(setting):
    params, aug, C = setting
    enc = encode_string_bd(C.encode(2).tolist(), aug.graph)
    stripped = Graph(enc.n, tuple(e for e in enc.edges if e[1] <= aug.graph.n))
    v = reverse_reduction_bd(codeword_tester(C), _oracle(stripped, 0), params, aug, seed=0)
    assert not v.accept


def test_reverse_reduction_rejects_most_non_codewords(setting):
    params, aug, C = setting
    rejected = 0
    for seed in range(5):
        s = C.encode(3).copy()
        # break the first parity check, then add noise
        s[np.nonzero(parity_checks(C)[0])[0][0]] ^= 1
        s[np.random.default_rng(seed).integers(0, C.L, 40)] ^= 1
        enc = encode_string_bd(s.tolist(), aug.graph)
        rejected += not reverse_reduction_bd(codeword_tester(C, checks=6), _oracle(enc, seed), params, aug, seed=seed).accept
    assert rejected >= 3


def test_dense_round_trip():
    m = 6
    G_m = enumerate_asymmetric(6)[0]
    for seed in itertools.count():
        G_big = random_dense(294, seed)
        if is_self_ordered(G_big)[0]:
            break
    rng = np.random.default_rng(0)
    S = rng.integers(0, 2, (m, m)).astype(np.uint8)
    enc = encode_string_dense(S, G_m, G_big)
    assert enc.m == G_m.m + G_big.m + int(S.sum())
    assert np.array_equal(decode_graph_dense(enc, G_m, G_big), S)
    mu = Permutation.random(enc.n, np.random.default_rng(1))
    assert np.array_equal(decode_graph_dense(apply_permutation(enc, mu), G_m, G_big), S)
    flat = Graph(enc.n, tuple(e for e in enc.edges if e[0] > m))
    with pytest.raises(DecodeError):
        decode_graph_dense(flat, G_m, G_big)
