import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rso.graph import GraphError, Permutation
from rso.permutations import (
    BinaryCode,
    CollectionError,
    code_based_perm,
    code_min_distance,
    codeword_of_perm,
    greedy_far_collection,
    hamming,
    make_small_code,
    perm_distance,
    repetition_code,
    verify_collection,
)
from rso.schreier import (
    M1,
    M2,
    PermutationFamily,
    check_sufficient_condition,
    pair_id,
    pair_of,
    primary_graph,
    projective_id,
    projective_point,
    secondary_graph,
    sl2_default,
    sl2_projective_perms,
)

# ------------------------------------------------------------------ schreier


@given(st.integers(2, 12), st.data())
def test_pair_ids_are_a_bijection(n, data):
    u = data.draw(st.integers(1, n))
    v = data.draw(st.integers(1, n).filter(lambda x: x != u))
    x = pair_id(n, u, v)
    assert 1 <= x <= n * (n - 1)
    assert pair_of(n, x) == (u, v)


@pytest.mark.parametrize("p", [3, 5, 7, 11])
def test_projective_points_round_trip(p):
    for ident in range(1, p + 2):
        x, y = projective_point(p, ident)
        assert projective_id(p, x, y) == ident
        assert projective_id(p, 2 * x, 2 * y) == ident


def test_sl2_sizes_and_determinant_check():
    prim, sec = sl2_default(5)
    assert prim.n == 6 and prim.m == 12
    assert sec.n == 30 and sec.m == 60
    with pytest.raises(GraphError):
        sl2_projective_perms(5, [((1, 1), (1, 1))])
    with pytest.raises(GraphError):
        sl2_projective_perms(9, [M1])


def test_sufficient_condition_p5():
    rep = check_sufficient_condition(sl2_projective_perms(5, (M1, M2)))
    assert rep.primary.gamma_exact == Fraction(5, 3)
    assert rep.secondary.gamma_combinatorial == Fraction(1, 3)
    assert rep.inequality_holds is True


def test_secondary_of_a_trivial_family_is_disconnected():
    P = PermutationFamily((Permutation.identity(4),))
    sec = secondary_graph(P).underlying_simple()
    assert not sec.is_connected()
    assert primary_graph(P).m == 4


# ------------------------------------------------------------------ codes and collections


def test_code_encode_decode_round_trip():
    C = make_small_code(5, 0.5, seed=3)
    for i in range(1, C.size + 1):
        assert C.decode(C.encode(i)) == i
    w = C.encode(2).copy()
    w[0] ^= 1
    assert C.decode(w) in (None, *range(1, C.size + 1))
    assert C.decode(np.zeros(C.L + 1, dtype=np.uint8)) is None
    assert BinaryCode.from_dict(C.to_dict()) == C


def test_min_distance_oracle():
    C = make_small_code(4, 0.5, seed=0)
    words = C.all_codewords()
    brute = min(hamming(words[a], words[b]) for a, b in itertools.combinations(range(C.size), 2))
    assert C.min_distance == brute
    assert code_min_distance(np.asarray(C.generator)) == (brute, True)
    assert repetition_code(5).min_distance == 5


@given(st.integers(2, 6), st.integers(0, 50), st.data())
def test_code_perm_distance_is_twice_hamming(k, seed, data):
    C = make_small_code(k, 0.5, seed=seed, tries=4)
    i = data.draw(st.integers(1, C.size))
    j = data.draw(st.integers(1, C.size))
    a, b = code_based_perm(C, i), code_based_perm(C, j)
    assert perm_distance(a, b) == 2 * hamming(C.encode(i), C.encode(j))
    assert np.array_equal(codeword_of_perm(a), C.encode(i))


def test_codeword_of_perm_rejects_other_shapes():
    with pytest.raises(CollectionError):
        codeword_of_perm(Permutation((2, 3, 1, 4)))


def test_greedy_collection_is_far():
    perms = greedy_far_collection(10, 12, 0.5, seed=0)
    verify_collection(perms, 5)
    assert all(perm_distance(a, b) >= 5 for a, b in itertools.combinations(perms, 2))
    with pytest.raises(CollectionError):
        greedy_far_collection(4, 50, 1.0, seed=0, budget=200)
