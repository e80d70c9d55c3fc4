"""Isomorphism and automorphism search by color refinement plus individualization.

The search is exact: refinement only prunes, and every complete mapping is
checked edge by edge before it is reported.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterator, Sequence

from .graph import ColoredMultiGraph, DirectedColoredMultiGraph, Graph, Permutation


@dataclass(frozen=True)
class Structure:
    """Vertex-colored graph with hashable pair labels; vertices 0..n-1."""

    n: int
    vcol: tuple
    nbr: tuple  # nbr[u] = dict v -> label, for v != u

    @classmethod
    def build(cls, G, vertex_colors: Sequence | None = None) -> "Structure":
        n = G.n
        rel: list[dict[int, Counter]] = [dict() for _ in range(n)]
        loops = [Counter() for _ in range(n)]
        if isinstance(G, Graph):
            for u, v in G.edges:
                rel[u - 1].setdefault(v - 1, Counter())[1] += 1
                rel[v - 1].setdefault(u - 1, Counter())[1] += 1
        elif isinstance(G, ColoredMultiGraph):
            for u, v, c in G.edges:
                if u == v:
                    loops[u - 1][c] += 1
                else:
                    rel[u - 1].setdefault(v - 1, Counter())[c] += 1
                    rel[v - 1].setdefault(u - 1, Counter())[c] += 1
        elif isinstance(G, DirectedColoredMultiGraph):
            # outgoing colors as positive, incoming as negative labels
            for u, v, c in G.arcs:
                if u == v:
                    loops[u - 1][c] += 1
                else:
                    rel[u - 1].setdefault(v - 1, Counter())[c] += 1
                    rel[v - 1].setdefault(u - 1, Counter())[-c] += 1
        else:
            raise TypeError(f"unsupported graph type {type(G).__name__}")
        base = list(vertex_colors) if vertex_colors is not None else [0] * n
        vcol = tuple((base[i], tuple(sorted(loops[i].items()))) for i in range(n))
        nbr = tuple({v: tuple(sorted(cnt.items())) for v, cnt in r.items()} for r in rel)
        return cls(n, vcol, nbr)


def _initial_colors(a: Structure, b: Structure) -> tuple[list[int], list[int]]:
    keys = sorted(set(a.vcol) | set(b.vcol))
    idx = {k: i for i, k in enumerate(keys)}
    return [idx[x] for x in a.vcol], [idx[x] for x in b.vcol]


def refine_pair(a: Structure, b: Structure, ca: list[int], cb: list[int]):
    """Jointly refine two colorings to equitable partitions.

    Returns the refined pair, or None once the color histograms disagree.
    """
    while True:
        if Counter(ca) != Counter(cb):
            return None
        sa = [(ca[u], tuple(sorted((lab, ca[v]) for v, lab in a.nbr[u].items()))) for u in range(a.n)]
        sb = [(cb[u], tuple(sorted((lab, cb[v]) for v, lab in b.nbr[u].items()))) for u in range(b.n)]
        keys = sorted(set(sa) | set(sb))
        idx = {k: i for i, k in enumerate(keys)}
        na = [idx[s] for s in sa]
        nb = [idx[s] for s in sb]
        if len(keys) == len(set(ca) | set(cb)):
            if Counter(na) != Counter(nb):
                return None
            return na, nb
        ca, cb = na, nb


def _check_mapping(a: Structure, b: Structure, phi: list[int]) -> bool:
    for u in range(a.n):
        w = phi[u]
        if a.vcol[u] != b.vcol[w] or len(a.nbr[u]) != len(b.nbr[w]):
            return False
        bw = b.nbr[w]
        for v, lab in a.nbr[u].items():
            if bw.get(phi[v]) != lab:
                return False
    return True


def _search(a: Structure, b: Structure, ca: list[int], cb: list[int], prefer_moved: bool) -> Iterator[list[int]]:
    ref = refine_pair(a, b, ca, cb)
    if ref is None:
        return
    ca, cb = ref
    cells_a: dict[int, list[int]] = {}
    cells_b: dict[int, list[int]] = {}
    for u, c in enumerate(ca):
        cells_a.setdefault(c, []).append(u)
    for u, c in enumerate(cb):
        cells_b.setdefault(c, []).append(u)
    if all(len(x) == 1 for x in cells_a.values()):
        phi = [cells_b[ca[u]][0] for u in range(a.n)]
        if _check_mapping(a, b, phi):
            yield phi
        return
    target = min((len(x), c) for c, x in cells_a.items() if len(x) > 1)[1]
    u = cells_a[target][0]
    candidates = list(cells_b[target])
    if prefer_moved and u in candidates:
        candidates.remove(u)
        candidates.append(u)
    fresh = max(max(ca), max(cb)) + 1
    for w in candidates:
        ca2 = list(ca)
        cb2 = list(cb)
        ca2[u] = fresh
        cb2[w] = fresh
        yield from _search(a, b, ca2, cb2, prefer_moved)


def iter_isomorphisms(A, B, colors_a: Sequence | None = None, colors_b: Sequence | None = None) -> Iterator[Permutation]:
    """Yield bijections phi (1-based) with phi(A) = B, respecting optional vertex colors."""
    if A.n != B.n or type(A) is not type(B):
        return
    if A.n == 0:
        yield Permutation(())
        return
    a = Structure.build(A, colors_a)
    b = Structure.build(B, colors_b)
    ca, cb = _initial_colors(a, b)
    for phi in _search(a, b, ca, cb, prefer_moved=False):
        yield Permutation(tuple(x + 1 for x in phi))


def find_isomorphism(A, B, colors_a: Sequence | None = None, colors_b: Sequence | None = None) -> Permutation | None:
    return next(iter_isomorphisms(A, B, colors_a, colors_b), None)


def nontrivial_automorphism(A, colors: Sequence | None = None) -> Permutation | None:
    """A non-identity automorphism of A, or None when the group is trivial."""
    if A.n <= 1:
        return None
    a = Structure.build(A, colors)
    ca, cb = _initial_colors(a, a)
    return _first_moving(a, ca, cb)


def _first_moving(a: Structure, ca: list[int], cb: list[int]) -> Permutation | None:
    # Below a fixed prefix (identical individualizations on both sides), try
    # moving the chosen vertex first; fall back to fixing it and descending.
    ref = refine_pair(a, a, ca, cb)
    if ref is None:
        return None
    ca, cb = ref
    cells: dict[int, list[int]] = {}
    for u, c in enumerate(ca):
        cells.setdefault(c, []).append(u)
    if all(len(x) == 1 for x in cells.values()):
        return None
    target = min((len(x), c) for c, x in cells.items() if len(x) > 1)[1]
    u = cells[target][0]
    fresh = max(ca) + 1
    for w in cells[target][1:]:
        ca2, cb2 = list(ca), list(cb)
        ca2[u] = fresh
        cb2[w] = fresh
        phi = next(_search(a, a, ca2, cb2, prefer_moved=False), None)
        if phi is not None:
            return Permutation(tuple(x + 1 for x in phi))
    ca2, cb2 = list(ca), list(cb)
    ca2[u] = fresh
    cb2[u] = fresh
    return _first_moving(a, ca2, cb2)


def is_isomorphic(A, B) -> bool:
    return find_isomorphism(A, B) is not None
