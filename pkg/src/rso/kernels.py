"""Vectorized symmetric-difference kernels over batches of permutations.

A graph of any flavor is flattened into a count tensor T[color, u, v] plus the
list of its non-zero entries (its support).  For a batch of 0-based image
arrays P, the per-color multiset symmetric difference between the graph and
its relabeling is

    sum_{x in supp} |T[x] - T[P x]|  +  mass - sum_{x in supp} T[P x],

because relabeling permutes the index pairs and so preserves total mass.
Undirected graphs keep only the u <= v half of the support against a
symmetric table; directed graphs keep every ordered pair.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .graph import ColoredMultiGraph, DirectedColoredMultiGraph, Graph


@dataclass(frozen=True)
class SupportTensor:
    n: int
    table: np.ndarray  # (colors, n, n) int32
    cc: np.ndarray
    uu: np.ndarray
    vv: np.ndarray
    ww: np.ndarray
    mass: int

    @classmethod
    def build(cls, G) -> "SupportTensor":
        n = G.n
        if isinstance(G, Graph):
            triples = [(u, v, 1) for u, v in G.edges]
            directed = False
        elif isinstance(G, ColoredMultiGraph):
            triples = list(G.edges)
            directed = False
        elif isinstance(G, DirectedColoredMultiGraph):
            triples = list(G.arcs)
            directed = True
        else:
            raise TypeError(f"unsupported graph type {type(G).__name__}")
        palette = sorted({c for _, _, c in triples})
        cidx = {c: i for i, c in enumerate(palette)}
        T = np.zeros((max(len(palette), 1), n, n), dtype=np.int32)
        for u, v, c in triples:
            T[cidx[c], u - 1, v - 1] += 1
            if not directed and u != v:
                T[cidx[c], v - 1, u - 1] += 1
        if directed:
            c_, u_, v_ = np.nonzero(T)
        else:
            c_, u_, v_ = np.nonzero(np.triu(T))
        w_ = T[c_, u_, v_]
        return cls(n, T, c_, u_, v_, w_.astype(np.int64), int(w_.sum()))

    def symdiff_batch(self, P: np.ndarray) -> np.ndarray:
        """Symmetric-difference sizes for each row of P (0-based images)."""
        if self.cc.size == 0:
            return np.zeros(P.shape[0], dtype=np.int64)
        g = self.table[self.cc, P[:, self.uu], P[:, self.vv]].astype(np.int64)
        return np.abs(g - self.ww).sum(axis=1) + self.mass - g.sum(axis=1)

    def overlap_batch(self, other_table: np.ndarray, P: np.ndarray) -> np.ndarray:
        """sum over own support of min(own, other[P x]), used for isomorphism distance."""
        if self.cc.size == 0:
            return np.zeros(P.shape[0], dtype=np.int64)
        g = other_table[self.cc, P[:, self.uu], P[:, self.vv]].astype(np.int64)
        return np.minimum(g, self.ww).sum(axis=1)


@lru_cache(maxsize=4)
def permutation_table(n: int) -> np.ndarray:
    """All permutations of 0..n-1 in lexicographic order, one per row (int8)."""
    total = 1
    for k in range(2, n + 1):
        total *= k
    flat = np.fromiter(
        itertools.chain.from_iterable(itertools.permutations(range(n))),
        dtype=np.int8,
        count=total * n,
    )
    flat.setflags(write=False)
    return flat.reshape(total, n)


def best_in_batch(sd: np.ndarray, nf: np.ndarray, P: np.ndarray) -> tuple[int, int, int] | None:
    """Index of the minimum-ratio row (ties: lexicographically smallest row).

    Returns (row, symdiff, nonfixed) or None if every row is the identity.
    """
    mask = nf > 0
    if not mask.any():
        return None
    ratio = np.full(sd.shape, np.inf)
    ratio[mask] = sd[mask] / nf[mask]
    best = ratio.min()
    ties = np.flatnonzero(ratio == best)
    if ties.size > 1:
        rows = P[ties]
        order = np.lexsort(rows.T[::-1])
        row = int(ties[order[0]])
    else:
        row = int(ties[0])
    return row, int(sd[row]), int(nf[row])
