"""Pairwise far-apart permutation collections and the small linear codes behind them."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .graph import GraphError, Permutation


class CollectionError(GraphError):
    pass


def perm_distance(a: Permutation, b: Permutation) -> int:
    """Number of points where the two permutations disagree."""
    if a.n != b.n:
        raise GraphError("permutations on different point sets")
    return sum(1 for x, y in zip(a.images, b.images) if x != y)


def hamming(a, b) -> int:
    return int(np.count_nonzero(np.asarray(a) != np.asarray(b)))


def _gf2_rank(M: np.ndarray) -> int:
    A = (np.asarray(M, dtype=np.uint8) & 1).copy()
    rank = 0
    rows, cols = A.shape
    for c in range(cols):
        piv = next((r for r in range(rank, rows) if A[r, c]), None)
        if piv is None:
            continue
        A[[rank, piv]] = A[[piv, rank]]
        for r in range(rows):
            if r != rank and A[r, c]:
                A[r] ^= A[rank]
        rank += 1
        if rank == rows:
            break
    return rank


def _gf2_inverse(M: np.ndarray) -> np.ndarray:
    k = M.shape[0]
    A = np.concatenate([np.asarray(M, dtype=np.uint8) & 1, np.eye(k, dtype=np.uint8)], axis=1)
    for c in range(k):
        piv = next(r for r in range(c, k) if A[r, c])
        A[[c, piv]] = A[[piv, c]]
        for r in range(k):
            if r != c and A[r, c]:
                A[r] ^= A[c]
    return A[:, k:]


@dataclass(frozen=True)
class BinaryCode:
    """Linear code given by a k x L generator matrix over GF(2).

    Messages are indexed 1..2^k; message i is the k-bit binary form of i-1,
    most significant bit first.
    """

    generator: tuple[tuple[int, ...], ...]
    min_distance: int
    verified: bool

    @property
    def k(self) -> int:
        return len(self.generator)

    @property
    def L(self) -> int:
        return len(self.generator[0])

    @property
    def size(self) -> int:
        return 1 << self.k

    def _G(self) -> np.ndarray:
        return np.asarray(self.generator, dtype=np.uint8)

    def message(self, i: int) -> np.ndarray:
        if not 1 <= i <= self.size:
            raise CollectionError(f"message index {i} out of range 1..{self.size}")
        return np.array([((i - 1) >> (self.k - 1 - t)) & 1 for t in range(self.k)], dtype=np.uint8)

    def encode(self, i: int) -> np.ndarray:
        return (self.message(i).astype(np.int64) @ self._G().astype(np.int64) % 2).astype(np.uint8)

    def all_codewords(self) -> np.ndarray:
        msgs = ((np.arange(self.size)[:, None] >> np.arange(self.k - 1, -1, -1)) & 1).astype(np.int64)
        return (msgs @ self._G().astype(np.int64) % 2).astype(np.uint8)

    def _pivots(self) -> tuple[list[int], np.ndarray]:
        G = self._G()
        cols: list[int] = []
        for c in range(self.L):
            if _gf2_rank(G[:, cols + [c]]) == len(cols) + 1:
                cols.append(c)
            if len(cols) == self.k:
                break
        return cols, _gf2_inverse(G[:, cols])

    def decode(self, word) -> int | None:
        """Message index of an exact codeword, else None (no error correction)."""
        w = np.asarray(word, dtype=np.uint8) & 1
        if w.shape != (self.L,):
            return None
        cols, inv = self._pivots()
        msg = (w[cols].astype(np.int64) @ inv.astype(np.int64)) % 2
        if not np.array_equal((msg @ self._G().astype(np.int64)) % 2, w):
            return None
        return int("".join(str(int(b)) for b in msg), 2) + 1

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "L": self.L,
            "generator": [list(r) for r in self.generator],
            "min_distance": self.min_distance,
            "verified": self.verified,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "BinaryCode":
        return cls(tuple(tuple(int(x) for x in r) for r in doc["generator"]), int(doc["min_distance"]), bool(doc["verified"]))


def code_min_distance(G: np.ndarray, exhaustive_k: int = 12, samples: int = 4096, seed: int = 0) -> tuple[int, bool]:
    """Minimum codeword weight (= distance for linear codes); exhaustive for k <= exhaustive_k."""
    k, L = G.shape
    if k <= exhaustive_k:
        msgs = ((np.arange(1, 1 << k)[:, None] >> np.arange(k - 1, -1, -1)) & 1).astype(np.int64)
        words = msgs @ G.astype(np.int64) % 2
        return int(words.sum(axis=1).min()), True
    rng = np.random.default_rng(seed)
    msgs = rng.integers(0, 2, (samples, k))
    msgs = msgs[msgs.any(axis=1)]
    words = msgs @ G.astype(np.int64) % 2
    return int(words.sum(axis=1).min()), False


def make_small_code(k: int, rate_target: float, seed: int, tries: int = 64, length: int | None = None) -> BinaryCode:
    """Random full-rank linear code with L = ceil(k / rate) (or `length`); best distance among `tries` draws."""
    if k < 1 or not 0 < rate_target <= 1:
        raise CollectionError("need k >= 1 and 0 < rate <= 1")
    L = length if length is not None else math.ceil(k / rate_target - 1e-12)
    if L < k:
        raise CollectionError(f"length {L} is shorter than dimension {k}")
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(tries):
        G = rng.integers(0, 2, (k, L)).astype(np.uint8)
        if _gf2_rank(G) < k:
            continue
        dist, ok = code_min_distance(G, seed=seed)
        if best is None or dist > best[1]:
            best = (G, dist, ok)
    if best is None:
        raise CollectionError("no full-rank generator found")
    G, dist, ok = best
    return BinaryCode(tuple(tuple(int(x) for x in r) for r in G), dist, ok)


def repetition_code(L: int) -> BinaryCode:
    return BinaryCode(((1,) * L,), L, True)


def code_based_perm(C: BinaryCode, i: int) -> Permutation:
    """Disjoint transpositions (2j-1, 2j) wherever bit j of codeword i is 1, on [2L]."""
    w = C.encode(i)
    imgs = list(range(1, 2 * C.L + 1))
    for j, bit in enumerate(w, start=1):
        if bit:
            imgs[2 * j - 2], imgs[2 * j - 1] = 2 * j, 2 * j - 1
    return Permutation(tuple(imgs))


def codeword_of_perm(pi: Permutation) -> np.ndarray:
    """Inverse of code_based_perm's layout; raises if pi is not of that shape."""
    if pi.n % 2:
        raise CollectionError("odd domain")
    bits = []
    for j in range(1, pi.n // 2 + 1):
        a, b = pi(2 * j - 1), pi(2 * j)
        if (a, b) == (2 * j - 1, 2 * j):
            bits.append(0)
        elif (a, b) == (2 * j, 2 * j - 1):
            bits.append(1)
        else:
            raise CollectionError(f"slot {j} is neither fixed nor swapped")
    return np.array(bits, dtype=np.uint8)


def verify_collection(perms: list[Permutation], threshold: int) -> None:
    for a, b in itertools.combinations(range(len(perms)), 2):
        d = perm_distance(perms[a], perms[b])
        if d < threshold:
            raise CollectionError(f"permutations {a + 1} and {b + 1} are only {d} apart (< {threshold})")


def greedy_far_collection(ell: int, m: int, delta: float, seed: int, budget: int = 100000) -> list[Permutation]:
    """Accept seeded uniform candidates that stay ceil(delta*ell)-far from all accepted ones."""
    threshold = math.ceil(delta * ell - 1e-12)
    rng = np.random.default_rng(seed)
    chosen: list[Permutation] = []
    arrays: list[np.ndarray] = []
    for _ in range(budget):
        if len(chosen) == m:
            break
        cand = rng.permutation(ell)
        if all(np.count_nonzero(cand != a) >= threshold for a in arrays):
            arrays.append(cand)
            chosen.append(Permutation.from_array0(cand))
    if len(chosen) < m:
        raise CollectionError(f"budget {budget} exhausted with {len(chosen)}/{m} permutations")
    verify_collection(chosen, threshold)
    return chosen
