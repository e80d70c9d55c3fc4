"""String-to-graph encodings for property-testing reductions, their decoders,
and query adapters that account for every graph and string query."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .graph import Graph, GraphError, LocalGraphOracle, symdiff
from .iso import find_isomorphism
from .local import AugmentedGraph, LocalOrderer, LocalOrderError
from .permutations import BinaryCode
from .threestep import ThreeStepParams


class DecodeError(GraphError):
    """The graph is not an encoding of any string over the given base."""


# ------------------------------------------------------------------ properties


@dataclass(frozen=True)
class StringProperty:
    name: str
    predicate: Callable[[Sequence[int]], bool]

    def __contains__(self, s) -> bool:
        return bool(self.predicate(s))


def parity_checks(C: BinaryCode) -> np.ndarray:
    """Basis of the dual code read off the reduced echelon form; each row has weight <= k + 1."""
    G = np.asarray(C.generator, dtype=np.uint8).copy()
    k, L = G.shape
    pivots = []
    r = 0
    for c in range(L):
        piv = next((i for i in range(r, k) if G[i, c]), None)
        if piv is None:
            continue
        G[[r, piv]] = G[[piv, r]]
        for i in range(k):
            if i != r and G[i, c]:
                G[i] ^= G[r]
        pivots.append(c)
        r += 1
        if r == k:
            break
    free = [c for c in range(L) if c not in pivots]
    H = np.zeros((len(free), L), dtype=np.uint8)
    for t, f in enumerate(free):
        H[t, f] = 1
        for i, p in enumerate(pivots):
            H[t, p] = G[i, f]
    return H


def codeword_property(C: BinaryCode) -> StringProperty:
    H = parity_checks(C)

    def pred(s) -> bool:
        v = np.asarray(s, dtype=np.int64)
        return v.shape == (C.L,) and not np.any(H.astype(np.int64) @ v % 2)

    return StringProperty(f"codeword[k={C.k},L={C.L}]", pred)


Tester = Callable[[Callable[[int], int], int, np.random.Generator], bool]


def codeword_tester(C: BinaryCode, checks: int = 3) -> Tester:
    """Query the support of a few sparse parity checks (1-based positions); accept iff all vanish."""
    H = parity_checks(C)

    def run(query: Callable[[int], int], n: int, rng: np.random.Generator) -> bool:
        if n != C.L:
            return False
        if len(H) == 0:
            return True
        for t in rng.choice(len(H), size=min(checks, len(H)), replace=False):
            if sum(query(int(i) + 1) for i in np.nonzero(H[t])[0]) % 2:
                return False
        return True

    return run


@dataclass
class QueryLog:
    graph_queries: int = 0
    string_queries: int = 0
    events: list[dict] = field(default_factory=list)

    def record(self, kind: str, args: tuple, gadget_pair: bool, string_cost: int) -> None:
        self.graph_queries += 1
        self.string_queries += string_cost
        self.events.append({"kind": kind, "args": list(args), "gadget_pair": gadget_pair, "string_queries": string_cost})

    def to_dict(self) -> dict:
        return {"graph_queries": self.graph_queries, "string_queries": self.string_queries, "events": self.events}


# ------------------------------------------------------------------ bounded-degree model


def encode_string_bd(s: Sequence[int], G_n: Graph) -> Graph:
    """Base G_n plus, for each i, the wedge i -- n+i, i -- 2n+i, closed to a triangle when s_i = 1."""
    n = G_n.n
    if len(s) != n:
        raise GraphError(f"string length {len(s)} differs from base size {n}")
    edges = list(G_n.edges)
    for i in range(1, n + 1):
        edges += [(i, n + i), (i, 2 * n + i)]
        if s[i - 1]:
            edges.append((n + i, 2 * n + i))
    return Graph(3 * n, tuple(sorted(edges)))


class _FilteredOracle:
    """Neighbors restricted to vertices of degree >= 3, counting the underlying queries."""

    def __init__(self, inner: LocalGraphOracle):
        self.inner = inner
        self.n = inner.n
        self._nb: dict[int, list[int]] = {}

    @property
    def queries(self) -> int:
        return self.inner.queries

    def raw(self, v: int) -> list[int]:
        r = self._nb.get(v)
        if r is None:
            r = self._nb[v] = self.inner.neighbors(v)
        return r

    def degree(self, v: int) -> int:
        return len(self.raw(v))

    def neighbors(self, v: int) -> list[int]:
        return [u for u in self.raw(v) if self.degree(u) >= 3]


def _read_bit(nb: Callable[[int], list[int]], deg: Callable[[int], int], v: int) -> int:
    low = [u for u in nb(v) if deg(u) <= 2]
    if len(low) != 2:
        raise DecodeError(f"base vertex {v} has {len(low)} low-degree neighbors, expected 2")
    x, y = low
    for w, other in ((x, y), (y, x)):
        extra = [u for u in nb(w) if u not in (v, other)]
        if extra:
            raise DecodeError(f"gadget vertex {w} has stray neighbor {extra[0]}")
    return int(y in nb(x))


def decode_graph_bd(
    Gp: Graph,
    G_n: Graph,
    mode: str = "exact",
    params: ThreeStepParams | None = None,
    augmented: AugmentedGraph | None = None,
) -> list[int]:
    """Recover s from a relabeled encoding: split off the base (degree >= 3), order it, read the gadgets.

    mode "exact" orders the base by isomorphism search (G_n must be asymmetric);
    mode "local" uses the local orderer of an augmented three-step base.
    """
    n = G_n.n
    if Gp.n != 3 * n:
        raise DecodeError(f"expected {3 * n} vertices, got {Gp.n}")
    deg = Gp.degrees
    base = [v for v in range(1, Gp.n + 1) if deg[v - 1] >= 3]
    if len(base) != n:
        raise DecodeError(f"found {len(base)} base vertices, expected {n}")
    if mode == "exact":
        H = Gp.induced(base)
        phi = find_isomorphism(H, G_n)
        if phi is None:
            raise DecodeError("base part is not isomorphic to the base graph")
        place = {v: phi(t) for t, v in enumerate(base, start=1)}
    elif mode == "local":
        if params is None or augmented is None or augmented.graph.n != n:
            raise DecodeError("local decoding needs the three-step params and the augmented base")
        orc = _FilteredOracle(LocalGraphOracle.of_graph(Gp))
        orderer = LocalOrderer(orc, params, augmented)  # type: ignore[arg-type]
        try:
            place = {v: orderer.order_any(v) for v in base}
        except LocalOrderError as exc:
            raise DecodeError(str(exc)) from None
        if sorted(place.values()) != list(range(1, n + 1)):
            raise DecodeError("local ordering is not a bijection onto the base")
    else:
        raise GraphError(f"unknown mode {mode!r}")
    s = [0] * n
    nb = Gp.neighbors
    for v in base:
        s[place[v] - 1] = _read_bit(lambda x: list(nb(x)), lambda x: int(deg[x - 1]), v)
    # the whole graph must be the encoding of s under the recovered base order
    used = set(base)
    for v in base:
        used.update(u for u in nb(v) if deg[u - 1] <= 2)
    if len(used) != Gp.n:
        raise DecodeError("some vertices belong to no gadget")
    inv = {p: v for v, p in place.items()}
    for u, v in G_n.edges:
        if not Gp.has_edge(inv[u], inv[v]):
            raise DecodeError(f"base edge {u}-{v} missing")
    if sum(1 for u, v in Gp.edges if u in place and v in place) != G_n.m:
        raise DecodeError("extra edges among base vertices")
    return s


class BdGraphOracle:
    """Adjacency and neighbor queries on the encoding of s, consulting s only for gadget pairs."""

    def __init__(self, s_oracle: Callable[[int], int], G_n: Graph):
        self._s = s_oracle
        self.G = G_n
        self.n = 3 * G_n.n
        self.log = QueryLog()

    def _bit(self, i: int) -> int:
        return int(self._s(i))

    def adjacent(self, u: int, v: int) -> int:
        n = self.G.n
        for w in (u, v):
            if not 1 <= w <= self.n:
                raise GraphError(f"vertex {w} out of range")
        a, b = min(u, v), max(u, v)
        if b <= n:
            self.log.record("adjacent", (u, v), False, 0)
            return int(self.G.has_edge(a, b))
        if a <= n:
            hit = b in (n + a, 2 * n + a)
            self.log.record("adjacent", (u, v), False, 0)
            return int(hit)
        if n < a <= 2 * n and b == a + n:
            bit = self._bit(a - n)
            self.log.record("adjacent", (u, v), True, 1)
            return bit
        self.log.record("adjacent", (u, v), False, 0)
        return 0

    def neighbors(self, v: int) -> list[int]:
        n = self.G.n
        if not 1 <= v <= self.n:
            raise GraphError(f"vertex {v} out of range")
        if v <= n:
            self.log.record("neighbors", (v,), False, 0)
            return sorted(list(self.G.neighbors(v)) + [n + v, 2 * n + v])
        i = (v - 1) % n + 1
        other = 2 * n + i if v <= 2 * n else n + i
        bit = self._bit(i)
        self.log.record("neighbors", (v,), True, 1)
        return sorted([i] + ([other] if bit else []))


def query_adapter_bd(s_oracle: Callable[[int], int], G_n: Graph) -> BdGraphOracle:
    return BdGraphOracle(s_oracle, G_n)


def restricted_distance_identity(G_n: Graph) -> bool:
    """symdiff(enc(s), enc(r)) == hamming(s, r) for every pair of strings over G_n."""
    n = G_n.n
    strings = list(itertools.product((0, 1), repeat=n))
    enc = {s: encode_string_bd(s, G_n) for s in strings}
    return all(symdiff(enc[s], enc[r]) == sum(a != b for a, b in zip(s, r)) for s in strings for r in strings)


@dataclass
class ReductionVerdict:
    accept: bool
    reason: str
    log: QueryLog
    within_budget: bool = True


def reverse_reduction_bd(
    tester: Tester,
    oracle: LocalGraphOracle,
    params: ThreeStepParams,
    augmented: AugmentedGraph,
    eps: float = 0.25,
    seed: int = 0,
    samples: int | None = None,
) -> ReductionVerdict:
    """Decide membership of an unknown graph in the encoded property.

    Three tests run in order: the share of degree <= 2 vertices is near 2/3;
    sampled vertices look like a correctly placed part of an encoding; and the
    string tester is emulated, each string query answered by locating the base
    vertex through reversed local ordering and reading its gadget.
    """
    N = augmented.graph.n
    log = QueryLog()
    rng = np.random.default_rng(seed)
    t = samples if samples is not None else math.ceil(10 / eps)
    orc = _FilteredOracle(oracle)
    orderer = LocalOrderer(orc, params, augmented)  # type: ignore[arg-type]

    def done(accept: bool, reason: str) -> ReductionVerdict:
        log.graph_queries = oracle.queries
        budget = (log.string_queries + 2 * t + 1) * orderer.budget * 2
        return ReductionVerdict(accept, reason, log, log.graph_queries <= budget)

    if oracle.n != 3 * N:
        return done(False, f"graph has {oracle.n} vertices, expected {3 * N}")
    picks = [int(x) for x in rng.integers(1, oracle.n + 1, t)]
    low = sum(orc.degree(v) <= 2 for v in picks)
    if abs(low / t - 2 / 3) > eps:
        return done(False, f"low-degree share {low / t:.3f} is far from 2/3")
    try:
        # any sampled base vertex leads to an original one through its gadget copy
        pivot = None
        for v in picks:
            if orc.degree(v) >= 3:
                view = orderer._view
                pivot = v if view.is_original(v) else view._explore_copy(v)[1][0]
                break
        if pivot is None:
            return done(False, "no base vertex among the sampled vertices")
        for v in [int(x) for x in rng.integers(1, oracle.n + 1, t)]:
            if orc.degree(v) <= 2:
                base = [u for u in orc.raw(v) if orc.degree(u) >= 3]
                if len(base) != 1:
                    return done(False, f"low-degree vertex {v} has {len(base)} base neighbors")
                continue
            i = orderer.order_any(v)
            _read_bit(orc.raw, orc.degree, v)
            images = sorted(orderer.order_any(u) for u in orc.neighbors(v))
            if images != list(augmented.graph.neighbors(i)):
                return done(False, f"neighborhood of {v} does not match base vertex {i}")

        def query(i: int) -> int:
            log.string_queries += 1
            v = orderer.reverse_any(i, pivot)
            return _read_bit(orc.raw, orc.degree, v)

        verdict = tester(query, N, rng)
    except (LocalOrderError, DecodeError, GraphError) as exc:
        return done(False, f"structure check failed: {exc}")
    return done(bool(verdict), "tester accepted" if verdict else "tester rejected")


# ------------------------------------------------------------------ dense model


def encode_string_dense(S: np.ndarray, G_m: Graph, G_big: Graph) -> Graph:
    """G_m on 1..m, G_big on m+1..m+|G_big|, plus i -- m+j whenever S[i, j] = 1."""
    S = np.asarray(S, dtype=np.uint8)
    m = G_m.n
    if S.shape != (m, m):
        raise GraphError(f"string matrix must be {m}x{m}")
    if G_big.n < m:
        raise GraphError("second base graph is smaller than m")
    edges = list(G_m.edges) + [(u + m, v + m) for u, v in G_big.edges]
    edges += [(int(i) + 1, m + int(j) + 1) for i, j in zip(*np.nonzero(S))]
    return Graph(m + G_big.n, tuple(sorted(edges)))


def decode_graph_dense(Gp: Graph, G_m: Graph, G_big: Graph, orderers: tuple | None = None) -> np.ndarray:
    """Split by degree, order both sides, read the m x m matrix, then re-encode to confirm.

    `orderers` optionally supplies (order_small, order_big), each mapping an
    induced relabeled side to a Permutation onto its base; by default both
    sides are ordered by isomorphism search.
    """
    m, M = G_m.n, G_big.n
    if Gp.n != m + M:
        raise DecodeError(f"expected {m + M} vertices, got {Gp.n}")
    deg = Gp.degrees
    order = np.argsort(deg, kind="stable")
    low = sorted(int(v) + 1 for v in order[:m])
    high = sorted(int(v) + 1 for v in order[m:])
    if deg[np.array(low) - 1].max() >= deg[np.array(high) - 1].min():
        raise DecodeError("degree split between the two sides is not clean")
    small = Gp.induced(low)
    big = Gp.induced(high)
    if orderers is None:
        p1 = find_isomorphism(small, G_m)
        p2 = find_isomorphism(big, G_big)
    else:
        try:
            p1, p2 = orderers[0](small), orderers[1](big)
        except GraphError as exc:
            raise DecodeError(str(exc)) from None
    if p1 is None or p2 is None:
        raise DecodeError("a side is not isomorphic to its base graph")
    phi = np.zeros(Gp.n, dtype=np.int64)
    for t, v in enumerate(low, start=1):
        phi[v - 1] = p1(t) - 1
    for t, v in enumerate(high, start=1):
        phi[v - 1] = m + p2(t) - 1
    A = np.zeros((Gp.n, Gp.n), dtype=bool)
    A[np.ix_(phi, phi)] = Gp.adjacency
    S = A[:m, m:2 * m].astype(np.uint8)
    if not np.array_equal(A, encode_string_dense(S, G_m, G_big).adjacency):
        raise DecodeError("graph is not an encoding under the recovered order")
    return S
