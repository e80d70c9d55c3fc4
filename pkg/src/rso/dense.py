"""Dense constructions driven by two-source functions.

Tables are 0/1 matrices indexed from 0; graph vertices are 1-based. For a
square table F on [N] x [N] the vertex <0, j> is j, <1, i> is N + i and, in the
three-part graph, <2, j> is 2N + j.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .graph import Graph, GraphError, Permutation
from .iso import iter_isomorphisms
from .threestep import combine_graphs
from .verify import _derangements, nm_distance_for, nm_extractor_error, quasi_orthogonality_error


class DenseError(GraphError):
    pass


@dataclass(frozen=True)
class TwoSourceFunction:
    table: np.ndarray
    eps_qo: Fraction | None = None
    eps_nm: Fraction | None = None
    nm_mode: str | None = None
    seed: int | None = None
    k: int | None = None
    rows: tuple[int, ...] = ()
    cols: tuple[int, ...] = ()

    def __post_init__(self):
        T = np.asarray(self.table, dtype=np.uint8)
        if T.ndim != 2 or not np.isin(T, (0, 1)).all():
            raise DenseError("table must be a 0/1 matrix")
        T.setflags(write=False)
        object.__setattr__(self, "table", T)

    @property
    def shape(self) -> tuple[int, int]:
        return self.table.shape

    def measured(self, nm_mode: str = "exact", samples: int = 2000, seed: int = 0) -> "TwoSourceFunction":
        qo = quasi_orthogonality_error(self.table)
        nm = None
        if self.shape[0] == self.shape[1]:
            nm = nm_extractor_error(self.table, k=self.k, mode=nm_mode, samples=samples, seed=seed)
        return replace(self, eps_qo=qo, eps_nm=nm, nm_mode=nm_mode, seed=seed if nm_mode != "exact" else self.seed)

    def to_dict(self) -> dict:
        f = lambda x: None if x is None else str(x)  # noqa: E731
        return {
            "shape": list(self.shape),
            "bits": ["".join(str(int(b)) for b in row) for row in self.table],
            "eps_qo": f(self.eps_qo),
            "eps_nm": f(self.eps_nm),
            "nm_mode": self.nm_mode,
            "seed": self.seed,
            "k": self.k,
            "rows": list(self.rows),
            "cols": list(self.cols),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "TwoSourceFunction":
        T = np.array([[int(c) for c in row] for row in doc["bits"]], dtype=np.uint8).reshape(doc["shape"])
        fr = lambda x: None if x is None else Fraction(x)  # noqa: E731
        return cls(T, fr(doc.get("eps_qo")), fr(doc.get("eps_nm")), doc.get("nm_mode"), doc.get("seed"), doc.get("k"),
                   tuple(doc.get("rows", ())), tuple(doc.get("cols", ())))


# ------------------------------------------------------------------ basic tables and graphs


def random_dense(n: int, seed: int) -> Graph:
    """Each pair present independently with probability 1/2."""
    rng = np.random.default_rng(seed)
    pairs = list(itertools.combinations(range(1, n + 1), 2))
    keep = rng.random(len(pairs)) < 0.5
    return Graph(n, tuple(p for p, k in zip(pairs, keep) if k))


def _bits(x: int, width: int) -> list[int]:
    return [(x >> (width - 1 - t)) & 1 for t in range(width)]


def inner_product_table(ell: int) -> TwoSourceFunction:
    """Inner product mod 2 on nonzero ell-bit strings 1..2^ell-1 (row/column x is string x)."""
    xs = np.arange(1, 2 ** ell)
    T = np.zeros((len(xs), len(xs)), dtype=np.uint8)
    for a in xs:
        T[a - 1] = [bin(a & b).count("1") & 1 for b in xs]
    return TwoSourceFunction(T)


def small_bias_generator(x: int, ell: int) -> int:
    """x -> (x, x1*x2, x_{l-1}*x_l) as an (ell+2)-bit string, most significant bit first."""
    if ell < 3:
        raise DenseError("generator needs ell >= 3")
    b = _bits(x, ell)
    tail = [b[0] & b[1], b[ell - 2] & b[ell - 1]]
    out = 0
    for bit in b + tail:
        out = (out << 1) | bit
    return out


def small_bias_bipartite(ell: int = 4) -> TwoSourceFunction:
    """B(x, y) = <G(x), y> mod 2 on S_ell x S_{ell+2}."""
    imgs = [small_bias_generator(x, ell) for x in range(1, 2 ** ell)]
    if 0 in imgs or len(set(imgs)) != len(imgs):
        raise DenseError("generator is not injective into nonzero strings")
    ys = range(1, 2 ** (ell + 2))
    T = np.array([[bin(g & y).count("1") & 1 for y in ys] for g in imgs], dtype=np.uint8)
    return TwoSourceFunction(T)


def search_small_nmE(
    N: int,
    eps_target: float | Fraction,
    seed: int,
    budget: int = 2000,
    mode: str = "exact",
    samples: int = 2000,
    k: int | None = None,
) -> TwoSourceFunction:
    """Seeded random N x N tables until quasi-orthogonality and non-malleability errors are both <= eps_target."""
    target = Fraction(eps_target).limit_denominator(10 ** 6)
    rng = np.random.default_rng(seed)
    for _ in range(budget):
        T = rng.integers(0, 2, (N, N)).astype(np.uint8)
        qo = quasi_orthogonality_error(T)
        if qo > target:
            continue
        nm = nm_extractor_error(T, k=k, mode=mode, samples=samples, seed=seed)
        if nm <= target:
            return TwoSourceFunction(T, qo, nm, mode, seed, k)
    raise DenseError(f"budget {budget} exhausted before reaching error {eps_target}")


# ------------------------------------------------------------------ discards


def _side_error(M: np.ndarray, width: int) -> np.ndarray:
    """Per-row deviation |2 weight - width|."""
    w = M.sum(axis=1)
    return np.abs(2 * w - width)


def _pair_dev(M: np.ndarray, width: int) -> np.ndarray:
    dis = (M[:, None, :] != M[None, :, :]).sum(axis=2)
    dev = np.abs(2 * dis - width)
    np.fill_diagonal(dev, 0)
    return dev


def make_quasi_orthogonal(F: TwoSourceFunction | np.ndarray, k: int, target: Fraction = Fraction(1, 4)) -> TwoSourceFunction:
    """Discard biased rows, then biased columns, then rows and columns that
    take part in correlated pairs, each pass removing at most 2^k inputs; the
    surviving rectangle is cut to a square by dropping the most biased extras."""
    T = np.asarray(F.table if isinstance(F, TwoSourceFunction) else F, dtype=np.int64)
    rows = list(range(T.shape[0]))
    cols = list(range(T.shape[1]))
    cap = 2 ** k

    def sub():
        return T[np.ix_(rows, cols)]

    def single(axis_rows: bool):
        for _ in range(cap):
            M = sub() if axis_rows else sub().T
            width = M.shape[1]
            dev = _side_error(M, width)
            i = int(np.argmax(dev))
            if Fraction(int(dev[i]), 2 * width) <= target or M.shape[0] <= 1:
                return
            if axis_rows:
                rows.pop(i)
            else:
                cols.pop(i)

    def pairs(axis_rows: bool):
        for _ in range(cap):
            M = sub() if axis_rows else sub().T
            width = M.shape[1]
            if M.shape[0] < 2:
                return
            dev = _pair_dev(M, width)
            bad = dev * target.denominator > 2 * width * target.numerator
            if not bad.any():
                return
            i = int(np.argmax(bad.sum(axis=1)))
            if axis_rows:
                rows.pop(i)
            else:
                cols.pop(i)

    single(True)
    single(False)
    pairs(True)
    pairs(False)
    while len(rows) != len(cols):
        if len(rows) > len(cols):
            dev = _side_error(sub(), len(cols))
            rows.pop(int(np.argmax(dev)))
        else:
            dev = _side_error(sub().T, len(rows))
            cols.pop(int(np.argmax(dev)))
    out = TwoSourceFunction(sub().astype(np.uint8), k=k, rows=tuple(rows), cols=tuple(cols))
    return replace(out, eps_qo=quasi_orthogonality_error(out.table))


def enforce_linear_degrees(F: TwoSourceFunction | np.ndarray, eps_prime: float) -> TwoSourceFunction:
    """Set F(z, z + i mod N) = 1 for i = 1..ceil(eps' N)."""
    T = np.array(F.table if isinstance(F, TwoSourceFunction) else F, dtype=np.uint8)
    N = T.shape[0]
    if T.shape[1] != N:
        raise DenseError("linear-degree enforcement needs a square table")
    m = math.ceil(eps_prime * N - 1e-12)
    z = np.arange(N)
    for i in range(1, m + 1):
        T[z, (z + i) % N] = 1
    return TwoSourceFunction(T)


# ------------------------------------------------------------------ graphs from tables


def nmE_graph(F: TwoSourceFunction | np.ndarray) -> Graph:
    """Clique on <1, i>; <1, i> -- <0, j> whenever F(i, j) = 1."""
    T = np.asarray(F.table if isinstance(F, TwoSourceFunction) else F)
    N = T.shape[0]
    if T.shape[1] != N:
        raise DenseError("nmE graph needs a square table")
    edges = [(N + a, N + b) for a, b in itertools.combinations(range(1, N + 1), 2)]
    edges += [(j + 1, N + i + 1) for i, j in zip(*np.nonzero(T))]
    return Graph(2 * N, tuple(sorted(edges)))


def tri_graph(F: TwoSourceFunction | np.ndarray, B: TwoSourceFunction | np.ndarray) -> Graph:
    """nmE edges between V1 and V0, B edges from both V0 and V1 to V2, cliques on V1 and V2."""
    T = np.asarray(F.table if isinstance(F, TwoSourceFunction) else F)
    Bt = np.asarray(B.table if isinstance(B, TwoSourceFunction) else B)
    N = T.shape[0]
    if T.shape != (N, N) or Bt.shape[0] != N:
        raise DenseError(f"shape mismatch: F {T.shape}, B {Bt.shape}")
    N2 = Bt.shape[1]
    edges = set(nmE_graph(T).edges)
    edges.update((2 * N + a, 2 * N + b) for a, b in itertools.combinations(range(1, N2 + 1), 2))
    for i, j in zip(*np.nonzero(Bt)):
        edges.add((i + 1, 2 * N + j + 1))
        edges.add((N + i + 1, 2 * N + j + 1))
    return Graph(2 * N + N2, tuple(sorted(edges)))


@dataclass(frozen=True)
class RestrictedRobustness:
    min_ratio: Fraction
    min_symdiff: int
    eps: Fraction
    pairs: int
    witness: tuple[Permutation, Permutation]
    mode: str


def bipartite_restricted_robustness(B: TwoSourceFunction | np.ndarray, mode: str = "exact", samples: int = 2000, seed: int = 0) -> RestrictedRobustness:
    """Bipartite graph x -- y (B(x, y) = 1) under pairs of side-preserving derangements.

    Reports the smallest symdiff / (moved points) and eps, the largest
    deviation of symdiff / (2 |V0| |V1|) from 1/2.
    """
    T = np.asarray(B.table if isinstance(B, TwoSourceFunction) else B, dtype=np.int64)
    n0, n1 = T.shape
    if mode == "exact":
        if max(n0, n1) > 6:
            raise DenseError("exact restricted scan needs both sides <= 6")
        Dr, Dc = _derangements(n0), _derangements(n1)
    else:
        rng = np.random.default_rng(seed)
        from .verify import _random_derangement

        Dr = np.array([_random_derangement(n0, rng) for _ in range(samples)])
        Dc = np.array([_random_derangement(n1, rng) for _ in range(samples)])
    s1 = int(T.sum())
    if mode == "exact":
        K = np.einsum("xy,axz->ayz", T, T[Dr])
        q = K[:, np.arange(n1)[None, :], Dc].sum(axis=2)
        sd = 2 * (s1 - q)
        idx = [(a, b) for a in range(len(Dr)) for b in range(len(Dc))]
    else:
        q = np.array([int((T * T[np.ix_(Dr[t], Dc[t])]).sum()) for t in range(samples)])
        sd = (2 * (s1 - q))[:, None]
        idx = [(t, t) for t in range(samples)]
    flat = sd.reshape(-1)
    i = int(np.argmin(flat))
    total = 2 * n0 * n1
    eps = max(abs(Fraction(int(flat.min()), total) - Fraction(1, 2)), abs(Fraction(int(flat.max()), total) - Fraction(1, 2)))
    a, b = idx[i]
    wit = (Permutation.from_array0(Dr[a]), Permutation.from_array0(Dc[b]))
    return RestrictedRobustness(Fraction(int(flat[i]), n0 + n1), int(flat[i]), eps, len(flat), wit, mode)


@dataclass(frozen=True)
class ReversalReport:
    skipped: bool
    reason: str
    eps_restricted: Fraction | None = None
    nm_error: Fraction | None = None
    bound: float | None = None
    holds: bool | None = None


def reversal_check(B: TwoSourceFunction | np.ndarray, slack: float = 0.1, mode: str = "exact", samples: int = 2000, seed: int = 0) -> ReversalReport:
    """Compare the measured non-malleability error with eps + sqrt(2 eps) + slack,
    eps taken from the restricted robustness scan of the same table."""
    T = np.asarray(B.table if isinstance(B, TwoSourceFunction) else B, dtype=np.int64)
    rr = bipartite_restricted_robustness(T, mode=mode, samples=samples, seed=seed)
    if rr.min_symdiff == 0:
        return ReversalReport(True, "some side-preserving derangement pair leaves the bipartite graph unchanged")
    nm = nm_extractor_error(T, mode=mode, samples=samples, seed=seed)
    bound = float(rr.eps) + math.sqrt(2 * float(rr.eps)) + slack
    return ReversalReport(False, "ok", rr.eps, nm, bound, float(nm) <= bound)


# ------------------------------------------------------------------ efficiently ordered dense graph


@dataclass(frozen=True)
class EfficientSOGraph:
    """The 5m-vertex graph together with the designation needed to recover its ordering.

    G1 lives on 1..m with S1 = 1..s and R1 = s+1..m; G2 on m+1..5m with
    S2 = m+1..m+ell and R2 the rest.
    """

    graph: Graph
    m: int
    s: int
    g1: Graph
    g2: Graph
    r1_subsets: tuple[tuple[int, ...], ...]
    r2_pairs: tuple[tuple[int, int], ...]

    @property
    def ell(self) -> int:
        return self.s * (self.s - 1) // 2

    @property
    def s1_pairs(self) -> list[tuple[int, int]]:
        return list(itertools.combinations(range(1, self.s + 1), 2))

    def meta(self) -> dict:
        return {"m": self.m, "s": self.s, "ell": self.ell}


def check_efficient_so_params(m: int, s: int) -> None:
    ell = s * (s - 1) // 2
    if s < 3:
        raise DenseError("s must be at least 3")
    if 2 * (4 * m - ell) > 8 * (m - s):
        raise DenseError(f"2(4m - ell) = {2 * (4 * m - ell)} > 8(m - s) = {8 * (m - s)}")
    if math.comb(ell, math.ceil(ell / 2)) < m - s:
        raise DenseError(f"C(ell, ceil(ell/2)) = {math.comb(ell, math.ceil(ell / 2))} < m - s = {m - s}")
    if m - s < 9:
        raise DenseError(f"m - s = {m - s} leaves too few R1 vertices for distinct shift pairs")


def efficient_so_graph(
    m: int,
    s: int,
    seed: int = 0,
    g1_builder: Callable[[int, int], Graph] | None = None,
    g2_builder: Callable[[int, int], Graph] | None = None,
) -> EfficientSOGraph:
    """Graph on 5m vertices whose ordering is recoverable from an S1/S2 signature.

    S2 vertex m+t joins the t-th pair of S1; R1 vertex s+j joins the j-th
    half-size subset of S2 in lexicographic order; R2 vertices join distinct
    R1 pairs (j, j+t) for shifts t = 1, 2, 3, 4, so no R1 vertex gets more
    than 8 of them.
    """
    check_efficient_so_params(m, s)
    ell = s * (s - 1) // 2
    a, b = (int(x) for x in np.random.SeedSequence(seed).generate_state(2))
    g1 = (g1_builder or random_dense)(m, a)
    g2 = (g2_builder or random_dense)(4 * m, b)
    if g1.n != m or g2.n != 4 * m:
        raise DenseError("builders returned graphs of the wrong size")
    cross: list[tuple[int, int]] = []
    for t, (x, y) in enumerate(itertools.combinations(range(1, s + 1), 2), start=1):
        cross += [(x, t), (y, t)]
    half = math.ceil(ell / 2)
    subsets = tuple(itertools.islice(itertools.combinations(range(1, ell + 1), half), m - s))
    for j, sub in enumerate(subsets, start=1):
        cross += [(s + j, t) for t in sub]
    r1 = m - s
    pairs = []
    for shift in range(1, 5):
        for j in range(1, r1 + 1):
            if len(pairs) == 4 * m - ell:
                break
            pairs.append((j, (j - 1 + shift) % r1 + 1))
    if len(pairs) < 4 * m - ell:
        raise DenseError("not enough R1 pairs for R2")
    for t, (x, y) in enumerate(pairs, start=1):
        cross += [(s + x, ell + t), (s + y, ell + t)]
    G = combine_graphs(g1, g2, cross, strict_gap=False)
    return EfficientSOGraph(G, m, s, g1, g2, subsets, tuple(pairs))


def _adjacency_equal(G: Graph, H_adj: np.ndarray, phi0: np.ndarray) -> bool:
    # phi0[v] = image of v (0-based); G maps onto H iff H[phi u, phi v] = G[u, v]
    A = G.adjacency
    return bool(np.array_equal(H_adj[np.ix_(phi0, phi0)], A))


def recover_ordering(Gp: Graph, E: EfficientSOGraph) -> Permutation:
    """phi with phi(Gp) equal to the built graph, or DenseError when Gp does not match."""
    m, s, ell = E.m, E.s, E.ell
    n = 5 * m
    if Gp.n != n:
        raise DenseError(f"expected {n} vertices, got {Gp.n}")
    A = Gp.adjacency
    deg = A.sum(axis=1)
    order = np.argsort(deg, kind="stable")
    low, high = order[:m], order[m:]
    if deg[low].max() >= deg[high].min():
        raise DenseError("degree split between the two parts is not clean")
    lowset = np.zeros(n, dtype=bool)
    lowset[low] = True
    cross_deg = A[:, ~lowset].sum(axis=1)
    S1 = [int(v) for v in low if cross_deg[v] < math.ceil(ell / 2)]
    if len(S1) != s:
        raise DenseError(f"found {len(S1)} candidate S1 vertices, expected {s}")
    S2 = sorted(int(v) for v in np.nonzero(~lowset)[0] if A[v, S1].sum() > 0)
    if len(S2) != ell or any(int(A[v, S1].sum()) != 2 for v in S2):
        raise DenseError("S2 signature is malformed")
    R1 = [int(v) for v in low if v not in set(S1)]
    S2set = set(S2)
    R2 = [int(v) for v in high if int(v) not in S2set]
    subset_index = {sub: j for j, sub in enumerate(E.r1_subsets, start=1)}
    pair_index = {p: t for t, p in enumerate(E.r2_pairs, start=1)}
    H = E.graph.adjacency
    target_s1 = E.g1.induced(list(range(1, s + 1)))
    local = Graph.from_adjacency(A[np.ix_(S1, S1)])
    for sigma in iter_isomorphisms(local, target_s1):
        phi = np.full(n, -1, dtype=np.int64)
        for idx, v in enumerate(S1):
            phi[v] = sigma(idx + 1) - 1
        pair_t = {p: t for t, p in enumerate(E.s1_pairs, start=1)}
        ok = True
        for v in S2:
            a, b = (int(phi[u]) + 1 for u in S1 if A[v, u])
            phi[v] = m + pair_t[(min(a, b), max(a, b))] - 1
        s2_label = {v: int(phi[v]) - m + 1 for v in S2}
        for v in R1:
            sub = tuple(sorted(s2_label[u] for u in S2 if A[v, u]))
            j = subset_index.get(sub)
            if j is None:
                ok = False
                break
            phi[v] = s + j - 1
        if not ok:
            continue
        r1_label = {v: int(phi[v]) - s + 1 for v in R1}
        for v in R2:
            nb = [r1_label[u] for u in R1 if A[v, u]]
            if len(nb) != 2:
                ok = False
                break
            t = pair_index.get((nb[0], nb[1])) or pair_index.get((nb[1], nb[0]))
            if t is None:
                ok = False
                break
            phi[v] = m + ell + t - 1
        if not ok or np.any(phi < 0) or len(set(phi.tolist())) != n:
            continue
        if _adjacency_equal(Gp, H, phi):
            return Permutation.from_array0(phi)
    raise DenseError("no ordering of S1 reproduces the built graph")


# ------------------------------------------------------------------ appendix and combining


@dataclass(frozen=True)
class AppendixReport:
    one_sided_distance: Fraction
    two_sided_error: Fraction
    mode: str


def appendix_counterexample(E: np.ndarray, samples: int = 2000, seed: int = 0) -> AppendixReport:
    """E'(b x', y) = E(x', y) tampered by f flipping b and g = identity.

    The pair makes both outputs equal, so the distance is 1/2; the both-sides
    derangement error of E' is reported for contrast.
    """
    T = np.asarray(E, dtype=np.int64)
    half, N = T.shape
    if N != 2 * half:
        raise DenseError(f"expected a 2^(n-1) x 2^n table, got {T.shape}")
    Ep = np.vstack([T, T])
    f = np.concatenate([np.arange(half, N), np.arange(0, half)])
    g = np.arange(N)
    one = nm_distance_for(Ep, f, g)
    mode = "exact" if N <= 6 else "sampled"
    two = nm_extractor_error(Ep, mode=mode, samples=samples, seed=seed)
    return AppendixReport(one, two, mode)


def combine_dense(G1: Graph, G2: Graph, cross: Sequence[tuple[int, int]]) -> Graph:
    """G1 then G2 with bipartite cross edges; every G1 vertex must end below every G2 vertex in degree."""
    try:
        return combine_graphs(G1, G2, cross, strict_gap=True)
    except GraphError as exc:
        raise DenseError(str(exc)) from None
