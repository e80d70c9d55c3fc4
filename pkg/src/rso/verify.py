"""Certifying oracles: robustness, self-ordering, expansion, isomorphism distance,
quasi-orthogonality and non-malleability of two-source functions."""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

from .graph import (
    ColoredMultiGraph,
    DirectedColoredMultiGraph,
    Graph,
    GraphError,
    Permutation,
)
from .iso import nontrivial_automorphism
from .kernels import SupportTensor, best_in_batch, permutation_table

EXACT_N_LIMIT = 9
THREE_CYCLE_CAP = 60
CHUNK = 65536


@dataclass(frozen=True)
class RobustnessReport:
    gamma_exact: Fraction | None
    gamma_upper: Fraction
    witness: Permutation
    mode: str
    permutations_examined: int
    seed: int | None = None

    def to_dict(self) -> dict:
        return {
            "gamma_exact": None if self.gamma_exact is None else str(self.gamma_exact),
            "gamma_upper": str(self.gamma_upper),
            "witness": list(self.witness.images),
            "mode": self.mode,
            "permutations_examined": self.permutations_examined,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class _Partial:
    """Best (symdiff, nonfixed, witness row) seen in some part of a scan."""

    sd: int
    nf: int
    perm: tuple[int, ...]
    count: int

    def key(self):
        return (Fraction(self.sd, self.nf), self.perm)


def _merge(parts: Iterable[_Partial | None]) -> _Partial | None:
    best, total = None, 0
    for p in parts:
        if p is None:
            continue
        total += p.count
        if best is None or p.key() < best.key():
            best = p
    if best is None:
        return None
    return _Partial(best.sd, best.nf, best.perm, total)


def _scan_batches(support: SupportTensor, batches: Iterable[np.ndarray]) -> _Partial | None:
    best: _Partial | None = None
    count = 0
    for P in batches:
        if P.shape[0] == 0:
            continue
        ident = np.arange(P.shape[1], dtype=P.dtype)
        nf = (P != ident).sum(axis=1)
        count += int((nf > 0).sum())
        sd = support.symdiff_batch(P)
        hit = best_in_batch(sd, nf, P)
        if hit is None:
            continue
        row, s, f = hit
        cand = _Partial(s, f, tuple(int(x) for x in P[row]), 0)
        if best is None or cand.key() < best.key():
            best = cand
    if best is None:
        return None
    return _Partial(best.sd, best.nf, best.perm, count)


def _to_report(part: _Partial, mode: str, seed: int | None, exact: bool) -> RobustnessReport:
    g = Fraction(part.sd, part.nf)
    wit = Permutation.from_array0(part.perm)
    return RobustnessReport(g if exact else None, g, wit, mode, part.count, seed)


def rank_ranges(total: int, parts: int) -> list[tuple[int, int]]:
    """Split [0, total) into `parts` contiguous rank ranges."""
    parts = max(1, min(parts, total))
    cuts = [total * i // parts for i in range(parts + 1)]
    return [(cuts[i], cuts[i + 1]) for i in range(parts)]


def scan_rank_range(G, start: int, stop: int) -> _Partial | None:
    """Exact scan of the lexicographic permutation ranks [start, stop)."""
    table = permutation_table(G.n)
    support = SupportTensor.build(G)
    batches = (table[i:min(i + CHUNK, stop)] for i in range(start, stop, CHUNK))
    return _scan_batches(support, batches)


def _robustness_exact(G, n_limit: int, partitions: int, threads: int) -> RobustnessReport:
    if G.n > n_limit:
        raise GraphError(f"exact robustness needs n <= {n_limit}, got n={G.n}")
    if G.n < 2:
        raise GraphError("no non-trivial permutation exists for n < 2")
    total = math.factorial(G.n)
    ranges = rank_ranges(total, partitions)
    if threads > 1 and len(ranges) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda r: scan_rank_range(G, *r), ranges))
    else:
        parts = [scan_rank_range(G, a, b) for a, b in ranges]
    merged = _merge(parts)
    return _to_report(merged, "exact", None, True)


def robustness_exact(G: Graph, n_limit: int = EXACT_N_LIMIT, partitions: int = 1, threads: int = 1) -> RobustnessReport:
    """Minimum of symdiff(G, mu G) / #nonfixed(mu) over all non-identity mu."""
    if not isinstance(G, Graph):
        raise TypeError("robustness_exact expects a simple Graph")
    return _robustness_exact(G, n_limit, partitions, threads)


def colored_robustness_exact(M: ColoredMultiGraph, n_limit: int = EXACT_N_LIMIT, partitions: int = 1, threads: int = 1) -> RobustnessReport:
    if not isinstance(M, ColoredMultiGraph):
        raise TypeError("colored_robustness_exact expects a ColoredMultiGraph")
    return _robustness_exact(M, n_limit, partitions, threads)


def directed_colored_robustness_exact(D: DirectedColoredMultiGraph, n_limit: int = EXACT_N_LIMIT, partitions: int = 1, threads: int = 1) -> RobustnessReport:
    if not isinstance(D, DirectedColoredMultiGraph):
        raise TypeError("directed_colored_robustness_exact expects a DirectedColoredMultiGraph")
    return _robustness_exact(D, n_limit, partitions, threads)


def _chunks(rows: Iterator[Sequence[int]], n: int, size: int = 8192) -> Iterator[np.ndarray]:
    while True:
        block = list(itertools.islice(rows, size))
        if not block:
            return
        yield np.asarray(block, dtype=np.int64).reshape(len(block), n)


def transposition_batches(n: int) -> Iterator[np.ndarray]:
    if n < 2:
        return
    a, b = np.triu_indices(n, 1)
    for s in range(0, a.size, CHUNK):
        aa, bb = a[s:s + CHUNK], b[s:s + CHUNK]
        P = np.tile(np.arange(n, dtype=np.int64), (aa.size, 1))
        r = np.arange(aa.size)
        P[r, aa] = bb
        P[r, bb] = aa
        yield P


def three_cycle_batches(n: int) -> Iterator[np.ndarray]:
    if n < 3:
        return
    triples = np.array(list(itertools.combinations(range(n), 3)), dtype=np.int64)
    for s in range(0, len(triples), CHUNK // 2):
        t = triples[s:s + CHUNK // 2]
        i, j, k = t[:, 0], t[:, 1], t[:, 2]
        base = np.tile(np.arange(n, dtype=np.int64), (2 * len(t), 1))
        r = np.arange(len(t))
        # i -> j -> k -> i
        base[r, i], base[r, j], base[r, k] = j, k, i
        r2 = r + len(t)
        # i -> k -> j -> i
        base[r2, i], base[r2, k], base[r2, j] = k, j, i
        yield base


def block_swap_batches(n: int, blocks: Sequence[Sequence[int]]) -> Iterator[np.ndarray]:
    """Swap every pair of equal-size caller blocks (1-based vertex lists), position by position."""
    rows = []
    for x, y in itertools.combinations(range(len(blocks)), 2):
        bx, by = blocks[x], blocks[y]
        if len(bx) != len(by):
            continue
        p = np.arange(n, dtype=np.int64)
        for s, t in zip(bx, by):
            p[s - 1], p[t - 1] = t - 1, s - 1
        rows.append(p)
    for s in range(0, len(rows), 4096):
        yield np.stack(rows[s:s + 4096])


def random_batches(n: int, samples: int, seed: int) -> Iterator[np.ndarray]:
    rng = np.random.default_rng(seed)
    done = 0
    size = max(1, min(CHUNK, 4_000_000 // max(n, 1)))
    while done < samples:
        b = min(size, samples - done)
        yield rng.permuted(np.tile(np.arange(n, dtype=np.int64), (b, 1)), axis=1)
        done += b


def robustness_adversarial(
    G,
    families: Sequence[str] = ("transpositions", "three_cycles", "blocks", "random"),
    samples: int = 10_000,
    seed: int = 0,
    blocks: Sequence[Sequence[Sequence[int]]] = (),
    extra: Iterable[Permutation] = (),
    three_cycle_cap: int = THREE_CYCLE_CAP,
) -> RobustnessReport:
    """Upper bound on robustness from the structured battery plus seeded samples.

    `blocks` is a list of block families; within each family every pair of
    equal-size blocks is swapped. Works for all three graph flavors.
    """
    n = G.n
    if n < 2:
        raise GraphError("no non-trivial permutation exists for n < 2")
    support = SupportTensor.build(G)
    parts: list[_Partial | None] = []
    if "transpositions" in families:
        parts.append(_scan_batches(support, transposition_batches(n)))
    if "three_cycles" in families and n <= three_cycle_cap:
        parts.append(_scan_batches(support, three_cycle_batches(n)))
    if "blocks" in families:
        for fam in blocks:
            parts.append(_scan_batches(support, block_swap_batches(n, fam)))
    extra_rows = (list(p.array0) for p in extra)
    parts.append(_scan_batches(support, _chunks(extra_rows, n)))
    if "random" in families and samples > 0:
        parts.append(_scan_batches(support, random_batches(n, samples, seed)))
    merged = _merge(parts)
    if merged is None:
        raise GraphError("adversarial battery produced no non-trivial permutation")
    return _to_report(merged, "adversarial-sampled", seed, False)


def is_self_ordered(G) -> tuple[bool, Permutation | None]:
    """(True, None) when the automorphism group is trivial, else (False, automorphism)."""
    aut = nontrivial_automorphism(G)
    return aut is None, aut


# ---------------------------------------------------------------- expansion


@dataclass(frozen=True)
class ExpansionReport:
    gamma_combinatorial: Fraction | None
    lambda2: float | None
    mode: str
    gamma_lower: float | None = None
    gamma_upper: Fraction | None = None
    witness_set: tuple[int, ...] = ()
    seed: int | None = None

    def to_dict(self) -> dict:
        return {
            "gamma_combinatorial": None if self.gamma_combinatorial is None else str(self.gamma_combinatorial),
            "lambda2": self.lambda2,
            "mode": self.mode,
            "gamma_lower": self.gamma_lower,
            "gamma_upper": None if self.gamma_upper is None else str(self.gamma_upper),
            "witness_set": list(self.witness_set),
            "seed": self.seed,
        }


def _csr(G: Graph) -> tuple[np.ndarray, np.ndarray]:
    indptr = np.zeros(G.n + 1, dtype=np.int64)
    lists = G.adjacency_lists
    for v in range(1, G.n + 1):
        indptr[v] = indptr[v - 1] + len(lists[v])
    indices = np.fromiter((w - 1 for v in range(1, G.n + 1) for w in lists[v]), dtype=np.int64, count=int(indptr[-1]))
    return indptr, indices


def _simple_view(G) -> Graph:
    if isinstance(G, Graph):
        return G
    if isinstance(G, ColoredMultiGraph):
        return G.underlying_simple()
    if isinstance(G, DirectedColoredMultiGraph):
        return Graph.from_edges(G.n, [(u, v) for u, v, _ in G.arcs if u != v])
    raise TypeError(type(G).__name__)


def expansion_combinatorial(G, n_limit: int = 20) -> ExpansionReport:
    """Exact min over non-empty S, |S| <= n/2, of |N(S) minus S| / |S| (Gray-code subset scan)."""
    H = _simple_view(G)
    n = H.n
    if n > n_limit:
        raise GraphError(f"exact expansion needs n <= {n_limit}, got n={n}")
    if n < 2:
        raise GraphError("expansion undefined for n < 2")
    from ._numba_kernels import gray_code_expansion

    indptr, indices = _csr(H)
    num, den, code = gray_code_expansion(n, indptr, indices)
    S = tuple(v + 1 for v in range(n) if (int(code) >> v) & 1)
    return ExpansionReport(Fraction(int(num), int(den)), None, "exact", witness_set=S)


def expansion_sampled_upper(G, samples: int, seed: int) -> tuple[Fraction, tuple[int, ...]]:
    """Upper bound on vertex expansion from BFS balls and random connected sets."""
    H = _simple_view(G)
    n = H.n
    rng = np.random.default_rng(seed)
    adj = H.adjacency_lists
    best = None
    for t in range(samples):
        start = int(rng.integers(1, n + 1))
        target = int(rng.integers(1, n // 2 + 1))
        S = {start}
        frontier = list(adj[start])
        while len(S) < target and frontier:
            x = frontier.pop(int(rng.integers(len(frontier)))) if t % 2 else frontier.pop(0)
            if x in S:
                continue
            S.add(x)
            frontier.extend(y for y in adj[x] if y not in S)
        boundary = {y for x in S for y in adj[x]} - S
        r = Fraction(len(boundary), len(S))
        if best is None or r < best[0]:
            best = (r, tuple(sorted(S)))
    return best


def laplacian_lambda2(G) -> float:
    H = _simple_view(G)
    A = H.adjacency.astype(float)
    L = np.diag(A.sum(axis=1)) - A
    return float(np.linalg.eigvalsh(L)[1])


def expansion_bounds(G, samples: int = 2000, seed: int = 0) -> ExpansionReport:
    """Spectral lower bound lambda2(L) / (2 * maxdeg) and a sampled upper bound."""
    H = _simple_view(G)
    lam = laplacian_lambda2(H)
    lower = max(lam, 0.0) / (2 * max(H.max_degree(), 1))
    upper, S = expansion_sampled_upper(H, samples, seed)
    return ExpansionReport(None, None, "bounds", gamma_lower=lower, gamma_upper=upper, witness_set=S, seed=seed)


def expansion_spectral(G, iterations: int = 2000, seed: int = 0, tol: float = 1e-12) -> ExpansionReport:
    """Second-largest adjacency eigenvalue magnitude by deflated power iteration."""
    H = _simple_view(G)
    A = H.adjacency.astype(float)
    n = H.n
    rng = np.random.default_rng(seed)

    def power(deflate: np.ndarray | None) -> tuple[float, np.ndarray]:
        x = rng.standard_normal(n)
        lam = 0.0
        for _ in range(iterations):
            if deflate is not None:
                x = x - deflate * (deflate @ x)
            nx = np.linalg.norm(x)
            if nx == 0:
                return 0.0, x
            x = x / nx
            y = A @ x
            if deflate is not None:
                y = y - deflate * (deflate @ y)
            new = float(np.linalg.norm(y))
            # two-step iteration handles +/- eigenvalue pairs of equal magnitude
            if abs(new - lam) < tol:
                lam = new
                x = y
                break
            lam = new
            x = y
        nx = np.linalg.norm(x)
        return lam, x / nx if nx else x

    lam1, v1 = power(None)
    # top eigenvector of a non-negative matrix: use A^2 fixed point for a clean direction
    v1 = np.abs(v1)
    v1 = v1 / np.linalg.norm(v1) if np.linalg.norm(v1) else v1
    lam2, _ = power(v1)
    return ExpansionReport(None, lam2, "spectral", seed=seed)


# ---------------------------------------------------------------- isomorphism distance


@dataclass(frozen=True)
class IsoDistanceReport:
    lower: int
    upper: int
    witness: Permutation
    mode: str
    seed: int | None = None


def _degree_lower_bound(G: Graph, H: Graph) -> int:
    a = np.sort(G.degrees)
    b = np.sort(H.degrees)
    return int(math.ceil(np.abs(a - b).sum() / 2))


def far_from_isomorphic(G: Graph, H: Graph, mode: str = "exact", samples: int = 20000, seed: int = 0, n_limit: int = EXACT_N_LIMIT) -> IsoDistanceReport:
    """min over bijections phi of symdiff(G, phi(H)), exact or sampled."""
    if G.n != H.n:
        raise GraphError(f"size mismatch: {G.n} vs {H.n}")
    n = G.n
    sh = SupportTensor.build(H)
    sg = SupportTensor.build(G)
    if sh.cc.size == 0 or sg.cc.size == 0:
        w = Permutation.identity(n)
        return IsoDistanceReport(sg.mass + sh.mass, sg.mass + sh.mass, w, mode, seed)
    if mode == "exact":
        if n > n_limit:
            raise GraphError(f"exact isomorphism distance needs n <= {n_limit}")
        table = permutation_table(n)
        batches = (table[i:i + CHUNK] for i in range(0, table.shape[0], CHUNK))
        use_seed = None
    else:
        batches = itertools.chain([np.arange(n, dtype=np.int64)[None, :]], random_batches(n, samples, seed))
        use_seed = seed
    best, best_row = None, None
    for P in batches:
        ov = sh.overlap_batch(sg.table, P)
        d = sg.mass + sh.mass - 2 * ov
        i = int(np.argmin(d))
        if best is None or d[i] < best:
            best, best_row = int(d[i]), P[i]
    wit = Permutation.from_array0(best_row)
    lower = best if mode == "exact" else _degree_lower_bound(G, H)
    return IsoDistanceReport(lower, best, wit, mode, use_seed)


# ---------------------------------------------------------------- two-source functions


def quasi_orthogonality_error(table: np.ndarray) -> Fraction:
    """Smallest eps with every row/column weight and every pairwise row/column
    disagreement inside (1/2 +- eps) times the relevant dimension."""
    T = np.asarray(table, dtype=np.int64)
    n1, n2 = T.shape
    worst = Fraction(0)

    def side(M: np.ndarray, width: int) -> Fraction:
        w = M.sum(axis=1)
        # |weight/width - 1/2| = |2 weight - width| / (2 width)
        e = Fraction(int(np.abs(2 * w - width).max()), 2 * width)
        if M.shape[0] > 1:
            dis = (M[:, None, :] != M[None, :, :]).sum(axis=2)
            iu = np.triu_indices(M.shape[0], 1)
            e = max(e, Fraction(int(np.abs(2 * dis[iu] - width).max()), 2 * width))
        return e

    worst = max(worst, side(T, n2))
    worst = max(worst, side(T.T, n1))
    return worst


def _derangements(N: int) -> np.ndarray:
    return np.array([p for p in itertools.permutations(range(N)) if all(p[i] != i for i in range(N))], dtype=np.int64).reshape(-1, N)


def nm_extractor_error(table: np.ndarray, k: int | None = None, mode: str = "exact", samples: int = 2000, seed: int = 0, return_witness: bool = False):
    """Max over scanned derangement pairs (f, g) of the statistical distance
    between (F(X,Y), F(fX,gY)) and (U_1, F(fX,gY)).

    Exact mode: uniform X, Y over [N] and every pair of derangements (N <= 6).
    Sampled mode: `samples` random derangement pairs; when k is given and
    2^k < N the sources are uniform over random 2^k-subsets.
    """
    F = np.asarray(table, dtype=np.int64)
    N, N2 = F.shape
    if N != N2:
        raise GraphError(f"non-square domain {N}x{N2}")
    if mode == "exact":
        if N > 6:
            raise GraphError("exact non-malleability scan needs N <= 6")
        D = _derangements(N)
        if len(D) == 0:
            raise GraphError("no derangement exists for N < 2")
        # q[a, b] = sum_{x,y} F[x,y] F[D_a x, D_b y]
        K = np.einsum("xy,axz->ayz", F, F[D])  # K[a, y, z] = sum_x F[x,y] F[D_a x, z]
        q = K[:, np.arange(N)[None, :], D].sum(axis=2)  # (a, b)
        total = N * N
        s1 = int(F.sum())
        # joint counts: (1,1)=q, (1,0)=(0,1)=s1-q, (0,0)=total-2 s1+q; target (1/2) * marginal of second
        d2 = (np.abs(2 * q - s1) + np.abs(2 * (s1 - q) - (total - s1)) + np.abs(2 * (s1 - q) - s1) + np.abs(2 * (total - 2 * s1 + q) - (total - s1)))
        i = int(np.argmax(d2))
        worst = Fraction(int(d2.flat[i]), 4 * total)
        if return_witness:
            a, b = np.unravel_index(i, d2.shape)
            return worst, (Permutation.from_array0(D[a]), Permutation.from_array0(D[b]))
        return worst
    rng = np.random.default_rng(seed)
    size = N if k is None else min(N, 2 ** k)
    worst, wit = Fraction(0), None
    for _ in range(samples):
        f = _random_derangement(N, rng)
        g = _random_derangement(N, rng)
        R = np.sort(rng.choice(N, size, replace=False)) if size < N else np.arange(N)
        S = np.sort(rng.choice(N, size, replace=False)) if size < N else np.arange(N)
        d = _flat_distance(F, R, S, f, g)
        if d > worst:
            worst, wit = d, (Permutation.from_array0(f), Permutation.from_array0(g))
    return (worst, wit) if return_witness else worst


def _random_derangement(N: int, rng: np.random.Generator) -> np.ndarray:
    while True:
        p = rng.permutation(N)
        if not np.any(p == np.arange(N)):
            return p


def _flat_distance(F: np.ndarray, R: np.ndarray, S: np.ndarray, f: np.ndarray, g: np.ndarray) -> Fraction:
    a = F[np.ix_(R, S)]
    b = F[np.ix_(f[R], g[S])]
    total = a.size
    counts = np.zeros((2, 2), dtype=np.int64)
    for x in (0, 1):
        for y in (0, 1):
            counts[x, y] = int(((a == x) & (b == y)).sum())
    marg = counts.sum(axis=0)
    d2 = sum(abs(2 * int(counts[x, y]) - int(marg[y])) for x in (0, 1) for y in (0, 1))
    return Fraction(d2, 4 * total)


def nm_distance_for(table: np.ndarray, f: Sequence[int], g: Sequence[int]) -> Fraction:
    """Statistical distance for one tampering pair (0-based arrays), uniform sources."""
    F = np.asarray(table, dtype=np.int64)
    N1, N2 = F.shape
    return _flat_distance(F, np.arange(N1), np.arange(N2), np.asarray(f), np.asarray(g))


def enumerate_asymmetric(n: int) -> list[Graph]:
    """Every labeled graph on n vertices whose automorphism group is trivial.

    All 2^(n choose 2) edge masks are filtered against every non-identity
    permutation; a mask survives only if no permutation fixes it.
    """
    if n > 6:
        raise GraphError("exhaustive asymmetry scan is limited to n <= 6")
    pairs = list(itertools.combinations(range(n), 2))
    m = len(pairs)
    index = {p: i for i, p in enumerate(pairs)}
    masks = np.arange(1 << m, dtype=np.int64)
    if n <= 1:
        return [Graph(n)] if n == 1 else [Graph(0)]
    alive = masks
    bits = ((alive[:, None] >> np.arange(m)) & 1).astype(np.int64)
    for perm in itertools.permutations(range(n)):
        if alive.size == 0:
            break
        if all(perm[i] == i for i in range(n)):
            continue
        target = np.array([index[tuple(sorted((perm[a], perm[b])))] for a, b in pairs], dtype=np.int64)
        image = (bits << target).sum(axis=1)
        keep = image != alive
        alive, bits = alive[keep], bits[keep]
    return [Graph(n, tuple((pairs[i][0] + 1, pairs[i][1] + 1) for i in range(m) if (x >> i) & 1)) for x in alive.tolist()]
