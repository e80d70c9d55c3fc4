"""The fifteen desk-scale acceptance checks, shared by `rso demo` and the test suite.

Each check returns (passed, detail, data); `run_criterion` adds timing and
fails any check that overruns its wall-clock budget.
"""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .dense import (
    DenseError,
    appendix_counterexample,
    efficient_so_graph,
    inner_product_table,
    nmE_graph,
    random_dense,
    recover_ordering,
    reversal_check,
    search_small_nmE,
    small_bias_bipartite,
    tri_graph,
)
from .graph import (
    ColoredMultiGraph,
    DirectedColoredMultiGraph,
    Graph,
    Permutation,
    apply_permutation,
)
from .iso import is_isomorphic
from .local import DEFAULT_QUERY_CONSTANT, LocalOrderer, augment_for_local_ordering, permuted_oracle
from .permutations import code_based_perm, hamming, make_small_code, perm_distance
from .reduction import (
    DecodeError,
    decode_graph_bd,
    decode_graph_dense,
    encode_string_bd,
    encode_string_dense,
    query_adapter_bd,
    restricted_distance_identity,
)
from .schreier import M1, M2, check_sufficient_condition, secondary_graph, sl2_projective_perms
from .threestep import assemble, build_three_step, componentwise_self_ordered
from .transforms import check_eligible, directed_to_undirected, find_gadgets, gadgetize, superimpose
from .verify import (
    colored_robustness_exact,
    directed_colored_robustness_exact,
    enumerate_asymmetric,
    is_self_ordered,
    quasi_orthogonality_error,
    robustness_adversarial,
    robustness_exact,
)

Check = Callable[[int], tuple[bool, str, dict]]


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float
    budget: float
    data: dict = field(default_factory=dict)

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.number:2d} {self.name}: {self.detail} ({self.seconds:.1f}s of {self.budget:.0f}s)"

    def row(self) -> dict:
        return {
            "criterion": self.number,
            "name": self.name,
            "passed": self.passed,
            "seconds": round(self.seconds, 3),
            "budget_seconds": self.budget,
            "detail": self.detail,
        }


def _first_asymmetric_dense(n: int, start: int = 0) -> tuple[Graph, int]:
    for seed in itertools.count(start):
        G = random_dense(n, seed)
        if is_self_ordered(G)[0]:
            return G, seed
    raise AssertionError("unreachable")


# ------------------------------------------------------------------ 1-5


def asymmetry_frontier(threads: int = 1):
    counts = {n: len(enumerate_asymmetric(n)) for n in range(2, 7)}
    found = enumerate_asymmetric(6)[0] if counts[6] else None
    gamma = robustness_exact(found).gamma_exact if found is not None else None
    ok = all(counts[n] == 0 for n in range(2, 6)) and counts[6] > 0 and gamma is not None and gamma > 0
    detail = f"asymmetric counts n=2..6 {[counts[n] for n in range(2, 7)]}, gamma of first 6-vertex graph {gamma}"
    return ok, detail, {"counts": counts, "gamma": str(gamma), "edges": list(found.edges) if found else None}


def exact_oracle_n9(threads: int = 1):
    G, seed = _first_asymmetric_dense(9)
    t = time.perf_counter()
    single = robustness_exact(G)
    single_s = time.perf_counter() - t
    parted = robustness_exact(G, partitions=4, threads=1)
    farmed = robustness_exact(G, partitions=8, threads=max(threads, 2))
    same = single.to_dict() == parted.to_dict() == farmed.to_dict()
    ok = same and single_s <= 60 and single.permutations_examined == 362879
    detail = f"gamma={single.gamma_exact} over {single.permutations_examined} perms in {single_s:.2f}s single-threaded, partitioned reports identical={same}"
    return ok, detail, {"seed": seed, "single_seconds": single_s, "report": single.to_dict()}


def gadget_desk_check(threads: int = 1):
    M = ColoredMultiGraph(2, ((1, 1, 1), (2, 2, 2), (1, 2, 3)))
    check_eligible(M)
    gamma = colored_robustness_exact(M).gamma_exact
    k = 6
    gadgets = find_gadgets(4, 3, k, seed=0)
    G, layout = gadgetize(M, gadgets, with_layout=True)
    blocks = [[list(range(o + 1, o + s + 1)) for o, s in zip(layout.offsets, layout.sizes)]]
    rep = robustness_adversarial(G, samples=100_000, seed=0, blocks=blocks)
    bound = gamma / (3 * k)
    ok = G.n == 20 and gamma > 0 and rep.gamma_upper >= bound
    detail = f"colored gamma={gamma}, gadgetized n={G.n}, adversarial min ratio {rep.gamma_upper} vs bound {bound}"
    return ok, detail, {"gamma": str(gamma), "gamma_upper": str(rep.gamma_upper), "bound": str(bound)}


# Fixed before measuring; it is also a counterexample to the gamma/2 bound.
DIRECTED_INSTANCE = DirectedColoredMultiGraph(3, ((1, 2, 1), (2, 3, 1), (3, 1, 1), (1, 1, 2), (2, 3, 2)))


def directed_to_undirected_check(threads: int = 1):
    D = DIRECTED_INSTANCE
    rd = directed_colored_robustness_exact(D)
    U = directed_to_undirected(D)
    ru = colored_robustness_exact(U)
    ok = rd.gamma_exact > 0 and ru.gamma_exact >= rd.gamma_exact / 2
    detail = (
        f"directed gamma={rd.gamma_exact}, undirected gamma'={ru.gamma_exact} on {U.n} vertices, "
        f"needs >= {rd.gamma_exact / 2}; witness {ru.witness.images}"
    )
    return ok, detail, {"gamma": str(rd.gamma_exact), "gamma_prime": str(ru.gamma_exact), "witness": list(ru.witness.images)}


def schreier_check(threads: int = 1):
    out = {}
    ok = True
    parts = []
    for p in (5, 7):
        P = sl2_projective_perms(p, (M1, M2))
        rep = check_sufficient_condition(P, exact_expansion_limit=30, samples=5000, seed=0)
        sec = rep.secondary
        connected = secondary_graph(P).underlying_simple().is_connected()
        if sec.mode == "exact":
            exp_pos = sec.gamma_combinatorial > 0
            exp_str = str(sec.gamma_combinatorial)
        else:
            exp_pos = sec.gamma_lower is not None and sec.gamma_lower > 0
            exp_str = f"[{sec.gamma_lower:.4f}, {sec.gamma_upper}]"
        prim = rep.primary.gamma_exact
        this = prim is not None and prim > 0 and connected and exp_pos and rep.inequality_holds is True
        ok &= this
        parts.append(f"p={p}: primary gamma={prim}, secondary expansion {exp_str}, inequality {rep.inequality_holds}")
        out[p] = rep.to_dict()
    return ok, "; ".join(parts), out


# ------------------------------------------------------------------ 6-8


def three_step_check(threads: int = 1):
    params = build_three_step(56, 7, 3, seed=0)
    G = assemble(params)
    size = 2 * params.ell
    comps = [G.induced(list(params.block(i))) for i in range(1, params.components + 1)]
    distinct = all(not is_isomorphic(a, b) for a, b in itertools.combinations(comps, 2))
    so, msg = componentwise_self_ordered(G, size)
    blocks = [[list(params.block(i)) for i in range(1, params.components + 1)]]
    rep = robustness_adversarial(G, samples=100_000, seed=0, blocks=blocks)
    ok = distinct and so and rep.gamma_upper >= Fraction(1, 10)
    detail = f"n={G.n}, components pairwise non-isomorphic={distinct}, self-ordered={so}, adversarial gamma_upper={rep.gamma_upper}"
    return ok, detail, {"message": msg, "gamma_upper": str(rep.gamma_upper), "params": params.to_dict()}


def local_round_trip(threads: int = 1, copies: int = 100):
    params = build_three_step(1024, 16, 3, seed=1, local_code=True)
    aug = augment_for_local_ordering(assemble(params), seed=0)
    n = params.n
    budget = DEFAULT_QUERY_CONSTANT * params.ell ** 3
    worst = 0
    bad = 0
    calls = 0
    for c in range(copies):
        oracle, mu = permuted_oracle(aug.graph, seed=c)
        inv = mu.inverse()
        orderer = LocalOrderer(oracle, params, aug)
        rng = np.random.default_rng(10_000 + c)
        x = int(rng.integers(1, n + 1))
        v = mu(x)
        if orderer.order_any(v) != x:
            bad += 1
        worst = max(worst, orderer.last_queries)
        g = int(rng.integers(n + 1, aug.graph.n + 1))
        if orderer.order_any(mu(g)) != g:
            bad += 1
        worst = max(worst, orderer.last_queries)
        i = int(rng.integers(1, n + 1))
        w = orderer.reverse(i, v)
        if inv(w) != i or orderer.order_any(w) != i:
            bad += 1
        worst = max(worst, orderer.last_queries)
        j = int(rng.integers(n + 1, aug.graph.n + 1))
        if inv(orderer.reverse_any(j, v)) != j:
            bad += 1
        worst = max(worst, orderer.last_queries)
        calls += 4
    ok = bad == 0 and worst <= budget
    detail = f"{copies} permuted copies of a {aug.graph.n}-vertex graph, {calls} calls, {bad} wrong, max queries {worst} <= C*ell^3 = {budget} (C={DEFAULT_QUERY_CONSTANT})"
    return ok, detail, {"query_constant": DEFAULT_QUERY_CONSTANT, "ell": params.ell, "max_queries": worst, "budget": budget, "wrong": bad}


def permutation_collection_check(threads: int = 1):
    C = make_small_code(6, 0.5, seed=0)
    perms = [code_based_perm(C, i) for i in range(1, C.size + 1)]
    words = C.all_codewords()
    exact = True
    far = True
    for a, b in itertools.combinations(range(C.size), 2):
        d = perm_distance(perms[a], perms[b])
        exact &= d == 2 * hamming(words[a], words[b])
        far &= d >= 2 * C.min_distance
    ok = exact and far and C.verified and len(perms) == 64
    detail = f"64 permutations on {2 * C.L} points, code distance {C.min_distance} (verified={C.verified}), distance = 2*hamming {exact}, all >= {2 * C.min_distance} {far}"
    return ok, detail, {"code": C.to_dict()}


# ------------------------------------------------------------------ 9-12


def quasi_orthogonality_check(threads: int = 1):
    e2 = quasi_orthogonality_error(inner_product_table(2).table)
    B = small_bias_bipartite(4)
    eb = quasi_orthogonality_error(B.table)
    ok = e2 == Fraction(1, 6) and B.table.shape == (15, 63) and eb <= Fraction(3, 10)
    return ok, f"inner product on 2 bits: {e2}; small-bias bipartite {B.table.shape}: {eb}", {"e2": str(e2), "eb": str(eb)}


def nme_check(threads: int = 1):
    F6 = search_small_nmE(6, 0.35, seed=0)
    F4 = search_small_nmE(4, 0.45, seed=0)
    G4 = nmE_graph(F4)
    g4 = robustness_exact(G4).gamma_exact
    F7 = search_small_nmE(7, 0.4, seed=0, mode="sampled", samples=500)
    T = tri_graph(F7, small_bias_bipartite(3))
    rt = robustness_adversarial(T, samples=20_000, seed=0)
    ok = F6.eps_qo <= Fraction(35, 100) and F6.eps_nm <= Fraction(35, 100) and g4 > 0 and T.n == 45 and rt.gamma_upper >= 1
    detail = f"N=6 table qo={F6.eps_qo} nm={F6.eps_nm}; nmE graph on {G4.n} vertices gamma={g4}; tri graph on {T.n} vertices gamma_upper={rt.gamma_upper}"
    return ok, detail, {"F6": F6.to_dict(), "gamma_nmE": str(g4), "gamma_upper_tri": str(rt.gamma_upper)}


def reversal_appendix_check(threads: int = 1):
    F6 = search_small_nmE(6, 0.35, seed=0)
    rep = reversal_check(F6, slack=0.1)
    rng = np.random.default_rng(0)
    dists = []
    for _ in range(5):
        E = rng.integers(0, 2, (4, 8)).astype(np.uint8)
        dists.append(appendix_counterexample(E, samples=500).one_sided_distance)
    ok = rep.holds is True and all(d == Fraction(1, 2) for d in dists)
    detail = f"reversal eps={rep.eps_restricted} nm={rep.nm_error} bound={rep.bound:.3f} holds={rep.holds}; appendix distances {[str(d) for d in dists]}"
    return ok, detail, {"reversal": {"eps": str(rep.eps_restricted), "nm": str(rep.nm_error), "bound": rep.bound}}


def _corrupt_signature(E, c: int) -> Graph:
    """Flip one edge at an S1 vertex: drop a pair edge (even c) or add an R2 edge (odd c)."""
    u = 1 + c % E.s
    edges = set(E.graph.edges)
    if c % 2 == 0:
        t = next(t for t, pr in enumerate(E.s1_pairs, start=1) if u in pr)
        edges.discard((u, E.m + t))
    else:
        edges.add((u, E.m + E.ell + 1 + c))
    return Graph(E.graph.n, tuple(sorted(edges)))


def efficient_so_check(threads: int = 1):
    E = efficient_so_graph(100, 9, seed=0)
    wrong = 0
    for seed in range(50):
        mu = Permutation.random(E.graph.n, np.random.default_rng(seed))
        phi = recover_ordering(apply_permutation(E.graph, mu), E)
        wrong += phi.images != mu.inverse().images
    rejected = 0
    for c in range(10):
        bad = _corrupt_signature(E, c)
        mu = Permutation.random(bad.n, np.random.default_rng(100 + c))
        try:
            recover_ordering(apply_permutation(bad, mu), E)
        except DenseError:
            rejected += 1
    ok = wrong == 0 and rejected == 10
    detail = f"{E.graph.n} vertices, 50 permuted copies with {wrong} wrong recoveries, {rejected}/10 corruptions rejected"
    return ok, detail, {"wrong": wrong, "rejected": rejected}


# ------------------------------------------------------------------ 13-15


def reductions_check(threads: int = 1):
    G6 = enumerate_asymmetric(6)[0]
    bd_ok = True
    for idx, s in enumerate(itertools.product((0, 1), repeat=6)):
        enc = encode_string_bd(s, G6)
        bd_ok &= decode_graph_bd(enc, G6) == list(s)
        mu = Permutation.random(enc.n, np.random.default_rng(idx))
        bd_ok &= decode_graph_bd(apply_permutation(enc, mu), G6) == list(s)
    params = build_three_step(48, 12, 3, seed=0, local_code=True)
    aug = augment_for_local_ordering(assemble(params), seed=0)
    rng = np.random.default_rng(1)
    local_ok = True
    for t in range(2):
        s = rng.integers(0, 2, aug.graph.n).tolist()
        enc = encode_string_bd(s, aug.graph)
        mu = Permutation.random(enc.n, np.random.default_rng(50 + t))
        local_ok &= decode_graph_bd(apply_permutation(enc, mu), aug.graph, mode="local", params=params, augmented=aug) == s
    Gm, _ = _first_asymmetric_dense(6)
    Gbig, _ = _first_asymmetric_dense(294)
    dense_ok = True
    for t in range(3):
        S = rng.integers(0, 2, (6, 6)).astype(np.uint8)
        enc = encode_string_dense(S, Gm, Gbig)
        dense_ok &= np.array_equal(decode_graph_dense(enc, Gm, Gbig), S)
        mu = Permutation.random(enc.n, np.random.default_rng(70 + t))
        dense_ok &= np.array_equal(decode_graph_dense(apply_permutation(enc, mu), Gm, Gbig), S)
    s = rng.integers(0, 2, 6).tolist()
    ad = query_adapter_bd(lambda i: s[i - 1], G6)
    for _ in range(1000):
        u, v = (int(x) for x in rng.integers(1, 19, 2))
        if rng.random() < 0.5:
            ad.adjacent(u, v)
        else:
            ad.neighbors(u)
    log = ad.log
    adapter_ok = log.string_queries <= log.graph_queries and all(
        e["string_queries"] == (1 if e["gadget_pair"] else 0) for e in log.events
    )
    bases = [Graph.from_edges(n, [(i, i + 1) for i in range(1, n)]) for n in range(1, 7)] + [G6]
    ident_ok = all(restricted_distance_identity(B) for B in bases)
    ok = bd_ok and local_ok and dense_ok and adapter_ok and ident_ok
    detail = (
        f"bd exact round trips {bd_ok}, bd local round trips {local_ok}, dense round trips {dense_ok}, "
        f"adapter {log.string_queries} string <= {log.graph_queries} graph queries {adapter_ok}, distance identity n<=6 {ident_ok}"
    )
    return ok, detail, {"string_queries": log.string_queries, "graph_queries": log.graph_queries}


def superimpose_check(threads: int = 1):
    rng = np.random.default_rng(0)
    bad = 0
    tight = 0
    for _ in range(50):
        n = int(rng.integers(5, 9))
        G = random_dense(n, int(rng.integers(1 << 30)))
        H = Graph.from_edges(n, [tuple(int(x) + 1 for x in rng.choice(n, 2, replace=False)) for _ in range(int(rng.integers(0, n)))])
        a = robustness_exact(G).gamma_exact
        b = robustness_exact(superimpose(G, H)).gamma_exact
        bad += b < a - H.max_degree()
        tight += a - H.max_degree() > 0
    ok = bad == 0
    return ok, f"50 pairs, {bad} violations ({tight} with a positive bound)", {"violations": bad, "positive_bounds": tight}


def random_dense_check(threads: int = 1):
    small = [robustness_exact(random_dense(7, s)).gamma_exact for s in range(20)]
    pos7 = sum(g > 0 for g in small)
    big = [robustness_adversarial(random_dense(32, s), samples=10_000, seed=s).gamma_upper for s in range(20)]
    good32 = sum(g >= Fraction(32 * 5, 100) for g in big)
    ok = pos7 >= 18 and good32 >= 18
    detail = f"n=7: {pos7}/20 seeds with gamma>0 (need 18); n=32: {good32}/20 seeds with gamma_upper >= 1.6 (smallest {min(big)})"
    return ok, detail, {"n7_positive": pos7, "n32_good": good32}


CRITERIA: list[tuple[int, str, float, Check]] = [
    (1, "asymmetry frontier", 10, asymmetry_frontier),
    (2, "exact robustness at n=9", 60, exact_oracle_n9),
    (3, "gadget desk check", 120, gadget_desk_check),
    (4, "directed to undirected", 30, directed_to_undirected_check),
    (5, "Schreier graphs p=5,7", 300, schreier_check),
    (6, "three-step assembly", 300, three_step_check),
    (7, "local ordering round trip", 120, local_round_trip),
    (8, "code-based permutations", 5, permutation_collection_check),
    (9, "quasi-orthogonality", 5, quasi_orthogonality_check),
    (10, "two-source search and graphs", 600, nme_check),
    (11, "reversal and counterexample", 120, reversal_appendix_check),
    (12, "dense ordering recovery", 300, efficient_so_check),
    (13, "reductions", 120, reductions_check),
    (14, "superimposing", 300, superimpose_check),
    (15, "random dense graphs", 300, random_dense_check),
]


def run_criterion(number: int, threads: int = 1) -> CriterionResult:
    _, name, budget, fn = CRITERIA[number - 1]
    t = time.perf_counter()
    try:
        ok, detail, data = fn(threads)
    except (DecodeError, DenseError, ValueError) as exc:
        ok, detail, data = False, f"error: {exc}", {}
    secs = time.perf_counter() - t
    if secs > budget:
        ok = False
        detail += "; over budget"
    return CriterionResult(number, name, bool(ok), detail, secs, budget, data)


def run_all(numbers=None, threads: int = 1, progress: Callable[[CriterionResult], None] | None = None) -> list[CriterionResult]:
    out = []
    for num, *_ in CRITERIA:
        if numbers and num not in numbers:
            continue
        r = run_criterion(num, threads)
        if progress:
            progress(r)
        out.append(r)
    return out
