"""Bounded-degree graphs assembled from small asymmetric pieces.

A component joins a copy of G' (on 1..ell) to a copy of G'' (on ell+1..2ell)
through the matching v -- ell + pi(v); components use pairwise far-apart
permutations pi_i, so each component is identifiable from its matching alone.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np

from .graph import ColoredMultiGraph, Graph, GraphError, Permutation
from .iso import is_isomorphic
from .permutations import (
    BinaryCode,
    code_based_perm,
    greedy_far_collection,
    make_small_code,
    verify_collection,
)
from .verify import RobustnessReport, is_self_ordered, robustness_adversarial, robustness_exact


class SearchError(GraphError):
    pass


# ------------------------------------------------------------------ generators


def random_regular_graph(n: int, d: int, rng: np.random.Generator, tries: int = 200) -> Graph | None:
    """Simple d-regular graph by random point pairing with restarts; None if every try gets stuck."""
    if d < 0 or d >= n or (n * d) % 2:
        return None
    for _ in range(tries):
        points = list(np.repeat(np.arange(1, n + 1), d))
        edges: set[tuple[int, int]] = set()
        stuck = False
        while points:
            ok = False
            for _attempt in range(50):
                i, j = rng.choice(len(points), 2, replace=False)
                u, v = points[i], points[j]
                e = (min(u, v), max(u, v))
                if u != v and e not in edges:
                    ok = True
                    break
            if not ok:
                stuck = True
                break
            edges.add(e)
            for t in sorted((i, j), reverse=True):
                points.pop(t)
        if not stuck:
            return Graph(n, tuple(sorted(edges)))
    return None


def random_bounded_graph(n: int, d: int, rng: np.random.Generator) -> Graph:
    """Random edge subset with every degree at most d."""
    pairs = list(itertools.combinations(range(1, n + 1), 2))
    order = rng.permutation(len(pairs))
    deg = [0] * (n + 1)
    edges = []
    target = int(rng.integers(n, len(pairs) + 1)) if pairs else 0
    for t in order[:target]:
        u, v = pairs[t]
        if deg[u] < d and deg[v] < d:
            edges.append((u, v))
            deg[u] += 1
            deg[v] += 1
    return Graph(n, tuple(edges))


def permutation_model_graph(n: int, d: int, seed: int) -> ColoredMultiGraph:
    """Union of d/2 uniform permutations: edges {v, pi_j(v)} colored j (loops and parallels kept)."""
    if d % 2:
        raise GraphError("permutation model needs even d")
    rng = np.random.default_rng(seed)
    edges = []
    for j in range(1, d // 2 + 1):
        pi = rng.permutation(n) + 1
        edges.extend((v, int(pi[v - 1]), j) for v in range(1, n + 1))
    return ColoredMultiGraph(n, tuple(edges))


def two_cycle_matching_graph(m: int, dprime: int, seed: int) -> ColoredMultiGraph:
    """Cycles on 1..m (color 1) and m+1..2m (color 2) joined by dprime seeded perfect matchings (color j+2)."""
    if m < 3:
        raise GraphError("cycles need m >= 3")
    rng = np.random.default_rng(seed)
    edges = [(v, v % m + 1, 1) for v in range(1, m + 1)]
    edges += [(m + v, m + v % m + 1, 2) for v in range(1, m + 1)]
    for j in range(1, dprime + 1):
        pi = rng.permutation(m)
        edges.extend((v, m + 1 + int(pi[v - 1]), j + 2) for v in range(1, m + 1))
    return ColoredMultiGraph(2 * m, tuple(edges))


def find_rso_small(
    ell: int,
    d: int,
    seed: int,
    budget: int = 2000,
    exact: bool = True,
    regular: bool = True,
    gamma_min: Fraction = Fraction(0),
    samples: int = 20000,
    avoid: Sequence[Graph] = (),
) -> tuple[Graph, RobustnessReport]:
    """First seeded candidate that is connected, asymmetric and robust beyond gamma_min.

    Regular mode draws d-regular graphs; otherwise candidates have maximum
    degree exactly d. Robustness is exact for ell <= 9 when `exact` is set.
    """
    if regular and (ell * d) % 2:
        raise SearchError(f"no {d}-regular graph on {ell} vertices")
    rng = np.random.default_rng(seed)
    for _ in range(budget):
        g = random_regular_graph(ell, d, rng, tries=20) if regular else random_bounded_graph(ell, d, rng)
        if g is None or not g.is_connected() or g.max_degree() != d:
            continue
        if not is_self_ordered(g)[0]:
            continue
        if any(h.n == g.n and is_isomorphic(g, h) for h in avoid):
            continue
        if exact and ell <= 9:
            rep = robustness_exact(g)
            gamma = rep.gamma_exact
        else:
            rep = robustness_adversarial(g, samples=samples, seed=seed)
            gamma = rep.gamma_upper
        if gamma > gamma_min:
            return g, rep
    raise SearchError(f"budget {budget} exhausted without a robust asymmetric graph on {ell} vertices")


# ------------------------------------------------------------------ assembly


@dataclass(frozen=True)
class ThreeStepParams:
    n: int
    ell: int
    dprime: int
    g_prime: Graph
    g_dprime: Graph
    perms: tuple[Permutation, ...]
    code: BinaryCode | None = None
    seed: int = 0
    delta: float = 0.5

    def __post_init__(self):
        if self.n % (2 * self.ell):
            raise GraphError(f"2*ell={2 * self.ell} does not divide n={self.n}")
        if self.g_prime.n != self.ell or self.g_dprime.n != self.ell:
            raise GraphError("base graphs must have ell vertices")
        if len(self.perms) != self.components:
            raise GraphError(f"need {self.components} permutations, got {len(self.perms)}")

    @property
    def components(self) -> int:
        return self.n // (2 * self.ell)

    @property
    def ddprime(self) -> int:
        return self.dprime + 1

    @property
    def regular(self) -> bool:
        return bool(np.all(self.g_prime.degrees == self.dprime) and np.all(self.g_dprime.degrees == self.ddprime))

    def perm(self, i: int) -> Permutation:
        if not 1 <= i <= self.components:
            raise GraphError(f"component index {i} out of range")
        if self.code is not None:
            return code_based_perm(self.code, i)
        return self.perms[i - 1]

    def block(self, i: int) -> range:
        return range((i - 1) * 2 * self.ell + 1, i * 2 * self.ell + 1)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "ell": self.ell,
            "dprime": self.dprime,
            "g_prime": [list(e) for e in self.g_prime.edges],
            "g_dprime": [list(e) for e in self.g_dprime.edges],
            "perms": [list(p.images) for p in self.perms],
            "code": None if self.code is None else self.code.to_dict(),
            "seed": self.seed,
            "delta": self.delta,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ThreeStepParams":
        ell = int(doc["ell"])
        return cls(
            n=int(doc["n"]),
            ell=ell,
            dprime=int(doc["dprime"]),
            g_prime=Graph(ell, tuple(tuple(e) for e in doc["g_prime"])),
            g_dprime=Graph(ell, tuple(tuple(e) for e in doc["g_dprime"])),
            perms=tuple(Permutation(tuple(p)) for p in doc["perms"]),
            code=None if doc.get("code") is None else BinaryCode.from_dict(doc["code"]),
            seed=int(doc.get("seed", 0)),
            delta=float(doc.get("delta", 0.5)),
        )


def build_three_step(
    n: int,
    ell: int,
    dprime: int,
    seed: int,
    local_code: bool = False,
    delta: float = 0.5,
    samples: int = 20000,
    budget: int = 2000,
) -> ThreeStepParams:
    """Search base graphs and permutations for an n-vertex three-step graph.

    Even ell gives regular base graphs (degrees dprime and dprime+1); odd ell
    falls back to maximum degrees dprime and dprime+1. `local_code` keys the
    permutations to a binary linear code of length ell/2.
    """
    if n % (2 * ell):
        raise GraphError(f"2*ell={2 * ell} does not divide n={n}")
    comps = n // (2 * ell)
    s1, s2, s3 = (int(x) for x in np.random.SeedSequence(seed).generate_state(3))
    regular = ell % 2 == 0
    gp, _ = find_rso_small(ell, dprime, s1, budget=budget, regular=regular, samples=samples)
    gpp, _ = find_rso_small(ell, dprime + 1, s2, budget=budget, regular=regular, samples=samples, avoid=(gp,))
    code = None
    if local_code:
        if ell % 2:
            raise GraphError("code-based permutations need even ell")
        k = max(1, math.ceil(math.log2(comps)))
        code = make_small_code(k, k / (ell // 2), s3, length=ell // 2)
        perms = tuple(code_based_perm(code, i) for i in range(1, comps + 1))
    else:
        perms = tuple(greedy_far_collection(ell, comps, delta, s3))
    return ThreeStepParams(n, ell, dprime, gp, gpp, perms, code, seed, delta)


def component_graph(gp: Graph, gpp: Graph, pi: Permutation) -> Graph:
    ell = gp.n
    if gpp.n != ell or pi.n != ell:
        raise GraphError("component pieces disagree on ell")
    edges = list(gp.edges)
    edges += [(u + ell, v + ell) for u, v in gpp.edges]
    edges += [(v, ell + pi(v)) for v in range(1, ell + 1)]
    return Graph(2 * ell, tuple(sorted(edges)))


def perm_threshold(params: ThreeStepParams) -> int:
    if params.code is not None:
        return 2 * params.code.min_distance
    return math.ceil(params.delta * params.ell - 1e-12)


def assemble(params: ThreeStepParams) -> Graph:
    """Disjoint union of component_graph(G', G'', pi_i) on consecutive 2ell-blocks."""
    perms = [params.perm(i) for i in range(1, params.components + 1)]
    verify_collection(perms, perm_threshold(params))
    edges = []
    size = 2 * params.ell
    for i, pi in enumerate(perms):
        comp = component_graph(params.g_prime, params.g_dprime, pi)
        edges.extend((u + i * size, v + i * size) for u, v in comp.edges)
    return Graph(params.n, tuple(sorted(edges)))


def local_neighbors(params: ThreeStepParams, v: int) -> list[int]:
    """Neighbors of v in the assembled graph, from the block index, base graphs and C(i) only."""
    if params.code is None:
        raise GraphError("local neighbor computation needs code-based permutations")
    if not 1 <= v <= params.n:
        raise GraphError(f"vertex {v} out of range")
    ell = params.ell
    i, j = divmod(v - 1, 2 * ell)
    base = i * 2 * ell
    pi = code_based_perm(params.code, i + 1)
    if j < ell:
        out = [base + u for u in params.g_prime.neighbors(j + 1)] + [base + ell + pi(j + 1)]
    else:
        out = [base + ell + u for u in params.g_dprime.neighbors(j + 1 - ell)]
        out.append(base + pi.inverse()(j + 1 - ell))
    return sorted(out)


def componentwise_self_ordered(G: Graph, size: int) -> tuple[bool, str]:
    """Asymmetry of a graph made of equal-size blocks: each block asymmetric and blocks pairwise non-isomorphic."""
    if G.n % size:
        return False, "size does not divide n"
    blocks = [list(range(s + 1, s + size + 1)) for s in range(0, G.n, size)]
    comps = sorted(sorted(c) for c in G.components())
    if comps != blocks:
        return False, "connected components differ from the blocks"
    parts = [G.induced(b) for b in blocks]
    for i, H in enumerate(parts, start=1):
        ok, aut = is_self_ordered(H)
        if not ok:
            return False, f"component {i} has automorphism {aut.images}"
    for i, j in itertools.combinations(range(len(parts)), 2):
        if is_isomorphic(parts[i], parts[j]):
            return False, f"components {i + 1} and {j + 1} are isomorphic"
    return True, "ok"


def combine_graphs(G1: Graph, G2: Graph, cross: Sequence[tuple[int, int]], strict_gap: bool = True) -> Graph:
    """G1 on 1..n1, G2 on n1+1..n1+n2, plus cross edges (u in G1, v in G2 numbered within G2).

    With strict_gap, every G1 vertex must end with degree below every G2 vertex.
    """
    n1, n2 = G1.n, G2.n
    edges = list(G1.edges) + [(u + n1, v + n1) for u, v in G2.edges]
    for u, v in cross:
        if not (1 <= u <= n1 and 1 <= v <= n2):
            raise GraphError(f"cross edge ({u}, {v}) out of range")
        edges.append((u, n1 + v))
    G = Graph(n1 + n2, tuple(sorted(edges)))
    if strict_gap and n1 and n2:
        hi = int(G.degrees[:n1].max())
        lo = int(G.degrees[n1:].min())
        if hi >= lo:
            raise GraphError(f"degree gap violated: max first-part degree {hi} >= min second-part degree {lo}")
    return G


# ------------------------------------------------------------------ path finder


@dataclass(frozen=True)
class PathFinder:
    """Cycle-of-cubes graph on <x, i> (x an ell_h-bit string, i in 0..ell_h-1), padded to n vertices.

    Padding vertex v > core hangs off anchor ((v - 1) mod core) + 1.
    """

    ell_h: int
    n: int

    def __post_init__(self):
        if self.ell_h < 3:
            raise GraphError("path finder needs ell_h >= 3")
        if self.n < self.core:
            raise GraphError(f"n={self.n} below core size {self.core}")

    @classmethod
    def for_size(cls, n: int) -> "PathFinder":
        h = 3
        while (h + 1) * 2 ** (h + 1) <= n:
            h += 1
        return cls(h, n)

    @property
    def core(self) -> int:
        return self.ell_h * 2 ** self.ell_h

    def vertex(self, x: int, i: int) -> int:
        return x * self.ell_h + i + 1

    def coords(self, v: int) -> tuple[int, int]:
        return divmod(v - 1, self.ell_h)

    def anchor(self, v: int) -> int:
        return v if v <= self.core else (v - 1) % self.core + 1

    @cached_property
    def graph(self) -> Graph:
        h = self.ell_h
        edges = set()
        for x in range(2 ** h):
            for i in range(h):
                a = self.vertex(x, i)
                for b in (self.vertex(x, (i + 1) % h), self.vertex(x ^ (1 << i), i)):
                    edges.add((min(a, b), max(a, b)))
        edges.update((self.anchor(v), v) for v in range(self.core + 1, self.n + 1))
        return Graph(self.n, tuple(sorted(edges)))

    def _core_path(self, u: int, v: int) -> list[int]:
        h = self.ell_h
        (x, i), (y, j) = self.coords(u), self.coords(v)
        path = [u]
        pos = i
        for step in range(h):
            if (x ^ y) >> pos & 1:
                x ^= 1 << pos
                path.append(self.vertex(x, pos))
            if step < h - 1:
                pos = (pos + 1) % h
                path.append(self.vertex(x, pos))
        fwd = (j - pos) % h
        stepdir = 1 if fwd <= h - fwd else -1
        while pos != j:
            pos = (pos + stepdir) % h
            path.append(self.vertex(x, pos))
        return _drop_cycles(path)

    def find_path(self, u: int, v: int) -> list[int]:
        """Walk from u to v of length <= 3*ell_h (+2 when padding vertices are involved)."""
        for w in (u, v):
            if not 1 <= w <= self.n:
                raise GraphError(f"vertex {w} out of range")
        if u == v:
            return [u]
        head = [u] if u <= self.core else [u, self.anchor(u)]
        tail = [v] if v <= self.core else [self.anchor(v), v]
        mid = self._core_path(head[-1], tail[0])
        return _drop_cycles(head[:-1] + mid + tail[1:])


def _drop_cycles(path: list[int]) -> list[int]:
    out: list[int] = []
    where: dict[int, int] = {}
    for v in path:
        if v in where:
            cut = where[v]
            for w in out[cut + 1:]:
                del where[w]
            out = out[: cut + 1]
        else:
            where[v] = len(out)
            out.append(v)
    return out


def path_finder_graph(ell_h: int) -> Graph:
    return PathFinder(ell_h, ell_h * 2 ** ell_h).graph
