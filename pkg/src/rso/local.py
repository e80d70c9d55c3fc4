"""Local self-ordering of three-step graphs from neighbor-oracle access.

Two access modes are supported. In plain mode the oracle answers for a
relabeled copy of the assembled graph itself. In augmented mode it answers for
a relabeled copy of the graph produced by augment_for_local_ordering, where the
assembled graph and a path-finder graph are superimposed with distinct colors
and every colored edge is replaced by a small asymmetric gadget.
"""
from __future__ import annotations

import bisect
import itertools
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .graph import ColoredMultiGraph, Graph, GraphError, LocalGraphOracle, Permutation
from .iso import find_isomorphism, is_isomorphic
from .permutations import CollectionError, codeword_of_perm
from .threestep import PathFinder, ThreeStepParams
from .transforms import GadgetLayout, GadgetSet, eligibility_pass, find_gadgets, gadgetize

DEFAULT_QUERY_CONSTANT = 16
GADGET_SIZE = 6


class LocalOrderError(GraphError):
    """The explored neighborhood is inconsistent with the expected graph."""


def _pair_bit(a: int, b: int, k: int = GADGET_SIZE) -> int:
    a, b = min(a, b), max(a, b)
    return 1 << (a * k - a * (a + 1) // 2 + (b - a - 1))


def _mask(edges, k: int = GADGET_SIZE) -> int:
    m = 0
    for a, b in edges:
        m |= _pair_bit(a, b, k)
    return m


def _open_gadget(g: Graph, e: tuple[int, int]) -> list[tuple[int, int]]:
    return [(a - 1, b - 1) for a, b in g.edges if (a, b) != e]


def _pick_gadgets(count: int, seed: int, attempts: int = 50) -> GadgetSet:
    """Gadgets whose copies (gadget minus designated edge) are pairwise non-isomorphic."""
    for t in range(attempts):
        gs = find_gadgets(4, count, GADGET_SIZE, seed + t)
        opened = [Graph.from_edges(GADGET_SIZE, [(a + 1, b + 1) for a, b in _open_gadget(g, e)]) for g, e in zip(gs.gadgets, gs.designated)]
        if not any(is_isomorphic(x, y) for x, y in itertools.combinations(opened, 2)):
            return gs
    raise GraphError("no gadget family with distinguishable copies found")


@dataclass(frozen=True)
class AugmentedGraph:
    """Gadgetized superposition of an assembled graph (first color) and a path finder."""

    graph: Graph
    base_n: int
    multigraph: ColoredMultiGraph
    gadgets: GadgetSet
    layout: GadgetLayout
    pathfinder: PathFinder
    d: int

    @property
    def base_color(self) -> int:
        return 1

    @property
    def path_colors(self) -> tuple[int, int]:
        return (2, self.d + 2)

    @property
    def loop_color(self) -> int:
        return 2 * self.d + 1

    @property
    def gadget_max_degree(self) -> int:
        return max(g.max_degree() for g in self.gadgets.gadgets)

    @cached_property
    def copy_lookup(self) -> dict[int, int]:
        """Adjacency bitmask of any relabeled gadget copy -> the color it encodes."""
        out: dict[int, int] = {}
        for col, g, e in zip(self.gadgets.colors, self.gadgets.gadgets, self.gadgets.designated):
            edges = _open_gadget(g, e)
            for sigma in itertools.permutations(range(GADGET_SIZE)):
                m = _mask((sigma[a], sigma[b]) for a, b in edges)
                if out.setdefault(m, col) != col:
                    raise GraphError("gadget copies of two colors coincide")
        return out

    def base_subgraph(self) -> Graph:
        return Graph.from_edges(self.base_n, [(u, v) for u, v, c in self.multigraph.edges if c == self.base_color])


def augment_for_local_ordering(G_n: Graph, seed: int = 0) -> AugmentedGraph:
    """Superimpose G_n (color 1) with a padded path finder (color 2), make the
    result eligible and replace every colored edge by a 6-vertex gadget."""
    pf = PathFinder.for_size(G_n.n)
    H = pf.graph
    M = ColoredMultiGraph(G_n.n, tuple((u, v, 1) for u, v in G_n.edges) + tuple((u, v, 2) for u, v in H.edges))
    d = max(1, M.max_degree())
    E = eligibility_pass(M, d, 2)
    gs = _pick_gadgets(4, seed).recolored((1, 2, d + 2, 2 * d + 1))
    out, layout = gadgetize(E, gs, with_layout=True)
    aug = AugmentedGraph(out, G_n.n, E, gs, layout, pf, d)
    if min(int(x) for x in E.degrees) <= aug.gadget_max_degree:
        raise GraphError("original vertices are not separable from gadget vertices by degree")
    aug.copy_lookup  # fail early on ambiguous copies
    return aug


# ------------------------------------------------------------------ views


class _PlainView:
    def __init__(self, oracle: LocalGraphOracle):
        self.oracle = oracle
        self._nb: dict[int, list[int]] = {}

    def nb(self, v: int) -> list[int]:
        r = self._nb.get(v)
        if r is None:
            r = self._nb[v] = self.oracle.neighbors(v)
        return r

    def is_original(self, v: int) -> bool:
        return True

    def base_neighbors(self, v: int) -> list[int]:
        return self.nb(v)

    def path_neighbors(self, v: int) -> list[int]:
        raise LocalOrderError("reversed ordering needs an augmented oracle")


class _AugmentedView(_PlainView):
    def __init__(self, oracle: LocalGraphOracle, aug: AugmentedGraph):
        super().__init__(oracle)
        self.aug = aug
        self._threshold = aug.gadget_max_degree
        self._copy: dict[int, tuple[int, tuple[int, ...]]] = {}
        self.copy_attach: dict[int, tuple[tuple[int, int], ...]] = {}
        self.copy_verts: dict[int, tuple[int, ...]] = {}
        self._typed: dict[int, dict[int, list[int]]] = {}

    def is_original(self, v: int) -> bool:
        return len(self.nb(v)) > self._threshold

    def _explore_copy(self, w: int) -> tuple[int, tuple[int, ...]]:
        hit = self._copy.get(w)
        if hit is not None:
            return hit
        seen = {w}
        queue = deque([w])
        ends: list[int] = []
        attach: list[tuple[int, int]] = []
        while queue:
            x = queue.popleft()
            for y in self.nb(x):
                if self.is_original(y):
                    ends.append(y)
                    attach.append((x, y))
                elif y not in seen:
                    seen.add(y)
                    queue.append(y)
                    if len(seen) > GADGET_SIZE:
                        raise LocalOrderError(f"gadget copy at {w} exceeds {GADGET_SIZE} vertices")
        if len(seen) != GADGET_SIZE or len(ends) != 2:
            raise LocalOrderError(f"malformed gadget copy at vertex {w}")
        verts = sorted(seen)
        pos = {v: i for i, v in enumerate(verts)}
        m = 0
        for v in verts:
            for y in self.nb(v):
                if y in pos and pos[y] > pos[v]:
                    m |= _pair_bit(pos[v], pos[y])
        col = self.aug.copy_lookup.get(m)
        if col is None:
            raise LocalOrderError(f"gadget copy at vertex {w} matches no known gadget")
        res = (col, tuple(ends))
        for v in verts:
            self._copy[v] = res
            self.copy_attach[v] = tuple(attach)
            self.copy_verts[v] = tuple(verts)
        return res

    def typed(self, v: int) -> dict[int, list[int]]:
        hit = self._typed.get(v)
        if hit is not None:
            return hit
        if not self.is_original(v):
            raise LocalOrderError(f"vertex {v} is a gadget vertex")
        out: dict[int, list[int]] = {}
        seen_copies = set()
        for w in self.nb(v):
            if self.is_original(w):
                raise LocalOrderError(f"original vertices {v} and {w} are adjacent")
            col, ends = self._explore_copy(w)
            key = (col, ends, id(self._copy[w]))
            if key in seen_copies:
                continue
            seen_copies.add(key)
            if col == self.aug.loop_color:
                if ends != (v, v):
                    raise LocalOrderError(f"loop gadget at {v} attaches elsewhere")
                continue
            other = ends[1] if ends[0] == v else ends[0]
            out.setdefault(col, []).append(other)
        self._typed[v] = out
        return out

    def base_neighbors(self, v: int) -> list[int]:
        return sorted(self.typed(v).get(self.aug.base_color, []))

    def path_neighbors(self, v: int) -> list[int]:
        t = self.typed(v)
        return sorted(x for c in self.aug.path_colors for x in t.get(c, []))


# ------------------------------------------------------------------ orderer


@dataclass
class LocalOrderer:
    """phi(v) for the oracle's graph, where phi maps it onto the assembled graph.

    Components are explored once and cached; `last_queries` holds the oracle
    queries spent by the most recent call.
    """

    oracle: LocalGraphOracle
    params: ThreeStepParams
    augmented: AugmentedGraph | None = None
    query_constant: int = DEFAULT_QUERY_CONSTANT
    last_queries: int = 0
    _phi: dict[int, int] = field(default_factory=dict)
    _view: _PlainView | None = None

    def __post_init__(self):
        if not self.params.regular:
            raise LocalOrderError("local ordering needs regular base graphs (even ell)")
        self._view = _PlainView(self.oracle) if self.augmented is None else _AugmentedView(self.oracle, self.augmented)
        self._by_perm = {p.images: i for i, p in enumerate(self.params.perms, start=1)}

    @property
    def budget(self) -> int:
        return self.query_constant * self.params.ell ** 3

    def __call__(self, v: int) -> int:
        start = self.oracle.queries
        try:
            return self._order(v)
        finally:
            self.last_queries = self.oracle.queries - start

    def _order(self, v: int) -> int:
        hit = self._phi.get(v)
        if hit is not None:
            return hit
        view = self._view
        if not view.is_original(v):
            raise LocalOrderError(f"vertex {v} is not a vertex of the assembled graph")
        ell = self.params.ell
        size = 2 * ell
        comp = {v}
        queue = deque([v])
        adj: dict[int, list[int]] = {}
        while queue:
            x = queue.popleft()
            adj[x] = view.base_neighbors(x)
            for y in adj[x]:
                if y not in comp:
                    comp.add(y)
                    queue.append(y)
                    if len(comp) > size:
                        raise LocalOrderError(f"component of {v} exceeds {size} vertices")
        if len(comp) != size:
            raise LocalOrderError(f"component of {v} has {len(comp)} vertices, expected {size}")
        dp, dpp = self.params.dprime + 1, self.params.ddprime + 1
        A = sorted(x for x in comp if len(adj[x]) == dp)
        B = sorted(x for x in comp if len(adj[x]) == dpp)
        if len(A) != ell or len(B) != ell:
            raise LocalOrderError(f"degree split of the component of {v} is {len(A)}/{len(B)}")
        psi_a = self._align(A, adj, self.params.g_prime)
        psi_b = self._align(B, adj, self.params.g_dprime)
        inB = set(B)
        images = [0] * ell
        for a in A:
            partners = [y for y in adj[a] if y in inB]
            if len(partners) != 1:
                raise LocalOrderError(f"vertex {a} has {len(partners)} matching partners")
            images[psi_a[a] - 1] = psi_b[partners[0]]
        try:
            pi = Permutation(tuple(images))
        except GraphError:
            raise LocalOrderError("matching does not induce a permutation") from None
        idx = self._component_index(pi)
        base = (idx - 1) * size
        for a in A:
            self._phi[a] = base + psi_a[a]
        for b in B:
            self._phi[b] = base + ell + psi_b[b]
        return self._phi[v]

    @staticmethod
    def _align(part: list[int], adj: dict[int, list[int]], target: Graph) -> dict[int, int]:
        pos = {x: i for i, x in enumerate(part, start=1)}
        edges = [(pos[x], pos[y]) for x in part for y in adj[x] if y in pos and pos[x] < pos[y]]
        H = Graph(len(part), tuple(sorted(edges)))
        phi = find_isomorphism(H, target)
        if phi is None:
            raise LocalOrderError("component half is not isomorphic to its base graph")
        return {x: phi(pos[x]) for x in part}

    def _component_index(self, pi: Permutation) -> int:
        code = self.params.code
        if code is None:
            idx = self._by_perm.get(pi.images)
            if idx is None:
                raise LocalOrderError("matching permutation is not in the collection")
            return idx
        try:
            word = codeword_of_perm(pi)
        except CollectionError as exc:
            raise LocalOrderError(str(exc)) from None
        idx = code.decode(word)
        if idx is None or idx > self.params.components:
            raise LocalOrderError("matching does not decode to a component index")
        return idx

    def order_any(self, v: int) -> int:
        """Like calling the orderer, but gadget vertices of an augmented oracle are placed too."""
        if self.augmented is None:
            return self(v)
        start = self.oracle.queries
        try:
            hit = self._phi.get(v)
            if hit is not None:
                return hit
            if self._view.is_original(v):
                return self._order(v)
            self._place_copy(v)
            return self._phi[v]
        finally:
            self.last_queries = self.oracle.queries - start

    def _place_copy(self, w: int) -> None:
        aug = self.augmented
        view = self._view
        col, _ = view._explore_copy(w)
        verts = view.copy_verts[w]
        attach = view.copy_attach[w]
        (xa, ya), (xb, yb) = attach
        a, b = self._order(ya), self._order(yb)
        if a > b:
            (xa, a), (xb, b) = (xb, b), (xa, a)
        key = (a, b, col)
        j = self._edge_index.get(key)
        if j is None:
            raise LocalOrderError(f"no colored edge {key} in the augmented multigraph")
        g, (p, q) = aug.gadgets.for_color(col)
        pos = {x: t for t, x in enumerate(verts, start=1)}
        obs = Graph(len(verts), tuple(sorted((pos[x], pos[y]) for x in verts for y in view.nb(x) if y in pos and pos[x] < pos[y])))
        opened = Graph(g.n, tuple(e for e in g.edges if e != (p, q)))
        ca = [0] * len(verts)
        cb = [0] * g.n
        if a == b:
            ca[pos[xa] - 1] = ca[pos[xb] - 1] = 1
            cb[p - 1] = cb[q - 1] = 1
        else:
            ca[pos[xa] - 1], ca[pos[xb] - 1] = 1, 2
            cb[p - 1], cb[q - 1] = 1, 2
        sigma = find_isomorphism(obs, opened, ca, cb)
        if sigma is None:
            raise LocalOrderError(f"gadget copy at {w} does not match its gadget")
        off = aug.layout.offsets[j]
        for x in verts:
            self._phi[x] = off + sigma(pos[x])

    @cached_property
    def _edge_index(self) -> dict[tuple[int, int, int], int]:
        return {e: j for j, e in enumerate(self.augmented.multigraph.edges)}

    def reverse_any(self, i: int, s: int) -> int:
        """Preimage of any vertex i of the augmented graph, walking from the original vertex s."""
        aug = self.augmented
        if aug is None or i <= aug.base_n:
            return self.reverse(i, s)
        start = self.oracle.queries
        try:
            if i > aug.graph.n:
                raise LocalOrderError(f"target {i} out of range")
            j = bisect.bisect_left(aug.layout.offsets, i) - 1
            u, _, col = aug.multigraph.edges[j]
            x = self.reverse(u, s)
            lo, hi = aug.layout.offsets[j], aug.layout.offsets[j] + aug.layout.sizes[j]
            for w in self._view.nb(x):
                if self._view._explore_copy(w)[0] != col:
                    continue
                if lo < self.order_any(w) <= hi:
                    for y in self._view.copy_verts[w]:
                        if self._phi[y] == i:
                            return y
            raise LocalOrderError(f"gadget copy holding {i} not found next to {x}")
        finally:
            self.last_queries = self.oracle.queries - start

    def reverse(self, i: int, s: int) -> int:
        """The oracle vertex v with phi(v) = i, found by walking a short path from s."""
        start = self.oracle.queries
        try:
            if self.augmented is None:
                raise LocalOrderError("reversed ordering needs an augmented oracle")
            if not 1 <= i <= self.params.n:
                raise LocalOrderError(f"target {i} out of range")
            path = self.augmented.pathfinder.find_path(self._order(s), i)
            x = s
            for w in path[1:]:
                for y in self._view.path_neighbors(x):
                    if self._order(y) == w:
                        x = y
                        break
                else:
                    raise LocalOrderError(f"no path-finder neighbor of {x} maps to {w}")
            return x
        finally:
            self.last_queries = self.oracle.queries - start


def local_self_order(oracle: LocalGraphOracle, params: ThreeStepParams, augmented: AugmentedGraph | None = None) -> LocalOrderer:
    return LocalOrderer(oracle, params, augmented)


def local_reversed_self_order(orderer: LocalOrderer, i: int, s: int) -> int:
    return orderer.reverse(i, s)


def permuted_oracle(G: Graph, seed: int) -> tuple[LocalGraphOracle, Permutation]:
    """Oracle for mu(G) with a seeded uniform mu, and mu itself."""
    mu = Permutation.random(G.n, np.random.default_rng(seed))
    return LocalGraphOracle.permuted(G, mu), mu
