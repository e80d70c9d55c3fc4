"""Graph-to-graph transformations: eligibility pass, gadget de-coloring,
directed-to-undirected, regularization, superimposing and cloud degree reduction."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .graph import ColoredMultiGraph, DirectedColoredMultiGraph, Graph, GraphError
from .iso import is_isomorphic
from .verify import is_self_ordered


class TransformError(GraphError):
    pass


def eligibility_pass(M: ColoredMultiGraph, d: int, c: int) -> ColoredMultiGraph:
    """Recolor the i-th parallel copy of each pair to (i-1)*d + color and add a
    self-loop colored d*c + 1 at every vertex."""
    if M.n and M.max_degree() > d:
        raise TransformError(f"max degree {M.max_degree()} exceeds d={d}")
    if M.colors and max(M.colors) > c:
        raise TransformError(f"color {max(M.colors)} exceeds c={c}")
    seen: dict[tuple[int, int], int] = {}
    out = []
    for u, v, col in M.edges:
        i = seen.get((u, v), 0) + 1
        seen[(u, v)] = i
        out.append((u, v, (i - 1) * d + col))
    loop = d * c + 1
    out.extend((v, v, loop) for v in range(1, M.n + 1))
    return ColoredMultiGraph(M.n, tuple(out))


def check_eligible(M: ColoredMultiGraph) -> None:
    loops = {u for u, v, _ in M.edges if u == v}
    missing = [v for v in range(1, M.n + 1) if v not in loops]
    if missing:
        raise TransformError(f"vertex {missing[0]} carries no self-loop")
    seen = set()
    for u, v, c in M.edges:
        if (u, v, c) in seen:
            raise TransformError(f"parallel edges {u}-{v} share color {c}")
        seen.add((u, v, c))


def designated_edge(g: Graph) -> tuple[int, int]:
    """Lexicographically first edge whose removal keeps g connected."""
    for e in g.edges:
        rest = Graph(g.n, tuple(x for x in g.edges if x != e))
        if rest.is_connected():
            return e
    raise TransformError("every edge of the gadget is a bridge")


@dataclass(frozen=True)
class GadgetSet:
    """Gadget graphs keyed by the edge color they replace."""

    gadgets: tuple[Graph, ...]
    designated: tuple[tuple[int, int], ...]
    colors: tuple[int, ...] = ()

    def __post_init__(self):
        if not self.colors:
            object.__setattr__(self, "colors", tuple(range(1, len(self.gadgets) + 1)))
        if len(self.colors) != len(self.gadgets) or len(self.designated) != len(self.gadgets):
            raise TransformError("gadgets, designated edges and colors must align")
        if len(set(self.colors)) != len(self.colors):
            raise TransformError("duplicate color in gadget set")

    @property
    def k(self) -> int:
        return self.gadgets[0].n

    def for_color(self, color: int) -> tuple[Graph, tuple[int, int]]:
        try:
            i = self.colors.index(color)
        except ValueError:
            raise TransformError(f"no gadget for color {color}") from None
        return self.gadgets[i], self.designated[i]

    def recolored(self, colors: Sequence[int]) -> "GadgetSet":
        return GadgetSet(self.gadgets[: len(colors)], self.designated[: len(colors)], tuple(colors))

    def validate(self) -> None:
        for i, g in enumerate(self.gadgets):
            if not g.is_connected():
                raise TransformError(f"gadget {i + 1} is disconnected")
            ok, _ = is_self_ordered(g)
            if not ok:
                raise TransformError(f"gadget {i + 1} has a non-trivial automorphism")
            p, q = self.designated[i]
            if (p, q) not in g.edges:
                raise TransformError(f"gadget {i + 1}: designated pair {p}-{q} is not an edge")
            if not Graph(g.n, tuple(e for e in g.edges if e != (p, q))).is_connected():
                raise TransformError(f"gadget {i + 1}: removing {p}-{q} disconnects it")
        for i, j in itertools.combinations(range(len(self.gadgets)), 2):
            if self.gadgets[i].n == self.gadgets[j].n and is_isomorphic(self.gadgets[i], self.gadgets[j]):
                raise TransformError(f"gadgets {i + 1} and {j + 1} are isomorphic")

    def to_dict(self) -> dict:
        return {
            "k": [g.n for g in self.gadgets],
            "colors": list(self.colors),
            "gadgets": [[list(e) for e in g.edges] for g in self.gadgets],
            "designated": [list(e) for e in self.designated],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "GadgetSet":
        gs = tuple(Graph(k, tuple(tuple(e) for e in es)) for k, es in zip(doc["k"], doc["gadgets"]))
        return cls(gs, tuple(tuple(e) for e in doc["designated"]), tuple(doc["colors"]))


def _random_gadget_candidate(k: int, d: int, regular: bool, rng: np.random.Generator) -> Graph | None:
    from .threestep import random_bounded_graph, random_regular_graph

    if regular:
        return random_regular_graph(k, d, rng, tries=20)
    return random_bounded_graph(k, d, rng)


def find_gadgets(d: int, c: int, k: int, seed: int, regular: bool = False, budget: int = 20000) -> GadgetSet:
    """c pairwise non-isomorphic connected asymmetric k-vertex gadgets of max degree <= d."""
    if k < 6:
        raise TransformError(f"no asymmetric graph exists on k={k} < 6 vertices")
    rng = np.random.default_rng(seed)
    found: list[Graph] = []
    for _ in range(budget):
        if len(found) == c:
            break
        g = _random_gadget_candidate(k, d, regular, rng)
        if g is None or not g.is_connected() or g.max_degree() > d:
            continue
        if regular and not np.all(g.degrees == d):
            continue
        try:
            designated_edge(g)
        except TransformError:
            continue
        if not is_self_ordered(g)[0]:
            continue
        if any(is_isomorphic(g, h) for h in found):
            continue
        found.append(g)
    if len(found) < c:
        raise TransformError(f"gadget search budget {budget} exhausted with {len(found)}/{c} gadgets")
    return GadgetSet(tuple(found), tuple(designated_edge(g) for g in found))


@dataclass(frozen=True)
class GadgetLayout:
    """Where each edge's gadget copy lives in the gadgetized graph."""

    n: int
    offsets: tuple[int, ...]  # offsets[j-1]: copy of edge j occupies offsets+1 .. offsets+size
    sizes: tuple[int, ...]


def gadgetize(M: ColoredMultiGraph, gadgets: GadgetSet, alt: GadgetSet | None = None, with_layout: bool = False):
    """Replace each colored edge by a copy of its color's gadget minus the
    designated edge {p, q}, attaching p to the smaller endpoint and q to the larger.

    `alt` optionally supplies (k+1)-vertex gadgets for selected colors so that
    the vertex count can be tuned.
    """
    check_eligible(M)
    edges: list[tuple[int, int]] = []
    offsets, sizes = [], []
    top = M.n
    for u, v, col in M.edges:
        if alt is not None and col in alt.colors:
            g, (p, q) = alt.for_color(col)
        else:
            g, (p, q) = gadgets.for_color(col)
        offsets.append(top)
        sizes.append(g.n)
        edges.extend((top + a, top + b) for a, b in g.edges if (a, b) != (p, q))
        edges.append((u, top + p))
        edges.append((v, top + q))
        top += g.n
    out = Graph(top, tuple(edges))
    if with_layout:
        return out, GadgetLayout(M.n, tuple(offsets), tuple(sizes))
    return out


def directed_to_undirected(D: DirectedColoredMultiGraph, d: int | None = None) -> ColoredMultiGraph:
    """Each arc (u -> v, color j) becomes a 2-path u - a - v colored 2j-1, 2j."""
    counts = D.incident_counts
    for v in range(1, D.n + 1):
        k = int(counts[v - 1])
        if k < 3 or (d is not None and k > d):
            hi = "" if d is None else f"..{d}"
            raise TransformError(f"vertex {v} has {k} incident arcs, expected 3{hi}")
    seen = set()
    for arc in D.arcs:
        if arc in seen:
            raise TransformError(f"parallel arcs {arc[0]}->{arc[1]} share color {arc[2]}")
        seen.add(arc)
    edges = []
    for t, (u, v, j) in enumerate(D.arcs, start=1):
        a = D.n + t
        edges.append((u, a, 2 * j - 1))
        edges.append((a, v, 2 * j))
    return ColoredMultiGraph(D.n + D.m, tuple(edges))


def make_regular_expanding(G: Graph, d_target: int, expander: Graph | None = None) -> ColoredMultiGraph:
    """G colored 1, expander colored 2, then color-2 padding up to d_target-regular.

    Padding repeatedly joins the two vertices with the largest remaining
    deficit (ties by smaller id); a lone deficient vertex receives self-loops.
    """
    if expander is None:
        expander = Graph(G.n)
    if expander.n != G.n:
        raise TransformError("expander must live on the same vertex set")
    if d_target < G.max_degree() + expander.max_degree():
        raise TransformError("d_target below maxdeg(G) + maxdeg(expander)")
    if (G.n * d_target) % 2:
        raise TransformError("n * d_target must be even")
    edges = [(u, v, 1) for u, v in G.edges] + [(u, v, 2) for u, v in expander.edges]
    deficit = {v: d_target - int(G.degrees[v - 1] + expander.degrees[v - 1]) for v in range(1, G.n + 1)}
    while True:
        pending = sorted((v for v in deficit if deficit[v] > 0), key=lambda v: (-deficit[v], v))
        if not pending:
            break
        if len(pending) == 1:
            v = pending[0]
            if deficit[v] % 2:
                raise TransformError(f"odd leftover deficit at vertex {v}")
            edges.extend((v, v, 2) for _ in range(deficit[v] // 2))
            deficit[v] = 0
            break
        a, b = pending[0], pending[1]
        edges.append((a, b, 2))
        deficit[a] -= 1
        deficit[b] -= 1
    return ColoredMultiGraph(G.n, tuple(edges))


def superimpose(G: Graph, H: Graph) -> Graph:
    if G.n != H.n:
        raise TransformError(f"size mismatch: {G.n} vs {H.n}")
    return Graph.from_edges(G.n, G.edges + H.edges)


def default_cloud_expander(k: int) -> Graph:
    """Circulant graph with offsets 1 and 2 (complete graph below 5 vertices)."""
    if k < 5:
        return Graph(k, tuple(itertools.combinations(range(1, k + 1), 2)))
    es = {(min(i, (i + s - 1) % k + 1), max(i, (i + s - 1) % k + 1)) for i in range(1, k + 1) for s in (1, 2)}
    return Graph(k, tuple(es))


def cloud_vertex(n: int, v: int, u: int) -> int:
    """Id of <v, u> (u != v) in the cloud layout."""
    return (v - 1) * (n - 1) + (u if u < v else u - 1)


def degree_reduce_dense(G: Graph, expander_family: Callable[[int], Graph] | Graph | None = None) -> ColoredMultiGraph:
    """Clouds C_v = {<v,u>} joined internally by an expander (color 1); cross
    edges <v,u>-<u,v> colored 2 for edges of G and 0 for non-edges."""
    n = G.n
    if n < 3:
        raise TransformError("degree reduction needs n >= 3")
    if expander_family is None:
        X = default_cloud_expander(n - 1)
    elif isinstance(expander_family, Graph):
        X = expander_family
    else:
        X = expander_family(n - 1)
    if X.n != n - 1:
        raise TransformError(f"cloud expander must have {n - 1} vertices")
    edges = []
    for v in range(1, n + 1):
        base = (v - 1) * (n - 1)
        edges.extend((base + a, base + b, 1) for a, b in X.edges)
    adj = G.adjacency
    for u, v in itertools.combinations(range(1, n + 1), 2):
        edges.append((cloud_vertex(n, u, v), cloud_vertex(n, v, u), 2 if adj[u - 1, v - 1] else 0))
    return ColoredMultiGraph(n * (n - 1), tuple(edges))
