"""Graph data model: simple graphs, colored multigraphs, permutations and oracles."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Sequence

import numpy as np


class GraphError(ValueError):
    """Raised for malformed graphs or mismatched sizes."""


def _check_vertex(n: int, v: int, what: str) -> None:
    if not (1 <= v <= n):
        raise GraphError(f"{what}: endpoint {v} out of range 1..{n}")


@dataclass(frozen=True)
class Permutation:
    """Bijection on 1..n stored as a tuple of images (images[v-1] = mu(v))."""

    images: tuple[int, ...]

    def __post_init__(self):
        imgs = tuple(int(x) for x in self.images)
        n = len(imgs)
        if sorted(imgs) != list(range(1, n + 1)):
            raise GraphError("images do not form a bijection of 1..n")
        object.__setattr__(self, "images", imgs)

    @property
    def n(self) -> int:
        return len(self.images)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def from_array0(cls, arr: Sequence[int]) -> "Permutation":
        """Build from 0-based images."""
        return cls(tuple(int(x) + 1 for x in arr))

    @classmethod
    def transposition(cls, n: int, a: int, b: int) -> "Permutation":
        imgs = list(range(1, n + 1))
        imgs[a - 1], imgs[b - 1] = b, a
        return cls(tuple(imgs))

    @classmethod
    def from_cycles(cls, n: int, cycles: Iterable[Sequence[int]]) -> "Permutation":
        imgs = list(range(1, n + 1))
        for cyc in cycles:
            for i, v in enumerate(cyc):
                imgs[v - 1] = cyc[(i + 1) % len(cyc)]
        return cls(tuple(imgs))

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "Permutation":
        return cls.from_array0(rng.permutation(n))

    def __call__(self, v: int) -> int:
        return self.images[v - 1]

    @cached_property
    def array0(self) -> np.ndarray:
        """0-based image array."""
        return np.asarray(self.images, dtype=np.int64) - 1

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for v, w in enumerate(self.images, start=1):
            inv[w - 1] = v
        return Permutation(tuple(inv))

    def compose(self, other: "Permutation") -> "Permutation":
        """Return self o other (apply other first)."""
        if other.n != self.n:
            raise GraphError("size mismatch in composition")
        return Permutation(tuple(self.images[w - 1] for w in other.images))

    def nonfixed(self) -> list[int]:
        return [v for v, w in enumerate(self.images, start=1) if v != w]

    def num_nonfixed(self) -> int:
        return sum(1 for v, w in enumerate(self.images, start=1) if v != w)

    def is_identity(self) -> bool:
        return self.num_nonfixed() == 0


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices 1..n; edges stored sorted as (u, v), u < v."""

    n: int
    edges: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.n < 0:
            raise GraphError("negative vertex count")
        norm = set()
        for e in self.edges:
            u, v = int(e[0]), int(e[1])
            _check_vertex(self.n, u, f"edge {u}-{v}")
            _check_vertex(self.n, v, f"edge {u}-{v}")
            if u == v:
                raise GraphError(f"edge {u}-{v}: self-loop in simple graph")
            pair = (u, v) if u < v else (v, u)
            if pair in norm:
                raise GraphError(f"edge {u}-{v}: duplicate pair")
            norm.add(pair)
        object.__setattr__(self, "edges", tuple(sorted(norm)))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "Graph":
        """Build a graph, collapsing duplicate pairs (self-loops still rejected)."""
        seen = {(min(e[0], e[1]), max(e[0], e[1])) for e in edges}
        return cls(n, tuple(seen))

    @classmethod
    def from_adjacency(cls, adj: np.ndarray) -> "Graph":
        a = np.asarray(adj, dtype=bool)
        iu, iv = np.nonzero(np.triu(a, 1))
        return cls(a.shape[0], tuple(zip((iu + 1).tolist(), (iv + 1).tolist())))

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def adjacency(self) -> np.ndarray:
        """Boolean n x n adjacency matrix (0-based)."""
        a = np.zeros((self.n, self.n), dtype=bool)
        if self.edges:
            e = np.asarray(self.edges, dtype=np.int64) - 1
            a[e[:, 0], e[:, 1]] = True
            a[e[:, 1], e[:, 0]] = True
        return a

    @cached_property
    def adjacency_lists(self) -> tuple[tuple[int, ...], ...]:
        """adjacency_lists[v] is the sorted neighbor tuple of v; index 0 unused."""
        nb: list[list[int]] = [[] for _ in range(self.n + 1)]
        for u, v in self.edges:
            nb[u].append(v)
            nb[v].append(u)
        return tuple(tuple(sorted(x)) for x in nb)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency_lists[v]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adjacency_lists[u] if u != v else False

    def degree(self, v: int) -> int:
        return len(self.adjacency_lists[v])

    @cached_property
    def degrees(self) -> np.ndarray:
        """Degree array indexed 0..n-1."""
        return self.adjacency.sum(axis=1).astype(np.int64)

    def max_degree(self) -> int:
        return int(self.degrees.max()) if self.n else 0

    def induced(self, vertices: Sequence[int]) -> "Graph":
        """Induced subgraph relabeled so vertices[i] becomes i+1."""
        index = {v: i + 1 for i, v in enumerate(vertices)}
        es = [(index[u], index[v]) for u, v in self.edges if u in index and v in index]
        return Graph(len(vertices), tuple(es))

    def components(self) -> list[list[int]]:
        seen = [False] * (self.n + 1)
        comps = []
        for s in range(1, self.n + 1):
            if seen[s]:
                continue
            seen[s] = True
            comp, stack = [], [s]
            while stack:
                x = stack.pop()
                comp.append(x)
                for y in self.adjacency_lists[x]:
                    if not seen[y]:
                        seen[y] = True
                        stack.append(y)
            comps.append(sorted(comp))
        return comps

    def is_connected(self) -> bool:
        return self.n <= 1 or len(self.components()) == 1

    def to_colored(self, color: int = 1) -> "ColoredMultiGraph":
        return ColoredMultiGraph(self.n, tuple((u, v, color) for u, v in self.edges))


@dataclass(frozen=True)
class ColoredMultiGraph:
    """Undirected multigraph with colored edges; self-loops and parallels allowed.

    Edge order is meaningful: it fixes edge indices (1-based, input order).
    Endpoints of each edge are stored as (min, max).
    """

    n: int
    edges: tuple[tuple[int, int, int], ...] = ()

    def __post_init__(self):
        norm = []
        for e in self.edges:
            u, v, c = int(e[0]), int(e[1]), int(e[2])
            _check_vertex(self.n, u, f"edge {u}-{v}")
            _check_vertex(self.n, v, f"edge {u}-{v}")
            if c < 0:
                raise GraphError(f"edge {u}-{v}: negative color {c}")
            norm.append((min(u, v), max(u, v), c))
        object.__setattr__(self, "edges", tuple(norm))

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def colors(self) -> tuple[int, ...]:
        return tuple(sorted({c for _, _, c in self.edges}))

    @cached_property
    def degrees(self) -> np.ndarray:
        """Degrees (self-loops count twice), indexed 0..n-1."""
        deg = np.zeros(self.n, dtype=np.int64)
        for u, v, _ in self.edges:
            deg[u - 1] += 1
            deg[v - 1] += 1
        return deg

    def max_degree(self) -> int:
        return int(self.degrees.max()) if self.n else 0

    def color_multisets(self) -> dict[int, Counter]:
        out: dict[int, Counter] = {}
        for u, v, c in self.edges:
            out.setdefault(c, Counter())[(u, v)] += 1
        return out

    def underlying_simple(self) -> Graph:
        """Drop loops, collapse parallels and colors."""
        return Graph.from_edges(self.n, [(u, v) for u, v, _ in self.edges if u != v])

    def is_simple(self) -> bool:
        pairs = [(u, v) for u, v, _ in self.edges]
        return all(u != v for u, v in pairs) and len(set(pairs)) == len(pairs)

    @cached_property
    def incidence(self) -> tuple[tuple[int, ...], ...]:
        """incidence[v] = sorted 1-based indices of edges incident to v (loops once)."""
        inc: list[list[int]] = [[] for _ in range(self.n + 1)]
        for j, (u, v, _) in enumerate(self.edges, start=1):
            inc[u].append(j)
            if v != u:
                inc[v].append(j)
        return tuple(tuple(x) for x in inc)


@dataclass(frozen=True)
class DirectedColoredMultiGraph:
    """Directed multigraph with colored arcs (u -> v, color)."""

    n: int
    arcs: tuple[tuple[int, int, int], ...] = ()

    def __post_init__(self):
        norm = []
        for e in self.arcs:
            u, v, c = int(e[0]), int(e[1]), int(e[2])
            _check_vertex(self.n, u, f"arc {u}->{v}")
            _check_vertex(self.n, v, f"arc {u}->{v}")
            if c < 1:
                raise GraphError(f"arc {u}->{v}: color {c} < 1")
            norm.append((u, v, c))
        object.__setattr__(self, "arcs", tuple(norm))

    @property
    def m(self) -> int:
        return len(self.arcs)

    @cached_property
    def incident_counts(self) -> np.ndarray:
        """In+out arc count per vertex (a self-loop arc counts twice), 0-based."""
        deg = np.zeros(self.n, dtype=np.int64)
        for u, v, _ in self.arcs:
            deg[u - 1] += 1
            deg[v - 1] += 1
        return deg


AnyGraph = Graph | ColoredMultiGraph | DirectedColoredMultiGraph


def _check_same_n(n: int, mu: Permutation) -> None:
    if mu.n != n:
        raise GraphError(f"permutation on {mu.n} points applied to graph on {n} vertices")


def apply_permutation(G: AnyGraph, mu: Permutation) -> AnyGraph:
    """Relabel every vertex v as mu(v)."""
    _check_same_n(G.n, mu)
    f = mu.images
    if isinstance(G, Graph):
        return Graph(G.n, tuple((f[u - 1], f[v - 1]) for u, v in G.edges))
    if isinstance(G, ColoredMultiGraph):
        return ColoredMultiGraph(G.n, tuple((f[u - 1], f[v - 1], c) for u, v, c in G.edges))
    if isinstance(G, DirectedColoredMultiGraph):
        return DirectedColoredMultiGraph(G.n, tuple((f[u - 1], f[v - 1], c) for u, v, c in G.arcs))
    raise TypeError(f"unsupported graph type {type(G).__name__}")


def symdiff(G: Graph, H: Graph) -> int:
    """Size of the symmetric difference of two edge sets on the same vertex set."""
    if G.n != H.n:
        raise GraphError(f"size mismatch: {G.n} vs {H.n}")
    return len(set(G.edges) ^ set(H.edges))


def _multiset_symdiff(a: Counter, b: Counter) -> int:
    return sum(abs(a[k] - b[k]) for k in set(a) | set(b))


def colored_symdiff(M: ColoredMultiGraph, mu: Permutation) -> int:
    """Sum over colors of the multiset symmetric difference between M and mu(M)."""
    _check_same_n(M.n, mu)
    A = M.color_multisets()
    B = apply_permutation(M, mu).color_multisets()
    return sum(_multiset_symdiff(A.get(c, Counter()), B.get(c, Counter())) for c in set(A) | set(B))


def directed_colored_symdiff(D: DirectedColoredMultiGraph, mu: Permutation) -> int:
    """Per-color multiset symmetric difference over ordered pairs."""
    _check_same_n(D.n, mu)

    def per_color(arcs):
        out: dict[int, Counter] = {}
        for u, v, c in arcs:
            out.setdefault(c, Counter())[(u, v)] += 1
        return out

    A = per_color(D.arcs)
    B = per_color(apply_permutation(D, mu).arcs)
    return sum(_multiset_symdiff(A.get(c, Counter()), B.get(c, Counter())) for c in set(A) | set(B))


class LocalGraphOracle:
    """Neighbor-list oracle with a query counter."""

    def __init__(self, n: int, neighbor_fn: Callable[[int], Sequence[int]]):
        self.n = n
        self._fn = neighbor_fn
        self.queries = 0

    @classmethod
    def of_graph(cls, G: Graph) -> "LocalGraphOracle":
        return cls(G.n, lambda v: G.adjacency_lists[v])

    @classmethod
    def permuted(cls, G: Graph, mu: Permutation) -> "LocalGraphOracle":
        """Oracle for mu(G) built lazily from G's adjacency lists."""
        f = mu.images
        finv = mu.inverse().images
        adj = G.adjacency_lists

        def nb(v: int) -> list[int]:
            return sorted(f[x - 1] for x in adj[finv[v - 1]])

        return cls(G.n, nb)

    def neighbors(self, v: int) -> list[int]:
        if not (1 <= v <= self.n):
            raise GraphError(f"query vertex {v} out of range 1..{self.n}")
        self.queries += 1
        return list(self._fn(v))


@dataclass
class LocalRepresentation:
    """Incidence (g1), edge enumeration (g2) and vertex-by-degree (g3) oracles.

    Each sub-oracle counts its own calls.
    """

    M: ColoredMultiGraph
    counts: dict[str, int] = field(default_factory=lambda: {"g1": 0, "g2": 0, "g3": 0})

    @cached_property
    def _by_degree(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for v in range(1, self.M.n + 1):
            out.setdefault(int(self.M.degrees[v - 1]), []).append(v)
        return out

    def g1(self, v: int, i: int) -> int:
        """Index of the i-th edge incident to v, or 0."""
        self.counts["g1"] += 1
        inc = self.M.incidence[v] if 1 <= v <= self.M.n else ()
        return inc[i - 1] if 1 <= i <= len(inc) else 0

    def g2(self, j: int) -> tuple[int, int, int] | int:
        """Edge j as (u, v, color), or 0."""
        self.counts["g2"] += 1
        return self.M.edges[j - 1] if 1 <= j <= self.M.m else 0

    def g3(self, i: int, j: int) -> int:
        """The i-th vertex (ascending) of degree j, or 0."""
        self.counts["g3"] += 1
        vs = self._by_degree.get(j, [])
        return vs[i - 1] if 1 <= i <= len(vs) else 0


def local_representation(M: ColoredMultiGraph | Graph) -> LocalRepresentation:
    if isinstance(M, Graph):
        M = M.to_colored()
    return LocalRepresentation(M)
