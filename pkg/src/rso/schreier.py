"""Primary and secondary Schreier multigraphs, and the SL2(p) action on the projective line."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .graph import ColoredMultiGraph, DirectedColoredMultiGraph, Graph, GraphError, Permutation
from .verify import (
    EXACT_N_LIMIT,
    ExpansionReport,
    RobustnessReport,
    directed_colored_robustness_exact,
    expansion_bounds,
    expansion_combinatorial,
    robustness_adversarial,
)

M1 = ((1, 1), (0, 1))
M2 = ((0, 1), (-1, 0))


@dataclass(frozen=True)
class PermutationFamily:
    perms: tuple[Permutation, ...]

    def __post_init__(self):
        if not self.perms:
            raise GraphError("empty permutation family")
        n = self.perms[0].n
        if any(p.n != n for p in self.perms):
            raise GraphError("permutations act on different point sets")

    @property
    def n(self) -> int:
        return self.perms[0].n

    @property
    def d(self) -> int:
        return len(self.perms)


def primary_graph(P: PermutationFamily) -> DirectedColoredMultiGraph:
    """Arc v -> pi_i(v) colored i for every point v and generator i."""
    arcs = [(v, pi(v), i) for i, pi in enumerate(P.perms, start=1) for v in range(1, P.n + 1)]
    return DirectedColoredMultiGraph(P.n, tuple(arcs))


def pair_id(n: int, u: int, v: int) -> int:
    """Id of the ordered pair (u, v), u != v, in lexicographic order."""
    return (u - 1) * (n - 1) + (v if v < u else v - 1)


def pair_of(n: int, x: int) -> tuple[int, int]:
    u, r = divmod(x - 1, n - 1)
    u += 1
    v = r + 1
    return u, (v if v < u else v + 1)


def secondary_graph(P: PermutationFamily) -> ColoredMultiGraph:
    """Edges {(u,v), (pi_i u, pi_i v)} on ordered pairs of distinct points."""
    n = P.n
    edges = []
    for i, pi in enumerate(P.perms, start=1):
        for u in range(1, n + 1):
            for v in range(1, n + 1):
                if u != v:
                    edges.append((pair_id(n, u, v), pair_id(n, pi(u), pi(v)), i))
    return ColoredMultiGraph(n * (n - 1), tuple(edges))


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % q for q in range(2, int(p ** 0.5) + 1))


def projective_id(p: int, x: int, y: int) -> int:
    """Canonical id of the nonzero vector (x, y) over GF(p): first nonzero coordinate scaled to 1."""
    x %= p
    y %= p
    if x:
        return (y * pow(x, -1, p)) % p + 1
    if y:
        return p + 1
    raise GraphError("zero vector has no projective point")


def projective_point(p: int, ident: int) -> tuple[int, int]:
    return (0, 1) if ident == p + 1 else (1, ident - 1)


def sl2_projective_perms(p: int, matrices: Sequence[Sequence[Sequence[int]]]) -> PermutationFamily:
    if p % 2 == 0 or not _is_prime(p):
        raise GraphError(f"p={p} is not an odd prime")
    perms = []
    for M in matrices:
        (a, b), (c, d) = M
        if (a * d - b * c) % p != 1:
            raise GraphError(f"matrix {M} does not have determinant 1 mod {p}")
        imgs = []
        for ident in range(1, p + 2):
            x, y = projective_point(p, ident)
            imgs.append(projective_id(p, a * x + b * y, c * x + d * y))
        perms.append(Permutation(tuple(imgs)))
    return PermutationFamily(tuple(perms))


def sl2_default(p: int) -> tuple[DirectedColoredMultiGraph, ColoredMultiGraph]:
    P = sl2_projective_perms(p, (M1, M2))
    return primary_graph(P), secondary_graph(P)


@dataclass(frozen=True)
class SufficientConditionReport:
    secondary: ExpansionReport
    primary: RobustnessReport
    primary_expansion: ExpansionReport | None
    inequality_holds: bool | None
    expansion_claim_holds: bool | None

    def to_dict(self) -> dict:
        return {
            "secondary": self.secondary.to_dict(),
            "primary": self.primary.to_dict(),
            "primary_expansion": None if self.primary_expansion is None else self.primary_expansion.to_dict(),
            "inequality_holds": self.inequality_holds,
            "expansion_claim_holds": self.expansion_claim_holds,
        }


def check_sufficient_condition(
    P: PermutationFamily,
    exact_expansion_limit: int = 30,
    exact_robustness_limit: int = EXACT_N_LIMIT,
    samples: int = 20000,
    seed: int = 0,
) -> SufficientConditionReport:
    """Measure secondary expansion and primary robustness and compare them.

    The comparison primary_gamma >= secondary_gamma is certified when the
    secondary value is exact, or when the primary value clears a sampled
    upper bound on the secondary expansion; otherwise it is left undecided.
    """
    prim = primary_graph(P)
    sec = secondary_graph(P)
    sec_simple = sec.underlying_simple()
    if sec.n <= exact_expansion_limit:
        sec_rep = expansion_combinatorial(sec_simple, n_limit=exact_expansion_limit)
        sec_value = sec_rep.gamma_combinatorial
        sec_certified = True
    else:
        sec_rep = expansion_bounds(sec_simple, samples=samples, seed=seed)
        sec_value = sec_rep.gamma_upper
        sec_certified = False
    if P.n <= exact_robustness_limit:
        prim_rep = directed_colored_robustness_exact(prim, n_limit=exact_robustness_limit)
    else:
        prim_rep = robustness_adversarial(prim, samples=samples, seed=seed)
    exact_pair = prim_rep.gamma_exact is not None
    if exact_pair and sec_value is not None and (sec_certified or prim_rep.gamma_exact >= sec_value):
        holds = prim_rep.gamma_exact >= sec_value
    else:
        holds = None
    prim_exp = None
    claim = None
    prim_simple = Graph.from_edges(P.n, [(u, v) for u, v, _ in prim.arcs if u != v])
    if P.n >= 2 and P.n <= exact_expansion_limit:
        prim_exp = expansion_combinatorial(prim_simple, n_limit=exact_expansion_limit)
        if sec_certified and sec_value is not None and sec_value > 0:
            claim = prim_exp.gamma_combinatorial >= min(Fraction(1, 4), sec_value / 3)
    return SufficientConditionReport(sec_rep, prim_rep, prim_exp, holds, claim)
