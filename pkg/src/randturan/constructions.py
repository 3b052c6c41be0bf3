"""Tight-example families: F_M from a multigraph and F_{r,s,t}, plus their balance checks."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .density import m2
from .errors import DomainError
from .graph import Graph, Multigraph, iter_bits, mask_to_tuple, to_mask
from .semibounded import SemiBoundedTriple


@dataclass(frozen=True)
class ConstructionRecord:
    source: Multigraph | tuple[int, int, int]
    result: Graph
    triple: SemiBoundedTriple
    labels: tuple[str, ...]

    def sidecar(self) -> dict:
        if isinstance(self.source, Multigraph):
            src = {
                "kind": "F_M",
                "n": self.source.n,
                "edges": [[u, v, m] for (u, v), m in self.source.mult],
            }
        else:
            r, s, t = self.source
            src = {"kind": "F_rst", "r": r, "s": s, "t": t}
        return {
            "source": src,
            "n": self.result.n,
            "e": self.result.e,
            "roles": list(self.labels),
            "triple": self.triple.to_json(),
        }


def build_F_M(M: Multigraph) -> ConstructionRecord:
    """Subdivide every edge of M (with multiplicity) and add an apex joined to V(M).

    Vertex order: V(M), then the apex, then one subdivision vertex per edge
    copy in sorted pair order.
    """
    if M.e < 1:
        raise DomainError("F_M needs e(M) >= 1")
    vm = M.n
    apex = vm
    edges = [(u, apex) for u in range(vm)]
    labels = [f"M:{u}" for u in range(vm)] + ["apex"]
    nxt = vm + 1
    for (u, v), k in M.mult:
        for i in range(k):
            edges += [(u, nxt), (v, nxt)]
            labels.append(f"sub:{u}-{v}#{i}")
            nxt += 1
    g = Graph.from_edges(nxt, edges)
    triple = SemiBoundedTriple(tuple(range(vm)), tuple(range(vm, nxt)), apex, 2)
    return ConstructionRecord(M, g, triple, tuple(labels))


def build_F_rst(r: int, s: int, t: int) -> ConstructionRecord:
    """S of size s, apex on S, and t private vertices on each r-subset of S.

    Vertex order: S, the apex, then the R-blocks in lexicographic order of R.
    """
    if r < 2 or r > s:
        raise DomainError(f"need 2 <= r <= s, got r={r}, s={s}")
    if t < 1:
        raise DomainError("need t >= 1")
    apex = s
    edges = [(u, apex) for u in range(s)]
    labels = [f"S:{u}" for u in range(s)] + ["apex"]
    nxt = s + 1
    for R in combinations(range(s), r):
        for i in range(t):
            edges += [(u, nxt) for u in R]
            labels.append("R:" + ",".join(map(str, R)) + f"#{i}")
            nxt += 1
    g = Graph.from_edges(nxt, edges)
    triple = SemiBoundedTriple(tuple(range(s)), tuple(range(s, nxt)), apex, r)
    return ConstructionRecord((r, s, t), g, triple, tuple(labels))


@dataclass(frozen=True)
class BalanceResult:
    balanced: bool
    witness: tuple[int, ...]
    max_value: Fraction
    target: Fraction


def multigraph_balanced(M: Multigraph) -> BalanceResult:
    """Does mu = V(M) maximise e(M[mu])/(|mu|-1) over |mu| >= 2?"""
    if M.n < 2:
        raise DomainError("need v(M) >= 2")
    if M.e < 1:
        raise DomainError("need e(M) >= 1")
    target = Fraction(M.e, M.n - 1)
    best, arg = None, 0
    for mask in range(1 << M.n):
        k = mask.bit_count()
        if k < 2:
            continue
        val = Fraction(M.edges_in(mask), k - 1)
        if best is None or val > best or (val == best and k > arg.bit_count()):
            best, arg = val, mask
    return BalanceResult(best == target, mask_to_tuple(arg), best, target)


def general_balance_check(g: Graph, triple: SemiBoundedTriple) -> BalanceResult:
    """Compare max over mu ⊆ S (|mu| >= 2) of (e(F[mu ∪ N(mu)]) - |N(mu)|)/(|mu|-1)
    against (e(F) - |T|)/(|S| - 1)."""
    triple.validate(g)
    for v in triple.T:
        if v != triple.v_star and g.degrees[v] != triple.r:
            raise DomainError(f"vertex {v} of T \\ {{v*}} has degree {g.degrees[v]} != r={triple.r}")
    S = triple.S
    if len(S) < 2:
        raise DomainError("need |S| >= 2")
    t_mask = triple.t_mask
    target = Fraction(g.e - len(triple.T), len(S) - 1)
    best, arg = None, ()
    for k in range(2, len(S) + 1):
        for mu in combinations(S, k):
            mu_mask = to_mask(mu)
            nbr = 0
            for u in mu:
                nbr |= g.adj[u]
            nbr &= t_mask
            val = Fraction(g.edges_in(mu_mask | nbr) - nbr.bit_count(), k - 1)
            if best is None or val > best or (val == best and k > len(arg)):
                best, arg = val, mu
    return BalanceResult(best == target, tuple(arg), best, target)


def multibalanced_m2_formula(M: Multigraph) -> Fraction:
    return Fraction(2 * M.e + M.n - 1, M.e + M.n - 1)


def verify_multibalanced_m2(M: Multigraph) -> bool:
    """For balanced M, check m2(F_M) == (2e(M)+v(M)-1)/(e(M)+v(M)-1) by brute force."""
    if not multigraph_balanced(M).balanced:
        raise DomainError("M is not balanced")
    return m2(build_F_M(M).result) == multibalanced_m2_formula(M)


def multigraph_of(g: Graph, triple: SemiBoundedTriple) -> Multigraph | None:
    """Recover M when g is F_M under ``triple`` (all non-apex T vertices of degree 2)."""
    pos = {u: i for i, u in enumerate(triple.S)}
    pairs = []
    for v in triple.T:
        if v == triple.v_star:
            continue
        nb = list(iter_bits(g.adj[v]))
        if len(nb) != 2:
            return None
        pairs.append((pos[nb[0]], pos[nb[1]]))
    if not pairs:
        return None
    return Multigraph.from_edges(len(triple.S), pairs)
