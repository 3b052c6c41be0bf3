"""2-density, its proper-subgraph variant, and balancedness."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from .errors import DomainError
from .graph import Graph, mask_to_tuple, to_mask
from .subsets import subset_table


@dataclass(frozen=True)
class DensityReport:
    m2: Fraction
    witnesses: tuple[tuple[int, ...], ...]
    two_balanced: bool
    strictly_two_balanced: bool
    m2_star: Fraction | None  # None when no proper subgraph has >= 3 vertices

    def to_json(self) -> dict:
        return {
            "m2": frac_str(self.m2),
            "witnesses": [list(w) for w in self.witnesses],
            "two_balanced": self.two_balanced,
            "strictly_two_balanced": self.strictly_two_balanced,
            "m2_star": frac_str(self.m2_star) if self.m2_star is not None else "undefined",
        }


def frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _m2_and_witness_masks(g: Graph) -> tuple[Fraction, np.ndarray]:
    if g.n < 3:
        raise DomainError("2-density needs at least 3 vertices")
    t = subset_table(g)
    best = None
    for k in range(3, g.n + 1):
        sel = t.size == k
        cand = Fraction(int(t.e[sel].max()) - 1, k - 2)
        if best is None or cand > best:
            best = cand
    p, q = best.numerator, best.denominator
    hit = (t.size >= 3) & ((t.e - 1) * q == p * (t.size - 2))
    return best, t.masks[hit]


def m2(g: Graph) -> Fraction:
    """Max of (e(nu)-1)/(|nu|-2) over vertex subsets with at least 3 vertices."""
    return _m2_and_witness_masks(g)[0]


def m2_witnesses(g: Graph) -> list[int]:
    """Bitmasks of all subsets attaining the 2-density."""
    return [int(m) for m in _m2_and_witness_masks(g)[1]]


def m2_local(g: Graph, nu: Iterable[int] | int) -> Fraction:
    mask = to_mask(nu)
    k = mask.bit_count()
    if k < 3:
        raise DomainError("m2(nu) needs |nu| >= 3")
    if mask >> g.n:
        raise DomainError("subset has vertices out of range")
    return Fraction(g.edges_in(mask) - 1, k - 2)


def m2_star(g: Graph) -> Fraction:
    """Max of (e(F')-1)/(v(F')-2) over proper subgraphs F' with v(F') >= 3.

    Every proper subgraph sits inside either an induced subgraph on a proper
    vertex subset or the full vertex set minus one edge, so only those are
    scanned.
    """
    t = subset_table(g)
    best = None
    for k in range(3, g.n):
        sel = t.size == k
        cand = Fraction(int(t.e[sel].max()) - 1, k - 2)
        if best is None or cand > best:
            best = cand
    if g.n >= 3 and g.e >= 1:
        cand = Fraction(g.e - 2, g.n - 2)
        if best is None or cand > best:
            best = cand
    if best is None:
        raise DomainError("no proper subgraph on at least 3 vertices")
    return best


def density_report(g: Graph) -> DensityReport:
    val, wit = _m2_and_witness_masks(g)
    wit_masks = sorted(int(m) for m in wit)
    full = g.all_mask
    two_bal = full in wit_masks
    try:
        star = m2_star(g)
    except DomainError:
        star = None
    return DensityReport(
        m2=val,
        witnesses=tuple(mask_to_tuple(m) for m in wit_masks),
        two_balanced=two_bal,
        strictly_two_balanced=two_bal and len(wit_masks) == 1,
        m2_star=star,
    )


def has_cycle(g: Graph) -> bool:
    from .graph import components

    return g.e > g.n - len(components(g))


def maximizer_contains_apex_check(g: Graph, triple) -> bool:
    """True iff every 2-density maximiser contains the apex of ``triple``.

    Holds for every cyclic bipartite graph whose apex sees all of S; this is an
    executable check of that fact.
    """
    if not has_cycle(g):
        raise DomainError("graph is acyclic; the apex-containment fact needs a cycle")
    s_mask = to_mask(triple.S)
    if (g.adj[triple.v_star] & s_mask) != s_mask:
        raise DomainError("apex is not adjacent to all of S")
    bit = 1 << triple.v_star
    return all(m & bit for m in m2_witnesses(g))
