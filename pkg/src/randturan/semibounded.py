"""r-semi-bounded structure: f(nu), a(F), b(F), the cap function D and tau.

A triple ``(S, T, v_star)`` splits a bipartite pattern so that the apex
``v_star`` in T sees all of S and every other vertex of T has degree at most
``r``.  All threshold quantities are exact ``Fraction``s.  D and tau can be
astronomically large, so they are returned in log form next to their exact
integer exponents.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

from .density import has_cycle, m2
from .errors import DomainError
from .graph import Graph, bipartitions, iter_bits, mask_to_tuple, to_mask
from .subsets import check_pattern_size, subset_table


@dataclass(frozen=True)
class SemiBoundedTriple:
    S: tuple[int, ...]
    T: tuple[int, ...]
    v_star: int
    r: int

    @property
    def s_mask(self) -> int:
        return to_mask(self.S)

    @property
    def t_mask(self) -> int:
        return to_mask(self.T)

    def violations(self, g: Graph) -> list[str]:
        out = []
        s, t = self.s_mask, self.t_mask
        if s & t or (s | t) != g.all_mask:
            out.append("S and T do not partition V(F)")
        for u, v in g.edge_list:
            if (s >> u & 1) == (s >> v & 1):
                out.append(f"edge {u}-{v} inside one side")
                break
        if not t >> self.v_star & 1:
            out.append("apex not in T")
        elif g.adj[self.v_star] & s != s:
            out.append("apex not adjacent to all of S")
        if self.r < 1:
            out.append("r must be >= 1")
        for v in self.T:
            if v != self.v_star and g.degrees[v] > self.r:
                out.append(f"vertex {v} in T has degree {g.degrees[v]} > r={self.r}")
        return out

    def validate(self, g: Graph) -> None:
        bad = self.violations(g)
        if bad:
            raise DomainError("invalid semi-bounded triple: " + "; ".join(bad))

    def to_json(self) -> dict:
        return {"S": list(self.S), "T": list(self.T), "v_star": self.v_star, "r": self.r}


def minimal_r(g: Graph, t: Iterable[int], v_star: int) -> int:
    return max([g.degrees[v] for v in t if v != v_star] + [1])


def find_triples(g: Graph, r: int) -> list[SemiBoundedTriple]:
    """Every triple witnessing r-semi-boundedness; empty if g is not bipartite."""
    if r < 1:
        raise DomainError("r must be >= 1")
    out = []
    for a, b in bipartitions(g):
        for s, t in ((a, b), (b, a)):
            s_mask = to_mask(s)
            for v in t:
                if g.adj[v] & s_mask != s_mask:
                    continue
                if minimal_r(g, t, v) <= r:
                    out.append(SemiBoundedTriple(tuple(s), tuple(t), v, r))
    return sorted(set(out), key=lambda x: (x.S, x.T, x.v_star))


def auto_triple(g: Graph, r: int | None = None) -> SemiBoundedTriple | None:
    """Preferred triple: smallest r, then largest apex degree, then lexicographic."""
    cands = []
    for a, b in bipartitions(g):
        for s, t in ((a, b), (b, a)):
            s_mask = to_mask(s)
            for v in t:
                if g.adj[v] & s_mask != s_mask:
                    continue
                rr = minimal_r(g, t, v)
                if r is not None:
                    if rr > r:
                        continue
                    rr = r
                cands.append(SemiBoundedTriple(tuple(s), tuple(t), v, rr))
    if not cands:
        return None
    return min(cands, key=lambda x: (x.r, -g.degrees[x.v_star], x.S, x.T, x.v_star))


# ------------------------------------------------------------------ f(nu)

def _f_mask(g: Graph, s_mask: int, t_mask: int, mask: int) -> int | None:
    if g.edges_in(mask) == 0:
        return None
    total = (mask & s_mask).bit_count()
    top = 0
    for v in iter_bits(mask & t_mask):
        d = g.degrees[v]
        total += d
        if g.adj[v] & mask and d > top:
            top = d
    return total - top


def f_value(g: Graph, triple: SemiBoundedTriple, nu: Iterable[int] | int) -> int:
    """|S∩nu| + sum of full degrees over T∩nu, minus the largest full degree
    among vertices of T∩nu that have a neighbour inside nu."""
    val = _f_mask(g, triple.s_mask, triple.t_mask, to_mask(nu))
    if val is None:
        raise DomainError("f(nu) is undefined when nu induces no edges")
    return val


@dataclass(frozen=True)
class NuStats:
    nu: tuple[int, ...]
    e_nu: int
    f_nu: int | None
    in_A: bool
    a_nu: Fraction | None
    in_B: bool
    b_nu: Fraction | None

    def to_json(self) -> dict:
        def fs(x):
            return "undefined" if x is None else f"{x.numerator}/{x.denominator}"

        return {
            "nu": list(self.nu),
            "e": self.e_nu,
            "f": "undefined" if self.f_nu is None else self.f_nu,
            "in_A": self.in_A,
            "a": fs(self.a_nu),
            "in_B": self.in_B,
            "b": fs(self.b_nu),
        }


def nu_stats(g: Graph, triple: SemiBoundedTriple, nu: Iterable[int] | int, m2_value: Fraction | None = None) -> NuStats:
    mask = to_mask(nu)
    e = g.edges_in(mask)
    f = _f_mask(g, triple.s_mask, triple.t_mask, mask)
    mindeg_ok = mask != 0 and all(g.adj[v] & mask for v in iter_bits(mask))
    r = triple.r
    size = mask.bit_count()
    in_a = in_b = False
    a = b = None
    if f is not None and mindeg_ok:
        if f - 1 < r * (e - 1):
            in_a = True
            a = Fraction(r * (size - 2) + 1 - f, r * (e - 1) + 1 - f)
        if f > e:
            in_b = True
            mm = m2(g) if m2_value is None else m2_value
            b = (size - 2 - (e - 1) / mm) / (f - e)
    return NuStats(mask_to_tuple(mask), e, f, in_a, a, in_b, b)


# ---------------------------------------------------------- vectorised table

@dataclass
class FTable:
    """Per-subset arrays for a pattern and triple (index = subset bitmask)."""

    graph: Graph
    triple: SemiBoundedTriple
    size: np.ndarray
    e: np.ndarray
    f: np.ndarray  # -1 where undefined
    min_deg_pos: np.ndarray
    in_A: np.ndarray = field(init=False)
    in_B: np.ndarray = field(init=False)

    def __post_init__(self):
        r = self.triple.r
        defined = self.f >= 0
        self.in_A = defined & self.min_deg_pos & (self.f - 1 < r * (self.e - 1))
        self.in_B = defined & self.min_deg_pos & (self.f > self.e)


_ftable_cache: dict[tuple, FTable] = {}


def f_table(g: Graph, triple: SemiBoundedTriple) -> FTable:
    key = (g, triple)
    hit = _ftable_cache.get(key)
    if hit is not None:
        return hit
    check_pattern_size(g)
    st = subset_table(g)
    masks = st.masks
    s_mask = triple.s_mask
    f = np.bitwise_count(masks & s_mask).astype(np.int64)
    top = np.zeros_like(f)
    for v in triple.T:
        d = g.degrees[v]
        inv = st.contains(v)
        f += np.where(inv, d, 0)
        top = np.maximum(top, np.where(inv & st.has_nbr[v], d, 0))
    f = f - top
    f = np.where(st.e >= 1, f, -1)
    tab = FTable(g, triple, st.size, st.e, f, st.min_deg_pos)
    if len(_ftable_cache) > 512:
        _ftable_cache.clear()
    _ftable_cache[key] = tab
    return tab


def _exact_min(nums: np.ndarray, dens: np.ndarray, masks: np.ndarray) -> tuple[Fraction, list[int]]:
    vals = nums / dens
    lo = vals.min()
    near = np.nonzero(vals <= lo + 1e-9 * max(1.0, abs(lo)))[0]
    exact = [(Fraction(int(nums[i]), int(dens[i])), int(masks[i])) for i in near]
    best = min(x for x, _ in exact)
    return best, sorted(m for x, m in exact if x == best)


@dataclass(frozen=True)
class ThresholdParam:
    value: Fraction
    witnesses: tuple[tuple[int, ...], ...]
    triple: SemiBoundedTriple

    def to_json(self) -> dict:
        return {
            "value": f"{self.value.numerator}/{self.value.denominator}",
            "witnesses": [list(w) for w in self.witnesses],
            "triple": self.triple.to_json(),
        }


def a_of_F(g: Graph, triple: SemiBoundedTriple) -> ThresholdParam:
    """min over A_F of (r(|nu|-2)+1-f)/(r(e-1)+1-f)."""
    triple.validate(g)
    tab = f_table(g, triple)
    sel = tab.in_A
    if not sel.any():
        raise DomainError("A_F is empty; a(F) is only defined when F contains a cycle")
    r = triple.r
    size, e, f = tab.size[sel], tab.e[sel], tab.f[sel]
    val, wit = _exact_min(r * (size - 2) + 1 - f, r * (e - 1) + 1 - f, np.nonzero(sel)[0])
    return ThresholdParam(val, tuple(mask_to_tuple(m) for m in wit), triple)


def b_of_F(g: Graph, triple: SemiBoundedTriple) -> ThresholdParam:
    """min over B_F of (|nu|-2-(e-1)/m2(F))/(f-e)."""
    triple.validate(g)
    tab = f_table(g, triple)
    sel = tab.in_B
    if not sel.any():
        raise DomainError("B_F is empty; b(F) is only defined when F contains a cycle")
    mm = m2(g)
    p, q = mm.numerator, mm.denominator
    size, e, f = tab.size[sel], tab.e[sel], tab.f[sel]
    val, wit = _exact_min((size - 2) * p - (e - 1) * q, p * (f - e), np.nonzero(sel)[0])
    return ThresholdParam(val, tuple(mask_to_tuple(m) for m in wit), triple)


# ------------------------------------------------------------- D and tau

@dataclass(frozen=True)
class BalancingContext:
    n: int
    q: Fraction
    delta: Fraction = Fraction(1)
    C_tau: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "q", _as_fraction(self.q))
        object.__setattr__(self, "delta", _as_fraction(self.delta))
        object.__setattr__(self, "C_tau", _as_fraction(self.C_tau))
        if not (0 < self.q <= 1):
            raise DomainError(f"edge density q must lie in (0, 1], got {self.q}")
        if self.delta <= 0:
            raise DomainError("delta must be positive")
        if self.n < 1:
            raise DomainError("n must be positive")

    @classmethod
    def from_host(cls, host: Graph, delta=1, C_tau=1) -> "BalancingContext":
        if host.e == 0:
            raise DomainError("host has no edges; q would be 0")
        return cls(host.n, Fraction(host.e, host.n**2), delta, C_tau)


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(str(x))
    return Fraction(x)


@dataclass(frozen=True)
class DValue:
    """D(nu) = delta^{delta_exp} q^{q_exp} n^{n_exp}, or infinite when nu has no edges."""

    infinite: bool
    delta_exp: int = 0
    q_exp: int = 0
    n_exp: int = 0
    log_value: float = math.inf
    exact: Fraction | None = None

    @property
    def value(self) -> float:
        if self.infinite:
            return math.inf
        try:
            return math.exp(self.log_value)
        except OverflowError:
            return math.inf

    def to_json(self) -> dict:
        if self.infinite:
            return {"value": "inf"}
        return {
            "value": self.value,
            "log_value": self.log_value,
            "delta_exp": self.delta_exp,
            "q_exp": self.q_exp,
            "n_exp": self.n_exp,
        }


def D_value(g: Graph, triple: SemiBoundedTriple, ctx: BalancingContext, nu: Iterable[int] | int) -> DValue:
    mask = to_mask(nu)
    f = _f_mask(g, triple.s_mask, triple.t_mask, mask)
    if f is None:
        return DValue(True)
    size = mask.bit_count()
    de, qe, ne = -size, g.e - f, g.n - size
    logv = de * math.log(ctx.delta) + qe * math.log(ctx.q) + ne * math.log(ctx.n)
    exact = ctx.delta**de * ctx.q**qe * Fraction(ctx.n) ** ne
    return DValue(False, de, qe, ne, logv, exact)


def _tau_candidates(g: Graph, triple: SemiBoundedTriple):
    tab = f_table(g, triple)
    sel = tab.min_deg_pos & (tab.e >= 2)
    if not sel.any():
        raise DomainError("no subset with minimum degree >= 1 and at least 2 edges")
    idx = np.nonzero(sel)[0]
    return idx, tab.size[idx], tab.e[idx], tab.f[idx]


@dataclass(frozen=True)
class TauValue:
    log_value: float
    argmax: tuple[int, ...] | None  # None when q > 1

    @property
    def value(self) -> float:
        try:
            return math.exp(self.log_value)
        except OverflowError:
            return math.inf


def tau(g: Graph, triple: SemiBoundedTriple, n: float, q: float) -> TauValue:
    """tau(n, q n^2): 1 for q > 1, else q n^2 * max_nu [q^{1-f} n^{2-|nu|}]^{1/(e-1)}.

    The max runs over subsets with minimum degree >= 1 and at least 2 edges.
    Computed in log space.
    """
    if q > 1:
        return TauValue(0.0, None)
    if q <= 0:
        raise DomainError("q must be positive")
    idx, size, e, f = _tau_candidates(g, triple)
    lq, ln = math.log(q), math.log(n)
    terms = ((1 - f) * lq + (2 - size) * ln) / (e - 1)
    j = int(np.argmax(terms))
    return TauValue(lq + 2 * ln + float(terms[j]), mask_to_tuple(int(idx[j])))


def tau_ctx(g: Graph, triple: SemiBoundedTriple, ctx: BalancingContext) -> TauValue:
    return tau(g, triple, ctx.n, float(ctx.q))


def tau_exponent(g: Graph, triple: SemiBoundedTriple, x: Fraction) -> tuple[Fraction, tuple[int, ...] | None]:
    """Exact exponent of n in tau(n, q n^2) when q = n^x.

    For x > 0 (q > 1) tau is 1, exponent 0.  Otherwise the exponent is
    max_nu 2 + x + (x(1-f) + 2 - |nu|)/(e-1).
    """
    x = Fraction(x)
    if x > 0:
        return Fraction(0), None
    idx, size, e, f = _tau_candidates(g, triple)
    best, arg = None, None
    for i in range(len(idx)):
        val = 2 + x + (x * (1 - int(f[i])) + 2 - int(size[i])) / (int(e[i]) - 1)
        if best is None or val > best:
            best, arg = val, int(idx[i])
    return best, mask_to_tuple(arg)


# ----------------------------------------------------------- (c, r)-bounded

def cr_violations(g: Graph, S, T, T_star, c: int, r: int) -> list[str]:
    s, t, ts = to_mask(S), to_mask(T), to_mask(T_star)
    out = []
    if s & t or (s | t) != g.all_mask:
        out.append("S and T do not partition V(F)")
    if any((s >> u & 1) == (s >> v & 1) for u, v in g.edge_list):
        out.append("an edge lies inside one side")
    if ts & ~t:
        out.append("T* not inside T")
    if ts.bit_count() != c:
        out.append(f"|T*| = {ts.bit_count()} != c = {c}")
    for v in iter_bits(ts):
        if g.adj[v] & s != s:
            out.append(f"T* vertex {v} not adjacent to all of S")
    for v in iter_bits(t & ~ts):
        if g.degrees[v] > r:
            out.append(f"vertex {v} in T \\ T* has degree > r")
    return out


def cr_f_value(g: Graph, S, T, T_star, c: int, r: int, nu: Iterable[int] | int) -> int:
    """Weighted count c|S∩nu| + sum_{T∩nu \\ T*} deg_F - g(nu) for (c, r)-bounded patterns."""
    bad = cr_violations(g, S, T, T_star, c, r)
    if bad:
        raise DomainError("invalid (c,r)-bounded triple: " + "; ".join(bad))
    mask = to_mask(nu)
    if g.edges_in(mask) == 0:
        raise DomainError("f(nu) is undefined when nu induces no edges")
    s, t, ts = to_mask(S), to_mask(T), to_mask(T_star)
    val = c * (mask & s).bit_count() + sum(g.degrees[v] for v in iter_bits(mask & t & ~ts))
    if mask & ts:
        gval = (ts & ~mask).bit_count()
    else:
        gval = max(
            g.degrees[w] + (c - 1) * (g.adj[w] & mask).bit_count()
            for w in iter_bits(mask & t)
            if g.adj[w] & mask
        )
    return val - gval


def require_cycle(g: Graph) -> None:
    if not has_cycle(g):
        raise DomainError("F is acyclic")
