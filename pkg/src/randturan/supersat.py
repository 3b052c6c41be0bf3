"""Maximal D-good embedding families, their edge hypergraphs, and Delta_i audits."""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np

from .errors import DomainError, ResourceError
from .graph import (
    Embedding,
    Graph,
    PartialEmbedding,
    iter_bits,
    iter_embedding_maps,
    mask_to_tuple,
)
from .semibounded import BalancingContext, D_value, SemiBoundedTriple, tau_ctx


@dataclass
class DGoodFamily:
    pattern: Graph
    triple: SemiBoundedTriple
    host: Graph
    ctx: BalancingContext | None
    members: list[tuple[int, ...]] = field(default_factory=list)
    # (nu mask, images of nu's vertices in increasing order) -> deg
    partial_index: dict[tuple[int, tuple[int, ...]], int] = field(default_factory=dict)
    caps: dict[int, Fraction] = field(default_factory=dict)
    binding: Counter = field(default_factory=Counter)
    rejected: int = 0

    def __len__(self) -> int:
        return len(self.members)

    def embeddings(self) -> list[Embedding]:
        return [Embedding(self.pattern, self.host, m) for m in self.members]

    def growth_ratio(self) -> float:
        """|Phi| / (q^e(F) n^v(F))."""
        if self.ctx is None:
            return 0.0
        log_den = self.pattern.e * math.log(self.ctx.q) + self.pattern.n * math.log(self.ctx.n)
        return len(self.members) * math.exp(-log_den)


def _edge_nus(pattern: Graph) -> list[tuple[int, tuple[int, ...]]]:
    out = []
    for mask in range(1, 1 << pattern.n):
        if pattern.edges_in(mask):
            out.append((mask, mask_to_tuple(mask)))
    return out


def _caps(pattern: Graph, triple: SemiBoundedTriple, ctx: BalancingContext, nus) -> dict[int, Fraction]:
    return {mask: D_value(pattern, triple, ctx, mask).exact for mask, _ in nus}


def build_dgood(
    pattern: Graph,
    triple: SemiBoundedTriple,
    host: Graph,
    ctx: BalancingContext | None = None,
    order_seed: int | None = 0,
) -> DGoodFamily:
    """Greedy maximal D-good family over the seeded embedding order.

    Each enumerated embedding is kept when every partial degree stays within
    its cap D(nu).  Counts only grow, so anything rejected once stays
    rejected and the result is maximal.
    """
    triple.validate(pattern)
    if ctx is None:
        if host.e == 0:
            return DGoodFamily(pattern, triple, host, None)
        ctx = BalancingContext.from_host(host)
    fam = DGoodFamily(pattern, triple, host, ctx)
    nus = _edge_nus(pattern)
    fam.caps = _caps(pattern, triple, ctx, nus)
    limit = [(mask, dom, math.floor(fam.caps[mask])) for mask, dom in nus]
    index = fam.partial_index
    for m in iter_embedding_maps(pattern, host, order_seed):
        keys = []
        blocked = []
        for mask, dom, cap in limit:
            key = (mask, tuple(m[i] for i in dom))
            if index.get(key, 0) + 1 > cap:
                blocked.append(mask)
            keys.append(key)
        if blocked:
            fam.rejected += 1
            for mask in blocked:
                fam.binding[mask] += 1
            continue
        for key in keys:
            index[key] = index.get(key, 0) + 1
        fam.members.append(m)
    return fam


def degree_of_partial(fam: DGoodFamily, psi: PartialEmbedding) -> int:
    if psi.domain >> fam.pattern.n:
        raise DomainError("partial embedding domain exceeds V(F)")
    if fam.pattern.edges_in(psi.domain):
        return fam.partial_index.get((psi.domain, psi.images), 0)
    dom = mask_to_tuple(psi.domain)
    return sum(1 for m in fam.members if tuple(m[i] for i in dom) == psi.images)


def recount_index(fam: DGoodFamily) -> dict[tuple[int, tuple[int, ...]], int]:
    """Partial degrees rebuilt from the member list alone."""
    out: dict[tuple[int, tuple[int, ...]], int] = defaultdict(int)
    nus = _edge_nus(fam.pattern)
    for m in fam.members:
        for mask, dom in nus:
            out[(mask, tuple(m[i] for i in dom))] += 1
    return dict(out)


def check_dgood(fam: DGoodFamily) -> list[str]:
    """Independent recount: index agreement and every deg <= D(nu)."""
    problems = []
    if fam.ctx is None:
        return [] if not fam.members else ["members present without a context"]
    if len(set(fam.members)) != len(fam.members):
        problems.append("duplicate member")
    for m in fam.members:
        if not Embedding(fam.pattern, fam.host, m).restrict(fam.pattern.all_mask).is_valid(fam.pattern, fam.host):
            problems.append(f"member {m} is not an embedding")
    counts = recount_index(fam)
    if counts != {k: v for k, v in fam.partial_index.items() if v}:
        problems.append("partial index disagrees with recount")
    for (mask, imgs), c in counts.items():
        cap = D_value(fam.pattern, fam.triple, fam.ctx, mask).exact
        if c > cap:
            problems.append(f"nu={mask_to_tuple(mask)} psi={imgs}: deg {c} > D = {cap}")
    return problems


def check_maximal(fam: DGoodFamily) -> list[tuple[int, ...]]:
    """Embeddings outside the family that could still be added (should be empty)."""
    if fam.ctx is None:
        return []
    counts = recount_index(fam)
    nus = _edge_nus(fam.pattern)
    caps = {mask: D_value(fam.pattern, fam.triple, fam.ctx, mask).exact for mask, _ in nus}
    have = set(fam.members)
    addable = []
    for m in iter_embedding_maps(fam.pattern, fam.host, None):
        if m in have:
            continue
        if all(counts.get((mask, tuple(m[i] for i in dom)), 0) + 1 <= caps[mask] for mask, dom in nus):
            addable.append(m)
    return addable


def saturated_partials(fam: DGoodFamily) -> list[tuple[tuple[int, ...], PartialEmbedding, int]]:
    """Partial embeddings with deg >= D(nu)/2, sorted by nu then images."""
    out = []
    for (mask, imgs), c in sorted(fam.partial_index.items()):
        if c and 2 * c >= fam.caps[mask]:
            out.append((mask_to_tuple(mask), PartialEmbedding(mask, imgs), c))
    return out


@dataclass(frozen=True)
class DoubleCountReport:
    xi: dict[tuple[int, ...], int]
    violations_a: list[str]
    violations_b: list[str]

    @property
    def ok(self) -> bool:
        return not self.violations_a and not self.violations_b


def double_counting_check(fam: DGoodFamily) -> DoubleCountReport:
    """xi_nu <= 2|Phi|/D(nu) and xi_{psi',nu} <= 2 D(nu')/D(nu) for nu' ⊆ nu."""
    sat = saturated_partials(fam)
    by_nu: dict[int, list[tuple[int, ...]]] = defaultdict(list)
    for nu, psi, _ in sat:
        by_nu[psi.domain].append(psi.images)
    size = len(fam.members)
    xi = {}
    bad_a, bad_b = [], []
    for mask, cap in fam.caps.items():
        k = len(by_nu.get(mask, ()))
        xi[mask_to_tuple(mask)] = k
        if k > 2 * size / cap:
            bad_a.append(f"nu={mask_to_tuple(mask)}: xi={k} > 2|Phi|/D = {2 * size / cap}")
    for mask, psis in by_nu.items():
        dom = mask_to_tuple(mask)
        sub = mask
        while sub:
            sub = (sub - 1) & mask
            if sub == 0 or sub not in fam.caps:
                continue  # D(nu') infinite
            pos = [dom.index(v) for v in iter_bits(sub)]
            groups = Counter(tuple(imgs[p] for p in pos) for imgs in psis)
            worst = max(groups.values())
            bound = 2 * fam.caps[sub] / fam.caps[mask]
            if worst > bound:
                bad_b.append(f"nu'={mask_to_tuple(sub)} nu={dom}: xi={worst} > {bound}")
    return DoubleCountReport(xi, bad_a, bad_b)


# ------------------------------------------------------------ hypergraph

@dataclass(frozen=True)
class EdgeHypergraph:
    """Hyperedges are bitmasks over ``host.edge_list`` positions."""

    host: Graph
    pattern: Graph
    triple: SemiBoundedTriple
    hyperedges: tuple[int, ...]
    multiplicity: dict[int, int]

    def __len__(self) -> int:
        return len(self.hyperedges)

    def edge_sets(self) -> list[tuple[tuple[int, int], ...]]:
        el = self.host.edge_list
        return [tuple(el[i] for i in iter_bits(h)) for h in self.hyperedges]


def _image_mask(pattern: Graph, host: Graph, m) -> int:
    idx = host.edge_index
    out = 0
    for u, v in pattern.edge_list:
        a, b = m[u], m[v]
        out |= 1 << idx[(a, b) if a < b else (b, a)]
    return out


def to_edge_hypergraph(fam: DGoodFamily) -> EdgeHypergraph:
    mult: Counter = Counter(_image_mask(fam.pattern, fam.host, m) for m in fam.members)
    hyper = tuple(sorted(mult))
    return EdgeHypergraph(fam.host, fam.pattern, fam.triple, hyper, dict(mult))


@dataclass(frozen=True)
class DeltaRow:
    i: int
    delta: int
    witness: tuple[tuple[int, int], ...]
    log_edge_rhs: float  # log of q^{e-1} n^{v-2} (tau/(q n^2))^{i-1}
    c_min: float
    log_gamma_rhs: float  # log of gamma |H|/m (tau/m)^{i-1}
    gamma_min: float
    holds: bool


@dataclass(frozen=True)
class DeltaAudit:
    rows: tuple[DeltaRow, ...]
    sampled: bool
    gamma: float
    log_tau: float
    C_min: float
    gamma_min: float

    def to_json(self) -> dict:
        return {
            "sampled": self.sampled,
            "gamma": self.gamma,
            "log_tau": self.log_tau,
            "C_min": self.C_min,
            "gamma_min": self.gamma_min,
            "rows": [
                {
                    "i": r.i,
                    "delta": r.delta,
                    "witness": [list(e) for e in r.witness],
                    "log_edge_rhs": r.log_edge_rhs,
                    "C_min": r.c_min,
                    "log_gamma_rhs": r.log_gamma_rhs,
                    "gamma_min": r.gamma_min,
                    "holds": r.holds,
                }
                for r in self.rows
            ],
        }


EXACT_AUDIT_LIMIT = 5_000_000


def _max_degrees_exact(H: EdgeHypergraph, k: int) -> list[tuple[int, int]]:
    out = []
    for i in range(1, k + 1):
        cnt: Counter = Counter()
        for h in H.hyperedges:
            bits = list(iter_bits(h))
            for sub in combinations(bits, i):
                cnt[sum(1 << b for b in sub)] += 1
        if cnt:
            best = max(cnt.values())
            wit = min(s for s, c in cnt.items() if c == best)
            out.append((best, wit))
        else:
            out.append((0, 0))
    return out


def _max_degrees_sampled(H: EdgeHypergraph, k: int, sample: int, seed: int) -> list[tuple[int, int]]:
    rng = np.random.Generator(np.random.Philox(seed))
    picks = rng.integers(0, len(H.hyperedges), size=sample)
    out = []
    for i in range(1, k + 1):
        best, wit = 0, 0
        seen = set()
        for j in picks:
            bits = list(iter_bits(H.hyperedges[int(j)]))
            chosen = rng.choice(len(bits), size=i, replace=False)
            s = sum(1 << bits[int(c)] for c in sorted(chosen))
            if s in seen:
                continue
            seen.add(s)
            d = sum(1 for h in H.hyperedges if h & s == s)
            if d > best or (d == best and s < wit):
                best, wit = d, s
        out.append((best, wit))
    return out


def delta_audit(
    H: EdgeHypergraph,
    ctx: BalancingContext,
    gamma: float = 1.0,
    sample: int | None = None,
    seed: int = 0,
    limit: int = EXACT_AUDIT_LIMIT,
) -> DeltaAudit:
    """Max i-degrees of H against both balancedness bound shapes.

    The edge-supersaturation shape is ``q^{e(F)-1} n^{v(F)-2} (tau/(q n^2))^{i-1}``
    and ``C_min`` is the smallest constant making it hold for every i.  The
    container shape is ``gamma |H|/m (tau/m)^{i-1}`` with m = e(G).
    Exact enumeration costs |H| 2^{e(F)}; beyond ``limit`` a ``sample`` size
    must be given.
    """
    F = H.pattern
    k = F.e
    work = len(H.hyperedges) * (1 << k)
    sampled = False
    if not H.hyperedges:
        degs = [(0, 0)] * k
    elif work <= limit:
        degs = _max_degrees_exact(H, k)
    elif sample:
        degs = _max_degrees_sampled(H, k, sample, seed)
        sampled = True
    else:
        raise ResourceError(
            f"exact audit needs about {work} subset visits (limit {limit}); pass a sample size"
        )
    log_tau = tau_ctx(F, H.triple, ctx).log_value
    lq, ln = math.log(ctx.q), math.log(ctx.n)
    m = H.host.e
    log_m = math.log(m) if m else 0.0
    size = len(H.hyperedges)
    rows = []
    el = H.host.edge_list
    for i, (d, wit) in enumerate(degs, start=1):
        log_rhs = (k - 1) * lq + (F.n - 2) * ln + (i - 1) * (log_tau - lq - 2 * ln)
        c_min = d * math.exp(-log_rhs) if d else 0.0
        if size:
            log_g = math.log(gamma) + math.log(size) - log_m + (i - 1) * (log_tau - log_m)
            g_min = d * math.exp(math.log(gamma) - log_g)
            holds = d == 0 or math.log(d) <= log_g + 1e-12
        else:
            log_g, g_min, holds = -math.inf, 0.0, True
        rows.append(
            DeltaRow(i, d, tuple(el[b] for b in iter_bits(wit)), log_rhs, c_min, log_g, g_min, holds)
        )
    return DeltaAudit(
        tuple(rows),
        sampled,
        gamma,
        log_tau,
        max((r.c_min for r in rows), default=0.0),
        max((r.gamma_min for r in rows), default=0.0),
    )


def sigma_embedding_check(fam: DGoodFamily, H: EdgeHypergraph, max_sigma: int | None = None) -> list[str]:
    """deg_H(sigma) <= sum of deg_Phi over sigma-embeddings, for sigma inside hyperedges.

    A sigma-embedding is a partial map onto V(sigma) under which every edge of
    sigma is the image of an edge of F[nu].
    """
    F, G = fam.pattern, fam.host
    el = G.edge_list
    sigmas: set[int] = set()
    for h in H.hyperedges:
        bits = list(iter_bits(h))
        for i in range(1, len(bits) + 1):
            for sub in combinations(bits, i):
                sigmas.add(sum(1 << b for b in sub))
    problems = []
    for count, s in enumerate(sorted(sigmas)):
        if max_sigma is not None and count >= max_sigma:
            break
        sig_edges = [el[b] for b in iter_bits(s)]
        verts = {x for e in sig_edges for x in e}
        psis = set()
        for m in fam.members:
            inv = {w: v for v, w in enumerate(m)}
            if not verts <= inv.keys():
                continue
            nu = sum(1 << inv[w] for w in verts)
            if all(F.has_edge(inv[a], inv[b]) for a, b in sig_edges):
                dom = mask_to_tuple(nu)
                psis.add(PartialEmbedding(nu, tuple(m[i] for i in dom)))
        total = sum(degree_of_partial(fam, p) for p in psis)
        deg_h = sum(1 for h in H.hyperedges if h & s == s)
        if deg_h > total:
            problems.append(f"sigma={sig_edges}: deg_H={deg_h} > {total}")
    return problems


def binding_histogram(fam: DGoodFamily) -> dict[str, int]:
    return {",".join(map(str, mask_to_tuple(k))): v for k, v in sorted(fam.binding.items())}
