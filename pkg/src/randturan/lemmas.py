"""Executable invariant suites over the small-graph corpus.

Each suite walks a family of inputs, counts how many cases it checked, and
keeps a dump of every counterexample (graph, triple, subset, detail).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Callable, Iterator

from .constructions import build_F_M, multigraph_balanced, multibalanced_m2_formula
from .corpus import connected_bipartite_graphs
from .density import density_report, frac_str, has_cycle, m2, m2_witnesses
from .errors import BudgetExceeded, DomainError
from .graph import Graph, Multigraph, complete_bipartite, format_graph, iter_bits, mask_to_tuple
from .semibounded import (
    BalancingContext,
    SemiBoundedTriple,
    a_of_F,
    b_of_F,
    cr_f_value,
    f_value,
    minimal_r,
    nu_stats,
    tau,
    tau_exponent,
)
from .supersat import build_dgood, check_dgood, check_maximal, double_counting_check

MAX_DUMP = 20


@dataclass
class SuiteResult:
    name: str
    statement: str
    checked: int = 0
    violations: list[dict] = field(default_factory=list)
    notes: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def fail(self, g: Graph | None, triple: SemiBoundedTriple | None, detail: str, nu=None) -> None:
        rec: dict = {"detail": detail}
        if g is not None:
            rec["graph"] = format_graph(g)
        if triple is not None:
            rec["triple"] = triple.to_json()
        if nu is not None:
            rec["nu"] = list(mask_to_tuple(nu)) if isinstance(nu, int) else list(nu)
        self.violations.append(rec)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "statement": self.statement,
            "status": "pass" if self.ok else "fail",
            "checked": self.checked,
            "violation_count": len(self.violations),
            "counterexamples": self.violations[:MAX_DUMP],
            "notes": self.notes,
        }


def apex_triples(g: Graph, extra_r: int = 1) -> list[SemiBoundedTriple]:
    """Every (S, T, v*) with v* in T complete to S, at r = r_min .. r_min + extra_r."""
    from .graph import bipartitions, to_mask

    out = set()
    for a, b in bipartitions(g):
        for s, t in ((a, b), (b, a)):
            s_mask = to_mask(s)
            for v in t:
                if g.adj[v] & s_mask != s_mask:
                    continue
                r0 = minimal_r(g, t, v)
                for r in range(r0, r0 + extra_r + 1):
                    out.add(SemiBoundedTriple(tuple(s), tuple(t), v, r))
    return sorted(out, key=lambda x: (x.S, x.T, x.v_star, x.r))


def _edge_masks(g: Graph) -> Iterator[int]:
    for mask in range(1, 1 << g.n):
        if g.edges_in(mask):
            yield mask


# --------------------------------------------------------------- f suites

def suite_removal(cases) -> SuiteResult:
    res = SuiteResult(
        "removal-recurrences",
        "f = 1 on a single edge; removing u in S changes f by 1; some v in T\\{v*} changes f by deg(v)",
    )
    unexplained = 0
    for g, tr in cases:
        s_mask, t_mask = tr.s_mask, tr.t_mask
        for mask in _edge_masks(g):
            res.checked += 1
            f = f_value(g, tr, mask)
            if mask.bit_count() == 2 and f != 1:
                res.fail(g, tr, f"single edge has f={f}", mask)
            for u in iter_bits(mask & s_mask):
                rest = mask & ~(1 << u)
                if not g.edges_in(rest):
                    continue
                diff = f - f_value(g, tr, rest)
                if diff == 1:
                    continue
                before, after = _top_degree(g, tr, mask), _top_degree(g, tr, rest)
                if before == after:
                    unexplained += 1
                res.fail(
                    g,
                    tr,
                    f"removing S-vertex {u} changes f by {diff}; max-degree term goes {before} -> {after}",
                    mask,
                )
            others = [w for w in iter_bits(mask & t_mask) if w != tr.v_star]
            if any(g.edges_in(mask & ~(1 << w)) for w in others):
                good = [
                    v
                    for v in others
                    if g.edges_in(mask & ~(1 << v)) and f - f_value(g, tr, mask & ~(1 << v)) == g.degrees[v]
                ]
                if not good:
                    res.fail(g, tr, "no T-vertex removal drops f by its degree", mask)
    # The S-vertex recurrence silently assumes the max-degree term of f is
    # unchanged; deleting u can isolate the only T-vertex attaining it.
    res.notes["s_removal_violations_with_unchanged_max_term"] = unexplained
    return res


def _top_degree(g: Graph, tr: SemiBoundedTriple, mask: int) -> int:
    return max(g.degrees[v] for v in iter_bits(mask & tr.t_mask) if g.adj[v] & mask)


def suite_f_vs_e(cases) -> SuiteResult:
    res = SuiteResult("f-at-least-e", "f(nu) >= e(nu), with equality when S and v* lie in nu")
    for g, tr in cases:
        core = tr.s_mask | 1 << tr.v_star
        for mask in _edge_masks(g):
            res.checked += 1
            f, e = f_value(g, tr, mask), g.edges_in(mask)
            if f < e:
                res.fail(g, tr, f"f={f} < e={e}", mask)
            if mask & core == core and f != e:
                res.fail(g, tr, f"nu contains S and v* but f={f} != e={e}", mask)
    return res


def suite_f_bounds(cases) -> SuiteResult:
    res = SuiteResult("f-upper-bounds", "f(nu) <= e(F) and f(nu) <= -(r-1)(|S∩nu|-1) + r(|nu|-2) + 1")
    for g, tr in cases:
        r = tr.r
        for mask in _edge_masks(g):
            res.checked += 1
            f = f_value(g, tr, mask)
            s = (mask & tr.s_mask).bit_count()
            bound = -(r - 1) * (s - 1) + r * (mask.bit_count() - 2) + 1
            if f > g.e:
                res.fail(g, tr, f"f={f} > e(F)={g.e}", mask)
            if f > bound:
                res.fail(g, tr, f"f={f} > {bound}", mask)
    return res


def suite_thresholds_defined(cases) -> SuiteResult:
    res = SuiteResult("thresholds-defined", "for cyclic F: A_F and B_F are nonempty and a(F) <= 1")
    for g, tr in cases:
        if not has_cycle(g):
            continue
        res.checked += 1
        try:
            a = a_of_F(g, tr).value
            b_of_F(g, tr)
        except DomainError as exc:
            res.fail(g, tr, str(exc))
            continue
        if a > 1:
            res.fail(g, tr, f"a(F)={frac_str(a)} > 1")
    return res


def suite_a_lower(cases) -> SuiteResult:
    res = SuiteResult("a-lower-bound", "for cyclic F: a(F) >= (r-1)/(r*Delta-1), Delta the max degree in S")
    for g, tr in cases:
        if not has_cycle(g):
            continue
        res.checked += 1
        delta = max(g.degrees[u] for u in tr.S)
        bound = Fraction(tr.r - 1, tr.r * delta - 1)
        a = a_of_F(g, tr).value
        if a < bound:
            res.fail(g, tr, f"a(F)={frac_str(a)} < {frac_str(bound)}")
    return res


def suite_regular_closed_form(cases) -> SuiteResult:
    res = SuiteResult(
        "regular-closed-form",
        "when T\\{v*} is r-regular: f(nu) = |S∩nu| + r(|T∩nu|-1), and a(nu) has the matching closed form",
    )
    for g, tr in cases:
        if any(g.degrees[v] != tr.r for v in tr.T if v != tr.v_star):
            continue
        mm = m2(g) if g.n >= 3 else None
        for mask in _edge_masks(g):
            res.checked += 1
            s = (mask & tr.s_mask).bit_count()
            t = (mask & tr.t_mask).bit_count()
            f = f_value(g, tr, mask)
            if f != s + tr.r * (t - 1):
                res.fail(g, tr, f"f={f} != {s + tr.r * (t - 1)}", mask)
                continue
            st = nu_stats(g, tr, mask, mm)
            if st.in_A:
                den = tr.r * (st.e_nu - t) + 1 - s
                closed = Fraction((tr.r - 1) * (s - 1), den) if den else None
                if closed != st.a_nu:
                    res.fail(g, tr, f"a(nu)={st.a_nu} but closed form gives {closed}", mask)
    return res


def suite_apex_in_maximizers(graphs) -> SuiteResult:
    res = SuiteResult(
        "apex-in-2-density-maximizers",
        "for cyclic F with v* complete to S: every 2-density maximiser contains v*",
    )
    for g in graphs:
        if not has_cycle(g):
            continue
        wits = m2_witnesses(g)
        for tr in apex_triples(g, 0):
            res.checked += 1
            for w in wits:
                if not w >> tr.v_star & 1:
                    res.fail(g, tr, "maximiser misses the apex", w)
    return res


def suite_b_small_p(graphs) -> SuiteResult:
    res = SuiteResult(
        "b-small-p-bound",
        "b(F) >= 1/e(F)^2 for cyclic apex graphs whose 2-density maximisers all contain S",
    )
    strict = 0
    for g in graphs:
        if not has_cycle(g):
            continue
        rep = density_report(g)
        wits = m2_witnesses(g)
        for tr in apex_triples(g, 0):
            if any(w & tr.s_mask != tr.s_mask for w in wits):
                continue
            res.checked += 1
            strict += rep.strictly_two_balanced
            b = b_of_F(g, tr).value
            if b < Fraction(1, g.e**2):
                res.fail(g, tr, f"b(F)={frac_str(b)} < 1/{g.e ** 2}")
    res.notes["strictly_2_balanced_cases"] = strict
    return res


def suite_cr_reduction(cases) -> SuiteResult:
    res = SuiteResult("cr-bounded-reduction", "with c = 1 and T* = {v*}, the (c,r)-bounded f equals f")
    for g, tr in cases:
        for mask in _edge_masks(g):
            res.checked += 1
            a = cr_f_value(g, tr.S, tr.T, (tr.v_star,), 1, tr.r, mask)
            b = f_value(g, tr, mask)
            if a != b:
                res.fail(g, tr, f"(c,r) f={a} != f={b}", mask)
    return res


# ---------------------------------------------------------------- tau suite

TAU_N = 1e6
TAU_GRID = 50


def suite_tau(cases, n: float = TAU_N, points: int = TAU_GRID) -> SuiteResult:
    res = SuiteResult(
        "tau-properties",
        "tau non-increasing and >= 1; tau <= q^(1-r) n on [n^(-1/r), n^((a-1)/r)]; "
        "tau <= n^(2-1/m2) for q >= n^(-b)",
    )
    ln = math.log(n)
    tol = 1e-9 * ln
    xs = [-2.0 + 2.5 * k / (points - 1) for k in range(points)]  # log_n q from -2 to 0.5
    rational_grid = [Fraction(k, 24) for k in range(-48, 7)]
    for g, tr in cases:
        if not has_cycle(g):
            continue
        a = a_of_F(g, tr).value
        b = b_of_F(g, tr).value
        mm = m2(g)
        r = tr.r
        res.checked += 1
        logs = [tau(g, tr, n, n**x).log_value for x in xs]
        for k in range(1, len(logs)):
            if logs[k] > logs[k - 1] + tol:
                res.fail(g, tr, f"tau increases between q=n^{xs[k - 1]:.3f} and n^{xs[k]:.3f}")
                break
        if min(logs) < -tol:
            res.fail(g, tr, "tau < 1 somewhere on the grid")
        lo_b, hi_b = -1.0 / r, float(a - 1) / r
        for x, lt in zip(xs, logs):
            if lo_b <= x <= hi_b and lt > (1 - r) * x * ln + ln + tol:
                res.fail(g, tr, f"tau > q^(1-r) n at q=n^{x:.3f}")
            if x >= -float(b) and lt > (2 - 1 / float(mm)) * ln + tol:
                res.fail(g, tr, f"tau > n^(2-1/m2) at q=n^{x:.3f}")
        # exact exponents
        for x in (Fraction(-1, r), (a - 1) / r):
            ex, _ = tau_exponent(g, tr, x)
            if ex > (1 - r) * x + 1:
                res.fail(g, tr, f"exact exponent {frac_str(ex)} > {frac_str((1 - r) * x + 1)} at x={frac_str(x)}")
        for x in (-b, Fraction(0)):
            ex, _ = tau_exponent(g, tr, x)
            if ex > 2 - 1 / mm:
                res.fail(g, tr, f"exact exponent {frac_str(ex)} > 2-1/m2 at x={frac_str(x)}")
        exps = [tau_exponent(g, tr, x)[0] for x in rational_grid]
        if any(exps[k] > exps[k - 1] for k in range(1, len(exps))):
            res.fail(g, tr, "exact exponent of tau increases on the rational grid")
        if min(exps) < 0:
            res.fail(g, tr, "exact exponent of tau negative")
    return res


# ------------------------------------------------------- supersaturation suite

def suite_dgood(graphs, hosts=None, delta=Fraction(1, 2), max_pattern_vertices: int = 5) -> SuiteResult:
    res = SuiteResult(
        "dgood-double-counting",
        "greedy family is D-good and maximal; xi_nu <= 2|Phi|/D(nu) and xi_(psi',nu) <= 2 D(nu')/D(nu)",
    )
    hosts = hosts or [complete_bipartite(3, 3), complete_bipartite(4, 4)]
    sizes = {}
    for g in graphs:
        if not has_cycle(g) or g.n > max_pattern_vertices:
            continue
        for tr in apex_triples(g, 0):
            for h in hosts:
                ctx = BalancingContext.from_host(h, delta=delta)
                fam = build_dgood(g, tr, h, ctx, order_seed=0)
                res.checked += 1
                sizes[f"{format_graph(g)} | {format_graph(h)}"] = len(fam)
                for p in check_dgood(fam):
                    res.fail(g, tr, f"host {format_graph(h)}: {p}")
                extra = check_maximal(fam)
                if extra:
                    res.fail(g, tr, f"host {format_graph(h)}: {len(extra)} addable embeddings, e.g. {extra[0]}")
                rep = double_counting_check(fam)
                for v in rep.violations_a + rep.violations_b:
                    res.fail(g, tr, f"host {format_graph(h)}: {v}")
    res.notes["delta"] = frac_str(Fraction(delta))
    res.notes["family_sizes"] = sizes
    return res


# ----------------------------------------------------------- multigraph suite

def small_multigraphs(max_vertices: int = 4, max_total: int = 5) -> Iterator[Multigraph]:
    """Labelled loopless multigraphs with 2..max_vertices vertices and total multiplicity 1..max_total."""
    for n in range(2, max_vertices + 1):
        pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
        for total in range(1, max_total + 1):
            for combo in combinations_with_replacement(range(len(pairs)), total):
                yield Multigraph.from_edges(n, [pairs[i] for i in combo])


def suite_multigraph(max_vertices: int = 4, max_total: int = 5) -> SuiteResult:
    res = SuiteResult(
        "multigraph-balance",
        "for balanced M: m2(F_M) = (2e+v-1)/(e+v-1) and a(F_M) = (v-1)/(v+2e-1)",
    )
    balanced = 0
    for M in small_multigraphs(max_vertices, max_total):
        if not multigraph_balanced(M).balanced:
            continue
        balanced += 1
        rec = build_F_M(M)
        F, tr = rec.result, rec.triple
        res.checked += 1
        got = m2(F)
        want = multibalanced_m2_formula(M)
        if got != want:
            res.fail(F, tr, f"M={M.mult}: m2={frac_str(got)} != {frac_str(want)}")
        a = a_of_F(F, tr).value
        want_a = Fraction(M.n - 1, M.n + 2 * M.e - 1)
        if a != want_a:
            res.fail(F, tr, f"M={M.mult}: a={frac_str(a)} != {frac_str(want_a)}")
    res.notes["balanced_multigraphs"] = balanced
    return res


# -------------------------------------------------------------------- runner

SUITES = (
    "removal-recurrences",
    "f-at-least-e",
    "f-upper-bounds",
    "thresholds-defined",
    "a-lower-bound",
    "regular-closed-form",
    "apex-in-2-density-maximizers",
    "b-small-p-bound",
    "cr-bounded-reduction",
    "tau-properties",
    "dgood-double-counting",
    "multigraph-balance",
)


def corpus_cases(max_vertices: int, extra_r: int = 1) -> tuple[list[Graph], list[tuple[Graph, SemiBoundedTriple]]]:
    graphs = [g for g in connected_bipartite_graphs(max_vertices) if g.e >= 1]
    cases = [(g, tr) for g in graphs for tr in apex_triples(g, extra_r)]
    return graphs, cases


def run_suites(
    max_vertices: int = 7,
    names: tuple[str, ...] | None = None,
    deadline: float | None = None,
) -> list[SuiteResult]:
    """Run the selected suites in a fixed order.

    ``deadline`` is a ``time.time()`` value checked between suites; when it
    passes, ``BudgetExceeded`` carries the finished results as ``partial``.
    """
    names = tuple(names or SUITES)
    unknown = set(names) - set(SUITES)
    if unknown:
        raise DomainError(f"unknown suites: {sorted(unknown)}")
    graphs, cases = corpus_cases(max_vertices)
    tau_cases = [(g, tr) for g, tr in cases if has_cycle(g)]
    table: dict[str, Callable[[], SuiteResult]] = {
        "removal-recurrences": lambda: suite_removal(cases),
        "f-at-least-e": lambda: suite_f_vs_e(cases),
        "f-upper-bounds": lambda: suite_f_bounds(cases),
        "thresholds-defined": lambda: suite_thresholds_defined(cases),
        "a-lower-bound": lambda: suite_a_lower(cases),
        "regular-closed-form": lambda: suite_regular_closed_form(cases),
        "apex-in-2-density-maximizers": lambda: suite_apex_in_maximizers(graphs),
        "b-small-p-bound": lambda: suite_b_small_p(graphs),
        "cr-bounded-reduction": lambda: suite_cr_reduction(cases),
        "tau-properties": lambda: suite_tau(tau_cases),
        "dgood-double-counting": lambda: suite_dgood(graphs),
        "multigraph-balance": lambda: suite_multigraph(),
    }
    out = []
    for name in SUITES:
        if name not in names:
            continue
        if deadline is not None and time.time() > deadline:
            exc = BudgetExceeded(f"budget exhausted before suite {name}")
            exc.partial = out
            raise exc
        out.append(table[name]())
    return out
