"""Predicted exponents of ex(G(n,p), F) in the three p-ranges, as exact rationals.

Every threshold is an exponent x with p = n^x.  Each applicable theorem
family produces an ``ExponentPrediction`` whose ``provenance`` names the
family, the triple used and any hypothesis taken on trust.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from ..constructions import general_balance_check, multigraph_balanced, multigraph_of
from ..density import density_report, frac_str, has_cycle, m2, m2_witnesses
from ..errors import DomainError
from ..graph import Graph, bipartitions, components, iter_bits, to_mask
from ..semibounded import SemiBoundedTriple, a_of_F, auto_triple, b_of_F

SPARSE = "(1+o(1)) p C(n,2)"

THEOREMS = ("auto", "kst", "multigraph", "general", "semibounded", "maxdeg", "smallp")


@dataclass(frozen=True)
class ExponentPrediction:
    theorem: str | None
    p_lower_threshold: Fraction | None = None
    p_upper_threshold: Fraction | None = None
    plateau_exponent: Fraction | None = None
    dense_exponents: tuple[Fraction, Fraction] | None = None  # (p-exponent, n-exponent)
    plateau_proven_upto: Fraction | None = None
    sparse: str = SPARSE
    triple: SemiBoundedTriple | None = None
    provenance: dict[str, str] = field(default_factory=dict)
    assumptions: tuple[str, ...] = ()
    reason: str = ""

    @property
    def applicable(self) -> bool:
        return self.theorem is not None

    @property
    def degenerate(self) -> bool:
        lo, hi = self.p_lower_threshold, self.p_upper_threshold
        return lo is not None and hi is not None and lo > hi

    def n_exponent_at(self, x: Fraction) -> tuple[str, Fraction | None]:
        """Predicted exponent of n in ex(G(n, n^x), F), with the regime name."""
        if not self.applicable:
            return "none", None
        x = Fraction(x)
        lo, hi = self.p_lower_threshold, self.p_upper_threshold
        if x < lo:
            return "sparse", 2 + x
        dense = None
        if self.dense_exponents is not None:
            a, b = self.dense_exponents
            dense = a * x + b
        if hi is not None and x > hi:
            if dense is None:
                return "unresolved", None
            return "dense", max(dense, self.plateau_exponent)
        return "plateau", self.plateau_exponent

    def to_json(self) -> dict:
        def fs(x):
            return None if x is None else frac_str(x)

        if not self.applicable:
            return {"prediction": None, "reason": self.reason}
        return {
            "theorem": self.theorem,
            "p_lower_threshold": fs(self.p_lower_threshold),
            "p_upper_threshold": fs(self.p_upper_threshold),
            "plateau_exponent": fs(self.plateau_exponent),
            "plateau_proven_upto": fs(self.plateau_proven_upto),
            "dense_exponents": None
            if self.dense_exponents is None
            else {"p": fs(self.dense_exponents[0]), "n": fs(self.dense_exponents[1])},
            "sparse": self.sparse,
            "degenerate": self.degenerate,
            "triple": None if self.triple is None else self.triple.to_json(),
            "provenance": dict(sorted(self.provenance.items())),
            "assumptions": list(self.assumptions),
        }

    @classmethod
    def from_json(cls, d: dict) -> "ExponentPrediction":
        """Inverse of :meth:`to_json`; also accepts a full ``predict`` CLI document."""
        d = d.get("result", d)
        if d.get("prediction", "") is None:
            return no_prediction(d.get("reason", ""))

        def fr(x):
            return None if x is None else Fraction(x)

        dense = d.get("dense_exponents")
        tr = d.get("triple")
        return cls(
            d["theorem"],
            fr(d.get("p_lower_threshold")),
            fr(d.get("p_upper_threshold")),
            fr(d.get("plateau_exponent")),
            None if dense is None else (Fraction(dense["p"]), Fraction(dense["n"])),
            fr(d.get("plateau_proven_upto")),
            d.get("sparse", SPARSE),
            None if tr is None else SemiBoundedTriple(tuple(tr["S"]), tuple(tr["T"]), tr["v_star"], tr["r"]),
            dict(d.get("provenance", {})),
            tuple(d.get("assumptions", ())),
        )


def no_prediction(reason: str) -> ExponentPrediction:
    return ExponentPrediction(None, reason=reason)


def _dense(r: int) -> tuple[Fraction, Fraction]:
    return (1 - Fraction(1, r), 2 - Fraction(1, r))


def krt_extremal_known(r: int, t: int) -> bool:
    """Cases where ex(n, K_{r,t}) = Theta(n^{2-1/r}) is an established fact."""
    return t >= r and (r <= 2 or (r == 3 and t >= 3) or t > math.factorial(r - 1))


def largest_krt(F: Graph, r: int) -> int:
    """Largest t >= 1 such that some r vertices share t common neighbours, else 0."""
    best = 0
    for R in combinations(range(F.n), r):
        common = F.all_mask & ~to_mask(R)
        for v in R:
            common &= F.adj[v]
        best = max(best, common.bit_count())
    return best


def _krt_assumption(F: Graph, r: int) -> tuple[str, bool]:
    t = largest_krt(F, r)
    if t < r:
        return f"F contains no K_{{{r},t}} with t >= {r}; the dense lower bound is not claimed", False
    if krt_extremal_known(r, t):
        return f"F contains K_{{{r},{t}}} and ex(n,K_{{{r},{t}}}) = Theta(n^{{2-1/{r}}}) is known", True
    return f"F contains K_{{{r},{t}}}; ex(n,K_{{{r},{t}}}) = Theta(n^{{2-1/{r}}}) is assumed", True


def _gate(F: Graph) -> str | None:
    if F.e < 2:
        return "pattern needs at least two edges"
    if not bipartitions(F):
        return "pattern is not bipartite"
    if not has_cycle(F):
        return "pattern is acyclic; every supported theorem needs a cycle"
    return None


def _apex_triples(F: Graph) -> list[SemiBoundedTriple]:
    """All (S, T, v*) with v* in T adjacent to all of S, at the smallest valid r."""
    out = []
    for S, T in bipartitions(F):
        for side, other in ((S, T), (T, S)):
            s_mask = to_mask(side)
            for v in other:
                if F.adj[v] & s_mask != s_mask:
                    continue
                r = max([F.degrees[w] for w in other if w != v] + [1])
                out.append(SemiBoundedTriple(tuple(side), tuple(other), v, r))
    return sorted(set(out), key=lambda t: (t.r, -len(t.S), t.S, t.v_star))


def _candidates(F: Graph, triple: SemiBoundedTriple | None) -> list[SemiBoundedTriple]:
    if triple is not None:
        triple.validate(F)
        return [triple]
    return _apex_triples(F)


def predict_kst(F: Graph, triple=None) -> ExponentPrediction:
    if (why := _gate(F)) is not None:
        return no_prediction(why)
    if len(components(F)) != 1 or min(F.degrees) == 0:
        return no_prediction("pattern is not a connected complete bipartite graph")
    S, T = bipartitions(F)[0]
    if F.e != len(S) * len(T):
        return no_prediction("pattern is not complete bipartite")
    r, t = sorted((len(S), len(T)))
    d = r * t - 1
    note, _ = _krt_assumption(F, r)
    return ExponentPrediction(
        "kst",
        p_lower_threshold=-Fraction(r + t - 2, d),
        p_upper_threshold=-Fraction(r - 1, d),
        plateau_exponent=2 - Fraction(r + t - 2, d),
        dense_exponents=_dense(r),
        plateau_proven_upto=-Fraction(r - 1, d),
        provenance={
            "family": f"K_{{{r},{t}}} three-range theorem",
            "thresholds": "-(r+t-2)/(rt-1) and -(r-1)/(rt-1)",
        },
        assumptions=(note,),
    )


def predict_multigraph(F: Graph, triple=None) -> ExponentPrediction:
    if (why := _gate(F)) is not None:
        return no_prediction(why)
    for tr in _candidates(F, triple):
        if any(F.degrees[v] != 2 for v in tr.T if v != tr.v_star):
            continue
        M = multigraph_of(F, tr)
        if M is None or M.n < 2 or not multigraph_balanced(M).balanced:
            continue
        v, e = M.n, M.e
        d = v + 2 * e - 1
        tr2 = SemiBoundedTriple(tr.S, tr.T, tr.v_star, 2)
        return ExponentPrediction(
            "multigraph",
            p_lower_threshold=-Fraction(v + e - 1, d),
            p_upper_threshold=-Fraction(v - 1, d),
            plateau_exponent=2 - Fraction(v + e - 1, d),
            dense_exponents=_dense(2),
            plateau_proven_upto=-Fraction(v - 1, d),
            triple=tr2,
            provenance={
                "family": "F_M for a balanced multigraph M",
                "M": f"v(M)={v}, e(M)={e}",
                "thresholds": "-(v+e-1)/(v+2e-1) and -(v-1)/(v+2e-1)",
            },
        )
    return no_prediction("pattern is not F_M for a balanced multigraph M")


def predict_general(F: Graph, triple=None) -> ExponentPrediction:
    if (why := _gate(F)) is not None:
        return no_prediction(why)
    if not density_report(F).two_balanced:
        return no_prediction("pattern is not 2-balanced")
    for tr in _candidates(F, triple):
        rest = [F.degrees[v] for v in tr.T if v != tr.v_star]
        if not rest or len(set(rest)) != 1 or rest[0] < 2 or len(tr.S) < 2:
            continue
        r = rest[0]
        tr2 = SemiBoundedTriple(tr.S, tr.T, tr.v_star, r)
        if not general_balance_check(F, tr2).balanced:
            continue
        note, ok = _krt_assumption(F, r)
        if not ok:
            continue
        s, t = len(tr.S), len(tr.T)
        d = s - 1 + r * (t - 1)
        return ExponentPrediction(
            "general",
            p_lower_threshold=-Fraction(s + t - 2, d),
            p_upper_threshold=-Fraction(s - 1, d),
            plateau_exponent=2 - Fraction(s + t - 2, d),
            dense_exponents=_dense(r),
            plateau_proven_upto=-Fraction(s - 1, d),
            triple=tr2,
            provenance={
                "family": "exactly r-regular T-side with the mu-balance condition",
                "thresholds": "-(|S|+|T|-2)/(|S|-1+r(|T|-1)) and -(|S|-1)/(|S|-1+r(|T|-1))",
            },
            assumptions=(note,),
        )
    return no_prediction("no triple satisfies the regular-T balance hypotheses")


def predict_semibounded(F: Graph, triple=None) -> ExponentPrediction:
    if (why := _gate(F)) is not None:
        return no_prediction(why)
    tr = triple if triple is not None else auto_triple(F)
    if tr is None:
        return no_prediction("pattern has no apex triple")
    tr.validate(F)
    m = m2(F)
    a = a_of_F(F, tr).value
    b = b_of_F(F, tr).value
    r = tr.r
    upto = min(b - 1 / m, Fraction(1, r) - 1 / m)
    note, tight = _krt_assumption(F, r)
    return ExponentPrediction(
        "semibounded",
        p_lower_threshold=-1 / m,
        p_upper_threshold=-a,
        plateau_exponent=2 - 1 / m,
        dense_exponents=_dense(r),
        plateau_proven_upto=upto,
        triple=tr,
        provenance={
            "family": "r-semi-bounded upper bounds via a(F) and b(F)",
            "a(F)": frac_str(a),
            "b(F)": frac_str(b),
            "dense": "O(p^{1-1/r} n^{2-1/r}) for p >= n^{-a(F)}",
            "plateau": "n^{2-1/m2} polylog for n^{-1/m2} <= p <= n^{min(b-1/m2, 1/r-1/m2)}",
            "sparse": "general sparse-range estimate below n^{-1/m2}",
        },
        assumptions=(note,) if tight else (note, "dense regime is an upper bound only"),
    )


def predict_maxdeg(F: Graph, triple=None) -> ExponentPrediction:
    if (why := _gate(F)) is not None:
        return no_prediction(why)
    best = None
    for S, T in bipartitions(F):
        for side, other in ((S, T), (T, S)):
            for v in other:
                r = max([F.degrees[w] for w in other if w != v] + [2])
                delta = max([(F.adj[u] | 1 << v).bit_count() for u in side] + [2])
                thr = Fraction(r - 1, r * delta - 1)
                key = (r, -thr, tuple(side), v)
                if best is None or key < best[0]:
                    best = (key, r, delta, thr, side, other, v)
    _, r, delta, thr, side, other, v = best
    m = m2(F)
    note, tight = _krt_assumption(F, r)
    return ExponentPrediction(
        "maxdeg",
        p_lower_threshold=-1 / m,
        p_upper_threshold=-thr,
        plateau_exponent=2 - 1 / m,
        dense_exponents=_dense(r),
        provenance={
            "family": "bounded T-degrees with one exceptional vertex",
            "r": str(r),
            "Delta": str(delta),
            "split": f"S={list(side)}, T={list(other)}, v*={v}",
            "threshold": "-(r-1)/(r Delta - 1)",
        },
        assumptions=(note,) if tight else (note, "dense regime is an upper bound only"),
    )


def predict_smallp(F: Graph, triple=None) -> ExponentPrediction:
    if (why := _gate(F)) is not None:
        return no_prediction(why)
    wit = m2_witnesses(F)
    for tr in _candidates(F, triple):
        s = tr.s_mask
        if all(w & s == s for w in wit):
            m = m2(F)
            upto = Fraction(1, F.e**2) - 1 / m
            return ExponentPrediction(
                "smallp",
                p_lower_threshold=-1 / m,
                p_upper_threshold=upto,
                plateau_exponent=2 - 1 / m,
                plateau_proven_upto=upto,
                triple=tr,
                provenance={
                    "family": "apex graphs whose 2-density maximisers contain S",
                    "range": "n^{-1/m2} << p <= n^{1/e(F)^2 - 1/m2}",
                },
            )
    return no_prediction("some 2-density maximiser misses S for every apex triple")


_DISPATCH = {
    "kst": predict_kst,
    "multigraph": predict_multigraph,
    "general": predict_general,
    "semibounded": predict_semibounded,
    "maxdeg": predict_maxdeg,
    "smallp": predict_smallp,
}

AUTO_ORDER = ("kst", "multigraph", "general", "semibounded", "maxdeg", "smallp")


def predict(F: Graph, triple: SemiBoundedTriple | None = None, theorem: str = "auto") -> ExponentPrediction:
    """Thresholds for ``theorem``; ``auto`` takes the first applicable family in ``AUTO_ORDER``."""
    if theorem not in THEOREMS:
        raise DomainError(f"unknown theorem {theorem!r}; choose from {', '.join(THEOREMS)}")
    if theorem != "auto":
        return _DISPATCH[theorem](F, triple)
    reasons = []
    for name in AUTO_ORDER:
        p = _DISPATCH[name](F, triple)
        if p.applicable:
            return p
        reasons.append(f"{name}: {p.reason}")
    return no_prediction("; ".join(reasons))
