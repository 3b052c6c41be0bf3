"""One test per acceptance criterion, each printing a PASS/FAIL line.

Tolerances are pinned as module constants.  Two items are known to fail and
are marked xfail with the reason spelled out: the removal recurrence for
S-vertices (false as stated, see the counterexample below) and the dense-range
slope in p at n = 200 (out of reach of the finite-size heuristic).
"""

import math
import os
import random
import subprocess
import sys
from fractions import Fraction

import pytest

from randturan.corpus import connected_bipartite_graphs
from randturan.density import density_report, has_cycle
from randturan.graph import complete_bipartite, cycle_graph
from randturan.lemmas import apex_triples, run_suites
from randturan.semibounded import BalancingContext, SemiBoundedTriple, a_of_F, b_of_F
from randturan.sim import brute_force_max_f_free, max_f_free_exact, max_f_free_heuristic, sample_bipartite, sweep
from randturan.supersat import build_dgood, check_dgood, check_maximal, double_counting_check

from conftest import ACCEPTANCE_LINES, random_graph
from test_semibounded import k33_plus_pendant

CORPUS_VERTICES = 7
GROWTH_FLOOR = 0.01
SUPERSAT_DELTA = Fraction(1, 2)
HOST_DENSITY_C = 0.5  # random hosts need q >= C n^(-1/2), the regime of the growth bound
ORACLE_INSTANCES = 200
ORACLE_MAX_EDGES = 18
HEURISTIC_MATCH_RATE = 0.85
SPARSE_NS = (60, 120, 240)
SPARSE_EXP = -0.8
SPARSE_BAND = (0.85, 1.0)
PLATEAU_EXP = -0.5
PLATEAU_SLOPE, PLATEAU_TOL = 4 / 3, 0.25
DENSE_N = 200
DENSE_EXPS = (-0.4, -0.3, -0.2, -0.1, 0.0)
DENSE_SLOPE, DENSE_TOL = 0.5, 0.2
SIM_REPS = 5
# e(G) alone fluctuates by about 12% at n = 60 and p = n^-0.8 while the band
# leaves only a few percent above the expected ratio (~0.95-0.97), so the
# sparse median needs enough replicates to bring its noise near 1%
SPARSE_REPS = 101
C4 = cycle_graph(4)


def report(label: str, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} {label}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


@pytest.fixture(scope="module")
def lemma_results():
    names = (
        "removal-recurrences",
        "f-at-least-e",
        "f-upper-bounds",
        "thresholds-defined",
        "a-lower-bound",
        "regular-closed-form",
        "apex-in-2-density-maximizers",
        "tau-properties",
        "multigraph-balance",
    )
    return {r.name: r for r in run_suites(CORPUS_VERTICES, names)}


# ------------------------------------------------------------------ criterion 1

@pytest.mark.parametrize(
    "name",
    [
        "f-at-least-e",
        "f-upper-bounds",
        "thresholds-defined",
        "a-lower-bound",
        "regular-closed-form",
        "apex-in-2-density-maximizers",
    ],
)
def test_c1_lemma_suite(lemma_results, name):
    r = lemma_results[name]
    report(f"1 lemma suite [{name}]", r.ok, f"checked={r.checked} violations={len(r.violations)}")
    assert r.ok, r.violations[:3]


@pytest.mark.xfail(
    strict=True,
    reason="removing an S-vertex can isolate the T-vertex that carried the max-degree term, "
    "so f drops by 1 - (old max - new max) instead of 1; first seen on 6 vertices",
)
def test_c1_removal_recurrences(lemma_results):
    r = lemma_results["removal-recurrences"]
    first = r.violations[0] if r.violations else None
    detail = f"checked={r.checked} violations={len(r.violations)}"
    if first:
        detail += f"; e.g. {first['graph'].strip().replace(chr(10), ' ')} nu={first['nu']} ({first['detail']})"
    report("1 lemma suite [removal-recurrences]", r.ok, detail)
    assert r.ok


def test_c1_removal_failures_are_all_max_term_drops(lemma_results):
    r = lemma_results["removal-recurrences"]
    assert r.notes["s_removal_violations_with_unchanged_max_term"] == 0
    assert all("max-degree term goes" in v["detail"] for v in r.violations)


# ------------------------------------------------------------------ criterion 2

def test_c2_closed_forms(lemma_results):
    checks = []
    a22 = a_of_F(complete_bipartite(2, 2), SemiBoundedTriple((0, 1), (2, 3), 2, 2)).value
    checks.append(("a(K22)=(r-1)/(rt-1)=1/3", a22 == Fraction(1, 3)))
    a33 = a_of_F(complete_bipartite(3, 3), SemiBoundedTriple((0, 1, 2), (3, 4, 5), 3, 3)).value
    checks.append(("a(K33)=1/4", a33 == Fraction(1, 4)))
    mg = lemma_results["multigraph-balance"]
    checks.append((f"a(F_M), m2(F_M) over {mg.checked} balanced M", mg.ok and mg.checked > 0))
    b4 = b_of_F(C4, SemiBoundedTriple((0, 2), (1, 3), 1, 2)).value
    checks.append(("b(C4)=1/3", b4 == Fraction(1, 3)))
    g, t = k33_plus_pendant()
    checks.append(("b(K33+pendant)=0", b_of_F(g, t).value == 0))
    strict, bad = 0, []
    for h in connected_bipartite_graphs(CORPUS_VERTICES):
        if not has_cycle(h) or not density_report(h).strictly_two_balanced:
            continue
        for tr in apex_triples(h, 0):
            strict += 1
            if b_of_F(h, tr).value < Fraction(1, h.e**2):
                bad.append((h, tr))
    checks.append((f"b>=1/e^2 on {strict} strictly 2-balanced apex cases", not bad and strict > 0))
    ok = all(c for _, c in checks)
    report("2 closed forms", ok, "; ".join(f"{n} {'ok' if c else 'MISMATCH'}" for n, c in checks))
    assert ok


# ------------------------------------------------------------------ criterion 3

def test_c3_tau(lemma_results):
    r = lemma_results["tau-properties"]
    report("3 tau suite", r.ok, f"checked={r.checked} cyclic (graph, triple) cases, violations={len(r.violations)}")
    assert r.ok, r.violations[:3]


# ------------------------------------------------------------------ criterion 4

def supersat_hosts():
    hosts = [("K44", complete_bipartite(4, 4)), ("K55", complete_bipartite(5, 5))]
    rng = random.Random(2024)
    while len(hosts) < 22:
        a, b = rng.randint(4, 7), rng.randint(4, 7)
        g = sample_bipartite(a, b, rng.uniform(0.5, 0.9), rng.randrange(2**31))
        if g.e and g.e / g.n**2 >= HOST_DENSITY_C / math.sqrt(g.n):
            hosts.append((f"B({a},{b})#{len(hosts) - 1}", g))
    return hosts


def test_c4_supersaturation_audit():
    triple = SemiBoundedTriple((0, 2), (1, 3), 1, 2)
    problems, ratios = [], []
    for name, host in supersat_hosts():
        ctx = BalancingContext.from_host(host, delta=SUPERSAT_DELTA)
        fam = build_dgood(C4, triple, host, ctx, order_seed=0)
        if check_dgood(fam):
            problems.append(f"{name}: recount")
        if check_maximal(fam):
            problems.append(f"{name}: not maximal")
        if not double_counting_check(fam).ok:
            problems.append(f"{name}: double counting")
        ratios.append(fam.growth_ratio())
    low = min(ratios)
    trend = "above" if low >= GROWTH_FLOOR else "BELOW (reported only)"
    report(
        "4 supersaturation audit",
        not problems,
        f"22 hosts (random ones with q >= {HOST_DENSITY_C} n^-1/2), delta={SUPERSAT_DELTA}, problems={problems or 'none'}; "
        f"min |Phi|/(q^e n^v)={low:.4f} {trend} floor {GROWTH_FLOOR}",
    )
    assert not problems


# ------------------------------------------------------------------ criterion 5

def test_c5_exact_oracle():
    rng = random.Random(5)
    patterns = [C4, cycle_graph(3), complete_bipartite(1, 3)]
    mismatch, matches, over = [], 0, []
    for i in range(ORACLE_INSTANCES):
        F = patterns[i % len(patterns)]
        while True:
            g = random_graph(rng.randint(5, 9), rng.uniform(0.2, 0.8), rng)
            if g.e <= ORACLE_MAX_EDGES:
                break
        exact = max_f_free_exact(g, F).value
        brute = brute_force_max_f_free(g, F)
        heur = max_f_free_heuristic(g, F, seed=i).value
        if exact != brute:
            mismatch.append(i)
        if heur > exact:
            over.append(i)
        matches += heur == exact
    rate = matches / ORACLE_INSTANCES
    ok = not mismatch and not over and rate >= HEURISTIC_MATCH_RATE
    report(
        "5 exact oracle",
        ok,
        f"{ORACLE_INSTANCES} instances, exact!=brute: {len(mismatch)}, heuristic>exact: {len(over)}, "
        f"heuristic=exact rate {rate:.3f} (need >= {HEURISTIC_MATCH_RATE})",
    )
    assert ok


# ------------------------------------------------------------------ criterion 6

def test_c6_sparse_ratio():
    res = sweep(C4, list(SPARSE_NS), p_exps=[SPARSE_EXP], reps=SPARSE_REPS, method="heuristic", seed=0)
    ratios = [(c["n"], c["median"] / (c["p"] * math.comb(c["n"], 2))) for c in res.medians()]
    lo, hi = SPARSE_BAND
    ok = len(ratios) == len(SPARSE_NS) and all(lo <= r <= hi for _, r in ratios)
    detail = ", ".join(f"n={n}: {r:.3f}" for n, r in ratios)
    report("6(i) sparse ratio", ok, f"{detail} in [{lo}, {hi}] over {SPARSE_REPS} replicates")
    assert ok


def test_c6_plateau_slope():
    res = sweep(C4, list(SPARSE_NS), p_exps=[PLATEAU_EXP], reps=SIM_REPS, method="heuristic", seed=0)
    fit = res.slopes_in_n()[repr(PLATEAU_EXP)]
    ok = abs(fit.slope - PLATEAU_SLOPE) <= PLATEAU_TOL
    report("6(ii) plateau slope", ok, f"fitted {fit.slope:.3f} vs 4/3 +- {PLATEAU_TOL}")
    assert ok


@pytest.mark.xfail(
    strict=True,
    reason="at n = 200 witnesses at p = n^-0.4 already have >= 956 edges while ex(200, C4) <= 1462, "
    "so the average log-slope over the window is at most 0.20 < 0.30",
)
def test_c6_dense_slope():
    res = sweep(C4, [DENSE_N], p_exps=list(DENSE_EXPS), reps=3, method="heuristic", seed=0)
    fit = res.slopes_in_p()[DENSE_N]
    ok = abs(fit.slope - DENSE_SLOPE) <= DENSE_TOL
    meds = ", ".join(f"p=n^{c['p_exp']}: {c['median']}" for c in res.medians())
    report("6(iii) dense slope", ok, f"fitted {fit.slope:.3f} vs 1/2 +- {DENSE_TOL} ({meds})")
    assert ok


# ------------------------------------------------------------------ criterion 7

CLI_RUNS = [
    ["params", "density", "k:3,3"],
    ["params", "semibounded", "c:4", "--full-table"],
    ["construct", "fm", "n=3; 0-1 1-2x2 0-2x3"],
    ["construct", "frst", "--r", "2", "--s", "3", "--t", "2"],
    ["supersat", "build", "--pattern", "c:4", "--host", "k:5,5", "--audit", "--seed", "3"],
    ["simulate", "--pattern", "c:4", "--n", "12,16", "--p-exp", "-0.6,-0.3", "--reps", "2", "--seed", "7"],
    ["predict", "--pattern", "k:2,2"],
    ["verify-lemmas", "--max-vertices", "5"],
]


def _cli(argv, out):
    env = dict(os.environ, PYTHONHASHSEED="random")
    return subprocess.run([sys.executable, "-m", "randturan", *argv, "--out", str(out)], env=env, capture_output=True)


def test_c7_cli_determinism(tmp_path):
    differing = []
    for k, argv in enumerate(CLI_RUNS):
        a, b = tmp_path / f"{k}a", tmp_path / f"{k}b"
        ra, rb = _cli(argv, a), _cli(argv, b)
        if ra.returncode != 0 or rb.returncode != 0 or a.read_bytes() != b.read_bytes():
            differing.append(argv[0] + (" " + argv[1] if not argv[1].startswith("-") else ""))
    csv = tmp_path / "5a"
    pred = tmp_path / "6a"
    r1 = subprocess.run([sys.executable, "-m", "randturan", "report", "--csv", str(csv), "--prediction", str(pred)], capture_output=True)
    r2 = subprocess.run([sys.executable, "-m", "randturan", "report", "--csv", str(csv), "--prediction", str(pred)], capture_output=True)
    if r1.returncode or r1.stdout != r2.stdout:
        differing.append("report")
    report("7 determinism", not differing, f"{len(CLI_RUNS) + 1} subcommands run twice in fresh processes; differing: {differing or 'none'}")
    assert not differing
