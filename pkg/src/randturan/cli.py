"""Command-line entry point.

Exit codes: 0 success, 1 a verification suite reported violations,
2 usage or input error, 3 budget exceeded (partial results are still written).
"""

from __future__ import annotations

import argparse
import json
import re
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from .constructions import build_F_M, build_F_rst
from .density import density_report, frac_str, has_cycle, m2
from .errors import BudgetExceeded, DomainError, RandTuranError, ResourceError
from .graph import (
    Graph,
    complete_bipartite,
    cycle_graph,
    format_graph,
    parse_graph,
    parse_multigraph,
    read_text,
    to_mask,
)
from .semibounded import (
    BalancingContext,
    SemiBoundedTriple,
    a_of_F,
    auto_triple,
    b_of_F,
    minimal_r,
    nu_stats,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3
DEFAULT_P_EXPS = tuple(-2 + k / 4 for k in range(9))


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def __init__(self, *a, **kw):
        super().__init__(*a, **kw)
        # let "-0.67,-0.5" through as a value rather than an option
        self._negative_number_matcher = re.compile(r"^-\d*\.?\d+(?:[,/]-?\d*\.?\d+)*$")

    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


# ------------------------------------------------------------------ inputs

def _parse_list(text: str, kind=float) -> list:
    try:
        return [kind(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise DomainError(f"bad list {text!r}: {exc}") from None


def _parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise DomainError(f"not a rational number: {text!r}") from None


def load_pattern(spec: str) -> tuple[Graph, SemiBoundedTriple | None]:
    """A graph file, ``-`` for stdin, inline ``n=...`` text, or a construct spec.

    Construct specs: ``k:a,b`` (complete bipartite), ``c:k`` (cycle),
    ``frst:r,s,t``, ``fm:<multigraph file>`` or ``fm:n=3;0-1x2;1-2``.
    Constructions also supply their canonical triple.
    """
    kind, sep, rest = spec.partition(":")
    if sep and kind in ("k", "c", "frst", "fm"):
        if kind == "k":
            a, b = _parse_list(rest, int)
            return complete_bipartite(a, b), None
        if kind == "c":
            return cycle_graph(int(rest)), None
        if kind == "frst":
            r, s, t = _parse_list(rest, int)
            rec = build_F_rst(r, s, t)
            return rec.result, rec.triple
        text = rest if rest.lstrip().startswith("n=") else read_text(rest)
        rec = build_F_M(parse_multigraph(text))
        return rec.result, rec.triple
    return parse_graph(_inline_or_file(spec)), None


GRAPH_HELP = "graph file, - for stdin, inline 'n=4; 0-1 ...', or k:a,b | c:k | frst:r,s,t | fm:..."


def _inline_or_file(spec: str) -> str:
    return spec if spec.lstrip().startswith("n=") else read_text(spec)


def parse_triple(g: Graph, spec: str | None, r: int | None, default: SemiBoundedTriple | None = None):
    """``auto`` (or None) picks a triple; ``S=0,1,2;v*=3`` fixes S and the apex, T is the rest."""
    if spec in (None, "auto"):
        if default is not None and (r is None or r == default.r):
            return default
        if default is not None:
            return SemiBoundedTriple(default.S, default.T, default.v_star, r)
        return auto_triple(g, r)
    fields = {}
    for part in spec.replace(" ", "").split(";"):
        key, eq, val = part.partition("=")
        if not eq:
            raise DomainError(f"bad triple spec {spec!r}; expected S=...;v*=...")
        fields[key] = val
    if "S" not in fields or "v*" not in fields:
        raise DomainError(f"triple spec {spec!r} needs S= and v*=")
    S = tuple(sorted(_parse_list(fields["S"], int)))
    s_mask = to_mask(S)
    T = tuple(v for v in range(g.n) if not s_mask >> v & 1)
    v_star = int(fields["v*"])
    rr = r if r is not None else minimal_r(g, T, v_star)
    tr = SemiBoundedTriple(S, T, v_star, rr)
    tr.validate(g)
    return tr


# ----------------------------------------------------------------- outputs

def _config(args) -> dict:
    skip = {"func", "budget_deadline", "out"}
    out = {}
    for k, v in sorted(vars(args).items()):
        if k in skip:
            continue
        out[k] = v
    return out


def envelope(args, result) -> dict:
    return {"tool": "randturan", "version": __version__, "config": _config(args), "result": result}


def dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def emit(args, text: str, suffix: str = "") -> None:
    if args.out:
        Path(args.out + suffix).write_text(text)
    else:
        sys.stdout.write(text)


def header_line(args) -> str:
    return f"randturan {__version__} config={json.dumps(_config(args), sort_keys=True)}"


def _threshold(fn, g, tr):
    if tr is None:
        return {"value": "undefined", "reason": "no semi-bounded triple"}
    if not has_cycle(g):
        return {"value": "undefined", "reason": "F is acyclic"}
    return fn(g, tr).to_json()


# ---------------------------------------------------------------- commands

def cmd_params_density(args) -> int:
    g, _ = load_pattern(args.graph)
    emit(args, dump_json(envelope(args, density_report(g).to_json())))
    return EXIT_OK


def cmd_params_semibounded(args) -> int:
    g, _ = load_pattern(args.graph)
    tr = parse_triple(g, args.triple, args.r)
    res: dict = {"triple": None if tr is None else tr.to_json()}
    if tr is None:
        res["reason"] = "no triple: F is not bipartite with an apex complete to one side" + (
            f" at r={args.r}" if args.r else ""
        )
    else:
        tr.validate(g)
        res["a"] = _threshold(a_of_F, g, tr)
        res["b"] = _threshold(b_of_F, g, tr)
        if g.n >= 3 and g.e >= 1:
            res["m2"] = frac_str(m2(g))
        if args.full_table:
            mm = m2(g) if g.n >= 3 and has_cycle(g) else None
            rows = []
            for mask in range(1, 1 << g.n):
                if g.edges_in(mask):
                    rows.append(nu_stats(g, tr, mask, mm).to_json())
            res["table"] = rows
    emit(args, dump_json(envelope(args, res)))
    return EXIT_OK


def _emit_construction(args, rec) -> int:
    if args.format == "json":
        emit(args, dump_json(envelope(args, {"graph": format_graph(rec.result), "sidecar": rec.sidecar()})))
        return EXIT_OK
    text = f"# {header_line(args)}\n" + format_graph(rec.result)
    if args.out:
        emit(args, text)
        emit(args, dump_json(envelope(args, rec.sidecar())), ".json")
    else:
        side = json.dumps(rec.sidecar(), sort_keys=True)
        sys.stdout.write(text + f"# sidecar {side}\n")
    return EXIT_OK


def cmd_construct_fm(args) -> int:
    return _emit_construction(args, build_F_M(parse_multigraph(_inline_or_file(args.multigraph))))


def cmd_construct_frst(args) -> int:
    return _emit_construction(args, build_F_rst(args.r, args.s, args.t))


def cmd_supersat_build(args) -> int:
    from .supersat import (
        binding_histogram,
        build_dgood,
        check_dgood,
        check_maximal,
        delta_audit,
        double_counting_check,
        saturated_partials,
        to_edge_hypergraph,
    )
    from .graph import mask_to_tuple

    F, default = load_pattern(args.pattern)
    host, _ = load_pattern(args.host)
    tr = parse_triple(F, args.triple, args.r, default)
    if tr is None:
        raise DomainError("pattern has no semi-bounded triple")
    delta = _parse_fraction(args.delta)
    if host.e == 0:
        raise DomainError("host has no edges")
    ctx = BalancingContext.from_host(host, delta=delta)
    fam = build_dgood(F, tr, host, ctx, order_seed=args.seed)
    sat: dict[str, int] = {}
    for nu, _, _ in saturated_partials(fam):
        key = ",".join(map(str, nu))
        sat[key] = sat.get(key, 0) + 1
    dc = double_counting_check(fam)
    res = {
        "pattern": format_graph(F),
        "host": {"n": host.n, "e": host.e},
        "triple": tr.to_json(),
        "q": frac_str(ctx.q),
        "delta": frac_str(delta),
        "family_size": len(fam),
        "growth_ratio": fam.growth_ratio(),
        "rejected": fam.rejected,
        "caps": {",".join(map(str, mask_to_tuple(m))): float(c) for m, c in sorted(fam.caps.items())},
        "cap_binding_histogram": binding_histogram(fam),
        "saturated_partials": dict(sorted(sat.items())),
        "dgood_recount_problems": check_dgood(fam),
        "addable_embeddings": len(check_maximal(fam)),
        "double_counting": {
            "ok": dc.ok,
            "xi": {",".join(map(str, k)): v for k, v in sorted(dc.xi.items())},
            "violations": dc.violations_a + dc.violations_b,
        },
    }
    code = EXIT_OK
    if args.audit:
        H = to_edge_hypergraph(fam)
        try:
            res["audit"] = delta_audit(H, ctx, gamma=args.gamma, sample=args.sample, seed=args.seed).to_json()
        except ResourceError as exc:
            res["audit"] = {"error": str(exc)}
            code = EXIT_BUDGET
    emit(args, dump_json(envelope(args, res)))
    return code


def cmd_simulate(args) -> int:
    from .sim.exfree import HeuristicParams
    from .sim.sweep import sweep

    F, _ = load_pattern(args.pattern)
    n_list = _parse_list(args.n, int)
    p_exps = _parse_list(args.p_exp) if args.p_exp else []
    p_vals = _parse_list(args.p) if args.p else []
    if not p_exps and not p_vals:
        p_exps = list(DEFAULT_P_EXPS)
        args.p_exp = ",".join(repr(x) for x in p_exps)
    params = HeuristicParams(restarts=args.restarts, iterations=args.iterations, depth=args.depth)
    res = sweep(
        F,
        n_list,
        p_exps,
        p_vals,
        reps=args.reps,
        method=args.method,
        seed=args.seed,
        params=params,
        workers=args.workers,
        exact_max_edges=args.exact_max_edges,
        deadline=args.budget_deadline,
    )
    if args.format == "json":
        body = {
            "complete": res.complete,
            "rows": [
                {
                    "n": r.n,
                    "p_exp": r.p_exp,
                    "p": r.p,
                    "seed": r.seed,
                    "ex_est": r.ex_est,
                    "method": r.method if not r.error else "failed",
                    "error": r.error,
                    **({"time_ms": r.time_ms} if args.timing else {}),
                }
                for r in res.rows
            ],
            "medians": res.medians(),
            "slopes_in_n": {k: v.to_json() for k, v in sorted(res.slopes_in_n().items())},
            "slopes_in_p": {str(k): v.to_json() for k, v in sorted(res.slopes_in_p().items())},
        }
        emit(args, dump_json(envelope(args, body)))
    else:
        emit(args, res.to_csv(timing=args.timing, header=header_line(args)))
    for r in res.rows:
        if r.error:
            print(f"cell n={r.n} p={r.p!r} failed: {r.error}", file=sys.stderr)
    if not res.complete:
        print("budget exceeded: partial results written", file=sys.stderr)
        return EXIT_BUDGET
    return EXIT_OK


def cmd_predict(args) -> int:
    from .sim.predict import predict

    F, default = load_pattern(args.pattern)
    tr = None
    if args.triple not in (None, "auto") or args.r is not None or default is not None:
        tr = parse_triple(F, args.triple, args.r, default)
    pred = predict(F, tr, args.theorem)
    emit(args, dump_json(envelope(args, pred.to_json())))
    return EXIT_OK


def cmd_report(args) -> int:
    from .sim.predict import ExponentPrediction, predict
    from .sim.report import build_report
    from .sim.sweep import SweepResult

    result = SweepResult.from_csv(read_text(args.csv))
    if args.prediction:
        pred = ExponentPrediction.from_json(json.loads(read_text(args.prediction)))
    elif args.pattern:
        F, default = load_pattern(args.pattern)
        pred = predict(F, default, args.theorem)
    else:
        raise UsageError("report needs --prediction or --pattern")
    emit(args, dump_json(envelope(args, build_report(result, pred))))
    return EXIT_OK


def cmd_verify_lemmas(args) -> int:
    from .lemmas import SUITES, run_suites

    names = tuple(args.suite) if args.suite else SUITES
    code = EXIT_OK
    try:
        results = run_suites(args.max_vertices, names, deadline=args.budget_deadline)
    except BudgetExceeded as exc:
        results = exc.partial or []
        code = EXIT_BUDGET
    if code == EXIT_OK and not all(r.ok for r in results):
        code = EXIT_FAIL
    if args.format == "json":
        emit(args, dump_json(envelope(args, {"suites": [r.to_json() for r in results]})))
    else:
        lines = [f"# {header_line(args)}"]
        for r in results:
            lines.append(f"{'PASS' if r.ok else 'FAIL'} {r.name} checked={r.checked} violations={len(r.violations)}")
            for v in r.to_json()["counterexamples"]:
                lines.append("    " + json.dumps(v, sort_keys=True))
            if r.notes and not r.ok:
                lines.append("    notes: " + json.dumps(r.notes, sort_keys=True))
        if code == EXIT_BUDGET:
            lines.append("# budget exceeded before all suites ran")
        emit(args, "\n".join(lines) + "\n")
    return code


# ------------------------------------------------------------------ parser

def _globals(parser: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--seed", type=int, default=d(0), help="global RNG seed (default 0)")
    parser.add_argument("--budget-ms", type=int, default=d(None), help="wall-clock budget in milliseconds")
    parser.add_argument("--out", default=d(None), help="output path (default stdout)")
    parser.add_argument("--format", choices=("json", "csv", "text"), default=d(None), help="output format")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="randturan", description="Random Turán numbers: parameters, constructions, simulation.")
    p.add_argument("--version", action="version", version=f"randturan {__version__}")
    _globals(p, suppress=False)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def leaf(parent, name, func, help_):
        sp = parent.add_parser(name, help=help_, description=help_)
        _globals(sp, suppress=True)
        sp.set_defaults(func=func)
        return sp

    params = sub.add_parser("params", help="structural parameters of a pattern")
    psub = params.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    sp = leaf(psub, "density", cmd_params_density, "2-density, maximisers and balancedness")
    sp.add_argument("graph", help=GRAPH_HELP)
    sp = leaf(psub, "semibounded", cmd_params_semibounded, "triple, a(F), b(F) and the per-subset table")
    sp.add_argument("graph", help=GRAPH_HELP)
    sp.add_argument("--r", type=int, default=None)
    sp.add_argument("--triple", default="auto", help="auto or S=0,1;v*=2")
    sp.add_argument("--full-table", action="store_true")

    cons = sub.add_parser("construct", help="tight-example constructions")
    csub = cons.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    sp = leaf(csub, "fm", cmd_construct_fm, "subdivide a multigraph and add an apex")
    sp.add_argument("multigraph", help="multigraph file, - for stdin, or inline text like 'n=3; 0-1x2 1-2'")
    sp = leaf(csub, "frst", cmd_construct_frst, "apex on S plus t private vertices per r-subset")
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--s", type=int, required=True)
    sp.add_argument("--t", type=int, required=True)

    sup = sub.add_parser("supersat", help="balanced supersaturation families")
    ssub = sup.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    sp = leaf(ssub, "build", cmd_supersat_build, "greedy maximal D-good family and its audits")
    sp.add_argument("--pattern", required=True)
    sp.add_argument("--host", required=True, help=GRAPH_HELP)
    sp.add_argument("--delta", default="1/2")
    sp.add_argument("--triple", default="auto")
    sp.add_argument("--r", type=int, default=None)
    sp.add_argument("--audit", action="store_true", help="max i-degree audit of the edge hypergraph")
    sp.add_argument("--sample", type=int, default=None, help="sample size when the exact audit is too large")
    sp.add_argument("--gamma", type=float, default=1.0)

    sp = leaf(sub, "simulate", cmd_simulate, "coupled G(n,p) sweep of ex estimates")
    sp.add_argument("--pattern", required=True)
    sp.add_argument("--n", required=True, help="comma-separated vertex counts")
    sp.add_argument("--p-exp", default=None, help="comma-separated exponents x with p = n^x")
    sp.add_argument("--p", default=None, help="comma-separated absolute p values")
    sp.add_argument("--reps", type=int, default=5)
    sp.add_argument("--method", choices=("auto", "exact", "heuristic"), default="auto")
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--restarts", type=int, default=3)
    sp.add_argument("--iterations", type=int, default=None)
    sp.add_argument("--depth", type=int, default=2)
    sp.add_argument("--exact-max-edges", type=int, default=40)
    sp.add_argument("--timing", action="store_true", help="fill the time_ms column (breaks byte-identity)")

    sp = leaf(sub, "predict", cmd_predict, "predicted thresholds and exponents as JSON")
    sp.add_argument("--pattern", required=True)
    sp.add_argument("--theorem", default="auto",
                    choices=("auto", "kst", "multigraph", "general", "semibounded", "maxdeg", "smallp"))
    sp.add_argument("--triple", default="auto")
    sp.add_argument("--r", type=int, default=None)

    sp = leaf(sub, "report", cmd_report, "merge a sweep CSV with a prediction into plot data")
    sp.add_argument("--csv", required=True)
    sp.add_argument("--prediction", default=None, help="JSON written by predict")
    sp.add_argument("--pattern", default=None, help="recompute the prediction instead")
    sp.add_argument("--theorem", default="auto")

    sp = leaf(sub, "verify-lemmas", cmd_verify_lemmas, "invariant suites over the small-graph corpus")
    sp.add_argument("--max-vertices", type=int, default=7)
    sp.add_argument("--suite", action="append", default=None, help="run only this suite (repeatable)")
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    if not argv:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    args.budget_deadline = None if args.budget_ms is None else time.time() + args.budget_ms / 1000
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ResourceError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (RandTuranError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
