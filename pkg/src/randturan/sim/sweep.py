"""Coupled p-sweeps over G(n,p), per-cell medians and log-log slope fits."""

from __future__ import annotations

import csv
import io
import math
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy import stats

from ..errors import BudgetExceeded, DomainError, RandTuranError
from ..graph import Graph
from .exfree import HeuristicParams, max_f_free
from .sampling import check_p, graph_below, pair_uniforms

CSV_COLUMNS = ("n", "p_exp", "p", "seed", "ex_est", "method", "time_ms")


@dataclass(frozen=True)
class SweepRow:
    n: int
    p_exp: str  # "" when p was given directly
    p: float
    seed: int
    ex_est: int | None
    method: str
    time_ms: float | None = None
    error: str = ""


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    max_residual: float
    stderr: float
    points: int

    @property
    def band(self) -> tuple[float, float]:
        return (self.slope - 2 * self.stderr, self.slope + 2 * self.stderr)

    def to_json(self) -> dict:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "max_residual": self.max_residual,
            "stderr": self.stderr,
            "band": list(self.band),
            "points": self.points,
        }


def fit_slope(points: Sequence[tuple[float, float]]) -> SlopeFit:
    """Least-squares line through (log x, log y) pairs, with the worst residual."""
    if len({x for x, _ in points}) < 2:
        raise DomainError("need at least two distinct x values")
    x = np.array([p[0] for p in points], dtype=float)
    y = np.array([p[1] for p in points], dtype=float)
    res = stats.linregress(x, y)
    resid = y - (res.slope * x + res.intercept)
    stderr = float(res.stderr) if len(points) > 2 else 0.0
    return SlopeFit(float(res.slope), float(res.intercept), float(np.abs(resid).max()), stderr, len(points))


@dataclass
class SweepResult:
    rows: list[SweepRow]
    config: dict = field(default_factory=dict)
    complete: bool = True

    def cells(self) -> dict[tuple[int, str, float], list[int]]:
        out: dict[tuple[int, str, float], list[int]] = {}
        for r in self.rows:
            if r.ex_est is not None:
                out.setdefault((r.n, r.p_exp, r.p), []).append(r.ex_est)
        return out

    def medians(self) -> list[dict]:
        out = []
        for (n, px, p), vals in sorted(self.cells().items()):
            out.append(
                {
                    "n": n,
                    "p_exp": px,
                    "p": p,
                    "median": statistics.median(vals),
                    "min": min(vals),
                    "max": max(vals),
                    "count": len(vals),
                }
            )
        return out

    def slopes_in_n(self) -> dict[str, SlopeFit]:
        """For each p exponent, slope of log(median ex) against log n."""
        groups: dict[str, list[tuple[float, float]]] = {}
        for m in self.medians():
            if m["p_exp"] and m["median"] > 0:
                groups.setdefault(m["p_exp"], []).append((math.log(m["n"]), math.log(m["median"])))
        return {k: fit_slope(v) for k, v in groups.items() if len({x for x, _ in v}) >= 2}

    def slopes_in_p(self) -> dict[int, SlopeFit]:
        """For each n, slope of log(median ex) against log p."""
        groups: dict[int, list[tuple[float, float]]] = {}
        for m in self.medians():
            if m["p"] > 0 and m["median"] > 0:
                groups.setdefault(m["n"], []).append((math.log(m["p"]), math.log(m["median"])))
        return {k: fit_slope(v) for k, v in groups.items() if len({x for x, _ in v}) >= 2}

    def write_csv(self, fh, timing: bool = False, header: str | None = None) -> None:
        if header:
            fh.write(f"# {header}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            t = "" if not timing or r.time_ms is None else f"{r.time_ms:.1f}"
            ex = "" if r.ex_est is None else r.ex_est
            method = r.method if not r.error else "failed"
            w.writerow([r.n, r.p_exp, repr(r.p), r.seed, ex, method, t])

    def to_csv(self, timing: bool = False, header: str | None = None) -> str:
        buf = io.StringIO()
        self.write_csv(buf, timing, header)
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "SweepResult":
        lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
        rows = []
        for rec in csv.DictReader(lines):
            ex = rec["ex_est"]
            t = rec.get("time_ms") or ""
            rows.append(
                SweepRow(
                    int(rec["n"]),
                    rec["p_exp"],
                    float(rec["p"]),
                    int(rec["seed"]),
                    int(ex) if ex else None,
                    rec["method"],
                    float(t) if t else None,
                    "failed" if rec["method"] == "failed" else "",
                )
            )
        return cls(rows)


def chain_seed(seed: int, n: int, rep: int) -> int:
    """Independent 63-bit seed per (n, replicate), stable across runs."""
    ss = np.random.SeedSequence(seed, spawn_key=(n, rep))
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


@dataclass(frozen=True)
class _Chain:
    F: Graph
    n: int
    rep: int
    seed: int
    grid: tuple[tuple[str, float], ...]  # ascending p
    method: str
    params: HeuristicParams
    exact_max_edges: int
    node_budget: int
    deadline: float | None  # wall-clock (time.time) cutoff


def _run_chain(ch: _Chain) -> tuple[list[SweepRow], bool]:
    """One replicate at one n over ascending p, warm-starting each cell from the last.

    The hosts are nested, so the previous witness is F-free in the next host
    and estimates never decrease along the chain.
    """
    rows_, cols_, u = pair_uniforms(ch.n, ch.seed)
    prev = None
    out = []
    for i, (label, p) in enumerate(ch.grid):
        if ch.deadline is not None and time.time() > ch.deadline:
            return out, False
        t0 = time.perf_counter()
        try:
            G = graph_below(ch.n, rows_, cols_, u, p)
            res = max_f_free(
                G,
                ch.F,
                ch.method,
                seed=ch.seed + i,
                params=ch.params,
                exact_max_edges=ch.exact_max_edges,
                node_budget=ch.node_budget,
                initial=prev,
            )
            prev = res.witness.edge_list
            out.append(SweepRow(ch.n, label, p, ch.seed, res.value, res.method, (time.perf_counter() - t0) * 1e3))
        except BudgetExceeded as exc:
            part = exc.partial
            if part is not None:
                prev = part.witness.edge_list
                out.append(SweepRow(ch.n, label, p, ch.seed, part.value, part.method, (time.perf_counter() - t0) * 1e3))
            else:
                out.append(SweepRow(ch.n, label, p, ch.seed, None, ch.method, None, str(exc)))
        except RandTuranError as exc:
            out.append(SweepRow(ch.n, label, p, ch.seed, None, ch.method, None, str(exc)))
    return out, True


def _format_exp(x: float) -> str:
    return repr(float(x))


def sweep(
    F: Graph,
    n_list: Iterable[int],
    p_exps: Iterable[float] = (),
    p_values: Iterable[float] = (),
    reps: int = 5,
    method: str = "auto",
    seed: int = 0,
    params: HeuristicParams = HeuristicParams(),
    workers: int = 1,
    exact_max_edges: int = 40,
    node_budget: int = 200_000,
    deadline: float | None = None,
) -> SweepResult:
    """Full factorial over n, p and replicates.

    ``p_exps`` gives p = n^x per n so regimes line up across n; ``p_values``
    are used as-is.  Each (n, replicate) is a chain over ascending p sharing
    one uniform per vertex pair.  Output order is fixed by (n, replicate, p),
    independent of ``workers``.  When ``deadline`` (a ``time.time()`` value)
    passes, the finished rows are returned with ``complete=False``.
    """
    n_list = list(n_list)
    p_exps = [float(x) for x in p_exps]
    p_values = [float(p) for p in p_values]
    if not n_list or not (p_exps or p_values):
        raise DomainError("n grid and p grid must be nonempty")
    if reps < 1:
        raise DomainError("reps must be >= 1")
    for x in p_exps:
        if x > 0:
            raise DomainError(f"p exponent {x} > 0 gives p > 1")
    for p in p_values:
        check_p(p)
    chains = []
    for n in n_list:
        grid = [(_format_exp(x), float(n) ** x) for x in p_exps] + [("", p) for p in p_values]
        grid.sort(key=lambda g: g[1])
        for rep in range(reps):
            chains.append(
                _Chain(F, n, rep, chain_seed(seed, n, rep), tuple(grid), method, params,
                       exact_max_edges, node_budget, deadline)
            )
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_run_chain, chains))
    else:
        results = [_run_chain(c) for c in chains]
    rows = []
    complete = True
    for ch, (chain_rows, done) in zip(chains, results):
        rows.extend(chain_rows)
        complete &= done
    config = {
        "n": n_list,
        "p_exp": p_exps,
        "p": p_values,
        "reps": reps,
        "method": method,
        "seed": seed,
        "restarts": params.restarts,
        "iterations": params.iterations,
        "depth": params.depth,
    }
    return SweepResult(rows, config, complete)
