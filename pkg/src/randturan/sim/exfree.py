"""Largest F-free subgraph of a host: exact branch-and-bound, local search, brute force."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from itertools import permutations
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from ..errors import BudgetExceeded, DomainError
from ..graph import Graph, RootedChecker, contains_copy, cycle_graph, iter_bits, iter_embedding_maps


@dataclass(frozen=True)
class ExResult:
    value: int
    witness: Graph
    method: str  # "exact" or "heuristic"
    nodes: int = 0
    baseline: int | None = None  # plain random-order greedy value (heuristic only)


def _check_pattern(F: Graph) -> None:
    if F.e == 0:
        raise DomainError("pattern must have at least one edge")


def copy_masks(G: Graph, F: Graph, limit: int | None = None) -> list[int]:
    """Distinct copies of F in G as bitmasks over ``G.edge_list`` positions."""
    idx = G.edge_index
    fe = F.edge_list
    seen: set[int] = set()
    for m in iter_embedding_maps(F, G, None):
        mask = 0
        for u, v in fe:
            a, b = m[u], m[v]
            mask |= 1 << idx[(a, b) if a < b else (b, a)]
        seen.add(mask)
        if limit is not None and len(seen) > limit:
            raise BudgetExceeded(f"more than {limit} copies of the pattern; use the heuristic")
    return sorted(seen)


def _subgraph(G: Graph, keep_mask: int) -> Graph:
    el = G.edge_list
    return Graph.from_edges(G.n, (el[i] for i in iter_bits(keep_mask)))


# ------------------------------------------------------------- brute force

def brute_force_max_f_free(G: Graph, F: Graph, max_edges: int = 22) -> int:
    """Oracle: copies by trying every injective vertex map, then all 2^e(G) subsets."""
    _check_pattern(F)
    m = G.e
    if m > max_edges:
        raise DomainError(f"brute force limited to {max_edges} host edges")
    idx = G.edge_index
    fe = F.edge_list
    copies = set()
    for img in permutations(range(G.n), F.n):
        if all(G.has_edge(img[u], img[v]) for u, v in fe):
            copies.add(sum(1 << idx[tuple(sorted((img[u], img[v])))] for u, v in fe))
    masks = np.arange(1 << m, dtype=np.int64)
    bad = np.zeros(masks.size, dtype=bool)
    for c in copies:
        bad |= (masks & c) == c
    return int(np.bitwise_count(masks[~bad]).max())


# ------------------------------------------------------------------ exact

def max_f_free_exact(
    G: Graph,
    F: Graph,
    node_budget: int = 2_000_000,
    copy_limit: int = 200_000,
    deadline: float | None = None,
    incumbent: Iterable[tuple[int, int]] | None = None,
) -> ExResult:
    """True maximum via minimum hitting set over the copies of F.

    Branches on the edges of an un-hit copy (earlier branches keep their edge),
    pruning with a disjoint-packing lower bound against the incumbent.  The
    incumbent defaults to a short local-search run.  ``deadline`` is a
    ``time.monotonic()`` value.
    """
    _check_pattern(F)
    copies = copy_masks(G, F, copy_limit)
    full = (1 << G.e) - 1
    if not copies:
        return ExResult(G.e, G, "exact")
    if incumbent is None:
        h = max_f_free_heuristic(G, F, HeuristicParams(restarts=2, iterations=200), seed=0)
        inc_edges = h.witness.edge_list
    else:
        inc_edges = list(incumbent)
    idx = G.edge_index
    keep = 0
    for e in inc_edges:
        keep |= 1 << idx[e]
    best_del = full & ~keep
    best = best_del.bit_count()
    nodes = 0

    def search(unhit: list[int], deleted: int, kept: int, ndel: int) -> None:
        nonlocal best, best_del, nodes
        nodes += 1
        if nodes > node_budget:
            raise BudgetExceeded(f"node budget {node_budget} exhausted")
        if deadline is not None and nodes & 1023 == 0 and time.monotonic() > deadline:
            raise BudgetExceeded("time budget exhausted")
        if not unhit:
            if ndel < best:
                best, best_del = ndel, deleted
            return
        if ndel + 1 >= best:
            return
        frees = sorted((c & ~kept for c in unhit), key=int.bit_count)
        if frees[0] == 0:
            return
        used = lb = 0
        for c in frees:
            if not c & used:
                used |= c
                lb += 1
                if ndel + lb >= best:
                    return
        bits = list(iter_bits(frees[0]))
        bits.sort(key=lambda b: -sum(1 for c in unhit if c >> b & 1))
        k = kept
        for b in bits:
            bit = 1 << b
            search([c for c in unhit if not c & bit], deleted | bit, k, ndel + 1)
            k |= bit

    try:
        search(copies, 0, 0, 0)
    except BudgetExceeded as exc:
        w = _subgraph(G, full & ~best_del)
        exc.partial = ExResult(w.e, w, "heuristic", nodes)
        raise
    w = _subgraph(G, full & ~best_del)
    if contains_copy(F, w):
        raise RuntimeError("internal error: exact witness contains the pattern")
    return ExResult(w.e, w, "exact", nodes)


# --------------------------------------------------------------- heuristic

@dataclass(frozen=True)
class HeuristicParams:
    restarts: int = 3
    iterations: int | None = None  # moves per restart; default 20 e(G), at most 5000
    depth: int = 2  # edges removed per move
    dense_seed: bool = True  # try a polarity-graph blow-up when F contains C4


class _Search:
    """Mutable F-free edge set with cached blocking copies for non-members."""

    def __init__(self, G: Graph, F: Graph, checker: RootedChecker):
        self.G, self.F = G, F
        self.checker = checker
        self.edges = G.edge_list
        self.eid = G.edge_index
        self.adj = [0] * G.n
        self.all = G.all_mask
        m = G.e
        self.in_sol = bytearray(m)
        self.size = 0
        self.blocker: list[tuple[int, ...] | None] = [None] * m
        self.rev: list[set[int]] = [set() for _ in range(m)]

    def _set_blocker(self, e: int, b: tuple[int, ...] | None) -> None:
        old = self.blocker[e]
        if old is not None:
            for s in old:
                self.rev[s].discard(e)
        self.blocker[e] = b
        if b is not None:
            for s in b:
                self.rev[s].add(e)

    def _link(self, e: int) -> None:
        u, v = self.edges[e]
        self.adj[u] |= 1 << v
        self.adj[v] |= 1 << u

    def _unlink(self, e: int) -> None:
        u, v = self.edges[e]
        self.adj[u] &= ~(1 << v)
        self.adj[v] &= ~(1 << u)

    def try_add(self, e: int) -> bool:
        u, v = self.edges[e]
        self._link(e)
        m = self.checker.find(self.adj, self.all, u, v)
        if m is None:
            self.in_sol[e] = 1
            self.size += 1
            self._set_blocker(e, None)
            return True
        self._unlink(e)
        eid = self.eid
        ids = []
        for a, b in self.F.edge_list:
            x, y = m[a], m[b]
            i = eid[(x, y) if x < y else (y, x)]
            if i != e:
                ids.append(i)
        self._set_blocker(e, tuple(ids))
        return False

    def force_add(self, e: int) -> None:
        self._link(e)
        self.in_sol[e] = 1
        self.size += 1

    def remove(self, e: int) -> None:
        self._unlink(e)
        self.in_sol[e] = 0
        self.size -= 1

    def greedy(self, order: Iterable[int]) -> None:
        for e in order:
            if not self.in_sol[e]:
                self.try_add(e)

    def members(self) -> list[int]:
        return [i for i, x in enumerate(self.in_sol) if x]

    def local_search(self, rng: random.Random, iterations: int, depth: int) -> list[int]:
        """Destroy-and-repair; sideways moves are accepted.  Returns the best member list."""
        m = len(self.edges)
        best_size, best = self.size, self.members()
        if self.size == m:
            return best
        for _ in range(iterations):
            x = rng.randrange(m)
            tries = 0
            while self.in_sol[x] and tries < 32:
                x = rng.randrange(m)
                tries += 1
            if self.in_sol[x]:
                continue
            if self.blocker[x] is None:
                if self.try_add(x):
                    if self.size > best_size:
                        best_size, best = self.size, self.members()
                    continue
            blk = self.blocker[x]
            R = [rng.choice(blk)]
            if depth > 1:
                u, v = self.edges[x]
                near = [
                    i
                    for w in (u, v)
                    for y in iter_bits(self.adj[w])
                    if (i := self.eid[(w, y) if w < y else (y, w)]) != R[0]
                ]
                if near:
                    R += rng.sample(near, min(depth - 1, len(near)))
            old_size = self.size
            for s in R:
                self.remove(s)
            cands = {x}
            for s in R:
                cands |= self.rev[s]
            cands -= set(R)
            cands.discard(x)
            rest = sorted(cands)
            rng.shuffle(rest)
            order = [x] + rest + R
            saved = {c: self.blocker[c] for c in order}
            added = []
            for c in order:
                if not self.in_sol[c] and self.try_add(c):
                    added.append(c)
            if self.size >= old_size:
                if self.size > best_size:
                    best_size, best = self.size, self.members()
                continue
            for c in added:
                self.remove(c)
            for s in R:
                self.force_add(s)
            for c, b in saved.items():
                self._set_blocker(c, None if self.in_sol[c] else b)
        return best


_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71)


def polarity_graph(q: int) -> list[tuple[int, int]]:
    """Erdos-Renyi polarity graph over GF(q), q prime, with loops dropped."""
    pts = [(1, a, b) for a in range(q) for b in range(q)] + [(0, 1, a) for a in range(q)] + [(0, 0, 1)]
    P = np.array(pts, dtype=np.int64)
    ortho = (P @ P.T) % q == 0
    ii, jj = np.nonzero(np.triu(ortho, 1))
    return list(zip(ii.tolist(), jj.tolist()))


def blowup_seed(G: Graph, rng: np.random.Generator) -> list[tuple[int, int]]:
    """C4-free subgraph of G from a blown-up polarity graph.

    Vertices are split at random into q^2+q+1 parts of equal size; each
    polarity edge becomes a maximum matching of G between its two parts.  The
    best prime q is kept.
    """
    n = G.n
    A = np.zeros((n, n), dtype=bool)
    for u, v in G.edge_list:
        A[u, v] = A[v, u] = True
    perm = rng.permutation(n)
    best: list[tuple[int, int]] = []
    for q in _PRIMES:
        N = q * q + q + 1
        if N > n:
            break
        k = n // N
        parts = perm[: N * k].reshape(N, k)
        out = []
        for i, j in polarity_graph(q):
            pi, pj = parts[i], parts[j]
            if k == 1:
                if A[pi[0], pj[0]]:
                    out.append((int(pi[0]), int(pj[0])))
                continue
            sub = A[np.ix_(pi, pj)]
            if not sub.any():
                continue
            match = maximum_bipartite_matching(csr_matrix(sub), perm_type="column")
            for a, b in enumerate(match.tolist()):
                if b >= 0:
                    out.append((int(pi[a]), int(pj[b])))
        if len(out) > len(best):
            best = out
    return [(u, v) if u < v else (v, u) for u, v in best]


_C4 = cycle_graph(4)


def max_f_free_heuristic(
    G: Graph,
    F: Graph,
    params: HeuristicParams = HeuristicParams(),
    seed: int = 0,
    initial: Iterable[tuple[int, int]] | None = None,
) -> ExResult:
    """Lower bound with an F-free witness; deterministic in ``seed``.

    Restart 0 is plain random-order greedy insertion followed by local search;
    later restarts start from a warm ``initial`` edge set, a polarity blow-up
    (when F contains C4) or a fresh random order.  The best witness wins, so
    the result is never below the greedy baseline or the warm start.
    """
    _check_pattern(F)
    rng = np.random.Generator(np.random.Philox(seed))
    checker = RootedChecker(F)
    m = G.e
    eid = G.edge_index
    starts: list[Sequence[int] | None] = [None]
    if initial is not None:
        starts.append([eid[e] for e in initial])
    if params.dense_seed and G.n >= 7 and contains_copy(_C4, F):
        seed_edges = blowup_seed(G, rng)
        if seed_edges:
            starts.append([eid[e] for e in seed_edges])
    while len(starts) < max(params.restarts, 1):
        starts.append(None)
    moves = params.iterations if params.iterations is not None else min(20 * m, 5000)
    inner = random.Random(int(rng.integers(2**63)))
    best: list[int] | None = None
    baseline = None
    for k, start in enumerate(starts):
        st = _Search(G, F, checker)
        order = [int(i) for i in rng.permutation(m)]
        if start is not None:
            st.greedy(start)
        st.greedy(order)
        if k == 0:
            baseline = st.size
        sol = st.local_search(inner, moves, params.depth)
        if best is None or len(sol) > len(best):
            best = sol
    el = G.edge_list
    w = Graph.from_edges(G.n, (el[i] for i in best))
    return ExResult(w.e, w, "heuristic", baseline=baseline)


def max_f_free(
    G: Graph,
    F: Graph,
    method: str = "auto",
    seed: int = 0,
    params: HeuristicParams = HeuristicParams(),
    exact_max_edges: int = 40,
    node_budget: int = 2_000_000,
    deadline: float | None = None,
    initial: Iterable[tuple[int, int]] | None = None,
) -> ExResult:
    """Dispatch: ``exact``, ``heuristic`` or ``auto`` (exact when small, falling back on budget)."""
    if method == "heuristic":
        return max_f_free_heuristic(G, F, params, seed, initial)
    if method == "exact":
        return max_f_free_exact(G, F, node_budget, deadline=deadline, incumbent=_inc(G, F, params, seed, initial))
    if method != "auto":
        raise DomainError(f"unknown method {method!r}")
    h = max_f_free_heuristic(G, F, params, seed, initial)
    if G.e > exact_max_edges:
        return h
    try:
        return max_f_free_exact(G, F, node_budget, deadline=deadline, incumbent=h.witness.edge_list)
    except BudgetExceeded:
        return h


def _inc(G, F, params, seed, initial):
    if initial is None:
        return None
    return max_f_free_heuristic(G, F, params, seed, initial).witness.edge_list
