"""Graphs, multigraphs and embedding enumeration.

Vertices are dense integers ``0..n-1`` and vertex subsets are Python ints used
as bitmasks (bit ``i`` set means vertex ``i`` is in the subset).  Python ints
have no width limit, so hosts of any size work here; the exponential routines
elsewhere in the package impose their own caps.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import DomainError, GraphParseError

Edge = tuple[int, int]


def iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def to_mask(vertices: Iterable[int] | int) -> int:
    if isinstance(vertices, (int, np.integer)):
        return int(vertices)
    m = 0
    for v in vertices:
        m |= 1 << int(v)
    return m


def mask_to_tuple(mask: int) -> tuple[int, ...]:
    return tuple(iter_bits(mask))


def _norm(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    """Finite simple undirected graph on ``range(n)``."""

    n: int
    edges: frozenset[Edge] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.n < 0:
            raise DomainError("vertex count must be nonnegative")
        for u, v in self.edges:
            if u == v:
                raise DomainError(f"self-loop at {u}")
            if not (0 <= u < v < self.n):
                raise DomainError(f"edge {u}-{v} not normalized or out of range for n={self.n}")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "Graph":
        norm = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise DomainError(f"self-loop at {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise DomainError(f"edge {u}-{v} out of range for n={n}")
            norm.add(_norm(u, v))
        return cls(n, frozenset(norm))

    @cached_property
    def adj(self) -> tuple[int, ...]:
        a = [0] * self.n
        for u, v in self.edges:
            a[u] |= 1 << v
            a[v] |= 1 << u
        return tuple(a)

    @cached_property
    def degrees(self) -> tuple[int, ...]:
        return tuple(m.bit_count() for m in self.adj)

    @cached_property
    def edge_list(self) -> tuple[Edge, ...]:
        return tuple(sorted(self.edges))

    @cached_property
    def edge_index(self) -> dict[Edge, int]:
        return {e: i for i, e in enumerate(self.edge_list)}

    @property
    def e(self) -> int:
        return len(self.edges)

    @property
    def all_mask(self) -> int:
        return (1 << self.n) - 1

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return mask_to_tuple(self.adj[v])

    def edges_in(self, mask: int) -> int:
        """Number of edges with both ends in the vertex subset ``mask``."""
        return sum((self.adj[v] & mask).bit_count() for v in iter_bits(mask)) // 2

    def with_edges(self, edges: Iterable[Edge]) -> "Graph":
        return Graph.from_edges(self.n, edges)

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, e={self.e})"


@dataclass(frozen=True)
class Multigraph:
    """Loopless multigraph; ``mult`` holds ``((u, v), multiplicity)`` sorted by pair."""

    n: int
    mult: tuple[tuple[Edge, int], ...] = ()

    def __post_init__(self):
        for (u, v), m in self.mult:
            if u == v:
                raise DomainError(f"loop at {u}: multigraph must be loopless")
            if not (0 <= u < v < self.n):
                raise DomainError(f"pair {u}-{v} out of range for n={self.n}")
            if m < 1:
                raise DomainError("multiplicities must be >= 1")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "Multigraph":
        """Build from pairs ``(u, v)`` (repeats add up) or triples ``(u, v, m)``."""
        c: Counter[Edge] = Counter()
        for item in edges:
            u, v = int(item[0]), int(item[1])
            m = int(item[2]) if len(item) > 2 else 1
            if u == v:
                raise DomainError(f"loop at {u}: multigraph must be loopless")
            if not (0 <= u < n and 0 <= v < n):
                raise DomainError(f"pair {u}-{v} out of range for n={n}")
            c[_norm(u, v)] += m
        return cls(n, tuple(sorted(c.items())))

    @property
    def e(self) -> int:
        return sum(m for _, m in self.mult)

    def edge_multiset(self) -> list[Edge]:
        return [p for p, m in self.mult for _ in range(m)]

    def edges_in(self, mask: int) -> int:
        return sum(m for (u, v), m in self.mult if mask >> u & 1 and mask >> v & 1)


# ---------------------------------------------------------------- text format

_PAIR = re.compile(r"^(\d+)-(\d+)(?:x(\d+))?$")


def _tokens(text: str) -> Iterator[tuple[int, str]]:
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0]
        for tok in line.replace(";", " ").replace(",", " ").split():
            yield lineno, tok


def _parse(text: str, multi: bool):
    toks = list(_tokens(text))
    if not toks:
        raise GraphParseError("empty input: expected 'n=<int>'", 1)
    lineno, first = toks[0]
    m = re.fullmatch(r"n=(\d+)", first)
    if not m:
        raise GraphParseError(f"expected 'n=<int>' as first token, got {first!r}", lineno)
    n = int(m.group(1))
    pairs = []
    for lineno, tok in toks[1:]:
        pm = _PAIR.match(tok)
        if not pm:
            raise GraphParseError(f"malformed edge token {tok!r}", lineno)
        u, v = int(pm.group(1)), int(pm.group(2))
        mult = pm.group(3)
        if mult is not None and not multi:
            raise GraphParseError(f"multiplicity suffix not allowed in a simple graph: {tok!r}", lineno)
        if u >= n or v >= n:
            raise GraphParseError(f"vertex index out of range (n={n}) in {tok!r}", lineno)
        if u == v:
            raise GraphParseError(f"self-loop {tok!r}", lineno)
        k = int(mult) if mult is not None else 1
        if k < 1:
            raise GraphParseError(f"multiplicity must be >= 1 in {tok!r}", lineno)
        pairs.append((u, v, k))
    return n, pairs


def parse_graph(text: str) -> Graph:
    """Parse ``n=<int>`` followed by ``u-v`` tokens; duplicate edges collapse."""
    n, pairs = _parse(text, multi=False)
    return Graph.from_edges(n, [(u, v) for u, v, _ in pairs])


def parse_multigraph(text: str) -> Multigraph:
    """Like :func:`parse_graph`, plus ``u-vxK`` for multiplicity K; repeated pairs add."""
    n, pairs = _parse(text, multi=True)
    return Multigraph.from_edges(n, pairs)


def format_graph(g: Graph) -> str:
    body = " ".join(f"{u}-{v}" for u, v in g.edge_list)
    return f"n={g.n}\n{body}\n" if body else f"n={g.n}\n"


def format_multigraph(m: Multigraph) -> str:
    body = " ".join(f"{u}-{v}" + (f"x{k}" if k > 1 else "") for (u, v), k in m.mult)
    return f"n={m.n}\n{body}\n" if body else f"n={m.n}\n"


def read_text(path: str | Path) -> str:
    if str(path) == "-":
        import sys

        return sys.stdin.read()
    return Path(path).read_text()


# ------------------------------------------------------------- small families

def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def complete_bipartite(a: int, b: int) -> Graph:
    return Graph.from_edges(a + b, [(i, a + j) for i in range(a) for j in range(b)])


def cycle_graph(k: int) -> Graph:
    return Graph.from_edges(k, [(i, (i + 1) % k) for i in range(k)])


def path_graph(k: int) -> Graph:
    return Graph.from_edges(k, [(i, i + 1) for i in range(k - 1)])


def empty_graph(n: int) -> Graph:
    return Graph(n)


# ------------------------------------------------------------ induced subgraph

@dataclass(frozen=True)
class InducedSubgraph:
    graph: Graph
    vertices: tuple[int, ...]  # original label of each new vertex
    e: int
    min_degree: int


def induced_subgraph(g: Graph, nu: Iterable[int] | int) -> InducedSubgraph:
    """``g[nu]`` reindexed in increasing order of original label."""
    mask = to_mask(nu)
    if mask >> g.n:
        raise DomainError(f"subset contains vertices outside range({g.n})")
    verts = mask_to_tuple(mask)
    pos = {v: i for i, v in enumerate(verts)}
    edges = [(pos[u], pos[v]) for u, v in g.edge_list if u in pos and v in pos]
    sub = Graph.from_edges(len(verts), edges)
    mind = min(sub.degrees) if verts else 0
    return InducedSubgraph(sub, verts, sub.e, mind)


# ------------------------------------------------------------------ embeddings

@dataclass(frozen=True)
class Embedding:
    """Injective edge-preserving map; ``map[i]`` is the image of pattern vertex i."""

    pattern: Graph = field(repr=False)
    host: Graph = field(repr=False)
    map: tuple[int, ...]

    def edge_image(self) -> frozenset[Edge]:
        m = self.map
        return frozenset(_norm(m[u], m[v]) for u, v in self.pattern.edge_list)

    def restrict(self, nu: Iterable[int] | int) -> "PartialEmbedding":
        mask = to_mask(nu)
        dom = mask_to_tuple(mask)
        return PartialEmbedding(mask, tuple(self.map[i] for i in dom))


@dataclass(frozen=True)
class PartialEmbedding:
    """Map from the pattern vertices in ``domain`` (bitmask) to ``images``, in increasing vertex order."""

    domain: int
    images: tuple[int, ...]

    @classmethod
    def from_dict(cls, d: dict[int, int]) -> "PartialEmbedding":
        keys = sorted(d)
        return cls(to_mask(keys), tuple(d[k] for k in keys))

    def as_dict(self) -> dict[int, int]:
        return dict(zip(iter_bits(self.domain), self.images))

    def is_valid(self, pattern: Graph, host: Graph) -> bool:
        if len(set(self.images)) != len(self.images):
            return False
        d = self.as_dict()
        for u, v in pattern.edge_list:
            if u in d and v in d and not host.has_edge(d[u], d[v]):
                return False
        return True


class MatchPlan:
    """Vertex order and back-constraints for backtracking a pattern into hosts.

    The order starts with ``first`` (if given), then repeatedly takes the
    vertex with the most already-placed neighbours, breaking ties by larger
    degree and then smaller label.  With no placed neighbours this is plain
    degree-descending order.
    """

    def __init__(self, pattern: Graph, first: Sequence[int] = ()):
        self.pattern = pattern
        k = pattern.n
        order = list(first)
        placed = to_mask(order)
        while len(order) < k:
            best = max(
                (v for v in range(k) if not placed >> v & 1),
                key=lambda v: ((pattern.adj[v] & placed).bit_count(), pattern.degrees[v], -v),
            )
            order.append(best)
            placed |= 1 << best
        self.order = tuple(order)
        pos = {v: i for i, v in enumerate(order)}
        self.back = tuple(
            tuple(pos[w] for w in pattern.neighbors(v) if pos[w] < i) for i, v in enumerate(order)
        )
        self.deg = tuple(pattern.degrees[v] for v in order)

    def run(
        self,
        adj: Sequence[int],
        all_mask: int,
        start: Sequence[int] = (),
        allowed: Sequence[int] | None = None,
    ) -> Iterator[list[int]]:
        """Yield image lists indexed by *position* in ``self.order``.

        ``allowed[i]`` optionally restricts the candidates at position ``i``.
        The yielded list is reused between yields; copy it if you keep it.
        """
        k = len(self.order)
        back = self.back
        img = [0] * k
        used = 0
        for i, v in enumerate(start):
            img[i] = v
            used |= 1 << v
        level = len(start)
        if level == k:
            yield img
            return
        cands = [0] * k

        def candidates(i: int) -> int:
            m = all_mask if allowed is None else allowed[i]
            for b in back[i]:
                m &= adj[img[b]]
            return m & ~used

        base = level
        cands[level] = candidates(level)
        while True:
            c = cands[level]
            if not c:
                level -= 1
                if level < base:
                    return
                used &= ~(1 << img[level])
                continue
            low = c & -c
            cands[level] = c ^ low
            img[level] = low.bit_length() - 1
            if level == k - 1:
                yield img
                continue
            used |= low
            level += 1
            cands[level] = candidates(level)


def _host_order(host: Graph, order_seed: int | None):
    """Relabelled adjacency so ascending-bit iteration follows a seeded permutation."""
    if order_seed is None:
        return host.adj, None
    perm = np.random.Generator(np.random.Philox(order_seed)).permutation(host.n)
    rank = [0] * host.n
    for r, v in enumerate(perm):
        rank[int(v)] = r
    new_adj = [0] * host.n
    for v in range(host.n):
        m = 0
        for w in iter_bits(host.adj[v]):
            m |= 1 << rank[w]
        new_adj[rank[v]] = m
    return new_adj, [int(v) for v in perm]


def iter_embedding_maps(
    pattern: Graph, host: Graph, order_seed: int | None = 0
) -> Iterator[tuple[int, ...]]:
    """Yield each injective edge-preserving map as a tuple indexed by pattern vertex."""
    k = pattern.n
    if k == 0:
        yield ()
        return
    if k > host.n:
        return
    adj, inv = _host_order(host, order_seed)
    plan = MatchPlan(pattern)
    # degree filter in relabelled coordinates
    hdeg = [m.bit_count() for m in adj]
    allowed = []
    for d in plan.deg:
        allowed.append(to_mask(v for v in range(host.n) if hdeg[v] >= d))
    order = plan.order
    out = [0] * k
    for img in plan.run(adj, host.all_mask, allowed=allowed):
        if inv is None:
            for i, v in enumerate(order):
                out[v] = img[i]
        else:
            for i, v in enumerate(order):
                out[v] = inv[img[i]]
        yield tuple(out)


def enumerate_embeddings(
    pattern: Graph, host: Graph, cap: int | None = None, order_seed: int | None = 0
) -> Iterator[Embedding]:
    """Labelled embeddings of ``pattern`` into ``host``.

    Each map is produced exactly once; automorphic images are distinct.  The
    order is a deterministic function of ``order_seed`` (``None`` means the
    natural host order).  Stops after ``cap`` items when given.
    """
    for count, m in enumerate(iter_embedding_maps(pattern, host, order_seed)):
        if cap is not None and count >= cap:
            return
        yield Embedding(pattern, host, m)


def contains_copy(pattern: Graph, host: Graph) -> bool:
    return next(iter_embedding_maps(pattern, host, None), None) is not None


def automorphisms(g: Graph) -> list[tuple[int, ...]]:
    return list(iter_embedding_maps(g, g, None))


class RootedChecker:
    """Finds a copy of ``pattern`` through a given host edge in a mutable host.

    Used by the F-free search routines: the host adjacency is passed in on
    every call, so callers can add and remove edges freely.  Only one
    orientation per orbit of oriented pattern edges under automorphisms is
    tried.
    """

    def __init__(self, pattern: Graph):
        self.pattern = pattern
        autos = automorphisms(pattern) if pattern.n <= 10 else [tuple(range(pattern.n))]
        seen: set[Edge] = set()
        roots = []
        for u, v in pattern.edge_list:
            for a, b in ((u, v), (v, u)):
                if (a, b) in seen:
                    continue
                roots.append((a, b))
                for s in autos:
                    seen.add((s[a], s[b]))
        self.plans = [MatchPlan(pattern, (a, b)) for a, b in roots]

    def find(self, adj: Sequence[int], all_mask: int, u: int, v: int) -> tuple[int, ...] | None:
        """Return a map (indexed by pattern vertex) using edge ``uv``, or None.

        ``adj`` must already contain the edge ``uv``.
        """
        for plan in self.plans:
            for img in plan.run(adj, all_mask, start=(u, v)):
                out = [0] * len(img)
                for i, w in enumerate(plan.order):
                    out[w] = img[i]
                return tuple(out)
        return None


def edge_image_of(pattern: Graph, m: Sequence[int]) -> frozenset[Edge]:
    return frozenset(_norm(m[u], m[v]) for u, v in pattern.edge_list)


# ------------------------------------------------------------- bipartitions

def components(g: Graph) -> list[int]:
    """Connected components as bitmasks, ordered by smallest vertex."""
    seen = 0
    comps = []
    for s in range(g.n):
        if seen >> s & 1:
            continue
        comp = frontier = 1 << s
        while frontier:
            nxt = 0
            for v in iter_bits(frontier):
                nxt |= g.adj[v]
            frontier = nxt & ~comp
            comp |= frontier
        seen |= comp
        comps.append(comp)
    return comps


def bipartitions(g: Graph) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """All proper 2-colourings ``(S, T)`` up to swapping the two colours.

    Each component may be flipped independently, so a bipartite graph with
    ``c`` components has ``2**(c-1)`` results; vertex 0 is always in ``S``.
    Returns ``[]`` when ``g`` has an odd cycle.
    """
    comps = components(g)
    sides = []
    for comp in comps:
        s0 = comp & -comp
        colour = {s0.bit_length() - 1: 0}
        frontier = [s0.bit_length() - 1]
        while frontier:
            nxt = []
            for v in frontier:
                for w in iter_bits(g.adj[v]):
                    if w not in colour:
                        colour[w] = 1 - colour[v]
                        nxt.append(w)
                    elif colour[w] == colour[v]:
                        return []
            frontier = nxt
        a = to_mask(v for v, c in colour.items() if c == 0)
        sides.append((a, comp & ~a))
    out = []
    for flips in product((0, 1), repeat=max(len(comps) - 1, 0)):
        s = sides[0][0] if comps else 0
        for (a, b), f in zip(sides[1:], flips):
            s |= b if f else a
        out.append((mask_to_tuple(s), mask_to_tuple(g.all_mask & ~s)))
    return out
