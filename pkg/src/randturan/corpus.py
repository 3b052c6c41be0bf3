"""Connected bipartite graphs on few vertices, generated by vertex augmentation.

Every connected graph on n >= 2 vertices has a non-cut vertex, so adding one
vertex (joined to a nonempty subset) to every graph on n-1 vertices reaches
every isomorphism class.  Candidates are bucketed by cheap invariants and
compared by an explicit isomorphism search inside each bucket.
"""

from __future__ import annotations

from functools import lru_cache

from .errors import DomainError
from .graph import Graph, bipartitions, components, iter_bits, iter_embedding_maps

MAX_CORPUS_VERTICES = 9


def _invariant(g: Graph) -> tuple:
    nbr_degs = tuple(sorted(tuple(sorted(g.degrees[w] for w in iter_bits(g.adj[v]))) for v in range(g.n)))
    return (g.n, g.e, tuple(sorted(g.degrees)), nbr_degs)


def isomorphic(a: Graph, b: Graph) -> bool:
    """Same order and size plus an injective edge-preserving map is an isomorphism."""
    if a.n != b.n or a.e != b.e:
        return False
    return next(iter_embedding_maps(a, b, None), None) is not None


def _relabel_bfs(g: Graph) -> Graph:
    """Relabel by breadth-first order from a vertex of maximum degree."""
    if g.n == 0:
        return g
    start = max(range(g.n), key=lambda v: (g.degrees[v], -v))
    order = [start]
    seen = {start}
    i = 0
    while i < len(order):
        v = order[i]
        i += 1
        for w in sorted(iter_bits(g.adj[v]), key=lambda w: (-g.degrees[w], w)):
            if w not in seen:
                seen.add(w)
                order.append(w)
    pos = {v: k for k, v in enumerate(order)}
    return Graph.from_edges(g.n, [(pos[u], pos[v]) for u, v in g.edge_list])


@lru_cache(maxsize=None)
def _level(n: int) -> tuple[Graph, ...]:
    if n == 1:
        return (Graph.from_edges(1, []),)
    buckets: dict[tuple, list[Graph]] = {}
    found: list[Graph] = []
    for g in _level(n - 1):
        for nb in range(1, 1 << (n - 1)):
            h = Graph.from_edges(n, list(g.edge_list) + [(v, n - 1) for v in iter_bits(nb)])
            if not bipartitions(h):
                continue
            key = _invariant(h)
            bucket = buckets.setdefault(key, [])
            if any(isomorphic(h, x) for x in bucket):
                continue
            bucket.append(h)
            found.append(h)
    reps = [_relabel_bfs(h) for h in found]
    reps.sort(key=lambda h: (h.e, tuple(sorted(h.degrees, reverse=True)), h.edge_list))
    return tuple(reps)


def connected_bipartite_graphs(max_vertices: int, min_vertices: int = 1) -> list[Graph]:
    """One representative per isomorphism class, ordered by (n, e, degrees, edges)."""
    if max_vertices > MAX_CORPUS_VERTICES:
        raise DomainError(f"corpus limited to {MAX_CORPUS_VERTICES} vertices")
    out: list[Graph] = []
    for n in range(max(1, min_vertices), max_vertices + 1):
        out.extend(_level(n))
    return out


def is_connected(g: Graph) -> bool:
    return g.n > 0 and len(components(g)) == 1
