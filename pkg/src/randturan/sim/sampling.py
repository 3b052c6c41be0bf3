"""Seeded binomial random graphs with one shared uniform per vertex pair."""

from __future__ import annotations

import numpy as np

from ..errors import DomainError
from ..graph import Graph


def pair_uniforms(n: int, seed: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Rows, columns and uniforms for the C(n,2) pairs in lexicographic order.

    The uniforms come from a Philox stream keyed by ``seed``, so graphs sampled
    from the same ``(n, seed)`` at different p are nested.
    """
    rows, cols = np.triu_indices(n, 1)
    u = np.random.Generator(np.random.Philox(seed)).random(rows.size)
    return rows, cols, u


def graph_below(n: int, rows, cols, u, p: float) -> Graph:
    keep = u < p
    return Graph.from_edges(n, zip(rows[keep].tolist(), cols[keep].tolist()))


def check_p(p: float) -> None:
    if not (0.0 <= p <= 1.0):
        raise DomainError(f"p must lie in [0, 1], got {p}")


def sample_gnp(n: int, p: float, seed: int) -> Graph:
    """G(n, p): pair ij is an edge iff its uniform is below p."""
    check_p(p)
    return graph_below(n, *pair_uniforms(n, seed), p)


def sample_bipartite(a: int, b: int, p: float, seed: int) -> Graph:
    """Random bipartite graph on parts ``0..a-1`` and ``a..a+b-1``."""
    check_p(p)
    u = np.random.Generator(np.random.Philox(seed)).random((a, b))
    ii, jj = np.nonzero(u < p)
    return Graph.from_edges(a + b, zip(ii.tolist(), (jj + a).tolist()))
