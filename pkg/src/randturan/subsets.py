"""Vectorised per-subset statistics for small pattern graphs."""

from __future__ import annotations

import numpy as np

from .errors import DomainError
from .graph import Graph

MAX_PATTERN_VERTICES = 20


def check_pattern_size(g: Graph) -> None:
    if g.n > MAX_PATTERN_VERTICES:
        raise DomainError(
            f"pattern has {g.n} vertices; subset sweeps are capped at {MAX_PATTERN_VERTICES}"
        )


class SubsetTable:
    """Arrays indexed by subset bitmask: size, induced edge count, min-degree >= 1."""

    def __init__(self, g: Graph):
        check_pattern_size(g)
        self.graph = g
        k = g.n
        masks = np.arange(1 << k, dtype=np.int64)
        self.masks = masks
        self.size = np.bitwise_count(masks).astype(np.int64)
        twice_e = np.zeros(1 << k, dtype=np.int64)
        no_isolated = masks != 0
        self.has_nbr = []
        for v in range(k):
            inv = (masks >> v) & 1
            nb = masks & g.adj[v]
            twice_e += inv * np.bitwise_count(nb).astype(np.int64)
            hn = nb != 0
            self.has_nbr.append(hn)
            no_isolated &= (inv == 0) | hn
        self.e = twice_e // 2
        self.min_deg_pos = no_isolated

    def contains(self, v: int) -> np.ndarray:
        return ((self.masks >> v) & 1).astype(bool)


_cache: dict[Graph, SubsetTable] = {}


def subset_table(g: Graph) -> SubsetTable:
    t = _cache.get(g)
    if t is None:
        if len(_cache) > 256:
            _cache.clear()
        t = _cache[g] = SubsetTable(g)
    return t
