import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from randturan.constructions import build_F_M
from randturan.density import (
    density_report,
    has_cycle,
    m2,
    m2_local,
    m2_star,
    maximizer_contains_apex_check,
)
from randturan.errors import DomainError
from randturan.graph import Graph, complete_bipartite, complete_graph, cycle_graph, parse_multigraph, path_graph
from randturan.semibounded import SemiBoundedTriple, find_triples

from conftest import random_graph


def brute_m2(g: Graph) -> Fraction:
    best = None
    for k in range(3, g.n + 1):
        for nu in itertools.combinations(range(g.n), k):
            val = Fraction(g.edges_in(sum(1 << v for v in nu)) - 1, k - 2)
            best = val if best is None else max(best, val)
    return best


def brute_m2_star(g: Graph) -> Fraction:
    """Every proper subgraph: any vertex subset, any edge subset, excluding g itself."""
    best = None
    for k in range(3, g.n + 1):
        for nu in itertools.combinations(range(g.n), k):
            sub = [e for e in g.edge_list if e[0] in nu and e[1] in nu]
            for r in range(len(sub) + 1):
                if k == g.n and r == g.e:
                    continue
                val = Fraction(r - 1, k - 2)
                best = val if best is None else max(best, val)
    return best


def test_m2_examples():
    assert m2(cycle_graph(4)) == Fraction(3, 2)
    assert m2(path_graph(3)) == 1
    assert m2(complete_bipartite(3, 3)) == 2
    with pytest.raises(DomainError):
        m2(path_graph(2))


def test_m2_local_examples():
    c4 = cycle_graph(4)
    assert m2_local(c4, range(4)) == Fraction(3, 2)
    assert m2_local(c4, [0, 1, 2]) == 1
    g = Graph.from_edges(4, [(0, 1), (2, 3)])
    assert m2_local(g, [0, 1, 2]) == 0
    with pytest.raises(DomainError):
        m2_local(c4, [0, 1])


def test_m2_star_examples():
    assert m2_star(cycle_graph(4)) == 1
    assert m2_star(complete_bipartite(2, 3)) == Fraction(3, 2)
    assert m2_star(complete_graph(3)) == 1


def test_density_report_balance_flags():
    rep = density_report(cycle_graph(4))
    assert rep.two_balanced and rep.strictly_two_balanced
    assert rep.witnesses == ((0, 1, 2, 3),)
    assert rep.to_json()["m2"] == "3/2"
    # K4 minus an edge plus a pendant: the dense part wins, whole graph does not
    g = Graph.from_edges(5, [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3), (3, 4)])
    rep = density_report(g)
    assert rep.m2 == 2 and not rep.two_balanced


def test_apex_check_examples():
    c4 = cycle_graph(4)
    for t in find_triples(c4, 2):
        assert maximizer_contains_apex_check(c4, t)
    k23 = complete_bipartite(2, 3)
    for v in (2, 3, 4):
        triple = SemiBoundedTriple((0, 1), (2, 3, 4), v, 2)
        assert maximizer_contains_apex_check(k23, triple)
    rec = build_F_M(parse_multigraph("n=2; 0-1x2"))
    assert maximizer_contains_apex_check(rec.result, rec.triple)
    with pytest.raises(DomainError):
        maximizer_contains_apex_check(path_graph(3), SemiBoundedTriple((0, 2), (1,), 1, 1))


@given(st.integers(3, 7), st.floats(0.2, 0.9), st.integers(0, 10**6))
def test_m2_matches_brute_force(n, p, seed):
    g = random_graph(n, p, random.Random(seed))
    assert m2(g) == brute_m2(g)
    rep = density_report(g)
    assert m2(g) >= (rep.m2_star if rep.m2_star is not None else m2(g))
    if rep.two_balanced:
        assert rep.m2 == Fraction(g.e - 1, g.n - 2)


@given(st.integers(3, 6), st.floats(0.3, 0.9), st.integers(0, 10**6))
def test_m2_star_matches_brute_force(n, p, seed):
    g = random_graph(n, p, random.Random(seed))
    expected = brute_m2_star(g)
    if expected is None:
        with pytest.raises(DomainError):
            m2_star(g)
    else:
        assert m2_star(g) == expected


@given(st.integers(3, 7), st.floats(0.2, 0.8), st.integers(0, 10**6))
def test_cycle_means_m2_above_one(n, p, seed):
    g = random_graph(n, p, random.Random(seed))
    if has_cycle(g):
        assert m2(g) > 1
    elif any(d >= 2 for d in g.degrees):
        assert m2(g) == 1
