from fractions import Fraction
from itertools import combinations, product

import pytest

from randturan.constructions import (
    build_F_M,
    build_F_rst,
    general_balance_check,
    multigraph_balanced,
    multigraph_of,
    verify_multibalanced_m2,
)
from randturan.corpus import isomorphic
from randturan.density import m2
from randturan.errors import DomainError, GraphParseError
from randturan.graph import Multigraph, complete_bipartite, cycle_graph, parse_multigraph


def tri(a: int, b: int, c: int) -> Multigraph:
    return parse_multigraph(f"n=3; 0-1x{a} 1-2x{b} 0-2x{c}")


def test_F_M_examples():
    single = build_F_M(parse_multigraph("n=2; 0-1"))
    assert isomorphic(single.result, cycle_graph(4))
    fig = build_F_M(tri(1, 2, 3))
    assert (fig.result.n, fig.result.e) == (10, 15)
    fig.triple.validate(fig.result)
    assert fig.triple.r == 2 and fig.triple.v_star == 3
    two = build_F_M(parse_multigraph("n=2; 0-1x2"))
    assert (two.result.n, two.result.e) == (5, 6)
    assert isomorphic(two.result, complete_bipartite(2, 3))
    assert multigraph_of(fig.result, fig.triple).mult == tri(1, 2, 3).mult


def test_loops_rejected():
    with pytest.raises((DomainError, GraphParseError)):
        build_F_M(parse_multigraph("n=2; 0-0"))


def test_multigraph_balance_examples():
    assert multigraph_balanced(tri(1, 2, 3)).balanced
    bad = multigraph_balanced(tri(1, 1, 3))
    assert not bad.balanced and bad.witness == (0, 2)
    assert multigraph_balanced(parse_multigraph("n=2; 0-1")).balanced
    with pytest.raises(DomainError):
        multigraph_balanced(parse_multigraph("n=1"))


def test_F_rst_examples():
    c4 = build_F_rst(2, 2, 1)
    assert isomorphic(c4.result, cycle_graph(4))
    g = build_F_rst(2, 3, 1).result
    assert (g.n, g.e) == (7, 9)
    rec = build_F_rst(3, 3, 2)
    assert rec.result.n == 6
    assert [rec.result.degrees[v] for v in rec.triple.T] == [3, 3, 3]
    assert isomorphic(rec.result, complete_bipartite(3, 3))
    with pytest.raises(DomainError):
        build_F_rst(4, 3, 1)


def test_general_balance_examples():
    for M in (tri(1, 1, 1), tri(1, 2, 3), parse_multigraph("n=2; 0-1x3")):
        rec = build_F_M(M)
        assert general_balance_check(rec.result, rec.triple).balanced
    for r, s, t in [(2, 3, 1), (2, 4, 2), (3, 4, 1), (3, 3, 2)]:
        rec = build_F_rst(r, s, t)
        assert general_balance_check(rec.result, rec.triple).balanced
    rec = build_F_M(tri(1, 1, 3))
    res = general_balance_check(rec.result, rec.triple)
    assert not res.balanced and res.max_value > res.target


def test_multibalanced_m2_examples():
    assert m2(build_F_M(parse_multigraph("n=2; 0-1")).result) == Fraction(3, 2)
    assert verify_multibalanced_m2(parse_multigraph("n=2; 0-1"))
    assert m2(build_F_M(tri(1, 1, 1)).result) == Fraction(8, 5)
    assert verify_multibalanced_m2(tri(1, 1, 1))
    assert m2(complete_bipartite(2, 3)) == Fraction(5, 3)
    assert verify_multibalanced_m2(parse_multigraph("n=2; 0-1x2"))
    with pytest.raises(DomainError):
        verify_multibalanced_m2(tri(1, 1, 3))


def test_balanced_multigraphs_on_four_vertices():
    pairs = list(combinations(range(4), 2))
    checked = 0
    for mult in product(range(3), repeat=len(pairs)):
        if not 1 <= sum(mult) <= 5:
            continue
        M = Multigraph.from_edges(4, [p for p, k in zip(pairs, mult) for _ in range(k)])
        if multigraph_balanced(M).balanced:
            assert verify_multibalanced_m2(M)
            checked += 1
    assert checked > 0
