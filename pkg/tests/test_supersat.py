import math
from fractions import Fraction

import pytest

from randturan.errors import ResourceError
from randturan.graph import PartialEmbedding, complete_bipartite, cycle_graph, empty_graph
from randturan.semibounded import BalancingContext, SemiBoundedTriple
from randturan.sim.sampling import sample_bipartite
from randturan.supersat import (
    build_dgood,
    check_dgood,
    check_maximal,
    degree_of_partial,
    delta_audit,
    double_counting_check,
    recount_index,
    saturated_partials,
    sigma_embedding_check,
    to_edge_hypergraph,
)

C4 = cycle_graph(4)
TRIPLE = SemiBoundedTriple((0, 2), (1, 3), 1, 2)
LOOSE = BalancingContext(100, Fraction(1))  # every cap is at least 1 and huge below full nu


def test_edgeless_host_gives_empty_family():
    fam = build_dgood(C4, TRIPLE, empty_graph(6))
    assert len(fam) == 0
    assert saturated_partials(fam) == []
    H = to_edge_hypergraph(fam)
    assert len(H) == 0


def test_c4_into_c4_caps():
    ctx = BalancingContext(4, Fraction(4, 16))
    fam = build_dgood(C4, TRIPLE, C4, ctx)
    min_cap = min(fam.caps.values())
    if min_cap >= 8:
        assert len(fam) == 8
    else:
        assert len(fam) < 8 and fam.binding
    assert check_dgood(fam) == []
    assert check_maximal(fam) == []


def test_k44_family_recount():
    host = complete_bipartite(4, 4)
    # with delta=1 and q = e/n^2 = 1/4 some caps fall below 1, so the family is empty
    strict = build_dgood(C4, TRIPLE, host, BalancingContext.from_host(host))
    assert check_dgood(strict) == [] and check_maximal(strict) == []
    assert min(strict.caps.values()) < 1 and len(strict) == 0
    fam = build_dgood(C4, TRIPLE, host, BalancingContext.from_host(host, delta=Fraction(1, 2)), order_seed=3)
    assert len(fam) > 0
    assert check_dgood(fam) == []
    assert check_maximal(fam) == []
    assert double_counting_check(fam).ok
    assert recount_index(fam) == {k: v for k, v in fam.partial_index.items() if v}


def test_degree_of_partial_examples():
    host = complete_bipartite(2, 2)
    fam = build_dgood(C4, TRIPLE, host, LOOSE)
    assert len(fam) == 8
    assert degree_of_partial(fam, PartialEmbedding(0, ())) == len(fam)
    member = fam.members[0]
    assert degree_of_partial(fam, PartialEmbedding(C4.all_mask, member)) == 1
    # vertices 0 and 1 are adjacent in C4; host vertices 0 and 1 are on one side
    assert degree_of_partial(fam, PartialEmbedding(0b11, (0, 1))) == 0


def test_hypergraph_and_audit_single_copy():
    host = complete_bipartite(2, 2)
    fam = build_dgood(C4, TRIPLE, host, LOOSE)
    H = to_edge_hypergraph(fam)
    assert len(H) == 1
    assert H.multiplicity[H.hyperedges[0]] == 8
    assert len(H.edge_sets()[0]) == 4
    audit = delta_audit(H, LOOSE)
    assert [r.delta for r in audit.rows] == [1, 1, 1, 1]
    assert sigma_embedding_check(fam, H) == []


def test_audit_row_shape_for_single_edges():
    host = complete_bipartite(4, 4)
    ctx = BalancingContext.from_host(host, delta=Fraction(1, 2))
    fam = build_dgood(C4, TRIPLE, host, ctx)
    audit = delta_audit(to_edge_hypergraph(fam), ctx)
    row = audit.rows[0]
    expected = 3 * math.log(ctx.q) + 2 * math.log(ctx.n)
    assert math.isclose(row.log_edge_rhs, expected)
    assert audit.C_min >= row.delta * math.exp(-expected) - 1e-12


def test_empty_audit():
    fam = build_dgood(C4, TRIPLE, empty_graph(5))
    audit = delta_audit(to_edge_hypergraph(fam), LOOSE)
    assert all(r.delta == 0 for r in audit.rows) and audit.C_min == 0


def test_audit_needs_sample_flag_when_large():
    host = complete_bipartite(4, 4)
    ctx = BalancingContext.from_host(host, delta=Fraction(1, 2))
    H = to_edge_hypergraph(build_dgood(C4, TRIPLE, host, ctx))
    with pytest.raises(ResourceError):
        delta_audit(H, ctx, limit=10)
    assert delta_audit(H, ctx, limit=10, sample=50).sampled


def test_saturation_bound_on_random_hosts():
    for seed in range(5):
        host = sample_bipartite(5, 5, 0.6, seed)
        if host.e == 0:
            continue
        ctx = BalancingContext.from_host(host, delta=Fraction(1, 2))
        fam = build_dgood(C4, TRIPLE, host, ctx, order_seed=seed)
        rep = double_counting_check(fam)
        assert rep.ok, rep.violations_a + rep.violations_b
        assert check_dgood(fam) == [] and check_maximal(fam) == []
