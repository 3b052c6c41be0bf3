import pytest

from randturan.corpus import connected_bipartite_graphs, is_connected, isomorphic
from randturan.errors import BudgetExceeded, DomainError
from randturan.graph import bipartitions, complete_bipartite, cycle_graph, path_graph
from randturan.lemmas import SUITES, run_suites, small_multigraphs


def test_corpus_counts_match_known_sequence():
    counts = [len(connected_bipartite_graphs(n, n)) for n in range(1, 9)]
    assert counts == [1, 1, 1, 3, 5, 17, 44, 182]


def test_corpus_members_are_distinct_connected_bipartite():
    graphs = connected_bipartite_graphs(6)
    for g in graphs:
        assert is_connected(g) and bipartitions(g)
    for i, a in enumerate(graphs):
        for b in graphs[i + 1 :]:
            assert not isomorphic(a, b)


def test_corpus_limit():
    with pytest.raises(DomainError):
        connected_bipartite_graphs(10)


def test_isomorphic():
    assert isomorphic(cycle_graph(4), complete_bipartite(2, 2))
    assert not isomorphic(cycle_graph(4), path_graph(4))


def test_small_multigraphs_are_loopless():
    ms = small_multigraphs(3, 3)
    assert ms and all(m.e <= 3 and all(u != v for (u, v), _ in m.mult) for m in ms)


def test_all_suites_pass_below_first_counterexample():
    results = run_suites(max_vertices=5)
    assert [r.name for r in results] == list(SUITES)
    for r in results:
        assert r.ok, (r.name, r.violations[:3])
        assert r.checked > 0


def test_suite_selection_and_budget():
    res = run_suites(max_vertices=4, names=["f-at-least-e"])
    assert [r.name for r in res] == ["f-at-least-e"]
    with pytest.raises(BudgetExceeded):
        run_suites(max_vertices=6, deadline=0.0)
