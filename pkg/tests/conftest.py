import itertools
import random

from hypothesis import settings

from randturan.graph import Graph

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def random_graph(n: int, p: float, rng: random.Random) -> Graph:
    return Graph.from_edges(n, [e for e in itertools.combinations(range(n), 2) if rng.random() < p])


def brute_embedding_count(F: Graph, G: Graph) -> int:
    count = 0
    for m in itertools.permutations(range(G.n), F.n):
        if all(G.has_edge(m[u], m[v]) for u, v in F.edge_list):
            count += 1
    return count


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
