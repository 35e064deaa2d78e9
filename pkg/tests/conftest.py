import random

import pytest

from commeval import benchgen
from commeval.config import RunConfig
from commeval.graph import Graph, Partition
from commeval.triangulate import run_pipeline

PLANTED = dict(k=4, block_size=32, p_in=0.3, p_out=0.01, seed=7)


def graph_from(edges, n=None):
    n = n if n is not None else 1 + max(max(e) for e in edges)
    return Graph(n, edges)


def two_triangles_bridge():
    # triangles {0,1,2} and {3,4,5} joined by 2-3
    return graph_from([(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5), (2, 3)])


def two_cliques_bridge(size=5):
    edges = []
    for base in (0, size):
        edges += [(base + i, base + j) for i in range(size) for j in range(i + 1, size)]
    edges.append((size - 1, size))
    return graph_from(edges)


def random_graph(rng: random.Random, n: int, p: float) -> Graph:
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    rec = [rng.randint(1, 3) for _ in edges]
    return Graph(n, edges, rec)


def random_partition(rng: random.Random, n: int, kmax: int | None = None) -> Partition:
    kmax = kmax or n
    return Partition([rng.randrange(kmax) for _ in range(n)])


@pytest.fixture(scope="session")
def planted():
    return benchgen.generate(benchgen.PlantedSpec(**PLANTED))


@pytest.fixture(scope="session")
def planted_sporadic():
    return benchgen.generate(benchgen.PlantedSpec(**PLANTED, sporadic_edges=0.3))


@pytest.fixture(scope="session")
def planted_micro():
    return benchgen.generate(benchgen.PlantedSpec(**PLANTED, micro_components=20))


@pytest.fixture(scope="session")
def clean_result(planted):
    g, gt = planted
    return run_pipeline(g, gt, RunConfig(), "clean")


@pytest.fixture(scope="session")
def sporadic_result(planted_sporadic):
    g, gt = planted_sporadic
    return run_pipeline(g, gt, RunConfig(), "sporadic")


@pytest.fixture(scope="session")
def micro_result(planted_micro):
    g, gt = planted_micro
    return run_pipeline(g, gt, RunConfig(), "micro")


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("tests.test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
