import logging
import random

import pytest

from commeval import benchgen
from commeval.filters import (
    FilterError,
    FilterSpec,
    apply_filter,
    candidate_noisy_classes,
    filter_components,
    filter_edges,
    filter_nodes_by_class,
    neighbourhood_overlap,
    would_change,
)
from commeval.graph import Graph, Partition
from commeval.structural import modularity

from .conftest import PLANTED, graph_from, random_graph, two_cliques_bridge


def test_recurrence_threshold():
    g = Graph(3, [(0, 1), (0, 2)], [5, 1])
    out = filter_edges(g, min_recurrence=2)
    assert out.graph.m == 1 and out.graph.edge_recurrence(0, 1) == 5
    assert out.removed_edges == 1 and out.removed_nodes == 1


def test_overlap_removes_bridge_only():
    g = two_cliques_bridge()
    ov = neighbourhood_overlap(g)
    bridge = g.edge_index[(4, 5)]
    assert ov[bridge] == 0.0
    out = filter_edges(g, min_overlap=0.1)
    assert out.graph.m == g.m - 1 and not out.graph.has_edge(4, 5)


def test_all_sporadic_empties_with_warning(caplog):
    g = graph_from([(0, 1), (1, 2)])
    with caplog.at_level(logging.WARNING):
        out = filter_edges(g, min_recurrence=2)
    assert out.graph.m == 0 and out.graph.n == 0
    assert "removed every edge" in caplog.text


def test_node_filter_mechanics(caplog):
    g = graph_from([(i, i + 1) for i in range(9)])
    gt = Partition.from_labels(["a"] * 3 + ["b"] * 4 + ["c"] * 3)
    out = filter_nodes_by_class(g, gt, ["c"])
    assert out.graph.n == 7 and out.ground_truth.k == gt.k - 1
    whole = Partition.from_labels(["a"] * 10)
    with caplog.at_level(logging.ERROR):
        out = filter_nodes_by_class(g, whole, ["a"])
    assert out.graph.n == 0 and "removed every node" in caplog.text
    with pytest.raises(FilterError, match="unknown class"):
        filter_nodes_by_class(g, gt, ["zz"])


def test_removing_roamers_raises_planted_modularity():
    g, gt = benchgen.generate(benchgen.PlantedSpec(**PLANTED, roamers=8))
    planted = Partition(gt.assignment)
    assert candidate_noisy_classes(g, gt) == ["roamer"]
    out = filter_nodes_by_class(g, gt, ["roamer"])
    assert modularity(out.graph, out.ground_truth) > modularity(g, planted)


def test_component_filter_cases():
    big = [(i, j) for i in range(10) for j in range(i + 1, 10)]
    g = graph_from(big + [(10, 11)])
    out = filter_components(g, 3)
    assert out.graph.n == 10 and out.removed_nodes == 2
    assert out.details["removed_component_stats"] == [{"size": 2, "density": 1.0}]
    connected = two_cliques_bridge()
    assert filter_components(connected, 3).graph == connected


def test_many_micro_components(planted_micro):
    g, gt = planted_micro
    out = filter_components(g, 4, gt)
    assert out.graph.n == 128 and out.details["removed_components"] == 20
    assert out.removed_fraction == pytest.approx(60 / g.m)
    assert "micro" not in out.ground_truth.names


def test_spec_parsing():
    assert FilterSpec.parse("edge:r=2,theta=0.1") == FilterSpec("edge", min_recurrence=2, min_overlap=0.1)
    assert FilterSpec.parse("node:class=a+b").classes == ("a", "b")
    assert FilterSpec.parse("component:min=5").min_size == 5
    for spec in ("edge:r=2,theta=0.1", "node:class=a+b", "component:min=5", "edge:theta=0.3"):
        assert FilterSpec.parse(spec).label() == spec
    for bad in ("edge:", "edge:r=0", "edge:x=1", "node:", "component:min=1", "blob:x=1", "edge:r=two"):
        with pytest.raises(FilterError):
            FilterSpec.parse(bad)


def test_isolated_input_nodes_survive_edge_filter():
    g = Graph(4, [(0, 1), (1, 2)], [3, 3])
    out = filter_edges(g, min_recurrence=1, min_overlap=0.0)
    assert out.graph == g


def test_would_change():
    g = graph_from([(0, 1), (1, 2), (0, 2)])
    assert not would_change(g, FilterSpec("edge", min_recurrence=1))
    assert not would_change(g, FilterSpec("component", min_size=3))
    assert would_change(g, FilterSpec("component", min_size=4))
    assert not would_change(g, FilterSpec("node", classes=("x",)))


def test_apply_filter_dispatch():
    rng = random.Random(1)
    g = random_graph(rng, 20, 0.2)
    gt = Partition.from_labels([rng.choice("xyz") for _ in range(20)])
    for spec in ("edge:r=2", "node:class=x", "component:min=3"):
        out = apply_filter(g, FilterSpec.parse(spec), gt)
        assert out.ground_truth.n == out.graph.n
