"""Multilayer algorithm-similarity network and diversification analysis.

Nodes are detectors. Each similarity metric contributes one layer whose edge
weights are the detectors' mean partition similarity (distance metrics
flipped to ``1 - normalized``); each structural metric contributes one layer
weighted by ``1 - score_distance`` of the detectors' median scores.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Mapping, Sequence

import numpy as np

from .evidence import score_distance
from .graph import Partition
from .similarity import SIMILARITY_METRICS, pairwise_matrix, rand_index

# pairs of layers whose metrics are known to be correlated
CORRELATED = (frozenset({"RI", "ARI"}),)

DEFAULT_STRUCTURAL_LAYERS = ("modularity", "k")


@dataclass(frozen=True)
class Layer:
    metric: str
    kind: str  # "similarity" or "structural"
    weights: np.ndarray

    def edges(self, nodes: Sequence[str]) -> list[tuple[str, str, float]]:
        return [(nodes[i], nodes[j], float(self.weights[i, j])) for i, j in combinations(range(len(nodes)), 2)]


@dataclass(frozen=True)
class MultilayerSimilarityNetwork:
    nodes: tuple[str, ...]
    layers: tuple[Layer, ...]

    def layer(self, metric: str) -> Layer:
        for layer in self.layers:
            if layer.metric == metric:
                return layer
        raise KeyError(metric)

    def to_dict(self) -> dict:
        return {
            "nodes": list(self.nodes),
            "layers": [
                {"metric": layer.metric, "kind": layer.kind, "edges": [list(e) for e in layer.edges(self.nodes)]}
                for layer in self.layers
            ],
        }


def _median_scores(runs, metric_of) -> dict[str, float]:
    values: dict[str, list[float]] = {}
    for r in runs:
        values.setdefault(r.detector.id, []).append(metric_of(r))
    return {d: float(np.median(v)) for d, v in values.items()}


def build_multilayer(
    runs: Sequence,
    similarity_metrics: Sequence[str] = SIMILARITY_METRICS,
    structural: Mapping[str, Mapping[str, float]] | None = None,
    all_pairs: bool = False,
) -> MultilayerSimilarityNetwork:
    """Assemble the layers from detection runs.

    ``structural`` maps a structural metric name to per-detector scores (the
    detectors' median values); negative scores are clipped to 0 before the
    distance is taken.
    """
    ids: list[str] = []
    for r in runs:
        if r.detector.id not in ids:
            ids.append(r.detector.id)
    if len(ids) < 2:
        raise ValueError("a multilayer network needs at least two detectors")
    layers = []
    for metric in similarity_metrics:
        pm = pairwise_matrix(runs, metric, all_pairs=all_pairs)
        w = np.clip(pm.similarities(), 0.0, 1.0)
        np.fill_diagonal(w, 1.0)
        layers.append(Layer(metric, "similarity", w))
    for metric, scores in (structural or {}).items():
        k = len(ids)
        w = np.ones((k, k))
        for i, j in combinations(range(k), 2):
            a, b = max(scores[ids[i]], 0.0), max(scores[ids[j]], 0.0)
            w[i, j] = w[j, i] = 1.0 - score_distance(a, b)
        layers.append(Layer(metric, "structural", w))
    return MultilayerSimilarityNetwork(tuple(ids), tuple(layers))


@dataclass(frozen=True)
class LayerClustering:
    layer: str
    groups: Partition  # over the network's node order
    params: dict = field(default_factory=dict)

    def group_lists(self, nodes: Sequence[str]) -> list[list[str]]:
        return [[nodes[i] for i in c] for c in self.groups.communities()]


def cluster_layer(
    layer: Layer,
    floor: float = 0.9,
    method: str = "threshold",
) -> LayerClustering:
    """Group detectors whose pairwise weight clears the layer threshold.

    Threshold method: edges strictly above the median off-diagonal weight are
    kept (all edges at the median when none exceeds it), as well as edges at
    or above ``floor``; groups are the connected components. ``average``
    cuts an average-linkage dendrogram on ``1 - weight`` at ``1 - median``.
    """
    w = layer.weights
    k = w.shape[0]
    iu = np.triu_indices(k, 1)
    off = w[iu]
    median = float(np.median(off)) if off.size else 1.0
    if method == "average":
        from scipy.cluster.hierarchy import fcluster, linkage

        if k < 2:
            return LayerClustering(layer.metric, Partition([0] * k), {"method": method})
        dist = np.clip(1.0 - off, 0.0, None)
        z = linkage(dist, method="average")
        # same acceptance rule as the threshold method: strictly above the
        # median unless nothing is, in which case at the median
        level = min(median, floor)
        strict = bool(np.any(off > median + 1e-12))
        labels = fcluster(z, t=1.0 - level + (-1e-12 if strict else 1e-12), criterion="distance")
        return LayerClustering(layer.metric, Partition(labels.tolist()), {"method": method, "threshold": median})

    tol = 1e-12
    strict = np.any(off > median + tol)
    parent = list(range(k))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for (i, j), x in zip(zip(*iu), off):
        keep = (x > median + tol) if strict else (x >= median - tol)
        if keep or x >= floor - tol:
            ri, rj = find(int(i)), find(int(j))
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)
    return LayerClustering(
        layer.metric,
        Partition([find(i) for i in range(k)]),
        {"method": method, "median": median, "strict": bool(strict), "floor": floor},
    )


def layer_agreement(c1: LayerClustering, c2: LayerClustering) -> float:
    if c1.groups.n != c2.groups.n:
        raise ValueError("layer clusterings cover different detector sets")
    if c1.groups.n < 2:
        return 1.0
    return rand_index(c1.groups, c2.groups).value


def correlated(a: str, b: str) -> bool:
    return frozenset({a, b}) in CORRELATED


@dataclass(frozen=True)
class DiversificationReport:
    nodes: tuple[str, ...]
    clusterings: tuple[LayerClustering, ...]
    diversification: dict[str, float]
    rank: dict[str, int]
    singleton_fraction: dict[str, float]
    agreement: dict[tuple[str, str], float]
    mean_agreement: dict[str, float]
    divergent_layers: tuple[str, ...]
    reinforced_pairs: tuple[tuple[str, str], ...]
    thresholds: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "groups": {c.layer: c.group_lists(self.nodes) for c in self.clusterings},
            "diversification": dict(self.diversification),
            "rank": dict(self.rank),
            "singleton_fraction": dict(self.singleton_fraction),
            "layer_agreement": [
                {"layers": [a, b], "agreement": v, "correlated": correlated(a, b)} for (a, b), v in self.agreement.items()
            ],
            "mean_agreement": dict(self.mean_agreement),
            "divergent_layers": list(self.divergent_layers),
            "reinforced_pairs": [list(p) for p in self.reinforced_pairs],
        }


def diversification_report(
    net: MultilayerSimilarityNetwork,
    divergence_threshold: float = 0.5,
    reinforce_threshold: float = 0.8,
    floor: float = 0.9,
    method: str = "threshold",
) -> DiversificationReport:
    """Per-detector diversification and per-layer agreement.

    A detector's diversification is the fraction of layers in which it sits
    in a singleton group or in a group smaller than the layer's largest one.
    Rank 1 is the most diversified (dense ranking). A layer is divergent when
    its mean agreement with the other, uncorrelated layers is below
    ``divergence_threshold``.
    """
    if len(net.layers) < 2:
        raise ValueError("diversification needs at least two layers")
    clusterings = tuple(cluster_layer(layer, floor=floor, method=method) for layer in net.layers)
    k = len(net.nodes)
    minority = np.zeros(k)
    single = np.zeros(k)
    for c in clusterings:
        sizes = c.groups.sizes
        top = sizes.max()
        for i in range(k):
            s = sizes[c.groups.assignment[i]]
            if s == 1:
                single[i] += 1
            if s == 1 or s < top:
                minority[i] += 1
    L = len(clusterings)
    div = {d: float(minority[i] / L) for i, d in enumerate(net.nodes)}
    levels = sorted(set(div.values()), reverse=True)
    rank = {d: levels.index(v) + 1 for d, v in div.items()}

    agreement: dict[tuple[str, str], float] = {}
    for a, b in combinations(range(L), 2):
        agreement[(clusterings[a].layer, clusterings[b].layer)] = layer_agreement(clusterings[a], clusterings[b])
    mean_agree: dict[str, float] = {}
    for c in clusterings:
        vals = [v for (a, b), v in agreement.items() if c.layer in (a, b) and not correlated(a, b)]
        mean_agree[c.layer] = float(np.mean(vals)) if vals else 1.0
    divergent = tuple(c.layer for c in clusterings if mean_agree[c.layer] < divergence_threshold)
    reinforced = tuple(
        (a, b) for (a, b), v in agreement.items() if v >= reinforce_threshold and not correlated(a, b)
    )
    return DiversificationReport(
        nodes=net.nodes,
        clusterings=clusterings,
        diversification=div,
        rank=rank,
        singleton_fraction={d: float(single[i] / L) for i, d in enumerate(net.nodes)},
        agreement=agreement,
        mean_agreement=mean_agree,
        divergent_layers=divergent,
        reinforced_pairs=reinforced,
        thresholds={
            "divergence_threshold": divergence_threshold,
            "reinforce_threshold": reinforce_threshold,
            "cluster_floor": floor,
            "cluster_method": method,
        },
    )


def write_multilayer(net: MultilayerSimilarityNetwork, path) -> None:
    from .report import write_json

    write_json(net, path)
