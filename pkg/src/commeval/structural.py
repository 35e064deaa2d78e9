"""Structural quality metrics of a partition (unweighted; recurrence ignored)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph import Graph, Partition


class UndefinedMetricError(ValueError):
    """A metric is mathematically undefined for the given input (e.g. m = 0)."""


def _check(g: Graph, p: Partition) -> None:
    if p.n != g.n:
        raise ValueError(f"partition covers {p.n} nodes, graph has {g.n}")


def _community_counts(g: Graph, p: Partition) -> tuple[np.ndarray, np.ndarray]:
    """Internal edge count and total degree per community."""
    a = p.assignment
    internal = np.zeros(p.k, dtype=np.int64)
    if g.m:
        cu, cv = a[g.edges[:, 0]], a[g.edges[:, 1]]
        same = cu == cv
        np.add.at(internal, cu[same], 1)
    vol = np.zeros(p.k, dtype=np.int64)
    np.add.at(vol, a, g.degree)
    return internal, vol


def modularity(g: Graph, p: Partition) -> float:
    _check(g, p)
    if g.m == 0:
        raise UndefinedMetricError("modularity is undefined on a graph without edges")
    internal, vol = _community_counts(g, p)
    m = float(g.m)
    return float(np.sum(internal / m - (vol / (2.0 * m)) ** 2))


@dataclass(frozen=True)
class Conductance:
    per_community: tuple[float, ...]
    mean: float
    max: float
    # communities whose complement (or own) volume is zero; reported as 0
    flagged: tuple[int, ...] = ()


def conductance(g: Graph, p: Partition) -> Conductance:
    _check(g, p)
    internal, vol = _community_counts(g, p)
    total = int(vol.sum())
    cut = vol - 2 * internal
    values = []
    flagged = []
    for c in range(p.k):
        denom = min(int(vol[c]), total - int(vol[c]))
        if cut[c] == 0:
            if denom == 0:
                flagged.append(c)
            values.append(0.0)
        elif denom == 0:
            # unreachable: a positive cut puts volume on both sides
            flagged.append(c)
            values.append(0.0)
        else:
            values.append(float(cut[c]) / denom)
    arr = np.array(values)
    return Conductance(tuple(values), float(arr.mean()), float(arr.max()), tuple(flagged))


def coverage(g: Graph, p: Partition) -> float:
    _check(g, p)
    if g.m == 0:
        raise UndefinedMetricError("coverage is undefined on a graph without edges")
    internal, _ = _community_counts(g, p)
    return float(internal.sum()) / g.m


@dataclass(frozen=True)
class InternalDensity:
    per_community: tuple[float, ...]
    mean: float
    singletons: tuple[int, ...] = ()


def internal_density(g: Graph, p: Partition) -> InternalDensity:
    """``2 l_c / (s (s - 1))`` per community; singletons count as 1.0."""
    _check(g, p)
    internal, _ = _community_counts(g, p)
    sizes = p.sizes
    values = []
    singles = []
    for c in range(p.k):
        s = int(sizes[c])
        if s == 1:
            singles.append(c)
            values.append(1.0)
        else:
            values.append(2.0 * int(internal[c]) / (s * (s - 1)))
    return InternalDensity(tuple(values), float(np.mean(values)), tuple(singles))


@dataclass(frozen=True)
class PartitionStats:
    k: int
    size_cv: float
    singleton_fraction: float
    size_histogram: dict[int, int] = field(default_factory=dict)


def partition_stats(p: Partition) -> PartitionStats:
    sizes = p.sizes.astype(float)
    if p.k == 0:
        return PartitionStats(0, 0.0, 0.0, {})
    cv = float(sizes.std() / sizes.mean()) if p.k > 1 else 0.0
    hist: dict[int, int] = {}
    for s in sorted(p.sizes.tolist()):
        hist[s] = hist.get(s, 0) + 1
    return PartitionStats(
        k=p.k,
        size_cv=cv,
        singleton_fraction=float(np.sum(p.sizes == 1)) / p.k,
        size_histogram=hist,
    )


@dataclass(frozen=True)
class StructuralScores:
    modularity: float
    conductance_per_community: tuple[float, ...]
    conductance_mean: float
    conductance_max: float
    coverage: float
    internal_density_mean: float
    k: int
    size_cv: float
    singleton_fraction: float

    def metric(self, name: str) -> float:
        return float(getattr(self, name))

    def to_dict(self) -> dict:
        return {
            "modularity": self.modularity,
            "conductance_per_community": list(self.conductance_per_community),
            "conductance_mean": self.conductance_mean,
            "conductance_max": self.conductance_max,
            "coverage": self.coverage,
            "internal_density_mean": self.internal_density_mean,
            "k": self.k,
            "size_cv": self.size_cv,
            "singleton_fraction": self.singleton_fraction,
        }


# metric ids that a StructuralScores contributes to evidence records
STRUCTURAL_METRICS = (
    "modularity",
    "conductance_mean",
    "coverage",
    "internal_density_mean",
    "k",
    "size_cv",
    "singleton_fraction",
)

# direction of "better" for each structural metric
HIGHER_IS_BETTER = {
    "modularity": True,
    "conductance_mean": False,
    "coverage": True,
    "internal_density_mean": True,
}


def structural_scores(g: Graph, p: Partition) -> StructuralScores:
    cond = conductance(g, p)
    ps = partition_stats(p)
    return StructuralScores(
        modularity=modularity(g, p),
        conductance_per_community=cond.per_community,
        conductance_mean=cond.mean,
        conductance_max=cond.max,
        coverage=coverage(g, p),
        internal_density_mean=internal_density(g, p).mean,
        k=p.k,
        size_cv=ps.size_cv,
        singleton_fraction=ps.singleton_fraction,
    )
