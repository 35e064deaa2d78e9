"""Partition similarity metrics: RI, ARI, NMI, VI and split-join distance.

All five are computed from one contingency table. Entropies use natural
logarithms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .graph import Partition

SIMILARITY_METRICS = ("RI", "ARI", "NMI", "VI", "SJD")
DISTANCE_METRICS = frozenset({"VI", "SJD"})


@dataclass(frozen=True)
class ContingencyTable:
    counts: np.ndarray
    rows: np.ndarray
    cols: np.ndarray
    n: int


@dataclass(frozen=True)
class SimilarityScore:
    metric: str
    value: float
    normalized_value: float
    flagged: bool = False

    @property
    def similarity(self) -> float:
        """Normalized value oriented so that higher means more similar."""
        if self.metric in DISTANCE_METRICS:
            return 1.0 - self.normalized_value
        return self.normalized_value


def contingency(p1: Partition, p2: Partition) -> ContingencyTable:
    if p1.n != p2.n:
        raise ValueError(f"partitions cover different node sets ({p1.n} vs {p2.n} nodes)")
    counts = np.zeros((p1.k, p2.k), dtype=np.int64)
    np.add.at(counts, (p1.assignment, p2.assignment), 1)
    return ContingencyTable(counts, counts.sum(axis=1), counts.sum(axis=0), p1.n)


def _pairs(x) -> float:
    x = np.asarray(x, dtype=float)
    return math.fsum((x * (x - 1) / 2.0).ravel().tolist())


def _entropy(sizes: np.ndarray, n: int) -> float:
    q = sizes[sizes > 0] / n
    # fsum is exactly rounded, so the result does not depend on label order
    return -math.fsum((q * np.log(q)).tolist())


def _mutual_information(t: ContingencyTable) -> float:
    nz = t.counts > 0
    nij = t.counts[nz].astype(float)
    outer = np.outer(t.rows, t.cols)[nz].astype(float)
    return math.fsum((nij / t.n * np.log(t.n * nij / outer)).tolist())


def _same_clustering(t: ContingencyTable) -> bool:
    """True when the table is a permutation matrix (equal up to relabelling)."""
    k = t.counts.shape[0]
    return k == t.counts.shape[1] and int(np.count_nonzero(t.counts)) == k


def rand_index(p1: Partition, p2: Partition) -> SimilarityScore:
    t = contingency(p1, p2)
    if t.n < 2:
        raise ValueError("Rand index needs at least two nodes")
    total = t.n * (t.n - 1) / 2.0
    both = _pairs(t.counts)
    # agreements = together in both + apart in both
    agree = total + 2 * both - _pairs(t.rows) - _pairs(t.cols)
    v = agree / total
    return SimilarityScore("RI", v, v)


def adjusted_rand(p1: Partition, p2: Partition) -> SimilarityScore:
    """Pair-counting ARI; its normalized value maps [-1, 1] onto [0, 1]."""
    t = contingency(p1, p2)
    total = t.n * (t.n - 1) / 2.0
    index = _pairs(t.counts)
    a, b = _pairs(t.rows), _pairs(t.cols)
    expected = a * b / total if total else 0.0
    maximum = (a + b) / 2.0
    if math.isclose(maximum, expected, rel_tol=0.0, abs_tol=1e-12):
        v = 1.0 if p1 == p2 else 0.0
        return SimilarityScore("ARI", v, (v + 1.0) / 2.0, flagged=True)
    v = (index - expected) / (maximum - expected)
    return SimilarityScore("ARI", v, (v + 1.0) / 2.0)


def nmi(p1: Partition, p2: Partition) -> SimilarityScore:
    t = contingency(p1, p2)
    h1, h2 = _entropy(t.rows, t.n), _entropy(t.cols, t.n)
    if h1 == 0.0 and h2 == 0.0:
        return SimilarityScore("NMI", 1.0, 1.0, flagged=True)
    if _same_clustering(t):
        # I = H1 = H2 exactly; skip the rounding of the general formula
        return SimilarityScore("NMI", 1.0, 1.0)
    v = 2.0 * _mutual_information(t) / (h1 + h2)
    v = min(max(v, 0.0), 1.0)
    return SimilarityScore("NMI", v, v)


def variation_of_information(p1: Partition, p2: Partition) -> SimilarityScore:
    t = contingency(p1, p2)
    if _same_clustering(t):
        return SimilarityScore("VI", 0.0, 0.0)
    h1, h2 = _entropy(t.rows, t.n), _entropy(t.cols, t.n)
    v = max(h1 + h2 - 2.0 * _mutual_information(t), 0.0)
    norm = v / math.log(t.n) if t.n >= 2 else 0.0
    return SimilarityScore("VI", v, min(norm, 1.0))


def split_join(p1: Partition, p2: Partition) -> SimilarityScore:
    t = contingency(p1, p2)
    if t.n == 0:
        return SimilarityScore("SJD", 0.0, 0.0)
    d12 = t.n - int(t.counts.max(axis=1).sum())
    d21 = t.n - int(t.counts.max(axis=0).sum())
    v = float(d12 + d21)
    return SimilarityScore("SJD", v, v / (2.0 * t.n))


_FUNCS = {
    "RI": rand_index,
    "ARI": adjusted_rand,
    "NMI": nmi,
    "VI": variation_of_information,
    "SJD": split_join,
}


def similarity(p1: Partition, p2: Partition, metric: str) -> SimilarityScore:
    try:
        return _FUNCS[metric](p1, p2)
    except KeyError:
        raise ValueError(f"unknown similarity metric {metric!r}; expected one of {SIMILARITY_METRICS}") from None


def identity_value(metric: str) -> float:
    return 0.0 if metric in DISTANCE_METRICS else 1.0


@dataclass(frozen=True)
class PairwiseMatrix:
    metric: str
    detectors: tuple[str, ...]
    values: np.ndarray  # normalized values, distance metrics not flipped
    cv: np.ndarray  # coefficient of variation across aligned repetitions

    def similarities(self) -> np.ndarray:
        """Values oriented so that higher means more similar."""
        if self.metric in DISTANCE_METRICS:
            return 1.0 - self.values
        return self.values.copy()


def group_runs(runs) -> dict[str, list]:
    """Runs grouped by detector id, preserving first-appearance order."""
    groups: dict[str, list] = {}
    for r in runs:
        groups.setdefault(r.detector.id, []).append(r)
    return groups


def pairwise_matrix(runs: Sequence, metric: str, all_pairs: bool = False) -> PairwiseMatrix:
    """Similarity between every pair of detectors across their repetitions.

    The i-th repetition of one detector is compared with the i-th repetition of
    the other (indices wrap for the shorter list); ``all_pairs`` compares every
    repetition with every other instead. Cells hold the mean normalized value.
    """
    groups = group_runs(runs)
    if len(groups) < 2:
        raise ValueError("pairwise_matrix needs runs from at least two detectors")
    sizes = {r.partition.n for r in runs}
    if len(sizes) != 1:
        raise ValueError("runs come from graphs of different sizes")
    ids = tuple(groups)
    k = len(ids)
    values = np.full((k, k), identity_value(metric))
    cv = np.zeros((k, k))
    cache: dict[tuple[Partition, Partition], float] = {}

    def score(a: Partition, b: Partition) -> float:
        key = (a, b)
        if key not in cache:
            cache[key] = similarity(a, b, metric).normalized_value
        return cache[key]

    for i in range(k):
        for j in range(i + 1, k):
            ra, rb = groups[ids[i]], groups[ids[j]]
            if all_pairs:
                vals = [score(x.partition, y.partition) for x in ra for y in rb]
            else:
                reps = max(len(ra), len(rb))
                vals = [score(ra[t % len(ra)].partition, rb[t % len(rb)].partition) for t in range(reps)]
            arr = np.array(vals)
            mean = float(arr.mean())
            values[i, j] = values[j, i] = mean
            c = float(arr.std() / mean) if mean > 0 else 0.0
            cv[i, j] = cv[j, i] = c
    return PairwiseMatrix(metric, ids, values, cv)
