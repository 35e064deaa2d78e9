"""Evidence records, distribution summaries and the relative score distance."""

from __future__ import annotations

import csv
import math
from dataclasses import astuple, dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .structural import StructuralScores

STRUCTURAL = "structural"
FUNCTIONAL = "functional"
COMBINED = "combined"
GT_ID = "GT"

CSV_COLUMNS = ("network_id", "iteration", "strategy", "detector", "metric", "seed", "value")

# structural quantities compared between ground truth and detected communities
COMBINED_METRICS = ("modularity", "k", "coverage", "conductance_mean")


@dataclass(frozen=True)
class EvidenceRecord:
    network_id: str
    iteration: int
    strategy: str
    detector: str
    metric: str
    seed: int
    value: float


def score_distance(s1: float, s2: float) -> float:
    """``|s1 - s2| / (s1 + s2)`` for non-negative scores, with ``d(0, 0) = 0``."""
    if s1 < 0 or s2 < 0:
        raise ValueError(f"score distance needs non-negative scores, got {s1} and {s2}")
    total = s1 + s2
    if total == 0:
        return 0.0
    return abs(s1 - s2) / total


def signed_to_unit(x: float) -> float:
    """Map a score in [-1, 1] (e.g. ARI) onto [0, 1]."""
    return (x + 1.0) / 2.0


def quantile(sorted_values: Sequence[float], q: float) -> float:
    """Linear interpolation between closest ranks (numpy's default method)."""
    return float(np.quantile(np.asarray(sorted_values, dtype=float), q))


@dataclass(frozen=True)
class EvidenceSummary:
    median: float
    q1: float
    q3: float
    iqr: float
    mean: float
    std: float
    cv: float | None  # None when mean <= 0
    min: float
    max: float
    count: int

    def to_dict(self) -> dict:
        return {
            "count": self.count,
            "min": self.min,
            "q1": self.q1,
            "median": self.median,
            "q3": self.q3,
            "max": self.max,
            "iqr": self.iqr,
            "mean": self.mean,
            "std": self.std,
            "cv": self.cv,
        }


def summary_of(values: Iterable[float]) -> EvidenceSummary:
    arr = np.sort(np.asarray(list(values), dtype=float))
    if arr.size == 0:
        raise ValueError("cannot summarise an empty group")
    q1, med, q3 = (float(x) for x in np.quantile(arr, [0.25, 0.5, 0.75]))
    if arr[0] == arr[-1]:
        # constant sample: avoid rounding noise in mean/std
        mean, std = float(arr[0]), 0.0
    else:
        mean = float(arr.mean())
        std = float(arr.std())
    cv = std / mean if mean > 0 else None
    if cv is not None and std == 0.0:
        cv = 0.0
    return EvidenceSummary(
        median=med,
        q1=q1,
        q3=q3,
        iqr=q3 - q1,
        mean=mean,
        std=std,
        cv=cv,
        min=float(arr[0]),
        max=float(arr[-1]),
        count=int(arr.size),
    )


def summarize(
    records: Iterable[EvidenceRecord],
    group_by: Sequence[str] = ("network_id", "iteration", "strategy", "detector", "metric"),
) -> dict[tuple, EvidenceSummary]:
    """One summary per distinct ``group_by`` key, keys in sorted order."""
    groups: dict[tuple, list[float]] = {}
    for r in records:
        key = tuple(getattr(r, f) for f in group_by)
        groups.setdefault(key, []).append(r.value)
    return {key: summary_of(groups[key]) for key in sorted(groups, key=_sort_key)}


def _sort_key(key: tuple):
    return tuple((0, x) if isinstance(x, (int, float)) else (1, str(x)) for x in key)


def combined_evidence(
    gt_scores: StructuralScores,
    run_scores: Mapping[str, StructuralScores] | Sequence[tuple[str, int, StructuralScores]],
    network_id: str = "",
    iteration: int = 0,
) -> list[EvidenceRecord]:
    """Score distance between ground-truth and detected structural values.

    ``run_scores`` maps detector ids to scores, or is a sequence of
    ``(detector, seed, scores)`` triples (one per repetition). Negative
    modularity is clipped to 0 before the distance is taken.
    """
    if isinstance(run_scores, Mapping):
        items = [(d, 0, s) for d, s in run_scores.items()]
    else:
        items = list(run_scores)
    out = []
    for det, seed, scores in items:
        for metric in COMBINED_METRICS:
            a = max(gt_scores.metric(metric), 0.0)
            b = max(scores.metric(metric), 0.0)
            out.append(EvidenceRecord(network_id, iteration, COMBINED, det, metric, seed, score_distance(a, b)))
    return out


def fmt(x) -> str:
    """Fixed 12-significant-digit rendering used by every written artifact."""
    if isinstance(x, bool) or x is None:
        return str(x)
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        return ""
    out = format(x, ".12g")
    return "0" if out == "-0" else out


def write_csv(records: Iterable[EvidenceRecord], path) -> int:
    count = 0
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in records:
            row = list(astuple(r))
            row[-1] = fmt(row[-1])
            w.writerow(row)
            count += 1
    return count


def read_csv(path) -> list[EvidenceRecord]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    return [
        EvidenceRecord(
            r["network_id"], int(r["iteration"]), r["strategy"], r["detector"], r["metric"], int(r["seed"]), float(r["value"])
        )
        for r in rows
    ]
