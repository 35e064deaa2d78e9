"""Control filters for noisy edges, noisy node classes and small components."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph, Partition, components

log = logging.getLogger(__name__)

EDGE, NODE, COMPONENT = "edge", "node", "component"


class FilterError(ValueError):
    pass


@dataclass(frozen=True)
class FilterSpec:
    kind: str
    min_recurrence: int | None = None
    min_overlap: float | None = None
    classes: tuple[str, ...] = ()
    min_size: int | None = None

    def __post_init__(self):
        if self.kind == EDGE:
            r, t = self.min_recurrence, self.min_overlap
            if r is None and t is None:
                raise FilterError("edge filter needs min_recurrence and/or min_overlap")
            if r is not None and r < 1:
                raise FilterError("min_recurrence must be >= 1")
            if t is not None and not 0.0 <= t <= 1.0:
                raise FilterError("min_overlap must lie in [0, 1]")
            if self.classes or self.min_size is not None:
                raise FilterError("edge filter takes only r and theta")
        elif self.kind == NODE:
            if not self.classes:
                raise FilterError("node filter needs at least one class")
            if self.min_recurrence is not None or self.min_overlap is not None or self.min_size is not None:
                raise FilterError("node filter takes only class labels")
        elif self.kind == COMPONENT:
            if self.min_size is None or self.min_size < 2:
                raise FilterError("component filter needs min_size >= 2")
            if self.classes or self.min_recurrence is not None or self.min_overlap is not None:
                raise FilterError("component filter takes only min")
        else:
            raise FilterError(f"unknown filter kind {self.kind!r}")

    @classmethod
    def parse(cls, text: str) -> "FilterSpec":
        """Parse ``edge:r=2,theta=0.1``, ``node:class=staff`` or ``component:min=5``.

        Several node classes are joined with ``+`` (``node:class=a+b``).
        """
        kind, _, body = text.strip().partition(":")
        params: dict[str, str] = {}
        for item in filter(None, (x.strip() for x in body.split(","))):
            key, eq, value = item.partition("=")
            if not eq:
                raise FilterError(f"bad filter parameter {item!r} in {text!r}")
            params[key.strip()] = value.strip()
        try:
            if kind == EDGE:
                unknown = set(params) - {"r", "theta"}
                if unknown:
                    raise FilterError(f"unknown edge filter parameter(s) {sorted(unknown)}")
                r = int(params["r"]) if "r" in params else None
                t = float(params["theta"]) if "theta" in params else None
                return cls(EDGE, min_recurrence=r, min_overlap=t)
            if kind == NODE:
                if set(params) != {"class"}:
                    raise FilterError("node filter takes class=<label>[+<label>...]")
                return cls(NODE, classes=tuple(x for x in params["class"].split("+") if x))
            if kind == COMPONENT:
                if set(params) != {"min"}:
                    raise FilterError("component filter takes min=<size>")
                return cls(COMPONENT, min_size=int(params["min"]))
        except ValueError as exc:
            if isinstance(exc, FilterError):
                raise
            raise FilterError(f"bad filter {text!r}: {exc}") from None
        raise FilterError(f"unknown filter kind {kind!r}; expected edge, node or component")

    def label(self) -> str:
        if self.kind == EDGE:
            parts = []
            if self.min_recurrence is not None:
                parts.append(f"r={self.min_recurrence}")
            if self.min_overlap is not None:
                parts.append(f"theta={self.min_overlap:g}")
            return "edge:" + ",".join(parts)
        if self.kind == NODE:
            return "node:class=" + "+".join(self.classes)
        return f"component:min={self.min_size}"

    def to_dict(self) -> dict:
        out: dict = {"kind": self.kind, "spec": self.label()}
        if self.kind == EDGE:
            out["min_recurrence"] = self.min_recurrence
            out["min_overlap"] = self.min_overlap
        elif self.kind == NODE:
            out["classes"] = list(self.classes)
        else:
            out["min_size"] = self.min_size
        return out


@dataclass(frozen=True)
class FilterOutcome:
    spec: FilterSpec
    graph: Graph
    ground_truth: Partition | None
    kept_nodes: np.ndarray  # original ids of surviving nodes
    removed_nodes: int
    removed_edges: int
    removed_fraction: float  # removed edges / input edges (0 when m = 0)
    details: dict = field(default_factory=dict)

    def summary(self) -> dict:
        return {
            "filter": self.spec.to_dict(),
            "removed_nodes": self.removed_nodes,
            "removed_edges": self.removed_edges,
            "removed_fraction": self.removed_fraction,
            "remaining_nodes": self.graph.n,
            "remaining_edges": self.graph.m,
            **self.details,
        }


def _outcome(spec, g, gt, sub, keep, details=None) -> FilterOutcome:
    if gt is not None and gt.n != g.n:
        raise ValueError("ground truth does not cover the graph")
    removed_edges = g.m - sub.m
    return FilterOutcome(
        spec=spec,
        graph=sub,
        ground_truth=gt.restrict(keep.tolist()) if gt is not None else None,
        kept_nodes=keep,
        removed_nodes=g.n - sub.n,
        removed_edges=removed_edges,
        removed_fraction=removed_edges / g.m if g.m else 0.0,
        details=details or {},
    )


def neighbourhood_overlap(g: Graph) -> np.ndarray:
    """Jaccard overlap of ``N(u) - {v}`` and ``N(v) - {u}`` per edge (0 if both empty)."""
    adj = [set(x) for x in g.adjacency]
    out = np.zeros(g.m)
    for i, (u, v) in enumerate(g.edges.tolist()):
        a, b = adj[u] - {v}, adj[v] - {u}
        union = len(a | b)
        out[i] = len(a & b) / union if union else 0.0
    return out


def filter_edges(
    g: Graph,
    min_recurrence: int | None = None,
    min_overlap: float | None = None,
    ground_truth: Partition | None = None,
) -> FilterOutcome:
    """Drop edges with recurrence below ``min_recurrence`` or neighbourhood
    overlap below ``min_overlap``; nodes the filter leaves isolated are
    dropped too (nodes already isolated in ``g`` are kept).

    Overlap is re-evaluated after each round of removals until no edge fails,
    so the filter is idempotent.
    """
    spec = FilterSpec(EDGE, min_recurrence=min_recurrence, min_overlap=min_overlap)
    keep_edge = np.ones(g.m, dtype=bool)
    if min_recurrence is not None:
        keep_edge &= g.recurrence >= min_recurrence
    cur, _ = g.edge_subgraph(keep_edge)
    if min_overlap is not None and min_overlap > 0:
        while cur.m:
            ok = neighbourhood_overlap(cur) >= min_overlap
            if ok.all():
                break
            cur, _ = cur.edge_subgraph(ok)
    # cur keeps every node of g, so ids still line up with g
    keep = np.flatnonzero((cur.degree > 0) | (g.degree == 0))
    sub, _ = cur.subgraph(keep.tolist())
    dropped = g.n - len(keep)
    if dropped:
        log.info("edge filter dropped %d node(s) left without edges", dropped)
    if sub.m == 0:
        log.warning("edge filter %s removed every edge", spec.label())
    return _outcome(spec, g, ground_truth, sub, keep, {"isolated_dropped": dropped})


def filter_nodes_by_class(
    g: Graph,
    ground_truth: Partition,
    classes,
    missing_ok: bool = False,
) -> FilterOutcome:
    """Remove every node whose ground-truth class is in ``classes``."""
    classes = tuple(classes)
    spec = FilterSpec(NODE, classes=classes)
    if ground_truth.names is None:
        raise FilterError("node filter needs a ground truth with class labels")
    known = set(ground_truth.names)
    unknown = [c for c in classes if c not in known]
    if unknown and not missing_ok:
        raise FilterError(f"unknown class label(s): {', '.join(unknown)}")
    if unknown:
        log.info("node filter: class label(s) not present: %s", ", ".join(unknown))
    drop = set(classes)
    keep = np.array([v for v in range(g.n) if ground_truth.label_of(v) not in drop], dtype=np.int64)
    sub, keep = g.subgraph(keep.tolist())
    if sub.n == 0:
        log.error("node filter %s removed every node", spec.label())
    return _outcome(spec, g, ground_truth, sub, keep)


def filter_components(g: Graph, min_size: int, ground_truth: Partition | None = None) -> FilterOutcome:
    """Drop connected components with fewer than ``min_size`` nodes."""
    spec = FilterSpec(COMPONENT, min_size=min_size)
    comps = components(g)
    kept, removed = [], []
    for c in comps:
        (kept if len(c) >= min_size else removed).append(c)
    deg = g.degree
    removed_info = []
    for c in removed:
        s = len(c)
        l = int(sum(int(deg[v]) for v in c)) // 2
        removed_info.append({"size": s, "density": 2.0 * l / (s * (s - 1)) if s > 1 else 0.0})
    sub, keep = g.subgraph(v for c in kept for v in c)
    return _outcome(spec, g, ground_truth, sub, keep, {"removed_components": len(removed), "removed_component_stats": removed_info})


def apply_filter(g: Graph, spec: FilterSpec, ground_truth: Partition | None = None) -> FilterOutcome:
    if spec.kind == EDGE:
        return filter_edges(g, spec.min_recurrence, spec.min_overlap, ground_truth)
    if spec.kind == NODE:
        if ground_truth is None:
            raise FilterError("node filter needs a ground truth")
        # classes already gone (e.g. removed by an earlier pass) are a no-op
        return filter_nodes_by_class(g, ground_truth, spec.classes, missing_ok=True)
    return filter_components(g, spec.min_size, ground_truth)


def would_change(g: Graph, spec: FilterSpec, ground_truth: Partition | None = None) -> bool:
    """True when applying ``spec`` would remove at least one node or edge."""
    try:
        out = apply_filter(g, spec, ground_truth)
    except FilterError:
        return False
    return out.removed_edges > 0 or out.removed_nodes > 0


def inter_class_fraction(g: Graph, ground_truth: Partition) -> dict[str, float]:
    """Per class: share of its members' edge endpoints that leave the class."""
    if ground_truth.names is None:
        return {}
    a = ground_truth.assignment
    inter = np.zeros(ground_truth.k)
    total = np.zeros(ground_truth.k)
    for u, v in g.edges.tolist():
        cross = a[u] != a[v]
        for x in (u, v):
            total[a[x]] += 1
            inter[a[x]] += cross
    return {
        name: float(inter[c] / total[c]) if total[c] else 0.0 for c, name in enumerate(ground_truth.names)
    }


def candidate_noisy_classes(g: Graph, ground_truth: Partition, threshold: float = 0.5) -> list[str]:
    """Classes (of two or more nodes) whose inter-class edge fraction exceeds ``threshold``."""
    if ground_truth.names is None:
        return []
    frac = inter_class_fraction(g, ground_truth)
    sizes = ground_truth.sizes
    return [name for c, name in enumerate(ground_truth.names) if sizes[c] >= 2 and frac[name] > threshold]
