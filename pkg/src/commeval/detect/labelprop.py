"""Asynchronous label propagation (Raghavan, Albert and Kumara)."""

from __future__ import annotations

from collections import Counter

import numpy as np

from ..graph import Graph, Partition

MAX_SWEEPS = 1000


def label_propagation(g: Graph, seed: int | None = None) -> Partition:
    rng = np.random.default_rng(seed)
    adj = g.adjacency
    labels = list(range(g.n))

    def best_labels(v):
        counts = Counter(labels[u] for u in adj[v])
        top = max(counts.values())
        return sorted(lab for lab, c in counts.items() if c == top)

    for _ in range(MAX_SWEEPS):
        for v in rng.permutation(g.n).tolist():
            if not adj[v]:
                continue
            best = best_labels(v)
            labels[v] = best[int(rng.integers(len(best)))] if len(best) > 1 else best[0]
        if all(not adj[v] or labels[v] in best_labels(v) for v in range(g.n)):
            break
    return Partition(labels)
