"""Girvan-Newman divisive clustering with exact betweenness recomputation."""

from __future__ import annotations

import numpy as np

from ..graph import Graph, Partition
from ..structural import modularity

MAX_EDGES = 5000


class GraphTooLargeError(ValueError):
    pass


def edge_betweenness_matrix(a: np.ndarray) -> np.ndarray:
    """Unnormalised shortest-path edge betweenness of an unweighted graph.

    Brandes' accumulation run for all sources at once with dense matrix
    products, one BFS level at a time. Returns a symmetric matrix whose
    ``[u, v]`` entry is the betweenness of edge ``(u, v)``, counting each
    unordered source/target pair once.
    """
    n = a.shape[0]
    if n == 0:
        return np.zeros((0, 0))
    dist = np.full((n, n), -1, dtype=np.int64)
    np.fill_diagonal(dist, 0)
    sigma = np.eye(n)
    frontier = np.eye(n, dtype=bool)
    levels = [frontier]
    d = 0
    while True:
        reach = (sigma * frontier) @ a
        new = (dist < 0) & (reach > 0)
        if not new.any():
            break
        d += 1
        dist[new] = d
        sigma[new] = reach[new]
        frontier = new
        levels.append(new)
    delta = np.zeros((n, n))
    eb = np.zeros((n, n))
    with np.errstate(divide="ignore", invalid="ignore"):
        for lvl in range(len(levels) - 1, 0, -1):
            coef = np.where(levels[lvl], (1.0 + delta) / sigma, 0.0)
            prev = np.where(levels[lvl - 1], sigma, 0.0)
            eb += (prev.T @ coef) * a
            delta += prev * (coef @ a)
    # each unordered pair was accumulated from both of its endpoints
    return (eb + eb.T) / 2.0


def _component_of(adj: list[set[int]], start: int) -> list[int]:
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for w in adj[u]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return sorted(seen)


def girvan_newman_dendrogram(g: Graph, allow_slow: bool = False):
    """Yield ``(removed_edge, partition)`` after every edge removal.

    The first item is ``(None, component partition of g)``. Edges with equal
    maximal betweenness (relative tolerance 1e-9) are removed in
    lexicographic order.
    """
    if g.m > MAX_EDGES and not allow_slow:
        raise GraphTooLargeError(
            f"Girvan-Newman on {g.m} edges exceeds {MAX_EDGES}; pass allow_slow to run anyway"
        )
    n = g.n
    adj = [set(x) for x in g.adjacency]
    comp_id = np.empty(n, dtype=np.int64)
    comps: dict[int, list[int]] = {}
    seen: set[int] = set()
    for v in range(n):
        if v not in seen:
            members = _component_of(adj, v)
            seen.update(members)
            comps[len(comps)] = members
            comp_id[members] = len(comps) - 1
    yield None, Partition(comp_id.tolist())

    # betweenness cache per component: {(u, v): value}
    cache: dict[int, dict[tuple[int, int], float]] = {}

    def refresh(cid):
        members = comps[cid]
        sub = np.zeros((len(members), len(members)))
        pos = {v: i for i, v in enumerate(members)}
        for u in members:
            for w in adj[u]:
                sub[pos[u], pos[w]] = 1.0
        eb = edge_betweenness_matrix(sub)
        vals = {}
        for u in members:
            for w in adj[u]:
                if u < w:
                    vals[(u, w)] = float(eb[pos[u], pos[w]])
        cache[cid] = vals

    for cid in list(comps):
        refresh(cid)

    remaining = g.m
    next_id = len(comps)
    while remaining:
        top = max((max(v.values()) for v in cache.values() if v), default=None)
        cands = [
            e for v in cache.values() for e, b in v.items() if b >= top - 1e-9 * max(abs(top), 1.0)
        ]
        u, w = min(cands)
        adj[u].discard(w)
        adj[w].discard(u)
        remaining -= 1
        cid = int(comp_id[u])
        part_u = _component_of(adj, u)
        if w in set(part_u):
            refresh(cid)
        else:
            part_w = [x for x in comps[cid] if x not in set(part_u)]
            del comps[cid]
            del cache[cid]
            for members in (part_u, part_w):
                comps[next_id] = members
                comp_id[members] = next_id
                refresh(next_id)
                next_id += 1
        yield (u, w), Partition(comp_id.tolist())


def girvan_newman(g: Graph, seed: int | None = None, allow_slow: bool = False) -> Partition:
    """Cut the divisive dendrogram at its maximum-modularity level."""
    if g.m == 0:
        return Partition.singletons(g.n)
    best_q = None
    best = None
    last_k = -1
    for _, p in girvan_newman_dendrogram(g, allow_slow=allow_slow):
        if p.k == last_k:
            continue
        last_k = p.k
        q = modularity(g, p)
        if best_q is None or q > best_q + 1e-12:
            best_q, best = q, p
    return best
