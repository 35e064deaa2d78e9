"""Walktrap: agglomerative clustering on t-step random-walk distances.

Each node gets a self-loop before building the transition matrix. Adjacent
communities are merged by smallest increase of the Ward criterion

    dsigma(C1, C2) = 1/n * |C1||C2| / (|C1| + |C2|) * r(C1, C2)^2

where ``r`` is the degree-scaled euclidean distance between the communities'
t-step walk distributions. The dendrogram is cut at maximum modularity. The
seed only orders merges whose criterion values tie exactly.
"""

from __future__ import annotations

import heapq

import numpy as np

from ..graph import Graph, Partition

WALK_LENGTH = 4


def merge_sequence(g: Graph, seed: int | None = None, t: int = WALK_LENGTH):
    """Full agglomeration: ``(merges, modularities)``.

    ``merges[i] = (c1, c2, new)`` uses ids ``0..n-1`` for nodes and ``n + i``
    for the community created by merge ``i``; ``modularities[i]`` is the
    modularity after ``i`` merges.
    """
    n = g.n
    rng = np.random.default_rng(seed)
    prio = rng.permutation(n).tolist()

    a = g.adjacency_matrix() + np.eye(n)
    d = a.sum(axis=1)
    p = a / d[:, None]
    pt = np.linalg.matrix_power(p, t)
    vec = {i: pt[i] / np.sqrt(d) for i in range(n)}
    size = {i: 1 for i in range(n)}
    rank = {i: prio[i] for i in range(n)}

    m = float(g.m)
    links: dict[int, dict[int, int]] = {i: {} for i in range(n)}
    for u, v in g.edges.tolist():
        links[u][v] = links[u].get(v, 0) + 1
        links[v][u] = links[v].get(u, 0) + 1
    vol = {i: float(g.degree[i]) for i in range(n)}
    q = -sum((vol[i] / (2 * m)) ** 2 for i in range(n))

    def dsigma(c1, c2):
        diff = vec[c1] - vec[c2]
        return size[c1] * size[c2] / (size[c1] + size[c2]) * float(diff @ diff) / n

    heap = []

    def push(c1, c2):
        if c1 > c2:
            c1, c2 = c2, c1
        key = (min(rank[c1], rank[c2]), max(rank[c1], rank[c2]))
        heapq.heappush(heap, (dsigma(c1, c2), key, c1, c2))

    for u in range(n):
        for v in links[u]:
            if u < v:
                push(u, v)

    merges: list[tuple[int, int, int]] = []
    history = [q]
    alive = set(range(n))
    next_id = n
    while heap:
        _, _, c1, c2 = heapq.heappop(heap)
        if c1 not in alive or c2 not in alive:
            continue
        new = next_id
        next_id += 1
        s1, s2 = size[c1], size[c2]
        vec[new] = (s1 * vec[c1] + s2 * vec[c2]) / (s1 + s2)
        size[new] = s1 + s2
        rank[new] = min(rank[c1], rank[c2])
        q += links[c1].get(c2, 0) / m - 2 * vol[c1] * vol[c2] / (4 * m * m)
        vol[new] = vol[c1] + vol[c2]
        merged: dict[int, int] = {}
        for c in (c1, c2):
            for x, e in links[c].items():
                if x in (c1, c2):
                    continue
                merged[x] = merged.get(x, 0) + e
                del links[x][c]
            del links[c], vec[c]
        links[new] = merged
        for x, e in merged.items():
            links[x][new] = e
        alive -= {c1, c2}
        alive.add(new)
        merges.append((c1, c2, new))
        for x in sorted(merged):
            push(x, new)
        history.append(q)
    return merges, history


def walktrap(g: Graph, seed: int | None = None, t: int = WALK_LENGTH) -> Partition:
    n = g.n
    if g.m == 0:
        return Partition.singletons(n)
    merges, history = merge_sequence(g, seed, t)
    best_step = 0
    for i, q in enumerate(history):
        if q > history[best_step] + 1e-12:
            best_step = i
    owner = list(range(n))
    member = {i: [i] for i in range(n)}
    for c1, c2, new in merges[:best_step]:
        member[new] = member.pop(c1) + member.pop(c2)
    for c, nodes in member.items():
        for v in nodes:
            owner[v] = c
    return Partition(owner)
