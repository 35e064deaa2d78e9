"""Greedy agglomerative modularity maximisation (Clauset-Newman-Moore style).

Starts from singletons and repeatedly merges the connected pair of
communities with the largest modularity gain, stopping once no merge has a
positive gain. With ``E_ij`` the edge count between two communities and
``D_i`` their degree sums, the gain scaled by ``2m^2`` is the integer
``2m * E_ij - D_i * D_j``.
"""

from __future__ import annotations

from ..graph import Graph, Partition


def greedy_modularity(g: Graph, seed: int | None = None) -> Partition:
    n = g.n
    if g.m == 0:
        return Partition.singletons(n)
    m2 = 2 * g.m
    between: dict[int, dict[int, int]] = {v: {} for v in range(n)}
    for u, v in g.edges.tolist():
        between[u][v] = between[u].get(v, 0) + 1
        between[v][u] = between[v].get(u, 0) + 1
    deg = {v: int(d) for v, d in enumerate(g.degree.tolist())}
    parent = list(range(n))

    while True:
        best = None
        for i in sorted(between):
            di = deg[i]
            for j, e in between[i].items():
                if j <= i:
                    continue
                gain = m2 * e - di * deg[j]
                if best is None or gain > best[0] or (gain == best[0] and (i, j) < best[1:]):
                    best = (gain, i, j)
        if best is None or best[0] <= 0:
            break
        _, i, j = best
        # fold j into i
        for x, e in between.pop(j).items():
            if x == i:
                continue
            between[x].pop(j)
            between[x][i] = between[x].get(i, 0) + e
            between[i][x] = between[i].get(x, 0) + e
        between[i].pop(j, None)
        deg[i] += deg.pop(j)
        parent[j] = i

    def root(v):
        while parent[v] != v:
            v = parent[v]
        return v

    return Partition([root(v) for v in range(n)])
