"""Graph and partition data model, file ingestion and network statistics."""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

log = logging.getLogger(__name__)


class GraphFormatError(ValueError):
    """Raised for malformed edge-list, ground-truth or partition files."""

    def __init__(self, message: str, path=None, line: int | None = None):
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)
        self.path = path
        self.line = line


class Graph:
    """Immutable undirected simple graph over dense node ids ``0..n-1``.

    Edges are stored once as ``(u, v)`` with ``u < v`` and sorted. Every edge
    carries a recurrence count (observed interactions, at least 1). ``labels``
    optionally maps node ids to a ground-truth class string.
    """

    def __init__(
        self,
        n: int,
        edges: Iterable[tuple[int, int]] = (),
        recurrence: Sequence[int] | None = None,
        names: Sequence[str] | None = None,
        labels: Mapping[int, str] | None = None,
    ):
        if n < 0:
            raise ValueError("node count must be non-negative")
        edges = list(edges)
        if recurrence is None:
            recurrence = [1] * len(edges)
        if len(recurrence) != len(edges):
            raise ValueError("recurrence must have one entry per edge")
        merged: dict[tuple[int, int], int] = {}
        for (u, v), r in zip(edges, recurrence):
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) references a node outside 0..{n - 1}")
            if u == v:
                raise ValueError(f"self-loop on node {u}")
            if r < 1:
                raise ValueError(f"recurrence of edge ({u}, {v}) must be >= 1")
            key = (u, v) if u < v else (v, u)
            merged[key] = merged.get(key, 0) + int(r)
        keys = sorted(merged)
        self._n = n
        self._edges = np.array(keys, dtype=np.int64).reshape(-1, 2)
        self._recurrence = np.array([merged[k] for k in keys], dtype=np.int64)
        self._edges.setflags(write=False)
        self._recurrence.setflags(write=False)
        if names is None:
            names = [str(i) for i in range(n)]
        if len(names) != n:
            raise ValueError("names must have one entry per node")
        self._names = tuple(str(x) for x in names)
        if len(set(self._names)) != n:
            raise ValueError("node names must be unique")
        self._labels = dict(sorted((int(k), str(v)) for k, v in (labels or {}).items()))
        for k in self._labels:
            if not 0 <= k < n:
                raise ValueError(f"label for unknown node {k}")

    @property
    def n(self) -> int:
        return self._n

    @property
    def m(self) -> int:
        return len(self._edges)

    @property
    def edges(self) -> np.ndarray:
        """``(m, 2)`` array of ``u < v`` pairs in lexicographic order."""
        return self._edges

    @property
    def recurrence(self) -> np.ndarray:
        return self._recurrence

    @property
    def names(self) -> tuple[str, ...]:
        return self._names

    @property
    def labels(self) -> dict[int, str]:
        return dict(self._labels)

    @cached_property
    def name_index(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self._names)}

    @cached_property
    def degree(self) -> np.ndarray:
        deg = np.zeros(self._n, dtype=np.int64)
        if self.m:
            np.add.at(deg, self._edges[:, 0], 1)
            np.add.at(deg, self._edges[:, 1], 1)
        deg.setflags(write=False)
        return deg

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        """Sorted neighbour tuples, indexed by node id."""
        nbrs: list[list[int]] = [[] for _ in range(self._n)]
        for u, v in self._edges.tolist():
            nbrs[u].append(v)
            nbrs[v].append(u)
        return tuple(tuple(sorted(x)) for x in nbrs)

    @cached_property
    def edge_index(self) -> dict[tuple[int, int], int]:
        return {(u, v): i for i, (u, v) in enumerate(self._edges.tolist())}

    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self._n, self._n), dtype=float)
        if self.m:
            a[self._edges[:, 0], self._edges[:, 1]] = 1.0
            a[self._edges[:, 1], self._edges[:, 0]] = 1.0
        return a

    def has_edge(self, u: int, v: int) -> bool:
        key = (u, v) if u < v else (v, u)
        return key in self.edge_index

    def edge_recurrence(self, u: int, v: int) -> int:
        key = (u, v) if u < v else (v, u)
        return int(self._recurrence[self.edge_index[key]])

    def subgraph(self, nodes: Iterable[int]) -> tuple["Graph", np.ndarray]:
        """Induced subgraph on ``nodes`` with ids re-densified in ascending order.

        Returns the subgraph and the array of original ids (new id -> old id).
        """
        keep = np.array(sorted(set(int(x) for x in nodes)), dtype=np.int64)
        remap = -np.ones(self._n, dtype=np.int64)
        remap[keep] = np.arange(len(keep))
        if self.m:
            mask = (remap[self._edges[:, 0]] >= 0) & (remap[self._edges[:, 1]] >= 0)
        else:
            mask = np.zeros(0, dtype=bool)
        return self.edge_subgraph(mask, keep=keep)

    def edge_subgraph(self, edge_mask: np.ndarray, keep: np.ndarray | None = None) -> tuple["Graph", np.ndarray]:
        """Keep the edges selected by ``edge_mask`` and the nodes in ``keep``.

        When ``keep`` is None every node is retained.
        """
        if keep is None:
            keep = np.arange(self._n, dtype=np.int64)
        remap = -np.ones(self._n, dtype=np.int64)
        remap[keep] = np.arange(len(keep))
        kept = self._edges[edge_mask] if self.m else self._edges
        rec = self._recurrence[edge_mask] if self.m else self._recurrence
        new_edges = [(int(remap[u]), int(remap[v])) for u, v in kept]
        if any(u < 0 or v < 0 for u, v in new_edges):
            raise ValueError("edge subgraph keeps an edge whose endpoint was dropped")
        labels = {int(remap[k]): v for k, v in self._labels.items() if remap[k] >= 0}
        sub = Graph(
            len(keep),
            new_edges,
            rec.tolist(),
            names=[self._names[i] for i in keep],
            labels=labels,
        )
        return sub, keep

    def with_labels(self, labels: Mapping[int, str]) -> "Graph":
        return Graph(self._n, self._edges.tolist(), self._recurrence.tolist(), self._names, labels)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self._n == other._n
            and np.array_equal(self._edges, other._edges)
            and np.array_equal(self._recurrence, other._recurrence)
            and self._names == other._names
            and self._labels == other._labels
        )

    def __hash__(self):
        return hash((self._n, self._edges.tobytes(), self._recurrence.tobytes(), self._names))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


class Partition:
    """Assignment of every node to exactly one community.

    Community ids are canonicalised to ``0..k-1`` in order of first appearance
    along node ids, so two partitions that differ only by relabeling compare
    equal. ``names`` optionally carries one class label per community (ground
    truth partitions).
    """

    def __init__(self, assignment: Sequence, names: Sequence[str] | None = None):
        raw = list(assignment)
        first: dict = {}
        canon = np.empty(len(raw), dtype=np.int64)
        order = []
        for i, c in enumerate(raw):
            if c not in first:
                first[c] = len(first)
                order.append(c)
            canon[i] = first[c]
        canon.setflags(write=False)
        self._assignment = canon
        self._k = len(first)
        if names is not None:
            names = list(names)
            if len(names) != self._k:
                raise ValueError("names must have one entry per community")
        self._names = tuple(names) if names is not None else None

    @classmethod
    def from_labels(cls, labels: Sequence[str]) -> "Partition":
        """Build a named partition from one class string per node."""
        names: list[str] = []
        seen = set()
        for lab in labels:
            if lab not in seen:
                seen.add(lab)
                names.append(lab)
        return cls(labels, names=names)

    @classmethod
    def from_communities(cls, communities: Iterable[Iterable[int]], n: int) -> "Partition":
        assign = [-1] * n
        for c, members in enumerate(communities):
            for v in members:
                if assign[v] != -1:
                    raise ValueError(f"node {v} assigned to more than one community")
                assign[v] = c
        if any(a < 0 for a in assign):
            raise ValueError("communities do not cover every node")
        return cls(assign)

    @classmethod
    def singletons(cls, n: int) -> "Partition":
        return cls(range(n))

    @classmethod
    def whole(cls, n: int) -> "Partition":
        return cls([0] * n)

    @property
    def assignment(self) -> np.ndarray:
        return self._assignment

    @property
    def n(self) -> int:
        return len(self._assignment)

    @property
    def k(self) -> int:
        return self._k

    @property
    def names(self) -> tuple[str, ...] | None:
        return self._names

    @cached_property
    def sizes(self) -> np.ndarray:
        s = np.bincount(self._assignment, minlength=self._k)
        s.setflags(write=False)
        return s

    def communities(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self._k)]
        for v, c in enumerate(self._assignment.tolist()):
            out[c].append(v)
        return out

    def label_of(self, node: int) -> str | None:
        if self._names is None:
            return None
        return self._names[self._assignment[node]]

    def restrict(self, nodes: Sequence[int]) -> "Partition":
        """Partition induced on ``nodes`` (in the given order), names preserved."""
        sub = self._assignment[np.asarray(nodes, dtype=np.int64)] if len(nodes) else np.zeros(0, dtype=np.int64)
        if self._names is None:
            return Partition(sub.tolist())
        return Partition.from_labels([self._names[c] for c in sub.tolist()])

    def __eq__(self, other) -> bool:
        if not isinstance(other, Partition):
            return NotImplemented
        return np.array_equal(self._assignment, other._assignment)

    def __hash__(self):
        return hash(self._assignment.tobytes())

    def __len__(self) -> int:
        return len(self._assignment)

    def __repr__(self) -> str:
        return f"Partition(n={self.n}, k={self.k})"


@dataclass(frozen=True)
class GraphStats:
    n: int
    m: int
    max_degree: int
    min_degree: int
    density: float
    clustering_coeff: float
    n_components: int

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "max_degree": self.max_degree,
            "min_degree": self.min_degree,
            "density": self.density,
            "clustering_coeff": self.clustering_coeff,
            "n_components": self.n_components,
        }


def _data_lines(path):
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if line:
                yield lineno, line


def load_graph(path) -> Graph:
    """Read a whitespace-separated edge list ``src dst [recurrence]``.

    Node names map to dense ids in order of first appearance. Repeated pairs
    (in either direction) are merged by summing their recurrence.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(path)
    index: dict[str, int] = {}
    names: list[str] = []
    edges: list[tuple[int, int]] = []
    rec: list[int] = []
    collapsed = 0
    for lineno, line in _data_lines(path):
        tok = line.split()
        if len(tok) < 2 or len(tok) > 3:
            raise GraphFormatError(f"expected 'src dst [recurrence]', got {line!r}", path, lineno)
        r = 1
        if len(tok) == 3:
            try:
                r = int(tok[2])
            except ValueError:
                raise GraphFormatError(f"recurrence must be an integer, got {tok[2]!r}", path, lineno) from None
            if r < 1:
                raise GraphFormatError(f"recurrence must be >= 1, got {r}", path, lineno)
        if tok[0] == tok[1]:
            raise GraphFormatError(f"self-loop on node {tok[0]!r}", path, lineno)
        ids = []
        for name in tok[:2]:
            if name not in index:
                index[name] = len(names)
                names.append(name)
            ids.append(index[name])
        edges.append((ids[0], ids[1]))
        rec.append(r)
    g = Graph(len(names), edges, rec, names=names)
    collapsed = len(edges) - g.m
    if collapsed:
        log.info("%s: merged %d repeated edge lines", path, collapsed)
    return g


def write_graph(g: Graph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for (u, v), r in zip(g.edges.tolist(), g.recurrence.tolist()):
            fh.write(f"{g.names[u]} {g.names[v]} {r}\n")


def _read_node_table(path, g: Graph) -> dict[int, str]:
    table: dict[int, str] = {}
    for lineno, line in _data_lines(path):
        tok = line.split("\t") if "\t" in line else line.split()
        tok = [t.strip() for t in tok if t.strip()]
        if len(tok) != 2:
            raise GraphFormatError(f"expected 'node<TAB>value', got {line!r}", path, lineno)
        node, value = tok
        if node not in g.name_index:
            raise GraphFormatError(f"unknown node {node!r}", path, lineno)
        v = g.name_index[node]
        if v in table and table[v] != value:
            raise GraphFormatError(
                f"node {node!r} labelled both {table[v]!r} and {value!r}", path, lineno
            )
        table[v] = value
    return table


def load_ground_truth(path, g: Graph, strict: bool = True) -> Partition:
    """Read ``node<TAB>class`` lines into a named partition over ``g``.

    In lenient mode unlabeled nodes become singleton communities named
    ``"?<node>"`` and a warning is logged.
    """
    table = _read_node_table(path, g)
    missing = [v for v in range(g.n) if v not in table]
    if missing:
        if strict:
            shown = ", ".join(g.names[v] for v in missing[:5])
            raise GraphFormatError(f"{len(missing)} node(s) without a class label (e.g. {shown})", path)
        log.warning("%s: %d unlabeled node(s) placed in singleton communities", path, len(missing))
        for v in missing:
            table[v] = f"?{g.names[v]}"
    return Partition.from_labels([table[v] for v in range(g.n)])


def load_partition(path, g: Graph) -> Partition:
    """Read a ``node<TAB>community_id`` file that must cover every node once."""
    seen: dict[int, str] = {}
    for lineno, line in _data_lines(path):
        tok = line.split("\t") if "\t" in line else line.split()
        tok = [t.strip() for t in tok if t.strip()]
        if len(tok) != 2:
            raise GraphFormatError(f"expected 'node<TAB>community_id', got {line!r}", path, lineno)
        node, comm = tok
        if node not in g.name_index:
            raise GraphFormatError(f"unknown node {node!r}", path, lineno)
        v = g.name_index[node]
        if v in seen:
            raise GraphFormatError(f"node {node!r} listed more than once", path, lineno)
        seen[v] = comm
    missing = [g.names[v] for v in range(g.n) if v not in seen]
    if missing:
        raise GraphFormatError(f"partition misses {len(missing)} node(s), e.g. {missing[0]!r}", path)
    return Partition([seen[v] for v in range(g.n)])


def write_partition(g: Graph, p: Partition, path, use_names: bool = False) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for v in range(g.n):
            c = p.label_of(v) if use_names and p.names is not None else int(p.assignment[v])
            fh.write(f"{g.names[v]}\t{c}\n")


def components(g: Graph) -> list[list[int]]:
    """Connected components, each sorted, ordered by (size desc, min id asc)."""
    parent = list(range(g.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in g.edges.tolist():
        ru, rv = find(u), find(v)
        if ru != rv:
            if ru < rv:
                parent[rv] = ru
            else:
                parent[ru] = rv
    groups: dict[int, list[int]] = {}
    for v in range(g.n):
        groups.setdefault(find(v), []).append(v)
    return sorted(groups.values(), key=lambda c: (-len(c), c[0]))


def component_partition(g: Graph) -> Partition:
    assign = [0] * g.n
    for c, members in enumerate(components(g)):
        for v in members:
            assign[v] = c
    return Partition(assign)


def stats(g: Graph) -> GraphStats:
    n, m = g.n, g.m
    deg = g.degree
    density = 2.0 * m / (n * (n - 1)) if n >= 2 else 0.0
    triangles = 0
    adj = [set(x) for x in g.adjacency]
    for u, v in g.edges.tolist():
        small, big = (adj[u], adj[v]) if len(adj[u]) < len(adj[v]) else (adj[v], adj[u])
        triangles += sum(1 for w in small if w in big)
    triangles //= 3
    triples = int(sum(int(d) * (int(d) - 1) // 2 for d in deg.tolist()))
    cc = 3.0 * triangles / triples if triples else 0.0
    return GraphStats(
        n=n,
        m=m,
        max_degree=int(deg.max()) if n else 0,
        min_degree=int(deg.min()) if n else 0,
        density=density,
        clustering_coeff=cc,
        n_components=len(components(g)),
    )


def degree_histogram(g: Graph) -> Counter:
    return Counter(g.degree.tolist())


def bundled_path(name: str) -> Path:
    return Path(__file__).parent / "data" / name


def karate() -> tuple[Graph, Partition]:
    """Zachary's karate club and its two-faction ground truth (16 and 18 members)."""
    g = load_graph(bundled_path("karate.edges"))
    return g, load_ground_truth(bundled_path("karate_factions.tsv"), g)
