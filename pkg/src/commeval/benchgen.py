"""Planted-partition graphs with optional bias injectors.

Planted edges get recurrence 3; injected sporadic edges get recurrence 1 and
always join two distinct blocks, so a recurrence filter with ``r = 2``
removes exactly the injected set.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .graph import Graph, Partition, write_graph, write_partition

log = logging.getLogger(__name__)

PLANTED_RECURRENCE = 3
SPORADIC_RECURRENCE = 1
ROAMER_CLASS = "roamer"
MICRO_CLASS = "micro"


@dataclass(frozen=True)
class PlantedSpec:
    k: int
    block_size: int
    p_in: float
    p_out: float
    seed: int = 0
    sporadic_edges: float = 0.0
    roamers: int = 0
    micro_components: int = 0
    roamer_p: float | None = None

    def validate(self) -> None:
        if self.k < 1 or self.block_size < 1:
            raise ValueError("k and block_size must be positive")
        for name in ("p_in", "p_out"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {p}")
        if not 0.0 <= self.sporadic_edges <= 1.0:
            raise ValueError("sporadic_edges fraction must lie in [0, 1]")
        if self.roamer_p is not None and not 0.0 <= self.roamer_p <= 1.0:
            raise ValueError("roamer_p must lie in [0, 1]")
        if self.roamers < 0 or self.micro_components < 0:
            raise ValueError("injector counts must be non-negative")
        if self.k > 1 and self.p_in <= self.p_out:
            log.warning("p_in <= p_out: no plantable community structure")

    def to_dict(self) -> dict:
        return asdict(self)


def block_name(b: int) -> str:
    return f"b{b}"


def generate(spec: PlantedSpec) -> tuple[Graph, Partition]:
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    nb = spec.k * spec.block_size
    block = np.repeat(np.arange(spec.k), spec.block_size)

    iu, ju = np.triu_indices(nb, k=1)
    same = block[iu] == block[ju]
    prob = np.where(same, spec.p_in, spec.p_out)
    hit = rng.random(len(iu)) < prob
    edges = list(zip(iu[hit].tolist(), ju[hit].tolist()))
    rec = [PLANTED_RECURRENCE] * len(edges)
    m_planted = len(edges)

    if spec.sporadic_edges > 0:
        count = int(round(spec.sporadic_edges * m_planted))
        cands = np.flatnonzero(~same & ~hit)
        if count > len(cands):
            raise ValueError(f"cannot inject {count} sporadic edges; only {len(cands)} inter-block pairs free")
        pick = np.sort(rng.choice(cands, size=count, replace=False))
        edges += list(zip(iu[pick].tolist(), ju[pick].tolist()))
        rec += [SPORADIC_RECURRENCE] * count

    labels = [block_name(b) for b in block.tolist()]
    n = nb
    if spec.roamers:
        p_roam = spec.p_in if spec.roamer_p is None else spec.roamer_p
        for _ in range(spec.roamers):
            links = np.flatnonzero(rng.random(nb) < p_roam)
            edges += [(int(x), n) for x in links]
            rec += [PLANTED_RECURRENCE] * len(links)
            labels.append(ROAMER_CLASS)
            n += 1
    for _ in range(spec.micro_components):
        a, b, c = n, n + 1, n + 2
        edges += [(a, b), (a, c), (b, c)]
        rec += [PLANTED_RECURRENCE] * 3
        labels += [MICRO_CLASS] * 3
        n += 3

    g = Graph(n, edges, rec, labels=dict(enumerate(labels)))
    return g, Partition.from_labels(labels)


def sporadic_edge_set(g: Graph) -> set[tuple[int, int]]:
    return {(u, v) for (u, v), r in zip(g.edges.tolist(), g.recurrence.tolist()) if r == SPORADIC_RECURRENCE}


def write_fixture(g: Graph, gt: Partition, out_dir, stem: str = "network") -> tuple[Path, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    gpath, tpath = out / f"{stem}.edges", out / f"{stem}.gt.tsv"
    write_graph(g, gpath)
    write_partition(g, gt, tpath, use_names=True)
    return gpath, tpath
