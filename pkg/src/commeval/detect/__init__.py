"""Community detection repertoire behind one detector interface."""

from __future__ import annotations

import hashlib
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Sequence

from ..graph import Graph, Partition, load_partition
from .eigenvector import leading_eigenvector
from .girvan_newman import GraphTooLargeError, girvan_newman
from .greedy import greedy_modularity
from .labelprop import label_propagation
from .louvain import louvain
from .walktrap import walktrap

log = logging.getLogger(__name__)

MIN_REPS = 30

DETERMINISTIC = "deterministic"
NON_DETERMINISTIC = "non-deterministic"


class UnknownDetectorError(ValueError):
    pass


class ProtocolError(ValueError):
    """A run violates the repetition protocol for non-deterministic detectors."""


@dataclass(frozen=True)
class DetectorDescriptor:
    id: str
    family: str
    state_model: str
    path: str | None = None

    @property
    def deterministic(self) -> bool:
        return self.state_model == DETERMINISTIC

    @property
    def is_external(self) -> bool:
        return self.id.startswith("EXT:")


REGISTRY: dict[str, DetectorDescriptor] = {
    "LM": DetectorDescriptor("LM", "modularity-maximization", DETERMINISTIC),
    "GM": DetectorDescriptor("GM", "modularity-maximization", DETERMINISTIC),
    "LE": DetectorDescriptor("LE", "modularity-maximization", DETERMINISTIC),
    "LP": DetectorDescriptor("LP", "dynamic-process", NON_DETERMINISTIC),
    "GN": DetectorDescriptor("GN", "edge-removal", DETERMINISTIC),
    "WT": DetectorDescriptor("WT", "random-walk", NON_DETERMINISTIC),
}

ALGORITHMS: dict[str, Callable[..., Partition]] = {
    "LM": louvain,
    "GM": greedy_modularity,
    "LE": leading_eigenvector,
    "LP": label_propagation,
    "GN": girvan_newman,
    "WT": walktrap,
}

NATIVE_IDS = tuple(REGISTRY)


def external(name: str, path: str | None = None) -> DetectorDescriptor:
    return DetectorDescriptor(f"EXT:{name}", "external", DETERMINISTIC, path)


def get_detector(spec: str) -> DetectorDescriptor:
    """Resolve ``LM`` or ``EXT:name=path`` to a descriptor."""
    spec = spec.strip()
    if spec in REGISTRY:
        return REGISTRY[spec]
    if spec.startswith("EXT:"):
        body = spec[4:]
        name, _, path = body.partition("=")
        if not name:
            raise UnknownDetectorError(f"external detector needs a name: {spec!r}")
        return external(name, path or None)
    raise UnknownDetectorError(
        f"unknown detector {spec!r}; registered ids: {', '.join(NATIVE_IDS)}, EXT:<name>=<partition file>"
    )


def parse_detectors(text: str) -> list[DetectorDescriptor]:
    out = [get_detector(tok) for tok in text.split(",") if tok.strip()]
    ids = [d.id for d in out]
    if len(set(ids)) != len(ids):
        raise UnknownDetectorError(f"duplicate detector ids in {text!r}")
    return out


@dataclass(frozen=True)
class DetectionRun:
    detector: DetectorDescriptor
    seed: int
    partition: Partition
    wall_time: float
    rep: int = 0
    # False for repetitions replicated from a single deterministic execution
    executed: bool = True


def detect(g: Graph, d: DetectorDescriptor, seed: int, allow_slow: bool = False) -> DetectionRun:
    if g.n < 1:
        raise ValueError("detection needs a graph with at least one node")
    if d.is_external:
        if not d.path:
            raise UnknownDetectorError(f"{d.id} has no partition file")
        return ingest_external(g, d.id[4:], d.path)
    if d.id not in ALGORITHMS:
        raise UnknownDetectorError(f"unregistered detector {d.id!r}")
    t0 = time.perf_counter()
    if d.id == "GN":
        part = girvan_newman(g, seed, allow_slow=allow_slow)
    else:
        part = ALGORITHMS[d.id](g, seed)
    return DetectionRun(d, seed, part, time.perf_counter() - t0)


def ingest_external(g: Graph, name: str, path) -> DetectionRun:
    part = load_partition(Path(path), g)
    return DetectionRun(external(name, str(path)), 0, part, 0.0)


def mix_seed(base_seed: int, detector_id: str, rep: int) -> int:
    """64-bit seed from BLAKE2b over ``"base_seed:detector_id:rep"``."""
    digest = hashlib.blake2b(f"{base_seed}:{detector_id}:{rep}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big")


def _execute(args):
    g, d, seed, allow_slow = args
    return detect(g, d, seed, allow_slow=allow_slow)


def run_batch(
    g: Graph,
    detectors: Sequence[DetectorDescriptor],
    reps: int,
    base_seed: int,
    allow_few_reps: bool = False,
    jobs: int = 1,
    allow_slow: bool = False,
) -> list[DetectionRun]:
    """Run every detector ``reps`` times, ordered by (detector, repetition).

    Deterministic detectors execute once; their result is replicated for the
    remaining repetitions with ``executed=False``.
    """
    if reps < 1:
        raise ValueError("reps must be >= 1")
    for d in detectors:
        if not d.deterministic and reps < MIN_REPS and not allow_few_reps:
            raise ProtocolError(
                f"{d.id} is non-deterministic and needs at least {MIN_REPS} repetitions "
                f"(got {reps}); pass the override flag to run fewer"
            )
    tasks = []
    layout = []
    for d in detectors:
        n_exec = 1 if d.deterministic else reps
        for rep in range(n_exec):
            tasks.append((g, d, mix_seed(base_seed, d.id, rep), allow_slow))
        layout.append((d, n_exec))
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_execute, tasks))
    else:
        results = [_execute(t) for t in tasks]

    runs: list[DetectionRun] = []
    pos = 0
    for d, n_exec in layout:
        done = results[pos : pos + n_exec]
        pos += n_exec
        for rep in range(reps):
            if rep < n_exec:
                runs.append(replace(done[rep], rep=rep))
            else:
                first = done[0]
                runs.append(replace(first, seed=mix_seed(base_seed, d.id, rep), rep=rep, wall_time=0.0, executed=False))
    return runs


__all__ = [
    "ALGORITHMS",
    "DetectionRun",
    "DetectorDescriptor",
    "GraphTooLargeError",
    "MIN_REPS",
    "ProtocolError",
    "REGISTRY",
    "UnknownDetectorError",
    "detect",
    "get_detector",
    "ingest_external",
    "mix_seed",
    "parse_detectors",
    "run_batch",
    "greedy_modularity",
    "girvan_newman",
    "label_propagation",
    "leading_eigenvector",
    "louvain",
    "walktrap",
]
