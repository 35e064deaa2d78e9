"""Run configuration and decision thresholds.

A config file is either JSON or ``key=value`` lines; nested threshold keys use
dotted names (``thresholds.tau_d=0.25``). Values on the right of ``=`` are read
as JSON when they parse, otherwise as plain strings.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

from .similarity import SIMILARITY_METRICS


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Thresholds:
    band_edges: tuple[float, float, float, float] = (0.2, 0.4, 0.6, 0.8)
    modularity_cap: float = 0.8
    tau_d: float = 0.2
    tau_iqr: float = 0.15
    cv_max: float = 0.1
    tau_div: float = 0.5
    tau_reinforce: float = 0.8
    cluster_floor: float = 0.9
    noisy_class_fraction: float = 0.5
    component_fraction: float = 0.01
    component_min_size: int = 5
    edge_min_recurrence: int = 2
    edge_min_overlap: float | None = None
    functional_metric: str = "NMI"
    partition_metric: str = "NMI"

    def validate(self) -> None:
        e = self.band_edges
        if len(e) != 4 or not all(0.0 < a < b < 1.0 for a, b in zip(e, e[1:])) or not 0.0 < e[0]:
            raise ConfigError(f"band_edges must be four increasing values in (0, 1), got {e}")
        unit = ("tau_d", "tau_iqr", "tau_div", "tau_reinforce", "cluster_floor", "noisy_class_fraction", "component_fraction")
        for name in unit:
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1], got {v}")
        if not 0.0 < self.modularity_cap <= 1.0:
            raise ConfigError("modularity_cap must lie in (0, 1]")
        if not self.cv_max > 0:
            raise ConfigError("cv_max must be positive")
        if self.component_min_size < 2:
            raise ConfigError("component_min_size must be >= 2")
        if self.edge_min_recurrence < 1:
            raise ConfigError("edge_min_recurrence must be >= 1")
        if self.edge_min_overlap is not None and not 0.0 <= self.edge_min_overlap <= 1.0:
            raise ConfigError("edge_min_overlap must lie in [0, 1]")
        for name in ("functional_metric", "partition_metric"):
            if getattr(self, name) not in SIMILARITY_METRICS:
                raise ConfigError(f"{name} must be one of {SIMILARITY_METRICS}")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["band_edges"] = list(self.band_edges)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "Thresholds":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown threshold(s): {', '.join(sorted(unknown))}")
        data = dict(data)
        if "band_edges" in data:
            data["band_edges"] = tuple(float(x) for x in data["band_edges"])
        t = cls(**data)
        t.validate()
        return t


DEFAULT_ALGORITHMS = ("LM", "GM", "LE", "LP", "GN", "WT")


@dataclass(frozen=True)
class RunConfig:
    network: str | None = None
    ground_truth: str | None = None
    network_id: str | None = None
    algorithms: tuple[str, ...] = DEFAULT_ALGORITHMS
    reps: int = 30
    base_seed: int = 0
    metrics: tuple[str, ...] = SIMILARITY_METRICS
    thresholds: Thresholds = field(default_factory=Thresholds)
    max_iters: int = 3
    filters: tuple[str, ...] = ()
    lenient_ground_truth: bool = False
    allow_few_reps: bool = False
    allow_slow: bool = False
    all_pairs: bool = False
    cluster_method: str = "threshold"
    jobs: int = 1
    out_dir: str = "out"
    formats: tuple[str, ...] = ("json", "csv", "txt")

    def validate(self) -> None:
        self.thresholds.validate()
        if self.reps < 1:
            raise ConfigError("reps must be >= 1")
        if self.max_iters < 1:
            raise ConfigError("max_iters must be >= 1")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")
        bad = [m for m in self.metrics if m not in SIMILARITY_METRICS]
        if bad or not self.metrics:
            raise ConfigError(f"metrics must be a non-empty subset of {SIMILARITY_METRICS}, got {list(self.metrics)}")
        if self.cluster_method not in ("threshold", "average"):
            raise ConfigError("cluster_method must be 'threshold' or 'average'")
        bad = [f for f in self.formats if f not in ("json", "csv", "txt")]
        if bad:
            raise ConfigError(f"unknown output format(s): {bad}")
        if not self.algorithms:
            raise ConfigError("at least one algorithm is required")

    def to_dict(self) -> dict:
        d = {}
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, Thresholds):
                v = v.to_dict()
            elif isinstance(v, tuple):
                v = list(v)
            d[f.name] = v
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config key(s): {', '.join(sorted(unknown))}")
        data = dict(data)
        if "thresholds" in data:
            th = data["thresholds"]
            data["thresholds"] = th if isinstance(th, Thresholds) else Thresholds.from_dict(th)
        for key in ("algorithms", "metrics", "filters", "formats"):
            if key in data:
                v = data[key]
                data[key] = tuple(x.strip() for x in v.split(",") if x.strip()) if isinstance(v, str) else tuple(v)
        cfg = cls(**data)
        cfg.validate()
        return cfg

    def merged(self, overrides: dict) -> "RunConfig":
        """Apply flag-style overrides (``None`` values are ignored)."""
        base = self.to_dict()
        th = dict(base["thresholds"])
        for key, value in overrides.items():
            if value is None:
                continue
            if key.startswith("thresholds."):
                th[key.split(".", 1)[1]] = value
            else:
                base[key] = value
        base["thresholds"] = th
        return RunConfig.from_dict(base)


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def parse_config_text(text: str) -> RunConfig:
    stripped = text.strip()
    if stripped.startswith("{"):
        return RunConfig.from_dict(json.loads(stripped))
    flat: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, eq, value = line.partition("=")
        if not eq:
            raise ConfigError(f"line {lineno}: expected key=value, got {line!r}")
        flat[key.strip()] = _parse_value(value.strip())
    return RunConfig().merged(flat)


def load_config(path) -> RunConfig:
    return parse_config_text(Path(path).read_text(encoding="utf-8"))


def dump_config(cfg: RunConfig, style: str = "json") -> str:
    d = cfg.to_dict()
    if style == "json":
        return json.dumps(d, indent=2, sort_keys=True) + "\n"
    lines = []
    for key, value in d.items():
        if key == "thresholds":
            for tk, tv in value.items():
                lines.append(f"thresholds.{tk}={json.dumps(tv)}")
        else:
            lines.append(f"{key}={json.dumps(value)}")
    return "\n".join(lines) + "\n"


def with_thresholds(cfg: RunConfig, **changes) -> RunConfig:
    return replace(cfg, thresholds=replace(cfg.thresholds, **changes))
