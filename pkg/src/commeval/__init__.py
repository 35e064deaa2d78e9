"""Community quality evaluation by triangulating structural, functional and
combined evidence over a repertoire of detectors."""

from .config import RunConfig, Thresholds, load_config
from .graph import Graph, Partition, karate, load_graph, load_ground_truth, load_partition
from .triangulate import DecisionReport, QualityLevel, band, run_pipeline

__version__ = "0.1.0"

__all__ = [
    "DecisionReport",
    "Graph",
    "Partition",
    "QualityLevel",
    "RunConfig",
    "Thresholds",
    "band",
    "karate",
    "load_config",
    "load_graph",
    "load_ground_truth",
    "load_partition",
    "run_pipeline",
]
