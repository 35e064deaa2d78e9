"""Command-line entry point: ``commeval eval|detect|metrics|compare|filter|gen``.

Exit codes: 0 consensus or success, 1 error, 2 unresolved decision.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

from . import benchgen
from . import detect as det
from .config import ConfigError, RunConfig, Thresholds, load_config
from .evidence import fmt, summarize, write_csv
from .filters import FilterError, FilterSpec, apply_filter, filter_nodes_by_class
from .graph import GraphFormatError, Partition, load_graph, load_ground_truth, load_partition, write_graph, write_partition
from .report import dumps, write_json
from .similarity import SIMILARITY_METRICS, similarity
from .structural import UndefinedMetricError, structural_scores
from .triangulate import run_pipeline

log = logging.getLogger("commeval")

EXIT_OK, EXIT_ERROR, EXIT_UNRESOLVED = 0, 1, 2

BOXPLOT_COLUMNS = ("network_id", "iteration", "strategy", "detector", "metric", "count", "min", "q1", "median", "q3", "max", "iqr", "mean", "std", "cv")


def _csv_list(text: str | None):
    if text is None:
        return None
    return [x.strip() for x in text.split(",") if x.strip()]


def _threshold_overrides(items) -> dict:
    out = {}
    for item in items or ():
        key, eq, value = item.partition("=")
        if not eq:
            raise ConfigError(f"--threshold expects name=value, got {item!r}")
        key = key.strip()
        if key == "band_edges":
            out[f"thresholds.{key}"] = [float(x) for x in value.split(",")]
        elif key in ("functional_metric", "partition_metric"):
            out[f"thresholds.{key}"] = value.strip()
        elif key in ("component_min_size", "edge_min_recurrence"):
            out[f"thresholds.{key}"] = int(value)
        else:
            out[f"thresholds.{key}"] = float(value)
    return out


def build_config(args) -> RunConfig:
    """Config file first, then flags (flags win)."""
    cfg = load_config(args.config) if args.config else RunConfig()
    overrides = {
        "network": args.network,
        "ground_truth": args.gt,
        "network_id": args.network_id,
        "algorithms": _csv_list(args.algorithms),
        "reps": args.reps,
        "base_seed": args.seed,
        "metrics": _csv_list(args.metrics),
        "max_iters": args.max_iters,
        "filters": args.filter or None,
        "cluster_method": args.cluster_method,
        "jobs": args.jobs,
        "out_dir": args.out,
        "formats": _csv_list(args.formats),
        "lenient_ground_truth": True if args.lenient_gt else None,
        "allow_few_reps": True if args.allow_few_reps else None,
        "allow_slow": True if args.allow_slow else None,
        "all_pairs": True if args.all_pairs else None,
    }
    overrides.update(_threshold_overrides(args.threshold))
    return cfg.merged(overrides)


def write_boxplot(records, path) -> None:
    """Quantile table per (network, iteration, strategy, detector, metric)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(BOXPLOT_COLUMNS)
        for key, s in summarize(records).items():
            d = s.to_dict()
            w.writerow([*key, *(fmt(d[c]) for c in BOXPLOT_COLUMNS[5:])])


def cmd_eval(args) -> int:
    cfg = build_config(args)
    if not cfg.network:
        raise ConfigError("no network given (positional argument or 'network' in the config)")
    detectors = [det.get_detector(a) for a in cfg.algorithms]
    g = load_graph(cfg.network)
    gt = load_ground_truth(cfg.ground_truth, g, strict=not cfg.lenient_ground_truth) if cfg.ground_truth else None
    network_id = cfg.network_id or Path(cfg.network).stem
    result = run_pipeline(g, gt, cfg, network_id, detectors)
    report = result.report
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if "json" in cfg.formats:
        data = report.to_dict()
        echo = {k: v for k, v in cfg.to_dict().items() if k not in ("out_dir", "jobs", "formats")}
        # file names only, so reports do not depend on where inputs live
        for key in ("network", "ground_truth"):
            if echo[key]:
                echo[key] = Path(echo[key]).name
        data["config"] = echo
        write_json(data, out / "report.json")
        layers = {"iterations": [{"iteration": i, **net.to_dict()} for i, net in result.multilayer]}
        write_json(layers, out / "multilayer.json")
    if "csv" in cfg.formats:
        write_csv(result.records, out / "evidence.csv")
        write_boxplot(result.records, out / "boxplot.csv")
    text = report.table()
    if report.warnings:
        text += "\nwarnings:\n" + "".join(f"  - {w}\n" for w in report.warnings)
    if "txt" in cfg.formats:
        (out / "report.txt").write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return EXIT_OK if report.status == "consensus" else EXIT_UNRESOLVED


def cmd_detect(args) -> int:
    g = load_graph(args.network)
    d = det.get_detector(args.algorithm)
    run = det.detect(g, d, det.mix_seed(args.seed, d.id, 0), allow_slow=args.allow_slow)
    if args.out:
        write_partition(g, run.partition, args.out)
        print(f"{d.id}: {run.partition.k} communities -> {args.out}")
    else:
        for v in range(g.n):
            sys.stdout.write(f"{g.names[v]}\t{run.partition.assignment[v]}\n")
    return EXIT_OK


def cmd_metrics(args) -> int:
    g = load_graph(args.network)
    p = load_partition(args.partition, g)
    data: dict = {"structural": structural_scores(g, p).to_dict()}
    if args.gt:
        gt = load_ground_truth(args.gt, g)
        data["functional"] = {
            m: {"value": s.value, "normalized": s.normalized_value, "flagged": s.flagged}
            for m in (_csv_list(args.metrics) or SIMILARITY_METRICS)
            for s in [similarity(gt, p, m)]
        }
    text = dumps(data)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return EXIT_OK


def _read_assignment(path) -> dict[str, str]:
    table: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tok = line.split()
            if len(tok) != 2:
                raise GraphFormatError(f"expected 'node<TAB>community_id', got {line!r}", path, lineno)
            if tok[0] in table:
                raise GraphFormatError(f"node {tok[0]!r} listed more than once", path, lineno)
            table[tok[0]] = tok[1]
    return table


def cmd_compare(args) -> int:
    a, b = _read_assignment(args.p1), _read_assignment(args.p2)
    if set(a) != set(b):
        raise GraphFormatError("the two partitions cover different node sets")
    nodes = list(a)
    p1 = Partition([a[v] for v in nodes])
    p2 = Partition([b[v] for v in nodes])
    for m in _csv_list(args.metrics) or SIMILARITY_METRICS:
        s = similarity(p1, p2, m)
        flag = "  (degenerate)" if s.flagged else ""
        print(f"{m}\t{fmt(s.value)}\t{fmt(s.normalized_value)}{flag}")
    return EXIT_OK


def cmd_filter(args) -> int:
    g = load_graph(args.network)
    gt = load_ground_truth(args.gt, g) if args.gt else None
    spec = FilterSpec.parse(args.filter)
    if spec.kind == "node":
        if gt is None:
            raise FilterError("node filter needs --gt")
        outcome = filter_nodes_by_class(g, gt, spec.classes)
    else:
        outcome = apply_filter(g, spec, gt)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = Path(args.network).stem
    write_graph(outcome.graph, out / f"{stem}.edges")
    if outcome.ground_truth is not None:
        write_partition(outcome.graph, outcome.ground_truth, out / f"{stem}.gt.tsv", use_names=True)
    print(f"{spec.label()}: removed {outcome.removed_nodes} node(s), {outcome.removed_edges} edge(s); "
          f"{outcome.graph.n} node(s), {outcome.graph.m} edge(s) remain")
    return EXIT_OK


def _parse_inject(items) -> dict:
    out = {}
    names = {"sporadic": ("sporadic_edges", float), "roamers": ("roamers", int), "micro": ("micro_components", int)}
    for item in items or ():
        for part in item.split(","):
            key, eq, value = part.partition("=")
            if not eq or key.strip() not in names:
                raise ConfigError(f"--inject expects sporadic=F, roamers=N or micro=N, got {part!r}")
            field, cast = names[key.strip()]
            out[field] = cast(value)
    return out


def cmd_gen(args) -> int:
    spec = benchgen.PlantedSpec(args.k, args.size, args.pin, args.pout, seed=args.seed, **_parse_inject(args.inject))
    g, gt = benchgen.generate(spec)
    gpath, tpath = benchgen.write_fixture(g, gt, args.out, args.stem)
    print(f"n={g.n} m={g.m} k={gt.k}: {gpath}, {tpath}")
    return EXIT_OK


def _add_eval_args(p) -> None:
    p.add_argument("network", nargs="?", help="edge list (src dst [recurrence])")
    p.add_argument("--gt", help="ground truth file (node<TAB>class)")
    p.add_argument("--config", help="JSON or key=value config file; flags override it")
    p.add_argument("--network-id")
    p.add_argument("--algorithms", help=f"comma-separated ids from {','.join(det.NATIVE_IDS)} or EXT:name=path")
    p.add_argument("--reps", type=int)
    p.add_argument("--seed", type=int, help="base seed")
    p.add_argument("--metrics", help=f"comma-separated subset of {','.join(SIMILARITY_METRICS)}")
    p.add_argument("--max-iters", type=int)
    p.add_argument("--filter", action="append", help="override a control filter, e.g. edge:r=2 or node:class=staff")
    p.add_argument("--threshold", action="append", metavar="NAME=VALUE", help=f"one of {', '.join(Thresholds().to_dict())}")
    p.add_argument("--cluster-method", choices=("threshold", "average"))
    p.add_argument("--jobs", type=int)
    p.add_argument("--out", help="output directory")
    p.add_argument("--formats", help="comma-separated subset of json,csv,txt")
    p.add_argument("--lenient-gt", action="store_true", help="put unlabeled nodes in singleton classes")
    p.add_argument("--allow-few-reps", action="store_true", help="permit fewer than 30 repetitions")
    p.add_argument("--allow-slow", action="store_true", help="run Girvan-Newman on large graphs")
    p.add_argument("--all-pairs", action="store_true", help="compare every repetition pair between detectors")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="commeval", description="Community quality evaluation by triangulation.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="run the full evaluation loop")
    _add_eval_args(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("detect", help="run one detector")
    p.add_argument("network")
    p.add_argument("--algorithm", "-a", default="LM")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.add_argument("--allow-slow", action="store_true")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("metrics", help="score a partition")
    p.add_argument("network")
    p.add_argument("partition")
    p.add_argument("--gt")
    p.add_argument("--metrics")
    p.add_argument("--out")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("compare", help="similarity between two partition files")
    p.add_argument("p1")
    p.add_argument("p2")
    p.add_argument("--metrics")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("filter", help="apply one control filter")
    p.add_argument("network")
    p.add_argument("--filter", required=True)
    p.add_argument("--gt")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("gen", help="generate a planted-partition fixture")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--pin", type=float, required=True)
    p.add_argument("--pout", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--inject", action="append", help="sporadic=F, roamers=N, micro=N")
    p.add_argument("--stem", default="network")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except det.UnknownDetectorError as exc:
        print(f"error: {exc}", file=sys.stderr)
    except (ConfigError, FilterError, GraphFormatError, det.ProtocolError, UndefinedMetricError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
