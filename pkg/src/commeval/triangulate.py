"""Decision by triangulation: premature decisions, consensus, bias hypotheses
and the filter-and-repeat loop."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import IntEnum
from itertools import combinations
from typing import Mapping, Sequence

import numpy as np

from . import detect as det
from .config import RunConfig, Thresholds
from .diversify import DEFAULT_STRUCTURAL_LAYERS, DiversificationReport, MultilayerSimilarityNetwork, build_multilayer, diversification_report
from .evidence import (
    COMBINED,
    FUNCTIONAL,
    GT_ID,
    STRUCTURAL,
    EvidenceRecord,
    EvidenceSummary,
    combined_evidence,
    score_distance,
    summarize,
    summary_of,
)
from .filters import COMPONENT, EDGE, NODE, FilterOutcome, FilterSpec, apply_filter, candidate_noisy_classes, would_change
from .graph import Graph, GraphStats, Partition, stats
from .report import render_table
from .similarity import DISTANCE_METRICS, SimilarityScore, pairwise_matrix, similarity
from .structural import HIGHER_IS_BETTER, STRUCTURAL_METRICS, StructuralScores, structural_scores

log = logging.getLogger(__name__)


class QualityLevel(IntEnum):
    VeryLow = 0
    Low = 1
    Medium = 2
    High = 3
    VeryHigh = 4


NET, GT, ALG, MET, NONE = "Net", "GT", "Alg", "Met", "None"
SOURCE_ORDER = (NET, GT, ALG, MET)


def band(score: float, edges: Sequence[float] = Thresholds().band_edges) -> QualityLevel:
    """Map a normalised score in [0, 1] onto the five quality levels."""
    if not 0.0 <= score <= 1.0:
        raise ValueError(f"score {score} outside [0, 1]")
    return QualityLevel(sum(1 for e in edges if score >= e))


def midpoint(level: QualityLevel, edges: Sequence[float] = Thresholds().band_edges) -> float:
    bounds = [0.0, *edges, 1.0]
    return (bounds[level] + bounds[level + 1]) / 2.0


def consensual_level(structural: QualityLevel, functional: QualityLevel | None, edges=Thresholds().band_edges) -> QualityLevel:
    """Band of the mean of the strategies' band midpoints."""
    mids = [midpoint(structural, edges)]
    if functional is not None:
        mids.append(midpoint(functional, edges))
    return band(float(np.mean(mids)), edges)


def sort_sources(sources) -> tuple[str, ...]:
    if NONE in sources:
        return (NONE,)
    return tuple(s for s in SOURCE_ORDER if s in sources)


# --------------------------------------------------------------------------
# evidence for one iteration


@dataclass
class IterationEvidence:
    network_id: str
    iteration: int
    graph: Graph
    ground_truth: Partition | None
    runs: list
    scores: list[StructuralScores]  # aligned with runs
    gt_scores: StructuralScores | None
    functional: list[dict[str, SimilarityScore]]  # aligned with runs; empty without GT
    records: list[EvidenceRecord]
    metrics: tuple[str, ...]

    @property
    def detectors(self) -> list[str]:
        out: list[str] = []
        for r in self.runs:
            if r.detector.id not in out:
                out.append(r.detector.id)
        return out

    @property
    def has_gt(self) -> bool:
        return self.ground_truth is not None

    def per_detector(self, strategy: str, metric: str) -> dict[str, list[float]]:
        out: dict[str, list[float]] = {d: [] for d in self.detectors}
        for r in self.records:
            if r.strategy == strategy and r.metric == metric and r.detector != GT_ID:
                out[r.detector].append(r.value)
        return out

    def medians(self, strategy: str, metric: str) -> dict[str, float]:
        return {d: float(np.median(v)) for d, v in self.per_detector(strategy, metric).items() if v}

    def oriented_functional(self, metric: str) -> dict[str, list[float]]:
        """Similarity to ground truth mapped to [0, 1], higher is better."""
        out: dict[str, list[float]] = {d: [] for d in self.detectors}
        for run, fs in zip(self.runs, self.functional):
            out[run.detector.id].append(fs[metric].similarity)
        return out

    def summaries(self) -> dict[tuple, EvidenceSummary]:
        return summarize(self.records)


def gather_evidence(
    g: Graph,
    gt: Partition | None,
    runs: Sequence,
    metrics: Sequence[str],
    network_id: str = "",
    iteration: int = 0,
) -> IterationEvidence:
    """Structural, functional and combined evidence records for a batch of runs."""
    cache: dict[Partition, StructuralScores] = {}
    fcache: dict[Partition, dict[str, SimilarityScore]] = {}
    scores, functional, records = [], [], []
    gt_scores = structural_scores(g, gt) if gt is not None else None
    if gt is not None:
        for metric in STRUCTURAL_METRICS:
            records.append(EvidenceRecord(network_id, iteration, STRUCTURAL, GT_ID, metric, 0, gt_scores.metric(metric)))
    for run in runs:
        p = run.partition
        if p not in cache:
            cache[p] = structural_scores(g, p)
        s = cache[p]
        scores.append(s)
        did = run.detector.id
        for metric in STRUCTURAL_METRICS:
            records.append(EvidenceRecord(network_id, iteration, STRUCTURAL, did, metric, run.seed, s.metric(metric)))
        if gt is not None:
            if p not in fcache:
                fcache[p] = {m: similarity(gt, p, m) for m in metrics}
            fs = fcache[p]
            functional.append(fs)
            for metric in metrics:
                records.append(EvidenceRecord(network_id, iteration, FUNCTIONAL, did, metric, run.seed, fs[metric].value))
            records.extend(combined_evidence(gt_scores, [(did, run.seed, s)], network_id, iteration))
    return IterationEvidence(network_id, iteration, g, gt, list(runs), scores, gt_scores, functional, records, tuple(metrics))


# --------------------------------------------------------------------------
# premature decisions


@dataclass(frozen=True)
class PrematureDecision:
    structural: QualityLevel
    structural_score: float
    functional: QualityLevel | None
    functional_score: float | None

    def to_dict(self) -> dict:
        return {
            "structural": self.structural.name,
            "structural_score": self.structural_score,
            "functional": self.functional.name if self.functional is not None else None,
            "functional_score": self.functional_score,
        }


def structural_score(modularity_medians: Mapping[str, float], cap: float) -> float:
    vals = [max(0.0, q) for q in modularity_medians.values()]
    return float(min(np.median(vals) / cap, 1.0))


def functional_score(similarity_medians: Mapping[str, float]) -> float:
    return float(np.median(list(similarity_medians.values())))


def premature_decisions(
    modularity_medians: Mapping[str, float],
    similarity_medians: Mapping[str, float] | None,
    thresholds: Thresholds = Thresholds(),
) -> PrematureDecision:
    """Banded single-strategy verdicts.

    ``modularity_medians`` maps detectors to their median modularity;
    ``similarity_medians`` maps detectors to their median orientation-corrected
    similarity to the ground truth (None when there is no ground truth).
    """
    if not modularity_medians:
        raise ValueError("premature decisions need structural evidence")
    s = structural_score(modularity_medians, thresholds.modularity_cap)
    if similarity_medians:
        f = functional_score(similarity_medians)
        return PrematureDecision(band(s, thresholds.band_edges), s, band(f, thresholds.band_edges), f)
    return PrematureDecision(band(s, thresholds.band_edges), s, None, None)


def premature_from_evidence(ev: IterationEvidence, thresholds: Thresholds) -> PrematureDecision:
    q = ev.medians(STRUCTURAL, "modularity")
    sims = None
    if ev.has_gt:
        sims = {d: float(np.median(v)) for d, v in ev.oriented_functional(thresholds.functional_metric).items()}
    return premature_decisions(q, sims, thresholds)


# --------------------------------------------------------------------------
# consensus


@dataclass(frozen=True)
class Consensus:
    intra_structural: bool
    intra_functional: bool | None
    cross: bool | None
    cross_distance: float | None
    unstable_detectors: tuple[str, ...]
    details: dict = field(default_factory=dict)

    @property
    def reached(self) -> bool:
        if self.intra_functional is None:
            return self.intra_structural
        return bool(self.intra_structural and self.intra_functional and self.cross)

    def to_dict(self) -> dict:
        return {
            "intra_structural": self.intra_structural,
            "intra_functional": self.intra_functional,
            "cross": self.cross,
            "cross_distance": self.cross_distance,
            "reached": self.reached,
            "unstable_detectors": list(self.unstable_detectors),
            "details": self.details,
        }


def _iqr(values) -> float:
    if len(values) == 0:
        return 0.0
    s = summary_of(values)
    return s.iqr


def consensus_check(ev: IterationEvidence, premature: PrematureDecision, thresholds: Thresholds = Thresholds()) -> Consensus:
    """Intra-strategy and cross-strategy agreement flags.

    Cross-strategy distance is the largest of: score distance between ground
    truth and detected medians of modularity and of community count, and
    score distance between the structural and functional premature scores.
    """
    q_reps = ev.per_detector(STRUCTURAL, "modularity")
    state = {r.detector.id: r.detector.deterministic for r in ev.runs}
    cvs: dict[str, float | None] = {}
    unstable = []
    for d, vals in q_reps.items():
        if state[d]:
            continue
        s = summary_of(vals)
        cvs[d] = s.cv
        stable = s.cv is not None and s.cv < thresholds.cv_max
        if s.cv is None and s.std == 0.0:
            stable = True
        if not stable:
            unstable.append(d)

    ids = ev.detectors
    off, off_stable = [], []
    if len(ids) >= 2:
        pm = pairwise_matrix(ev.runs, thresholds.partition_metric)
        sims = pm.similarities()
        for i, j in combinations(range(len(ids)), 2):
            off.append(float(sims[i, j]))
            if ids[i] not in unstable and ids[j] not in unstable:
                off_stable.append(float(sims[i, j]))
    inter_iqr = _iqr(off)
    intra_s = not unstable and inter_iqr <= thresholds.tau_iqr
    details: dict = {
        "modularity_cv": cvs,
        "inter_detector_similarity_iqr": inter_iqr,
        "stable_detector_similarity_iqr": _iqr(off_stable),
        "inter_detector_metric": thresholds.partition_metric,
    }
    if not ev.has_gt:
        details["functional"] = "absent"
        return Consensus(intra_s, None, None, None, tuple(unstable), details)

    sims_gt = {d: float(np.median(v)) for d, v in ev.oriented_functional(thresholds.functional_metric).items()}
    func_iqr = _iqr(list(sims_gt.values()))
    intra_f = func_iqr <= thresholds.tau_iqr
    d_q = float(np.median(list(ev.medians(COMBINED, "modularity").values())))
    d_k = float(np.median(list(ev.medians(COMBINED, "k").values())))
    d_strat = score_distance(premature.structural_score, premature.functional_score)
    cross_distance = max(d_q, d_k, d_strat)
    details.update(
        {
            "functional_similarity_iqr": func_iqr,
            "functional_metric": thresholds.functional_metric,
            "distance_modularity_to_gt": d_q,
            "distance_k_to_gt": d_k,
            "distance_structural_functional": d_strat,
        }
    )
    return Consensus(intra_s, intra_f, cross_distance <= thresholds.tau_d, cross_distance, tuple(unstable), details)


# --------------------------------------------------------------------------
# bias hypotheses


@dataclass(frozen=True)
class Proposal:
    rule: int
    filter: FilterSpec
    applicable: bool
    confirmed: bool = True

    def to_dict(self) -> dict:
        return {"rule": self.rule, "filter": self.filter.label(), "applicable": self.applicable, "confirmed": self.confirmed}


@dataclass(frozen=True)
class Hypothesis:
    sources: tuple[str, ...]
    control: FilterSpec | None
    proposals: tuple[Proposal, ...] = ()
    rules: tuple[int, ...] = ()
    candidate_classes: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "sources": list(self.sources),
            "control": self.control.label() if self.control else None,
            "proposals": [p.to_dict() for p in self.proposals],
            "rules_fired": list(self.rules),
            "candidate_noisy_classes": list(self.candidate_classes),
        }


def default_filters(thresholds: Thresholds, overrides: Sequence[FilterSpec] = ()) -> dict[str, FilterSpec]:
    out = {
        EDGE: FilterSpec(EDGE, min_recurrence=thresholds.edge_min_recurrence, min_overlap=thresholds.edge_min_overlap),
        COMPONENT: FilterSpec(COMPONENT, min_size=thresholds.component_min_size),
    }
    for spec in overrides:
        out[spec.kind] = spec
    return out


def hypothesize_bias(
    consensus: Consensus,
    premature: PrematureDecision,
    diversification: DiversificationReport | None,
    graph_stats: GraphStats,
    g: Graph | None = None,
    gt: Partition | None = None,
    thresholds: Thresholds = Thresholds(),
    filters: Sequence[FilterSpec] = (),
    n_detectors: int | None = None,
) -> Hypothesis:
    """Apply the ordered decision rules.

    1. intra-strategy agreement without cross-strategy agreement: network and
       ground-truth data are suspect, propose the edge filter. A minority of
       unstable detectors does not block this rule when the stable ones
       agree; the instability adds Alg.
    2. many components and a high structural verdict: metrics are inflated,
       propose the component filter.
    3. a ground-truth class that mostly links outside itself: propose the node
       filter (applied only for classes the operator confirmed).
    4. a divergent layer: add Met.
    5. one detector isolated in most layers while the rest agree, or unstable
       detectors: add Alg.
    6. full consensus: no bias, no control (overrides everything).

    The control applied is the first proposal that is confirmed and would
    actually remove something from the graph.
    """
    if consensus.reached:
        return Hypothesis((NONE,), None, (), (6,))
    specs = default_filters(thresholds, [f for f in filters if f.kind != NODE])
    confirmed_classes = {c for f in filters if f.kind == NODE for c in f.classes}
    sources: set[str] = set()
    rules: list[int] = []
    proposals: list[Proposal] = []

    def propose(rule, spec, confirmed=True):
        applicable = g is not None and confirmed and would_change(g, spec, gt)
        proposals.append(Proposal(rule, spec, applicable, confirmed))

    n_det = n_detectors or 1
    unstable = consensus.unstable_detectors
    inter_ok = consensus.details.get("stable_detector_similarity_iqr", 0.0) <= thresholds.tau_iqr
    structural_ok = consensus.intra_structural or (inter_ok and 0 < len(unstable) < n_det / 2)
    if consensus.cross is False and consensus.intra_functional and structural_ok:
        rules.append(1)
        sources |= {NET, GT}
        propose(1, specs[EDGE])

    n = graph_stats.n
    if graph_stats.n_components > max(2, thresholds.component_fraction * n) and premature.structural >= QualityLevel.High:
        rules.append(2)
        sources.add(MET)
        propose(2, specs[COMPONENT])

    candidates: tuple[str, ...] = ()
    if g is not None and gt is not None:
        candidates = tuple(candidate_noisy_classes(g, gt, thresholds.noisy_class_fraction))
        if candidates:
            rules.append(3)
            chosen = tuple(c for c in candidates if c in confirmed_classes)
            propose(3, FilterSpec(NODE, classes=chosen or candidates), confirmed=bool(chosen))

    if diversification is not None and diversification.divergent_layers:
        rules.append(4)
        sources.add(MET)

    isolated = []
    if diversification is not None:
        sf = diversification.singleton_fraction
        for d, v in sf.items():
            others = [x for e, x in sf.items() if e != d]
            if v > 0.5 and others and all(x <= 0.5 for x in others):
                isolated.append(d)
    if isolated or unstable:
        rules.append(5)
        sources.add(ALG)

    control = next((p.filter for p in proposals if p.applicable), None)
    return Hypothesis(sort_sources(sources), control, tuple(proposals), tuple(rules), candidates)


# --------------------------------------------------------------------------
# best algorithms


def _best(values: Mapping[str, float], higher: bool, order: Sequence[str]) -> tuple[list[str], float]:
    target = max(values.values()) if higher else min(values.values())
    best = [d for d in order if d in values and abs(values[d] - target) <= 1e-12]
    return best, target


def best_algorithms(ev: IterationEvidence) -> dict:
    """Per-metric winning detectors by median value (ties all listed)."""
    order = ev.detectors
    out: dict = {"structural": {}, "similarity": {}, "gt_agreement": None}
    for metric, higher in HIGHER_IS_BETTER.items():
        med = ev.medians(STRUCTURAL, metric)
        if med:
            ids, v = _best(med, higher, order)
            out["structural"][metric] = {"best": ids, "value": v, "tie": len(ids) > 1}
    if ev.has_gt and len(order) >= 2:
        for metric in ev.metrics:
            med = ev.medians(FUNCTIONAL, metric)
            ids, v = _best(med, metric not in DISTANCE_METRICS, order)
            out["similarity"][metric] = {"best": ids, "value": v, "tie": len(ids) > 1}
        med = ev.medians(COMBINED, "modularity")
        ids, v = _best(med, False, order)
        out["gt_agreement"] = {"metric": "modularity", "best": ids, "distance": v, "tie": len(ids) > 1}
    return out


# --------------------------------------------------------------------------
# the pipeline


@dataclass
class IterationReport:
    iteration: int
    graph_stats: GraphStats
    ground_truth_sizes: list[int] | None
    premature: PrematureDecision
    consensus: Consensus
    hypothesis: Hypothesis
    diversification: DiversificationReport | None
    best: dict
    detectors: dict
    applied_control: FilterSpec | None = None
    filter_outcome: dict | None = None

    def to_dict(self) -> dict:
        return {
            "iteration": self.iteration,
            "network": self.graph_stats.to_dict(),
            "ground_truth": None
            if self.ground_truth_sizes is None
            else {"k": len(self.ground_truth_sizes), "sizes": self.ground_truth_sizes},
            "premature": self.premature.to_dict(),
            "consensus": self.consensus.to_dict(),
            "bias_sources": list(self.hypothesis.sources),
            "hypothesis": self.hypothesis.to_dict(),
            "applied_control": self.applied_control.label() if self.applied_control else None,
            "filter_outcome": self.filter_outcome,
            "diversification": self.diversification.to_dict() if self.diversification else None,
            "best_algorithms": self.best,
            "detectors": self.detectors,
        }


@dataclass
class DecisionReport:
    network_id: str
    status: str  # "consensus" or "unresolved"
    consensual: QualityLevel | None
    iterations: list[IterationReport]
    thresholds: Thresholds
    protocol: dict
    warnings: list[str] = field(default_factory=list)

    @property
    def final_sources(self) -> tuple[str, ...]:
        return self.iterations[-1].hypothesis.sources if self.iterations else ()

    def to_dict(self) -> dict:
        return {
            "network_id": self.network_id,
            "status": self.status,
            "consensual_decision": self.consensual.name if self.consensual is not None else None,
            "bias_sources": list(self.final_sources),
            "best_algorithms": self.iterations[-1].best if self.iterations else None,
            "iterations": [it.to_dict() for it in self.iterations],
            "thresholds": self.thresholds.to_dict(),
            "protocol": self.protocol,
            "warnings": list(self.warnings),
        }

    def table(self) -> str:
        """Text rendering with one row per iteration."""
        headers = ["Iteration", "Premature Structural", "Premature Functional", "Control Method", "Bias Sources", "Consensual Decision"]
        rows = []
        for i, it in enumerate(self.iterations):
            last = i == len(self.iterations) - 1
            control = it.applied_control.label() if it.applied_control else "-"
            if last and self.status == "unresolved" and it.hypothesis.control is not None and it.applied_control is None:
                control = f"({it.hypothesis.control.label()} proposed)"
            decision = "-"
            if last:
                decision = self.consensual.name if self.consensual is not None else "unresolved"
            rows.append(
                [
                    str(it.iteration),
                    it.premature.structural.name,
                    it.premature.functional.name if it.premature.functional is not None else "absent",
                    control,
                    ", ".join(it.hypothesis.sources) or "unidentified",
                    decision,
                ]
            )
        return f"network: {self.network_id}\n" + render_table(headers, rows)


@dataclass
class PipelineResult:
    report: DecisionReport
    records: list[EvidenceRecord]
    multilayer: list[tuple[int, MultilayerSimilarityNetwork]]
    evidence: list[IterationEvidence]


def _detector_summary(ev: IterationEvidence) -> dict:
    out = {}
    q = ev.per_detector(STRUCTURAL, "modularity")
    k = ev.per_detector(STRUCTURAL, "k")
    for r in ev.runs:
        d = r.detector
        if d.id in out:
            out[d.id]["executions"] += int(r.executed)
            continue
        out[d.id] = {
            "family": d.family,
            "state_model": d.state_model,
            "executions": int(r.executed),
            "modularity": summary_of(q[d.id]).to_dict(),
            "k": summary_of(k[d.id]).to_dict(),
        }
    return out


def evaluate_iteration(
    g: Graph,
    gt: Partition | None,
    detectors: Sequence[det.DetectorDescriptor],
    config: RunConfig,
    network_id: str,
    iteration: int,
) -> tuple[IterationEvidence, IterationReport, MultilayerSimilarityNetwork | None]:
    th = config.thresholds
    runs = det.run_batch(
        g, detectors, config.reps, config.base_seed,
        allow_few_reps=config.allow_few_reps, jobs=config.jobs, allow_slow=config.allow_slow,
    )
    ev = gather_evidence(g, gt, runs, config.metrics, network_id, iteration)
    premature = premature_from_evidence(ev, th)
    consensus = consensus_check(ev, premature, th)
    net = div = None
    if len(ev.detectors) >= 2:
        structural = {m: ev.medians(STRUCTURAL, m) for m in DEFAULT_STRUCTURAL_LAYERS}
        net = build_multilayer(runs, config.metrics, structural, all_pairs=config.all_pairs)
        div = diversification_report(
            net, th.tau_div, th.tau_reinforce, floor=th.cluster_floor, method=config.cluster_method
        )
    gs = stats(g)
    filters = [FilterSpec.parse(f) for f in config.filters]
    hyp = hypothesize_bias(consensus, premature, div, gs, g, gt, th, filters, n_detectors=len(ev.detectors))
    report = IterationReport(
        iteration=iteration,
        graph_stats=gs,
        ground_truth_sizes=sorted(gt.sizes.tolist()) if gt is not None else None,
        premature=premature,
        consensus=consensus,
        hypothesis=hyp,
        diversification=div,
        best=best_algorithms(ev),
        detectors=_detector_summary(ev),
    )
    return ev, report, net


def run_pipeline(
    g: Graph,
    gt: Partition | None,
    config: RunConfig = RunConfig(),
    network_id: str | None = None,
    detectors: Sequence[det.DetectorDescriptor] | None = None,
) -> PipelineResult:
    """Evaluate, hypothesise, filter and repeat until consensus or ``max_iters``."""
    config.validate()
    th = config.thresholds
    network_id = network_id or config.network_id or "network"
    if detectors is None:
        detectors = [det.get_detector(a) for a in config.algorithms]
    if g.m == 0:
        raise ValueError("the network has no edges; structural metrics are undefined")
    warnings: list[str] = []
    if gt is None:
        warnings.append("no ground truth: functional strategy absent, triangulation uses structural evidence only")
    iterations: list[IterationReport] = []
    records: list[EvidenceRecord] = []
    layers: list[tuple[int, MultilayerSimilarityNetwork]] = []
    evidence: list[IterationEvidence] = []
    status = "unresolved"
    consensual = None
    for it in range(config.max_iters):
        ev, rep, net = evaluate_iteration(g, gt, detectors, config, network_id, it)
        iterations.append(rep)
        records.extend(ev.records)
        evidence.append(ev)
        if net is not None:
            layers.append((it, net))
        if rep.consensus.reached:
            status = "consensus"
            consensual = consensual_level(rep.premature.structural, rep.premature.functional, th.band_edges)
            break
        control = rep.hypothesis.control
        if control is None:
            warnings.append(f"iteration {it}: no applicable control method; decision unresolved")
            break
        if it == config.max_iters - 1:
            warnings.append(f"iteration {it}: max_iters reached with control {control.label()} proposed but not applied")
            break
        outcome: FilterOutcome = apply_filter(g, control, gt)
        if outcome.graph.m == 0:
            warnings.append(f"iteration {it}: {control.label()} would empty the network; loop stopped")
            break
        rep.applied_control = control
        rep.filter_outcome = outcome.summary()
        g, gt = outcome.graph, outcome.ground_truth
    report = DecisionReport(
        network_id=network_id,
        status=status,
        consensual=consensual,
        iterations=iterations,
        thresholds=th,
        protocol={
            "algorithms": [d.id for d in detectors],
            "reps": config.reps,
            "min_reps_non_deterministic": det.MIN_REPS,
            "base_seed": config.base_seed,
            "metrics": list(config.metrics),
            "max_iters": config.max_iters,
            "filters": list(config.filters),
            "cluster_method": config.cluster_method,
            "all_pairs": config.all_pairs,
        },
        warnings=warnings,
    )
    return PipelineResult(report, records, layers, evidence)
