"""Four-stage recommendation pipeline.

1. Validate inputs and compute the memory footprint.
2. Classify every affordable instance (suitability trichotomy).
3. Predict per-instance throughput with each candidate's offload ratio and
   calibration, then derive billing and cost efficiency.
4. Drop candidates below the throughput target and rank the survivors.

Ranking under the default policy is by cost efficiency descending with a
fully deterministic tie-break chain: higher predicted TPS, then lower
price, then name. The max-performance policy ranks by predicted TPS alone
(same residual tie-breaks). Either way the result is a total order, so
permuting the catalog never changes the outcome.

Every catalog instance is evaluated and retained, including rejected ones,
so the explain view can show exactly which predicate failed (price cap,
memory condition, or SLO). A run with an empty ranking is a valid result
carrying its dominant rejection cause; it is not an error, because HTTP
clients need the structured answer.

Everything here is pure: evaluation of different instances could run
concurrently, and recommend() is reentrant and stateless.
"""

from __future__ import annotations

import dataclasses
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping

from .calibration import CalibrationStore
from .catalog import GB, Catalog, InstanceSpec
from .economics import CostReport, billed_cost
from .errors import DegenerateTask, InvalidCoefficient, UnknownInstance
from .model_registry import (
    MemoryFootprint,
    ModelSpec,
    WorkloadSpec,
    memory_footprint,
    model_to_entry,
)
from .perf_model import PerfPrediction, predict
from .suitability import Candidate, Verdict, evaluate_instance

STATUS_RANKED = "ranked"
REASON_OVER_PRICE = "over price cap"
REASON_OFFLOAD_DISABLED = "offloading disabled"
REASON_NO_CALIBRATION = "no calibration data"
REASON_BELOW_SLO = "below SLO"
REASON_DEGENERATE = "degenerate prediction"

#: Aggregate causes reported when the ranking comes out empty.
CAUSE_BUCKETS = {
    REASON_OVER_PRICE: "over budget",
    REASON_BELOW_SLO: "below SLO",
    REASON_NO_CALIBRATION: "uncalibrated",
}
_BUCKET_PRECEDENCE = ("below SLO", "over budget", "memory-unsuitable", "uncalibrated")


class Policy(str, Enum):
    """Selection policy; values double as CLI/API tokens."""

    INFERSAVE = "infersave"
    MAX_PERF = "max-perf"


@dataclass(frozen=True)
class PlannerOptions:
    """Knobs for recommend().

    disable_offloading reproduces the no-offload baseline: candidates that
    would need any offloading are dropped. only_calibrated restricts the
    ranking to instances with fitted calibration entries, for reproducing
    measured scenarios without identity-calibrated noise. c_off_overrides
    forces specific offload ratios per instance name (a what-if knob that
    mirrors pinning the offload percentage in the serving runtime); forced
    ratios must lie in [0, 1).
    """

    policy: Policy = Policy.INFERSAVE
    disable_offloading: bool = False
    only_calibrated: bool = False
    c_off_overrides: Mapping[str, float] = field(default_factory=dict)
    check_host_memory: bool = False


@dataclass(frozen=True)
class RankedCandidate:
    """A feasible, SLO-meeting instance with its full assessment."""

    candidate: Candidate
    prediction: PerfPrediction
    cost: CostReport
    uncalibrated: bool
    c_off_forced: bool = False

    @property
    def name(self) -> str:
        return self.candidate.instance.name


@dataclass(frozen=True)
class InstanceEvaluation:
    """Everything known about one catalog instance, ranked or rejected."""

    instance: InstanceSpec
    candidate: Candidate
    prediction: PerfPrediction | None
    cost: CostReport | None
    uncalibrated: bool
    status: str
    c_off_forced: bool = False

    @property
    def ranked(self) -> bool:
        return self.status == STATUS_RANKED


@dataclass(frozen=True)
class Recommendation:
    """Deterministic outcome of one planning run."""

    winner: RankedCandidate | None
    ranking: tuple[RankedCandidate, ...]
    rejected: tuple[tuple[str, str], ...]
    no_feasible_cause: str | None
    model: ModelSpec
    workload: WorkloadSpec
    catalog_source: str
    calibration_source: str
    options: PlannerOptions
    footprint: MemoryFootprint
    evaluations: Mapping[str, InstanceEvaluation]


def _forced(candidate: Candidate, c_off: float) -> Candidate:
    if not (0.0 <= c_off < 1.0):
        raise InvalidCoefficient(c_off)
    verdict = Verdict.NO_OFFLOAD if c_off == 0.0 else Verdict.PARTIAL_OFFLOAD
    return dataclasses.replace(candidate, c_off=c_off, verdict=verdict)


def _evaluate(
    spec: InstanceSpec,
    model: ModelSpec,
    workload: WorkloadSpec,
    footprint: MemoryFootprint,
    store: CalibrationStore,
    options: PlannerOptions,
) -> InstanceEvaluation:
    candidate = evaluate_instance(
        spec, footprint, check_host_memory=options.check_host_memory
    )
    forced = False
    if candidate.feasible and spec.name in options.c_off_overrides:
        candidate = _forced(candidate, float(options.c_off_overrides[spec.name]))
        forced = True

    params, uncalibrated = store.params_for(spec.name)
    prediction: PerfPrediction | None = None
    cost: CostReport | None = None
    degenerate = False
    if candidate.feasible:
        try:
            prediction = predict(model, workload, spec, candidate.c_off, params)
            cost = billed_cost(prediction.tps, workload, spec.price_per_hour)
        except DegenerateTask:
            degenerate = True

    if spec.price_per_hour > workload.p_max:
        status = REASON_OVER_PRICE
    elif not candidate.feasible:
        status = candidate.reason or "unsuitable"
    elif degenerate:
        status = REASON_DEGENERATE
    elif options.disable_offloading and candidate.c_off > 0.0:
        status = REASON_OFFLOAD_DISABLED
    elif options.only_calibrated and uncalibrated:
        status = REASON_NO_CALIBRATION
    elif prediction is not None and prediction.tps < workload.slo_tps:
        status = REASON_BELOW_SLO
    else:
        status = STATUS_RANKED

    return InstanceEvaluation(
        instance=spec,
        candidate=candidate,
        prediction=prediction,
        cost=cost,
        uncalibrated=uncalibrated,
        status=status,
        c_off_forced=forced,
    )


def _rank_key(policy: Policy):
    if policy is Policy.MAX_PERF:
        return lambda rc: (
            -rc.prediction.tps,
            rc.candidate.instance.price_per_hour,
            rc.name,
        )
    return lambda rc: (
        -rc.cost.cost_efficiency,
        -rc.prediction.tps,
        rc.candidate.instance.price_per_hour,
        rc.name,
    )


def _dominant_cause(rejected: tuple[tuple[str, str], ...]) -> str:
    buckets = Counter(
        CAUSE_BUCKETS.get(reason, "memory-unsuitable") for _, reason in rejected
    )
    # Majority vote; precedence order settles ties deterministically.
    top = max(buckets.items(), key=lambda kv: (kv[1], -_BUCKET_PRECEDENCE.index(kv[0])))
    qualifier = "all" if top[1] == len(rejected) else "mostly"
    return f"{qualifier} {top[0]}"


def recommend(
    model: ModelSpec,
    workload: WorkloadSpec,
    catalog: Catalog,
    calibration_store: CalibrationStore | None = None,
    options: PlannerOptions | None = None,
) -> Recommendation:
    """Run the full pipeline and return the ranked recommendation.

    Deterministic for fixed inputs; the catalog's iteration order does not
    influence the result.
    """
    store = calibration_store if calibration_store is not None else CalibrationStore("identity")
    opts = options if options is not None else PlannerOptions()
    footprint = memory_footprint(model, workload)

    evaluations = {
        spec.name: _evaluate(spec, model, workload, footprint, store, opts)
        for spec in catalog
    }

    ranked = [
        RankedCandidate(
            candidate=ev.candidate,
            prediction=ev.prediction,
            cost=ev.cost,
            uncalibrated=ev.uncalibrated,
            c_off_forced=ev.c_off_forced,
        )
        for ev in evaluations.values()
        if ev.ranked
    ]
    ranked.sort(key=_rank_key(opts.policy))
    rejected = tuple(
        sorted((name, ev.status) for name, ev in evaluations.items() if not ev.ranked)
    )

    return Recommendation(
        winner=ranked[0] if ranked else None,
        ranking=tuple(ranked),
        rejected=rejected,
        no_feasible_cause=None if ranked else _dominant_cause(rejected),
        model=model,
        workload=workload,
        catalog_source=catalog.source,
        calibration_source=store.source,
        options=opts,
        footprint=footprint,
        evaluations=evaluations,
    )


def _memory_doc(candidate: Candidate) -> dict:
    fp = candidate.footprint
    return {
        "model_bytes": fp.mem_model,
        "activation_bytes": fp.mem_activation,
        "kv_cache_bytes": fp.mem_kvcache,
        "kv_cache_per_layer_bytes": fp.mem_kvcache_per_layer,
        "total_bytes": fp.mem_total,
        "base_bytes": fp.mem_base,
        "available_bytes": candidate.mem_avail,
        "gpu_memory_bytes": candidate.instance.gpu_memory,
    }


def _timing_doc(prediction: PerfPrediction) -> dict:
    def phase(t):
        return {
            "compute_s": t.compute_s,
            "compute_calibrated_s": t.compute_calibrated_s,
            "transfer_s": t.transfer_s,
            "layer_time_s": t.layer_time_s,
        }

    return {
        "prefill": phase(prediction.prefill),
        "decode": phase(prediction.decode),
        "t_task_s": prediction.t_task_s,
    }


def _cost_doc(cost: CostReport) -> dict:
    return {
        "tps_effective": cost.tps_effective,
        "job_tokens": cost.job_tokens,
        "job_duration_s": cost.job_duration_s,
        "billed_hours": cost.billed_hours,
        "billed_cost_usd": cost.billed_cost,
        "ce_hours": cost.ce_hours,
        "cost_efficiency_tokens_per_usd": cost.cost_efficiency,
    }


def _evaluation_doc(ev: InstanceEvaluation) -> dict:
    doc = {
        "instance": ev.instance.name,
        "gpu_type": ev.instance.gpu_type,
        "price_per_hour_usd": ev.instance.price_per_hour,
        "status": ev.status,
        "verdict": ev.candidate.verdict.value,
        "reason": ev.candidate.reason,
        "c_off": ev.candidate.c_off,
        "c_off_forced": ev.c_off_forced,
        "uncalibrated": ev.uncalibrated,
        "memory": _memory_doc(ev.candidate),
        "timing": _timing_doc(ev.prediction) if ev.prediction else None,
        "tps": ev.prediction.tps if ev.prediction else None,
        "cost": _cost_doc(ev.cost) if ev.cost else None,
        "warnings": list(ev.candidate.warnings),
    }
    return doc


def to_document(rec: Recommendation) -> dict:
    """Render a recommendation as a schema-stable, JSON-ready document.

    Identical logical inputs produce an identical document regardless of
    the interface (CLI or HTTP) that asked; all floats keep full precision.
    """
    wl = rec.workload
    return {
        "schema_version": 1,
        "inputs": {
            "model": model_to_entry(rec.model),
            "workload": {
                "batch_size": wl.batch_size,
                "input_tokens": wl.l_in,
                "output_tokens": wl.l_out,
                "total_requests": wl.total_requests,
                "slo_tps": wl.slo_tps,
                "max_price_per_hour": wl.p_max,
            },
            "catalog": rec.catalog_source,
            "calibration": rec.calibration_source,
            "policy": rec.options.policy.value,
            "disable_offloading": rec.options.disable_offloading,
            "only_calibrated": rec.options.only_calibrated,
            "c_off_overrides": dict(sorted(rec.options.c_off_overrides.items())),
        },
        "winner": rec.winner.name if rec.winner else None,
        "no_feasible_cause": rec.no_feasible_cause,
        "ranking": [
            _evaluation_doc(rec.evaluations[rc.name]) for rc in rec.ranking
        ],
        "rejected": [
            {"instance": name, "reason": reason} for name, reason in rec.rejected
        ],
    }


def prediction_to_document(
    model: ModelSpec,
    instance: InstanceSpec,
    workload: WorkloadSpec,
    c_off: float,
    prediction: PerfPrediction,
    uncalibrated: bool,
    calibration_source: str,
) -> dict:
    """Standalone prediction document, shared by the CLI and the HTTP API."""
    timing = _timing_doc(prediction)
    return {
        "model": model.name,
        "instance": instance.name,
        "batch_size": workload.batch_size,
        "input_tokens": workload.l_in,
        "output_tokens": workload.l_out,
        "c_off": c_off,
        "uncalibrated": uncalibrated,
        "calibration": calibration_source,
        "prefill": timing["prefill"],
        "decode": timing["decode"],
        "t_task_s": prediction.t_task_s,
        "tps": prediction.tps,
    }


def explain(rec: Recommendation, instance_name: str) -> dict:
    """Full assessment of one evaluated instance.

    Includes the verdict, offload ratio, memory breakdown, phase timings,
    predicted TPS, cost efficiency, and, for rejected instances, the exact
    failed predicate.

    Raises:
        UnknownInstance: The name was not in the evaluated catalog.
    """
    ev = rec.evaluations.get(instance_name)
    if ev is None:
        raise UnknownInstance(instance_name)
    doc = _evaluation_doc(ev)
    doc["failed_predicate"] = None if ev.ranked else ev.status
    doc["gpu_memory_gb"] = ev.instance.gpu_memory / GB
    return doc
