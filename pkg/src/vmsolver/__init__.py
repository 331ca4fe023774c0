"""SLO-aware cloud GPU instance planning for LLM inference workloads."""

from .calibration import (
    AffineCorrection,
    CalibrationStore,
    CtcfParams,
    FitResult,
    ProfilingSample,
    apply_ctcf,
    fit_ctcf,
)
from .catalog import (
    Catalog,
    InstanceSpec,
    filter_by_price,
    load_catalog,
    save_catalog,
    serialize_catalog,
)
from .economics import CostReport, billed_cost, cost_efficiency, effective_tps
from .model_registry import (
    MemoryFootprint,
    ModelSpec,
    WorkloadSpec,
    lookup_model,
    memory_footprint,
    registered_models,
)
from .perf_model import (
    PerfPrediction,
    PhaseTiming,
    decode_layer_time,
    predict,
    prefill_layer_time,
)
from .planner import (
    PlannerOptions,
    Policy,
    RankedCandidate,
    Recommendation,
    explain,
    recommend,
    to_document,
)
from .suitability import Candidate, Verdict, build_candidates, evaluate_instance

__version__ = "0.1.0"

__all__ = [
    "AffineCorrection",
    "CalibrationStore",
    "Candidate",
    "Catalog",
    "CostReport",
    "CtcfParams",
    "FitResult",
    "InstanceSpec",
    "MemoryFootprint",
    "ModelSpec",
    "PerfPrediction",
    "PhaseTiming",
    "PlannerOptions",
    "Policy",
    "ProfilingSample",
    "RankedCandidate",
    "Recommendation",
    "Verdict",
    "WorkloadSpec",
    "apply_ctcf",
    "billed_cost",
    "build_candidates",
    "cost_efficiency",
    "decode_layer_time",
    "effective_tps",
    "evaluate_instance",
    "explain",
    "filter_by_price",
    "fit_ctcf",
    "load_catalog",
    "lookup_model",
    "memory_footprint",
    "predict",
    "prefill_layer_time",
    "recommend",
    "registered_models",
    "save_catalog",
    "serialize_catalog",
    "to_document",
]
