"""Classify instances as no-offload, partial-offload, or unsuitable.

The trichotomy, applied to every (instance, footprint) pair:

* Fits entirely: GPU memory covers model + activations + full KV cache.
  No offloading, coefficient zero.
* Cannot run at all: the weights alone exceed GPU memory, or a single
  layer's KV slice does not fit beside them. Attention runs on the GPU, so
  at least one layer of KV must be resident; below that bar there is no
  offloading ratio that avoids out-of-memory.
* Otherwise: partial offloading with coefficient
  1 - mem_avail / mem_kvcache, the fraction of KV bytes that must live in
  host memory.

All comparisons are on exact byte counts; the coefficient is formed as an
exact rational and only converted to float at the end, so exact-fit
boundaries never flap on floating-point noise.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .catalog import Catalog, InstanceSpec
from .model_registry import MemoryFootprint

REASON_MODEL_TOO_LARGE = "model exceeds GPU memory"
REASON_LAYER_TOO_LARGE = "per-layer KV cache exceeds available memory"
WARN_HOST_MEMORY = "offloaded KV cache exceeds host memory"


class Verdict(str, Enum):
    NO_OFFLOAD = "no-offload"
    PARTIAL_OFFLOAD = "partial-offload"
    UNSUITABLE = "unsuitable"


@dataclass(frozen=True)
class Candidate:
    """An instance paired with its offloading coefficient and memory view.

    mem_avail is GPU memory minus model and activation bytes; it may be
    negative only for unsuitable instances. For feasible candidates
    c_off is in [0, 1), zero exactly when the whole footprint fits.
    """

    instance: InstanceSpec
    c_off: float
    footprint: MemoryFootprint
    mem_avail: int
    verdict: Verdict
    reason: str | None = None
    warnings: tuple[str, ...] = ()

    @property
    def feasible(self) -> bool:
        return self.verdict is not Verdict.UNSUITABLE


def evaluate_instance(
    instance: InstanceSpec,
    footprint: MemoryFootprint,
    *,
    check_host_memory: bool = False,
) -> Candidate:
    """Apply the suitability trichotomy to one instance.

    Unsuitable is a verdict, not an error. Boundary semantics: an exact
    whole-footprint fit means no offloading; a layer slice exactly equal to
    available memory is feasible.

    Args:
        instance: Candidate hardware.
        footprint: Memory requirement of the (model, workload) pair.
        check_host_memory: When true and the instance declares host RAM,
            attach a warning if the offloaded bytes would not fit there.
            Off by default; host capacity is otherwise assumed sufficient.
    """
    mem_avail = instance.gpu_memory - footprint.mem_base

    if instance.gpu_memory >= footprint.mem_total:
        return Candidate(
            instance=instance,
            c_off=0.0,
            footprint=footprint,
            mem_avail=mem_avail,
            verdict=Verdict.NO_OFFLOAD,
        )

    if instance.gpu_memory < footprint.mem_model:
        return Candidate(
            instance=instance,
            c_off=0.0,
            footprint=footprint,
            mem_avail=mem_avail,
            verdict=Verdict.UNSUITABLE,
            reason=REASON_MODEL_TOO_LARGE,
        )
    if footprint.mem_kvcache_per_layer > mem_avail:
        return Candidate(
            instance=instance,
            c_off=0.0,
            footprint=footprint,
            mem_avail=mem_avail,
            verdict=Verdict.UNSUITABLE,
            reason=REASON_LAYER_TOO_LARGE,
        )

    c_off = float(1 - Fraction(mem_avail, footprint.mem_kvcache))
    warnings: tuple[str, ...] = ()
    if check_host_memory and instance.host_memory is not None:
        offloaded = footprint.mem_kvcache - mem_avail
        if offloaded > instance.host_memory:
            warnings = (WARN_HOST_MEMORY,)
    return Candidate(
        instance=instance,
        c_off=c_off,
        footprint=footprint,
        mem_avail=mem_avail,
        verdict=Verdict.PARTIAL_OFFLOAD,
        warnings=warnings,
    )


def build_candidates(
    catalog: Catalog,
    footprint: MemoryFootprint,
    p_max: float,
    *,
    check_host_memory: bool = False,
) -> list[Candidate]:
    """Price-filter, classify, and emit feasible candidates.

    Returns exactly the non-unsuitable candidates among instances priced at
    or under p_max, sorted by ascending hourly price with name as the
    deterministic tie-break. An empty list is a valid result.
    """
    candidates = [
        evaluate_instance(spec, footprint, check_host_memory=check_host_memory)
        for spec in catalog
        if spec.price_per_hour <= p_max
    ]
    feasible = [c for c in candidates if c.feasible]
    feasible.sort(key=lambda c: (c.instance.price_per_hour, c.instance.name))
    return feasible
