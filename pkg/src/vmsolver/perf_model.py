"""Analytic per-layer latency and throughput prediction.

Every formula here is per transformer layer; the end-to-end composition
multiplies by the layer count. For a batch of BS requests with l_in prompt
tokens and l_out generated tokens each:

Prompt phase, per layer:
    compute   = [BS * (8 * l_in * h1^2 + 4 * l_in * h1 * h2)
                 + 4 * BS * l_in^2 * h1] / flops
    transfer  = c_off * 2 * (l_in + 1) * h1 * precision * BS / bw_gpu_to_cpu
    layer time = max(calibrated compute, transfer)

Compute and KV offload overlap during prompt processing, hence the max.

Generation phase, per layer, per generated token:
    compute   = [BS * (8 * h1^2 + 4 * h1 * h2)
                 + 4 * BS * (l_in + l_out / 2) * h1] / flops
    transfer  = c_off * (2 * (l_in + 1) + l_out) * h1 * precision * BS
                / bw_cpu_to_gpu
    layer time = calibrated compute + transfer

Generation cannot start a step before its KV arrives, so the two costs
add. The attention term uses the mean sequence position l_in + l_out / 2
(real division). The transfer volume is the offloaded share of the K and V
vectors for the prompt plus, on average, the tokens generated so far; with
nothing offloaded there is no transfer. The calibration wrapper applies to
compute time only, before the max/sum composition.

End to end for one batch:
    t_task = prefill_layer_time * L + decode_layer_time * L * (l_out - 1)
    tps    = BS * (l_in + l_out) / t_task

The first output token falls out of the prompt phase, hence l_out - 1
generation steps.
"""

from __future__ import annotations

from dataclasses import dataclass

from .calibration import CtcfParams, apply_ctcf
from .catalog import InstanceSpec
from .errors import DegenerateTask, InvalidCoefficient
from .model_registry import ModelSpec, WorkloadSpec


@dataclass(frozen=True)
class PhaseTiming:
    """Per-layer timing for one phase, in seconds.

    compute_s is the raw theoretical time, compute_calibrated_s the same
    after the affine correction, layer_time_s the phase-combined per-layer
    time (max for the prompt phase, sum for generation).
    """

    compute_s: float
    compute_calibrated_s: float
    transfer_s: float
    layer_time_s: float


@dataclass(frozen=True)
class PerfPrediction:
    """One batch end to end: per-phase layer timings, task time, throughput."""

    prefill: PhaseTiming
    decode: PhaseTiming
    t_task_s: float
    tps: float


def _check_c_off(c_off: float) -> None:
    if not (0.0 <= c_off < 1.0):
        raise InvalidCoefficient(c_off)


def prefill_layer_time(
    model: ModelSpec,
    workload: WorkloadSpec,
    instance: InstanceSpec,
    c_off: float,
    ctcf: CtcfParams,
) -> PhaseTiming:
    """Per-layer prompt-phase time: overlapped compute and KV offload."""
    _check_c_off(c_off)
    bs = workload.batch_size
    l_in = workload.l_in
    h1, h2 = model.h1, model.h2

    linear_flops = bs * (8 * l_in * h1 * h1 + 4 * l_in * h1 * h2)
    attention_flops = 4 * bs * l_in * l_in * h1
    compute_s = (linear_flops + attention_flops) / instance.flops

    transfer_bytes = c_off * 2 * (l_in + 1) * h1 * model.precision_bytes * bs
    transfer_s = transfer_bytes / instance.bw_gpu_to_cpu

    calibrated = apply_ctcf(ctcf.prefill, compute_s)
    return PhaseTiming(
        compute_s=compute_s,
        compute_calibrated_s=calibrated,
        transfer_s=transfer_s,
        layer_time_s=max(calibrated, transfer_s),
    )


def decode_layer_time(
    model: ModelSpec,
    workload: WorkloadSpec,
    instance: InstanceSpec,
    c_off: float,
    ctcf: CtcfParams,
) -> PhaseTiming:
    """Per-layer, per-token generation time: compute plus KV retrieval."""
    _check_c_off(c_off)
    bs = workload.batch_size
    h1, h2 = model.h1, model.h2

    linear_flops = bs * (8 * h1 * h1 + 4 * h1 * h2)
    attention_flops = 4 * bs * (workload.l_in + workload.l_out / 2) * h1
    compute_s = (linear_flops + attention_flops) / instance.flops

    transfer_tokens = c_off * (2 * (workload.l_in + 1) + workload.l_out)
    transfer_s = (
        transfer_tokens * h1 * model.precision_bytes * bs / instance.bw_cpu_to_gpu
    )

    calibrated = apply_ctcf(ctcf.decode, compute_s)
    return PhaseTiming(
        compute_s=compute_s,
        compute_calibrated_s=calibrated,
        transfer_s=transfer_s,
        layer_time_s=calibrated + transfer_s,
    )


def predict(
    model: ModelSpec,
    workload: WorkloadSpec,
    instance: InstanceSpec,
    c_off: float,
    ctcf: CtcfParams,
) -> PerfPrediction:
    """Compose the phase timings over all layers into task time and TPS.

    With l_out = 1 the generation term vanishes exactly.

    Raises:
        InvalidCoefficient: c_off outside [0, 1).
        DegenerateTask: Both phases calibrated to zero time.
    """
    pre = prefill_layer_time(model, workload, instance, c_off, ctcf)
    dec = decode_layer_time(model, workload, instance, c_off, ctcf)
    n = model.num_layers
    t_task = pre.layer_time_s * n + dec.layer_time_s * n * (workload.l_out - 1)
    if t_task <= 0.0:
        raise DegenerateTask("predicted task time is zero")
    tps = workload.batch_size * (workload.l_in + workload.l_out) / t_task
    return PerfPrediction(prefill=pre, decode=dec, t_task_s=t_task, tps=tps)
