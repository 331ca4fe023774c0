"""Throughput credit, hourly billing, and cost efficiency.

Two distinct task-time notions live side by side in this domain and are
deliberately never mixed:

* per-batch seconds (the perf model's t_task_s), and
* whole-job hours at the credited throughput (ce_hours here).

Throughput above the SLO target earns no extra credit:
tps_effective = min(tps_actual, slo_tps). Cost efficiency divides credited
tokens per hour by the hourly price over the ceiling of the job's hours at
the credited rate:

    ce_hours        = job_tokens / (tps_effective * 3600)
    cost_efficiency = tps_effective * 3600 / (ceil(ce_hours) * price)

Billing, by contrast, runs at the actual predicted speed: clouds bill whole
hours, so billed_hours = ceil(job_seconds / 3600) with a minimum of one
hour for any nonempty job. When the request count is not a whole number of
batches the duration still prices full batches (round the batch count up)
while token counts stay exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateJob
from .model_registry import WorkloadSpec


@dataclass(frozen=True)
class CostReport:
    """Money view of one job on one instance."""

    tps_actual: float
    tps_effective: float
    job_tokens: int
    job_duration_s: float
    billed_hours: int
    billed_cost: float
    ce_hours: float
    cost_efficiency: float


def effective_tps(tps_actual: float, slo_tps: float) -> float:
    """Throughput credited toward cost efficiency, capped at the SLO."""
    if not tps_actual > 0:
        raise ValueError("tps_actual must be positive")
    if not slo_tps > 0:
        raise ValueError("slo_tps must be positive")
    return min(tps_actual, slo_tps)


def cost_efficiency(
    tps_effective: float, workload: WorkloadSpec, price_per_hour: float
) -> tuple[float, float]:
    """Credited job hours and tokens-per-dollar for one instance.

    Returns:
        (ce_hours, cost_efficiency); ce_hours is the job's duration at the
        credited rate, before the billing ceiling.

    Raises:
        DegenerateJob: Zero-token job.
    """
    if not tps_effective > 0:
        raise ValueError("tps_effective must be positive")
    if not price_per_hour > 0:
        raise ValueError("price_per_hour must be positive")
    tokens = workload.job_tokens
    if tokens == 0:
        raise DegenerateJob("job contains no tokens")
    ce_hours = tokens / (tps_effective * 3600.0)
    ce = tps_effective * 3600.0 / (math.ceil(ce_hours) * price_per_hour)
    return ce_hours, ce


def billed_cost(
    tps_actual: float, workload: WorkloadSpec, price_per_hour: float
) -> CostReport:
    """Full cost report for a job running at tps_actual.

    Billing uses the actual (predicted or measured) speed; the efficiency
    fields use the SLO-capped speed. A trailing partial batch is priced as
    a full batch in the duration but contributes only its real tokens.
    """
    if not tps_actual > 0:
        raise ValueError("tps_actual must be positive")
    if not price_per_hour > 0:
        raise ValueError("price_per_hour must be positive")
    tokens = workload.job_tokens
    if tokens == 0:
        raise DegenerateJob("job contains no tokens")

    batches = math.ceil(workload.total_requests / workload.batch_size)
    batch_tokens = workload.batch_size * workload.tokens_per_request
    duration_s = batches * batch_tokens / tps_actual
    billed_hours = max(1, math.ceil(duration_s / 3600.0))

    tps_eff = effective_tps(tps_actual, workload.slo_tps)
    ce_hours, ce = cost_efficiency(tps_eff, workload, price_per_hour)

    return CostReport(
        tps_actual=tps_actual,
        tps_effective=tps_eff,
        job_tokens=tokens,
        job_duration_s=duration_s,
        billed_hours=billed_hours,
        billed_cost=billed_hours * price_per_hour,
        ce_hours=ce_hours,
        cost_efficiency=ce,
    )
