#!/usr/bin/env python3
"""Regenerate the bundled measured-throughput calibration fixtures.

The published evaluation reports one measured average TPS per instance for
each reference workload. Those numbers are not derivable from vendor FLOPS
alone; this script solves, per instance, for the decode correction that
makes the analytic model reproduce the measured TPS exactly, holding the
prefill correction at identity. The solved entries are written as store
JSONs with sample_count 0 (synthesized, not fitted from raw profiles).

Run from the repository root:

    python3 tools/make_calibration_fixtures.py
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from vmsolver.calibration import CalibrationStore, CtcfParams, FitResult
from vmsolver.catalog import load_catalog
from vmsolver.model_registry import WorkloadSpec, lookup_model, memory_footprint
from vmsolver.perf_model import decode_layer_time, predict, prefill_layer_time
from vmsolver.suitability import evaluate_instance

DATA_DIR = Path(__file__).resolve().parents[1] / "src" / "vmsolver" / "data"

MODEL = "opt-2.7b"

ONLINE = dict(batch_size=32, l_in=128, l_out=512, total_requests=3000, slo_tps=400.0, p_max=3.0)
OFFLINE = dict(batch_size=32, l_in=1024, l_out=128, total_requests=1000, slo_tps=100.0, p_max=3.0)

# Measured average TPS per instance for the online chatbot-style workload
# (128 in / 512 out). The "-600slo" variant carries the instances measured
# in the 600-TPS run; the cheapest instance was not run there because the
# planner had already screened it out.
ONLINE_TPS = {
    "g4dn.xlarge": 620.17,
    "g6.xlarge": 802.19,
    "g5.xlarge": 1206.12,
    "g6e.xlarge": 1506.54,
}
ONLINE_600_TPS = {
    "g6.xlarge": 800.15,
    "g5.xlarge": 1206.12,
    "g6e.xlarge": 1505.37,
}

# Offline batch workload (1024 in / 128 out). The two 24 GB instances were
# run with their offload ratio pinned at 60%; that setting lives in the
# scenario overrides fixture and must be passed to recommend() when
# reproducing the published selection.
OFFLINE_TPS = {
    "g4dn.xlarge": 169.17,
    "g6.xlarge": 415.04,
    "g5.xlarge": 414.01,
    "g6e.xlarge": 1506.54,
}
OFFLINE_C_OFF = {
    "g6.xlarge": 0.60,
    "g5.xlarge": 0.60,
}


def solve_decode_alpha(model, workload, instance, c_off, target_tps) -> float:
    """Decode-phase slope that lands predict() exactly on target_tps."""
    identity = CtcfParams(instance_name=instance.name)
    pre = prefill_layer_time(model, workload, instance, c_off, identity)
    dec = decode_layer_time(model, workload, instance, c_off, identity)

    n = model.num_layers
    t_task_target = workload.batch_size * (workload.l_in + workload.l_out) / target_tps
    decode_budget = t_task_target / n - pre.layer_time_s
    if workload.l_out <= 1:
        raise SystemExit(f"{instance.name}: need l_out > 1 to place the correction")
    per_step = decode_budget / (workload.l_out - 1)
    compute_target = per_step - dec.transfer_s
    if compute_target < 0:
        raise SystemExit(
            f"{instance.name}: target TPS {target_tps} unreachable; transfer alone "
            f"needs {dec.transfer_s:.6f}s per step but only {per_step:.6f}s available"
        )
    return compute_target / dec.compute_s


def build_store(workload_kwargs, targets, c_off_overrides) -> CalibrationStore:
    model = lookup_model(MODEL)
    workload = WorkloadSpec(**workload_kwargs)
    catalog = load_catalog("aws-table3")
    footprint = memory_footprint(model, workload)

    store = CalibrationStore()
    for name, target in sorted(targets.items()):
        instance = catalog.get(name)
        candidate = evaluate_instance(instance, footprint)
        assert candidate.feasible, f"{name} unexpectedly unsuitable"
        c_off = c_off_overrides.get(name, candidate.c_off)
        alpha_d = solve_decode_alpha(model, workload, instance, c_off, target)

        store.put(name, "prefill", FitResult(1.0, 0.0, 0.0, 0))
        store.put(name, "decode", FitResult(alpha_d, 0.0, 0.0, 0))

        params, _ = store.params_for(name)
        got = predict(model, workload, instance, c_off, params).tps
        rel = abs(got - target) / target
        assert rel < 1e-9, f"{name}: solved TPS {got} vs target {target}"
        print(f"  {name:<14} c_off={c_off:<8.4f} target={target:<9.2f} tps={got:.4f}")
    return store


def main() -> None:
    out = DATA_DIR / "calibration"
    out.mkdir(parents=True, exist_ok=True)

    print("online-measured:")
    build_store(ONLINE, ONLINE_TPS, {}).save(out / "online-measured.json")
    print("online-measured-600slo:")
    build_store(ONLINE, ONLINE_600_TPS, {}).save(out / "online-measured-600slo.json")
    print("offline-measured:")
    build_store(OFFLINE, OFFLINE_TPS, OFFLINE_C_OFF).save(out / "offline-measured.json")

    scenarios = DATA_DIR / "scenarios"
    scenarios.mkdir(parents=True, exist_ok=True)
    overrides_path = scenarios / "offline-offload-settings.json"
    overrides_path.write_text(
        json.dumps({"c_off_overrides": OFFLINE_C_OFF}, indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    print(f"wrote {overrides_path}")


if __name__ == "__main__":
    main()
