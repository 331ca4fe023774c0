"""Shared fixtures and independent oracles used across the suite."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from vmsolver.catalog import InstanceSpec, load_catalog
from vmsolver.model_registry import MemoryFootprint, WorkloadSpec, lookup_model


@pytest.fixture(autouse=True)
def _no_env_overrides(monkeypatch):
    """Keep tests hermetic from the caller's environment."""
    for var in ("VMSOLVER_CATALOG", "VMSOLVER_CALIBRATION", "VMSOLVER_ADDR"):
        monkeypatch.delenv(var, raising=False)


@pytest.fixture(scope="session")
def aws_catalog():
    return load_catalog("aws-table3")


@pytest.fixture(scope="session")
def opt_2_7b():
    return lookup_model("opt-2.7b")


@pytest.fixture
def online_workload():
    """Chatbot-style job: short prompts, long answers."""
    return WorkloadSpec(
        batch_size=32, l_in=128, l_out=512, total_requests=3000, slo_tps=400.0, p_max=3.0
    )


@pytest.fixture
def offline_workload():
    """Batch-processing job: long prompts, short outputs."""
    return WorkloadSpec(
        batch_size=32, l_in=1024, l_out=128, total_requests=1000, slo_tps=100.0, p_max=3.0
    )


# --- independent oracles -------------------------------------------------

def oracle_footprint(params: int, prec: int, bs: int, tokens: int, h1: int, layers: int):
    """Spreadsheet-style recomputation of the memory formulas."""
    model_b = params * prec
    kv_b = 2 * bs * tokens * h1 * prec * layers
    act_b = prec * tokens * bs * h1
    return {
        "model": model_b,
        "kv": kv_b,
        "per_layer": kv_b // layers,
        "act": act_b,
        "base": model_b + act_b,
        "total": model_b + act_b + kv_b,
    }


def oracle_classify(gpu_memory: int, fp: MemoryFootprint):
    """Exhaustive reimplementation of the suitability trichotomy.

    Returns (verdict_str, c_off_float). Kept deliberately separate from the
    production code path.
    """
    avail = gpu_memory - fp.mem_base
    if gpu_memory >= fp.mem_total:
        return "no-offload", 0.0
    if gpu_memory < fp.mem_model or fp.mem_kvcache_per_layer > avail:
        return "unsuitable", 0.0
    return "partial-offload", float(Fraction(fp.mem_kvcache - avail, fp.mem_kvcache))


def random_footprint(rng: random.Random) -> MemoryFootprint:
    """A random but internally consistent memory requirement."""
    layers = rng.randint(1, 48)
    per_layer = rng.randint(1, 2 * 10**9)
    kv = per_layer * layers
    model = rng.randint(1, 30 * 10**9)
    act = rng.randint(1, 10**9)
    return MemoryFootprint(
        mem_model=model,
        mem_activation=act,
        mem_kvcache=kv,
        mem_kvcache_per_layer=per_layer,
        mem_total=model + act + kv,
        mem_base=model + act,
        num_layers=layers,
    )


def random_instance(rng: random.Random, name: str) -> InstanceSpec:
    return InstanceSpec(
        name=name,
        gpu_type=rng.choice(["T4", "L4", "A10G", "L40s"]),
        price_per_hour=round(rng.uniform(0.1, 45.0), 3),
        gpu_memory=rng.randint(1, 64) * 10**9,
        flops=rng.uniform(5.0, 100.0) * 1e12,
        bw_gpu_to_cpu=rng.uniform(1.0, 30.0) * 1e9,
        bw_cpu_to_gpu=rng.uniform(1.0, 30.0) * 1e9,
    )
