"""Transformer model architecture registry and memory footprint math.

All memory quantities are exact integer byte counts. Python integers are
arbitrary precision, so the products here cannot overflow.

Two deliberate interpretations of the sizing formulas, both load-bearing:

* The KV cache is sized with the full hidden dimension (heads times
  per-head width), not the head count alone. Head count by itself is off
  by the head width and produces footprints two to three orders of
  magnitude too small to ever force offloading.
* The activation term's leading factor of two is read as bytes per value,
  so FP32 models scale correctly instead of inheriting an FP16 constant.

The KV cache is sized for the full sequence (prompt plus all generated
tokens), i.e. the worst case at the end of decode. Suitability decisions
made on that basis cannot hit out-of-memory mid-generation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import UnknownModel, UnreadableSource


@dataclass(frozen=True)
class ModelSpec:
    """Architecture parameters of a transformer LLM.

    Attributes:
        name: Registry identifier.
        param_count: Total weight count. Stored explicitly rather than
            derived, because embedding and vocabulary terms vary by family.
        h1: Hidden size (model dimension).
        h2: Intermediate (feed-forward) size.
        nh: Number of attention heads.
        head_dim: Per-head width; h1 must equal nh * head_dim.
        num_layers: Transformer layer count.
        precision_bytes: Bytes per value (1, 2, or 4).
    """

    name: str
    param_count: int
    h1: int
    h2: int
    nh: int
    head_dim: int
    num_layers: int
    precision_bytes: int

    def __post_init__(self) -> None:
        for fname in ("param_count", "h1", "h2", "nh", "head_dim", "num_layers"):
            if getattr(self, fname) <= 0:
                raise ValueError(f"{fname} must be positive")
        if self.precision_bytes not in (1, 2, 4):
            raise ValueError(f"precision_bytes must be 1, 2, or 4, got {self.precision_bytes}")
        if self.h1 != self.nh * self.head_dim:
            raise ValueError(
                f"hidden size {self.h1} != num_heads {self.nh} * head_dim {self.head_dim}"
            )


@dataclass(frozen=True)
class WorkloadSpec:
    """A batched inference job and its service constraints.

    Attributes:
        batch_size: Requests processed per batch.
        l_in: Input (prompt) token length per request.
        l_out: Output token length per request.
        total_requests: Requests in the whole job; at least one batch.
        slo_tps: Minimum tokens-per-second target.
        p_max: Hourly price cap in USD.
    """

    batch_size: int
    l_in: int
    l_out: int
    total_requests: int
    slo_tps: float
    p_max: float

    def __post_init__(self) -> None:
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.l_in < 1:
            raise ValueError("l_in must be >= 1")
        if self.l_out < 1:
            raise ValueError("l_out must be >= 1")
        if self.total_requests < self.batch_size:
            raise ValueError("total_requests must be >= batch_size")
        if not self.slo_tps > 0:
            raise ValueError("slo_tps must be positive")
        if not self.p_max > 0:
            raise ValueError("p_max must be positive")

    @property
    def tokens_per_request(self) -> int:
        return self.l_in + self.l_out

    @property
    def job_tokens(self) -> int:
        return self.total_requests * self.tokens_per_request


@dataclass(frozen=True)
class MemoryFootprint:
    """Byte-exact memory requirement breakdown for one (model, workload).

    Invariants, enforced on construction:
        mem_total == mem_model + mem_activation + mem_kvcache
        mem_base == mem_model + mem_activation
        mem_kvcache == mem_kvcache_per_layer * num_layers
    """

    mem_model: int
    mem_activation: int
    mem_kvcache: int
    mem_kvcache_per_layer: int
    mem_total: int
    mem_base: int
    num_layers: int

    def __post_init__(self) -> None:
        assert self.mem_total == self.mem_model + self.mem_activation + self.mem_kvcache
        assert self.mem_base == self.mem_model + self.mem_activation
        assert self.mem_kvcache == self.mem_kvcache_per_layer * self.num_layers


def memory_footprint(model: ModelSpec, workload: WorkloadSpec) -> MemoryFootprint:
    """Compute the full memory breakdown for a model under a workload.

    Weights are param_count * precision_bytes. The KV cache holds a key and
    a value vector of width h1 per token per layer, for every token of the
    full sequence across the batch. Activations are one h1-wide vector per
    token across the batch.
    """
    tokens = workload.l_in + workload.l_out
    bs = workload.batch_size
    prec = model.precision_bytes

    mem_model = model.param_count * prec
    per_layer = 2 * bs * tokens * model.h1 * prec
    mem_kvcache = per_layer * model.num_layers
    mem_activation = prec * tokens * bs * model.h1

    return MemoryFootprint(
        mem_model=mem_model,
        mem_activation=mem_activation,
        mem_kvcache=mem_kvcache,
        mem_kvcache_per_layer=per_layer,
        mem_total=mem_model + mem_activation + mem_kvcache,
        mem_base=mem_model + mem_activation,
        num_layers=model.num_layers,
    )


_REGISTRY: dict[str, ModelSpec] = {
    spec.name: spec
    for spec in (
        ModelSpec(
            name="opt-1.3b",
            param_count=1_300_000_000,
            h1=2048,
            h2=8192,
            nh=32,
            head_dim=64,
            num_layers=24,
            precision_bytes=2,
        ),
        ModelSpec(
            name="opt-2.7b",
            param_count=2_700_000_000,
            h1=2560,
            h2=10240,
            nh=32,
            head_dim=80,
            num_layers=32,
            precision_bytes=2,
        ),
        ModelSpec(
            name="opt-6.7b",
            param_count=6_700_000_000,
            h1=4096,
            h2=16384,
            nh=32,
            head_dim=128,
            num_layers=32,
            precision_bytes=2,
        ),
    )
}


def registered_models() -> tuple[str, ...]:
    return tuple(_REGISTRY)


def load_model_file(path: str | Path) -> ModelSpec:
    """Parse a user-supplied model description file.

    Expected keys: name, param_count, hidden_size, intermediate_size,
    num_heads, num_layers, precision_bytes. The per-head width is derived
    from hidden_size / num_heads and must divide evenly.
    """
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise UnreadableSource(f"cannot read model file '{path}': {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UnreadableSource(f"model file '{path}' is not valid JSON: {exc}") from exc
    try:
        hidden = int(doc["hidden_size"])
        heads = int(doc["num_heads"])
        if hidden % heads != 0:
            raise ValueError(f"hidden_size {hidden} not divisible by num_heads {heads}")
        return ModelSpec(
            name=str(doc["name"]),
            param_count=int(doc["param_count"]),
            h1=hidden,
            h2=int(doc["intermediate_size"]),
            nh=heads,
            head_dim=hidden // heads,
            num_layers=int(doc["num_layers"]),
            precision_bytes=int(doc["precision_bytes"]),
        )
    except KeyError as exc:
        raise UnreadableSource(f"model file '{path}' is missing key {exc}") from exc


def lookup_model(name: str | Path) -> ModelSpec:
    """Resolve a registry name or a path to a model description file."""
    key = str(name)
    if key in _REGISTRY:
        return _REGISTRY[key]
    if Path(key).is_file():
        return load_model_file(key)
    raise UnknownModel(key)


def model_to_entry(spec: ModelSpec) -> dict:
    """Render a model spec in the user-file schema (plus derived head_dim)."""
    return {
        "name": spec.name,
        "param_count": spec.param_count,
        "hidden_size": spec.h1,
        "intermediate_size": spec.h2,
        "num_heads": spec.nh,
        "head_dim": spec.head_dim,
        "num_layers": spec.num_layers,
        "precision_bytes": spec.precision_bytes,
    }
