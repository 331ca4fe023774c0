"""GPU instance catalog: loading, validation, and price filtering.

Catalog files use human units (GB, TFLOPS, GB/s) and are converted to base
SI units (bytes, FLOP/s, bytes/s) at load time. One GB is 10^9 bytes
throughout; mixing decimal and binary gigabytes silently is how factor
errors creep into memory budgeting, so the conversion happens exactly once,
here.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Iterator

from .errors import (
    DuplicateName,
    MissingField,
    NonPositiveValue,
    UnknownInstance,
    UnreadableSource,
)

GB = 10**9
TFLOPS = 10**12

#: Fixture ids resolvable by :func:`load_catalog` without a file path.
BUNDLED_CATALOGS = ("aws-table3", "aws-table1")

DEFAULT_CATALOG = "aws-table3"

_REQUIRED_KEYS = (
    "name",
    "gpu_type",
    "price_per_hour_usd",
    "gpu_memory_gb",
    "fp16_tflops",
    "bw_gpu_to_cpu_gbps",
    "bw_cpu_to_gpu_gbps",
)


@dataclass(frozen=True)
class InstanceSpec:
    """One cloud GPU offering.

    Attributes:
        name: Instance type identifier, unique within a catalog.
        gpu_type: Marketing name of the GPU (e.g. "T4").
        price_per_hour: On-demand price in USD per hour.
        gpu_memory: Total GPU memory in bytes.
        flops: Theoretical FP16 throughput in FLOP/s.
        bw_gpu_to_cpu: GPU-to-CPU transfer bandwidth in bytes/s.
        bw_cpu_to_gpu: CPU-to-GPU transfer bandwidth in bytes/s.
        gpu_count: Number of GPUs on the instance. Multi-GPU rows are
            loadable but the planner treats gpu_memory as a single budget.
        host_memory: Optional host RAM in bytes, used only for the optional
            offload-exceeds-host-memory warning.
        network_gbps: Parsed for completeness; no formula consumes it.
    """

    name: str
    gpu_type: str
    price_per_hour: float
    gpu_memory: int
    flops: float
    bw_gpu_to_cpu: float
    bw_cpu_to_gpu: float
    gpu_count: int = 1
    host_memory: int | None = None
    network_gbps: float | None = None

    def __post_init__(self) -> None:
        positives = {
            "price_per_hour_usd": self.price_per_hour,
            "gpu_memory_gb": self.gpu_memory,
            "fp16_tflops": self.flops,
            "bw_gpu_to_cpu_gbps": self.bw_gpu_to_cpu,
            "bw_cpu_to_gpu_gbps": self.bw_cpu_to_gpu,
            "gpu_count": self.gpu_count,
        }
        for fname, value in positives.items():
            if not value > 0:
                raise NonPositiveValue(fname, value, context=self.name or "<unnamed>")
        if not self.name:
            raise MissingField("name")


@dataclass(frozen=True)
class Catalog:
    """Immutable, validated collection of instance specs.

    Safe to share across concurrent readers; nothing mutates after load.
    """

    instances: tuple[InstanceSpec, ...]
    source: str = "<memory>"
    _by_name: dict[str, InstanceSpec] = field(
        init=False, repr=False, compare=False, default_factory=dict
    )

    def __post_init__(self) -> None:
        by_name: dict[str, InstanceSpec] = {}
        for spec in self.instances:
            if spec.name in by_name:
                raise DuplicateName(spec.name)
            by_name[spec.name] = spec
        object.__setattr__(self, "_by_name", by_name)

    def __iter__(self) -> Iterator[InstanceSpec]:
        return iter(self.instances)

    def __len__(self) -> int:
        return len(self.instances)

    def names(self) -> tuple[str, ...]:
        return tuple(spec.name for spec in self.instances)

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    def get(self, name: str) -> InstanceSpec:
        try:
            return self._by_name[name]
        except KeyError:
            raise UnknownInstance(name) from None


def _require(entry: dict, key: str, index: int):
    if key not in entry:
        raise MissingField(key, context=f"instances[{index}]")
    return entry[key]


def _parse_instance(entry: dict, index: int) -> InstanceSpec:
    name = str(_require(entry, "name", index))
    host_gb = entry.get("host_memory_gb")
    network = entry.get("network_gbps")
    return InstanceSpec(
        name=name,
        gpu_type=str(_require(entry, "gpu_type", index)),
        price_per_hour=float(_require(entry, "price_per_hour_usd", index)),
        gpu_memory=int(round(float(_require(entry, "gpu_memory_gb", index)) * GB)),
        flops=float(_require(entry, "fp16_tflops", index)) * TFLOPS,
        bw_gpu_to_cpu=float(_require(entry, "bw_gpu_to_cpu_gbps", index)) * GB,
        bw_cpu_to_gpu=float(_require(entry, "bw_cpu_to_gpu_gbps", index)) * GB,
        gpu_count=int(entry.get("gpu_count", 1)),
        host_memory=None if host_gb is None else int(round(float(host_gb) * GB)),
        network_gbps=None if network is None else float(network),
    )


def _bundled_path(fixture: str) -> Path:
    return Path(str(resources.files("vmsolver").joinpath(f"data/catalogs/{fixture}.json")))


def load_catalog(source: str | Path) -> Catalog:
    """Load and validate a catalog from a file path or bundled fixture id.

    Args:
        source: Path to a catalog JSON file, or one of the bundled fixture
            ids in :data:`BUNDLED_CATALOGS`.

    Raises:
        UnreadableSource: Missing file, invalid JSON, or wrong top-level shape.
        MissingField, NonPositiveValue, DuplicateName: Schema violations.
    """
    label = str(source)
    path = _bundled_path(label) if label in BUNDLED_CATALOGS else Path(source)
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise UnreadableSource(f"cannot read catalog source '{label}': {exc}") from exc
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise UnreadableSource(f"catalog source '{label}' is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or not isinstance(doc.get("instances"), list):
        raise UnreadableSource(
            f"catalog source '{label}' must be an object with an 'instances' list"
        )
    instances = tuple(
        _parse_instance(entry, i) for i, entry in enumerate(doc["instances"])
    )
    if not instances:
        raise UnreadableSource(f"catalog source '{label}' contains no instances")
    return Catalog(instances=instances, source=label)


def instance_to_entry(spec: InstanceSpec) -> dict:
    """Render one instance back into the documented file schema (human units)."""
    entry = {
        "name": spec.name,
        "gpu_type": spec.gpu_type,
        "price_per_hour_usd": spec.price_per_hour,
        "gpu_memory_gb": spec.gpu_memory / GB,
        "fp16_tflops": spec.flops / TFLOPS,
        "bw_gpu_to_cpu_gbps": spec.bw_gpu_to_cpu / GB,
        "bw_cpu_to_gpu_gbps": spec.bw_cpu_to_gpu / GB,
        "gpu_count": spec.gpu_count,
    }
    if spec.host_memory is not None:
        entry["host_memory_gb"] = spec.host_memory / GB
    if spec.network_gbps is not None:
        entry["network_gbps"] = spec.network_gbps
    return entry


def serialize_catalog(catalog: Catalog) -> dict:
    return {"instances": [instance_to_entry(spec) for spec in catalog]}


def save_catalog(catalog: Catalog, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(serialize_catalog(catalog), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )


def filter_by_price(catalog: Catalog, p_max: float) -> Catalog:
    """Keep exactly the instances priced at or under the cap, order preserved.

    An empty result is valid; idempotent; the result grows monotonically
    with the cap.
    """
    if not p_max > 0:
        raise NonPositiveValue("p_max", p_max)
    kept = tuple(s for s in catalog if s.price_per_hour <= p_max)
    return replace(catalog, instances=kept)
