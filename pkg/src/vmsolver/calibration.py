"""Affine compute-time calibration fitted from profiling data.

Vendor-sheet FLOPS overstate what inference kernels actually sustain, and
the gap is not a constant factor: it differs per instance and per phase
(prompt processing vs token generation). Profiling shows measured layer
time tracking theoretical layer time linearly, so the correction is a
per-(instance, phase) line

    corrected = alpha * theoretical + beta

fitted by ordinary least squares over profiling samples. Fitted slopes can
be negative on some hardware, which would drive small inputs below zero;
corrected times are therefore clamped at zero.

Profiling CSVs carry times in milliseconds (the column names say so);
everything downstream of ingestion is seconds, including the persisted
store.
"""

from __future__ import annotations

import csv
import json
import logging
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .errors import (
    DegenerateDesign,
    InsufficientSamples,
    SchemaError,
    UnreadableSource,
)

logger = logging.getLogger(__name__)

PHASES = ("prefill", "decode")

#: Calibration fixture ids resolvable by :meth:`CalibrationStore.load`.
#: These encode the published per-instance throughput measurements for the
#: two reference workloads; see README for provenance and caveats.
BUNDLED_CALIBRATIONS = (
    "online-measured",
    "online-measured-600slo",
    "offline-measured",
    "identity",
)

DEFAULT_CALIBRATION = "online-measured"

_PROFILE_COLUMNS = ("instance", "phase", "batch_size", "theoretical_ms", "measured_ms")


@dataclass(frozen=True)
class AffineCorrection:
    """One fitted line; (1, 0) is the identity."""

    alpha: float
    beta: float


IDENTITY = AffineCorrection(alpha=1.0, beta=0.0)


@dataclass(frozen=True)
class CtcfParams:
    """Per-phase corrections for one instance.

    fitted_from maps phase name to the number of samples behind the fit;
    zero means the entry was synthesized rather than fitted.
    """

    instance_name: str
    prefill: AffineCorrection = IDENTITY
    decode: AffineCorrection = IDENTITY
    fitted_from: Mapping[str, int] = field(default_factory=dict)

    def for_phase(self, phase: str) -> AffineCorrection:
        if phase not in PHASES:
            raise ValueError(f"unknown phase '{phase}'")
        return self.prefill if phase == "prefill" else self.decode


IDENTITY_PARAMS = CtcfParams(instance_name="<identity>")


@dataclass(frozen=True)
class ProfilingSample:
    """One profiling observation: theoretical vs measured seconds."""

    instance_name: str
    phase: str
    batch_size: int
    theoretical_s: float
    measured_s: float

    def __post_init__(self) -> None:
        if self.phase not in PHASES:
            raise ValueError(f"phase must be one of {PHASES}, got '{self.phase}'")
        if not self.theoretical_s > 0:
            raise ValueError("theoretical_s must be positive")
        if not self.measured_s > 0:
            raise ValueError("measured_s must be positive")


def apply_ctcf(correction: AffineCorrection, t_compute: float) -> float:
    """Correct a theoretical compute time, clamped at zero.

    Times are physical; a fitted negative slope with a small input must not
    produce a negative duration.
    """
    if t_compute < 0:
        raise ValueError("t_compute must be >= 0")
    return max(0.0, correction.alpha * t_compute + correction.beta)


@dataclass(frozen=True)
class FitResult:
    alpha: float
    beta: float
    avg_error_rate: float
    sample_count: int


def fit_ctcf(samples: Iterable[ProfilingSample]) -> FitResult:
    """Ordinary least squares of measured on theoretical time.

    Args:
        samples: Observations for a single (instance, phase) group.

    Returns:
        The fitted line and the mean relative error of the clamped
        correction against the measurements.

    Raises:
        InsufficientSamples: Fewer than two samples.
        DegenerateDesign: All theoretical times identical.
    """
    group = list(samples)
    if len(group) < 2:
        raise InsufficientSamples(
            f"need at least 2 samples to fit a line, got {len(group)}"
        )
    x = np.array([s.theoretical_s for s in group], dtype=np.float64)
    y = np.array([s.measured_s for s in group], dtype=np.float64)
    if np.all(x == x[0]):
        raise DegenerateDesign("all theoretical times are equal; slope is undetermined")

    alpha, beta = np.polyfit(x, y, deg=1)
    correction = AffineCorrection(alpha=float(alpha), beta=float(beta))
    rel_errors = [abs(apply_ctcf(correction, xi) - yi) / yi for xi, yi in zip(x, y)]
    return FitResult(
        alpha=correction.alpha,
        beta=correction.beta,
        avg_error_rate=float(np.mean(rel_errors)),
        sample_count=len(group),
    )


@dataclass(frozen=True)
class StoreEntry:
    alpha: float
    beta: float
    avg_error_rate: float
    sample_count: int


def _bundled_path(fixture: str) -> Path:
    from importlib import resources

    return Path(str(resources.files("vmsolver").joinpath(f"data/calibration/{fixture}.json")))


class CalibrationStore:
    """Fitted corrections keyed by (instance, phase).

    Persisted as a single JSON document mapping instance name to phase to
    {alpha, beta, avg_error_rate, sample_count}, with beta in seconds.
    Reads are lock-free over immutable entries; ingest replaces entries
    wholesale (last write wins per key) and saves atomically.
    """

    def __init__(self, source: str = "<empty>"):
        self._entries: dict[tuple[str, str], StoreEntry] = {}
        self.source = source

    @classmethod
    def load(cls, source: str | Path) -> "CalibrationStore":
        """Load a store from a file path or bundled fixture id."""
        label = str(source)
        if label == "identity":
            return cls(source="identity")
        path = _bundled_path(label) if label in BUNDLED_CALIBRATIONS else Path(source)
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except OSError as exc:
            raise UnreadableSource(f"cannot read calibration store '{label}': {exc}") from exc
        except json.JSONDecodeError as exc:
            raise UnreadableSource(
                f"calibration store '{label}' is not valid JSON: {exc}"
            ) from exc
        store = cls(source=label)
        for instance, phases in doc.items():
            for phase, entry in phases.items():
                if phase not in PHASES:
                    raise SchemaError(
                        f"unknown phase '{phase}' for instance '{instance}'"
                    )
                store._entries[(instance, phase)] = StoreEntry(
                    alpha=float(entry["alpha"]),
                    beta=float(entry["beta"]),
                    avg_error_rate=float(entry.get("avg_error_rate", 0.0)),
                    sample_count=int(entry.get("sample_count", 0)),
                )
        return store

    def to_document(self) -> dict:
        doc: dict[str, dict[str, dict]] = {}
        for (instance, phase), entry in sorted(self._entries.items()):
            doc.setdefault(instance, {})[phase] = {
                "alpha": entry.alpha,
                "beta": entry.beta,
                "avg_error_rate": entry.avg_error_rate,
                "sample_count": entry.sample_count,
            }
        return doc

    def save(self, path: str | Path) -> None:
        """Write the store atomically (write-then-rename)."""
        target = Path(path)
        payload = json.dumps(self.to_document(), indent=2, sort_keys=True) + "\n"
        fd, tmp = tempfile.mkstemp(dir=target.parent or Path("."), suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as handle:
                handle.write(payload)
            os.replace(tmp, target)
        except BaseException:
            Path(tmp).unlink(missing_ok=True)
            raise

    def put(self, instance: str, phase: str, result: FitResult) -> None:
        if phase not in PHASES:
            raise ValueError(f"unknown phase '{phase}'")
        self._entries[(instance, phase)] = StoreEntry(
            alpha=result.alpha,
            beta=result.beta,
            avg_error_rate=result.avg_error_rate,
            sample_count=result.sample_count,
        )

    def has(self, instance: str) -> bool:
        return any((instance, phase) in self._entries for phase in PHASES)

    def entry(self, instance: str, phase: str) -> StoreEntry | None:
        return self._entries.get((instance, phase))

    def instances(self) -> tuple[str, ...]:
        return tuple(sorted({inst for inst, _ in self._entries}))

    def params_for(self, instance: str) -> tuple[CtcfParams, bool]:
        """Corrections for an instance plus an 'uncalibrated' flag.

        Instances absent from the store get identity corrections so the
        planner can still rank them; callers surface the flag.
        """
        prefill = self._entries.get((instance, "prefill"))
        decode = self._entries.get((instance, "decode"))
        if prefill is None and decode is None:
            return CtcfParams(instance_name=instance), True
        params = CtcfParams(
            instance_name=instance,
            prefill=AffineCorrection(prefill.alpha, prefill.beta) if prefill else IDENTITY,
            decode=AffineCorrection(decode.alpha, decode.beta) if decode else IDENTITY,
            fitted_from={
                "prefill": prefill.sample_count if prefill else 0,
                "decode": decode.sample_count if decode else 0,
            },
        )
        return params, False

    def ingest_profile(
        self,
        source: str | Path,
        known_instances: Iterable[str] | None = None,
    ) -> list[tuple[str, str, FitResult]]:
        """Parse a profiling CSV, fit every (instance, phase) group, store results.

        The CSV header must be exactly
        ``instance,phase,batch_size,theoretical_ms,measured_ms``; times are
        converted from milliseconds to seconds here and nowhere else.

        Args:
            source: Path to the profiling CSV.
            known_instances: Optional catalog names; rows for instances not
                listed are still fitted and stored (they remain usable with
                user catalogs) but logged as a warning.

        Returns:
            The fitted groups as (instance, phase, result) in first-seen order.

        Raises:
            SchemaError: Malformed header or row, with the line number.
        """
        path = Path(source)
        try:
            handle = path.open(newline="", encoding="utf-8")
        except OSError as exc:
            raise UnreadableSource(f"cannot read profile '{source}': {exc}") from exc

        groups: dict[tuple[str, str], list[ProfilingSample]] = {}
        with handle:
            reader = csv.DictReader(handle)
            if reader.fieldnames is None:
                return []
            if tuple(reader.fieldnames) != _PROFILE_COLUMNS:
                raise SchemaError(
                    f"expected header {','.join(_PROFILE_COLUMNS)}, "
                    f"got {','.join(reader.fieldnames)}",
                    line=1,
                )
            for row in reader:
                line = reader.line_num
                try:
                    sample = ProfilingSample(
                        instance_name=row["instance"].strip(),
                        phase=row["phase"].strip(),
                        batch_size=int(row["batch_size"]),
                        theoretical_s=float(row["theoretical_ms"]) / 1000.0,
                        measured_s=float(row["measured_ms"]) / 1000.0,
                    )
                except (TypeError, ValueError, AttributeError, KeyError) as exc:
                    raise SchemaError(str(exc), line=line) from exc
                groups.setdefault((sample.instance_name, sample.phase), []).append(sample)

        known = set(known_instances) if known_instances is not None else None
        fitted: list[tuple[str, str, FitResult]] = []
        for (instance, phase), samples in groups.items():
            if known is not None and instance not in known:
                logger.warning(
                    "profiling data for '%s' does not match any catalog instance; "
                    "stored anyway",
                    instance,
                )
            result = fit_ctcf(samples)
            self.put(instance, phase, result)
            fitted.append((instance, phase, result))
        return fitted
