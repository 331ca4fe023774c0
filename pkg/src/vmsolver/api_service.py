"""Stateless HTTP facade over the planner.

Catalog and calibration load once at startup into an immutable snapshot;
POST /api/v1/reload swaps in a freshly loaded snapshot atomically, so
concurrent readers never observe a half-loaded catalog. There is no other
state: identical requests produce identical responses in any order.

Configuration comes from create_app() arguments or the environment
(VMSOLVER_CATALOG, VMSOLVER_CALIBRATION, VMSOLVER_CORS_ORIGINS); the bind
address for the bundled runner comes from VMSOLVER_ADDR.

Endpoints (all under /api/v1):
    GET  /catalog     instance list with provenance
    GET  /models      registered model architectures
    POST /recommend   full recommendation document; an empty ranking with
                      its cause is a 200, not an error
    POST /predict     phase timings for one instance
    POST /reload      reload catalog and calibration from their sources
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Literal

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field, model_validator

from .calibration import DEFAULT_CALIBRATION, CalibrationStore
from .catalog import DEFAULT_CATALOG, Catalog, instance_to_entry, load_catalog
from .errors import UnknownInstance, UnknownModel, VmsolverError
from .model_registry import (
    WorkloadSpec,
    lookup_model,
    memory_footprint,
    model_to_entry,
    registered_models,
)
from .perf_model import predict as predict_perf
from .planner import (
    PlannerOptions,
    Policy,
    prediction_to_document,
    recommend,
    to_document,
)
from .suitability import evaluate_instance

API_PREFIX = "/api/v1"


@dataclass(frozen=True)
class Snapshot:
    """Immutable service state; replaced wholesale on reload."""

    catalog: Catalog
    store: CalibrationStore


class RecommendRequest(BaseModel):
    model: str
    batch_size: int = Field(ge=1)
    input_tokens: int = Field(ge=1)
    output_tokens: int = Field(ge=1)
    total_requests: int | None = Field(default=None, ge=1)
    slo_tps: float = Field(gt=0, allow_inf_nan=False)
    max_price_per_hour: float = Field(gt=0, allow_inf_nan=False)
    policy: Literal["infersave", "max-perf"] = "infersave"
    disable_offloading: bool = False
    only_calibrated: bool = False
    c_off_overrides: dict[str, float] = Field(default_factory=dict)
    catalog: str | None = None
    calibration: str | None = None

    @model_validator(mode="after")
    def _requests_cover_batch(self):
        if self.total_requests is not None and self.total_requests < self.batch_size:
            raise ValueError("total_requests must be >= batch_size")
        return self


class PredictRequest(BaseModel):
    model: str
    instance: str
    batch_size: int = Field(ge=1)
    input_tokens: int = Field(ge=1)
    output_tokens: int = Field(ge=1)
    c_off: float | None = Field(default=None, ge=0.0, lt=1.0)
    catalog: str | None = None
    calibration: str | None = None


def _load_snapshot(catalog_source: str, calibration_source: str) -> Snapshot:
    return Snapshot(
        catalog=load_catalog(catalog_source),
        store=CalibrationStore.load(calibration_source),
    )


def create_app(
    catalog_source: str | None = None,
    calibration_source: str | None = None,
    cors_origins: list[str] | None = None,
    static_dir: str | None = None,
) -> FastAPI:
    """Build the service; a failed startup load leaves endpoints at 503.

    When static_dir (or VMSOLVER_STATIC_DIR) names a directory, its files
    are served at the root path so the built explorer UI can ride along.
    """
    catalog_src = catalog_source or os.environ.get("VMSOLVER_CATALOG", DEFAULT_CATALOG)
    calibration_src = calibration_source or os.environ.get(
        "VMSOLVER_CALIBRATION", DEFAULT_CALIBRATION
    )
    static_root = static_dir or os.environ.get("VMSOLVER_STATIC_DIR")
    origins = cors_origins or [
        o.strip()
        for o in os.environ.get("VMSOLVER_CORS_ORIGINS", "*").split(",")
        if o.strip()
    ]

    app = FastAPI(title="vmsolver", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=origins,
        allow_methods=["*"],
        allow_headers=["*"],
    )

    app.state.snapshot = None
    app.state.load_error = None
    try:
        app.state.snapshot = _load_snapshot(catalog_src, calibration_src)
    except VmsolverError as exc:
        app.state.load_error = str(exc)

    def current() -> Snapshot:
        snapshot = app.state.snapshot
        if snapshot is None:
            raise HTTPException(
                status_code=503,
                detail=f"service data failed to load: {app.state.load_error}",
            )
        return snapshot

    def resolve(request_catalog: str | None, request_calibration: str | None) -> Snapshot:
        snapshot = current()
        try:
            catalog = (
                load_catalog(request_catalog) if request_catalog else snapshot.catalog
            )
            store = (
                CalibrationStore.load(request_calibration)
                if request_calibration
                else snapshot.store
            )
        except VmsolverError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return Snapshot(catalog=catalog, store=store)

    @app.get(API_PREFIX + "/catalog")
    def get_catalog():
        snapshot = current()
        return {
            "source": snapshot.catalog.source,
            "instances": [instance_to_entry(spec) for spec in snapshot.catalog],
        }

    @app.get(API_PREFIX + "/models")
    def get_models():
        return {
            "models": [model_to_entry(lookup_model(name)) for name in registered_models()]
        }

    @app.post(API_PREFIX + "/recommend")
    def post_recommend(request: RecommendRequest):
        snapshot = resolve(request.catalog, request.calibration)
        try:
            model = lookup_model(request.model)
        except UnknownModel as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        workload = WorkloadSpec(
            batch_size=request.batch_size,
            l_in=request.input_tokens,
            l_out=request.output_tokens,
            total_requests=request.total_requests or request.batch_size,
            slo_tps=request.slo_tps,
            p_max=request.max_price_per_hour,
        )
        options = PlannerOptions(
            policy=Policy(request.policy),
            disable_offloading=request.disable_offloading,
            only_calibrated=request.only_calibrated,
            c_off_overrides=request.c_off_overrides,
        )
        try:
            rec = recommend(model, workload, snapshot.catalog, snapshot.store, options)
        except VmsolverError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return to_document(rec)

    @app.post(API_PREFIX + "/predict")
    def post_predict(request: PredictRequest):
        snapshot = resolve(request.catalog, request.calibration)
        try:
            model = lookup_model(request.model)
            instance = snapshot.catalog.get(request.instance)
        except (UnknownModel, UnknownInstance) as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        workload = WorkloadSpec(
            batch_size=request.batch_size,
            l_in=request.input_tokens,
            l_out=request.output_tokens,
            total_requests=request.batch_size,
            slo_tps=1.0,
            p_max=1.0,
        )
        if request.c_off is not None:
            c_off = request.c_off
        else:
            candidate = evaluate_instance(instance, memory_footprint(model, workload))
            if not candidate.feasible:
                raise HTTPException(
                    status_code=400,
                    detail=f"{instance.name} is unsuitable: {candidate.reason}",
                )
            c_off = candidate.c_off
        params, uncalibrated = snapshot.store.params_for(instance.name)
        try:
            prediction = predict_perf(model, workload, instance, c_off, params)
        except VmsolverError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return prediction_to_document(
            model, instance, workload, c_off, prediction, uncalibrated,
            snapshot.store.source,
        )

    @app.post(API_PREFIX + "/reload")
    def post_reload():
        try:
            app.state.snapshot = _load_snapshot(catalog_src, calibration_src)
            app.state.load_error = None
        except VmsolverError as exc:
            app.state.load_error = str(exc)
            raise HTTPException(status_code=503, detail=str(exc)) from exc
        return {
            "reloaded": True,
            "catalog": catalog_src,
            "calibration": calibration_src,
        }

    if static_root and os.path.isdir(static_root):
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_root, html=True), name="explorer")

    return app
