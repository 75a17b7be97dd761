"""Read-only JSON-over-HTTP API over an immutable data snapshot.

The snapshot (panel, scoring model, regression model, optional metrics) is
loaded once at startup and never mutates; retraining means re-running the CLI
and restarting the process.  Every response body is produced by the canonical
serializer, so identical requests always receive identical bytes and the CLI's
scenario output matches the POST /api/scenario body exactly.

Configuration comes from flags on `aqilens serve` or the environment:
AQILENS_PORT, AQILENS_PANEL, AQILENS_MODEL, and optionally AQILENS_AQI_MODEL,
AQILENS_METRICS, AQILENS_UI_DIR, AQILENS_CORS_ORIGIN.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError

from ..aqi_pca import AqiPcaModel, explained_variance
from ..errors import (
    AqilensError,
    BoundViolation,
    UnknownCounty,
    UnknownCovariate,
)
from ..ingest import Panel, read_panel_csv
from ..model import RegressionModel
from ..persist import (
    canonical_json,
    fingerprint_file,
    load_aqi_model,
    load_regression_model,
    scenario_result_payload,
)
from ..scenario import run_scenario, sweep
from .schemas import ScenarioRequestPayload, SweepRequestPayload

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class ServiceState:
    panel: Panel
    regression: RegressionModel
    aqi: AqiPcaModel | None
    metrics: dict | None
    fingerprint: str  # content hash of the persisted regression model
    schema_version: int = SCHEMA_VERSION


def load_state(panel_path: str | Path, model_path: str | Path,
               aqi_model_path: str | Path | None = None,
               metrics_path: str | Path | None = None) -> ServiceState:
    """Build the immutable startup snapshot; refuses to serve an empty panel."""
    panel = read_panel_csv(panel_path)
    regression = load_regression_model(model_path)
    aqi = load_aqi_model(aqi_model_path) if aqi_model_path else None
    metrics = None
    if metrics_path:
        metrics = json.loads(Path(metrics_path).read_text(encoding="utf-8"))
    return ServiceState(panel=panel, regression=regression, aqi=aqi,
                        metrics=metrics, fingerprint=fingerprint_file(model_path))


def _json_response(payload, status_code: int = 200) -> Response:
    return Response(content=canonical_json(payload), status_code=status_code,
                    media_type="application/json")


def _error_response(status_code: int, code: str, message: str) -> Response:
    return _json_response({"error": {"code": code, "message": message}}, status_code)


_STATUS_BY_ERROR = (
    (UnknownCounty, 404),
    (BoundViolation, 422),
    (UnknownCovariate, 400),
)


def create_app(state: ServiceState | None, cors_origin: str | None = None,
               ui_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="aqilens", docs_url=None, redoc_url=None)

    if cors_origin:
        from fastapi.middleware.cors import CORSMiddleware
        app.add_middleware(
            CORSMiddleware,
            allow_origins=["*"] if cors_origin == "*" else [cors_origin],
            allow_methods=["GET", "POST"],
            allow_headers=["*"],
        )

    @app.exception_handler(RequestValidationError)
    async def _on_validation_error(_req: Request, exc: RequestValidationError):
        return _error_response(400, "service.bad_request", str(exc.errors()[:3]))

    @app.exception_handler(AqilensError)
    async def _on_domain_error(_req: Request, exc: AqilensError):
        for klass, status in _STATUS_BY_ERROR:
            if isinstance(exc, klass):
                return _error_response(status, exc.code, str(exc))
        return _error_response(400, exc.code, str(exc))

    def _state() -> ServiceState | None:
        return state

    def _require_state():
        s = _state()
        if s is None:
            return None, _error_response(503, "service.not_ready", "snapshot not loaded")
        return s, None

    @app.get("/healthz")
    def healthz():
        s, err = _require_state()
        if err:
            return err
        return _json_response({"status": "ok", "fingerprint": s.fingerprint,
                               "schema_version": s.schema_version})

    @app.get("/api/counties")
    def counties():
        s, err = _require_state()
        if err:
            return err
        names = s.panel.counties()
        out = []
        for name in names:
            latest = max(r.year for r in s.panel.rows if r.county == name)
            row = s.panel.get(name, latest)
            out.append({
                "county": name,
                "latest_year": latest,
                "covariates": {f: row.value(f) for f in s.regression.spec.names},
                "aqi_score": row.aqi_score,
            })
        return _json_response({"counties": out})

    @app.get("/api/counties/{county}/history")
    def county_history(county: str):
        s, err = _require_state()
        if err:
            return err
        rows = [r for r in s.panel.rows
                if r.county.casefold() == county.strip().casefold()]
        if not rows:
            raise UnknownCounty(county)
        return _json_response({
            "county": rows[0].county,
            "rows": [{"year": r.year, "aqi_score": r.aqi_score,
                      "total_afv": r.total_afv} for r in sorted(rows, key=lambda r: r.year)],
        })

    @app.get("/api/model")
    def model_metadata():
        s, err = _require_state()
        if err:
            return err
        spec = s.regression.spec
        payload = {
            "schema_version": s.schema_version,
            "fingerprint": s.fingerprint,
            "kind": "linear_regression",
            "fitted_by": s.regression.fitted_by,
            "include_bias": spec.include_bias,
            "bias": s.regression.bias,
            "features": [
                {
                    "name": name,
                    "weight": s.regression.feature_weights[k],
                    "mean": spec.means[k] if spec.means else None,
                    "std": spec.stds[k] if spec.stds else None,
                    "train_min": spec.mins[k] if spec.mins else None,
                    "train_max": spec.maxs[k] if spec.maxs else None,
                }
                for k, name in enumerate(spec.names)
            ],
            "metrics": s.metrics,
            "aqi": None,
        }
        if s.aqi is not None:
            payload["aqi"] = {
                "orientation": s.aqi.orientation,
                "score_min": s.aqi.score_min,
                "score_max": s.aqi.score_max,
                "explained_variance": list(explained_variance(s.aqi)),
            }
        return _json_response(payload)

    @app.post("/api/scenario")
    def scenario_endpoint(payload: ScenarioRequestPayload):
        s, err = _require_state()
        if err:
            return err
        if payload.model_id is not None and payload.model_id != s.fingerprint:
            return _error_response(400, "service.model_mismatch",
                                   "model_id does not match the loaded model")
        result = run_scenario(payload.to_domain(), s.panel, s.regression)
        return _json_response(scenario_result_payload(result, s.fingerprint))

    @app.post("/api/sweep")
    def sweep_endpoint(payload: SweepRequestPayload):
        s, err = _require_state()
        if err:
            return err
        if payload.model_id is not None and payload.model_id != s.fingerprint:
            return _error_response(400, "service.model_mismatch",
                                   "model_id does not match the loaded model")
        if not payload.values:
            return _error_response(400, "service.bad_request", "empty sweep grid")
        from ..scenario import ScenarioRequest
        request = ScenarioRequest(county=payload.county, base_year=payload.base_year,
                                  overrides={}, model_id=payload.model_id)
        results = sweep(request, payload.covariate, payload.values, s.panel, s.regression)
        return _json_response({
            "covariate": payload.covariate,
            "values": [float(v) for v in payload.values],
            "results": [scenario_result_payload(r, s.fingerprint) for r in results],
        })

    if ui_dir and Path(ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app


def create_app_from_env() -> FastAPI:
    panel = os.environ["AQILENS_PANEL"]
    model = os.environ["AQILENS_MODEL"]
    state = load_state(
        panel, model,
        aqi_model_path=os.environ.get("AQILENS_AQI_MODEL") or None,
        metrics_path=os.environ.get("AQILENS_METRICS") or None,
    )
    return create_app(state,
                      cors_origin=os.environ.get("AQILENS_CORS_ORIGIN") or None,
                      ui_dir=os.environ.get("AQILENS_UI_DIR") or None)
