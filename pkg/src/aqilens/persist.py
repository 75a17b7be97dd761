"""JSON persistence for fitted models, plus the canonical serialization used
on every prediction-facing surface.

Scenario responses are serialized once, here, with sorted keys and floats
rounded to 6 significant digits, so the CLI, the HTTP service, and golden
files agree byte-for-byte.  Model files keep full float precision (repr
round-trip) so replayed predictions are bit-identical to the fitted model.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict
from pathlib import Path

from .aqi_pca import AqiPcaModel
from .errors import UnfittedModel
from .model import FeatureSpec, RegressionModel
from .numerics import EigenResult, Mat
from .scenario import ScenarioResult

SCHEMA_VERSION = 1


def _round_floats(obj, sigdigits: int):
    if isinstance(obj, bool):
        return obj
    if isinstance(obj, float):
        return float(f"{obj:.{sigdigits}g}")
    if isinstance(obj, dict):
        return {k: _round_floats(v, sigdigits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v, sigdigits) for v in obj]
    return obj


def canonical_json(payload, sigdigits: int = 6) -> str:
    """Deterministic compact JSON: sorted keys, floats at 6 significant digits."""
    return json.dumps(_round_floats(payload, sigdigits), sort_keys=True,
                      separators=(",", ":"))


def dump_json(payload, path: str | Path) -> None:
    """Full-precision, deterministic pretty JSON for artifacts."""
    Path(path).write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n",
                          encoding="utf-8")


def fingerprint_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def fingerprint_file(path: str | Path) -> str:
    return fingerprint_bytes(Path(path).read_bytes())


# ---------------------------------------------------------------- aqi model

def aqi_model_payload(model: AqiPcaModel) -> dict:
    return {
        "schema_version": model.schema_version,
        "kind": "aqi_pca",
        "pollutants": list(model.pollutant_names),
        "means": list(model.pollutant_means),
        "stds": list(model.pollutant_stds),
        "eigenvalues": list(model.components.values),
        "components_row_major": list(model.components.vectors.data),
        "orientation": model.orientation,
        "score_min": model.score_min,
        "score_max": model.score_max,
        "n_rows": model.n_rows,
    }


def save_aqi_model(model: AqiPcaModel, path: str | Path) -> None:
    dump_json(aqi_model_payload(model), path)


def load_aqi_model(path: str | Path) -> AqiPcaModel:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        k = len(doc["pollutants"])
        model = AqiPcaModel(
            pollutant_names=tuple(doc["pollutants"]),
            pollutant_means=tuple(doc["means"]),
            pollutant_stds=tuple(doc["stds"]),
            components=EigenResult(
                values=tuple(doc["eigenvalues"]),
                vectors=Mat(k, k, tuple(doc["components_row_major"])),
            ),
            orientation=int(doc["orientation"]),
            score_min=doc["score_min"],
            score_max=doc["score_max"],
            n_rows=int(doc["n_rows"]),
            schema_version=int(doc["schema_version"]),
        )
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        raise UnfittedModel(f"cannot load scoring model from {path}: {exc}") from None
    model.validate()
    return model


# --------------------------------------------------------- regression model

def regression_model_payload(model: RegressionModel) -> dict:
    spec = model.spec
    history = model.history
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "linear_regression",
        "features": list(spec.names),
        "include_bias": spec.include_bias,
        "means": list(spec.means) if spec.means else None,
        "stds": list(spec.stds) if spec.stds else None,
        "train_mins": list(spec.mins) if spec.mins else None,
        "train_maxs": list(spec.maxs) if spec.maxs else None,
        "feature_weights": list(model.feature_weights),
        "bias": model.bias,
        "fitted_by": model.fitted_by,
        "converged_at": model.converged_at,
        "history_summary": {
            "iterations": len(history),
            "first_loss": history[0] if history else None,
            "final_loss": history[-1] if history else None,
        },
    }


def save_regression_model(model: RegressionModel, path: str | Path) -> None:
    dump_json(regression_model_payload(model), path)


def load_regression_model(path: str | Path) -> RegressionModel:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        spec = FeatureSpec(
            names=tuple(doc["features"]),
            include_bias=bool(doc["include_bias"]),
            means=tuple(doc["means"]) if doc.get("means") else None,
            stds=tuple(doc["stds"]) if doc.get("stds") else None,
            mins=tuple(doc["train_mins"]) if doc.get("train_mins") else None,
            maxs=tuple(doc["train_maxs"]) if doc.get("train_maxs") else None,
        )
        return RegressionModel(
            feature_weights=tuple(doc["feature_weights"]),
            bias=doc["bias"],
            spec=spec,
            history=(),
            converged_at=doc.get("converged_at"),
            fitted_by=doc.get("fitted_by", "unknown"),
        )
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        raise UnfittedModel(f"cannot load regression model from {path}: {exc}") from None


# ------------------------------------------------------------------ results

def scenario_result_payload(result: ScenarioResult,
                            model_fingerprint: str | None = None) -> dict:
    payload = asdict(result)
    payload["extrapolated_covariates"] = list(result.extrapolated_covariates)
    payload["model_fingerprint"] = model_fingerprint
    return payload


def scenario_result_json(result: ScenarioResult,
                         model_fingerprint: str | None = None) -> str:
    return canonical_json(scenario_result_payload(result, model_fingerprint))
