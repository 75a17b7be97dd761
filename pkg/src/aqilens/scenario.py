"""What-if exploration: re-predict a county's air-quality score after
hypothetical changes to its adoption or socioeconomic covariates.

Overrides apply to raw covariate values (natural units, before
standardization).  Every result carries a fixed disclaimer: the underlying
model is correlational, and regional air quality depends on many factors
beyond vehicle adoption, so deltas are not causal effect estimates.
Covariates pushed strictly outside the training range raise an extrapolation
flag rather than an error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Mapping, Sequence

from .errors import BoundViolation, UnknownCounty, UnknownCovariate
from .model import RegressionModel, predict

if TYPE_CHECKING:
    from .ingest import Panel

DISCLAIMER = (
    "Correlational model: air quality also depends on factors beyond vehicle "
    "adoption and demographics, so predicted deltas are not causal estimates."
)

# Domain bounds for overridable covariates: counts are non-negative,
# fraction-valued shares live in [0, 1].
COVARIATE_BOUNDS: dict[str, tuple[float, float]] = {
    "total_afv": (0.0, math.inf),
    "bev_count": (0.0, math.inf),
    "phev_count": (0.0, math.inf),
    "nev_count": (0.0, math.inf),
    "hev_count": (0.0, math.inf),
    "pev_count": (0.0, math.inf),
    "non_pev_count": (0.0, math.inf),
    "population": (0.0, math.inf),
    "population_change": (-math.inf, math.inf),
    "median_household_income": (0.0, math.inf),
    "education_pct": (0.0, 1.0),
    "unemployment_rate": (0.0, 1.0),
    "poverty_pct": (0.0, 1.0),
    "poverty_lower": (0.0, 1.0),
    "poverty_upper": (0.0, 1.0),
    "road_mileage": (0.0, math.inf),
    "vmt": (0.0, math.inf),
}


@dataclass(frozen=True)
class Override:
    """Either an absolute replacement value or a multiplier on the baseline."""

    value: float | None = None
    multiply: float | None = None

    def __post_init__(self):
        if (self.value is None) == (self.multiply is None):
            raise ValueError("exactly one of value/multiply must be given")

    def apply(self, baseline: float) -> float:
        return float(self.value) if self.value is not None else baseline * float(self.multiply)


@dataclass(frozen=True)
class ScenarioRequest:
    county: str
    base_year: int
    overrides: Mapping[str, Override] = None  # type: ignore[assignment]
    model_id: str | None = None

    def __post_init__(self):
        if self.overrides is None:
            object.__setattr__(self, "overrides", {})


@dataclass(frozen=True)
class ScenarioResult:
    county: str
    base_year: int
    baseline_covariates: dict[str, float]
    scenario_covariates: dict[str, float]
    baseline_aqi: float
    scenario_aqi: float
    delta: float
    extrapolation_flag: bool
    extrapolated_covariates: tuple[str, ...]
    disclaimer: str = DISCLAIMER


def _bounds_check(name: str, value: float) -> None:
    lo, hi = COVARIATE_BOUNDS.get(name, (-math.inf, math.inf))
    if not lo <= value <= hi:
        raise BoundViolation(f"{name}={value} outside [{lo}, {hi}]")


def run_scenario(request: ScenarioRequest, panel: "Panel",
                 model: RegressionModel) -> ScenarioResult:
    """Predict the baseline row and the overridden row with the same model."""
    row = panel.get(request.county, request.base_year)
    if row is None:
        raise UnknownCounty(request.county, request.base_year)
    spec = model.spec
    baseline = {name: float(row.value(name)) for name in spec.names}
    scenario = dict(baseline)
    for name, override in request.overrides.items():
        if name not in spec.names:
            raise UnknownCovariate(name)
        new_value = override.apply(baseline[name])
        if not math.isfinite(new_value):
            raise BoundViolation(f"{name} override produced a non-finite value")
        _bounds_check(name, new_value)
        scenario[name] = new_value

    extrapolated = []
    if spec.mins is not None and spec.maxs is not None:
        for k, name in enumerate(spec.names):
            if not spec.mins[k] <= scenario[name] <= spec.maxs[k]:
                extrapolated.append(name)

    baseline_aqi = predict(model, baseline)
    scenario_aqi = predict(model, scenario)
    return ScenarioResult(
        county=row.county,
        base_year=request.base_year,
        baseline_covariates=baseline,
        scenario_covariates=scenario,
        baseline_aqi=baseline_aqi,
        scenario_aqi=scenario_aqi,
        delta=scenario_aqi - baseline_aqi,
        extrapolation_flag=bool(extrapolated),
        extrapolated_covariates=tuple(extrapolated),
    )


def sweep(request: ScenarioRequest, covariate: str, values: Sequence[float],
          panel: "Panel", model: RegressionModel) -> list[ScenarioResult]:
    """One scenario per grid value, in the given order.

    The swept covariate's absolute value replaces any override for it in the
    template request; because the model is linear, predicted scores are affine
    in the swept value.
    """
    if not values:
        raise ValueError("empty sweep grid")
    if covariate not in model.spec.names:
        raise UnknownCovariate(covariate)
    results = []
    for v in values:
        overrides = dict(request.overrides)
        overrides[covariate] = Override(value=float(v))
        results.append(run_scenario(
            ScenarioRequest(county=request.county, base_year=request.base_year,
                            overrides=overrides, model_id=request.model_id),
            panel, model,
        ))
    return results
