"""Pydantic request models for the HTTP API.

These mirror the scenario module's request types one-to-one; responses are
serialized through the canonical JSON writer instead of pydantic so bodies
are byte-stable.
"""

from __future__ import annotations

from pydantic import BaseModel, ConfigDict, model_validator

from ..scenario import Override, ScenarioRequest


class OverridePayload(BaseModel):
    model_config = ConfigDict(extra="forbid")

    value: float | None = None
    multiply: float | None = None

    @model_validator(mode="after")
    def _exactly_one(self):
        if (self.value is None) == (self.multiply is None):
            raise ValueError("provide exactly one of 'value' or 'multiply'")
        return self

    def to_domain(self) -> Override:
        return Override(value=self.value, multiply=self.multiply)


class ScenarioRequestPayload(BaseModel):
    model_config = ConfigDict(extra="forbid")

    county: str
    base_year: int
    overrides: dict[str, OverridePayload] = {}
    model_id: str | None = None

    def to_domain(self) -> ScenarioRequest:
        return ScenarioRequest(
            county=self.county,
            base_year=self.base_year,
            overrides={k: v.to_domain() for k, v in self.overrides.items()},
            model_id=self.model_id,
        )


class SweepRequestPayload(BaseModel):
    model_config = ConfigDict(extra="forbid")

    county: str
    base_year: int
    covariate: str
    values: list[float]
    model_id: str | None = None
