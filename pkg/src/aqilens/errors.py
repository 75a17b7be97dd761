"""Exception hierarchy shared by all aqilens modules.

Every error carries a module-qualified ``code`` (e.g. ``ingest.missing_column``)
so CLI and service layers can report failures in a structured way.
"""

from __future__ import annotations


class AqilensError(Exception):
    """Base class for all domain errors."""

    code = "aqilens.error"


# ---------------------------------------------------------------- ingest

class IngestError(AqilensError):
    code = "ingest.error"


class MissingColumn(IngestError):
    code = "ingest.missing_column"

    def __init__(self, name: str, path: str = ""):
        self.name = name
        self.path = path
        super().__init__(f"missing required column {name!r}" + (f" in {path}" if path else ""))


class MalformedRow(IngestError):
    code = "ingest.malformed_row"

    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


class NegativeCount(IngestError):
    code = "ingest.negative_count"

    def __init__(self, line: int, field: str = "count"):
        self.line = line
        self.field = field
        super().__init__(f"line {line}: negative {field}")


class BoundViolation(AqilensError):
    """Ordered-bound or domain-bound violation (poverty interval, override range)."""

    code = "aqilens.bound_violation"


class NoPollutantData(IngestError):
    code = "ingest.no_pollutant_data"

    def __init__(self, county: str, year: int, pollutant: str):
        self.county = county
        self.year = year
        self.pollutant = pollutant
        super().__init__(f"no {pollutant} readings for ({county}, {year})")


class EmptyPanel(IngestError):
    code = "ingest.empty_panel"


# -------------------------------------------------------------- numerics

class NumericsError(AqilensError):
    code = "numerics.error"


class DimensionMismatch(NumericsError):
    code = "numerics.dimension_mismatch"


class NotSymmetric(NumericsError):
    code = "numerics.not_symmetric"


class NoConvergence(NumericsError):
    code = "numerics.no_convergence"


class NotPositiveDefinite(NumericsError):
    code = "numerics.not_positive_definite"


# ----------------------------------------------------------------- stats

class StatsError(AqilensError):
    code = "stats.error"


class LengthMismatch(StatsError):
    code = "stats.length_mismatch"


class ZeroVariance(StatsError):
    code = "stats.zero_variance"

    def __init__(self, name: str = ""):
        self.name = name
        super().__init__(f"zero variance in {name!r}" if name else "zero variance")


class CountyMismatch(StatsError):
    code = "stats.county_mismatch"


class InsufficientPeriods(StatsError):
    code = "stats.insufficient_periods"


# --------------------------------------------------------------- aqi_pca

class PcaError(AqilensError):
    code = "aqi_pca.error"


class ConstantPollutant(PcaError):
    code = "aqi_pca.constant_pollutant"

    def __init__(self, name: str):
        self.name = name
        super().__init__(f"pollutant {name!r} is constant across rows")


class TooFewRows(AqilensError):
    code = "aqilens.too_few_rows"


class UnfittedModel(AqilensError):
    code = "aqilens.unfitted_model"


# ----------------------------------------------------------------- model

class ModelError(AqilensError):
    code = "model.error"


class MissingCovariate(ModelError):
    code = "model.missing_covariate"

    def __init__(self, name: str, where: str = ""):
        self.name = name
        super().__init__(f"missing covariate {name!r}" + (f" ({where})" if where else ""))


class Diverged(ModelError):
    code = "model.diverged"

    def __init__(self, iteration: int):
        self.iteration = iteration
        super().__init__(
            f"loss became non-finite at iteration {iteration}; lower the learning rate"
        )


# -------------------------------------------------------------- scenario

class ScenarioError(AqilensError):
    code = "scenario.error"


class UnknownCounty(ScenarioError):
    code = "scenario.unknown_county"

    def __init__(self, county: str, year: int | None = None):
        self.county = county
        self.year = year
        if year is None:
            super().__init__(f"unknown county {county!r}")
        else:
            super().__init__(f"no panel row for ({county!r}, {year})")


class UnknownCovariate(ScenarioError):
    code = "scenario.unknown_covariate"

    def __init__(self, name: str):
        self.name = name
        super().__init__(f"covariate {name!r} is not part of the fitted model")
