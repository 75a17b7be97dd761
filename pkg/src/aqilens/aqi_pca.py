"""Composite air-quality score: collapse the five pollutant series to one
number in [0, 1] via standardization and principal component analysis.

The score keeps only the leading component of the standardized pollutant
covariance and is oriented so that HIGHER means CLEANER air (the oriented
projection anti-correlates with the mean standardized pollutant level).  Note
this is the opposite direction of the conventional regulatory AQI, where
higher numbers mean worse air.  Min-max calibration over the fitted rows maps
the projection onto [0, 1]; the calibration constants live in the model so
later observations score on the same scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, NamedTuple, Sequence

from .errors import ConstantPollutant, TooFewRows, UnfittedModel
from .ingest import POLLUTANTS
from .numerics import EigenResult, Mat, eigen_symmetric

if TYPE_CHECKING:
    from .ingest import Panel

# Scores for inputs outside the calibration range are clamped to this window.
CLAMP_LO = -0.25
CLAMP_HI = 1.25

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class AqiPcaModel:
    pollutant_names: tuple[str, ...]
    pollutant_means: tuple[float, ...]
    pollutant_stds: tuple[float, ...]
    components: EigenResult
    orientation: int  # +1 or -1
    score_min: float
    score_max: float
    n_rows: int
    schema_version: int = SCHEMA_VERSION

    def validate(self) -> None:
        if (len(self.pollutant_means) != len(self.pollutant_names)
                or len(self.pollutant_stds) != len(self.pollutant_names)
                or not self.pollutant_names):
            raise UnfittedModel("incomplete pollutant statistics")
        if any(s <= 0 for s in self.pollutant_stds):
            raise UnfittedModel("non-positive pollutant standard deviation")
        if self.orientation not in (-1, 1):
            raise UnfittedModel(f"orientation must be +1 or -1, got {self.orientation}")
        if not self.score_min < self.score_max:
            raise UnfittedModel("degenerate score calibration range")
        if self.components.vectors.rows != len(self.pollutant_names):
            raise UnfittedModel("component dimension mismatch")


class ScoreResult(NamedTuple):
    value: float
    clamped: bool


def _require_fitted(model: "AqiPcaModel | None") -> AqiPcaModel:
    if model is None:
        raise UnfittedModel("no fitted model supplied")
    model.validate()
    return model


def _oriented_projection(means: Sequence[float], stds: Sequence[float],
                         pc1: Sequence[float], orientation: int,
                         pollutants: Sequence[float]) -> float:
    # Plain left-to-right accumulation; fit and score share this exact
    # arithmetic so re-scoring a training row is bit-identical.
    s = 0.0
    for j in range(len(pc1)):
        s += (pollutants[j] - means[j]) / stds[j] * pc1[j]
    return orientation * s


def fit_aqi_model(panel: "Panel") -> AqiPcaModel:
    """Fit standardization, principal components, orientation, and the
    min-max score calibration on the panel's pollutant columns."""
    n = len(panel.rows)
    if n < 2:
        raise TooFewRows(f"need at least 2 rows to fit, got {n}")
    cols = [[getattr(row, p) for row in panel.rows] for p in POLLUTANTS]
    means = []
    stds = []
    for name, col in zip(POLLUTANTS, cols):
        m = sum(col) / n
        var = sum((v - m) ** 2 for v in col) / (n - 1)
        if var == 0.0:
            raise ConstantPollutant(name)
        means.append(m)
        stds.append(math.sqrt(var))

    k = len(POLLUTANTS)
    z = [[(cols[j][i] - means[j]) / stds[j] for j in range(k)] for i in range(n)]
    cov = [[sum(z[i][a] * z[i][b] for i in range(n)) / (n - 1) for b in range(k)]
           for a in range(k)]
    components = eigen_symmetric(Mat.from_rows(cov))
    pc1 = components.vectors.col(0)

    raw = [sum(z[i][j] * pc1[j] for j in range(k)) for i in range(n)]
    mean_level = [sum(z[i]) / k for i in range(n)]
    mr = sum(raw) / n
    ml = sum(mean_level) / n
    cov_rm = sum((raw[i] - mr) * (mean_level[i] - ml) for i in range(n))
    orientation = -1 if cov_rm > 0 else 1

    scores = [_oriented_projection(means, stds, pc1, orientation, row.pollutants)
              for row in panel.rows]
    score_min, score_max = min(scores), max(scores)
    if not score_min < score_max:
        raise TooFewRows("projected scores are constant; cannot calibrate")

    model = AqiPcaModel(
        pollutant_names=POLLUTANTS,
        pollutant_means=tuple(means),
        pollutant_stds=tuple(stds),
        components=components,
        orientation=orientation,
        score_min=score_min,
        score_max=score_max,
        n_rows=n,
    )
    model.validate()
    return model


def score_detail(model: "AqiPcaModel | None", pollutants: Sequence[float]) -> ScoreResult:
    """Score one pollutant vector; reports whether clamping was applied."""
    m = _require_fitted(model)
    if len(pollutants) != len(m.pollutant_names):
        raise ValueError(f"expected {len(m.pollutant_names)} pollutant values")
    s = _oriented_projection(m.pollutant_means, m.pollutant_stds,
                             m.components.vectors.col(0), m.orientation, pollutants)
    t = (s - m.score_min) / (m.score_max - m.score_min)
    if t < CLAMP_LO:
        return ScoreResult(CLAMP_LO, True)
    if t > CLAMP_HI:
        return ScoreResult(CLAMP_HI, True)
    return ScoreResult(t, False)


def aqi_score(model: "AqiPcaModel | None", pollutants: Sequence[float]) -> float:
    return score_detail(model, pollutants).value


def explained_variance(model: "AqiPcaModel | None") -> tuple[float, ...]:
    """Per-component share of total variance: non-negative, descending, sums to 1."""
    m = _require_fitted(model)
    lams = [max(v, 0.0) for v in m.components.values]  # tiny negatives are fp noise
    total = sum(lams)
    if total <= 0.0:
        raise UnfittedModel("no variance captured by components")
    return tuple(v / total for v in lams)


def score_panel(model: "AqiPcaModel | None", panel: "Panel") -> tuple[list[float], int]:
    """Score every panel row; returns (scores, number of clamped rows)."""
    m = _require_fitted(model)
    scores = []
    clamped = 0
    for row in panel.rows:
        res = score_detail(m, row.pollutants)
        scores.append(res.value)
        clamped += res.clamped
    return scores, clamped
