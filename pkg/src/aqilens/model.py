"""Linear prediction of the composite air-quality score from adoption and
socioeconomic covariates.

Training is batch gradient descent on mean-squared-error loss over
standardized features, with a normal-equations solver as an independent
cross-check.  The descent loop: predictions from the current weights, residual
delta, gradient (2/n) * design^T @ delta, step by the learning rate; it stops
when the iteration cap is reached or the loss improvement between consecutive
iterations falls below the threshold.  The gradient carries a 1/n factor so
the learning rate is dataset-size independent, and weights start at zero,
which is immaterial for this convex loss.

An intercept is fitted by default (scores are not mean-zero) and features are
z-scored at fit time because the raw covariates span several orders of
magnitude; both choices are toggleable through FeatureSpec.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import TYPE_CHECKING, Mapping, Sequence

import numpy as np

from .errors import Diverged, MissingCovariate, TooFewRows, ZeroVariance
from .numerics import Mat, mat_vec, matmul, solve_spd

if TYPE_CHECKING:
    from .ingest import PanelRow

DEFAULT_FEATURES = ("total_afv", "population", "poverty_pct", "median_household_income")
TARGET = "aqi_score"


@dataclass(frozen=True)
class FeatureSpec:
    """Ordered covariates plus the standardization statistics captured at fit time."""

    names: tuple[str, ...] = DEFAULT_FEATURES
    include_bias: bool = True
    means: tuple[float, ...] | None = None
    stds: tuple[float, ...] | None = None
    mins: tuple[float, ...] | None = None
    maxs: tuple[float, ...] | None = None

    def __post_init__(self):
        if len(set(self.names)) != len(self.names):
            raise ValueError("duplicate feature names")
        if not self.names:
            raise ValueError("need at least one feature")

    @property
    def fitted(self) -> bool:
        return self.means is not None


@dataclass(frozen=True)
class TrainingConfig:
    learning_rate: float = 0.01
    max_iterations: int = 10000
    convergence_threshold: float = 1e-9
    seed: int = 42

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.convergence_threshold <= 0:
            raise ValueError("convergence_threshold must be positive")


@dataclass(frozen=True)
class RegressionModel:
    feature_weights: tuple[float, ...]  # one per feature, standardized space
    bias: float | None
    spec: FeatureSpec
    history: tuple[float, ...]  # per-iteration MSE loss
    converged_at: int | None
    fitted_by: str  # "gradient_descent" | "normal_equations"

    @property
    def weights(self) -> tuple[float, ...]:
        """All fitted weights, bias last when present."""
        return self.feature_weights + ((self.bias,) if self.bias is not None else ())


@dataclass(frozen=True)
class EvalRow:
    county: str
    year: int
    actual: float
    predicted: float


@dataclass(frozen=True)
class EvalReport:
    r2: float | None  # None when the test targets are constant
    mse: float
    rows: tuple[EvalRow, ...]


# ------------------------------------------------------------------- splits

def split_train_test(rows: Sequence["PanelRow"], fraction: float, seed: int):
    """Seeded uniform shuffle, then prefix split with round(fraction * N) rows
    for training (clamped so both sides are non-empty)."""
    n = len(rows)
    if n < 2:
        raise TooFewRows(f"cannot split {n} rows")
    if not 0.0 < fraction < 1.0:
        raise ValueError("fraction must be in (0, 1)")
    perm = np.random.RandomState(seed).permutation(n)
    k = min(max(int(round(fraction * n)), 1), n - 1)
    train = [rows[i] for i in perm[:k]]
    test = [rows[i] for i in perm[k:]]
    return train, test


def split_temporal(rows: Sequence["PanelRow"], cutoff_year: int):
    """Train on years <= cutoff, test on later years."""
    train = [r for r in rows if r.year <= cutoff_year]
    test = [r for r in rows if r.year > cutoff_year]
    if not train or not test:
        raise TooFewRows(f"temporal cutoff {cutoff_year} leaves an empty side")
    return train, test


# ------------------------------------------------------------------ fitting

def _row_value(row, name: str) -> float:
    try:
        v = row.value(name) if hasattr(row, "value") else getattr(row, name)
    except (KeyError, AttributeError):
        raise MissingCovariate(name) from None
    if v is None or not math.isfinite(float(v)):
        raise MissingCovariate(name, f"county {getattr(row, 'county', '?')}")
    return float(v)


def _design(rows: Sequence["PanelRow"], spec: FeatureSpec):
    if not rows:
        raise TooFewRows("no training rows")
    x = np.array([[_row_value(r, name) for name in spec.names] for r in rows])
    y = np.array([_row_value(r, TARGET) for r in rows])
    return x, y


def _standardize(x: np.ndarray, names: Sequence[str]):
    means = x.mean(axis=0)
    stds = x.std(axis=0, ddof=1) if x.shape[0] > 1 else np.zeros(x.shape[1])
    for j, name in enumerate(names):
        if stds[j] == 0.0:
            raise ZeroVariance(name)
    return (x - means) / stds, means, stds


def _fitted_spec(spec: FeatureSpec, x: np.ndarray, means, stds) -> FeatureSpec:
    return replace(
        spec,
        means=tuple(float(v) for v in means),
        stds=tuple(float(v) for v in stds),
        mins=tuple(float(v) for v in x.min(axis=0)),
        maxs=tuple(float(v) for v in x.max(axis=0)),
    )


def mse_loss(design: np.ndarray, y: np.ndarray, w: np.ndarray) -> float:
    delta = design @ w - y
    return float(delta @ delta) / len(y)


def mse_gradient(design: np.ndarray, y: np.ndarray, w: np.ndarray) -> np.ndarray:
    delta = design @ w - y
    return (2.0 / len(y)) * (design.T @ delta)


def fit_gd_arrays(x: np.ndarray, y: np.ndarray, names: Sequence[str],
                  cfg: TrainingConfig, include_bias: bool = True) -> RegressionModel:
    """Gradient-descent fit on a raw feature matrix; the panel-facing
    ``fit_gd`` delegates here."""
    spec = FeatureSpec(names=tuple(names), include_bias=include_bias)
    z, means, stds = _standardize(x, spec.names)
    design = np.hstack([z, np.ones((z.shape[0], 1))]) if include_bias else z
    n, d = design.shape

    w = np.zeros(d)
    history: list[float] = []
    converged_at = None
    prev_loss = math.inf
    for i in range(1, cfg.max_iterations + 1):
        delta = design @ w - y
        loss = float(delta @ delta) / n
        if not math.isfinite(loss):
            raise Diverged(i)
        history.append(loss)
        grad = (2.0 / n) * (design.T @ delta)
        w = w - cfg.learning_rate * grad
        # converged only when loss stopped improving; a rising loss is not
        # convergence, it is a divergent step that the finiteness check above
        # will eventually catch
        if 0.0 <= prev_loss - loss < cfg.convergence_threshold:
            converged_at = i
            break
        prev_loss = loss

    return RegressionModel(
        feature_weights=tuple(float(v) for v in w[:len(spec.names)]),
        bias=float(w[-1]) if include_bias else None,
        spec=_fitted_spec(spec, x, means, stds),
        history=tuple(history),
        converged_at=converged_at,
        fitted_by="gradient_descent",
    )


def fit_closed_form_arrays(x: np.ndarray, y: np.ndarray, names: Sequence[str],
                           include_bias: bool = True) -> RegressionModel:
    """Normal-equations fit (design^T design) w = design^T y, solved by the
    in-repo Cholesky routine; serves as the oracle for the descent loop."""
    spec = FeatureSpec(names=tuple(names), include_bias=include_bias)
    z, means, stds = _standardize(x, spec.names)
    design = np.hstack([z, np.ones((z.shape[0], 1))]) if include_bias else z
    dm = Mat.from_array(design)
    gram = matmul(dm.transpose(), dm)
    rhs = mat_vec(dm.transpose(), [float(v) for v in y])
    w = solve_spd(gram, rhs)
    return RegressionModel(
        feature_weights=tuple(w[:len(spec.names)]),
        bias=w[-1] if include_bias else None,
        spec=_fitted_spec(spec, x, means, stds),
        history=(),
        converged_at=None,
        fitted_by="normal_equations",
    )


def fit_gd(train: Sequence["PanelRow"], spec: FeatureSpec,
           cfg: TrainingConfig) -> RegressionModel:
    x, y = _design(train, spec)
    return fit_gd_arrays(x, y, spec.names, cfg, include_bias=spec.include_bias)


def fit_closed_form(train: Sequence["PanelRow"], spec: FeatureSpec) -> RegressionModel:
    x, y = _design(train, spec)
    return fit_closed_form_arrays(x, y, spec.names, include_bias=spec.include_bias)


# --------------------------------------------------------------- prediction

def predict(model: RegressionModel, covariates: Mapping[str, float] | "PanelRow") -> float:
    """Standardized inner product plus bias for one observation."""
    spec = model.spec
    if not spec.fitted:
        raise MissingCovariate("standardization statistics", "model not fitted")
    s = 0.0
    for k, name in enumerate(spec.names):
        if isinstance(covariates, Mapping):
            if name not in covariates:
                raise MissingCovariate(name)
            v = covariates[name]
            if v is None or not math.isfinite(float(v)):
                raise MissingCovariate(name)
            v = float(v)
        else:
            v = _row_value(covariates, name)
        s += model.feature_weights[k] * (v - spec.means[k]) / spec.stds[k]
    if model.bias is not None:
        s += model.bias
    return s


def metrics_from_pairs(pairs: Sequence[tuple[float, float]]):
    """(r2, mse) over (actual, predicted) pairs; r2 is None when the actuals
    are constant.  mse is exactly the mean of squared residuals."""
    if not pairs:
        raise TooFewRows("no evaluation pairs")
    n = len(pairs)
    mse = sum((a - p) ** 2 for a, p in pairs) / n
    mean_actual = sum(a for a, _ in pairs) / n
    ss_tot = sum((a - mean_actual) ** 2 for a, _ in pairs)
    if ss_tot == 0.0:
        return None, mse
    ss_res = sum((a - p) ** 2 for a, p in pairs)
    return 1.0 - ss_res / ss_tot, mse


def evaluate(model: RegressionModel, test: Sequence["PanelRow"]) -> EvalReport:
    """Held-out metrics; R^2 is computed about the test-set mean and can be
    negative for bad models."""
    if not test:
        raise TooFewRows("empty test set")
    rows = tuple(
        EvalRow(county=r.county, year=r.year,
                actual=_row_value(r, TARGET), predicted=predict(model, r))
        for r in test
    )
    r2, mse = metrics_from_pairs([(e.actual, e.predicted) for e in rows])
    return EvalReport(r2=r2, mse=mse, rows=rows)
