import numpy as np
import pytest

from aqilens import model as M
from aqilens import scenario
from aqilens.errors import BoundViolation, UnknownCounty, UnknownCovariate
from conftest import make_panel, make_row


@pytest.fixture()
def fitted_setup():
    """Small scored panel and a model whose total_afv weight is positive."""
    rng = np.random.RandomState(0)
    rows = []
    for i in range(24):
        afv = 500 + 400 * i
        income = 50_000.0 + 2_000.0 * ((i * 7) % 24)
        score = 0.2 + 0.00002 * afv + 0.000002 * income + 0.002 * rng.randn()
        rows.append(make_row(f"C{i:02d}", 2016 + i % 6, total_afv=afv,
                             median_household_income=income, aqi_score=score))
    panel = make_panel(rows)
    spec = M.FeatureSpec(names=("total_afv", "median_household_income"))
    fitted = M.fit_closed_form(list(panel.rows), spec)
    assert fitted.feature_weights[0] > 0
    return panel, fitted


class TestRunScenario:
    def test_empty_overrides_identity(self, fitted_setup):
        panel, fitted = fitted_setup
        req = scenario.ScenarioRequest(county="C03", base_year=2019)
        res = scenario.run_scenario(req, panel, fitted)
        assert res.delta == 0.0
        assert res.scenario_covariates == res.baseline_covariates
        assert res.baseline_aqi == res.scenario_aqi
        assert not res.extrapolation_flag

    def test_doubling_afv_with_positive_weight(self, fitted_setup):
        panel, fitted = fitted_setup
        req = scenario.ScenarioRequest(
            county="C03", base_year=2019,
            overrides={"total_afv": scenario.Override(multiply=2.0)})
        res = scenario.run_scenario(req, panel, fitted)
        assert res.delta > 0
        assert res.scenario_covariates["total_afv"] == \
               2.0 * res.baseline_covariates["total_afv"]

    def test_extrapolation_flag_beyond_training_max(self, fitted_setup):
        panel, fitted = fitted_setup
        req = scenario.ScenarioRequest(
            county="C03", base_year=2019,
            overrides={"total_afv": scenario.Override(multiply=10.0)})
        res = scenario.run_scenario(req, panel, fitted)
        assert res.extrapolation_flag
        assert "total_afv" in res.extrapolated_covariates
        assert res.scenario_covariates["total_afv"] > fitted.spec.maxs[0]

    def test_within_range_not_flagged(self, fitted_setup):
        panel, fitted = fitted_setup
        req = scenario.ScenarioRequest(
            county="C03", base_year=2019,
            overrides={"total_afv": scenario.Override(value=2000.0)})
        res = scenario.run_scenario(req, panel, fitted)
        assert not res.extrapolation_flag

    def test_unknown_county(self, fitted_setup):
        panel, fitted = fitted_setup
        with pytest.raises(UnknownCounty):
            scenario.run_scenario(
                scenario.ScenarioRequest(county="Nowhere", base_year=2019),
                panel, fitted)
        # present county, absent year
        with pytest.raises(UnknownCounty):
            scenario.run_scenario(
                scenario.ScenarioRequest(county="C03", base_year=1999),
                panel, fitted)

    def test_unknown_covariate(self, fitted_setup):
        panel, fitted = fitted_setup
        req = scenario.ScenarioRequest(
            county="C03", base_year=2019,
            overrides={"poverty_pct": scenario.Override(value=0.5)})
        with pytest.raises(UnknownCovariate):
            scenario.run_scenario(req, panel, fitted)

    def test_bound_violation_negative_count(self, fitted_setup):
        panel, fitted = fitted_setup
        req = scenario.ScenarioRequest(
            county="C03", base_year=2019,
            overrides={"total_afv": scenario.Override(value=-5.0)})
        with pytest.raises(BoundViolation):
            scenario.run_scenario(req, panel, fitted)

    def test_delta_identity(self, fitted_setup):
        panel, fitted = fitted_setup
        req = scenario.ScenarioRequest(
            county="C10", base_year=2020,
            overrides={"median_household_income": scenario.Override(multiply=1.3)})
        res = scenario.run_scenario(req, panel, fitted)
        assert res.delta == res.scenario_aqi - res.baseline_aqi

    def test_pure_function(self, fitted_setup):
        panel, fitted = fitted_setup
        req = scenario.ScenarioRequest(
            county="C10", base_year=2020,
            overrides={"total_afv": scenario.Override(multiply=1.5)})
        a = scenario.run_scenario(req, panel, fitted)
        b = scenario.run_scenario(req, panel, fitted)
        assert a == b

    def test_disclaimer_attached(self, fitted_setup):
        panel, fitted = fitted_setup
        res = scenario.run_scenario(
            scenario.ScenarioRequest(county="C01", base_year=2017), panel, fitted)
        assert res.disclaimer == scenario.DISCLAIMER
        assert "not causal" in res.disclaimer


class TestOverride:
    def test_exactly_one_required(self):
        with pytest.raises(ValueError):
            scenario.Override()
        with pytest.raises(ValueError):
            scenario.Override(value=1.0, multiply=2.0)

    def test_apply(self):
        assert scenario.Override(value=9.0).apply(4.0) == 9.0
        assert scenario.Override(multiply=2.5).apply(4.0) == 10.0


class TestSweep:
    def test_single_point_grid(self, fitted_setup):
        panel, fitted = fitted_setup
        row = panel.get("C03", 2019)
        req = scenario.ScenarioRequest(county="C03", base_year=2019)
        results = scenario.sweep(req, "total_afv", [float(row.total_afv)], panel, fitted)
        assert len(results) == 1
        assert results[0].delta == 0.0

    def test_equally_spaced_grid_gives_affine_outputs(self, fitted_setup):
        panel, fitted = fitted_setup
        req = scenario.ScenarioRequest(county="C03", base_year=2019)
        results = scenario.sweep(req, "total_afv", [1000.0, 2000.0, 3000.0],
                                 panel, fitted)
        scores = [r.scenario_aqi for r in results]
        assert scores[2] - scores[1] == pytest.approx(scores[1] - scores[0], abs=1e-12)

    def test_monotone_for_positive_weight(self, fitted_setup):
        panel, fitted = fitted_setup
        base = panel.get("C03", 2019).total_afv
        grid = list(np.linspace(0.0, 2.0 * base, 21))
        req = scenario.ScenarioRequest(county="C03", base_year=2019)
        results = scenario.sweep(req, "total_afv", grid, panel, fitted)
        scores = [r.scenario_aqi for r in results]
        assert len(results) == 21
        assert all(scores[i] < scores[i + 1] for i in range(20))

    def test_second_differences_vanish(self, fitted_setup):
        panel, fitted = fitted_setup
        grid = [500.0 + 333.0 * k for k in range(9)]
        req = scenario.ScenarioRequest(county="C05", base_year=2021)
        results = scenario.sweep(req, "total_afv", grid, panel, fitted)
        scores = [r.scenario_aqi for r in results]
        for k in range(len(scores) - 2):
            assert abs(scores[k + 2] - 2 * scores[k + 1] + scores[k]) < 1e-9

    def test_empty_grid_rejected(self, fitted_setup):
        panel, fitted = fitted_setup
        req = scenario.ScenarioRequest(county="C03", base_year=2019)
        with pytest.raises(ValueError):
            scenario.sweep(req, "total_afv", [], panel, fitted)

    def test_unknown_covariate(self, fitted_setup):
        panel, fitted = fitted_setup
        req = scenario.ScenarioRequest(county="C03", base_year=2019)
        with pytest.raises(UnknownCovariate):
            scenario.sweep(req, "bev_count", [1.0], panel, fitted)

    def test_bound_violation_propagates(self, fitted_setup):
        panel, fitted = fitted_setup
        req = scenario.ScenarioRequest(county="C03", base_year=2019)
        with pytest.raises(BoundViolation):
            scenario.sweep(req, "total_afv", [-1.0], panel, fitted)
