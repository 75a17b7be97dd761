import numpy as np
import pytest

from aqilens import aqi_pca
from aqilens.errors import ConstantPollutant, TooFewRows, UnfittedModel
from aqilens.ingest import POLLUTANTS
from aqilens.persist import load_aqi_model, save_aqi_model
from conftest import make_panel, make_row


def pollutant_panel(matrix, county_prefix="C"):
    """One row per 5-vector of pollutant readings."""
    rows = []
    for i, values in enumerate(matrix):
        kw = dict(zip(POLLUTANTS, (float(v) for v in values)))
        rows.append(make_row(f"{county_prefix}{i:03d}", 2020 + i % 3, **kw))
    return make_panel(rows)


def latent_panel(latent, bases=(8.0, 40.0, 18.0, 28.0, 3.2),
                 sens=(2.0, 6.0, 3.5, 5.0, 0.5)):
    """All five pollutants exactly affine in one latent level (rank-1 data)."""
    return pollutant_panel([[b - s * lv for b, s in zip(bases, sens)] for lv in latent])


class TestFit:
    def test_collinear_pollutants_rank_one(self):
        panel = latent_panel([0.1, 0.4, -0.2, 0.8, -0.5])
        model = aqi_pca.fit_aqi_model(panel)
        ratios = aqi_pca.explained_variance(model)
        assert ratios[0] == pytest.approx(1.0, abs=1e-9)
        assert max(ratios[1:]) < 1e-9

    def test_isotropic_limit(self):
        rng = np.random.RandomState(0)
        panel = pollutant_panel(10.0 + rng.randn(4000, 5))
        model = aqi_pca.fit_aqi_model(panel)
        ratios = aqi_pca.explained_variance(model)
        for r in ratios:
            assert r == pytest.approx(0.2, abs=0.05)

    def test_clean_cluster_scores_higher(self):
        rng = np.random.RandomState(1)
        clean = 5.0 + 0.1 * rng.rand(10, 5)
        dirty = 9.0 + 0.1 * rng.rand(10, 5)
        panel = pollutant_panel(np.vstack([clean, dirty]))
        model = aqi_pca.fit_aqi_model(panel)
        scores, _ = aqi_pca.score_panel(model, panel)
        assert min(scores[:10]) > max(scores[10:])

    def test_constant_pollutant(self):
        rows = [make_row("A", 2020, so2=3.0), make_row("B", 2021, so2=3.0)]
        with pytest.raises(ConstantPollutant) as exc:
            aqi_pca.fit_aqi_model(make_panel(rows))
        assert exc.value.name == "so2"

    def test_too_few_rows(self):
        with pytest.raises(TooFewRows):
            aqi_pca.fit_aqi_model(make_panel([make_row("A", 2020)]))

    def test_refit_is_identical(self):
        rng = np.random.RandomState(2)
        panel = pollutant_panel(10 + rng.randn(40, 5))
        m1 = aqi_pca.fit_aqi_model(panel)
        m2 = aqi_pca.fit_aqi_model(panel)
        assert m1 == m2


class TestScore:
    def test_training_minmax_exact(self):
        rng = np.random.RandomState(3)
        panel = pollutant_panel(10 + rng.randn(30, 5))
        model = aqi_pca.fit_aqi_model(panel)
        scores, clamped = aqi_pca.score_panel(model, panel)
        assert min(scores) == 0.0
        assert max(scores) == 1.0
        assert all(0.0 <= s <= 1.0 for s in scores)
        assert clamped == 0

    def test_orientation_anticorrelates_with_pollution(self):
        rng = np.random.RandomState(4)
        x = 10 + rng.randn(50, 5)
        panel = pollutant_panel(x)
        model = aqi_pca.fit_aqi_model(panel)
        scores, _ = aqi_pca.score_panel(model, panel)
        z = (x - np.array(model.pollutant_means)) / np.array(model.pollutant_stds)
        mean_level = z.mean(axis=1)
        corr = np.corrcoef(scores, mean_level)[0, 1]
        assert corr <= 0.0

    def test_published_score_range_is_valid(self):
        # the published fixture scores sit in [0.444, 0.707], inside [0, 1]
        from aqilens.reference import EVAL_PAIRS
        actuals = [p.actual for p in EVAL_PAIRS]
        assert min(actuals) == 0.444
        assert max(actuals) == 0.707
        assert all(0.0 <= a <= 1.0 for a in actuals)

    def test_clamping_far_out_of_range(self):
        panel = latent_panel([0.0, 0.1, 0.2, 0.3])
        model = aqi_pca.fit_aqi_model(panel)
        # pollutant levels far dirtier than anything trained on
        far_dirty = [m + 50 * s for m, s in zip(model.pollutant_means, model.pollutant_stds)]
        res = aqi_pca.score_detail(model, far_dirty)
        assert res.clamped
        assert res.value == aqi_pca.CLAMP_LO
        far_clean = [m - 50 * s for m, s in zip(model.pollutant_means, model.pollutant_stds)]
        res = aqi_pca.score_detail(model, far_clean)
        assert res.clamped
        assert res.value == aqi_pca.CLAMP_HI

    def test_mild_extrapolation_not_clamped(self):
        panel = latent_panel([0.0, 0.25, 0.5, 0.75, 1.0])
        model = aqi_pca.fit_aqi_model(panel)
        row = latent_panel([1.05]).rows[0]
        res = aqi_pca.score_detail(model, row.pollutants)
        assert not res.clamped
        assert 1.0 < res.value < 1.25

    def test_affine_invariance_under_refit(self):
        rng = np.random.RandomState(5)
        x = 10 + rng.randn(25, 5)
        scales = np.array([2.0, 0.5, 3.0, 1.5, 10.0])
        shifts = np.array([1.0, -4.0, 0.0, 7.0, 100.0])
        m1 = aqi_pca.fit_aqi_model(pollutant_panel(x))
        m2 = aqi_pca.fit_aqi_model(pollutant_panel(x * scales + shifts))
        s1, _ = aqi_pca.score_panel(m1, pollutant_panel(x))
        s2, _ = aqi_pca.score_panel(m2, pollutant_panel(x * scales + shifts))
        assert s1 == pytest.approx(s2, abs=1e-9)

    def test_unfitted_model_rejected(self):
        with pytest.raises(UnfittedModel):
            aqi_pca.aqi_score(None, [1, 2, 3, 4, 5])

    def test_explained_variance_sums_to_one(self):
        rng = np.random.RandomState(6)
        model = aqi_pca.fit_aqi_model(pollutant_panel(10 + rng.randn(20, 5)))
        ratios = aqi_pca.explained_variance(model)
        assert sum(ratios) == pytest.approx(1.0, abs=1e-9)
        assert all(r >= 0 for r in ratios)
        assert all(ratios[i] >= ratios[i + 1] for i in range(4))


class TestPersistence:
    def test_roundtrip_scoring_bitwise(self, tmp_path):
        rng = np.random.RandomState(7)
        x = 10 + rng.randn(30, 5)
        panel = pollutant_panel(x)
        model = aqi_pca.fit_aqi_model(panel)
        path = tmp_path / "aqi_model.json"
        save_aqi_model(model, path)
        loaded = load_aqi_model(path)
        for row in panel.rows:
            assert aqi_pca.aqi_score(loaded, row.pollutants) == \
                   aqi_pca.aqi_score(model, row.pollutants)

    def test_deterministic_file_bytes(self, tmp_path):
        panel = latent_panel([0.1, 0.5, 0.9, 0.3])
        model = aqi_pca.fit_aqi_model(panel)
        save_aqi_model(model, tmp_path / "a.json")
        save_aqi_model(model, tmp_path / "b.json")
        assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()

    def test_corrupt_file_rejected(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("{}")
        with pytest.raises(UnfittedModel):
            load_aqi_model(p)
