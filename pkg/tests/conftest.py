"""Shared fixtures: hand-built panels and a session-scoped artifact directory
produced by running the real CLI pipeline on the bundled synthetic dataset."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from aqilens import cli
from aqilens.ingest import Panel, PanelRow


def make_row(county: str, year: int, **overrides) -> PanelRow:
    base = dict(
        county=county, year=year,
        bev_count=100, phev_count=50, nev_count=10, hev_count=200,
        pev_count=150, non_pev_count=210, total_afv=360,
        road_mileage=500.0, vmt=1_000_000.0,
        population=100_000, population_change=500.0,
        education_pct=0.3, unemployment_rate=0.05,
        poverty_pct=0.10, poverty_lower=0.08, poverty_upper=0.12,
        median_household_income=70_000.0,
        so2=5.0, o3=30.0, no2=15.0, pm25=20.0, co=2.0,
        aqi_score=None,
    )
    base.update(overrides)
    return PanelRow(**base)


def make_panel(rows) -> Panel:
    return Panel(rows=tuple(rows))


@pytest.fixture(scope="session")
def pipeline_dir(tmp_path_factory) -> Path:
    """Artifacts of the full CLI pipeline on the synthetic dataset (seed 123)."""
    out = tmp_path_factory.mktemp("pipeline")
    run_pipeline(out, seed=123)
    return out


def run_pipeline(out: Path, seed: int = 123) -> None:
    o = str(out)
    assert cli.main(["synth", "--out", o, "--seed", str(seed)]) == 0
    assert cli.main(["ingest", "--out", o, "--afv", f"{o}/afv.csv",
                     "--socio", f"{o}/socio.csv", "--aqi", f"{o}/aqi.csv"]) == 0
    assert cli.main(["score", "--out", o]) == 0
    assert cli.main(["correlate", "--out", o, "--with-aqi"]) == 0
    assert cli.main(["rank", "--out", o]) == 0
    assert cli.main(["train", "--out", o]) == 0
    assert cli.main(["evaluate", "--out", o]) == 0
    assert cli.main(["predict", "--out", o]) == 0
    assert cli.main(["report", "--out", o, "--eval", f"{o}/eval.csv",
                     "--afv", f"{o}/afv.csv"]) == 0


@pytest.fixture(scope="session")
def pipeline_truth(pipeline_dir) -> dict:
    return json.loads((pipeline_dir / "truth.json").read_text())
