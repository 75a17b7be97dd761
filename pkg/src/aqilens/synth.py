"""Deterministic synthetic dataset generator.

Emits the three source CSVs for the 21 New Jersey counties over 2016-2021,
built from a known linear ground truth: a latent air-quality level is a fixed
linear map of the standardized model covariates plus Gaussian noise, and all
five pollutant series are exact affine functions of that latent level (so the
leading principal component recovers it, and min-max calibration maps it onto
[0, 1]).  The realized ground truth needed to check recovery is written next
to the CSVs as truth.json.

Values that ship as percentages are snapped to a 2-decimal grid and divided
by 100 with the same arithmetic the parser uses, so the generator's recorded
truth matches what the pipeline reads back exactly.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .model import DEFAULT_FEATURES
from .persist import dump_json
from .reference import COUNTY_BASELINES

YEARS = (2016, 2017, 2018, 2019, 2020, 2021)

# Weights of the latent clean-air level on standardized covariates: adoption
# and income help, population and poverty hurt.
TRUE_BETA = {
    "total_afv": 0.16,
    "population": -0.05,
    "poverty_pct": -0.08,
    "median_household_income": 0.12,
}

# Pollutant level = base - sensitivity * latent (cleaner air, lower readings).
POLLUTANT_BASE = {"so2": 8.0, "o3": 40.0, "no2": 18.0, "pm25": 28.0, "co": 3.2}
POLLUTANT_SENSITIVITY = {"so2": 2.0, "o3": 6.0, "no2": 3.5, "pm25": 5.0, "co": 0.5}

VEHICLE_SHARES = {"hev": 0.52, "bev": 0.26, "phev": 0.16, "nev": 0.06}


def _split_counts(total: int, rng: np.random.RandomState) -> dict[str, int]:
    """Integer per-type counts summing exactly to total (largest remainder)."""
    jitter = rng.uniform(0.9, 1.1, size=4)
    raw = np.array([VEHICLE_SHARES[t] for t in ("hev", "bev", "phev", "nev")]) * jitter
    raw = raw / raw.sum() * total
    floors = np.floor(raw).astype(int)
    short = total - int(floors.sum())
    order = np.argsort(-(raw - floors), kind="stable")
    for i in range(short):
        floors[order[i]] += 1
    return dict(zip(("hev", "bev", "phev", "nev"), (int(v) for v in floors)))


def generate(out_dir: str | Path, seed: int = 123, noise_sigma: float = 0.01) -> dict:
    """Write afv.csv, socio.csv, aqi.csv, and truth.json; returns the truth payload."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.RandomState(seed)

    counties = [b.county for b in COUNTY_BASELINES]
    pop_base = {b.county: b.population for b in COUNTY_BASELINES}
    afv_base = {b.county: b.total_afv for b in COUNTY_BASELINES}
    pop_growth = {c: rng.uniform(-0.004, 0.008) for c in counties}
    afv_growth = {c: rng.uniform(0.18, 0.38) for c in counties}
    road_miles = {c: round(float(rng.uniform(400.0, 2600.0)), 1) for c in counties}

    rows = []  # one dict per (county, year) with the exact values the parser will see
    for county in counties:
        # walk years so population_change is consistent
        pop_prev = None
        for j, year in enumerate(YEARS):
            population = int(round(pop_base[county] * (1.0 + pop_growth[county]) ** j))
            total_afv = int(round(afv_base[county] / (1.0 + afv_growth[county]) ** (len(YEARS) - 1 - j)))
            poverty_pct_cells = round(float(rng.uniform(5.0, 20.0)), 2)
            poverty_lo_cells = round(poverty_pct_cells - float(rng.uniform(0.5, 2.0)), 2)
            poverty_hi_cells = round(poverty_pct_cells + float(rng.uniform(0.5, 2.0)), 2)
            education_cells = round(float(rng.uniform(20.0, 55.0)), 2)
            unemployment_cells = round(float(rng.uniform(3.0, 11.0)), 2)
            income = round(float(rng.uniform(52000.0, 115000.0)), 2)
            rows.append({
                "county": county, "year": year,
                "population": population,
                "population_change": population - pop_prev if pop_prev is not None else 0,
                "total_afv": total_afv,
                "poverty_pct_cells": poverty_pct_cells,
                "poverty_lo_cells": poverty_lo_cells,
                "poverty_hi_cells": poverty_hi_cells,
                "education_cells": education_cells,
                "unemployment_cells": unemployment_cells,
                "median_household_income": income,
                "poverty_pct": poverty_pct_cells / 100.0,
                "vmt": round(population * float(rng.uniform(20.0, 30.0)), 1),
            })
            pop_prev = population

    # latent clean-air level from standardized covariates + noise
    feats = list(DEFAULT_FEATURES)
    x = np.array([[r[f] for f in feats] for r in rows], dtype=float)
    z = (x - x.mean(axis=0)) / x.std(axis=0, ddof=1)
    beta = np.array([TRUE_BETA[f] for f in feats])
    latent = z @ beta + rng.normal(0.0, noise_sigma, size=len(rows))
    for r, lv in zip(rows, latent):
        r["latent"] = float(lv)

    _write_afv_csv(out / "afv.csv", rows, road_miles, rng)
    _write_socio_csv(out / "socio.csv", rows)
    _write_aqi_csv(out / "aqi.csv", rows, counties)

    lat_min = float(latent.min())
    lat_max = float(latent.max())
    truth = {
        "seed": seed,
        "noise_sigma": noise_sigma,
        "features": feats,
        "beta": {f: TRUE_BETA[f] for f in feats},
        "latent_min": lat_min,
        "latent_max": lat_max,
        "expected_standardized_weights": {
            f: TRUE_BETA[f] / (lat_max - lat_min) for f in feats
        },
        "n_rows": len(rows),
    }
    dump_json(truth, out / "truth.json")
    return truth


def _write_afv_csv(path: Path, rows, road_miles, rng: np.random.RandomState) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["county", "date", "fuel_type", "count", "road_mileage", "vmt"])
        for r in rows:
            total = r["total_afv"]
            counts = _split_counts(total, rng)
            # cumulative snapshots: mid-year sits below the year-end value
            h1_total = int(round(total * 0.92))
            h1_counts = _split_counts(h1_total, rng)
            for (date, per_type) in ((f"{r['year']}-06-30", h1_counts),
                                     (f"{r['year']}-12-31", counts)):
                for t in ("bev", "phev", "nev", "hev"):
                    w.writerow([r["county"], date, t, per_type[t],
                                repr(road_miles[r["county"]]), repr(r["vmt"])])


def _write_socio_csv(path: Path, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["county", "year", "population", "population_change",
                    "education_pct%", "unemployment_rate%", "poverty_pct%",
                    "poverty_lower%", "poverty_upper%", "median_household_income"])
        for r in rows:
            w.writerow([r["county"], r["year"], r["population"], r["population_change"],
                        repr(r["education_cells"]), repr(r["unemployment_cells"]),
                        repr(r["poverty_pct_cells"]), repr(r["poverty_lo_cells"]),
                        repr(r["poverty_hi_cells"]), repr(r["median_household_income"])])


def _write_aqi_csv(path: Path, rows, counties) -> None:
    county_index = {c: i for i, c in enumerate(counties)}
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["county", "year", "monitor_id", "so2", "o3", "no2", "pm25", "co"])
        for r in rows:
            values = {p: POLLUTANT_BASE[p] - POLLUTANT_SENSITIVITY[p] * r["latent"]
                      for p in POLLUTANT_BASE}
            two_monitors = (county_index[r["county"]] + r["year"]) % 3 == 0
            if two_monitors:
                for mon, sign in (("m1", 1.0), ("m2", -1.0)):
                    w.writerow([r["county"], r["year"], mon] +
                               [repr(values[p] + sign * 0.0005) for p in POLLUTANT_BASE])
            else:
                w.writerow([r["county"], r["year"], "m1"] +
                           [repr(values[p]) for p in POLLUTANT_BASE])
