"""Bundled reference data for the 21 New Jersey counties.

COUNTY_BASELINES carries census population, cumulative alternative-fuel-vehicle
registrations, and the published adoption/socioeconomic rank columns used as
ranking ground truth.  EVAL_PAIRS carries the published actual-vs-predicted
composite air-quality scores for three counties over 2016-2021, used as the
evaluation-metric fixture.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class CountyBaseline:
    county: str
    population: int
    total_afv: int
    se_rank: int
    afv_rank: int


COUNTY_BASELINES: tuple[CountyBaseline, ...] = (
    CountyBaseline("Bergen", 953819, 28304, 1, 1),
    CountyBaseline("Middlesex", 860807, 25674, 2, 2),
    CountyBaseline("Monmouth", 645354, 19800, 6, 3),
    CountyBaseline("Essex", 854917, 19138, 3, 4),
    CountyBaseline("Morris", 510981, 16782, 10, 5),
    CountyBaseline("Mercer", 385898, 16063, 12, 6),
    CountyBaseline("Camden", 523771, 13398, 8, 7),
    CountyBaseline("Burlington", 464269, 12862, 11, 8),
    CountyBaseline("Somerset", 345647, 12722, 13, 9),
    CountyBaseline("Ocean", 648998, 12530, 5, 10),
    CountyBaseline("Union", 572114, 11995, 7, 11),
    CountyBaseline("Hudson", 702463, 11193, 4, 12),
    CountyBaseline("Passaic", 518117, 8755, 9, 13),
    CountyBaseline("Gloucester", 304477, 6331, 14, 14),
    CountyBaseline("Atlantic", 274966, 6236, 15, 15),
    CountyBaseline("Hunterdon", 129924, 5362, 18, 16),
    CountyBaseline("Sussex", 145543, 3625, 17, 17),
    CountyBaseline("Cape May", 95661, 2888, 20, 18),
    CountyBaseline("Warren", 110731, 2814, 19, 19),
    CountyBaseline("Cumberland", 153627, 2302, 16, 20),
    CountyBaseline("Salem", 65046, 1148, 21, 21),
)


@dataclass(frozen=True)
class EvalPair:
    county: str
    year: int
    actual: float
    predicted: float


EVAL_PAIRS: tuple[EvalPair, ...] = (
    EvalPair("Atlantic", 2016, 0.573, 0.543),
    EvalPair("Atlantic", 2017, 0.565, 0.592),
    EvalPair("Atlantic", 2018, 0.577, 0.575),
    EvalPair("Atlantic", 2019, 0.577, 0.607),
    EvalPair("Atlantic", 2020, 0.577, 0.637),
    EvalPair("Atlantic", 2021, 0.576, 0.626),
    EvalPair("Camden", 2016, 0.447, 0.453),
    EvalPair("Camden", 2017, 0.444, 0.447),
    EvalPair("Camden", 2018, 0.447, 0.473),
    EvalPair("Camden", 2019, 0.447, 0.539),
    EvalPair("Camden", 2020, 0.447, 0.579),
    EvalPair("Camden", 2021, 0.447, 0.577),
    EvalPair("Mercer", 2016, 0.707, 0.694),
    EvalPair("Mercer", 2017, 0.707, 0.710),
    EvalPair("Mercer", 2018, 0.707, 0.723),
    EvalPair("Mercer", 2019, 0.707, 0.721),
    EvalPair("Mercer", 2020, 0.707, 0.768),
    EvalPair("Mercer", 2021, 0.706, 0.789),
)

COUNTY_NAMES: tuple[str, ...] = tuple(sorted(b.county for b in COUNTY_BASELINES))


@dataclass(frozen=True)
class BaselineRow:
    """Minimal ranking row; income and education are illustrative values,
    scaled monotonically from population so the composite ordering is
    reproducible."""

    county: str
    population: int
    total_afv: int
    median_household_income: float
    education_pct: float


def baseline_rows() -> list[BaselineRow]:
    max_pop = max(b.population for b in COUNTY_BASELINES)
    return [
        BaselineRow(
            county=b.county,
            population=b.population,
            total_afv=b.total_afv,
            median_household_income=round(45000.0 + 0.08 * b.population, 2),
            education_pct=round(0.25 + 0.5 * b.population / max_pop, 6),
        )
        for b in COUNTY_BASELINES
    ]
