"""Correlation, ranking, and fleet-growth statistics over the county panel.

Ranking conventions: rank 1 always goes to the largest metric value, ties are
broken by county name ascending, so ranks are a permutation of 1..N.  The
socioeconomic composite is the arithmetic mean of three per-variable ranks
(median household income, education share, population); this aggregation is a
documented assumption, not a published formula.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

from .errors import (
    CountyMismatch,
    InsufficientPeriods,
    LengthMismatch,
    MissingCovariate,
    ZeroVariance,
)

if TYPE_CHECKING:
    from .ingest import AfvRecord, Panel, PanelRow

SE_RANK_VARIABLES = ("median_household_income", "education_pct", "population")

GROWTH_FORMULA = "growth_pct = 100 * (last_count - first_count) / total_fleet_at_first_period"


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    """Sample Pearson correlation coefficient, clipped into [-1, 1]."""
    if len(x) != len(y):
        raise LengthMismatch(f"series lengths differ: {len(x)} vs {len(y)}")
    n = len(x)
    if n < 2:
        raise LengthMismatch("need at least 2 observations")
    mx = sum(x) / n
    my = sum(y) / n
    sxx = sum((a - mx) ** 2 for a in x)
    syy = sum((b - my) ** 2 for b in y)
    if sxx == 0.0:
        raise ZeroVariance("x")
    if syy == 0.0:
        raise ZeroVariance("y")
    sxy = sum((a - mx) * (b - my) for a, b in zip(x, y))
    r = sxy / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


@dataclass(frozen=True)
class CorrelationMatrix:
    variables: tuple[str, ...]
    values: tuple[tuple[float, ...], ...]  # symmetric, unit diagonal

    def get(self, a: str, b: str) -> float:
        return self.values[self.variables.index(a)][self.variables.index(b)]

    def triples(self) -> list[tuple[str, str, float]]:
        """Long-form (variable_a, variable_b, r) rows, upper triangle incl. diagonal."""
        out = []
        for i, a in enumerate(self.variables):
            for j, b in enumerate(self.variables):
                if j >= i:
                    out.append((a, b, self.values[i][j]))
        return out


def correlation_matrix(panel: "Panel", variables: Sequence[str]) -> CorrelationMatrix:
    """Pairwise Pearson correlations over aligned panel rows.

    Exactly symmetric by construction; diagonal entries are exactly 1.
    """
    columns = {}
    for name in variables:
        col = panel.column(name)
        if len(set(col)) == 1:
            raise ZeroVariance(name)
        columns[name] = col
    k = len(variables)
    grid = [[1.0] * k for _ in range(k)]
    for i in range(k):
        for j in range(i + 1, k):
            r = pearson(columns[variables[i]], columns[variables[j]])
            grid[i][j] = grid[j][i] = r
    return CorrelationMatrix(tuple(variables), tuple(tuple(row) for row in grid))


@dataclass(frozen=True)
class RankEntry:
    county: str
    metric_value: float
    rank: int


@dataclass(frozen=True)
class CountyRanking:
    entries: tuple[RankEntry, ...]  # sorted by rank ascending

    def rank_of(self, county: str) -> int:
        for e in self.entries:
            if e.county == county:
                return e.rank
        raise KeyError(county)

    def counties(self) -> set[str]:
        return {e.county for e in self.entries}


def rank_desc(entries: Sequence[tuple[str, float]]) -> CountyRanking:
    """Rank counties by value descending; rank 1 is the largest.

    Ties break by county name ascending, so ranks are always unique.
    """
    for county, value in entries:
        if not math.isfinite(value):
            raise ValueError(f"non-finite value for {county!r}")
    ordered = sorted(entries, key=lambda e: (-e[1], e[0]))
    return CountyRanking(tuple(
        RankEntry(county=c, metric_value=float(v), rank=i)
        for i, (c, v) in enumerate(ordered, start=1)
    ))


def se_rank(rows: Sequence["PanelRow"]) -> CountyRanking:
    """Socioeconomic ranking of one county per row (a single year slice).

    Each county gets the mean of its three per-variable descending ranks;
    the county with the smallest mean rank is SE rank 1.  The stored metric
    is (N + 1) - mean_rank ("rank points", higher is better) so that metric
    order and rank order agree.
    """
    counties = [r.county for r in rows]
    if len(set(counties)) != len(counties):
        raise ValueError("year slice contains duplicate counties")
    per_variable: list[CountyRanking] = []
    for name in SE_RANK_VARIABLES:
        pairs = []
        for r in rows:
            v = getattr(r, name, None)
            if v is None:
                raise MissingCovariate(name, f"county {r.county}")
            pairs.append((r.county, float(v)))
        per_variable.append(rank_desc(pairs))
    n = len(counties)
    points = []
    for county in counties:
        mean_rank = sum(rk.rank_of(county) for rk in per_variable) / len(per_variable)
        points.append((county, (n + 1) - mean_rank))
    return rank_desc(points)


def rank_agreement(a: CountyRanking, b: CountyRanking) -> float:
    """Spearman rank correlation between two rankings of the same counties."""
    if a.counties() != b.counties():
        raise CountyMismatch("rankings cover different county sets")
    names = sorted(a.counties())
    return pearson([float(a.rank_of(c)) for c in names],
                   [float(b.rank_of(c)) for c in names])


@dataclass(frozen=True)
class GrowthEntry:
    vehicle_type: str
    first_count: int
    last_count: int
    growth_pct: float


@dataclass(frozen=True)
class GrowthReport:
    first_period: tuple[int, int]
    last_period: tuple[int, int]
    fleet_total_first: int
    entries: tuple[GrowthEntry, ...]
    formula: str = GROWTH_FORMULA


def growth_by_type(records: Sequence["AfvRecord"]) -> GrowthReport:
    """Statewide fleet growth per vehicle type between the first and last period.

    Growth is measured relative to the total fleet at the first period (all
    types combined), not per-type, and the formula is carried in the report.
    """
    periods = sorted({r.period for r in records})
    if len(periods) < 2:
        raise InsufficientPeriods("need at least two semiannual periods")
    first, last = periods[0], periods[-1]

    def totals(period):
        agg = {"bev": 0, "phev": 0, "nev": 0, "hev": 0}
        for r in records:
            if r.period == period:
                agg["bev"] += r.bev_count
                agg["phev"] += r.phev_count
                agg["nev"] += r.nev_count
                agg["hev"] += r.hev_count
        return agg

    first_counts = totals(first)
    last_counts = totals(last)
    fleet_first = sum(first_counts.values())
    if fleet_first <= 0:
        raise InsufficientPeriods("first period has an empty fleet")
    entries = tuple(
        GrowthEntry(
            vehicle_type=t,
            first_count=first_counts[t],
            last_count=last_counts[t],
            growth_pct=100.0 * (last_counts[t] - first_counts[t]) / fleet_first,
        )
        for t in ("bev", "phev", "nev", "hev")
    )
    return GrowthReport(first_period=first, last_period=last,
                        fleet_total_first=fleet_first, entries=entries)
