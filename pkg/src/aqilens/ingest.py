"""CSV ingestion: parse the AFV registration, socioeconomic census, and
air-monitor files, validate them, and join them into one county-by-year panel.

Input schemas are documented in docs/DATA_FORMATS.md.  Counties are joined on
a normalized key (trimmed, case-folded, trailing " County" suffix removed)
because the three government sources disagree on naming.  AFV registration
counts are cumulative semiannual snapshots; annualization keeps the latest
half of each year.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from pathlib import Path

from .errors import (
    BoundViolation,
    EmptyPanel,
    MalformedRow,
    MissingColumn,
    NegativeCount,
    NoPollutantData,
)

VEHICLE_TYPES = ("bev", "phev", "nev", "hev")
POLLUTANTS = ("so2", "o3", "no2", "pm25", "co")

# Fixed column order of the canonical panel CSV.
PANEL_COLUMNS = (
    "county", "year",
    "bev_count", "phev_count", "nev_count", "hev_count",
    "pev_count", "non_pev_count", "total_afv",
    "road_mileage", "vmt",
    "population", "population_change",
    "education_pct", "unemployment_rate",
    "poverty_pct", "poverty_lower", "poverty_upper",
    "median_household_income",
    "so2", "o3", "no2", "pm25", "co",
    "aqi_score",
)

_SOCIO_FRACTIONS = ("education_pct", "unemployment_rate", "poverty_pct",
                    "poverty_lower", "poverty_upper")


def normalize_county(name: str) -> str:
    """Join key for a county name: trimmed, case-folded, '<x> County' -> '<x>'."""
    key = name.strip().casefold()
    if key.endswith(" county"):
        key = key[:-len(" county")].rstrip()
    return key


def display_county(name: str) -> str:
    return normalize_county(name).title()


@dataclass(frozen=True)
class AfvRecord:
    county: str
    period: tuple[int, int]  # (year, half), half in {1, 2}
    bev_count: int
    phev_count: int
    nev_count: int
    hev_count: int
    pev_count: int
    non_pev_count: int
    road_mileage: float | None = None
    vmt: float | None = None

    @property
    def total_afv(self) -> int:
        return self.bev_count + self.phev_count + self.nev_count + self.hev_count

    @property
    def year(self) -> int:
        return self.period[0]


@dataclass(frozen=True)
class SocioRecord:
    county: str
    year: int
    population: int
    population_change: float
    education_pct: float
    unemployment_rate: float
    poverty_pct: float
    poverty_lower: float
    poverty_upper: float
    median_household_income: float


@dataclass(frozen=True)
class PollutantRecord:
    county: str
    year: int
    so2: float
    o3: float
    no2: float
    pm25: float
    co: float


@dataclass(frozen=True)
class PanelRow:
    county: str
    year: int
    bev_count: int
    phev_count: int
    nev_count: int
    hev_count: int
    pev_count: int
    non_pev_count: int
    total_afv: int
    road_mileage: float | None
    vmt: float | None
    population: int
    population_change: float
    education_pct: float
    unemployment_rate: float
    poverty_pct: float
    poverty_lower: float
    poverty_upper: float
    median_household_income: float
    so2: float
    o3: float
    no2: float
    pm25: float
    co: float
    aqi_score: float | None = None

    def value(self, name: str) -> float | None:
        if name not in PANEL_COLUMNS or name == "county":
            raise KeyError(name)
        v = getattr(self, name)
        return None if v is None else float(v)

    @property
    def pollutants(self) -> tuple[float, float, float, float, float]:
        return (self.so2, self.o3, self.no2, self.pm25, self.co)


@dataclass(frozen=True)
class DropNote:
    county: str
    year: int
    reason: str


@dataclass(frozen=True)
class Panel:
    rows: tuple[PanelRow, ...]
    dropped: tuple[DropNote, ...] = field(default=(), compare=False)

    def column(self, name: str) -> list[float]:
        out = []
        for row in self.rows:
            v = row.value(name)
            if v is None:
                raise KeyError(f"column {name!r} has missing values")
            out.append(v)
        return out

    def counties(self) -> list[str]:
        seen: dict[str, None] = {}
        for row in self.rows:
            seen.setdefault(row.county)
        return sorted(seen)

    def years(self) -> list[int]:
        return sorted({row.year for row in self.rows})

    def get(self, county: str, year: int) -> PanelRow | None:
        key = normalize_county(county)
        for row in self.rows:
            if normalize_county(row.county) == key and row.year == year:
                return row
        return None

    def year_slice(self, year: int) -> list[PanelRow]:
        return [row for row in self.rows if row.year == year]


# ------------------------------------------------------------------ parsing

def _open_reader(path: str | Path):
    fh = open(path, newline="", encoding="utf-8")
    return fh, csv.reader(fh)


def _header_index(header: list[str], required: tuple[str, ...],
                  optional: tuple[str, ...] = (), path: str = "") -> dict[str, tuple[int, bool]]:
    """Map logical column name -> (index, is_percent).

    A trailing '%' on a header cell marks a percentage column whose values
    are divided by 100 on read.
    """
    index: dict[str, tuple[int, bool]] = {}
    for i, cell in enumerate(header):
        name = cell.strip()
        pct = name.endswith("%")
        if pct:
            name = name[:-1].strip()
        index[name] = (i, pct)
    for name in required:
        if name not in index:
            raise MissingColumn(name, str(path))
    return {name: index[name] for name in (*required, *optional) if name in index}


def _cell(row: list[str], pos: tuple[int, bool]) -> str:
    i, _ = pos
    return row[i].strip() if i < len(row) else ""


def _float_cell(row: list[str], pos: tuple[int, bool], line: int, name: str) -> float:
    raw = _cell(row, pos)
    try:
        v = float(raw)
    except ValueError:
        raise MalformedRow(line, f"cannot parse {name}={raw!r} as a number") from None
    if pos[1]:
        v /= 100.0
    return v


def _int_cell(row: list[str], pos: tuple[int, bool], line: int, name: str) -> int:
    raw = _cell(row, pos)
    try:
        return int(raw)
    except ValueError:
        raise MalformedRow(line, f"cannot parse {name}={raw!r} as an integer") from None


def parse_afv_csv(path: str | Path) -> list[AfvRecord]:
    """Parse long-format AFV registrations (one row per county/date/fuel type).

    Rows sharing a county and semiannual period are combined per type;
    repeated snapshots within a period are summed.
    """
    fh, reader = _open_reader(path)
    with fh:
        try:
            header = next(reader)
        except StopIteration:
            raise MissingColumn("county", str(path)) from None
        cols = _header_index(header, ("county", "date", "fuel_type", "count"),
                             ("road_mileage", "vmt"), str(path))
        groups: dict[tuple[str, tuple[int, int]], dict] = {}
        for line, row in enumerate(reader, start=2):
            if not any(cell.strip() for cell in row):
                continue
            county_raw = _cell(row, cols["county"])
            if not county_raw:
                raise MalformedRow(line, "empty county")
            date_raw = _cell(row, cols["date"])
            try:
                year_s, month_s, _day = date_raw.split("-")
                year, month = int(year_s), int(month_s)
                if not 1 <= month <= 12:
                    raise ValueError
            except ValueError:
                raise MalformedRow(line, f"cannot parse date={date_raw!r} (expected YYYY-MM-DD)") from None
            half = 1 if month <= 6 else 2
            ftype = _cell(row, cols["fuel_type"]).strip().lower()
            if ftype not in VEHICLE_TYPES:
                raise MalformedRow(line, f"unknown fuel_type {ftype!r}")
            count = _int_cell(row, cols["count"], line, "count")
            if count < 0:
                raise NegativeCount(line, "count")
            key = (normalize_county(county_raw), (year, half))
            g = groups.setdefault(key, {"county": display_county(county_raw),
                                        "counts": dict.fromkeys(VEHICLE_TYPES, 0),
                                        "road_mileage": None, "vmt": None})
            g["counts"][ftype] += count
            for opt in ("road_mileage", "vmt"):
                if opt in cols and g[opt] is None:
                    raw = _cell(row, cols[opt])
                    if raw:
                        v = _float_cell(row, cols[opt], line, opt)
                        if v < 0:
                            raise MalformedRow(line, f"negative {opt}")
                        g[opt] = v
    records = []
    for (key, period), g in sorted(groups.items()):
        c = g["counts"]
        records.append(AfvRecord(
            county=g["county"], period=period,
            bev_count=c["bev"], phev_count=c["phev"],
            nev_count=c["nev"], hev_count=c["hev"],
            pev_count=c["bev"] + c["phev"],
            non_pev_count=c["nev"] + c["hev"],
            road_mileage=g["road_mileage"], vmt=g["vmt"],
        ))
    return records


def parse_socio_csv(path: str | Path) -> list[SocioRecord]:
    """Parse annual socioeconomic census rows, normalizing '%'-suffixed
    percentage columns to fractions."""
    required = ("county", "year", "population", "population_change",
                "education_pct", "unemployment_rate", "poverty_pct",
                "poverty_lower", "poverty_upper", "median_household_income")
    fh, reader = _open_reader(path)
    with fh:
        try:
            header = next(reader)
        except StopIteration:
            raise MissingColumn("county", str(path)) from None
        cols = _header_index(header, required, (), str(path))
        seen: dict[tuple[str, int], int] = {}
        records = []
        for line, row in enumerate(reader, start=2):
            if not any(cell.strip() for cell in row):
                continue
            county_raw = _cell(row, cols["county"])
            if not county_raw:
                raise MalformedRow(line, "empty county")
            year = _int_cell(row, cols["year"], line, "year")
            key = (normalize_county(county_raw), year)
            if key in seen:
                raise MalformedRow(line, f"duplicate (county, year) also on line {seen[key]}")
            seen[key] = line
            population = _int_cell(row, cols["population"], line, "population")
            if population <= 0:
                raise MalformedRow(line, "population must be positive")
            income = _float_cell(row, cols["median_household_income"], line,
                                 "median_household_income")
            if income <= 0:
                raise MalformedRow(line, "median_household_income must be positive")
            fracs = {}
            for name in _SOCIO_FRACTIONS:
                v = _float_cell(row, cols[name], line, name)
                if not 0.0 <= v <= 1.0:
                    raise MalformedRow(line, f"{name}={v} outside [0, 1]")
                fracs[name] = v
            if not fracs["poverty_lower"] <= fracs["poverty_pct"] <= fracs["poverty_upper"]:
                raise BoundViolation(
                    f"line {line}: poverty bounds disordered "
                    f"({fracs['poverty_lower']}, {fracs['poverty_pct']}, {fracs['poverty_upper']})"
                )
            records.append(SocioRecord(
                county=display_county(county_raw), year=year,
                population=population,
                population_change=_float_cell(row, cols["population_change"], line,
                                              "population_change"),
                median_household_income=income,
                **fracs,
            ))
    records.sort(key=lambda r: (normalize_county(r.county), r.year))
    return records


def parse_aqi_csv(path: str | Path) -> list[PollutantRecord]:
    """Parse monitor-level pollutant readings and average them per county-year.

    A pollutant cell may be empty for an individual monitor; it must be
    present for at least one monitor of each (county, year).
    """
    required = ("county", "year", "monitor_id", *POLLUTANTS)
    fh, reader = _open_reader(path)
    with fh:
        try:
            header = next(reader)
        except StopIteration:
            raise MissingColumn("county", str(path)) from None
        cols = _header_index(header, required, (), str(path))
        groups: dict[tuple[str, int], dict] = {}
        for line, row in enumerate(reader, start=2):
            if not any(cell.strip() for cell in row):
                continue
            county_raw = _cell(row, cols["county"])
            if not county_raw:
                raise MalformedRow(line, "empty county")
            year = _int_cell(row, cols["year"], line, "year")
            key = (normalize_county(county_raw), year)
            g = groups.setdefault(key, {"county": display_county(county_raw),
                                        "values": {p: [] for p in POLLUTANTS}})
            for p in POLLUTANTS:
                raw = _cell(row, cols[p])
                if raw == "":
                    continue
                v = _float_cell(row, cols[p], line, p)
                if v < 0:
                    raise MalformedRow(line, f"negative {p}")
                g["values"][p].append(v)
    records = []
    for (key, year), g in sorted(groups.items()):
        means = {}
        for p in POLLUTANTS:
            vals = g["values"][p]
            if not vals:
                raise NoPollutantData(g["county"], year, p)
            means[p] = sum(vals) / len(vals)
        records.append(PollutantRecord(county=g["county"], year=year, **means))
    return records


# ------------------------------------------------------------------- panel

def annualize_afv(records: list[AfvRecord]) -> list[AfvRecord]:
    """Collapse semiannual snapshots to one record per county-year.

    Counts are cumulative, so the later half wins.  Idempotent.
    """
    chosen: dict[tuple[str, int], AfvRecord] = {}
    for rec in records:
        key = (normalize_county(rec.county), rec.year)
        prev = chosen.get(key)
        if prev is None or rec.period[1] > prev.period[1]:
            chosen[key] = rec
    return [chosen[key] for key in sorted(chosen)]


def build_panel(afv: list[AfvRecord], socio: list[SocioRecord],
                aqi: list[PollutantRecord]) -> Panel:
    """Inner-join the three validated sources on (county, year).

    County-years present in some sources but not all are dropped and reported
    on the returned panel.
    """
    afv_by_key = {(normalize_county(r.county), r.year): r for r in annualize_afv(afv)}
    socio_by_key = {(normalize_county(r.county), r.year): r for r in socio}
    aqi_by_key = {(normalize_county(r.county), r.year): r for r in aqi}

    rows = []
    dropped = []
    all_keys = sorted(set(afv_by_key) | set(socio_by_key) | set(aqi_by_key))
    for key in all_keys:
        missing = [name for name, d in (("afv", afv_by_key), ("socio", socio_by_key),
                                        ("aqi", aqi_by_key)) if key not in d]
        if missing:
            dropped.append(DropNote(county=key[0].title(), year=key[1],
                                    reason="missing " + "+".join(missing) + " data"))
            continue
        a, s, q = afv_by_key[key], socio_by_key[key], aqi_by_key[key]
        rows.append(PanelRow(
            county=s.county, year=key[1],
            bev_count=a.bev_count, phev_count=a.phev_count,
            nev_count=a.nev_count, hev_count=a.hev_count,
            pev_count=a.pev_count, non_pev_count=a.non_pev_count,
            total_afv=a.total_afv,
            road_mileage=a.road_mileage, vmt=a.vmt,
            population=s.population, population_change=s.population_change,
            education_pct=s.education_pct, unemployment_rate=s.unemployment_rate,
            poverty_pct=s.poverty_pct, poverty_lower=s.poverty_lower,
            poverty_upper=s.poverty_upper,
            median_household_income=s.median_household_income,
            so2=q.so2, o3=q.o3, no2=q.no2, pm25=q.pm25, co=q.co,
        ))
    if not rows:
        raise EmptyPanel("join produced no rows; check county names and years")
    return Panel(rows=tuple(rows), dropped=tuple(dropped))


def validate_panel(panel: Panel) -> list[str]:
    """Re-check every row invariant; returns a list of violations (empty when clean)."""
    problems = []
    seen = set()
    for row in panel.rows:
        key = (normalize_county(row.county), row.year)
        if key in seen:
            problems.append(f"duplicate (county, year) {key}")
        seen.add(key)
        for name in ("bev_count", "phev_count", "nev_count", "hev_count"):
            if getattr(row, name) < 0:
                problems.append(f"{row.county} {row.year}: negative {name}")
        if row.pev_count != row.bev_count + row.phev_count:
            problems.append(f"{row.county} {row.year}: pev_count != bev + phev")
        if row.total_afv != row.bev_count + row.phev_count + row.nev_count + row.hev_count:
            problems.append(f"{row.county} {row.year}: total_afv mismatch")
        if not row.poverty_lower <= row.poverty_pct <= row.poverty_upper:
            problems.append(f"{row.county} {row.year}: poverty bounds disordered")
        for name in _SOCIO_FRACTIONS:
            if not 0.0 <= getattr(row, name) <= 1.0:
                problems.append(f"{row.county} {row.year}: {name} outside [0, 1]")
        if row.population <= 0:
            problems.append(f"{row.county} {row.year}: population not positive")
        for p in POLLUTANTS:
            if getattr(row, p) < 0:
                problems.append(f"{row.county} {row.year}: negative {p}")
    return problems


# ------------------------------------------------------------- serialization

def _format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_panel_csv(panel: Panel, path: str | Path) -> None:
    """Write the canonical panel CSV (fixed column order, full float precision)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(PANEL_COLUMNS)
        for row in panel.rows:
            writer.writerow([_format_value(getattr(row, c)) for c in PANEL_COLUMNS])


def read_panel_csv(path: str | Path) -> Panel:
    fh, reader = _open_reader(path)
    with fh:
        try:
            header = next(reader)
        except StopIteration:
            raise MissingColumn("county", str(path)) from None
        if tuple(h.strip() for h in header) != PANEL_COLUMNS:
            raise MissingColumn("canonical panel header", str(path))
        rows = []
        for line, row in enumerate(reader, start=2):
            if not any(cell.strip() for cell in row):
                continue
            if len(row) != len(PANEL_COLUMNS):
                raise MalformedRow(line, f"expected {len(PANEL_COLUMNS)} cells, got {len(row)}")
            vals = dict(zip(PANEL_COLUMNS, (c.strip() for c in row)))
            try:
                rows.append(PanelRow(
                    county=vals["county"], year=int(vals["year"]),
                    bev_count=int(vals["bev_count"]), phev_count=int(vals["phev_count"]),
                    nev_count=int(vals["nev_count"]), hev_count=int(vals["hev_count"]),
                    pev_count=int(vals["pev_count"]), non_pev_count=int(vals["non_pev_count"]),
                    total_afv=int(vals["total_afv"]),
                    road_mileage=float(vals["road_mileage"]) if vals["road_mileage"] else None,
                    vmt=float(vals["vmt"]) if vals["vmt"] else None,
                    population=int(vals["population"]),
                    population_change=float(vals["population_change"]),
                    education_pct=float(vals["education_pct"]),
                    unemployment_rate=float(vals["unemployment_rate"]),
                    poverty_pct=float(vals["poverty_pct"]),
                    poverty_lower=float(vals["poverty_lower"]),
                    poverty_upper=float(vals["poverty_upper"]),
                    median_household_income=float(vals["median_household_income"]),
                    so2=float(vals["so2"]), o3=float(vals["o3"]), no2=float(vals["no2"]),
                    pm25=float(vals["pm25"]), co=float(vals["co"]),
                    aqi_score=float(vals["aqi_score"]) if vals["aqi_score"] else None,
                ))
            except ValueError as exc:
                raise MalformedRow(line, str(exc)) from None
    if not rows:
        raise EmptyPanel(f"panel file {path} has no rows")
    return Panel(rows=tuple(rows))


def with_scores(panel: Panel, scores: list[float]) -> Panel:
    """Return a copy of the panel with aqi_score filled in row order."""
    if len(scores) != len(panel.rows):
        raise ValueError("score count does not match row count")
    return Panel(rows=tuple(replace(r, aqi_score=float(s))
                            for r, s in zip(panel.rows, scores)),
                 dropped=panel.dropped)
