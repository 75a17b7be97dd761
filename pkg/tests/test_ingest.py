from pathlib import Path

import pytest

from aqilens import ingest
from aqilens.errors import (
    BoundViolation,
    EmptyPanel,
    MalformedRow,
    MissingColumn,
    NegativeCount,
    NoPollutantData,
)

AFV_HEADER = "county,date,fuel_type,count,road_mileage,vmt\n"
SOCIO_HEADER = ("county,year,population,population_change,education_pct%,"
                "unemployment_rate%,poverty_pct%,poverty_lower%,poverty_upper%,"
                "median_household_income\n")
AQI_HEADER = "county,year,monitor_id,so2,o3,no2,pm25,co\n"


def write(tmp_path: Path, name: str, text: str) -> Path:
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


def socio_line(county="Bergen", year=2022, pop=953819, change=100,
               edu=30.0, unemp=5.0, pov=10.0, lo=8.0, hi=12.0, income=90000):
    return f"{county},{year},{pop},{change},{edu},{unemp},{pov},{lo},{hi},{income}\n"


def aqi_line(county="Bergen", year=2022, mon="m1", so2=5, o3=30, no2=15, pm25=20, co=2):
    return f"{county},{year},{mon},{so2},{o3},{no2},{pm25},{co}\n"


def afv_block(county="Bergen", date="2022-06-30", bev=100, phev=50, nev=10, hev=200,
              road="500.0", vmt="1000000.0"):
    return "".join(
        f"{county},{date},{t},{n},{road},{vmt}\n"
        for t, n in (("bev", bev), ("phev", phev), ("nev", nev), ("hev", hev))
    )


class TestParseAfv:
    def test_counts_sum_to_total(self, tmp_path):
        # published Bergen total: 28304
        p = write(tmp_path, "afv.csv",
                  AFV_HEADER + afv_block(bev=12000, phev=6000, nev=304, hev=10000))
        (rec,) = ingest.parse_afv_csv(p)
        assert rec.total_afv == 28304
        assert rec.county == "Bergen"
        assert rec.period == (2022, 1)
        assert rec.pev_count == rec.bev_count + rec.phev_count
        assert rec.non_pev_count == rec.nev_count + rec.hev_count

    def test_header_only_gives_empty_list(self, tmp_path):
        p = write(tmp_path, "afv.csv", AFV_HEADER)
        assert ingest.parse_afv_csv(p) == []

    def test_negative_count(self, tmp_path):
        p = write(tmp_path, "afv.csv", AFV_HEADER + "Bergen,2022-01-01,bev,-3,,\n")
        with pytest.raises(NegativeCount) as exc:
            ingest.parse_afv_csv(p)
        assert exc.value.line == 2

    def test_unknown_fuel_type(self, tmp_path):
        p = write(tmp_path, "afv.csv", AFV_HEADER + "Bergen,2022-01-01,rocket,3,,\n")
        with pytest.raises(MalformedRow):
            ingest.parse_afv_csv(p)

    def test_missing_column(self, tmp_path):
        p = write(tmp_path, "afv.csv", "county,date,count\nBergen,2022-01-01,3\n")
        with pytest.raises(MissingColumn) as exc:
            ingest.parse_afv_csv(p)
        assert exc.value.name == "fuel_type"

    def test_bad_date(self, tmp_path):
        p = write(tmp_path, "afv.csv", AFV_HEADER + "Bergen,June 2022,bev,3,,\n")
        with pytest.raises(MalformedRow):
            ingest.parse_afv_csv(p)

    def test_semiannual_period_from_date(self, tmp_path):
        p = write(tmp_path, "afv.csv", AFV_HEADER
                  + "Bergen,2022-06-30,bev,1,,\n"
                  + "Bergen,2022-07-01,bev,2,,\n")
        recs = ingest.parse_afv_csv(p)
        assert [(r.period, r.bev_count) for r in recs] == [((2022, 1), 1), ((2022, 2), 2)]

    def test_same_period_rows_summed(self, tmp_path):
        p = write(tmp_path, "afv.csv", AFV_HEADER
                  + "Bergen,2022-01-15,bev,10,,\n"
                  + "Bergen,2022-03-15,bev,5,,\n")
        (rec,) = ingest.parse_afv_csv(p)
        assert rec.bev_count == 15

    def test_optional_exposure_fields(self, tmp_path):
        p = write(tmp_path, "afv.csv", AFV_HEADER + "Bergen,2022-01-15,bev,10,,\n")
        (rec,) = ingest.parse_afv_csv(p)
        assert rec.road_mileage is None and rec.vmt is None


class TestParseSocio:
    def test_population_parse(self, tmp_path):
        p = write(tmp_path, "socio.csv", SOCIO_HEADER
                  + socio_line("Bergen", pop=953819) + socio_line("Salem", pop=65046))
        recs = ingest.parse_socio_csv(p)
        assert {r.county: r.population for r in recs} == {"Bergen": 953819, "Salem": 65046}

    def test_percent_columns_normalized(self, tmp_path):
        p = write(tmp_path, "socio.csv", SOCIO_HEADER + socio_line(pov=12.5, lo=10.0, hi=15.0))
        (rec,) = ingest.parse_socio_csv(p)
        assert rec.poverty_pct == 12.5 / 100.0
        assert rec.poverty_lower == 0.10
        assert rec.education_pct == 0.30

    def test_fraction_headers_passthrough(self, tmp_path):
        header = SOCIO_HEADER.replace("%", "")
        p = write(tmp_path, "socio.csv", header
                  + socio_line(edu=0.3, unemp=0.05, pov=0.125, lo=0.1, hi=0.15))
        (rec,) = ingest.parse_socio_csv(p)
        assert rec.poverty_pct == 0.125

    def test_poverty_bounds_disordered(self, tmp_path):
        # lower 0.10 above point estimate 0.08
        p = write(tmp_path, "socio.csv", SOCIO_HEADER + socio_line(pov=8.0, lo=10.0, hi=12.0))
        with pytest.raises(BoundViolation):
            ingest.parse_socio_csv(p)

    def test_fraction_out_of_range(self, tmp_path):
        p = write(tmp_path, "socio.csv", SOCIO_HEADER + socio_line(edu=130.0))
        with pytest.raises(MalformedRow):
            ingest.parse_socio_csv(p)

    def test_duplicate_county_year(self, tmp_path):
        p = write(tmp_path, "socio.csv", SOCIO_HEADER + socio_line() + socio_line())
        with pytest.raises(MalformedRow):
            ingest.parse_socio_csv(p)

    def test_missing_column(self, tmp_path):
        p = write(tmp_path, "socio.csv", "county,year\nBergen,2022\n")
        with pytest.raises(MissingColumn):
            ingest.parse_socio_csv(p)


class TestParseAqi:
    def test_two_monitors_averaged(self, tmp_path):
        p = write(tmp_path, "aqi.csv", AQI_HEADER
                  + aqi_line("Essex", 2018, "m1", o3=0.4)
                  + aqi_line("Essex", 2018, "m2", o3=0.6))
        (rec,) = ingest.parse_aqi_csv(p)
        assert rec.o3 == 0.5

    def test_single_monitor_passthrough(self, tmp_path):
        p = write(tmp_path, "aqi.csv", AQI_HEADER + aqi_line(so2=5.25))
        (rec,) = ingest.parse_aqi_csv(p)
        assert rec.so2 == 5.25

    def test_missing_pollutant_everywhere(self, tmp_path):
        lines = (aqi_line("Essex", 2018, "m1").replace(",2\n", ",\n")
                 + aqi_line("Essex", 2018, "m2").replace(",2\n", ",\n"))
        p = write(tmp_path, "aqi.csv", AQI_HEADER + lines)
        with pytest.raises(NoPollutantData) as exc:
            ingest.parse_aqi_csv(p)
        assert exc.value.pollutant == "co"

    def test_partial_monitor_gap_is_fine(self, tmp_path):
        lines = (aqi_line("Essex", 2018, "m1", co=4).replace(",4\n", ",\n")
                 + aqi_line("Essex", 2018, "m2", co=4))
        p = write(tmp_path, "aqi.csv", AQI_HEADER + lines)
        (rec,) = ingest.parse_aqi_csv(p)
        assert rec.co == 4.0

    def test_negative_reading(self, tmp_path):
        p = write(tmp_path, "aqi.csv", AQI_HEADER + aqi_line(so2=-1))
        with pytest.raises(MalformedRow):
            ingest.parse_aqi_csv(p)


def three_sources(tmp_path, counties=("Bergen", "Salem"), years=(2021, 2022)):
    afv = AFV_HEADER
    socio = SOCIO_HEADER
    aqi = AQI_HEADER
    for c in counties:
        for y in years:
            afv += afv_block(c, f"{y}-12-31")
            socio += socio_line(c, y)
            aqi += aqi_line(c, y)
    return (write(tmp_path, "afv.csv", afv),
            write(tmp_path, "socio.csv", socio),
            write(tmp_path, "aqi.csv", aqi))


class TestBuildPanel:
    def test_full_join_cardinality(self, tmp_path):
        counties = [f"C{i:02d}" for i in range(21)]
        years = range(2016, 2022)
        pa, ps, pq = three_sources(tmp_path, counties, tuple(years))
        panel = ingest.build_panel(ingest.parse_afv_csv(pa),
                                   ingest.parse_socio_csv(ps),
                                   ingest.parse_aqi_csv(pq))
        assert len(panel.rows) == 21 * 6 == 126
        assert panel.dropped == ()

    def test_missing_year_dropped_and_reported(self, tmp_path):
        pa, ps, pq = three_sources(tmp_path)
        # strip Salem 2021 from socio
        text = ps.read_text()
        ps.write_text("".join(l + "\n" for l in text.splitlines()
                              if not l.startswith("Salem,2021")))
        panel = ingest.build_panel(ingest.parse_afv_csv(pa),
                                   ingest.parse_socio_csv(ps),
                                   ingest.parse_aqi_csv(pq))
        assert panel.get("Salem", 2021) is None
        assert panel.get("Salem", 2022) is not None
        assert any(d.county == "Salem" and d.year == 2021 and "socio" in d.reason
                   for d in panel.dropped)

    def test_disjoint_counties_empty_panel(self, tmp_path):
        pa, ps, pq = three_sources(tmp_path)
        ps.write_text(SOCIO_HEADER + socio_line("Atlantis", 2022))
        with pytest.raises(EmptyPanel):
            ingest.build_panel(ingest.parse_afv_csv(pa),
                               ingest.parse_socio_csv(ps),
                               ingest.parse_aqi_csv(pq))

    def test_county_name_normalization(self, tmp_path):
        afv = AFV_HEADER + afv_block("Bergen County", "2022-12-31")
        socio = SOCIO_HEADER + socio_line("  BERGEN ")
        aqi = AQI_HEADER + aqi_line("bergen")
        panel = ingest.build_panel(
            ingest.parse_afv_csv(write(tmp_path, "a.csv", afv)),
            ingest.parse_socio_csv(write(tmp_path, "s.csv", socio)),
            ingest.parse_aqi_csv(write(tmp_path, "q.csv", aqi)))
        assert len(panel.rows) == 1
        assert panel.rows[0].county == "Bergen"

    def test_annualization_takes_second_half(self, tmp_path):
        afv = (AFV_HEADER + afv_block("Bergen", "2022-06-30", bev=100)
               + afv_block("Bergen", "2022-12-31", bev=140))
        records = ingest.parse_afv_csv(write(tmp_path, "a.csv", afv))
        (annual,) = ingest.annualize_afv(records)
        assert annual.period == (2022, 2)
        assert annual.bev_count == 140

    def test_aggregation_join_commutes(self, tmp_path):
        pa, ps, pq = three_sources(tmp_path)
        afv = ingest.parse_afv_csv(pa)
        socio = ingest.parse_socio_csv(ps)
        aqi = ingest.parse_aqi_csv(pq)
        direct = ingest.build_panel(afv, socio, aqi)
        pre = ingest.build_panel(ingest.annualize_afv(afv), socio, aqi)
        assert direct.rows == pre.rows

    def test_validator_is_noop_after_build(self, tmp_path):
        pa, ps, pq = three_sources(tmp_path)
        panel = ingest.build_panel(ingest.parse_afv_csv(pa),
                                   ingest.parse_socio_csv(ps),
                                   ingest.parse_aqi_csv(pq))
        assert ingest.validate_panel(panel) == []


class TestPanelSerialization:
    def test_roundtrip(self, tmp_path):
        pa, ps, pq = three_sources(tmp_path)
        panel = ingest.build_panel(ingest.parse_afv_csv(pa),
                                   ingest.parse_socio_csv(ps),
                                   ingest.parse_aqi_csv(pq))
        out = tmp_path / "panel.csv"
        ingest.write_panel_csv(panel, out)
        again = ingest.read_panel_csv(out)
        assert again.rows == panel.rows

    def test_deterministic_bytes(self, tmp_path):
        pa, ps, pq = three_sources(tmp_path)

        def build_bytes(name):
            panel = ingest.build_panel(ingest.parse_afv_csv(pa),
                                       ingest.parse_socio_csv(ps),
                                       ingest.parse_aqi_csv(pq))
            out = tmp_path / name
            ingest.write_panel_csv(panel, out)
            return out.read_bytes()

        assert build_bytes("p1.csv") == build_bytes("p2.csv")

    def test_scores_roundtrip(self, tmp_path):
        pa, ps, pq = three_sources(tmp_path)
        panel = ingest.build_panel(ingest.parse_afv_csv(pa),
                                   ingest.parse_socio_csv(ps),
                                   ingest.parse_aqi_csv(pq))
        scored = ingest.with_scores(panel, [0.1 * i for i in range(len(panel.rows))])
        out = tmp_path / "panel.csv"
        ingest.write_panel_csv(scored, out)
        again = ingest.read_panel_csv(out)
        assert [r.aqi_score for r in again.rows] == [r.aqi_score for r in scored.rows]

    def test_empty_file_raises(self, tmp_path):
        p = write(tmp_path, "panel.csv", ",".join(ingest.PANEL_COLUMNS) + "\n")
        with pytest.raises(EmptyPanel):
            ingest.read_panel_csv(p)
