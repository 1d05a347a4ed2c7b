import datetime as dt

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fgdkit import dataset, models
from fgdkit.dataset import (
    AudienceCell,
    SnapshotSet,
    canonical_country,
    load_audience,
    load_census,
    load_indicators,
    write_audience_csv,
)
from fgdkit.errors import IntegrityError, ParseError

AUDIENCE_HEADER = "country,gender,age_bin,date,total_accounts,dau"


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


class TestLoadAudience:
    def test_two_row_file_loads_identity(self, tmp_path):
        path = write(
            tmp_path,
            "a.csv",
            f"{AUDIENCE_HEADER}\nUS,male,20,2015-07-01,100,50\nUS,female,20,2015-07-01,90,40\n",
        )
        snap = load_audience(path)
        assert len(snap) == 2
        cell = snap.get("US", "male", 20, dt.date(2015, 7, 1))
        assert cell.total_accounts == 100 and cell.dau == 50

    def test_age_bin_70_rejected_naming_field(self, tmp_path):
        path = write(tmp_path, "a.csv", f"{AUDIENCE_HEADER}\nUS,male,70,2015-07-01,10,5\n")
        with pytest.raises(ParseError, match="age_bin"):
            load_audience(path)

    def test_65plus_accepted(self, tmp_path):
        path = write(tmp_path, "a.csv", f"{AUDIENCE_HEADER}\nUS,male,65plus,2015-07-01,10,5\n")
        snap = load_audience(path)
        assert snap.cells[0].age_bin == dataset.AGE_BIN_TOP

    def test_duplicate_key_rejected(self, tmp_path):
        row = "US,male,20,2015-07-01,10,5"
        path = write(tmp_path, "a.csv", f"{AUDIENCE_HEADER}\n{row}\n{row}\n")
        with pytest.raises(IntegrityError, match="duplicate"):
            load_audience(path)

    def test_dau_above_total_rejected(self, tmp_path):
        path = write(tmp_path, "a.csv", f"{AUDIENCE_HEADER}\nUS,male,20,2015-07-01,10,11\n")
        with pytest.raises(IntegrityError, match="dau"):
            load_audience(path)

    def test_wrong_header_rejected_with_line(self, tmp_path):
        path = write(tmp_path, "a.csv", "country,sex\nUS,male\n")
        with pytest.raises(ParseError, match="line 1"):
            load_audience(path)

    def test_bad_date_names_field(self, tmp_path):
        path = write(tmp_path, "a.csv", f"{AUDIENCE_HEADER}\nUS,male,20,07/01/2015,10,5\n")
        with pytest.raises(ParseError, match="date"):
            load_audience(path)

    def test_roundtrip_preserves_rows(self, tmp_path):
        original = write(
            tmp_path,
            "a.csv",
            f"{AUDIENCE_HEADER}\n"
            "US,male,20,2015-07-01,100,50\n"
            "US,male,65plus,2015-07-01,80,30\n"
            "GB,female,44,2015-07-02,60,12\n",
        )
        snap = load_audience(original)
        copy = tmp_path / "b.csv"
        write_audience_csv(snap, copy)
        assert copy.read_text() == original.read_text()


class TestLoadCensus:
    def test_one_country_both_genders_row_count(self, tmp_path):
        lines = ["country,gender,age,population"]
        for gender in ("male", "female"):
            for age in range(13, 66):
                lines.append(f"US,{gender},{age},100")
        path = write(tmp_path, "c.csv", "\n".join(lines) + "\n")
        table = load_census(path)
        assert len(table.rows) == 106

    def test_alias_resolution(self, tmp_path):
        path = write(
            tmp_path, "c.csv", "country,gender,age,population\nUnited States,male,30,5\n"
        )
        table = load_census(path)
        assert ("US", "male", 30) in table.rows

    def test_unmapped_reported_not_guessed(self, tmp_path):
        path = write(
            tmp_path, "c.csv", "country,gender,age,population\nAtlantis,male,30,5\n"
        )
        table = load_census(path)
        assert table.unmapped == ("Atlantis",)
        assert not table.rows

    def test_negative_population_rejected(self, tmp_path):
        path = write(tmp_path, "c.csv", "country,gender,age,population\nUS,male,30,-5\n")
        with pytest.raises(ParseError, match="population"):
            load_census(path)

    def test_duplicate_key_rejected(self, tmp_path):
        path = write(
            tmp_path,
            "c.csv",
            "country,gender,age,population\nUS,male,30,5\nUS,male,30,6\n",
        )
        with pytest.raises(IntegrityError):
            load_census(path)


INDICATOR_HEADER = ",".join(dataset.INDICATOR_COLUMNS)


def indicator_line(country="US", year=2015, eco="0.7", **overrides):
    row = {
        "country": country,
        "year": str(year),
        "eco": eco,
        "edu": "0.9",
        "health": "0.95",
        "pol": "0.2",
        "gdp_ppp": "30000",
        "internet_penetration": "0.8",
        "quintile_ratio": "6.0",
        "population": "1000000",
        "pdi": "",
        "idv": "",
        "mas": "",
        "uai": "",
    }
    row.update({k: str(v) for k, v in overrides.items()})
    return ",".join(row[c] for c in dataset.INDICATOR_COLUMNS)


class TestLoadIndicators:
    def test_out_of_range_subindex_rejected(self, tmp_path):
        path = write(
            tmp_path, "i.csv", f"{INDICATOR_HEADER}\n{indicator_line(eco='1.2')}\n"
        )
        with pytest.raises(ParseError, match="eco"):
            load_indicators(path, require_years=None)

    def test_empty_hofstede_loaded_as_nulls(self, tmp_path):
        path = write(tmp_path, "i.csv", f"{INDICATOR_HEADER}\n{indicator_line()}\n")
        table = load_indicators(path, require_years=None)
        row = table.get("US", 2015)
        assert row.pdi is None and row.uai is None
        assert row.eco == 0.7

    def test_required_years_enforced(self, tmp_path):
        path = write(tmp_path, "i.csv", f"{INDICATOR_HEADER}\n{indicator_line(year=2015)}\n")
        with pytest.raises(IntegrityError, match="2016"):
            load_indicators(path)

    def test_nulls_stay_nulls(self, tmp_path):
        path = write(
            tmp_path,
            "i.csv",
            f"{INDICATOR_HEADER}\n{indicator_line(quintile_ratio='')}\n",
        )
        table = load_indicators(path, require_years=None)
        assert table.value("US", 2015, "quintile_ratio") is None


class TestCanonicalCountry:
    @pytest.mark.parametrize(
        "raw,expected",
        [("US", "US"), ("us", "US"), ("United Kingdom", "GB"), ("viet nam", "VN"), ("Xanadu", None)],
    )
    def test_mapping(self, raw, expected):
        assert canonical_country(raw) == expected


@settings(max_examples=30, deadline=None)
@given(
    st.lists(
        st.tuples(
            st.sampled_from(["US", "GB", "DE"]),
            st.sampled_from(["male", "female"]),
            st.integers(min_value=13, max_value=65),
            st.integers(min_value=0, max_value=30),
            st.integers(min_value=0, max_value=10**6),
        ),
        min_size=1,
        max_size=30,
        unique_by=lambda t: (t[0], t[1], t[2], t[3]),
    )
)
def test_roundtrip_property(tmp_path_factory, rows):
    cells = tuple(
        AudienceCell(c, g, b, dt.date(2015, 7, 1) + dt.timedelta(days=off), total, total // 2)
        for c, g, b, off, total in rows
    )
    snap = SnapshotSet(cells=cells, label="t", source="replay")
    tmp = tmp_path_factory.mktemp("rt") / "a.csv"
    write_audience_csv(snap, tmp)
    again = dataset.load_audience(tmp)
    assert [c.key for c in again] == [c.key for c in snap]
    assert [(c.total_accounts, c.dau) for c in again] == [
        (c.total_accounts, c.dau) for c in snap
    ]


class TestCoverageReport:
    def test_fixture_coverage(self, snapshots, census, indicators, panel_2015):
        report = dataset.coverage_report(snapshots, census, indicators, month="2015-07")
        assert report.no_census == ("EG",)
        assert report.unmapped_census == ("Atlantis",)
        assert report.unmapped_indicators == ("Narnia",)
        # candidate Ns equal what the frame builders accept (cross-module consistency)
        fgd_countries, _ = models._fgd_model_rows(panel_2015, indicators, "internet", 2015)
        assert report.model_n["fgd"] == len(fgd_countries)
        candidates, _ = models._network_rows(panel_2015)
        assert report.model_n["network"] == 2 * len(candidates)
        rows, _, _, _ = models._changes_rows("eco", panel_2015, None, indicators, "gdp")
        assert report.model_n["delta_eco"] == len(rows)

    def test_missing_indicator_lists(self, snapshots, census, indicators):
        report = dataset.coverage_report(snapshots, census, indicators, month="2015-07")
        assert "NG" in report.missing_indicator["quintile_ratio"]
        assert "PH" in report.missing_indicator["internet_penetration"]

    def test_month2_adds_divide_changes_count(
        self, snapshots, census, indicators, panel_2015, panel_2016
    ):
        report = dataset.coverage_report(
            snapshots, census, indicators, month="2015-07", month2="2016-07"
        )
        rows, _, _, _ = models._changes_rows("fgd", panel_2015, panel_2016, indicators, "gdp")
        assert report.model_n["delta_fgd"] == len(rows)

    def test_empty_intersection_is_valid(self, tmp_path):
        snap = SnapshotSet(
            cells=(AudienceCell("ZZ", "male", 20, dt.date(2015, 7, 1), 10, 5),),
            label="t",
            source="replay",
        )
        census = dataset.CensusTable(rows={})
        indicators = dataset.IndicatorTable(rows={})
        report = dataset.coverage_report(snap, census, indicators, month="2015-07")
        assert report.no_census == ("ZZ",)
        assert report.model_n == {}
