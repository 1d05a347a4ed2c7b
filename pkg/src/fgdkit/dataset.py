"""Domain records and loaders for the three input tables.

Loaders are total functions over well-formed files: they validate every
row (with line numbers in errors), never impute missing values, and the
loaded tables are immutable. Country keys are ISO-3166 alpha-2; a small
alias map resolves common census/indicator naming mismatches, and names
it cannot resolve are reported on the table, never guessed.
"""

from __future__ import annotations

import csv
import datetime as dt
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from .errors import IntegrityError, ParseError

GENDERS = ("male", "female")
AGE_MIN = 13
AGE_BIN_TOP = 65  # sentinel for the open-ended "65plus" bin
AGE_BIN_LABEL_TOP = "65plus"

AUDIENCE_COLUMNS = ("country", "gender", "age_bin", "date", "total_accounts", "dau")
CENSUS_COLUMNS = ("country", "gender", "age", "population")
INDICATOR_COLUMNS = (
    "country",
    "year",
    "eco",
    "edu",
    "health",
    "pol",
    "gdp_ppp",
    "internet_penetration",
    "quintile_ratio",
    "population",
    "pdi",
    "idv",
    "mas",
    "uai",
)
SUBINDEX_FIELDS = ("eco", "edu", "health", "pol")

# Frequent non-ISO spellings in census and indicator exports.
COUNTRY_ALIASES = {
    "united states": "US",
    "united states of america": "US",
    "united kingdom": "GB",
    "great britain": "GB",
    "south korea": "KR",
    "korea, south": "KR",
    "republic of korea": "KR",
    "north korea": "KP",
    "korea, north": "KP",
    "russia": "RU",
    "russian federation": "RU",
    "iran": "IR",
    "iran (islamic republic of)": "IR",
    "syria": "SY",
    "syrian arab republic": "SY",
    "vietnam": "VN",
    "viet nam": "VN",
    "venezuela": "VE",
    "bolivia": "BO",
    "tanzania": "TZ",
    "united republic of tanzania": "TZ",
    "czech republic": "CZ",
    "czechia": "CZ",
    "slovak republic": "SK",
    "slovakia": "SK",
    "macedonia": "MK",
    "north macedonia": "MK",
    "moldova": "MD",
    "republic of moldova": "MD",
    "laos": "LA",
    "lao pdr": "LA",
    "brunei": "BN",
    "brunei darussalam": "BN",
    "cote d'ivoire": "CI",
    "ivory coast": "CI",
    "cape verde": "CV",
    "cabo verde": "CV",
    "democratic republic of the congo": "CD",
    "congo, dem. rep.": "CD",
    "republic of the congo": "CG",
    "congo, rep.": "CG",
    "myanmar": "MM",
    "burma": "MM",
    "egypt": "EG",
    "egypt, arab rep.": "EG",
    "gambia": "GM",
    "gambia, the": "GM",
    "bahamas": "BS",
    "bahamas, the": "BS",
    "kyrgyzstan": "KG",
    "kyrgyz republic": "KG",
    "saint lucia": "LC",
    "st. lucia": "LC",
    "hong kong": "HK",
    "hong kong sar, china": "HK",
    "taiwan": "TW",
    "palestine": "PS",
    "west bank and gaza": "PS",
}


def canonical_country(raw: str) -> str | None:
    """ISO alpha-2 code for a country field, or None when unresolvable."""
    value = raw.strip()
    if len(value) == 2 and value.isalpha():
        return value.upper()
    return COUNTRY_ALIASES.get(value.casefold())


def parse_age_bin(raw: str) -> int:
    if raw == AGE_BIN_LABEL_TOP:
        return AGE_BIN_TOP
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"expected an integer 13..64 or '{AGE_BIN_LABEL_TOP}', got {raw!r}")
    if not AGE_MIN <= value <= AGE_BIN_TOP - 1:
        raise ValueError(f"age bin {value} outside 13..64")
    return value


def age_bin_label(age_bin: int) -> str:
    return AGE_BIN_LABEL_TOP if age_bin == AGE_BIN_TOP else str(age_bin)


@dataclass(frozen=True)
class AudienceCell:
    """One audience observation for a (country, gender, age bin, day) segment."""

    country: str
    gender: str
    age_bin: int
    date: dt.date
    total_accounts: int
    dau: int

    def __post_init__(self):
        if self.gender not in GENDERS:
            raise ValueError(f"gender must be one of {GENDERS}, got {self.gender!r}")
        if not AGE_MIN <= self.age_bin <= AGE_BIN_TOP:
            raise ValueError(f"age bin {self.age_bin} outside {AGE_MIN}..{AGE_BIN_TOP}")
        if self.total_accounts < 0 or self.dau < 0:
            raise ValueError("counts must be non-negative")
        if self.dau > self.total_accounts:
            raise IntegrityError(
                f"dau {self.dau} exceeds total_accounts {self.total_accounts} "
                f"for ({self.country}, {self.gender}, {age_bin_label(self.age_bin)}, {self.date})"
            )

    @property
    def key(self) -> tuple:
        return (self.country, self.gender, self.age_bin, self.date)


@dataclass(frozen=True)
class SnapshotSet:
    """Validated collection of audience cells plus retrieval metadata."""

    cells: tuple[AudienceCell, ...]
    label: str
    source: str  # "live" | "replay"
    notes: Mapping = field(default_factory=dict)

    def __post_init__(self):
        if self.source not in ("live", "replay"):
            raise ValueError(f"source must be 'live' or 'replay', got {self.source!r}")
        index: dict[tuple, AudienceCell] = {}
        for cell in self.cells:
            if cell.key in index:
                c, g, b, d = cell.key
                raise IntegrityError(
                    f"duplicate audience key ({c}, {g}, {age_bin_label(b)}, {d})"
                )
            index[cell.key] = cell
        object.__setattr__(self, "_index", index)

    def __len__(self) -> int:
        return len(self.cells)

    def __iter__(self):
        return iter(self.cells)

    def get(self, country: str, gender: str, age_bin: int, date: dt.date) -> AudienceCell | None:
        return self._index.get((country, gender, age_bin, date))

    @property
    def dates(self) -> tuple[dt.date, ...]:
        return tuple(sorted({c.date for c in self.cells}))

    def months(self) -> tuple[str, ...]:
        return tuple(sorted({f"{d.year:04d}-{d.month:02d}" for d in self.dates}))

    def countries(self) -> tuple[str, ...]:
        return tuple(sorted({c.country for c in self.cells}))

    def month_dates(self, month: str) -> tuple[dt.date, ...]:
        return tuple(d for d in self.dates if f"{d.year:04d}-{d.month:02d}" == month)


@dataclass(frozen=True)
class CensusTable:
    rows: Mapping[tuple[str, str, int], int]  # (country, gender, age) -> population
    unmapped: tuple[str, ...] = ()

    def countries(self) -> tuple[str, ...]:
        return tuple(sorted({c for c, _, _ in self.rows}))

    def window_population(self, country: str, gender: str, lo: int, hi: int) -> int | None:
        """Total population for ages lo..hi inclusive; None when no ages covered."""
        ages = [
            pop
            for (c, g, age), pop in self.rows.items()
            if c == country and g == gender and lo <= age <= hi
        ]
        return sum(ages) if ages else None


@dataclass(frozen=True)
class IndicatorRow:
    country: str
    year: int
    eco: float | None = None
    edu: float | None = None
    health: float | None = None
    pol: float | None = None
    gdp_ppp: float | None = None
    internet_penetration: float | None = None
    quintile_ratio: float | None = None
    population: float | None = None
    pdi: float | None = None
    idv: float | None = None
    mas: float | None = None
    uai: float | None = None


@dataclass(frozen=True)
class IndicatorTable:
    rows: Mapping[tuple[str, int], IndicatorRow]
    unmapped: tuple[str, ...] = ()

    def countries(self) -> tuple[str, ...]:
        return tuple(sorted({c for c, _ in self.rows}))

    def years(self) -> tuple[int, ...]:
        return tuple(sorted({y for _, y in self.rows}))

    def get(self, country: str, year: int) -> IndicatorRow | None:
        return self.rows.get((country, year))

    def value(self, country: str, year: int, name: str) -> float | None:
        row = self.rows.get((country, year))
        return getattr(row, name) if row is not None else None


def _read_rows(path, expected_columns):
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("file is empty", line=1) from None
        if tuple(header) != expected_columns:
            raise ParseError(
                f"header {header!r} does not match required columns {list(expected_columns)!r}",
                line=1,
            )
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(expected_columns):
                raise ParseError(
                    f"expected {len(expected_columns)} fields, got {len(row)}", line=lineno
                )
            yield lineno, row


def _parse_int(raw: str, lineno: int, fieldname: str, minimum: int | None = None) -> int:
    try:
        value = int(raw)
    except ValueError:
        raise ParseError(f"expected an integer, got {raw!r}", line=lineno, field=fieldname) from None
    if minimum is not None and value < minimum:
        raise ParseError(f"value {value} below minimum {minimum}", line=lineno, field=fieldname)
    return value


def _parse_optional_float(raw: str, lineno: int, fieldname: str) -> float | None:
    if raw == "":
        return None
    try:
        return float(raw)
    except ValueError:
        raise ParseError(f"expected a number, got {raw!r}", line=lineno, field=fieldname) from None


def load_audience(path, label: str | None = None) -> SnapshotSet:
    """Load an audience snapshot CSV into a validated SnapshotSet."""
    cells = []
    for lineno, row in _read_rows(path, AUDIENCE_COLUMNS):
        raw_country, raw_gender, raw_bin, raw_date, raw_total, raw_dau = row
        country = raw_country.strip().upper()
        if len(country) != 2 or not country.isalpha():
            raise ParseError(
                f"expected an ISO alpha-2 code, got {raw_country!r}", line=lineno, field="country"
            )
        if raw_gender not in GENDERS:
            raise ParseError(
                f"expected one of {GENDERS}, got {raw_gender!r}", line=lineno, field="gender"
            )
        try:
            age_bin = parse_age_bin(raw_bin)
        except ValueError as exc:
            raise ParseError(str(exc), line=lineno, field="age_bin") from None
        try:
            date = dt.date.fromisoformat(raw_date)
        except ValueError:
            raise ParseError(
                f"expected an ISO 8601 date, got {raw_date!r}", line=lineno, field="date"
            ) from None
        total = _parse_int(raw_total, lineno, "total_accounts", minimum=0)
        dau = _parse_int(raw_dau, lineno, "dau", minimum=0)
        try:
            cells.append(AudienceCell(country, raw_gender, age_bin, date, total, dau))
        except IntegrityError as exc:
            raise IntegrityError(f"line {lineno}: {exc}") from None
    return SnapshotSet(cells=tuple(cells), label=label or Path(path).name, source="replay")


def write_audience_csv(snapshots: SnapshotSet, path) -> None:
    """Serialize a SnapshotSet back to the audience CSV schema, preserving cell order."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(AUDIENCE_COLUMNS)
        for cell in snapshots:
            writer.writerow(
                [
                    cell.country,
                    cell.gender,
                    age_bin_label(cell.age_bin),
                    cell.date.isoformat(),
                    cell.total_accounts,
                    cell.dau,
                ]
            )


def load_census(path) -> CensusTable:
    """Load a census CSV; rows with unresolvable country names are reported, not guessed."""
    rows: dict[tuple[str, str, int], int] = {}
    unmapped: list[str] = []
    for lineno, row in _read_rows(path, CENSUS_COLUMNS):
        raw_country, raw_gender, raw_age, raw_pop = row
        country = canonical_country(raw_country)
        if country is None:
            if raw_country not in unmapped:
                unmapped.append(raw_country)
            continue
        if raw_gender not in GENDERS:
            raise ParseError(
                f"expected one of {GENDERS}, got {raw_gender!r}", line=lineno, field="gender"
            )
        age = _parse_int(raw_age, lineno, "age", minimum=0)
        population = _parse_int(raw_pop, lineno, "population", minimum=0)
        key = (country, raw_gender, age)
        if key in rows:
            raise IntegrityError(f"line {lineno}: duplicate census key {key}")
        rows[key] = population
    return CensusTable(rows=rows, unmapped=tuple(unmapped))


def load_indicators(path, require_years: tuple[int, ...] | None = (2015, 2016)) -> IndicatorTable:
    """Load the indicator CSV; empty strings are kept as nulls, never imputed.

    ``require_years`` enforces that eco/edu/pol are covered in each listed
    year somewhere in the table (the changes models need both 2015 and
    2016); pass None to accept partial tables.
    """
    rows: dict[tuple[str, int], IndicatorRow] = {}
    unmapped: list[str] = []
    for lineno, row in _read_rows(path, INDICATOR_COLUMNS):
        raw_country = row[0]
        country = canonical_country(raw_country)
        if country is None:
            if raw_country not in unmapped:
                unmapped.append(raw_country)
            continue
        year = _parse_int(row[1], lineno, "year")
        values: dict[str, float | None] = {}
        for name, raw in zip(INDICATOR_COLUMNS[2:], row[2:]):
            value = _parse_optional_float(raw, lineno, name)
            if name in SUBINDEX_FIELDS and value is not None and not 0.0 <= value <= 1.0:
                raise ParseError(
                    f"sub-index value {value} outside [0, 1]", line=lineno, field=name
                )
            values[name] = value
        key = (country, year)
        if key in rows:
            raise IntegrityError(f"line {lineno}: duplicate indicator key {key}")
        rows[key] = IndicatorRow(country=country, year=year, **values)

    if require_years:
        years_present = {y for _, y in rows}
        for year in require_years:
            if year not in years_present:
                raise IntegrityError(f"indicator table lacks any rows for required year {year}")
            for name in ("eco", "edu", "pol"):
                if not any(getattr(r, name) is not None for (_, y), r in rows.items() if y == year):
                    raise IntegrityError(
                        f"indicator table has no non-null {name} values for required year {year}"
                    )
    return IndicatorTable(rows=rows, unmapped=tuple(unmapped))


@dataclass
class ValidationReport:
    """Cross-table coverage: what is excluded where, and candidate N per model."""

    audience_countries: tuple[str, ...]
    no_census: tuple[str, ...]
    missing_indicator: dict[str, tuple[str, ...]]
    model_n: dict[str, int]
    unmapped_census: tuple[str, ...] = ()
    unmapped_indicators: tuple[str, ...] = ()

    def to_json_dict(self) -> dict:
        return {
            "audience_countries": list(self.audience_countries),
            "no_census": list(self.no_census),
            "missing_indicator": {k: list(v) for k, v in self.missing_indicator.items()},
            "model_n": dict(self.model_n),
            "unmapped_census": list(self.unmapped_census),
            "unmapped_indicators": list(self.unmapped_indicators),
        }


def coverage_report(
    snapshots: SnapshotSet,
    census: CensusTable,
    indicators: IndicatorTable,
    month: str | None = None,
    month2: str | None = None,
    age_window: tuple[int, int] = (13, AGE_BIN_TOP),
    year: int = 2015,
) -> ValidationReport:
    """Report coverage gaps and the candidate sample size of each named model.

    The N values use the same row predicates as the model frame builders,
    so they match the row counts those builders later accept.
    """
    from . import metrics as metrics_mod
    from . import models as models_mod

    lo, hi = age_window
    audience_countries = snapshots.countries()
    if month is None:
        months = snapshots.months()
        month = months[0] if months else None

    no_census = tuple(
        c
        for c in audience_countries
        if any(census.window_population(c, g, lo, hi) in (None, 0) for g in GENDERS)
    )

    indicator_fields = (
        "eco",
        "edu",
        "health",
        "pol",
        "gdp_ppp",
        "internet_penetration",
        "quintile_ratio",
        "population",
    )
    missing_indicator = {
        name: tuple(
            c for c in audience_countries if indicators.value(c, year, name) is None
        )
        for name in indicator_fields
    }

    model_n: dict[str, int] = {}
    if month is not None:
        try:
            panel = metrics_mod.build_panel(snapshots, census, month, age_window)
        except Exception:
            panel = None
        panel2 = None
        if panel is not None and month2 is not None:
            try:
                panel2 = metrics_mod.build_panel(snapshots, census, month2, age_window)
            except Exception:
                panel2 = None
        if panel is not None:
            model_n = models_mod.candidate_sample_sizes(
                panel, indicators, year=year, panel_2016=panel2
            )

    return ValidationReport(
        audience_countries=audience_countries,
        no_census=no_census,
        missing_indicator=missing_indicator,
        model_n=model_n,
        unmapped_census=census.unmapped,
        unmapped_indicators=indicators.unmapped,
    )
