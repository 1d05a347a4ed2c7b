"""Panel aggregation and divide metrics.

A CountryGenderPanel holds, per (country, gender), the month-median active
users A summed over an age window, the census population P for the same
window, and the activity ratio R = A/P. Country-level stats (registered
accounts, total population, DAU-weighted mean age) feed penetration and
the mean-age control. All aggregation iterates keys in sorted order, so
results are bit-identical however the input cells were ordered.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

from .dataset import AGE_BIN_TOP, AGE_MIN, GENDERS, CensusTable, SnapshotSet
from .errors import ConfigError, MissingDataError, UndefinedMetricError

DEFAULT_AGE_WINDOW = (13, 65)


def audience_bins(age_window: tuple[int, int]) -> tuple[int, ...]:
    """Audience bins inside a window; the 65plus bin counts only when hi = 65."""
    lo, hi = age_window
    if not (AGE_MIN <= lo <= hi <= AGE_BIN_TOP):
        raise ConfigError(f"age window {age_window} must satisfy 13 <= lo <= hi <= 65")
    bins = list(range(lo, min(hi, AGE_BIN_TOP - 1) + 1))
    if hi == AGE_BIN_TOP:
        bins.append(AGE_BIN_TOP)
    return tuple(bins)


def median_dau(
    snapshots: SnapshotSet, country: str, gender: str, age_bin: int, month: str
) -> float:
    """Median of the daily active-user counts for one segment over a month.

    Even day counts use the mean of the two middle values.
    """
    values = _month_values(snapshots, country, gender, age_bin, month, "dau")
    if values is None:
        raise MissingDataError(
            f"no observations for ({country}, {gender}, {age_bin}, {month})"
        )
    return float(np.median(values))


def _month_values(snapshots, country, gender, age_bin, month, attr):
    dates = snapshots.month_dates(month)
    values = []
    for date in dates:
        cell = snapshots.get(country, gender, age_bin, date)
        if cell is not None:
            values.append(getattr(cell, attr))
    return np.asarray(values, dtype=np.float64) if values else None


@dataclass(frozen=True)
class PanelGenderRow:
    active: float  # A: summed month-median DAU over the window
    population: int  # P: census population in the window
    ratio: float  # R = A/P


@dataclass(frozen=True)
class CountryStats:
    accounts_total: float
    population_total: int
    mean_active_age: float | None


@dataclass(frozen=True)
class CountryGenderPanel:
    month: str
    age_window: tuple[int, int]
    rows: Mapping[tuple[str, str], PanelGenderRow]
    country_stats: Mapping[str, CountryStats]
    exclusions: Mapping[str, tuple[str, ...]] = field(default_factory=dict)

    def countries(self) -> tuple[str, ...]:
        return tuple(sorted(self.country_stats))

    def row(self, country: str, gender: str) -> PanelGenderRow:
        return self.rows[(country, gender)]


def build_panel(
    snapshots: SnapshotSet,
    census: CensusTable,
    month: str,
    age_window: tuple[int, int] = DEFAULT_AGE_WINDOW,
) -> CountryGenderPanel:
    """Aggregate a month of snapshots against census populations.

    Countries missing census coverage or missing a gender in the audience
    data are excluded and listed in the panel's exclusions. Raises
    MissingDataError when the month has no snapshot days at all and
    ConfigError when nothing survives exclusion.
    """
    bins = audience_bins(age_window)
    lo, hi = age_window
    if not snapshots.month_dates(month):
        raise MissingDataError(f"no snapshot days in month {month}")

    rows: dict[tuple[str, str], PanelGenderRow] = {}
    stats: dict[str, CountryStats] = {}
    excl: dict[str, list[str]] = {
        "missing_gender": [],
        "no_census": [],
        "zero_population": [],
        "no_activity_data": [],
    }

    for country in snapshots.countries():
        gender_data: dict[str, tuple[float, float]] = {}
        age_weights: dict[int, float] = {}
        for gender in GENDERS:
            active = 0.0
            accounts = 0.0
            seen = False
            for age_bin in bins:
                dau_vals = _month_values(snapshots, country, gender, age_bin, month, "dau")
                acc_vals = _month_values(
                    snapshots, country, gender, age_bin, month, "total_accounts"
                )
                if dau_vals is None:
                    continue
                seen = True
                bin_dau = float(np.median(dau_vals))
                active += bin_dau
                age_weights[age_bin] = age_weights.get(age_bin, 0.0) + bin_dau
                if acc_vals is not None:
                    accounts += float(np.median(acc_vals))
            if seen:
                gender_data[gender] = (active, accounts)

        if not gender_data:
            excl["no_activity_data"].append(country)
            continue
        if len(gender_data) < len(GENDERS):
            excl["missing_gender"].append(country)
            continue

        populations = {g: census.window_population(country, g, lo, hi) for g in GENDERS}
        if any(p is None for p in populations.values()):
            excl["no_census"].append(country)
            continue
        if any(p == 0 for p in populations.values()):
            excl["zero_population"].append(country)
            continue

        for gender in GENDERS:
            active, _ = gender_data[gender]
            pop = populations[gender]
            rows[(country, gender)] = PanelGenderRow(
                active=active, population=pop, ratio=active / pop
            )
        total_dau = sum(age_weights.values())
        mean_age = (
            sum(age * w for age, w in sorted(age_weights.items())) / total_dau
            if total_dau > 0
            else None
        )
        stats[country] = CountryStats(
            accounts_total=sum(gender_data[g][1] for g in GENDERS),
            population_total=sum(populations.values()),
            mean_active_age=mean_age,
        )

    if not stats:
        raise ConfigError(
            f"panel for month {month}, window {age_window} is empty after exclusions"
        )
    return CountryGenderPanel(
        month=month,
        age_window=age_window,
        rows=rows,
        country_stats=stats,
        exclusions={k: tuple(v) for k, v in excl.items()},
    )


def fgd(panel: CountryGenderPanel, country: str) -> float:
    """log(R_male / R_female), natural log."""
    try:
        r_m = panel.row(country, "male").ratio
        r_f = panel.row(country, "female").ratio
    except KeyError:
        raise UndefinedMetricError(f"no panel rows for {country}") from None
    if r_m <= 0.0 or r_f <= 0.0:
        raise UndefinedMetricError(f"activity ratio is zero for {country}; divide undefined")
    return math.log(r_m / r_f)


def penetration(panel: CountryGenderPanel, country: str) -> float:
    """Registered accounts over census population, both genders; may exceed 1."""
    try:
        stats = panel.country_stats[country]
    except KeyError:
        raise UndefinedMetricError(f"no panel rows for {country}") from None
    if stats.population_total <= 0:
        raise UndefinedMetricError(f"zero population for {country}")
    return stats.accounts_total / stats.population_total


def mean_active_age(panel: CountryGenderPanel, country: str) -> float:
    """DAU-weighted mean of bin representative ages (65plus counts as 65)."""
    try:
        stats = panel.country_stats[country]
    except KeyError:
        raise UndefinedMetricError(f"no panel rows for {country}") from None
    if stats.mean_active_age is None:
        raise UndefinedMetricError(f"no active bins for {country}; mean age undefined")
    return stats.mean_active_age


@dataclass(frozen=True)
class DivideMetrics:
    country: str
    fgd: float  # NaN when either activity ratio is zero
    penetration: float
    mean_active_age: float


def divide_metrics(panel: CountryGenderPanel) -> tuple[DivideMetrics, ...]:
    out = []
    for country in panel.countries():
        try:
            value = fgd(panel, country)
        except UndefinedMetricError:
            value = float("nan")
        out.append(
            DivideMetrics(
                country=country,
                fgd=value,
                penetration=penetration(panel, country),
                mean_active_age=mean_active_age(panel, country),
            )
        )
    return tuple(out)


def panel_to_dict(panel: CountryGenderPanel) -> dict:
    """JSON-safe panel representation (inverse of panel_from_dict)."""
    return {
        "kind": "panel",
        "month": panel.month,
        "age_window": list(panel.age_window),
        "rows": [
            {
                "country": country,
                "gender": gender,
                "active": row.active,
                "population": row.population,
                "ratio": row.ratio,
            }
            for (country, gender), row in sorted(panel.rows.items())
        ],
        "country_stats": {
            country: {
                "accounts_total": stats.accounts_total,
                "population_total": stats.population_total,
                "mean_active_age": stats.mean_active_age,
            }
            for country, stats in sorted(panel.country_stats.items())
        },
        "exclusions": {k: list(v) for k, v in panel.exclusions.items()},
    }


def panel_from_dict(data: dict) -> CountryGenderPanel:
    if data.get("kind") != "panel":
        raise ConfigError("not a panel artifact (missing kind == 'panel')")
    rows = {
        (r["country"], r["gender"]): PanelGenderRow(
            active=r["active"], population=r["population"], ratio=r["ratio"]
        )
        for r in data["rows"]
    }
    stats = {
        country: CountryStats(
            accounts_total=s["accounts_total"],
            population_total=s["population_total"],
            mean_active_age=s["mean_active_age"],
        )
        for country, s in data["country_stats"].items()
    }
    return CountryGenderPanel(
        month=data["month"],
        age_window=tuple(data["age_window"]),
        rows=rows,
        country_stats=stats,
        exclusions={k: tuple(v) for k, v in data.get("exclusions", {}).items()},
    )


def write_fgd_csv(panel: CountryGenderPanel, path) -> None:
    """Write the per-country metric table (6 decimal places; undefined FGD empty)."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [
                "country",
                "fgd",
                "penetration",
                "mean_active_age",
                "A_male",
                "A_female",
                "P_male",
                "P_female",
            ]
        )
        for m in divide_metrics(panel):
            male = panel.row(m.country, "male")
            female = panel.row(m.country, "female")
            writer.writerow(
                [
                    m.country,
                    "" if math.isnan(m.fgd) else f"{m.fgd:.6f}",
                    f"{m.penetration:.6f}",
                    f"{m.mean_active_age:.6f}",
                    f"{male.active:.6f}",
                    f"{female.active:.6f}",
                    f"{male.population:.6f}",
                    f"{female.population:.6f}",
                ]
            )
