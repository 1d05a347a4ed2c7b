"""Shared synthetic builders and independent oracles for the test suite."""

from __future__ import annotations

import math

import numpy as np

from fgdkit.dataset import IndicatorRow, IndicatorTable
from fgdkit.metrics import CountryGenderPanel, CountryStats, PanelGenderRow
from fgdkit.stats import ModelFrame

COUNTRY_POOL = [
    f"{a}{b}"
    for a in "ABCDEFGHIJKLMNOPQRSTUVWXYZ"
    for b in "ABCDEFGHIJKLMNOPQRSTUVWXYZ"
]


def normal_equation_ols(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Brute-force OLS via explicit normal equations (independent oracle)."""
    return np.linalg.pinv(x.T @ x) @ (x.T @ y)


def random_frame(seed: int, n: int = 40, k: int = 3) -> ModelFrame:
    rng = np.random.default_rng(seed)
    terms = [(f"x{j}", rng.standard_normal(n), "raw") for j in range(k)]
    beta = rng.uniform(-2, 2, size=k + 1)
    x = np.column_stack([np.ones(n)] + [t[1] for t in terms])
    y = x @ beta + rng.standard_normal(n) * 0.5
    return ModelFrame.build("y", y, terms, labels=[str(i) for i in range(n)])


def line_frame(slope=2.0, intercept=1.0, xs=(0.0, 1.0, 2.0)) -> ModelFrame:
    xs = np.asarray(xs, dtype=float)
    y = intercept + slope * xs
    return ModelFrame.build("y", y, [("x", xs, "raw")], labels=[str(i) for i in range(len(xs))])


def make_panel(
    fgd_values: dict[str, float],
    penetration_values: dict[str, float] | None = None,
    mean_ages: dict[str, float] | None = None,
    base_ratio: float = 0.2,
    population: int = 1_000_000,
    month: str = "2015-07",
) -> CountryGenderPanel:
    """Panel with exactly the requested per-country divide and penetration.

    Unspecified penetrations and ages get a deterministic spread (never a
    constant column, which would be collinear with the intercept once
    ranked).
    """
    ordered = sorted(fgd_values)
    n = len(ordered)
    default_pen = {c: 0.15 + 0.7 * i / max(n - 1, 1) for i, c in enumerate(ordered)}
    default_age = {c: 24.0 + 12.0 * ((i * 7) % n) / max(n, 1) for i, c in enumerate(ordered)}
    rows = {}
    stats = {}
    for country, fgd in fgd_values.items():
        pen = (penetration_values or default_pen)[country]
        age = (mean_ages or default_age)[country]
        r_f = base_ratio
        r_m = base_ratio * math.exp(fgd)
        rows[(country, "male")] = PanelGenderRow(
            active=r_m * population, population=population, ratio=r_m
        )
        rows[(country, "female")] = PanelGenderRow(
            active=r_f * population, population=population, ratio=r_f
        )
        stats[country] = CountryStats(
            accounts_total=pen * 2 * population,
            population_total=2 * population,
            mean_active_age=age,
        )
    return CountryGenderPanel(
        month=month, age_window=(13, 65), rows=rows, country_stats=stats, exclusions={}
    )


def make_indicators(values: dict[str, dict[int, dict[str, float]]]) -> IndicatorTable:
    """IndicatorTable from {country: {year: {field: value}}}."""
    rows = {}
    for country, by_year in values.items():
        for year, fields in by_year.items():
            rows[(country, year)] = IndicatorRow(country=country, year=year, **fields)
    return IndicatorTable(rows=rows)


def world_indicators(
    rng: np.random.Generator,
    countries: list[str],
    eco15: np.ndarray,
    eco16: np.ndarray,
    edu15: np.ndarray | None = None,
    edu16: np.ndarray | None = None,
    gdp: np.ndarray | None = None,
    hofstede: bool = False,
) -> IndicatorTable:
    n = len(countries)
    edu15 = edu15 if edu15 is not None else rng.uniform(0.5, 1.0, n)
    edu16 = edu16 if edu16 is not None else edu15 + rng.normal(0, 0.003, n)
    gdp = gdp if gdp is not None else np.exp(rng.uniform(7, 11, n))
    values: dict = {}
    for i, c in enumerate(countries):
        base = {
            "health": float(rng.uniform(0.9, 1.0)),
            "pol": float(rng.uniform(0.1, 0.5)),
            "gdp_ppp": float(gdp[i]),
            "internet_penetration": float(rng.uniform(0.1, 0.9)),
            "quintile_ratio": float(rng.uniform(4, 20)),
            "population": float(rng.uniform(1e6, 1e8)),
        }
        if hofstede:
            base.update(
                pdi=float(rng.uniform(10, 95)),
                idv=float(rng.uniform(10, 95)),
                mas=float(rng.uniform(10, 95)),
                uai=float(rng.uniform(10, 95)),
            )
        values[c] = {
            2015: dict(base, eco=float(np.clip(eco15[i], 0, 1)), edu=float(np.clip(edu15[i], 0, 1))),
            2016: dict(base, eco=float(np.clip(eco16[i], 0, 1)), edu=float(np.clip(edu16[i], 0, 1))),
        }
    return make_indicators(values)
