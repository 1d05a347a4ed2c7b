#!/usr/bin/env python3
"""Regenerate the bundled synthetic fixtures under tests/fixtures/.

Fully seeded: rerunning this script reproduces every file byte for byte.
The world is built so the pipeline has realistic structure (an education
gradient in the divide, superlinear penetration scaling, a mild positive
effect of a low divide on next-year economic equality) without pretending
to be any real dataset.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "tests" / "fixtures"

SEED = 20150701
COUNTRIES = (
    "US GB DE FR ES IT PT NL BE SE NO FI DK PL CZ HU RO GR TR RU "
    "UA BR MX AR CL CO PE CA AU NZ JP KR IN ID TH PH VN ZA NG EG"
).split()
# census rows for these countries use full names, exercising the alias map
NAMED_IN_CENSUS = {
    "US": "United States",
    "GB": "United Kingdom",
    "RU": "Russian Federation",
    "VN": "Viet Nam",
    "KR": "Republic of Korea",
    "CZ": "Czech Republic",
}
CENSUS_MISSING = {"EG"}  # audience country without census coverage
INDICATOR_GAPS = {"NG": "quintile_ratio", "PH": "internet_penetration"}
HOFSTEDE_MISSING = set("PT NL BE SE NO FI DK PL CZ HU".split())

DATES_2015 = ("2015-07-01", "2015-07-11", "2015-07-21")
DATES_2016 = ("2016-07-01", "2016-07-11", "2016-07-21")
AGES = range(13, 81)
BINS = list(range(13, 65)) + ["65plus"]


def bin_age(b) -> int:
    return 67 if b == "65plus" else int(b)


def dau_profile(age: int) -> float:
    return math.exp(-(((age - 27.0) / 14.0) ** 2))


def accounts_profile(age: int) -> float:
    return math.exp(-(((age - 30.0) / 18.0) ** 2))


def main() -> None:
    rng = np.random.default_rng(SEED)
    FIXTURES.mkdir(parents=True, exist_ok=True)

    world = {}
    for code in COUNTRIES:
        d = rng.uniform(0.05, 0.95)
        edu = float(np.clip(0.55 + 0.42 * d + rng.normal(0, 0.05), 0.4, 1.0))
        eco = float(np.clip(0.45 + 0.30 * d + rng.normal(0, 0.07), 0.2, 1.0))
        health = float(np.clip(0.92 + 0.05 * d + rng.normal(0, 0.015), 0.85, 1.0))
        pol = float(np.clip(0.08 + 0.35 * rng.uniform(), 0.0, 1.0))
        internet = float(np.clip(0.12 + 0.75 * d + rng.normal(0, 0.05), 0.03, 0.97))
        gdp = float(np.exp(7.2 + 2.8 * d + rng.normal(0, 0.2)))
        quintile = float(np.clip(18.0 - 12.0 * d + rng.normal(0, 1.5), 3.0, 30.0))
        fgd = float(1.2 - 1.5 * edu + 0.3 * (0.5 - internet) + rng.normal(0, 0.07))
        pen = float(np.clip(0.06 + 0.75 * d + rng.normal(0, 0.03), 0.04, 0.92))
        total_pop = float(10 ** (5.8 + 1.8 * rng.uniform()))
        world[code] = dict(
            d=d, edu=edu, eco=eco, health=health, pol=pol, internet=internet,
            gdp=gdp, quintile=quintile, fgd=fgd, pen=pen, total_pop=total_pop,
        )

    # census ------------------------------------------------------------
    census_rows = []
    census_pop: dict[tuple[str, str, int], int] = {}
    for code in COUNTRIES:
        if code in CENSUS_MISSING:
            continue
        name = NAMED_IN_CENSUS.get(code, code)
        w = world[code]
        weights = np.array([math.exp(-0.012 * a) for a in AGES])
        weights /= weights.sum()
        for age, weight in zip(AGES, weights):
            share_m = 0.51 - 0.0005 * age
            pop_total_age = w["total_pop"] * weight
            for gender, share in (("male", share_m), ("female", 1.0 - share_m)):
                pop = int(round(pop_total_age * share))
                census_rows.append([name, gender, age, pop])
                census_pop[(code, gender, age)] = pop
    census_rows.append(["Atlantis", "male", 30, 1000])  # unmappable, reported
    with (FIXTURES / "census.csv").open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["country", "gender", "age", "population"])
        writer.writerows(census_rows)

    # audience ----------------------------------------------------------
    def window_pop(code: str, gender: str) -> float:
        return sum(census_pop.get((code, gender, a), 0) for a in range(13, 66))

    def ratios(code: str, year: int, rng_local) -> dict[str, float]:
        w = world[code]
        fgd = w["fgd"] if year == 2015 else w["fgd"] + float(rng_local.normal(0, 0.05))
        r_m = 0.45 * w["pen"] ** 1.25 * math.exp(float(rng_local.normal(0, 0.04)))
        return {"male": r_m, "female": r_m * math.exp(-fgd), "_fgd": fgd}

    audience_rows = []
    fgd_2016: dict[str, float] = {}
    for code in COUNTRIES:
        has_census = code not in CENSUS_MISSING
        for year, dates in ((2015, DATES_2015), (2016, DATES_2016)):
            rr = ratios(code, year, rng)
            if year == 2016:
                fgd_2016[code] = rr["_fgd"]
            for gender in ("male", "female"):
                pop_w = window_pop(code, gender) if has_census else world[code]["total_pop"] * 0.35
                target_active = rr[gender] * pop_w
                target_accounts = world[code]["pen"] * pop_w
                dau_w = np.array([dau_profile(bin_age(b)) for b in BINS])
                acc_w = np.array([accounts_profile(bin_age(b)) for b in BINS])
                dau_per_bin = target_active * dau_w / dau_w.sum()
                acc_per_bin = target_accounts * acc_w / acc_w.sum() / 2.0  # per gender
                for b, dau_mean, acc_mean in zip(BINS, dau_per_bin, acc_per_bin):
                    for date in dates:
                        dau = max(int(round(dau_mean * (1.0 + rng.normal(0, 0.02)))), 0)
                        acc = max(int(round(acc_mean * (1.0 + rng.normal(0, 0.01)))), dau)
                        audience_rows.append([code, gender, b, date, acc, dau])
    with (FIXTURES / "audience.csv").open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["country", "gender", "age_bin", "date", "total_accounts", "dau"])
        writer.writerows(audience_rows)

    # indicators ----------------------------------------------------------
    def fmt(x, digits=6):
        return f"{x:.{digits}f}"

    indicator_rows = []
    mean_fgd = float(np.mean([world[c]["fgd"] for c in COUNTRIES]))
    for code in COUNTRIES:
        w = world[code]
        pop_indicator = int(w["total_pop"])
        hof = (
            ["", "", "", ""]
            if code in HOFSTEDE_MISSING
            else [f"{rng.uniform(10, 95):.1f}" for _ in range(4)]
        )
        gap = INDICATOR_GAPS.get(code)
        eco16 = float(
            np.clip(w["eco"] + 0.004 - 0.045 * (w["fgd"] - mean_fgd) + rng.normal(0, 0.012), 0, 1)
        )
        edu16 = float(np.clip(w["edu"] + rng.normal(0, 0.004), 0, 1))
        pol16 = float(np.clip(w["pol"] + rng.normal(0, 0.004), 0, 1))
        for year, eco, edu, pol in ((2015, w["eco"], w["edu"], w["pol"]), (2016, eco16, edu16, pol16)):
            row = {
                "country": code,
                "year": year,
                "eco": fmt(eco, 4),
                "edu": fmt(edu, 4),
                "health": fmt(w["health"], 4),
                "pol": fmt(pol, 4),
                "gdp_ppp": fmt(w["gdp"], 2),
                "internet_penetration": fmt(w["internet"], 4),
                "quintile_ratio": fmt(w["quintile"], 3),
                "population": str(pop_indicator),
                "pdi": hof[0],
                "idv": hof[1],
                "mas": hof[2],
                "uai": hof[3],
            }
            if gap:
                row[gap] = ""
            indicator_rows.append(row)
    # a country present only in indicators, and one unmappable name
    for year in (2015, 2016):
        indicator_rows.append(
            {
                "country": "IS",
                "year": year,
                "eco": "0.8500",
                "edu": "0.9990",
                "health": "0.9650",
                "pol": "0.5500",
                "gdp_ppp": "42000.00",
                "internet_penetration": "0.9600",
                "quintile_ratio": "5.100",
                "population": "330000",
                "pdi": "",
                "idv": "",
                "mas": "",
                "uai": "",
            }
        )
    indicator_rows.append(
        {
            "country": "Narnia", "year": 2015, "eco": "0.5", "edu": "0.5", "health": "0.9",
            "pol": "0.1", "gdp_ppp": "1000", "internet_penetration": "0.2",
            "quintile_ratio": "10", "population": "1000", "pdi": "", "idv": "", "mas": "", "uai": "",
        }
    )
    columns = [
        "country", "year", "eco", "edu", "health", "pol", "gdp_ppp",
        "internet_penetration", "quintile_ratio", "population", "pdi", "idv", "mas", "uai",
    ]
    with (FIXTURES / "indicators.csv").open("w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns)
        writer.writeheader()
        writer.writerows(indicator_rows)

    # crawl fixture -------------------------------------------------------
    crawl_dir = FIXTURES / "crawl_fixture"
    crawl_dir.mkdir(exist_ok=True)
    with (crawl_dir / "responses.csv").open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["country", "gender", "age_bin", "date", "total_accounts", "dau"])
        for row in audience_rows:
            code, gender, b, date, acc, dau = row
            if code in ("US", "GB") and date == "2015-07-01" and b in (20, 21, 22):
                writer.writerow(row)
    manifest = {
        "label": "crawl-fixture-2015-07-01",
        "unavailable_countries": ["SY", "IR", "CU"],
        "transient_failures": {"US|male|20|2015-07-01": 2},
    }
    (crawl_dir / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")

    # survey fixture (for the validate command) ---------------------------
    survey_rows = []
    for code in COUNTRIES[:16]:
        w = world[code]
        for gender in ("male", "female"):
            # per-gender daily-use probability consistent with the world's divide
            base = min(max(w["pen"] * (1.15 if gender == "male" else 1.15 * math.exp(-w["fgd"])), 0.02), 0.95)
            for _ in range(40):
                response = int(rng.uniform() < base)
                weight = round(float(rng.uniform(0.5, 2.0)), 3)
                survey_rows.append([code, gender, response, weight])
    with (FIXTURES / "survey.csv").open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["country", "gender", "response", "weight"])
        writer.writerows(survey_rows)

    print(f"audience rows: {len(audience_rows)}")
    print(f"census rows:   {len(census_rows)}")
    print(f"indicator rows:{len(indicator_rows)}")
    print(f"survey rows:   {len(survey_rows)}")


if __name__ == "__main__":
    main()
