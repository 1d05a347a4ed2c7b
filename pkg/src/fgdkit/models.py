"""Named regression models over panels and indicator tables.

Builders assemble listwise-complete ModelFrames (ranks computed within the
estimation sample), run them under any combination of estimators, and
bundle diagnostics. Sample-size guardrails: 30 complete countries (50 for
the hofstede variant).
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, field

import numpy as np
from scipy import stats as sps

from .dataset import GENDERS, IndicatorTable
from .errors import (
    ConfigError,
    DataQualityError,
    DegenerateError,
    DomainError,
    MissingDataError,
    SampleSizeError,
    UndefinedMetricError,
)
from .metrics import CountryGenderPanel
from .metrics import fgd as fgd_metric
from .metrics import mean_active_age, penetration
from .stats import (
    FitResult,
    ModelFrame,
    PartialR2Result,
    anova_f,
    bayes_fit,
    bootstrap_partial_r2,
    hc_se,
    ols_fit,
    pearson,
    rank_transform,
    robust_mm_fit,
    shapiro_wilk,
    vif,
)

MODEL_IDS = ("fgd", "network", "delta_eco", "delta_fgd", "delta_edu")
FGD_VARIANTS = ("internet", "gdp")
CHANGES_VARIANTS = ("gdp", "internet", "full", "equality", "hofstede")
ESTIMATORS = ("ols", "hc", "robust", "bayes")
MIN_SAMPLE = 30
MIN_SAMPLE_HOFSTEDE = 50
DEFAULT_AGE_GROUPS = ((13, 24), (25, 34), (35, 44), (45, 54), (55, 65))


def child_seed(master: int, role: str) -> int:
    """Stable per-role sub-seed so concurrent estimators never share a stream."""
    return int(np.random.SeedSequence([master, zlib.crc32(role.encode())]).generate_state(1)[0])


@dataclass
class ModelReport:
    model_id: str
    variant: str | None
    stratum: str | None
    n: int
    countries: tuple[str, ...]
    frame: ModelFrame
    fits: dict[str, FitResult]
    vif: dict[str, float]
    anova: dict[str, tuple[float, float]] = field(default_factory=dict)
    derived: dict = field(default_factory=dict)
    notes: dict = field(default_factory=dict)

    @property
    def primary_fit(self) -> FitResult:
        return next(iter(self.fits.values()))

    def to_json_dict(self) -> dict:
        return {
            "model": self.model_id,
            "variant": self.variant,
            "stratum": self.stratum,
            "n": self.n,
            "countries": list(self.countries),
            "fits": {est: fit.to_json_dict() for est, fit in self.fits.items()},
            "vif": self.vif,
            "anova": {k: list(v) for k, v in self.anova.items()},
            "derived": self.derived,
            "notes": self.notes,
        }

    def to_csv_rows(self) -> list[list]:
        rows = [["estimator", "term", "estimate", "uncertainty", "p"]]
        for est, fit in self.fits.items():
            for t in fit.terms:
                unc = t.se_or_ci()
                if isinstance(unc, list):
                    unc = f"[{unc[0]:.6f},{unc[1]:.6f}]"
                elif unc is not None:
                    unc = f"{unc:.6f}"
                rows.append([est, t.name, f"{t.estimate:.6f}", unc, f"{t.p:.6g}"])
            rows.append([est, "R2", f"{fit.r2:.6f}", "", ""])
        return rows


def _normalize_estimators(estimator) -> tuple[str, ...]:
    names = (estimator,) if isinstance(estimator, str) else tuple(estimator)
    for name in names:
        if name not in ESTIMATORS:
            raise DomainError(f"unknown estimator {name!r}; expected one of {ESTIMATORS}")
    if not names:
        raise DomainError("at least one estimator required")
    return names


def run_estimator(
    frame: ModelFrame,
    estimator: str,
    *,
    seed: int,
    iterations: int = 10_000,
    burn_in: int = 1_000,
    hc_flavor: str = "HC3",
) -> FitResult:
    if estimator == "ols":
        return ols_fit(frame)
    if estimator == "hc":
        return hc_se(frame, ols_fit(frame), flavor=hc_flavor)
    if estimator == "robust":
        return robust_mm_fit(frame, seed=child_seed(seed, "robust"))
    if estimator == "bayes":
        return bayes_fit(frame, iterations, burn_in, seed=child_seed(seed, "bayes"))
    raise DomainError(f"unknown estimator {estimator!r}")


def _unit_rank_ascending(values: np.ndarray) -> np.ndarray:
    # Rank number rescaled to [0, 1]: the highest underlying value maps to 0,
    # the lowest to 1, so a positive coefficient means "lower value of the
    # source variable, larger outcome".
    ranks = rank_transform(values)
    return (ranks - 1.0) / (len(ranks) - 1.0)


# ---------------------------------------------------------------------------
# country-level metric extraction


def _country_metrics(panel: CountryGenderPanel) -> dict[str, dict[str, float]]:
    """Per-country fgd/penetration/mean age where all three are defined."""
    out: dict[str, dict[str, float]] = {}
    for country in panel.countries():
        try:
            out[country] = {
                "fgd": fgd_metric(panel, country),
                "penetration": penetration(panel, country),
                "mean_age": mean_active_age(panel, country),
            }
        except Exception:
            continue
    return out


def _fgd_model_rows(
    panel: CountryGenderPanel, indicators: IndicatorTable, variant: str, year: int
) -> tuple[list[str], dict[str, list[float]]]:
    if variant not in FGD_VARIANTS:
        raise DomainError(f"unknown variant {variant!r}; expected one of {FGD_VARIANTS}")
    control_field = "internet_penetration" if variant == "internet" else "gdp_ppp"
    metrics = _country_metrics(panel)
    needed = ("edu", "health", "eco", "pol", control_field, "quintile_ratio", "population")
    countries: list[str] = []
    cols: dict[str, list[float]] = {name: [] for name in needed}
    cols.update({"fgd": [], "penetration": [], "mean_age": []})
    for country in sorted(metrics):
        values = {name: indicators.value(country, year, name) for name in needed}
        if any(v is None for v in values.values()):
            continue
        countries.append(country)
        for name, v in values.items():
            cols[name].append(v)
        for name in ("fgd", "penetration", "mean_age"):
            cols[name].append(metrics[country][name])
    return countries, cols


def fit_fgd_model(
    panel: CountryGenderPanel,
    indicators: IndicatorTable,
    variant: str = "internet",
    estimator="bayes",
    *,
    seed: int,
    year: int = 2015,
    iterations: int = 10_000,
    burn_in: int = 1_000,
    stratum: str | None = None,
) -> ModelReport:
    """Rank-on-rank regression of the divide on equality indices plus controls.

    Outcome and every term are within-sample ranks (rank 1 = highest value).
    The gdp variant swaps the internet-penetration control for GDP.
    """
    estimators = _normalize_estimators(estimator)
    countries, cols = _fgd_model_rows(panel, indicators, variant, year)
    if len(countries) < MIN_SAMPLE:
        raise SampleSizeError(
            f"fgd model needs at least {MIN_SAMPLE} complete countries, got {len(countries)}"
        )
    control_name = "internet_rank" if variant == "internet" else "gdp_rank"
    control_field = "internet_penetration" if variant == "internet" else "gdp_ppp"
    term_source = [
        ("edu_rank", "edu"),
        ("health_rank", "health"),
        ("eco_rank", "eco"),
        ("pol_rank", "pol"),
        (control_name, control_field),
        ("inequality_rank", "quintile_ratio"),
        ("population_rank", "population"),
        ("fb_penetration_rank", "penetration"),
        ("mean_age_rank", "mean_age"),
    ]
    frame = ModelFrame.build(
        "fgd_rank",
        rank_transform(cols["fgd"]),
        [(name, rank_transform(cols[src]), "ranked") for name, src in term_source],
        labels=countries,
        extras={"fb_penetration": cols["penetration"], "fgd": cols["fgd"]},
    )
    fits = {
        est: run_estimator(frame, est, seed=seed, iterations=iterations, burn_in=burn_in)
        for est in estimators
    }
    return ModelReport(
        model_id="fgd",
        variant=variant,
        stratum=stratum,
        n=frame.n,
        countries=tuple(countries),
        frame=frame,
        fits=fits,
        vif=vif(frame),
    )


def _network_rows(panel: CountryGenderPanel):
    candidates = []
    dropped = 0
    for country in sorted(panel.countries()):
        try:
            pen = penetration(panel, country)
        except UndefinedMetricError:
            continue
        rows = {}
        for gender in GENDERS:
            key = (country, gender)
            if key not in panel.rows:
                rows = {}
                break
            rows[gender] = panel.rows[key].ratio
        if not rows:
            continue
        if pen <= 0.0 or any(r <= 0.0 for r in rows.values()):
            dropped += 1
            continue
        candidates.append((country, pen, rows))
    return candidates, dropped


def fit_network_model(
    panel: CountryGenderPanel,
    estimator="bayes",
    *,
    seed: int,
    iterations: int = 10_000,
    burn_in: int = 1_000,
    stratum: str | None = None,
) -> ModelReport:
    """Pooled log-log scaling fit of activity ratios on penetration.

    Two rows per country (one per gender) with a female indicator and its
    interaction with log penetration, so the female scaling exponent is the
    sum of the base slope and the interaction. Reports that derived sum
    with a 95% interval per estimator, plus the linear-scale fit quality.
    """
    estimators = _normalize_estimators(estimator)
    candidates, dropped = _network_rows(panel)
    if dropped > 0.05 * max(len(candidates) + dropped, 1):
        raise DataQualityError(
            f"{dropped} of {len(candidates) + dropped} countries have non-positive "
            "ratios or penetration; check the panel"
        )
    if len(candidates) < MIN_SAMPLE:
        raise SampleSizeError(
            f"network model needs at least {MIN_SAMPLE} countries, got {len(candidates)}"
        )
    labels, outcome, log_pen, female, interaction, pen_extra = [], [], [], [], [], []
    for country, pen, rows in candidates:
        for gender in ("female", "male"):
            labels.append(country)
            outcome.append(math.log(rows[gender]))
            log_pen.append(math.log(pen))
            flag = 1.0 if gender == "female" else 0.0
            female.append(flag)
            interaction.append(flag * math.log(pen))
            pen_extra.append(pen)
    frame = ModelFrame.build(
        "log_activity_ratio",
        outcome,
        [
            ("log_penetration", log_pen, "raw"),
            ("female", female, "raw"),
            ("female_log_penetration", interaction, "raw"),
        ],
        labels=labels,
        extras={"fb_penetration": pen_extra},
    )
    fits = {
        est: run_estimator(frame, est, seed=seed, iterations=iterations, burn_in=burn_in)
        for est in estimators
    }
    derived = {
        est: _female_exponent(fit, frame) for est, fit in fits.items()
    }
    for est, fit in fits.items():
        derived[est]["linear_scale_r2"] = _linear_scale_r2(frame, fit)
    return ModelReport(
        model_id="network",
        variant=None,
        stratum=stratum,
        n=frame.n,
        countries=tuple(sorted({c for c, _, _ in candidates})),
        frame=frame,
        fits=fits,
        vif=vif(frame),
        derived=derived,
    )


def _female_exponent(fit: FitResult, frame: ModelFrame) -> dict:
    """alpha + alpha_F: the scaling exponent for the female rows."""
    names = list(frame.coef_names)
    i = names.index("log_penetration")
    j = names.index("female_log_penetration")
    est = fit.terms[i].estimate + fit.terms[j].estimate
    if fit.draws is not None:
        total = fit.draws[:, i] + fit.draws[:, j]
        lo, hi = np.percentile(total, [2.5, 97.5])
        return {"estimate": float(np.median(total)), "ci": [float(lo), float(hi)]}
    if fit.cov is not None:
        var = fit.cov[i, i] + fit.cov[j, j] + 2.0 * fit.cov[i, j]
        half = sps.t.ppf(0.975, fit.df_resid) * math.sqrt(max(var, 0.0))
        return {"estimate": est, "ci": [est - half, est + half]}
    return {"estimate": est, "ci": None}


def _linear_scale_r2(frame: ModelFrame, fit: FitResult) -> float:
    """Squared correlation between observed and predicted activity ratios."""
    observed = np.exp(frame.outcome)
    predicted = np.exp(fit.fitted)
    return float(pearson(observed, predicted).r ** 2)


# ---------------------------------------------------------------------------
# changes models

_CHANGES_CONTROLS = {
    "gdp": (("gdp_rank", "gdp_ppp"),),
    "internet": (("internet_rank", "internet_penetration"),),
    "full": (
        ("inequality_rank", "quintile_ratio"),
        ("population_rank", "population"),
        ("mean_age_rank", "@mean_age"),
        ("fb_penetration_rank", "@penetration"),
        ("gdp_rank", "gdp_ppp"),
    ),
    "equality": (
        ("gdp_rank", "gdp_ppp"),
        ("edu_rank", "edu"),
        ("pol_rank", "pol"),
        ("health_rank", "health"),
    ),
    "hofstede": (
        ("pdi", "pdi"),
        ("idv", "idv"),
        ("mas", "mas"),
        ("uai", "uai"),
    ),
}


def _changes_rows(
    target: str,
    panel_2015: CountryGenderPanel,
    panel_2016: CountryGenderPanel | None,
    indicators: IndicatorTable,
    variant: str,
):
    """Listwise-complete country rows for one changes model."""
    if variant not in CHANGES_VARIANTS:
        raise DomainError(f"unknown variant {variant!r}; expected one of {CHANGES_VARIANTS}")
    metrics15 = _country_metrics(panel_2015)
    metrics16 = _country_metrics(panel_2016) if panel_2016 is not None else None
    if target == "fgd" and metrics16 is None:
        raise DomainError("the divide-changes model needs a 2016 panel")
    controls = _CHANGES_CONTROLS[variant]
    if variant == "equality" and target == "edu":
        # education is already the autocorrelation term; control for the other three
        controls = (
            ("gdp_rank", "gdp_ppp"),
            ("eco_rank", "eco"),
            ("pol_rank", "pol"),
            ("health_rank", "health"),
        )

    countries = []
    cols: dict[str, list[float]] = {
        "outcome": [],
        "main": [],
        "autocorr": [],
    }
    control_raw: dict[str, list[float]] = {name: [] for name, _ in controls}
    for country in sorted(metrics15):
        fgd15 = metrics15[country]["fgd"]
        if target in ("eco", "edu"):
            level15 = indicators.value(country, 2015, target)
            level16 = indicators.value(country, 2016, target)
            if level15 is None or level16 is None:
                continue
            outcome = level16 - level15
            autocorr = level15
            main_value = fgd15
        else:  # target == "fgd"
            if country not in metrics16:
                continue
            eco15 = indicators.value(country, 2015, "eco")
            if eco15 is None:
                continue
            outcome = metrics16[country]["fgd"] - fgd15
            autocorr = fgd15
            main_value = eco15
        ctrl_values = {}
        complete = True
        for name, source in controls:
            if source == "@mean_age":
                value = metrics15[country]["mean_age"]
            elif source == "@penetration":
                value = metrics15[country]["penetration"]
            else:
                value = indicators.value(country, 2015, source)
            if value is None:
                complete = False
                break
            ctrl_values[name] = value
        if not complete:
            continue
        countries.append(country)
        cols["outcome"].append(outcome)
        cols["main"].append(main_value)
        cols["autocorr"].append(autocorr)
        for name, _ in controls:
            control_raw[name].append(ctrl_values[name])
    return countries, cols, control_raw, controls


def _changes_frame(
    target: str,
    panel_2015: CountryGenderPanel,
    panel_2016: CountryGenderPanel | None,
    indicators: IndicatorTable,
    variant: str,
) -> tuple[ModelFrame, str, list[str]]:
    countries, cols, control_raw, controls = _changes_rows(
        target, panel_2015, panel_2016, indicators, variant
    )
    minimum = MIN_SAMPLE_HOFSTEDE if variant == "hofstede" else MIN_SAMPLE
    if len(countries) < minimum:
        raise SampleSizeError(
            f"changes model ({target}, {variant}) needs at least {minimum} "
            f"complete countries, got {len(countries)}"
        )
    outcome = np.asarray(cols["outcome"])
    if np.ptp(outcome) == 0.0:
        raise DegenerateError(f"year-over-year change in {target} is constant; fit undefined")

    if target in ("eco", "edu"):
        main_name, autocorr_name = "fgd_rank", f"{target}_2015"
    else:
        main_name, autocorr_name = "eco_rank", "fgd_2015"
    terms = [
        (main_name, _unit_rank_ascending(np.asarray(cols["main"])), "ranked_rescaled"),
        (autocorr_name, np.asarray(cols["autocorr"]), "raw"),
    ]
    control_names = []
    for name, _src in controls:
        values = np.asarray(control_raw[name])
        if name.endswith("_rank"):
            terms.append((name, _unit_rank_ascending(values), "ranked_rescaled"))
        else:
            terms.append((name, values, "raw"))
        control_names.append(name)
    frame = ModelFrame.build(f"delta_{target}", outcome, terms, labels=countries)
    return frame, main_name, [autocorr_name] + control_names


def _fit_one_changes_model(
    target, panel_2015, panel_2016, indicators, variant, estimators, *, seed, iterations, burn_in,
    resamples, workers, stratum, with_partial=True,
):
    frame, main_name, controls = _changes_frame(
        target, panel_2015, panel_2016, indicators, variant
    )
    fits = {
        est: run_estimator(frame, est, seed=seed, iterations=iterations, burn_in=burn_in)
        for est in estimators
    }
    f_stat, f_p = anova_f(frame, main_name)
    partial = None
    if with_partial:
        partial = bootstrap_partial_r2(
            frame,
            frame.outcome_name,
            main_name,
            controls,
            resamples,
            seed=child_seed(seed, f"partial:{target}"),
            workers=workers,
        )
    report = ModelReport(
        model_id=f"delta_{target}",
        variant=variant,
        stratum=stratum,
        n=frame.n,
        countries=frame.labels,
        frame=frame,
        fits=fits,
        vif=vif(frame),
        anova={main_name: (f_stat, f_p)},
        notes={"conditioning_term": main_name, "controls": controls},
    )
    return report, partial


@dataclass
class ChangesResult:
    eco: ModelReport
    fgd: ModelReport
    partial_eco: PartialR2Result
    partial_fgd: PartialR2Result

    def to_json_dict(self) -> dict:
        return {
            "delta_eco": self.eco.to_json_dict(),
            "delta_fgd": self.fgd.to_json_dict(),
            "partial_r2": {
                "delta_eco": self.partial_eco.to_json_dict(),
                "delta_fgd": self.partial_fgd.to_json_dict(),
            },
        }


def fit_changes_models(
    panel_2015: CountryGenderPanel,
    panel_2016: CountryGenderPanel,
    indicators: IndicatorTable,
    variant: str = "gdp",
    estimator="robust",
    *,
    seed: int,
    iterations: int = 10_000,
    burn_in: int = 1_000,
    resamples: int = 10_000,
    workers: int = 1,
    stratum: str | None = None,
) -> ChangesResult:
    """Fit the paired year-over-year models in both directions.

    Economic-equality change on the divide rank, and divide change on the
    equality rank, each with a raw 2015 autocorrelation term and the
    variant's rescaled ranked controls. Includes the ANOVA F of the
    conditioning term and a seeded bootstrap of its partial R^2 for both
    directions.
    """
    estimators = _normalize_estimators(estimator)
    eco_report, partial_eco = _fit_one_changes_model(
        "eco", panel_2015, panel_2016, indicators, variant, estimators,
        seed=seed, iterations=iterations, burn_in=burn_in, resamples=resamples,
        workers=workers, stratum=stratum,
    )
    fgd_report, partial_fgd = _fit_one_changes_model(
        "fgd", panel_2015, panel_2016, indicators, variant, estimators,
        seed=seed, iterations=iterations, burn_in=burn_in, resamples=resamples,
        workers=workers, stratum=stratum,
    )
    return ChangesResult(
        eco=eco_report, fgd=fgd_report, partial_eco=partial_eco, partial_fgd=partial_fgd
    )


def fit_delta_edu_model(
    panel_2015: CountryGenderPanel,
    indicators: IndicatorTable,
    variant: str = "gdp",
    estimator="robust",
    *,
    seed: int,
    iterations: int = 10_000,
    burn_in: int = 1_000,
    stratum: str | None = None,
) -> ModelReport:
    """Education-equality change on the divide rank (no converse direction)."""
    estimators = _normalize_estimators(estimator)
    report, _ = _fit_one_changes_model(
        "edu", panel_2015, None, indicators, variant, estimators,
        seed=seed, iterations=iterations, burn_in=burn_in, resamples=0,
        workers=1, stratum=stratum, with_partial=False,
    )
    return report


# ---------------------------------------------------------------------------
# stratification and diagnostics


@dataclass
class StratifiedResult:
    reports: list
    skipped: list[str]
    summary: list[dict]

    def to_json_dict(self) -> dict:
        return {
            "strata": [
                r.to_json_dict() if isinstance(r, ModelReport) else r.to_json_dict()
                for r in self.reports
            ],
            "skipped": self.skipped,
            "summary": self.summary,
        }


def stratify(
    model_id: str,
    by: str,
    snapshots,
    census,
    indicators,
    *,
    month: str,
    month2: str | None = None,
    months: tuple[str, ...] | None = None,
    age_groups: tuple[tuple[int, int], ...] = DEFAULT_AGE_GROUPS,
    age_window: tuple[int, int] = (13, 65),
    variant: str | None = None,
    estimator="ols",
    seed: int,
    **fit_kwargs,
) -> StratifiedResult:
    """One report per month or age-group stratum; empty strata are skipped with notice."""
    from .metrics import build_panel

    if model_id not in MODEL_IDS:
        raise DomainError(f"unknown model {model_id!r}")
    if by not in ("month", "age"):
        raise DomainError("stratify supports by='month' or by='age'")
    if by == "month" and model_id.startswith("delta_"):
        raise DomainError("changes models are year-over-year; stratify them by age")

    if by == "month":
        strata = [(m, age_window) for m in (months or snapshots.months())]
    else:
        strata = [(month, group) for group in age_groups]

    reports: list = []
    skipped: list[str] = []
    summary: list[dict] = []
    for stratum_month, window in strata:
        name = stratum_month if by == "month" else f"{window[0]}-{window[1]}"
        try:
            panel = build_panel(snapshots, census, stratum_month, window)
            panel2 = None
            if model_id in ("delta_eco", "delta_fgd") and month2 is not None:
                panel2 = build_panel(snapshots, census, month2, window)
            result = _fit_stratum(
                model_id, panel, panel2, indicators, variant, estimator,
                seed=seed, stratum=name, **fit_kwargs,
            )
        except (SampleSizeError, DegenerateError, MissingDataError, ConfigError) as exc:
            skipped.append(f"{name}: {exc}")
            continue
        reports.append(result)
        summary.append(_summary_row(name, result))
    return StratifiedResult(reports=reports, skipped=skipped, summary=summary)


def _fit_stratum(model_id, panel, panel2, indicators, variant, estimator, *, seed, stratum, **kw):
    if model_id == "fgd":
        return fit_fgd_model(
            panel, indicators, variant or "internet", estimator, seed=seed, stratum=stratum, **kw
        )
    if model_id == "network":
        return fit_network_model(panel, estimator, seed=seed, stratum=stratum, **kw)
    if model_id == "delta_edu":
        return fit_delta_edu_model(
            panel, indicators, variant or "gdp", estimator, seed=seed, stratum=stratum, **kw
        )
    if panel2 is None:
        raise DomainError("changes models need month2 to build the 2016 panel")
    changes = fit_changes_models(
        panel, panel2, indicators, variant or "gdp", estimator,
        seed=seed, stratum=stratum, resamples=kw.pop("resamples", 1000), **kw,
    )
    return changes.eco if model_id == "delta_eco" else changes.fgd


def _summary_row(name: str, report) -> dict:
    fit = report.primary_fit
    return {
        "stratum": name,
        "n": report.n,
        "r2": fit.r2,
        "estimates": {t.name: t.estimate for t in fit.terms},
        "p": {t.name: t.p for t in fit.terms},
    }


def diagnostics(report: ModelReport) -> dict:
    """Residual battery per estimator: normality, term/fitted correlations.

    An all-zero residual vector is flagged degenerate and skips the tests.
    Includes the heteroskedasticity screen (sqrt |resid| vs fitted) and the
    residual-penetration correlation when the frame carries penetration.
    """
    out: dict[str, dict] = {}
    for est, fit in report.fits.items():
        resid = fit.residuals
        if np.allclose(resid, 0.0):
            out[est] = {"degenerate": True}
            continue
        entry: dict = {"degenerate": False}
        w, p = shapiro_wilk(resid)
        entry["shapiro_wilk"] = {"w": w, "p": p}
        entry["residual_vs_term"] = {}
        for j, name in enumerate(report.frame.term_names):
            col = report.frame.terms[:, j]
            if np.ptp(col) == 0.0:
                continue
            corr = pearson(resid, col)
            entry["residual_vs_term"][name] = {"r": corr.r, "p": corr.p}
        if np.ptp(fit.fitted) > 0.0:
            corr = pearson(resid, fit.fitted)
            entry["residual_vs_fitted"] = {"r": corr.r, "p": corr.p}
            het = pearson(np.sqrt(np.abs(resid)), fit.fitted)
            entry["scale_vs_fitted"] = {"r": het.r, "p": het.p}
        if "fb_penetration" in report.frame.extras:
            corr = pearson(resid, report.frame.extras["fb_penetration"])
            entry["residual_vs_penetration"] = {"r": corr.r, "p": corr.p}
        out[est] = entry
    return out


def candidate_sample_sizes(
    panel: CountryGenderPanel,
    indicators: IndicatorTable,
    *,
    year: int = 2015,
    panel_2016: CountryGenderPanel | None = None,
) -> dict[str, int]:
    """Row counts each model's frame builder would accept (pre-threshold)."""
    out: dict[str, int] = {}
    countries, _ = _fgd_model_rows(panel, indicators, "internet", year)
    out["fgd"] = len(countries)
    candidates, _dropped = _network_rows(panel)
    out["network"] = 2 * len(candidates)
    for target, key in (("eco", "delta_eco"), ("edu", "delta_edu")):
        rows, _, _, _ = _changes_rows(target, panel, None, indicators, "gdp")
        out[key] = len(rows)
    if panel_2016 is not None:
        rows, _, _, _ = _changes_rows("fgd", panel, panel_2016, indicators, "gdp")
        out["delta_fgd"] = len(rows)
    rows, _, _, _ = _changes_rows("eco", panel, None, indicators, "hofstede")
    out["delta_eco_hofstede"] = len(rows)
    return out
