"""Command-line pipeline: ingest, metrics, fit, validate, crawl.

Every report embeds full provenance (input digests, effective config,
seed, tool version) and is written atomically, so the same config and
seed produce byte-identical artifacts. Exit codes: 2 usage error,
3 missing file or missing data, 4 failed invariant or validation.
"""

from __future__ import annotations

import argparse
import csv
import datetime as dt
import hashlib
import json
import math
import os
import re
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import __version__, collector, dataset, metrics, models
from .errors import ConfigError, FgdkitError, MissingDataError
from .stats import pearson, spearman, weighted_proportion

EXIT_USAGE = 2
EXIT_MISSING = 3
EXIT_INVARIANT = 4

MONTH_RE = re.compile(r"^\d{4}-\d{2}$")


# ---------------------------------------------------------------------------
# plumbing


def _jsonable(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"not JSON serializable: {type(obj)!r}")


def _atomic_write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_json(path: Path, obj) -> None:
    _atomic_write_text(path, json.dumps(obj, indent=2, default=_jsonable) + "\n")


def _write_csv_rows(path: Path, rows) -> None:
    import io

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerows(rows)
    _atomic_write_text(path, buf.getvalue())


def _digest(path) -> str:
    h = hashlib.sha256()
    h.update(Path(path).read_bytes())
    return h.hexdigest()


def _provenance(args, command: str, inputs: dict[str, str | None]) -> dict:
    digests = {}
    for name, path in inputs.items():
        if path is not None:
            digests[name] = {"path": str(path), "sha256": _digest(path)}
    # out and threads are execution details that cannot affect the numbers;
    # leaving them out keeps artifacts byte-identical across placements and
    # degrees of parallelism
    config = {
        k: v
        for k, v in sorted(vars(args).items())
        if k not in ("func", "config", "out", "threads") and v is not None
    }
    return {
        "tool": "fgdkit",
        "version": __version__,
        "command": command,
        "seed": getattr(args, "seed", None),
        "config": config,
        "inputs": digests,
    }


def _require(args, *names: str) -> None:
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        flags = ", ".join("--" + n.replace("_", "-") for n in missing)
        raise ConfigError(f"missing required option(s): {flags}")


def _check_month(value: str) -> str:
    if not MONTH_RE.match(value):
        raise ConfigError(f"month must look like YYYY-MM, got {value!r}")
    return value


def _parse_window(raw: str | None) -> tuple[int, int]:
    if raw is None:
        return metrics.DEFAULT_AGE_WINDOW
    try:
        lo, hi = (int(part) for part in raw.split(","))
    except ValueError:
        raise ConfigError(f"age window must look like '13,65', got {raw!r}") from None
    return lo, hi


def _out_dir(args) -> Path:
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_inputs(args, *, need_indicators: bool = False):
    _require(args, "audience", "census")
    snapshots = dataset.load_audience(args.audience)
    census = dataset.load_census(args.census)
    indicators = None
    if need_indicators:
        _require(args, "indicators")
        indicators = dataset.load_indicators(args.indicators)
    return snapshots, census, indicators


# ---------------------------------------------------------------------------
# commands


def cmd_ingest(args) -> int:
    snapshots, census, _ = _load_inputs(args)
    _require(args, "month")
    month = _check_month(args.month)
    window = _parse_window(args.age_window)
    panel = metrics.build_panel(snapshots, census, month, window)
    payload = metrics.panel_to_dict(panel)
    payload["provenance"] = _provenance(
        args, "ingest", {"audience": args.audience, "census": args.census}
    )
    out = _out_dir(args) / "panel.json"
    _write_json(out, payload)
    print(f"wrote {out}")
    return 0


def cmd_metrics(args) -> int:
    if args.panel is not None:
        data = json.loads(Path(args.panel).read_text(encoding="utf-8"))
        panel = metrics.panel_from_dict(data)
    else:
        snapshots, census, _ = _load_inputs(args)
        _require(args, "month")
        panel = metrics.build_panel(
            snapshots, census, _check_month(args.month), _parse_window(args.age_window)
        )
    out = _out_dir(args) / "fgd.csv"
    tmp_target = out.parent / (out.name + ".tmp-metrics")
    try:
        metrics.write_fgd_csv(panel, tmp_target)
        os.replace(tmp_target, out)
    finally:
        tmp_target.unlink(missing_ok=True)
    print(f"wrote {out}")
    return 0


def _fit_single(args, model, snapshots, census, indicators, estimators, seed):
    month = _check_month(args.month)
    window = _parse_window(args.age_window)
    panel = metrics.build_panel(snapshots, census, month, window)
    resamples = args.bootstrap or 10_000
    common = dict(seed=seed)
    if args.iterations is not None:
        common["iterations"] = args.iterations
    if model == "fgd":
        report = models.fit_fgd_model(
            panel, indicators, args.variant or "internet", estimators, **common
        )
        return report.to_json_dict(), report.to_csv_rows()
    if model == "network":
        report = models.fit_network_model(panel, estimators, **common)
        return report.to_json_dict(), report.to_csv_rows()
    if model == "delta_edu":
        report = models.fit_delta_edu_model(
            panel, indicators, args.variant or "gdp", estimators, **common
        )
        return report.to_json_dict(), report.to_csv_rows()
    # the changes models are a coupled pair; the report carries both directions
    _require(args, "month2")
    panel2 = metrics.build_panel(snapshots, census, _check_month(args.month2), window)
    changes = models.fit_changes_models(
        panel,
        panel2,
        indicators,
        args.variant or "gdp",
        estimators,
        resamples=resamples,
        workers=args.threads or 1,
        **common,
    )
    payload = changes.to_json_dict()
    requested = changes.eco if model == "delta_eco" else changes.fgd
    payload["requested"] = model
    return payload, requested.to_csv_rows()


def cmd_fit(args) -> int:
    _require(args, "seed", "model")
    model = args.model.replace("-", "_")
    if model not in models.MODEL_IDS:
        raise ConfigError(f"unknown model {args.model!r}")
    need_indicators = model != "network"
    snapshots, census, indicators = _load_inputs(args, need_indicators=need_indicators)
    estimators = tuple(args.estimator) if args.estimator else None
    if estimators is None:
        estimators = ("bayes",) if model in ("fgd", "network") else ("robust",)

    out_dir = _out_dir(args)
    if args.by:
        _require(args, "month")
        strat = models.stratify(
            model,
            args.by,
            snapshots,
            census,
            indicators,
            month=_check_month(args.month),
            month2=_check_month(args.month2) if args.month2 else None,
            age_window=_parse_window(args.age_window),
            variant=args.variant,
            estimator=estimators,
            seed=args.seed,
        )
        payload = strat.to_json_dict()
        csv_rows = [["stratum", "n", "r2", "term", "estimate", "p"]]
        for row in strat.summary:
            for term, est in row["estimates"].items():
                csv_rows.append(
                    [
                        row["stratum"],
                        row["n"],
                        f"{row['r2']:.6f}",
                        term,
                        f"{est:.6f}",
                        f"{row['p'][term]:.6g}",
                    ]
                )
    else:
        payload, csv_rows = _fit_single(
            args, model, snapshots, census, indicators, estimators, args.seed
        )

    payload["provenance"] = _provenance(
        args,
        "fit",
        {
            "audience": args.audience,
            "census": args.census,
            "indicators": args.indicators,
        },
    )
    json_path = out_dir / f"report_{model}.json"
    csv_path = out_dir / f"report_{model}.csv"
    _write_json(json_path, payload)
    _write_csv_rows(csv_path, csv_rows)
    print(f"wrote {json_path}")
    print(f"wrote {csv_path}")
    return 0


SURVEY_COLUMNS = ("country", "gender", "response", "weight")


def _load_survey(path):
    rows: dict[str, dict[str, list[tuple[float, float]]]] = {}
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != SURVEY_COLUMNS:
            raise ConfigError(
                f"survey header must be {','.join(SURVEY_COLUMNS)}, got {header!r}"
            )
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            country = dataset.canonical_country(row[0])
            if country is None:
                raise ConfigError(f"line {lineno}: unknown country {row[0]!r}")
            gender = row[1]
            if gender not in dataset.GENDERS:
                raise ConfigError(f"line {lineno}: gender must be one of {dataset.GENDERS}")
            rows.setdefault(country, {}).setdefault(gender, []).append(
                (float(row[2]), float(row[3]))
            )
    return rows


def _read_fgd_csv(path) -> dict[str, dict[str, float]]:
    out: dict[str, dict[str, float]] = {}
    with Path(path).open(newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            out[row["country"]] = {
                "fgd": float(row["fgd"]) if row["fgd"] != "" else math.nan,
                "penetration": float(row["penetration"]),
            }
    return out


def cmd_validate(args) -> int:
    _require(args, "seed", "survey", "metrics_csv", "measure")
    survey = _load_survey(args.survey)
    reference = _read_fgd_csv(args.metrics_csv)

    surrogate: dict[str, float] = {}
    skipped: list[str] = []
    for country, genders in sorted(survey.items()):
        if set(genders) != set(dataset.GENDERS):
            skipped.append(country)
            continue
        props = {
            g: weighted_proportion([r for r, _ in obs], [w for _, w in obs])
            for g, obs in genders.items()
        }
        if args.measure == "fgd":
            if props["male"] <= 0 or props["female"] <= 0:
                skipped.append(country)
                continue
            surrogate[country] = math.log(props["male"] / props["female"])
        else:
            pooled = [(r, w) for obs in genders.values() for r, w in obs]
            surrogate[country] = weighted_proportion(
                [r for r, _ in pooled], [w for _, w in pooled]
            )

    common = [
        c
        for c in sorted(surrogate)
        if c in reference and not math.isnan(reference[c][args.measure])
    ]
    if len(common) < 4:
        raise ConfigError(
            f"only {len(common)} countries overlap between survey and metrics; need >= 4"
        )
    ours = [reference[c][args.measure] for c in common]
    theirs = [surrogate[c] for c in common]
    report = {
        "measure": args.measure,
        "n": len(common),
        "countries": common,
        "skipped": skipped,
        "pearson": pearson(ours, theirs).to_json_dict(),
        "spearman": spearman(ours, theirs, seed=args.seed).to_json_dict(),
        "provenance": _provenance(
            args, "validate", {"survey": args.survey, "metrics": args.metrics_csv}
        ),
    }
    out = _out_dir(args) / f"validate_{args.measure}.json"
    _write_json(out, report)
    print(f"wrote {out}")
    return 0


def cmd_crawl(args) -> int:
    _require(args, "fixtures", "countries", "date")
    try:
        date = dt.date.fromisoformat(args.date)
    except ValueError:
        raise ConfigError(f"date must be ISO 8601, got {args.date!r}") from None
    spec = collector.CrawlSpec(
        countries=tuple(args.countries.split(",")),
        age_window=_parse_window(args.age_window),
        date=date,
        rate_limit=args.rate_limit or 10.0,
        retry=collector.RetryPolicy(max_attempts=args.max_attempts or 3),
    )
    transport = collector.ReplayTransport(args.fixtures)
    snapshots = collector.crawl(transport, spec)
    out_dir = _out_dir(args)
    csv_path = out_dir / "snapshot.csv"
    tmp_target = csv_path.parent / (csv_path.name + ".tmp-crawl")
    try:
        dataset.write_audience_csv(snapshots, tmp_target)
        os.replace(tmp_target, csv_path)
    finally:
        tmp_target.unlink(missing_ok=True)
    manifest = {
        "label": snapshots.label,
        "cells": len(snapshots),
        "notes": dict(snapshots.notes),
        "provenance": _provenance(args, "crawl", {}),
    }
    _write_json(out_dir / "crawl_manifest.json", manifest)
    print(f"wrote {csv_path}")
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fgdkit",
        description="Audience-based gender-divide metrics and regression model suite",
    )
    parser.add_argument("--version", action="version", version=f"fgdkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--seed", type=int, default=None, help="master seed (stochastic commands)")
        p.add_argument("--config", default=None, help="JSON config file; flags override it")
        p.add_argument("--out", default=None, help="output directory (default: cwd)")
        p.add_argument("--threads", type=int, default=None, help="worker threads for bootstraps")

    p_ingest = sub.add_parser("ingest", help="build a panel artifact from audience + census")
    p_ingest.add_argument("--audience")
    p_ingest.add_argument("--census")
    p_ingest.add_argument("--month")
    p_ingest.add_argument("--age-window", dest="age_window")
    add_common(p_ingest)
    p_ingest.set_defaults(func=cmd_ingest)

    p_metrics = sub.add_parser("metrics", help="write the per-country divide metric table")
    p_metrics.add_argument("--panel", help="panel artifact from ingest")
    p_metrics.add_argument("--audience")
    p_metrics.add_argument("--census")
    p_metrics.add_argument("--month")
    p_metrics.add_argument("--age-window", dest="age_window")
    add_common(p_metrics)
    p_metrics.set_defaults(func=cmd_metrics)

    p_fit = sub.add_parser("fit", help="fit a named model and write its report")
    p_fit.add_argument("--model", choices=["fgd", "network", "delta-eco", "delta-fgd", "delta-edu"])
    p_fit.add_argument(
        "--variant", choices=["internet", "gdp", "full", "equality", "hofstede"], default=None
    )
    p_fit.add_argument(
        "--estimator",
        action="append",
        choices=list(models.ESTIMATORS),
        help="repeatable; defaults to bayes (fgd, network) or robust (changes)",
    )
    p_fit.add_argument("--by", choices=["month", "age"], default=None)
    p_fit.add_argument("--bootstrap", type=int, default=None, help="partial-R^2 resamples")
    p_fit.add_argument("--iterations", type=int, default=None, help="posterior iterations")
    p_fit.add_argument("--audience")
    p_fit.add_argument("--census")
    p_fit.add_argument("--indicators")
    p_fit.add_argument("--month")
    p_fit.add_argument("--month2", help="second month for the changes models")
    p_fit.add_argument("--age-window", dest="age_window")
    add_common(p_fit)
    p_fit.set_defaults(func=cmd_fit)

    p_val = sub.add_parser("validate", help="correlate survey-based surrogates with our metrics")
    p_val.add_argument("--survey")
    p_val.add_argument("--metrics-csv", dest="metrics_csv")
    p_val.add_argument("--measure", choices=["fgd", "penetration"])
    add_common(p_val)
    p_val.set_defaults(func=cmd_validate)

    p_crawl = sub.add_parser("crawl", help="replay a recorded fixture into a snapshot CSV")
    p_crawl.add_argument("--fixtures")
    p_crawl.add_argument("--countries", help="comma-separated ISO codes")
    p_crawl.add_argument("--date")
    p_crawl.add_argument("--age-window", dest="age_window")
    p_crawl.add_argument("--rate-limit", dest="rate_limit", type=float, default=None)
    p_crawl.add_argument("--max-attempts", dest="max_attempts", type=int, default=None)
    add_common(p_crawl)
    p_crawl.set_defaults(func=cmd_crawl)

    return parser


def _apply_config(args) -> None:
    if getattr(args, "config", None) is None:
        return
    data = json.loads(Path(args.config).read_text(encoding="utf-8"))
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    for key, value in data.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            raise ConfigError(f"config key {key!r} does not match any option")
        if getattr(args, attr) is None:
            setattr(args, attr, value)


def _error_report(exc: Exception) -> str:
    return json.dumps({"error": type(exc).__name__, "message": str(exc)})


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config(args)
        return args.func(args)
    except FileNotFoundError as exc:
        print(_error_report(exc), file=sys.stderr)
        return EXIT_MISSING
    except MissingDataError as exc:
        print(_error_report(exc), file=sys.stderr)
        return EXIT_MISSING
    except FgdkitError as exc:
        print(_error_report(exc), file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
