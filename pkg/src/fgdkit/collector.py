"""Acquisition client with pluggable transports and snapshot validation.

The replay transport answers segment queries from a recorded fixture
directory (manifest.json + responses.csv in the audience schema) and is
what every test runs against. The live transport is an interface stub:
the acquisition procedure, not any vendor protocol, is the contract here,
so no credentials or endpoints are bundled.
"""

from __future__ import annotations

import csv
import datetime as dt
import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

from .dataset import (
    AGE_BIN_TOP,
    AGE_MIN,
    GENDERS,
    AudienceCell,
    CensusTable,
    SnapshotSet,
    age_bin_label,
    parse_age_bin,
)
from .errors import (
    ComparisonError,
    ConfigError,
    DataQualityError,
    TransportError,
    UnavailableCountryError,
)
from .metrics import audience_bins
from .stats import CorrelationResult, pearson

logger = logging.getLogger(__name__)

METRICS = ("total_accounts", "dau")


@dataclass(frozen=True)
class SegmentQuery:
    country: str
    gender: str
    age_bin: int
    metric: str
    date: dt.date

    def __post_init__(self):
        if self.gender not in GENDERS:
            raise ConfigError(f"gender must be one of {GENDERS}")
        if not AGE_MIN <= self.age_bin <= AGE_BIN_TOP:
            raise ConfigError(f"age bin {self.age_bin} outside {AGE_MIN}..{AGE_BIN_TOP}")
        if self.metric not in METRICS:
            raise ConfigError(f"metric must be one of {METRICS}")

    @property
    def key(self) -> str:
        return "|".join(
            [self.country, self.gender, age_bin_label(self.age_bin), self.date.isoformat()]
        )


@dataclass(frozen=True)
class RetryPolicy:
    max_attempts: int = 3
    backoff_base: float = 0.5

    def __post_init__(self):
        if self.max_attempts < 1:
            raise ConfigError("retry policy needs at least 1 attempt")


@dataclass(frozen=True)
class CrawlSpec:
    countries: tuple[str, ...]
    age_window: tuple[int, int]
    date: dt.date
    metrics: tuple[str, ...] = METRICS
    rate_limit: float = 10.0  # requests per second, live transports only
    retry: RetryPolicy = field(default_factory=RetryPolicy)

    def __post_init__(self):
        if self.rate_limit <= 0:
            raise ConfigError("rate limit must be positive")
        if tuple(sorted(self.metrics)) != tuple(sorted(METRICS)):
            raise ConfigError(
                "crawl needs both metrics (total_accounts and dau) to assemble valid cells"
            )


class RateLimiter:
    """Simple fixed-interval pacing; clock and sleep injectable for tests."""

    def __init__(self, rate_per_sec: float, clock=time.monotonic, sleep=time.sleep):
        self._interval = 1.0 / rate_per_sec
        self._clock = clock
        self._sleep = sleep
        self._base = clock()
        self._count = 0

    def acquire(self) -> None:
        # slot k opens at base + k/rate, so N acquires take at least N/rate;
        # scheduling from the base avoids cumulative float drift
        self._count += 1
        slot = self._base + self._count * self._interval
        wait = slot - self._clock()
        if wait > 0:
            self._sleep(wait)


class ReplayTransport:
    """Serves recorded responses; optionally simulates transient failures.

    Fixture layout: ``manifest.json`` with optional keys
    ``unavailable_countries`` (list) and ``transient_failures`` (mapping of
    segment key "CC|gender|bin|date" to how many fetches fail before one
    succeeds), plus ``responses.csv`` in the audience CSV schema.
    """

    throttled = False

    def __init__(self, fixture_dir):
        root = Path(fixture_dir)
        manifest_path = root / "manifest.json"
        responses_path = root / "responses.csv"
        if not manifest_path.exists():
            raise FileNotFoundError(str(manifest_path))
        if not responses_path.exists():
            raise FileNotFoundError(str(responses_path))
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
        self.label = manifest.get("label", root.name)
        self.unavailable = frozenset(manifest.get("unavailable_countries", ()))
        self._failures_left = dict(manifest.get("transient_failures", {}))
        self._responses: dict[str, tuple[int, int]] = {}
        with responses_path.open(newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            for row in reader:
                key = "|".join([row["country"], row["gender"], row["age_bin"], row["date"]])
                self._responses[key] = (int(row["total_accounts"]), int(row["dau"]))

    def fetch(self, query: SegmentQuery) -> Mapping[str, int]:
        if query.country in self.unavailable:
            raise UnavailableCountryError(f"no data served for country {query.country}")
        key = query.key
        left = self._failures_left.get(key, 0)
        if left > 0:
            self._failures_left[key] = left - 1
            raise TransportError(f"transient failure for segment {key}")
        if key not in self._responses:
            raise TransportError(f"no recorded response for segment {key}")
        total, dau = self._responses[key]
        return {"total_accounts": total, "dau": dau}


class LiveTransport:
    """Interface stub for an authenticated marketing-API transport.

    Deliberately not implemented: supply credentials and an HTTP layer by
    subclassing and overriding fetch(). Exists so crawl() and rate limiting
    can be exercised against the same surface a real client would use.
    """

    throttled = True

    def fetch(self, query: SegmentQuery) -> Mapping[str, int]:
        raise TransportError(
            "live transport is not configured; use a ReplayTransport fixture or subclass"
        )


def fetch_segment(
    transport,
    query: SegmentQuery,
    retry: RetryPolicy = RetryPolicy(),
    sleep=time.sleep,
    stats: dict | None = None,
) -> AudienceCell:
    """Fetch one segment with retries; returns a fully populated cell.

    Unavailable countries are permanent and never retried. Transient
    transport failures are retried with exponential backoff up to the
    policy's attempt budget, then re-raised.
    """
    last_error: TransportError | None = None
    for attempt in range(1, retry.max_attempts + 1):
        try:
            response = transport.fetch(query)
            return AudienceCell(
                country=query.country,
                gender=query.gender,
                age_bin=query.age_bin,
                date=query.date,
                total_accounts=int(response["total_accounts"]),
                dau=int(response["dau"]),
            )
        except UnavailableCountryError:
            raise
        except TransportError as exc:
            last_error = exc
            logger.warning("segment %s attempt %d failed: %s", query.key, attempt, exc)
            if attempt < retry.max_attempts:
                if stats is not None:
                    stats["retries"] = stats.get("retries", 0) + 1
                if transport.throttled:
                    sleep(retry.backoff_base * 2 ** (attempt - 1))
    if stats is not None:
        stats["failures"] = stats.get("failures", 0) + 1
    raise TransportError(
        f"segment {query.key} failed after {retry.max_attempts} attempts: {last_error}"
    )


def crawl(
    transport,
    spec: CrawlSpec,
    clock=time.monotonic,
    sleep=time.sleep,
) -> SnapshotSet:
    """Enumerate country x gender x age-bin x metric and assemble a snapshot.

    Cells are assembled by key, so the result is identical regardless of
    completion order. Partial failures are recorded in the snapshot notes;
    more than 10% failed segments aborts with the partial manifest attached
    to the raised error.
    """
    bins = audience_bins(spec.age_window)
    limiter = RateLimiter(spec.rate_limit, clock, sleep) if transport.throttled else None
    queries = [
        SegmentQuery(country, gender, age_bin, metric, spec.date)
        for country in sorted(spec.countries)
        for gender in GENDERS
        for age_bin in bins
        for metric in spec.metrics
    ]
    responses: dict[str, dict[str, int]] = {}
    unavailable: set[str] = set()
    failed: list[str] = []
    stats: dict = {}
    for query in queries:
        if query.country in unavailable:
            continue
        if limiter is not None:
            limiter.acquire()
        try:
            cell = fetch_segment(transport, query, spec.retry, sleep=sleep, stats=stats)
        except UnavailableCountryError:
            unavailable.add(query.country)
            continue
        except TransportError:
            failed.append(f"{query.key}|{query.metric}")
            continue
        entry = responses.setdefault(query.key, {})
        entry[query.metric] = getattr(cell, query.metric)

    total_segments = len(queries)
    manifest = {
        "completed": len(responses),
        "failed_segments": sorted(failed),
        "unavailable_countries": sorted(unavailable),
        "retries": stats.get("retries", 0),
    }
    if failed and len(failed) > 0.10 * total_segments:
        error = DataQualityError(
            f"{len(failed)} of {total_segments} segments failed; crawl aborted"
        )
        error.partial_manifest = manifest
        raise error

    cells = []
    for key in sorted(responses):
        entry = responses[key]
        if set(entry) != set(METRICS):
            manifest.setdefault("incomplete_keys", []).append(key)
            continue
        country, gender, bin_label, date_str = key.split("|")
        cells.append(
            AudienceCell(
                country=country,
                gender=gender,
                age_bin=parse_age_bin(bin_label),
                date=dt.date.fromisoformat(date_str),
                total_accounts=entry["total_accounts"],
                dau=entry["dau"],
            )
        )
    source = "replay" if isinstance(transport, ReplayTransport) else "live"
    return SnapshotSet(
        cells=tuple(cells), label=spec.date.isoformat(), source=source, notes=manifest
    )


@dataclass
class ConsistencyReport:
    correlations: dict[str, CorrelationResult]
    n_countries: int
    fgd_is_surrogate: bool

    def to_json_dict(self) -> dict:
        return {
            "n_countries": self.n_countries,
            "fgd_is_surrogate": self.fgd_is_surrogate,
            "correlations": {k: v.to_json_dict() for k, v in self.correlations.items()},
        }


def _aggregate(snapshots: SnapshotSet, window: tuple[int, int]) -> dict[str, dict[str, float]]:
    """Per country and gender: median-over-dates DAU and accounts, summed over bins."""
    bins = audience_bins(window)
    dates = snapshots.dates
    out: dict[str, dict[str, float]] = {}
    for country in snapshots.countries():
        per_gender: dict[str, float] = {}
        for gender in GENDERS:
            dau_total = 0.0
            acc_total = 0.0
            seen = False
            for age_bin in bins:
                dau_vals = [
                    c.dau for d in dates if (c := snapshots.get(country, gender, age_bin, d))
                ]
                if not dau_vals:
                    continue
                seen = True
                dau_total += float(np.median(dau_vals))
                acc_vals = [
                    c.total_accounts
                    for d in dates
                    if (c := snapshots.get(country, gender, age_bin, d))
                ]
                acc_total += float(np.median(acc_vals))
            if seen:
                per_gender[f"dau_{gender}"] = dau_total
                per_gender[f"accounts_{gender}"] = acc_total
        if len(per_gender) == 2 * len(GENDERS):
            out[country] = per_gender
    return out


def snapshot_consistency(
    set_a: SnapshotSet,
    set_b: SnapshotSet,
    census: CensusTable | None = None,
    age_window: tuple[int, int] = (13, AGE_BIN_TOP),
) -> ConsistencyReport:
    """Correlate divide and volume measures between two snapshot sets.

    Pearson correlations (with CIs) of per-country FGD, per-gender DAU and
    per-gender account totals across the common countries. Without a census
    the FGD row falls back to the log male/female DAU ratio; population
    normalization cancels between the two snapshots only up to a country
    constant, so the report flags it as a surrogate.
    """
    agg_a = _aggregate(set_a, age_window)
    agg_b = _aggregate(set_b, age_window)
    common = sorted(set(agg_a) & set(agg_b))
    if not common:
        raise ComparisonError("snapshot sets share no countries with complete gender coverage")

    lo, hi = age_window

    def divide_value(agg: dict[str, float], country: str) -> float | None:
        dau_m, dau_f = agg["dau_male"], agg["dau_female"]
        if dau_m <= 0 or dau_f <= 0:
            return None
        if census is None:
            return float(np.log(dau_m / dau_f))
        pop_m = census.window_population(country, "male", lo, hi)
        pop_f = census.window_population(country, "female", lo, hi)
        if not pop_m or not pop_f:
            return None
        return float(np.log((dau_m / pop_m) / (dau_f / pop_f)))

    correlations: dict[str, CorrelationResult] = {}
    fgd_pairs = [
        (va, vb)
        for c in common
        if (va := divide_value(agg_a[c], c)) is not None
        and (vb := divide_value(agg_b[c], c)) is not None
    ]
    if len(fgd_pairs) >= 4:
        correlations["fgd"] = pearson([p[0] for p in fgd_pairs], [p[1] for p in fgd_pairs])
    for measure in ("dau_male", "dau_female", "accounts_male", "accounts_female"):
        correlations[measure] = pearson(
            [agg_a[c][measure] for c in common], [agg_b[c][measure] for c in common]
        )
    return ConsistencyReport(
        correlations=correlations,
        n_countries=len(common),
        fgd_is_surrogate=census is None,
    )
