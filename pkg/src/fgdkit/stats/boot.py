"""Bootstrap partial R^2 of a conditioning term after controls."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .. import _kernels
from ..errors import DataQualityError, DomainError
from .frame import ModelFrame

MAX_SKIP_FRACTION = 0.01


@dataclass
class PartialR2Result:
    values: np.ndarray  # per-resample R^2, NaN where skipped
    skipped: np.ndarray  # bool mask of skipped resamples
    median: float
    resamples: int

    @property
    def n_skipped(self) -> int:
        return int(self.skipped.sum())

    def to_json_dict(self) -> dict:
        return {
            "median": self.median,
            "resamples": self.resamples,
            "skipped": self.n_skipped,
        }


def _resample_indices(seed: int, resamples: int, n: int) -> np.ndarray:
    """One index row per resample, each from its own child stream of the seed.

    Substreams make the draw for resample b independent of how many other
    resamples run, or in what order, so parallel execution cannot change
    the result.
    """
    children = np.random.SeedSequence(seed).spawn(resamples)
    idx = np.empty((resamples, n), dtype=np.int64)
    for b, child in enumerate(children):
        idx[b] = np.random.default_rng(child).integers(0, n, size=n)
    return idx


def bootstrap_partial_r2(
    frame: ModelFrame,
    target: str,
    conditioning_term: str,
    controls: list[str],
    resamples: int = 10_000,
    *,
    seed: int,
    workers: int = 1,
) -> PartialR2Result:
    """Distribution and median of the conditioning term's partial R^2.

    Per resample (rows drawn with replacement): residualize the target
    against the controls (plus intercept), regress those residuals on the
    conditioning term and record the R^2. Resamples with a rank-deficient
    control design are skipped and counted; more than 1% skips is an error.
    """
    if resamples < 1000:
        raise DomainError("bootstrap_partial_r2 needs at least 1000 resamples")
    if conditioning_term in controls:
        raise DomainError("conditioning term must not appear among the controls")
    y = np.ascontiguousarray(frame.column(target))
    z = np.ascontiguousarray(frame.column(conditioning_term))
    xc = np.column_stack([np.ones(frame.n)] + [frame.column(c) for c in controls])
    idx = _resample_indices(seed, resamples, frame.n)

    if workers > 1:
        bounds = np.linspace(0, resamples, workers + 1, dtype=int)
        chunks = [idx[a:b] for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda c: _kernels.bootstrap_partial_r2(y, xc, z, c), chunks))
        values = np.concatenate([p[0] for p in parts])
        skipped = np.concatenate([p[1] for p in parts])
    else:
        values, skipped = _kernels.bootstrap_partial_r2(y, xc, z, idx)

    n_skipped = int(skipped.sum())
    if n_skipped > MAX_SKIP_FRACTION * resamples:
        raise DataQualityError(
            f"{n_skipped}/{resamples} resamples had rank-deficient controls; "
            "partial R^2 is not trustworthy"
        )
    median = float(np.median(values[~skipped]))
    return PartialR2Result(values=values, skipped=skipped, median=median, resamples=resamples)
