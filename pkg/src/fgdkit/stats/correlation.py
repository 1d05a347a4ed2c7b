"""Correlation measures with confidence intervals, and weighted proportions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats as sps

from ..errors import DegenerateError, DomainError
from .ranks import rank_transform


@dataclass
class CorrelationResult:
    r: float
    ci: tuple[float, float]
    p: float
    n: int
    method: str

    def to_json_dict(self) -> dict:
        return {"r": self.r, "ci": list(self.ci), "p": self.p, "n": self.n, "method": self.method}


def _clean_pair(x, y):
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise DomainError("correlation needs two equal-length vectors")
    if x.size < 4:
        raise DomainError("correlation needs at least 4 observations")
    if not (np.isfinite(x).all() and np.isfinite(y).all()):
        raise DomainError("correlation requires finite values")
    if np.ptp(x) == 0.0 or np.ptp(y) == 0.0:
        raise DegenerateError("constant vector; correlation undefined")
    return x, y


def _pearson_r(x: np.ndarray, y: np.ndarray) -> float:
    xc = x - x.mean()
    yc = y - y.mean()
    return float((xc @ yc) / np.sqrt((xc @ xc) * (yc @ yc)))


def _t_pvalue(r: float, n: int) -> float:
    if abs(r) >= 1.0:
        return 0.0
    t = abs(r) * np.sqrt((n - 2) / (1.0 - r * r))
    return float(2.0 * sps.t.sf(t, n - 2))


def pearson(x, y, alpha: float = 0.05) -> CorrelationResult:
    """Pearson r with Fisher-z confidence interval and two-sided t p-value."""
    x, y = _clean_pair(x, y)
    n = x.size
    r = _pearson_r(x, y)
    zcrit = sps.norm.ppf(1.0 - alpha / 2.0)
    if abs(r) >= 1.0:
        ci = (r, r)
    else:
        z = np.arctanh(r)
        half = zcrit / np.sqrt(n - 3)
        ci = (float(np.tanh(z - half)), float(np.tanh(z + half)))
    return CorrelationResult(r=r, ci=ci, p=_t_pvalue(r, n), n=n, method="pearson")


def spearman(x, y, *, seed: int, alpha: float = 0.05, resamples: int = 10_000) -> CorrelationResult:
    """Spearman rho with a seeded percentile-bootstrap confidence interval.

    Ranks use average ties; the p-value is the usual t approximation on rho.
    Pair resamples whose x or y collapses to a constant are dropped from the
    percentile computation.
    """
    x, y = _clean_pair(x, y)
    if resamples < 100:
        raise DomainError("need at least 100 bootstrap resamples")
    n = x.size
    rho = _pearson_r(rank_transform(x), rank_transform(y))
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, n, size=(resamples, n))
    xb = x[idx]
    yb = y[idx]
    ok = (np.ptp(xb, axis=1) > 0) & (np.ptp(yb, axis=1) > 0)
    # rank 1 = highest, consistent with rank_transform; direction cancels in r
    rx = sps.rankdata(-xb[ok], method="average", axis=1)
    ry = sps.rankdata(-yb[ok], method="average", axis=1)
    rxc = rx - rx.mean(axis=1, keepdims=True)
    ryc = ry - ry.mean(axis=1, keepdims=True)
    num = np.einsum("ij,ij->i", rxc, ryc)
    den = np.sqrt(np.einsum("ij,ij->i", rxc, rxc) * np.einsum("ij,ij->i", ryc, ryc))
    rhos = num / den
    lo, hi = np.percentile(rhos, [100 * alpha / 2.0, 100 * (1.0 - alpha / 2.0)])
    return CorrelationResult(
        r=float(rho), ci=(float(lo), float(hi)), p=_t_pvalue(rho, n), n=n, method="spearman"
    )


def weighted_proportion(responses, weights) -> float:
    """Weighted fraction of positive 0/1 responses: sum(w*y) / sum(w)."""
    y = np.asarray(responses, dtype=np.float64)
    w = np.asarray(weights, dtype=np.float64)
    if y.shape != w.shape or y.ndim != 1:
        raise DomainError("responses and weights must be equal-length vectors")
    if not set(np.unique(y)).issubset({0.0, 1.0}):
        raise DomainError("responses must be 0/1")
    if (w < 0).any():
        raise DomainError("weights must be non-negative")
    total = w.sum()
    if total <= 0:
        raise DegenerateError("weights sum to zero; proportion undefined")
    return float((w @ y) / total)
