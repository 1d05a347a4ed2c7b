"""Rank transforms. Rank 1 is always the highest value."""

from __future__ import annotations

import numpy as np

from ..errors import DomainError


def rank_transform(values, ties: str = "average") -> np.ndarray:
    """Ranks with 1 for the largest value; tied values share their average rank."""
    if ties != "average":
        raise DomainError(f"unsupported tie policy {ties!r}")
    x = np.asarray(values, dtype=np.float64)
    if x.ndim != 1 or x.size < 2:
        raise DomainError("rank_transform needs a vector of at least 2 values")
    if not np.isfinite(x).all():
        raise DomainError("rank_transform requires finite values")
    n = x.size
    order = np.argsort(-x, kind="stable")
    ranks = np.empty(n, dtype=np.float64)
    ranks[order] = np.arange(1, n + 1, dtype=np.float64)
    # average ranks within runs of equal values
    xs = x[order]
    boundaries = np.flatnonzero(xs[1:] != xs[:-1]) + 1
    starts = np.concatenate(([0], boundaries))
    ends = np.concatenate((boundaries, [n]))
    for lo, hi in zip(starts, ends):
        if hi - lo > 1:
            ranks[order[lo:hi]] = (lo + 1 + hi) / 2.0
    return ranks


def rescale_unit(ranks) -> np.ndarray:
    """Affine map of a rank vector onto [0, 1]: rank n -> 0, rank 1 -> 1."""
    r = np.asarray(ranks, dtype=np.float64)
    if r.ndim != 1 or r.size < 2:
        raise DomainError("rescale_unit needs a rank vector of at least 2 values")
    if not np.isfinite(r).all():
        raise DomainError("rescale_unit requires finite ranks")
    n = r.size
    return (n - r) / (n - 1.0)
