"""Regression frame and fit-result containers.

A ModelFrame is a listwise-complete design: one outcome vector plus named
term columns, each tagged by how it was derived (raw value, rank, or
rescaled rank). Row labels keep country identities through pooling, and
``extras`` carries row-aligned metadata (e.g. penetration) that is not
part of the design but is needed for diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from ..errors import DomainError

TERM_TAGS = ("raw", "ranked", "ranked_rescaled")


def _frozen_array(values, dtype=np.float64) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ModelFrame:
    outcome_name: str
    outcome: np.ndarray
    term_names: tuple[str, ...]
    terms: np.ndarray  # shape (n, k), column j belongs to term_names[j]
    tags: tuple[str, ...]
    labels: tuple[str, ...]
    extras: Mapping[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "outcome", _frozen_array(self.outcome))
        terms = np.atleast_2d(np.array(self.terms, dtype=np.float64))
        if terms.shape[0] != self.outcome.shape[0]:
            terms = terms.T
        terms.setflags(write=False)
        object.__setattr__(self, "terms", terms)
        n = self.outcome.shape[0]
        if terms.shape != (n, len(self.term_names)):
            raise DomainError(
                f"term matrix shape {terms.shape} does not match "
                f"{n} rows x {len(self.term_names)} terms"
            )
        if len(self.tags) != len(self.term_names):
            raise DomainError("one tag per term required")
        for tag in self.tags:
            if tag not in TERM_TAGS:
                raise DomainError(f"unknown term tag {tag!r}")
        if len(self.labels) != n:
            raise DomainError("one row label per observation required")
        if not np.isfinite(self.outcome).all() or not np.isfinite(terms).all():
            raise DomainError("frame contains non-finite values; frames must be listwise-complete")
        for j, tag in enumerate(self.tags):
            if tag == "ranked":
                self._check_rank_column(self.term_names[j], terms[:, j])
            elif tag == "ranked_rescaled":
                col = terms[:, j]
                if col.min() < -1e-9 or col.max() > 1.0 + 1e-9:
                    raise DomainError(
                        f"column {self.term_names[j]!r} tagged 'ranked_rescaled' "
                        "must lie in [0, 1]"
                    )
        for key, col in self.extras.items():
            if len(col) != n:
                raise DomainError(f"extra column {key!r} length mismatch")

    @staticmethod
    def _check_rank_column(name: str, col: np.ndarray) -> None:
        n = col.shape[0]
        expected_sum = n * (n + 1) / 2.0
        if col.min() < 1.0 - 1e-9 or col.max() > n + 1e-9 or abs(col.sum() - expected_sum) > 1e-6:
            raise DomainError(f"column {name!r} tagged 'ranked' is not a valid rank vector")

    @classmethod
    def build(
        cls,
        outcome_name: str,
        outcome,
        terms: Iterable[tuple[str, Sequence[float], str]],
        labels: Sequence[str],
        extras: Mapping[str, Sequence[float]] | None = None,
    ) -> "ModelFrame":
        names, cols, tags = [], [], []
        for name, values, tag in terms:
            names.append(name)
            cols.append(np.asarray(values, dtype=np.float64))
            tags.append(tag)
        matrix = np.column_stack(cols) if cols else np.empty((len(labels), 0))
        return cls(
            outcome_name=outcome_name,
            outcome=np.asarray(outcome, dtype=np.float64),
            term_names=tuple(names),
            terms=matrix,
            tags=tuple(tags),
            labels=tuple(labels),
            extras={k: _frozen_array(v) for k, v in (extras or {}).items()},
        )

    @property
    def n(self) -> int:
        return self.outcome.shape[0]

    @property
    def coef_names(self) -> tuple[str, ...]:
        return ("Intercept",) + self.term_names

    def design(self) -> np.ndarray:
        """Design matrix with the intercept column first."""
        return np.column_stack([np.ones(self.n), self.terms])

    def column(self, name: str) -> np.ndarray:
        if name == self.outcome_name:
            return self.outcome
        try:
            j = self.term_names.index(name)
        except ValueError:
            raise DomainError(f"no column named {name!r} in frame") from None
        return self.terms[:, j]

    def drop_terms(self, names: Sequence[str]) -> "ModelFrame":
        keep = [j for j, name in enumerate(self.term_names) if name not in names]
        return ModelFrame(
            outcome_name=self.outcome_name,
            outcome=self.outcome,
            term_names=tuple(self.term_names[j] for j in keep),
            terms=self.terms[:, keep],
            tags=tuple(self.tags[j] for j in keep),
            labels=self.labels,
            extras=self.extras,
        )


@dataclass
class TermFit:
    """Estimate for a single coefficient (intercept included)."""

    name: str
    estimate: float
    p: float
    se: float | None = None
    ci: tuple[float, float] | None = None

    def se_or_ci(self):
        if self.se is not None:
            return self.se
        return list(self.ci) if self.ci is not None else None


@dataclass
class FitResult:
    """One fitted linear model: point estimates, uncertainty, residual bundle.

    ``estimator`` is one of ols | hc | robust_mm | bayes. ``draws`` holds
    kept posterior draws for the bayes estimator (not serialized), ``cov``
    the coefficient covariance for the others; both support derived
    linear-combination intervals downstream.
    """

    estimator: str
    n: int
    r2: float
    terms: list[TermFit]
    residuals: np.ndarray
    fitted: np.ndarray
    df_resid: int
    diagnostics: dict = field(default_factory=dict)
    notes: dict = field(default_factory=dict)
    cov: np.ndarray | None = None
    draws: np.ndarray | None = None

    def term(self, name: str) -> TermFit:
        for t in self.terms:
            if t.name == name:
                return t
        raise KeyError(name)

    @property
    def estimates(self) -> np.ndarray:
        return np.array([t.estimate for t in self.terms])

    def to_json_dict(self) -> dict:
        return {
            "estimator": self.estimator,
            "n": self.n,
            "r2": self.r2,
            "terms": [
                {
                    "name": t.name,
                    "estimate": t.estimate,
                    "se_or_ci": t.se_or_ci(),
                    "p": t.p,
                }
                for t in self.terms
            ],
            "diagnostics": self.diagnostics,
        }
