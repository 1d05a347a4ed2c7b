"""Exception hierarchy shared by all fgdkit modules.

Every error raised by the library derives from FgdkitError so the CLI can
map library failures to a single exit code while keeping distinct types
for tests and callers.
"""

from __future__ import annotations


class FgdkitError(Exception):
    """Base class for all fgdkit errors."""


class ParseError(FgdkitError):
    """Malformed input file content; carries file line number and field."""

    def __init__(self, message: str, *, line: int | None = None, field: str | None = None):
        self.line = line
        self.field = field
        prefix = ""
        if line is not None:
            prefix += f"line {line}: "
        if field is not None:
            prefix += f"field '{field}': "
        super().__init__(prefix + message)


class IntegrityError(FgdkitError):
    """Data violates a table invariant (duplicate key, dau > total_accounts, ...)."""


class MissingDataError(FgdkitError):
    """A required observation is absent; message names the missing key."""


class ConfigError(FgdkitError):
    """Invalid run configuration (empty panel, bad month, bad window, ...)."""


class UndefinedMetricError(FgdkitError):
    """A divide metric is undefined for the requested country (zero ratio or population)."""


class DomainError(FgdkitError):
    """Statistical operation called outside its input domain."""


class SingularityError(FgdkitError):
    """Rank-deficient design matrix; names the dependent columns."""

    def __init__(self, message: str, columns: tuple[str, ...] = ()):
        self.columns = columns
        super().__init__(message)


class DegenerateError(FgdkitError):
    """Degenerate input: constant vector, unit leverage, all-zero weights."""


class ConvergenceError(FgdkitError):
    """Iterative estimator failed to converge; carries the iteration trace."""

    def __init__(self, message: str, trace: list[float] | None = None):
        self.trace = trace or []
        super().__init__(message)


class SamplerError(FgdkitError):
    """MCMC chain produced a non-finite draw."""


class SampleSizeError(FgdkitError):
    """Too few complete rows to fit the requested model."""


class DataQualityError(FgdkitError):
    """Too many rows or resamples had to be discarded to trust the result."""


class ComparisonError(FgdkitError):
    """Snapshot comparison impossible (disjoint country coverage)."""


class UnavailableCountryError(FgdkitError):
    """The audience source does not serve the requested country."""


class TransportError(FgdkitError):
    """Transient or permanent acquisition transport failure."""
