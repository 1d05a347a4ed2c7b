"""fgdkit: audience-based gender-divide metrics and the regression models built on them."""

from .dataset import (
    coverage_report,
    load_audience,
    load_census,
    load_indicators,
    write_audience_csv,
)
from .metrics import build_panel, divide_metrics, fgd, mean_active_age, penetration
from .models import (
    diagnostics,
    fit_changes_models,
    fit_delta_edu_model,
    fit_fgd_model,
    fit_network_model,
    stratify,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "build_panel",
    "coverage_report",
    "diagnostics",
    "divide_metrics",
    "fgd",
    "fit_changes_models",
    "fit_delta_edu_model",
    "fit_fgd_model",
    "fit_network_model",
    "load_audience",
    "load_census",
    "load_indicators",
    "mean_active_age",
    "penetration",
    "stratify",
    "write_audience_csv",
]
