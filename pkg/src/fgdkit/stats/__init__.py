"""Statistical engine: transforms, estimators, diagnostics, bootstrap machinery.

Every stochastic operation takes an explicit seed and is bit-reproducible
across runs and across degrees of parallelism.
"""

from .bayes import bayes_fit
from .boot import PartialR2Result, bootstrap_partial_r2
from .correlation import CorrelationResult, pearson, spearman, weighted_proportion
from .frame import FitResult, ModelFrame, TermFit
from .linear import anova_f, hc_se, ols_fit, vif
from .normality import shapiro_wilk
from .ranks import rank_transform, rescale_unit
from .robust import robust_mm_fit

__all__ = [
    "CorrelationResult",
    "FitResult",
    "ModelFrame",
    "PartialR2Result",
    "TermFit",
    "anova_f",
    "bayes_fit",
    "bootstrap_partial_r2",
    "hc_se",
    "ols_fit",
    "pearson",
    "rank_transform",
    "rescale_unit",
    "robust_mm_fit",
    "shapiro_wilk",
    "spearman",
    "vif",
    "weighted_proportion",
]
