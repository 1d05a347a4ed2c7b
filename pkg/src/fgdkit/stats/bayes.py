"""Gibbs-sampled Bayesian linear regression with vague conjugate priors."""

from __future__ import annotations

import numpy as np

from .. import _kernels
from ..errors import DomainError, SamplerError
from .frame import FitResult, ModelFrame, TermFit
from .linear import _tss, checked_design


def bayes_fit(
    frame: ModelFrame,
    iterations: int = 10_000,
    burn_in: int = 1_000,
    *,
    seed: int,
    prior_var: float = 1e6,
    prior_a: float = 1e-3,
    prior_b: float = 1e-3,
) -> FitResult:
    """Posterior summary of the normal linear model.

    Priors: coefficients iid N(0, prior_var), noise variance
    InvGamma(prior_a, prior_b). Reports the posterior median, the central
    95% credible interval, and p = 2 * min(Pr(b > 0), Pr(b < 0)) from the
    kept draws (floored at 2/n_kept, the resolution of the chain).
    Deterministic given the seed: all randomness is pre-generated and the
    chain consumes it in a fixed order on either kernel backend.
    """
    if iterations < 2000:
        raise DomainError("bayes_fit needs at least 2000 iterations")
    if not 0 <= burn_in < iterations:
        raise DomainError("burn_in must lie in [0, iterations)")
    x = checked_design(frame)
    y = frame.outcome
    n, k = x.shape
    tss = _tss(y)

    rng = np.random.default_rng(seed)
    z = rng.standard_normal((iterations, k))
    gamma_draws = rng.gamma(prior_a + n / 2.0, 1.0, size=iterations)
    betas, sigma2s = _kernels.gibbs_chain(x, y, 1.0 / prior_var, prior_b, z, gamma_draws)
    kept = betas[burn_in:]
    if not np.isfinite(kept).all() or not np.isfinite(sigma2s[burn_in:]).all():
        raise SamplerError("chain produced a non-finite draw")

    med = np.median(kept, axis=0)
    lo, hi = np.percentile(kept, [2.5, 97.5], axis=0)
    n_kept = kept.shape[0]
    frac_pos = (kept > 0).mean(axis=0)
    frac_neg = (kept < 0).mean(axis=0)
    pvals = np.maximum(2.0 * np.minimum(frac_pos, frac_neg), 2.0 / n_kept)

    fitted = x @ med
    resid = y - fitted
    rss = float(resid @ resid)
    terms = [
        TermFit(name=name, estimate=float(m), ci=(float(a), float(b)), p=float(p))
        for name, m, a, b, p in zip(frame.coef_names, med, lo, hi, pvals)
    ]
    return FitResult(
        estimator="bayes",
        n=n,
        r2=1.0 - rss / tss,
        terms=terms,
        residuals=resid,
        fitted=fitted,
        df_resid=n - k,
        diagnostics={"iterations": iterations, "burn_in": burn_in, "kernel": _kernels.BACKEND},
        draws=kept,
    )
