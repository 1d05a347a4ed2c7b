"""Least-squares estimation: classical OLS, sandwich standard errors, VIF, ANOVA."""

from __future__ import annotations

import numpy as np
import scipy.linalg
from scipy import stats as sps

from ..errors import DegenerateError, DomainError, SampleSizeError, SingularityError
from .frame import FitResult, ModelFrame, TermFit

HC_FLAVORS = ("HC0", "HC1", "HC2", "HC3")


def checked_design(frame: ModelFrame) -> np.ndarray:
    """Design matrix with intercept; raises on short or rank-deficient frames."""
    x = frame.design()
    n, k = x.shape
    if n <= k:
        raise SampleSizeError(f"need more than {k} rows to fit {k - 1} terms plus intercept, got {n}")
    _, r, piv = scipy.linalg.qr(x, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    tol = diag.max() * max(n, k) * np.finfo(np.float64).eps
    rank = int((diag > tol).sum())
    if rank < k:
        names = frame.coef_names
        dependent = tuple(sorted(names[j] for j in piv[rank:]))
        raise SingularityError(
            f"design is rank deficient; dependent columns: {', '.join(dependent)}",
            columns=dependent,
        )
    return x


def _tss(y: np.ndarray) -> float:
    tss = float(np.sum((y - y.mean()) ** 2))
    if tss == 0.0:
        raise DegenerateError("outcome is constant; fit is undefined")
    return tss


def ols_fit(frame: ModelFrame) -> FitResult:
    """Ordinary least squares with classical standard errors.

    Returns coefficients (intercept first), two-sided t p-values, R^2 and
    the residual vector. Residuals are orthogonal to every design column
    to numerical precision.
    """
    x = checked_design(frame)
    y = frame.outcome
    n, k = x.shape
    beta, _, _, _ = scipy.linalg.lstsq(x, y)
    fitted = x @ beta
    resid = y - fitted
    rss = float(resid @ resid)
    tss = _tss(y)
    dof = n - k
    s2 = rss / dof
    xtx_inv = np.linalg.inv(x.T @ x)
    cov = s2 * xtx_inv
    se = np.sqrt(np.diag(cov))
    with np.errstate(divide="ignore"):
        tvals = np.where(se > 0, beta / se, np.inf * np.sign(beta))
    pvals = 2.0 * sps.t.sf(np.abs(tvals), dof)
    terms = [
        TermFit(name=name, estimate=float(b), se=float(s), p=float(p))
        for name, b, s, p in zip(frame.coef_names, beta, se, pvals)
    ]
    return FitResult(
        estimator="ols",
        n=n,
        r2=1.0 - rss / tss,
        terms=terms,
        residuals=resid,
        fitted=fitted,
        df_resid=dof,
        cov=cov,
    )


def hc_se(frame: ModelFrame, fit: FitResult, flavor: str = "HC3") -> FitResult:
    """Replace classical standard errors with heteroskedasticity-consistent ones.

    Coefficients are copied unchanged from the OLS fit; only the covariance,
    standard errors, confidence intervals and p-values are recomputed.
    HC3 is the default (conservative small-sample choice); HC0..HC2 are
    available for comparison.
    """
    if flavor not in HC_FLAVORS:
        raise DomainError(f"unknown HC flavor {flavor!r}; expected one of {HC_FLAVORS}")
    if fit.estimator != "ols":
        raise DomainError("hc_se expects an ols FitResult for the same frame")
    x = checked_design(frame)
    n, k = x.shape
    e = fit.residuals
    xtx_inv = np.linalg.inv(x.T @ x)
    h = np.einsum("ij,jk,ik->i", x, xtx_inv, x)
    if np.any(h >= 1.0 - 1e-12):
        raise DegenerateError("a row has leverage 1; sandwich variance undefined")
    if flavor == "HC0":
        omega = e**2
    elif flavor == "HC1":
        omega = e**2 * n / (n - k)
    elif flavor == "HC2":
        omega = e**2 / (1.0 - h)
    else:
        omega = e**2 / (1.0 - h) ** 2
    cov = xtx_inv @ (x.T * omega) @ x @ xtx_inv
    se = np.sqrt(np.diag(cov))
    dof = n - k
    tcrit = sps.t.ppf(0.975, dof)
    terms = []
    for t_old, s in zip(fit.terms, se):
        est = t_old.estimate
        tval = est / s if s > 0 else np.inf * np.sign(est)
        terms.append(
            TermFit(
                name=t_old.name,
                estimate=est,
                se=float(s),
                ci=(est - tcrit * s, est + tcrit * s),
                p=float(2.0 * sps.t.sf(abs(tval), dof)),
            )
        )
    return FitResult(
        estimator="hc",
        n=n,
        r2=fit.r2,
        terms=terms,
        residuals=fit.residuals,
        fitted=fit.fitted,
        df_resid=dof,
        diagnostics={"hc_flavor": flavor},
        cov=cov,
    )


def _aux_r2(y: np.ndarray, x: np.ndarray) -> float:
    beta, _, _, _ = scipy.linalg.lstsq(x, y)
    resid = y - x @ beta
    tss = float(np.sum((y - y.mean()) ** 2))
    if tss == 0.0:
        return 1.0
    return 1.0 - float(resid @ resid) / tss


def vif(frame: ModelFrame) -> dict[str, float]:
    """Variance inflation factor per term: 1/(1 - R^2 of term on the others).

    Perfectly collinear terms are reported as inf rather than raising, so a
    caller can flag them.
    """
    k = len(frame.term_names)
    if k < 2:
        raise DomainError("vif needs at least 2 non-intercept terms")
    ones = np.ones((frame.n, 1))
    out: dict[str, float] = {}
    for j, name in enumerate(frame.term_names):
        others = np.delete(frame.terms, j, axis=1)
        r2 = _aux_r2(frame.terms[:, j], np.hstack([ones, others]))
        out[name] = float("inf") if r2 >= 1.0 - 1e-12 else 1.0 / (1.0 - r2)
    return out


def anova_f(frame: ModelFrame, term: str) -> tuple[float, float]:
    """Type-II F test of one term against the model without it."""
    if term not in frame.term_names:
        raise DomainError(f"no term named {term!r} in frame")
    full = ols_fit(frame)
    reduced = ols_fit(frame.drop_terms([term]))
    rss_full = float(full.residuals @ full.residuals)
    rss_red = float(reduced.residuals @ reduced.residuals)
    df = full.df_resid
    if rss_full <= 0.0:
        raise DegenerateError("full model has zero residual variance; F undefined")
    f = (rss_red - rss_full) / (rss_full / df)
    return float(f), float(sps.f.sf(f, 1, df))
