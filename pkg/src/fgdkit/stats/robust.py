"""Robust MM regression: high-breakdown S-estimate followed by an efficient M-step.

Both stages use Tukey's bisquare. The S-stage (c = 1.548, 50% breakdown)
finds coefficients minimizing the M-scale of residuals through randomized
p-subset candidates with iterative local refinement; the M-step (c = 4.685,
95% Gaussian efficiency) runs IRLS from the S solution with the scale held
fixed. The subset draw is the only randomness, so the fit is deterministic
given the seed.
"""

from __future__ import annotations

import numpy as np
from scipy import integrate
from scipy import stats as sps

from ..errors import ConvergenceError, DegenerateError
from .frame import FitResult, ModelFrame, TermFit
from .linear import _tss, checked_design

S_CONSTANT = 1.547645
M_CONSTANT = 4.685061


def _rho(u: np.ndarray, c: float) -> np.ndarray:
    """Bisquare rho normalized to [0, 1]."""
    t = np.clip(u / c, -1.0, 1.0)
    return 1.0 - (1.0 - t * t) ** 3


def _psi(u: np.ndarray, c: float) -> np.ndarray:
    t = u / c
    inside = np.abs(t) <= 1.0
    return np.where(inside, u * (1.0 - t * t) ** 2, 0.0)


def _psi_prime(u: np.ndarray, c: float) -> np.ndarray:
    t = (u / c) ** 2
    inside = t <= 1.0
    return np.where(inside, (1.0 - t) * (1.0 - 5.0 * t), 0.0)


def _weights(u: np.ndarray, c: float) -> np.ndarray:
    t = u / c
    inside = np.abs(t) <= 1.0
    return np.where(inside, (1.0 - t * t) ** 2, 0.0)


def _consistency_b(c: float) -> float:
    """E[rho(Z)] under the standard normal, the M-scale target."""
    val, _ = integrate.quad(lambda z: _rho(np.array([z]), c)[0] * sps.norm.pdf(z), -c - 8, c + 8)
    return val


def _m_scale(resid: np.ndarray, c: float, b: float, s0: float | None = None) -> float:
    """M-scale of residuals: the s solving mean(rho(r/s)) = b."""
    median_start = float(np.median(np.abs(resid))) / 0.6745
    s = s0 if s0 and s0 > 0 else median_start
    if s <= 0.0:
        # majority of residuals exactly zero
        return 0.0
    for _ in range(200):
        mean_rho = float(np.mean(_rho(resid / s, c)))
        if mean_rho <= 0.0:
            # s0 was orders of magnitude above the residuals and rho
            # underflowed; re-anchor at the data-driven start
            if median_start <= 0.0:
                return 0.0
            s = median_start
            continue
        s_new = s * np.sqrt(mean_rho / b)
        if abs(s_new - s) <= 1e-12 * s:
            return s_new
        s = s_new
    return s


def _wls(x: np.ndarray, y: np.ndarray, w: np.ndarray) -> np.ndarray | None:
    xw = x * w[:, None]
    try:
        return np.linalg.solve(xw.T @ x, xw.T @ y)
    except np.linalg.LinAlgError:
        return None


def _s_estimate(x, y, c, b, rng, n_subsets, local_steps, best_keep):
    """Randomized subset search for the minimum-M-scale coefficient vector."""
    n, p = x.shape
    candidates: list[tuple[float, np.ndarray]] = []
    for _ in range(n_subsets):
        beta = None
        for _attempt in range(100):
            rows = rng.choice(n, size=p, replace=False)
            try:
                candidate = np.linalg.solve(x[rows], y[rows])
            except np.linalg.LinAlgError:
                continue
            # discard numerically exploded solves from near-singular subsets
            if np.isfinite(candidate).all() and np.max(np.abs(candidate)) < 1e100:
                beta = candidate
                break
        if beta is None:
            continue
        resid = y - x @ beta
        s = _m_scale(resid, c, b)
        if s == 0.0:
            return beta, 0.0
        for _step in range(local_steps):
            w = _weights(resid / s, c)
            improved = _wls(x, y, w)
            if improved is None:
                break
            beta = improved
            resid = y - x @ beta
            s = _m_scale(resid, c, b, s0=s)
            if s == 0.0:
                return beta, 0.0
        candidates.append((s, beta))
    if not candidates:
        raise DegenerateError("no non-singular coefficient subsets found")

    candidates.sort(key=lambda t: t[0])
    best_s, best_beta = np.inf, None
    for s, beta in candidates[:best_keep]:
        resid = y - x @ beta
        for _it in range(50):
            w = _weights(resid / s, c)
            improved = _wls(x, y, w)
            if improved is None:
                break
            delta = np.max(np.abs(improved - beta)) / max(np.max(np.abs(improved)), 1e-10)
            beta = improved
            resid = y - x @ beta
            s = _m_scale(resid, c, b, s0=s)
            if s == 0.0:
                return beta, 0.0
            if delta < 1e-7:
                break
        if s < best_s:
            best_s, best_beta = s, beta
    return best_beta, best_s


def _exact_fit_result(frame, x, y, beta):
    fitted = x @ beta
    resid = y - fitted
    terms = [
        TermFit(name=name, estimate=float(v), se=0.0, p=0.0 if v != 0 else 1.0)
        for name, v in zip(frame.coef_names, beta)
    ]
    return FitResult(
        estimator="robust_mm",
        n=x.shape[0],
        r2=1.0,
        terms=terms,
        residuals=resid,
        fitted=fitted,
        df_resid=x.shape[0] - x.shape[1],
        diagnostics={"exact_fit": True, "scale": 0.0},
    )


def robust_mm_fit(
    frame: ModelFrame,
    *,
    seed: int = 0,
    s_constant: float = S_CONSTANT,
    m_constant: float = M_CONSTANT,
    n_subsets: int = 500,
    local_steps: int = 2,
    best_keep: int = 5,
    max_iter: int = 200,
    tol: float = 1e-8,
) -> FitResult:
    """MM regression estimate of the frame.

    Returns bisquare-weighted coefficients with asymptotic robust standard
    errors, two-sided t p-values and the weighted R^2
    1 - sum(w r^2) / sum(w (y - wmean(y))^2) using the final M-step weights.
    Raises ConvergenceError (with the per-iteration change trace) if the
    IRLS M-step does not converge within ``max_iter``.
    """
    x = checked_design(frame)
    y = frame.outcome
    n, p = x.shape
    _tss(y)  # reject constant outcome

    b = _consistency_b(s_constant)
    rng = np.random.default_rng(seed)
    beta, scale = _s_estimate(x, y, s_constant, b, rng, n_subsets, local_steps, best_keep)
    y_scale = float(np.sqrt(np.mean((y - y.mean()) ** 2)))
    if scale <= 1e-10 * y_scale:
        return _exact_fit_result(frame, x, y, beta)

    # M-step: IRLS with the S-scale held fixed
    trace: list[float] = []
    resid = y - x @ beta
    converged = False
    for _it in range(max_iter):
        w = _weights(resid / scale, m_constant)
        improved = _wls(x, y, w)
        if improved is None:
            raise DegenerateError("all observations downweighted to zero in M-step")
        delta = float(np.max(np.abs(improved - beta)) / max(np.max(np.abs(improved)), 1e-10))
        trace.append(delta)
        beta = improved
        resid = y - x @ beta
        if delta < tol:
            converged = True
            break
    if not converged:
        raise ConvergenceError(
            f"M-step did not converge within {max_iter} iterations "
            f"(last change {trace[-1]:.3e})",
            trace=trace,
        )

    u = resid / scale
    psi = _psi(u, m_constant)
    psi_p = _psi_prime(u, m_constant)
    mean_psi_p = float(np.mean(psi_p))
    if mean_psi_p <= 0.0:
        raise DegenerateError("robust variance undefined: mean psi' is zero")
    factor = scale**2 * float(np.sum(psi**2)) / (n - p) / mean_psi_p**2
    cov = factor * np.linalg.inv(x.T @ x)
    se = np.sqrt(np.diag(cov))
    dof = n - p
    terms = []
    for name, est, s_err in zip(frame.coef_names, beta, se):
        tval = est / s_err if s_err > 0 else np.inf * np.sign(est)
        terms.append(
            TermFit(
                name=name,
                estimate=float(est),
                se=float(s_err),
                p=float(2.0 * sps.t.sf(abs(tval), dof)),
            )
        )

    w_final = _weights(u, m_constant)
    wsum = float(w_final.sum())
    y_wmean = float(w_final @ y) / wsum
    denom = float(w_final @ (y - y_wmean) ** 2)
    if denom <= 0.0:
        raise DegenerateError("weighted outcome variance is zero; robust R^2 undefined")
    r2 = 1.0 - float(w_final @ resid**2) / denom

    return FitResult(
        estimator="robust_mm",
        n=n,
        r2=r2,
        terms=terms,
        residuals=resid,
        fitted=x @ beta,
        df_resid=dof,
        diagnostics={
            "scale": float(scale),
            "iterations": len(trace),
            "s_constant": s_constant,
            "m_constant": m_constant,
        },
        cov=cov,
    )
