"""Pure NumPy implementations of the hot kernels.

These are the fallback for the compiled extension and the reference for
its behaviour. Both backends consume pre-generated randomness (normal and
gamma draws, resample index matrices), so a given seed yields the same
chain or bootstrap regardless of backend up to floating-point reordering,
and results never depend on execution order or worker count.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import solve_triangular


def gibbs_chain(x, y, prior_prec, b0, z, gamma_draws):
    """Run the Gibbs chain of a conjugate normal linear model.

    Model: y ~ N(X beta, sigma2 I), beta_j ~ N(0, 1/prior_prec),
    sigma2 ~ InvGamma(a0, b0). The constant-shape Gamma(a0 + n/2, 1) draws
    are supplied in ``gamma_draws`` (one per iteration), the standard
    normal draws in ``z`` with shape (iterations, k).

    Returns (betas, sigma2s) with shapes (iterations, k) and (iterations,).
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    n, k = x.shape
    iters = z.shape[0]
    xtx = x.T @ x
    xty = x.T @ y
    eye = np.eye(k)

    betas = np.empty((iters, k))
    sigma2s = np.empty(iters)
    # data-scale start keeps early iterations inside float range
    sigma2 = float(np.mean((y - y.mean()) ** 2)) or 1.0
    for t in range(iters):
        a = xtx / sigma2 + prior_prec * eye
        lo = np.linalg.cholesky(a)
        w = solve_triangular(lo, xty / sigma2, lower=True)
        mu = solve_triangular(lo.T, w, lower=False)
        beta = mu + solve_triangular(lo.T, z[t], lower=False)
        resid = y - x @ beta
        rss = float(resid @ resid)
        sigma2 = (b0 + 0.5 * rss) / gamma_draws[t]
        betas[t] = beta
        sigma2s[t] = sigma2
    return betas, sigma2s


def _partial_r2_chunk(y_b, xc_b, z_b):
    """Partial R^2 for one chunk of resamples; returns (r2, skipped)."""
    m = y_b.shape[0]
    g = np.einsum("mnk,mnl->mkl", xc_b, xc_b)
    rhs = np.einsum("mnk,mn->mk", xc_b, y_b)
    skipped = np.zeros(m, dtype=bool)
    beta = np.empty_like(rhs)
    try:
        beta = np.linalg.solve(g, rhs[..., None])[..., 0]
    except np.linalg.LinAlgError:
        for i in range(m):
            try:
                beta[i] = np.linalg.solve(g[i], rhs[i])
            except np.linalg.LinAlgError:
                skipped[i] = True
                beta[i] = 0.0
    bad = ~np.isfinite(beta).all(axis=1)
    skipped |= bad
    beta[bad] = 0.0

    resid = y_b - np.einsum("mnk,mk->mn", xc_b, beta)
    e = resid - resid.mean(axis=1, keepdims=True)
    zc = z_b - z_b.mean(axis=1, keepdims=True)
    sxy = np.einsum("mn,mn->m", e, zc)
    sxx = np.einsum("mn,mn->m", e, e)
    szz = np.einsum("mn,mn->m", zc, zc)
    denom = sxx * szz
    r2 = np.zeros(m)
    ok = denom > 0.0
    r2[ok] = (sxy[ok] ** 2) / denom[ok]
    r2[skipped] = np.nan
    return r2, skipped


def bootstrap_partial_r2(y, xc, z, idx, chunk=256):
    """Residualize-and-refit partial R^2 over pre-drawn resamples.

    For each row of ``idx`` (a with-replacement resample of row indices):
    fit y on the control design ``xc`` (intercept column included), then
    take the squared correlation between those residuals and the
    conditioning column ``z``. Resamples whose control design is singular
    are skipped (r2 = NaN, flag set).
    """
    y = np.ascontiguousarray(y, dtype=np.float64)
    xc = np.ascontiguousarray(xc, dtype=np.float64)
    z = np.ascontiguousarray(z, dtype=np.float64)
    b = idx.shape[0]
    r2 = np.empty(b)
    skipped = np.zeros(b, dtype=bool)
    for start in range(0, b, chunk):
        sl = slice(start, min(start + chunk, b))
        rows = idx[sl]
        r2[sl], skipped[sl] = _partial_r2_chunk(y[rows], xc[rows], z[rows])
    return r2, skipped
