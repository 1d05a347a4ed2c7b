# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels: Gibbs chain and bootstrap partial R^2 resampling loop.

Mirrors fgdkit._kernels.pure. Both consume pre-generated randomness so a
seed produces the same result on either backend up to float reordering.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport NAN, sqrt

cnp.import_array()


cdef int _cholesky(const double* a, double* lo, int k) noexcept nogil:
    """Lower Cholesky factor of row-major a (k x k); 1 if not positive definite."""
    cdef int i, j, m
    cdef double s
    for i in range(k):
        for j in range(i + 1):
            s = a[i * k + j]
            for m in range(j):
                s -= lo[i * k + m] * lo[j * k + m]
            if i == j:
                if s <= 0.0:
                    return 1
                lo[i * k + j] = sqrt(s)
            else:
                lo[i * k + j] = s / lo[j * k + j]
    return 0


cdef void _solve_lower(const double* lo, const double* b, double* out, int k) noexcept nogil:
    cdef int i, m
    cdef double s
    for i in range(k):
        s = b[i]
        for m in range(i):
            s -= lo[i * k + m] * out[m]
        out[i] = s / lo[i * k + i]


cdef void _solve_upper_t(const double* lo, const double* b, double* out, int k) noexcept nogil:
    """Solve lo^T out = b with lo the lower Cholesky factor."""
    cdef int i, m
    cdef double s
    for i in range(k - 1, -1, -1):
        s = b[i]
        for m in range(i + 1, k):
            s -= lo[m * k + i] * out[m]
        out[i] = s / lo[i * k + i]


def gibbs_chain(const double[:, ::1] x, const double[::1] y, double prior_prec, double b0,
                const double[:, ::1] z, const double[::1] gamma_draws):
    cdef int n = x.shape[0]
    cdef int k = x.shape[1]
    cdef int iters = z.shape[0]
    cdef int i, j, t, m
    cdef double s, sigma2, rss, pred, ymean

    xtx_arr = np.empty((k, k))
    xty_arr = np.empty(k)
    a_arr = np.empty((k, k))
    lo_arr = np.empty((k, k))
    w_arr = np.empty(k)
    mu_arr = np.empty(k)
    u_arr = np.empty(k)
    scaled_arr = np.empty(k)
    betas = np.empty((iters, k))
    sigma2s = np.empty(iters)

    cdef double[:, ::1] xtx = xtx_arr
    cdef double[::1] xty = xty_arr
    cdef double[:, ::1] a = a_arr
    cdef double[:, ::1] lo = lo_arr
    cdef double[::1] w = w_arr
    cdef double[::1] mu = mu_arr
    cdef double[::1] u = u_arr
    cdef double[::1] scaled = scaled_arr
    cdef double[:, ::1] betas_v = betas
    cdef double[::1] sigma2s_v = sigma2s
    cdef int fail = 0

    with nogil:
        for i in range(k):
            xty[i] = 0.0
            for j in range(k):
                s = 0.0
                for m in range(n):
                    s += x[m, i] * x[m, j]
                xtx[i, j] = s
            for m in range(n):
                xty[i] += x[m, i] * y[m]

        ymean = 0.0
        for m in range(n):
            ymean += y[m]
        ymean /= n
        sigma2 = 0.0
        for m in range(n):
            sigma2 += (y[m] - ymean) * (y[m] - ymean)
        sigma2 /= n
        if sigma2 == 0.0:
            sigma2 = 1.0

        for t in range(iters):
            for i in range(k):
                for j in range(k):
                    a[i, j] = xtx[i, j] / sigma2
                a[i, i] += prior_prec
                scaled[i] = xty[i] / sigma2
            if _cholesky(&a[0, 0], &lo[0, 0], k):
                fail = 1
                break
            _solve_lower(&lo[0, 0], &scaled[0], &w[0], k)
            _solve_upper_t(&lo[0, 0], &w[0], &mu[0], k)
            _solve_upper_t(&lo[0, 0], &z[t, 0], &u[0], k)
            rss = 0.0
            for m in range(n):
                pred = 0.0
                for i in range(k):
                    pred += x[m, i] * (mu[i] + u[i])
                pred = y[m] - pred
                rss += pred * pred
            sigma2 = (b0 + 0.5 * rss) / gamma_draws[t]
            for i in range(k):
                betas_v[t, i] = mu[i] + u[i]
            sigma2s_v[t] = sigma2

    if fail:
        raise np.linalg.LinAlgError("conditional precision matrix not positive definite")
    return betas, sigma2s


def bootstrap_partial_r2(const double[::1] y, const double[:, ::1] xc, const double[::1] z,
                         const cnp.int64_t[:, ::1] idx):
    cdef int n = y.shape[0]
    cdef int kc = xc.shape[1]
    cdef int b = idx.shape[0]
    cdef int nb = idx.shape[1]
    cdef int t, i, p, q
    cdef cnp.int64_t row
    cdef double s, emean, zmean, e, zi, see, szz, sez, pred

    g_arr = np.empty((kc, kc))
    rhs_arr = np.empty(kc)
    lo_arr = np.empty((kc, kc))
    w_arr = np.empty(kc)
    beta_arr = np.empty(kc)
    r2 = np.empty(b)
    skipped = np.zeros(b, dtype=np.uint8)

    cdef double[:, ::1] g = g_arr
    cdef double[::1] rhs = rhs_arr
    cdef double[:, ::1] lo = lo_arr
    cdef double[::1] w = w_arr
    cdef double[::1] beta = beta_arr
    cdef double[::1] r2_v = r2
    cdef cnp.uint8_t[::1] skip_v = skipped

    with nogil:
        for t in range(b):
            for p in range(kc):
                rhs[p] = 0.0
                for q in range(kc):
                    g[p, q] = 0.0
            for i in range(nb):
                row = idx[t, i]
                for p in range(kc):
                    rhs[p] += xc[row, p] * y[row]
                    for q in range(p + 1):
                        g[p, q] += xc[row, p] * xc[row, q]
            for p in range(kc):
                for q in range(p + 1, kc):
                    g[p, q] = g[q, p]

            if _cholesky(&g[0, 0], &lo[0, 0], kc):
                r2_v[t] = NAN
                skip_v[t] = 1
                continue
            _solve_lower(&lo[0, 0], &rhs[0], &w[0], kc)
            _solve_upper_t(&lo[0, 0], &w[0], &beta[0], kc)

            emean = 0.0
            zmean = 0.0
            for i in range(nb):
                row = idx[t, i]
                pred = 0.0
                for p in range(kc):
                    pred += xc[row, p] * beta[p]
                emean += y[row] - pred
                zmean += z[row]
            emean /= nb
            zmean /= nb

            see = 0.0
            szz = 0.0
            sez = 0.0
            for i in range(nb):
                row = idx[t, i]
                pred = 0.0
                for p in range(kc):
                    pred += xc[row, p] * beta[p]
                e = (y[row] - pred) - emean
                zi = z[row] - zmean
                see += e * e
                szz += zi * zi
                sez += e * zi
            s = see * szz
            if s > 0.0:
                r2_v[t] = (sez * sez) / s
            else:
                r2_v[t] = 0.0

    return r2, skipped.astype(bool)
