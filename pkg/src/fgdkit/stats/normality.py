"""Shapiro-Wilk normality test via the Royston approximation (AS R94)."""

from __future__ import annotations

import numpy as np
from scipy import stats as sps

from ..errors import DegenerateError, DomainError

# polynomial coefficients, descending powers (np.polyval convention)
_C1 = (-2.706056, 4.434685, -2.07119, -0.147981, 0.221157, 0.0)
_C2 = (-3.582633, 5.682633, -1.752461, -0.293762, 0.042981, 0.0)
_C3 = (-0.0006714, 0.025054, -0.39978, 0.544)
_C4 = (-0.0020322, 0.062767, -0.77857, 1.3822)
_C5 = (0.0038915, -0.083751, -0.31082, -1.5861)
_C6 = (0.0030302, -0.082676, -0.4803)
_G = (0.459, -2.273)
_TINY = 1e-19


def _coefficients(n: int) -> np.ndarray:
    """Royston's approximate best linear unbiased coefficients, ascending order."""
    m = sps.norm.ppf((np.arange(1, n + 1) - 0.375) / (n + 0.25))
    ssq = float(m @ m)
    u = 1.0 / np.sqrt(n)
    a = np.empty(n)
    a_n = np.polyval(_C1, u) + m[-1] / np.sqrt(ssq)
    if n > 5:
        a_n1 = np.polyval(_C2, u) + m[-2] / np.sqrt(ssq)
        phi = (ssq - 2.0 * m[-1] ** 2 - 2.0 * m[-2] ** 2) / (1.0 - 2.0 * a_n**2 - 2.0 * a_n1**2)
        a[2:-2] = m[2:-2] / np.sqrt(phi)
        a[-1], a[-2] = a_n, a_n1
        a[0], a[1] = -a_n, -a_n1
    else:
        phi = (ssq - 2.0 * m[-1] ** 2) / (1.0 - 2.0 * a_n**2)
        a[1:-1] = m[1:-1] / np.sqrt(phi)
        a[-1] = a_n
        a[0] = -a_n
    return a


def shapiro_wilk(values) -> tuple[float, float]:
    """W statistic and p-value for the null of normality.

    Valid for 3 <= n <= 5000. The p-value uses the exact arcsine form at
    n = 3, the log-gamma normalization for 4 <= n <= 11 and the lognormal
    normalization above that.
    """
    x = np.asarray(values, dtype=np.float64)
    if x.ndim != 1:
        raise DomainError("shapiro_wilk needs a vector")
    n = x.size
    if n < 3 or n > 5000:
        raise DomainError(f"shapiro_wilk defined for 3 <= n <= 5000, got {n}")
    if not np.isfinite(x).all():
        raise DomainError("shapiro_wilk requires finite values")
    if np.ptp(x) == 0.0:
        raise DegenerateError("constant sample; W undefined")

    xs = np.sort(x)
    if n == 3:
        a = np.array([-np.sqrt(0.5), 0.0, np.sqrt(0.5)])
    else:
        a = _coefficients(n)
    num = float(a @ xs) ** 2
    den = float(np.sum((xs - xs.mean()) ** 2))
    w = min(num / den, 1.0)

    if n == 3:
        p = (6.0 / np.pi) * (np.arcsin(np.sqrt(w)) - np.arcsin(np.sqrt(0.75)))
        return w, float(min(max(p, 0.0), 1.0))

    w1 = max(1.0 - w, _TINY)
    y = np.log(w1)
    if n <= 11:
        gamma = np.polyval(_G, n)
        if y >= gamma:
            return w, _TINY
        z = (-np.log(gamma - y) - np.polyval(_C3, n)) / np.exp(np.polyval(_C4, n))
    else:
        ln_n = np.log(n)
        z = (y - np.polyval(_C5, ln_n)) / np.exp(np.polyval(_C6, ln_n))
    return w, float(sps.norm.sf(z))
