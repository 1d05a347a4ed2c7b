import numpy as np
import pytest
from scipy import stats as sps

from fgdkit.errors import DegenerateError, DomainError
from fgdkit.stats import shapiro_wilk


class TestAgainstScipy:
    """scipy.stats.shapiro implements the same published approximation."""

    @pytest.mark.parametrize("n", [3, 4, 5, 6, 11, 12, 25, 50, 100, 500, 2000])
    def test_w_and_p_match(self, n):
        rng = np.random.default_rng(n)
        x = rng.standard_normal(n)
        w_ours, p_ours = shapiro_wilk(x)
        w_ref, p_ref = sps.shapiro(x)
        assert w_ours == pytest.approx(w_ref, abs=1e-6)
        assert p_ours == pytest.approx(p_ref, abs=1e-5)

    @pytest.mark.parametrize("dist", ["exponential", "uniform", "lognormal"])
    def test_non_normal_samples_match_too(self, dist):
        rng = np.random.default_rng(42)
        x = getattr(rng, dist)(size=80)
        w_ours, p_ours = shapiro_wilk(x)
        w_ref, p_ref = sps.shapiro(x)
        assert w_ours == pytest.approx(w_ref, abs=1e-6)
        assert p_ours == pytest.approx(p_ref, abs=1e-5)


class TestDiscrimination:
    def test_normal_samples_rarely_rejected(self):
        hits = 0
        for seed in range(100):
            x = np.random.default_rng(seed).standard_normal(100)
            _, p = shapiro_wilk(x)
            hits += p > 0.05
        assert hits >= 90

    def test_exponential_samples_usually_rejected(self):
        hits = 0
        for seed in range(100):
            x = np.random.default_rng(seed).exponential(size=100)
            _, p = shapiro_wilk(x)
            hits += p < 0.05
        assert hits >= 90


class TestDomain:
    def test_constant_sample(self):
        with pytest.raises(DegenerateError):
            shapiro_wilk([2.0, 2.0, 2.0, 2.0])

    @pytest.mark.parametrize("n", [2, 5001])
    def test_size_bounds(self, n):
        with pytest.raises(DomainError):
            shapiro_wilk(np.arange(n, dtype=float))

    def test_non_finite(self):
        with pytest.raises(DomainError):
            shapiro_wilk([1.0, 2.0, np.nan, 4.0])

    def test_near_perfect_sample_w_close_to_one(self):
        x = sps.norm.ppf((np.arange(1, 201) - 0.5) / 200)
        w, p = shapiro_wilk(x)
        assert w > 0.99
        assert p > 0.5
