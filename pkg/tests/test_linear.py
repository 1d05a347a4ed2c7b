import numpy as np
import pytest

from fgdkit.errors import DegenerateError, DomainError, SampleSizeError, SingularityError
from fgdkit.stats import ModelFrame, anova_f, hc_se, ols_fit, vif
from helpers import line_frame, normal_equation_ols, random_frame


class TestOlsFit:
    def test_exact_line(self):
        fit = ols_fit(line_frame())
        assert fit.term("x").estimate == pytest.approx(2.0, abs=1e-12)
        assert fit.term("Intercept").estimate == pytest.approx(1.0, abs=1e-12)
        assert fit.r2 == pytest.approx(1.0, abs=1e-12)

    def test_matches_normal_equations(self):
        for seed in range(10):
            frame = random_frame(seed, n=30, k=4)
            fit = ols_fit(frame)
            oracle = normal_equation_ols(frame.design(), frame.outcome)
            assert np.allclose(fit.estimates, oracle, atol=1e-10)

    def test_matches_statsmodels(self):
        sm = pytest.importorskip("statsmodels.api")
        frame = random_frame(3, n=60, k=3)
        fit = ols_fit(frame)
        ref = sm.OLS(frame.outcome, frame.design()).fit()
        assert np.allclose(fit.estimates, ref.params, atol=1e-10)
        assert np.allclose([t.se for t in fit.terms], ref.bse, atol=1e-10)
        assert np.allclose([t.p for t in fit.terms], ref.pvalues, atol=1e-10)
        assert fit.r2 == pytest.approx(ref.rsquared, abs=1e-12)

    def test_residuals_orthogonal_to_design(self):
        frame = random_frame(11, n=80, k=5)
        fit = ols_fit(frame)
        x = frame.design()
        scale = np.abs(x.T @ frame.outcome)
        assert np.all(np.abs(x.T @ fit.residuals) <= 1e-8 * np.maximum(scale, 1.0))

    def test_rank_deficient_names_columns(self):
        rng = np.random.default_rng(0)
        a = rng.standard_normal(20)
        frame = ModelFrame.build(
            "y",
            rng.standard_normal(20),
            [("a", a, "raw"), ("double_a", 2.0 * a, "raw")],
            labels=[str(i) for i in range(20)],
        )
        with pytest.raises(SingularityError) as err:
            ols_fit(frame)
        assert "double_a" in str(err.value) or "a" in str(err.value)

    def test_too_few_rows(self):
        frame = ModelFrame.build(
            "y", [1.0, 2.0], [("x", [0.0, 1.0], "raw")], labels=["a", "b"]
        )
        with pytest.raises(SampleSizeError):
            ols_fit(frame)

    def test_constant_outcome_degenerate(self):
        frame = ModelFrame.build(
            "y", [3.0, 3.0, 3.0, 3.0], [("x", [0, 1, 2, 3], "raw")], labels=list("abcd")
        )
        with pytest.raises(DegenerateError):
            ols_fit(frame)


class TestHcSe:
    def test_coefficients_bit_identical(self):
        frame = random_frame(5, n=50, k=3)
        base = ols_fit(frame)
        hc = hc_se(frame, base)
        assert [t.estimate for t in hc.terms] == [t.estimate for t in base.terms]
        assert hc.estimator == "hc"

    def test_homoskedastic_close_to_classical(self):
        # within 15% on well-behaved gaussian data
        frame = random_frame(21, n=200, k=3)
        base = ols_fit(frame)
        hc = hc_se(frame, base)
        for t_hc, t_ols in zip(hc.terms, base.terms):
            assert abs(t_hc.se - t_ols.se) <= 0.15 * t_ols.se

    def test_matches_statsmodels_hc3(self):
        sm = pytest.importorskip("statsmodels.api")
        frame = random_frame(8, n=60, k=4)
        hc = hc_se(frame, ols_fit(frame))
        ref = sm.OLS(frame.outcome, frame.design()).fit(cov_type="HC3")
        assert np.allclose([t.se for t in hc.terms], ref.bse, atol=1e-10)

    @pytest.mark.parametrize("flavor", ["HC0", "HC1", "HC2"])
    def test_other_flavors(self, flavor):
        sm = pytest.importorskip("statsmodels.api")
        frame = random_frame(9, n=60, k=2)
        hc = hc_se(frame, ols_fit(frame), flavor=flavor)
        ref = sm.OLS(frame.outcome, frame.design()).fit(cov_type=flavor)
        assert np.allclose([t.se for t in hc.terms], ref.bse, atol=1e-10)

    def test_unit_leverage_degenerate(self):
        # the dummy row is the only support of its column: leverage 1
        frame = ModelFrame.build(
            "y",
            [1.0, 2.0, 3.0, 4.0, 9.0],
            [("x", [0.1, 0.2, 0.3, 0.4, 0.5], "raw"), ("dummy", [0, 0, 0, 0, 1], "raw")],
            labels=list("abcde"),
        )
        with pytest.raises(DegenerateError):
            hc_se(frame, ols_fit(frame))

    def test_unknown_flavor(self):
        frame = random_frame(1)
        with pytest.raises(DomainError):
            hc_se(frame, ols_fit(frame), flavor="HC9")


def _exact_corr_pair(rho: float, n: int = 200, seed: int = 0):
    """Two columns whose empirical correlation is exactly rho."""
    rng = np.random.default_rng(seed)
    a = rng.standard_normal(n)
    b = rng.standard_normal(n)
    a = (a - a.mean()) / a.std()
    b = b - b.mean()
    b -= a * (a @ b) / (a @ a)  # exactly orthogonal to a
    b /= b.std()
    return a, rho * a + np.sqrt(1 - rho**2) * b


class TestVif:
    def test_orthogonal_columns_unit_vif(self):
        a, b = _exact_corr_pair(0.0)
        frame = ModelFrame.build(
            "y", a + b, [("a", a, "raw"), ("b", b, "raw")], labels=[str(i) for i in range(len(a))]
        )
        factors = vif(frame)
        assert factors["a"] == pytest.approx(1.0, abs=1e-9)
        assert factors["b"] == pytest.approx(1.0, abs=1e-9)

    def test_correlation_09_closed_form(self):
        a, b = _exact_corr_pair(0.9)
        frame = ModelFrame.build(
            "y", a + b, [("a", a, "raw"), ("b", b, "raw")], labels=[str(i) for i in range(len(a))]
        )
        factors = vif(frame)
        expected = 1.0 / (1.0 - 0.81)
        assert factors["a"] == pytest.approx(expected, rel=1e-9)
        assert factors["b"] == pytest.approx(expected, rel=1e-9)

    def test_perfect_collinearity_reported_infinite(self):
        rng = np.random.default_rng(2)
        a = rng.standard_normal(30)
        frame = ModelFrame.build(
            "y",
            rng.standard_normal(30),
            [("a", a, "raw"), ("twice", 2 * a, "raw")],
            labels=[str(i) for i in range(30)],
        )
        factors = vif(frame)
        assert np.isinf(factors["a"]) and np.isinf(factors["twice"])

    def test_needs_two_terms(self):
        with pytest.raises(DomainError):
            vif(line_frame())


class TestAnovaF:
    def test_f_equals_t_squared_for_single_term(self):
        frame = random_frame(13, n=50, k=3)
        fit = ols_fit(frame)
        for name in frame.term_names:
            f_stat, f_p = anova_f(frame, name)
            term = fit.term(name)
            assert f_stat == pytest.approx((term.estimate / term.se) ** 2, rel=1e-9)
            assert f_p == pytest.approx(term.p, rel=1e-9)

    def test_unknown_term(self):
        with pytest.raises(DomainError):
            anova_f(random_frame(1), "nope")
