import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from oracles import series_oracle, series_partial
from semsum import checks
from semsum.model import DomainError
from semsum.numerics import (
    DivergentSeriesError,
    beta_integral,
    epsilon,
    rng_stream,
    robbins_bounds,
    series_bounds,
    series_closed_form,
    series_sum_factorial_ratio,
    series_term,
    simplex_uniform_sample,
    zeta_tail_bounds,
)


class TestSeries:
    @pytest.mark.parametrize("b,c,expected", [(1, 3, 3), (0, 2, 2)])
    def test_telescoping_examples(self, b, c, expected):
        assert series_sum_factorial_ratio(b, c, tol=0).value == expected
        res = series_sum_factorial_ratio(b, c, tol=1e-6)
        assert res.value <= expected <= res.upper

    def test_term(self):
        assert series_term(1, 3, 2) == Fraction(6, 4 * 5)

    @pytest.mark.parametrize("b,c", [(2, 3), (5, 5), (4, 2)])
    def test_divergent(self, b, c):
        with pytest.raises(DivergentSeriesError):
            series_sum_factorial_ratio(b, c)

    def test_negative_tol(self):
        with pytest.raises(DomainError):
            series_sum_factorial_ratio(1, 4, tol=-1)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 60).flatmap(lambda b: st.tuples(st.just(b), st.integers(b + 2, b + 80))))
    def test_closed_form_matches_hypergeometric(self, bc):
        b, c = bc
        assert float(series_closed_form(b, c)) == pytest.approx(float(series_oracle(b, c)), rel=1e-12)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 30).flatmap(lambda b: st.tuples(st.just(b), st.integers(b + 2, b + 30))), st.integers(1, 80))
    def test_partial_sums_below_closed_form(self, bc, K):
        b, c = bc
        partial = series_partial(b, c, K)
        assert partial < series_closed_form(b, c)
        # the certified tail after K terms must cover the gap
        s_last = series_term(b, c, K - 1)
        assert series_closed_form(b, c) - partial <= s_last * (c + K) / (c - b - 1)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 50).flatmap(lambda b: st.tuples(st.just(b), st.integers(b + 2, b + 60))))
    def test_certificate_brackets_truth(self, bc):
        b, c = bc
        res = series_sum_factorial_ratio(b, c, tol=1e-8, max_terms=1 << 16)
        truth = float(series_oracle(b, c))
        assert res.tail_bound >= 0
        assert res.value <= truth * (1 + 1e-12)
        assert truth <= res.upper * (1 + 1e-12)

    def test_slow_convergence_reports_unconverged(self):
        res = series_sum_factorial_ratio(100, 102, tol=1e-12, max_terms=1000)
        assert not res.converged(1e-12)
        assert res.value <= 102 <= res.upper

    def test_sandwich_moderate_grid(self):
        for c in range(3, 81):
            for b in range(1, c - 1):
                lower, upper = series_bounds(b, c)
                exact = float(series_closed_form(b, c))
                assert lower <= exact <= upper


class TestEpsilon:
    def test_values(self):
        def oracle(a):
            a = mpmath.mpf(a)
            return 3 * (1 + mpmath.log(a)) / a + 4 * mpmath.e ** (mpmath.mpf(1) / 12) * 2 ** (-a / 2)

        assert epsilon(4) == pytest.approx(2.8766, abs=1e-4)
        assert epsilon(2) == pytest.approx(4.7136, abs=1e-4)
        for a in (0.5, 1, 7.5, 100):
            assert epsilon(a) == pytest.approx(float(oracle(a)), rel=1e-14)

    @pytest.mark.parametrize("a", [0, -1])
    def test_domain(self, a):
        with pytest.raises(DomainError):
            epsilon(a)

    def test_decreasing(self):
        grid = np.linspace(1, 500, 2000)
        values = [epsilon(a) for a in grid]
        assert all(x > y for x, y in zip(values, values[1:]))
        assert epsilon(1e8) < 1e-6


class TestBeta:
    def test_examples(self):
        assert beta_integral(1, 1, 1) == Fraction(1, 6)
        assert beta_integral(0, 0, Fraction(1, 2)) == Fraction(1, 2)
        assert beta_integral(2, 3, 1) == Fraction(1, 60)

    @pytest.mark.parametrize("c", [1.0, 0.7, 0.25])
    def test_quadrature(self, c):
        for a in range(13):
            for b in range(13):
                quad, _ = integrate.quad(lambda t: (c - t) ** a * t**b, 0, c, epsabs=1e-13, epsrel=1e-13)
                assert abs(quad - beta_integral(a, b, c)) <= 1e-10

    def test_domain(self):
        with pytest.raises(DomainError):
            beta_integral(-1, 0)
        with pytest.raises(DomainError):
            beta_integral(1, 1, 2)


class TestSimplexSampler:
    def test_means(self):
        x = simplex_uniform_sample(4, rng_stream(3), 100_000)
        se = x.std(axis=0, ddof=1) / math.sqrt(len(x))
        assert np.all(np.abs(x.mean(axis=0) - 0.25) <= 4 * se)
        assert np.allclose(x.sum(axis=1), 1)

    def test_two_dim_is_uniform(self):
        x = simplex_uniform_sample(2, rng_stream(9), 20_000)[:, 0]
        stat = stats.kstest(x, "uniform").statistic
        assert stat < 1.63 / math.sqrt(len(x))

    def test_deterministic(self):
        a = simplex_uniform_sample(5, rng_stream(11, 2))
        b = simplex_uniform_sample(5, rng_stream(11, 2))
        assert a.tobytes() == b.tobytes()
        assert not np.array_equal(a, simplex_uniform_sample(5, rng_stream(11, 3)))

    def test_domain(self):
        with pytest.raises(DomainError):
            simplex_uniform_sample(1, rng_stream(0))
        with pytest.raises(DomainError):
            rng_stream(-1)


class TestZetaAndRobbins:
    def test_zeta_examples(self):
        lo, hi = zeta_tail_bounds(1, 2)
        assert (lo, hi) == (0.5, 1.0)
        assert lo <= math.pi**2 / 6 - 1 <= hi
        lo, hi = zeta_tail_bounds(10, 3)
        assert lo == pytest.approx(1 / 242) and hi == pytest.approx(1 / 200)
        assert lo <= checks.zeta_tail(10, 3) <= hi

    @given(st.integers(1, 200), st.floats(1.01, 20))
    def test_zeta_bracket(self, k, t):
        lo, hi = zeta_tail_bounds(k, t)
        assert lo < hi
        assert checks.zeta_tail_bounds_hold(k, t)

    @pytest.mark.parametrize("k,t", [(0, 2), (1, 1)])
    def test_zeta_domain(self, k, t):
        with pytest.raises(DomainError):
            zeta_tail_bounds(k, t)

    def test_robbins_examples(self):
        lo, hi = robbins_bounds(1)
        assert math.exp(lo) == pytest.approx(0.9959, abs=1e-4)
        assert math.exp(hi) == pytest.approx(1.0023, abs=1e-4)
        lo, hi = robbins_bounds(10)
        assert lo <= math.log(3628800) <= hi

    def test_robbins_range(self):
        assert all(checks.robbins_holds(m) for m in range(1, 171))


class TestSupportInequalities:
    @given(st.floats(1e-6, 1e3), st.floats(0, 1, exclude_min=True, exclude_max=True))
    def test_power_exp(self, a, frac):
        b = a * frac
        if 0 < b < a:
            assert checks.support1_holds(a, b)

    @given(st.integers(2, 1000).flatmap(lambda a: st.tuples(st.just(a), st.integers(1, a - 1))), st.integers(1, 1000))
    def test_stirling_tail_ratio(self, ab, j):
        a, b = ab
        assert checks.support2_holds(a, b, j)

    def test_sqrt_ratio_grid(self):
        assert all(checks.super_loose_holds(b, c) for c in range(3, 1001) for b in range(1, c - 1))

    def test_predicates_can_fail(self):
        # the predicates are not vacuous: swapping the roles breaks them
        assert not checks.support2_holds(1, 50, 3)
        with pytest.raises(DomainError):
            checks.super_loose_holds(3, 2)
