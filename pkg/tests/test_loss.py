import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_tv_min, distributions, weight_tables
from semsum.loss import (
    CHI_SQUARE,
    GENERATORS,
    INFINITE,
    KL,
    REVERSE_KL,
    TOTAL_VARIATION,
    ConvexGenerator,
    InconsistentSummaryError,
    ReportDistribution,
    UndefinedInterpretationError,
    constructive_inner_distance,
    f_divergence_point,
    grid_inner_distance,
    interpretation,
    semantic_loss,
    semantic_loss_definitional,
    set_loss,
)
from semsum.model import DomainError, SemanticWeights, Summary, consistent_summaries

P4 = ReportDistribution.from_values(2, ["1/10", "1/5", "3/10", "2/5"])
ID2 = SemanticWeights.identification(2)


class TestReportDistribution:
    def test_exact_sum_enforced(self):
        with pytest.raises(DomainError):
            ReportDistribution(1, (Fraction(1, 2), Fraction(1, 3)))

    def test_float_tolerance(self):
        ReportDistribution(1, (0.5, 0.5 + 5e-13), exact=False)
        with pytest.raises(DomainError):
            ReportDistribution(1, (0.5, 0.5 + 1e-9), exact=False)

    def test_from_values_exact(self):
        assert P4[3] == Fraction(2, 5)

    def test_product(self):
        p = ReportDistribution.product(2, ["1/2", "1/4"])
        assert p.probs == (Fraction(3, 8), Fraction(3, 8), Fraction(1, 8), Fraction(1, 8))

    def test_negative_rejected(self):
        with pytest.raises(DomainError):
            ReportDistribution(1, (Fraction(-1), Fraction(2)))


class TestInterpretation:
    def test_uniform(self):
        i = interpretation(ReportDistribution.uniform(2), Summary(1, 1))
        assert i.probs == (0, Fraction(1, 2), 0, Fraction(1, 2))

    def test_skewed(self):
        i = interpretation(P4, Summary(1, 1))
        assert (i[1], i[3]) == (Fraction(1, 3), Fraction(2, 3))

    def test_impossible_summary(self):
        with pytest.raises(UndefinedInterpretationError):
            interpretation(ReportDistribution.point_mass(2, 0), Summary(1, 1))

    @given(distributions(3), st.integers(1, 7), st.integers(0, 7))
    def test_normalized_and_supported(self, probs, events, values):
        y = Summary(events, values & events)
        i = interpretation(ReportDistribution(3, probs), y)
        assert sum(i.probs) == 1
        assert all(i[x] == 0 for x in range(8) if not y.covers(x))


class TestSetLoss:
    def setup_method(self):
        self.i = interpretation(P4, Summary(1, 1))

    def test_cover_and_disjoint(self):
        assert set_loss({1, 3, 0}, self.i) == 0
        assert set_loss({0, 2}, self.i) == 1

    def test_grid_brute_force(self):
        assert set_loss({3}, self.i) == Fraction(1, 3)
        assert brute_tv_min({3}, self.i.probs) == pytest.approx(1 / 3)
        assert brute_tv_min({1, 2}, self.i.probs, steps=60) == pytest.approx(float(set_loss({1, 2}, self.i)), abs=1 / 60)

    @given(distributions(2), st.integers(1, 3), st.integers(0, 3), st.sets(st.integers(0, 3), min_size=1), st.integers(0, 3))
    def test_monotone_in_W(self, probs, events, values, W, extra):
        i = interpretation(ReportDistribution(2, probs), Summary(events, values & events))
        assert set_loss(W | {extra}, i) <= set_loss(W, i)

    @settings(max_examples=40, deadline=None)
    @given(distributions(2), st.integers(1, 3), st.integers(0, 3), st.sets(st.integers(0, 3), min_size=1, max_size=3))
    def test_inner_distance_forms_agree(self, probs, events, values, W):
        i = interpretation(ReportDistribution(2, probs), Summary(events, values & events))
        exact = set_loss(W, i)
        assert constructive_inner_distance(W, i) == exact
        grid = grid_inner_distance(W, i, 40)
        assert -1e-12 <= grid - float(exact) <= 2 * 4 / 40
        # the min-plus recursion reproduces an explicit listing of the grid
        assert grid == pytest.approx(brute_tv_min(W, i.probs, steps=40), abs=1e-12)

    def test_grid_resolution_floor(self):
        with pytest.raises(DomainError):
            grid_inner_distance({1}, self.i, 5)


class TestSemanticLoss:
    def test_known_value(self):
        # per-report argmax of i_y(x), worked by hand
        policy = {0: Summary(2, 0), 1: Summary(2, 0), 2: Summary(1, 0), 3: Summary(1, 1)}
        assert semantic_loss(P4, policy, ID2) == Fraction(41, 120)

    def test_full_summaries_lose_nothing(self):
        u = SemanticWeights.per_event(2, [3, 5]) + ID2
        assert semantic_loss(P4, lambda x: Summary(3, x), u) == 0

    def test_empty_weights(self):
        assert semantic_loss(P4, lambda x: Summary(1, x & 1), SemanticWeights.empty(2)) == 0
        assert semantic_loss_definitional(P4, lambda x: Summary(1, x & 1), SemanticWeights.empty(2)) == 0

    def test_inconsistent_policy(self):
        with pytest.raises(InconsistentSummaryError):
            semantic_loss(P4, lambda x: Summary(1, 1), ID2)

    def test_inconsistent_policy_on_null_report_ignored(self):
        p = ReportDistribution(1, (Fraction(0), Fraction(1)))
        assert semantic_loss(p, lambda x: Summary(1, 1), SemanticWeights.identification(1)) == 0

    @settings(max_examples=30, deadline=None)
    @given(st.data())
    def test_closed_vs_definitional(self, data):
        v = data.draw(st.integers(1, 3))
        j = data.draw(st.integers(1, v))
        p = ReportDistribution(v, data.draw(distributions(v)))
        u = SemanticWeights(v, data.draw(weight_tables(v)))
        policy = {x: data.draw(st.sampled_from(consistent_summaries(x, j, v))) for x in range(1 << v)}
        closed = semantic_loss(p, policy, u)
        assert semantic_loss_definitional(p, policy, u, method="constructive") == closed
        grid = semantic_loss_definitional(p, policy, u, 200)
        assert abs(grid - float(closed)) <= 2 * (1 << v) / 200

    @settings(max_examples=30, deadline=None)
    @given(st.data())
    def test_linear_in_weights(self, data):
        v = data.draw(st.integers(1, 3))
        p = ReportDistribution(v, data.draw(distributions(v)))
        u1 = SemanticWeights(v, data.draw(weight_tables(v)))
        u2 = SemanticWeights(v, data.draw(weight_tables(v)))
        j = data.draw(st.integers(1, v))
        policy = {x: consistent_summaries(x, j, v)[-1] for x in range(1 << v)}
        assert semantic_loss(p, policy, u1 + u2) == semantic_loss(p, policy, u1) + semantic_loss(p, policy, u2)


class TestFDivergence:
    def setup_method(self):
        self.i = interpretation(P4, Summary(1, 1))

    def test_total_variation_is_set_loss(self):
        for x in (1, 3):
            assert f_divergence_point(TOTAL_VARIATION, x, self.i) == set_loss({x}, self.i)

    def test_kl_is_neg_log(self):
        assert f_divergence_point(KL, 3, self.i) == pytest.approx(-math.log(2 / 3))

    def test_identity_case(self):
        i = interpretation(P4, Summary(3, 2))
        for g in GENERATORS.values():
            assert f_divergence_point(g, 2, i) == 0

    def test_zero_mass_limits(self):
        # x outside X(y): i(x) = 0
        assert f_divergence_point(TOTAL_VARIATION, 0, self.i) == 1
        assert f_divergence_point(KL, 0, self.i) is INFINITE
        assert f_divergence_point(REVERSE_KL, 0, self.i) is INFINITE
        assert f_divergence_point(CHI_SQUARE, 0, self.i) is INFINITE

    def test_reverse_kl_diverges_unless_certain(self):
        assert f_divergence_point(REVERSE_KL, 3, self.i) is INFINITE

    def test_infinite_ordering(self):
        assert 5.0 <= INFINITE and not INFINITE <= 5.0 and INFINITE <= INFINITE
        assert float(INFINITE) == math.inf

    def test_non_convex_rejected(self):
        with pytest.raises(DomainError):
            ConvexGenerator("concave", lambda t: -(t - 1) ** 2, 0.0, 0.0)

    @settings(max_examples=60, deadline=None)
    @given(st.data())
    def test_monotone_in_interpretation_mass(self, data):
        v = data.draw(st.integers(1, 3))
        p = ReportDistribution(v, data.draw(distributions(v)))
        x = data.draw(st.integers(0, (1 << v) - 1))
        y1 = data.draw(st.sampled_from(consistent_summaries(x, data.draw(st.integers(1, v)), v)))
        y2 = data.draw(st.sampled_from(consistent_summaries(x, data.draw(st.integers(1, v)), v)))
        i1, i2 = interpretation(p, y1), interpretation(p, y2)
        if i1[x] < i2[x]:
            i1, i2 = i2, i1
        for g in GENERATORS.values():
            d1, d2 = f_divergence_point(g, x, i1), f_divergence_point(g, x, i2)
            assert d1 <= d2 or abs(float(d1) - float(d2)) <= 1e-12
