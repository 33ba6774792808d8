import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from rmtlab import (
    Case,
    PreconditionError,
    bonferroni_lower_bound,
    bound_report,
    calibrate_pareto,
    calibrate_truncated_pareto,
    case_split,
    chain_lower_bound,
    exact_tail,
    gaussian_spec,
    proposition_lower_bound,
    rademacher_spec,
    remark2_threshold,
    silverstein_limit,
    silverstein_tail_check,
)
from rmtlab.distributions import TailCondition


def union_by_enumeration(n, q):
    """P(at least one of n independent events), summing over all 2^n outcomes exactly."""
    q = Fraction(q)
    total = Fraction(0)
    for outcome in itertools.product((0, 1), repeat=n):
        k = sum(outcome)
        if k:
            total += q**k * (1 - q) ** (n - k)
    return total


class TestProposition:
    def test_saturates_at_half(self):
        assert proposition_lower_bound(8, 100, 1, TailCondition(2, 0.25)) == 0.5

    def test_alpha4(self):
        assert proposition_lower_bound(100, 100, 1, TailCondition(4, 0.25)) == pytest.approx(0.0625, rel=1e-15)

    def test_decays_in_K(self):
        tail = TailCondition(3, 0.2)
        values = [proposition_lower_bound(50, 100, K, tail) for K in np.geomspace(1, 1e8, 50)]
        assert all(b <= a for a, b in zip(values, values[1:]))
        assert values[-1] < 1e-10

    def test_K_below_one(self):
        with pytest.raises(PreconditionError, match="K must be >= 1"):
            proposition_lower_bound(1, 1, 0.5, TailCondition(3, 0.2))

    def test_p_greater_than_n(self):
        with pytest.raises(PreconditionError):
            proposition_lower_bound(5, 4, 1, TailCondition(3, 0.2))


class TestBonferroni:
    def test_single_event_exact(self):
        for q in (0.0, 0.3, 1.0):
            assert bonferroni_lower_bound(1, q) == q

    def test_two_events(self):
        assert bonferroni_lower_bound(2, 0.1) == pytest.approx(0.19, rel=1e-14)
        assert float(union_by_enumeration(2, Fraction(1, 10))) == pytest.approx(0.19, rel=1e-15)

    def test_clamped(self):
        assert bonferroni_lower_bound(100, 0.5) == 0.0

    @pytest.mark.parametrize("n", [1, 2, 3, 5, 8, 12])
    def test_below_enumerated_union(self, n):
        for q in np.linspace(0, 1, 41):
            exact = union_by_enumeration(n, Fraction(float(q)))
            assert bonferroni_lower_bound(n, float(q)) <= float(exact) + 1e-15

    def test_below_closed_form_union_to_64(self):
        for n in range(1, 65):
            for q in np.linspace(0, 1, 201):
                assert bonferroni_lower_bound(n, q) <= 1 - (1 - q) ** n + 1e-15


class TestChain:
    def test_one_row(self):
        for n, q in ((10, 0.01), (3, 0.2), (100, 0.5)):
            assert chain_lower_bound(1, n, q) == pytest.approx(min(n * q / 2, 1), rel=1e-15)

    def test_zero(self):
        assert chain_lower_bound(7, 10, 0.0) == 0.0

    def test_value(self):
        assert chain_lower_bound(10, 20, 0.01) == pytest.approx(1 - 0.9**10, rel=1e-14)
        assert chain_lower_bound(10, 20, 0.01) == pytest.approx(0.6513, abs=1e-4)

    def test_bad_q(self):
        with pytest.raises(PreconditionError):
            chain_lower_bound(1, 1, 1.5)


class TestCaseSplit:
    def test_zero(self):
        assert case_split(10, 10, 0.0) is Case.CASE1

    def test_boundary_goes_to_case2(self):
        assert 0.5 * 4 * 0.125 == 1 / 4
        assert case_split(4, 4, 0.125) is Case.CASE2

    def test_value(self):
        assert case_split(100, 100, 0.001) is Case.CASE2
        assert case_split(100, 100, 0.0001) is Case.CASE1


class TestRemark2:
    def test_alpha2(self):
        for n in (1, 10, 10**6):
            assert remark2_threshold(n, 1, TailCondition(2, 0.25)) == 8

    def test_c0_one(self):
        assert remark2_threshold(50, 1, TailCondition(2, 1.0)) == 2

    def test_grows_like_K_three_halves(self):
        tail = TailCondition(3, 0.2)
        p1, p2 = remark2_threshold(100, 1e4, tail), remark2_threshold(100, 4e4, tail)
        assert p2 / p1 == pytest.approx(8.0, rel=1e-6)

    @pytest.mark.parametrize("alpha", [2.5, 3.0, 3.5])
    def test_agrees_with_case_split(self, alpha):
        spec = calibrate_pareto(alpha)
        for n in (10, 100, 1000):
            for K in (1, 2, 4, 10):
                p0 = remark2_threshold(n, K, spec.tail)
                raw = (2 / spec.c0) * K ** (alpha / 2) * n ** (alpha / 2 - 1)
                assert abs(p0 - math.ceil(raw)) <= 1
                q = exact_tail(spec, math.sqrt(n * K))
                for p in range(p0, p0 + 5):
                    assert case_split(p, n, q) is Case.CASE2
                if p0 > 1:
                    assert case_split(p0 - 1, n, q) is Case.CASE1

    def test_truncated_alpha2_agrees(self):
        spec = calibrate_truncated_pareto(2, 1e6)
        for n in (10, 1000):
            p0 = remark2_threshold(n, 1, spec.tail)
            q = exact_tail(spec, math.sqrt(n))
            assert case_split(p0, n, q) is Case.CASE2
            assert case_split(p0 - 1, n, q) is Case.CASE1


class TestSilverstein:
    def test_limit_square(self):
        assert silverstein_limit(1.0, 1.0) == 4.0

    def test_limit_degenerate(self):
        assert silverstein_limit(0.0, 1.0) == 1.0

    def test_limit_quarter(self):
        assert silverstein_limit(0.25, 1.0) == 2.25

    def test_negative_beta(self):
        with pytest.raises(PreconditionError):
            silverstein_limit(-0.1)

    def test_tail_check_bounded(self):
        assert silverstein_tail_check(rademacher_spec(), 2) == 0.0

    def test_tail_check_alpha4(self):
        assert silverstein_tail_check(calibrate_pareto(4), 10) == pytest.approx(0.25, rel=1e-12)

    def test_tail_check_alpha3_grows_linearly(self):
        spec = calibrate_pareto(3)
        for n in (10, 100, 1000):
            assert silverstein_tail_check(spec, n) == pytest.approx(spec.c0 * n, rel=1e-12)

    def test_tail_check_gaussian_vanishes(self):
        assert silverstein_tail_check(gaussian_spec(), 20) < 1e-80


class TestReport:
    def test_fields_and_values(self):
        report = bound_report(100, 100, 1.0, calibrate_pareto(4))
        d = report.to_dict()
        assert list(d) == ["p", "n", "K", "q", "proposition_bound", "bonferroni_bound",
                           "chain_bound", "case_label", "silverstein_limit"]
        assert d["proposition_bound"] == pytest.approx(0.0625)
        assert d["q"] == pytest.approx(0.25 * 100**-2)
        assert d["case_label"] == "case1"
        assert d["silverstein_limit"] == pytest.approx(4.0)

    def test_light_tail_has_no_proposition_bound(self):
        assert bound_report(3, 5, 2.0, rademacher_spec()).proposition_bound is None

    def test_c0_override(self):
        report = bound_report(100, 100, 1.0, calibrate_pareto(4), TailCondition(4, 0.125))
        assert report.proposition_bound == pytest.approx(0.03125)


dims = st.integers(1, 400).flatmap(lambda n: st.tuples(st.integers(1, n), st.just(n)))


@settings(max_examples=300, deadline=None)
@given(alpha=st.floats(2.01, 10.0), pn=dims, K=st.floats(1.0, 1e4))
def test_proof_chain_ordering(alpha, pn, K):
    p, n = pn
    spec = calibrate_pareto(alpha)
    report = bound_report(p, n, K, spec)
    for value in (report.q, report.proposition_bound, report.bonferroni_bound, report.chain_bound):
        assert 0.0 <= value <= 1.0
    assert report.proposition_bound <= 0.5
    assert report.proposition_bound <= report.chain_bound * (1 + 1e-12)
    assert report.bonferroni_bound <= -math.expm1(n * math.log1p(-report.q)) * (1 + 1e-12) + 1e-300
    if report.case_label is Case.CASE2:
        assert report.chain_bound >= 0.5


@settings(max_examples=200, deadline=None)
@given(alpha=st.floats(2.0, 8.0), c0=st.floats(0.01, 1.0), pn=dims,
       K=st.floats(1.0, 100.0), factor=st.floats(1.0, 10.0))
def test_proposition_monotonicity(alpha, c0, pn, K, factor):
    p, n = pn
    tail = TailCondition(alpha, c0)
    base = proposition_lower_bound(p, n, K, tail)
    assert proposition_lower_bound(p, n, K * factor, tail) <= base
    assert proposition_lower_bound(p, n + 7, K, tail) <= base * (1 + 1e-15)
    if p + 1 <= n:
        assert proposition_lower_bound(p + 1, n, K, tail) >= base
    assume(c0 * factor <= 1.0)
    assert proposition_lower_bound(p, n, K, TailCondition(alpha, c0 * factor)) >= base
