import math

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zstar.fractal import (
    alpha,
    covering_sum_beta,
    covering_sum_eta,
    dim_Tp,
    dim_TpDq,
    gamma,
    leb_check,
    leb_lhs,
    leb_rhs,
)
from zstar.series import lemma_exp_constant

with mpmath.workdps(60):
    GOLDEN = (1 + mpmath.sqrt(5)) / 2


def close(enc, value, tol):
    with mpmath.workdps(80):
        return abs(enc.center - mpmath.mpf(value)) < tol


class TestRoots:
    def test_golden_ratio(self):
        r = alpha(2, 30)
        assert close(r.value, GOLDEN, 1e-28)
        assert r.value.contains(GOLDEN)

    def test_alpha_three(self):
        assert abs(float(alpha(3)) - 1.465571231876768026656731) < 1e-15

    @pytest.mark.parametrize(
        "p,q,value",
        [(2, 3, "0.7548776662466927600495089"), (2, 8, "0.62447414055682648929")],
    )
    def test_gamma(self, p, q, value):
        assert close(gamma(p, q, 25).value, value, 1e-19)

    def test_tags(self):
        assert alpha(4).tag == "alpha(4)"
        assert gamma(2, 5).tag == "gamma(2,5)"

    @pytest.mark.parametrize("p", range(2, 12))
    def test_alpha_residual(self, p):
        r = alpha(p, 40)
        assert r.residual < 1e-35
        assert 1 < r.value.center < 2

    @given(st.integers(2, 8), st.integers(1, 6))
    def test_gamma_residual(self, p, extra):
        r = gamma(p, p + extra, 30)
        assert r.residual < 1e-25 and 0 < r.value.center < 1

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            alpha(1)
        with pytest.raises(ValueError):
            gamma(3, 3)


class TestDimensions:
    def test_values(self):
        assert float(dim_Tp(2)) == pytest.approx(0.6942419136306173, abs=1e-15)
        assert float(dim_TpDq(2, 3)) == pytest.approx(0.4056852313758245, abs=1e-15)

    def test_monotone_in_p(self):
        values = [dim_Tp(p) for p in range(2, 11)]
        for a, b in zip(values, values[1:]):
            assert b.definitely_less(a)
        assert dim_Tp(10).definitely_less(dim_Tp(3))

    def test_monotone_in_q(self):
        assert dim_TpDq(2, 3).definitely_less(dim_TpDq(2, 8))
        assert gamma(2, 8).value.definitely_less(gamma(2, 3).value)

    @given(st.integers(2, 6), st.integers(1, 5))
    def test_bounded_by_unrestricted(self, p, extra):
        assert dim_TpDq(p, p + extra).definitely_less(dim_Tp(p))


class TestCoveringSums:
    @settings(max_examples=25)
    @given(st.integers(2, 5), st.integers(1, 4), st.integers(1, 6))
    def test_beta_sum_one_at_dimension(self, p, extra, r):
        q = p + extra
        s = covering_sum_beta(p, q, dim_TpDq(p, q, 40), r, 40)
        assert close(s, 1, 1e-30)

    def test_beta_sum_closed_form(self):
        # t = 1: (1/4 + 1/8)^2
        s = covering_sum_beta(2, 3, 1, 2)
        assert close(s, mpmath.mpf(9) / 64, 1e-25)

    def test_beta_sum_decreasing_in_t(self):
        assert covering_sum_beta(2, 4, 0.8, 3).definitely_less(covering_sum_beta(2, 4, 0.5, 3))

    def test_eta_sum_depth_one(self):
        # r = 1 cells are (zeta(k), zeta(k - 1)) and (zeta(2), zeta*(2, 1))
        s = covering_sum_eta(3, 1, 1, max_weight=60)
        lengths = float(mpmath.zeta(2)) - 1
        assert s.lower <= lengths + 1e-12
        assert s.upper >= lengths - 1e-12

    def test_eta_sum_at_dimension_is_bounded(self):
        t = dim_Tp(2, 20)
        c1 = lemma_exp_constant(20)
        bound = (t * (2 * c1).log()).exp()
        for r in (1, 2, 3):
            s = covering_sum_eta(2, t, r)
            assert s.upper < bound.lower
            assert s.lower > 0

    def test_eta_sum_small_value(self):
        s = covering_sum_eta(3, 1, 2)
        assert 0.1 < s.center < 0.115

    def test_eta_sum_weight_cap(self):
        a = covering_sum_eta(2, 1, 2, max_weight=12)
        b = covering_sum_eta(2, 1, 2, max_weight=24)
        assert a.overlaps(b)
        assert b.radius < a.radius

    def test_eta_sum_rejects(self):
        with pytest.raises(ValueError):
            covering_sum_eta(1, 1, 1)
        with pytest.raises(ValueError):
            covering_sum_eta(2, 1, 2, max_weight=3)


class TestNestedBound:
    @pytest.mark.parametrize("s", [1, 2, 3, 4])
    def test_holds(self, s):
        lhs, rhs = leb_check(s)
        assert lhs.definitely_less(rhs)

    def test_s_one_value(self):
        # sum_{n >= m >= 2} 1/(n(n-1)m) = sum_m 1/(m(m-1)) = 1
        assert abs(leb_lhs(1).center - 1) < 1e-5

    def test_rhs_first_value(self):
        # 3/4 + zeta*(2,1) - zeta(2)
        with mpmath.workdps(60):
            expected = mpmath.mpf(3) / 4 + 2 * mpmath.zeta(3) - mpmath.zeta(2)
        assert close(leb_rhs(1), expected, 1e-25)

    def test_lhs_decreasing(self):
        vals = [leb_lhs(s, 200_000) for s in range(1, 5)]
        for a, b in zip(vals, vals[1:]):
            assert b.definitely_less(a)

    def test_lhs_tail_bound(self):
        coarse, fine = leb_lhs(2, 20_000), leb_lhs(2, 400_000)
        assert coarse.overlaps(fine)
        assert fine.radius < coarse.radius

    def test_rejects(self):
        with pytest.raises(ValueError):
            leb_check(0)


def test_golden_ratio_log_dimension():
    assert float(dim_Tp(2)) == pytest.approx(math.log2((1 + math.sqrt(5)) / 2))
