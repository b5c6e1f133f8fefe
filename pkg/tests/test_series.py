from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mp, mpf

from zstar.core import Composition, DivergentCompositionError, Enclosure
from zstar.series import (
    TailStrategy,
    delta,
    euler_product_limit,
    lemma_exp_constant,
    limit_append_block,
    limit_append_block_direct,
    mgmg_check,
    mgmg_nested_sum,
    riemann_zeta,
    zeta_real,
    zeta_star,
    zeta_star_direct,
    zeta_star_restricted,
)

from .strategies import compositions


def ref(expr, dps=150):
    with mp.workdps(dps):
        return +expr()


def assert_encloses(e: Enclosure, value, slack=0):
    with mp.workprec(600):
        assert e.lower - slack <= value <= e.upper + slack, (e, value)


class TestRiemannZeta:
    @pytest.mark.parametrize("s", [2, 3, 4, 5, 7, 10, 17])
    def test_against_mpmath(self, s):
        assert_encloses(riemann_zeta(s, 50), ref(lambda: mpmath.zeta(s)))

    def test_closed_forms(self):
        assert_encloses(riemann_zeta(2), ref(lambda: mpmath.pi**2 / 6))
        assert_encloses(riemann_zeta(4), ref(lambda: mpmath.pi**4 / 90))

    def test_frozen_digits(self):
        assert riemann_zeta(2).to_decimal(17) == "1.6449340668482264"
        assert riemann_zeta(4).to_decimal(17) == "1.0823232337111382"

    def test_large_argument(self):
        z = riemann_zeta(40)
        assert z.lower > 1 and z.upper < 1 + mpf(2) ** -38

    @pytest.mark.parametrize("s", [1, 0, -3])
    def test_divergent(self, s):
        with pytest.raises(ValueError):
            riemann_zeta(s)

    def test_real_argument(self):
        assert_encloses(zeta_real(mpf(3) / 2, 40), ref(lambda: mpmath.zeta(1.5)))

    def test_radius_tracks_precision(self):
        assert riemann_zeta(3, 100).radius < mpf(10) ** -100


class TestZetaStar:
    def test_depth_one_is_zeta(self):
        assert zeta_star((2,)).overlaps(riemann_zeta(2))

    def test_empty_is_one(self):
        e = zeta_star(())
        assert e.center == 1 and e.radius == 0

    def test_two_one(self):
        assert_encloses(zeta_star((2, 1)), ref(lambda: 2 * mpmath.zeta(3)))
        assert zeta_star((2, 1)).to_decimal(17) == "2.4041138063191886"

    def test_two_one_one(self):
        assert_encloses(zeta_star((2, 1, 1)), ref(lambda: 3 * mpmath.zeta(4)))

    def test_two_two(self):
        assert_encloses(zeta_star((2, 2)), ref(lambda: 2 * (1 - mpf(2) ** -3) * mpmath.zeta(4)))
        assert zeta_star((2, 2)).to_decimal(11) == "1.8940656590"

    def test_frozen_mixed(self):
        # values produced by this engine and cross-checked with the direct sum
        assert zeta_star((2, 1, 3)).to_decimal(25) == "2.524015404814279135201301"
        assert zeta_star((3, 1, 2)).to_decimal(25) == "1.398846710228617567107462"
        assert zeta_star((4, 2, 1, 1)).to_decimal(25) == "1.125821410542127148169839"

    @pytest.mark.parametrize("comp", [(2, 1, 3), (3, 1, 2), (2, 2, 1), (3, 3)])
    def test_direct_oracle_agrees(self, comp):
        direct, tail = zeta_star_direct(comp, 200_000)
        assert tail.strategy is TailStrategy.HARMONIC_POWER
        assert direct.overlaps(zeta_star(comp))

    def test_divergent(self):
        with pytest.raises(DivergentCompositionError):
            zeta_star((1, 2))

    def test_requested_precision(self):
        assert zeta_star((2, 1, 1, 2), 80).radius < mpf(10) ** -80

    def test_deep_divergence(self):
        # zeta*(2, {1}^n) = (n + 1) zeta(n + 2) grows without bound
        e = zeta_star((2,) + (1,) * 20, 30)
        assert e.lower > 10
        assert_encloses(e, ref(lambda: 21 * mpmath.zeta(22)))

    @given(compositions(max_weight=14, max_depth=6))
    def test_refinement_nests(self, comp):
        coarse, fine = zeta_star(comp, 20), zeta_star(comp, 40)
        assert coarse.lower <= fine.upper and fine.lower <= coarse.upper
        assert fine.radius < coarse.radius


class TestRestricted:
    def test_depth_one(self):
        assert_encloses(zeta_star_restricted((2,)), ref(lambda: mpmath.zeta(2) - 1))

    def test_two_one(self):
        assert_encloses(zeta_star_restricted((2, 1)), ref(lambda: 2 * mpmath.zeta(3) - mpmath.zeta(2)))

    def test_threes_inside_exp_bounds(self):
        r = zeta_star_restricted((3, 3, 3))
        c1 = lemma_exp_constant()
        assert r.lower > mpf(2) ** -9 and r.upper <= c1.lower * mpf(2) ** -9

    def test_direct_restricted(self):
        direct, _ = zeta_star_direct((3, 1), 200_000, base=2)
        assert direct.overlaps(zeta_star_restricted((3, 1)))

    @given(compositions(max_weight=14, max_depth=6))
    def test_subtraction_identity(self, comp):
        lhs = zeta_star(comp) - zeta_star(comp.prefix(comp.depth - 1))
        assert lhs.overlaps(zeta_star_restricted(comp))

    @given(st.lists(st.integers(2, 5), min_size=1, max_size=6))
    def test_exp_sandwich(self, parts):
        w = sum(parts)
        r = zeta_star_restricted(parts, 30)
        c1 = lemma_exp_constant()
        assert r.lower > mpf(2) ** -w
        assert r.upper <= c1.lower * mpf(2) ** -w


class TestDelta:
    def test_two(self):
        assert_encloses(delta((2,)), ref(lambda: 2 * mpmath.zeta(3) - mpmath.zeta(2)))

    def test_routes_agree(self):
        assert delta((2, 2)).overlaps(zeta_star((2, 2, 1)) - zeta_star((2, 2)))

    def test_decreasing_along_twos(self):
        d3, d6 = delta((2,) * 3), delta((2,) * 6)
        assert d6.definitely_less(d3)
        assert d6.lower > 0

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            delta(())


class TestSeparation:
    @given(compositions(max_weight=9, max_depth=4), st.integers(0, 6))
    def test_bumped_ones_increase_below_ceiling(self, comp, n):
        bumped = comp.parts[:-1] + (comp.parts[-1] + 1,)
        a = zeta_star(bumped + (1,) * n)
        b = zeta_star(bumped + (1,) * (n + 1))
        assert a.definitely_less(b)
        assert b.definitely_less(zeta_star(comp))

    @given(compositions(max_weight=9, max_depth=4), st.integers(1, 8))
    def test_appended_part_decreases(self, comp, n):
        a = zeta_star(comp.parts + (n,))
        b = zeta_star(comp.parts + (n + 1,))
        assert b.definitely_less(a)
        assert zeta_star(comp).definitely_less(b)


class TestLimits:
    def test_append_two_to_two(self):
        assert_encloses(limit_append_block((2,), 2), 2)

    def test_append_two_to_three(self):
        e = limit_append_block((3,), 2)
        assert_encloses(e, ref(lambda: 2 * mpmath.zeta(2) - 2))
        assert e.to_decimal(8) == "1.2898681"

    def test_direct_weighted_sum(self):
        assert limit_append_block_direct((3,), 2, 200_000).overlaps(limit_append_block((3,), 2))
        assert limit_append_block_direct((2, 1), 3, 200_000).overlaps(limit_append_block((2, 1), 3))

    def test_append_rejects(self):
        with pytest.raises(ValueError):
            limit_append_block((), 2)
        with pytest.raises(ValueError):
            limit_append_block((2,), 1)

    def test_euler_two(self):
        assert_encloses(euler_product_limit(2), 2)

    def test_euler_three(self):
        # prod (1 - n^-3)^-1 = 3 pi / cosh(pi sqrt(3) / 2)
        e = euler_product_limit(3, 40)
        assert_encloses(e, ref(lambda: 3 * mpmath.pi / mpmath.cosh(mpmath.pi * mpmath.sqrt(3) / 2)))
        assert e.to_decimal(16) == "1.235488267746513"

    def test_euler_ten(self):
        e = euler_product_limit(10)
        assert 1 + mpf(2) ** -10 < e.lower and e.upper < 1 + mpf(2) ** -9

    def test_euler_is_limit_of_twos(self):
        for p in (2, 3, 4):
            far = zeta_star((p,) * 40, 30)
            assert far.lower < euler_product_limit(p, 30).upper


class TestConstant:
    def test_value(self):
        c1 = lemma_exp_constant()
        assert c1.to_decimal(20) == "153.69214790964889206"
        assert c1.lower > 6

    def test_product_agrees_with_direct_product(self):
        # partial product to N plus the integral estimate of the log tail
        n = 10**6
        l = np.arange(3, n + 1, dtype=np.float64)
        log_partial = -np.log1p(-((2 / l) ** 1.5)).sum()
        log_tail = 2**1.5 * 2 / np.sqrt(n + 0.5)
        direct = 2**1.5 * np.exp(log_partial + log_tail)
        assert abs(direct - float(lemma_exp_constant())) < 1e-6 * direct


class TestMgmg:
    def test_trivial_m1(self):
        lhs, rhs = mgmg_check(1, 1, Fraction(1, 3))
        assert rhs.center == 1 and lhs.overlaps(rhs)

    def test_r1_m2_alpha0(self):
        lhs, rhs = mgmg_check(1, 2, 0)
        assert mgmg_nested_sum(1, 2, Fraction(0)) == Fraction(1, 2)
        assert abs(lhs.center - rhs.center) < 1e-12

    def test_r2_m3_half(self):
        lhs, rhs = mgmg_check(2, 3, Fraction(1, 2))
        assert abs(lhs.center - rhs.center) < 1e-10

    @settings(max_examples=25)
    @given(st.integers(1, 3), st.integers(1, 6), st.fractions(0, 1, max_denominator=8))
    def test_agreement(self, r, m, alpha):
        lhs, rhs = mgmg_check(r, m, alpha)
        assert abs(lhs.center - rhs.center) < 1e-10

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            mgmg_check(5, 2, 0)
