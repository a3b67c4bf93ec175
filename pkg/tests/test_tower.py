import random
from fractions import Fraction
from math import comb

import pytest

from hahnval.errors import CertificateRejected, IndeterminateError, PreconditionError
from hahnval.sampling import random_series
from hahnval.series import Series
from hahnval.tower import (
    INF,
    TowerConfig,
    direct_projection,
    lift_root_through_stages,
    make_tower,
    non_henselian_certificate,
    psi_project,
    recheck_non_henselian,
    residue_step,
    smooth_numbers,
    tower_valuation,
    value_group_report,
)

CFG = TowerConfig(depth=4)
H = CFG.shape


def u(i, c=1):
    return H.unit(i, c)


def t(g, c=1):
    return Series.monomial(g, c)


def const(c):
    return Series.const(H, c)


class TestConfig:
    def test_shape_window(self):
        assert (H.lo, H.hi) == (-7, 0)

    def test_blocks_most_significant_last(self):
        assert CFG.block(1) == (-1, 0)
        assert CFG.block(4) == (-7, -6)

    def test_bad_depth(self):
        with pytest.raises(PreconditionError):
            TowerConfig(depth=0)


class TestProjection:
    def test_residue_drops_block(self):
        for i in range(1, 5):
            g = u(-2 * i + 1) + u(-2 * i + 2, -5)
            assert residue_step(3 + t(g), i) == const(3)

    def test_negative_stage_valuation_is_inf(self):
        assert residue_step(t(-u(-7)), 4) is INF

    def test_identity(self):
        x = 3 + t(u(-1)) + t(-u(-7))
        assert psi_project(x, 4, 4) == x

    def test_inf_propagates(self):
        assert psi_project(INF, 3, 0) is INF

    def test_keeps_lower_stage_terms(self):
        x = 2 + t(u(-1)) + t(u(-7))
        assert residue_step(x, 4) == 2 + t(u(-1))

    def test_indeterminate(self):
        x = Series(H, {}, -u(-7))
        with pytest.raises(IndeterminateError):
            residue_step(x, 4)

    def test_direct_matches_composition(self):
        rng = random.Random(7)
        for _ in range(200):
            x = random_series(H, rng)
            for j in range(5):
                assert psi_project(x, 4, j) == direct_projection(x, 4, j)


class TestMakeTower:
    def test_constant(self):
        tw = make_tower(const(5), CFG)
        assert all(c == const(5) for c in tw.coords)

    def test_positive_top_monomial(self):
        x = t(u(-7))
        tw = make_tower(x, CFG)
        assert tw[4] == x
        assert all(tw[m].is_exact_zero() for m in range(4))

    def test_negative_bottom_stage(self):
        x = t(-u(-1))
        tw = make_tower(x, CFG)
        assert tw[0] is INF
        assert all(tw[m] == x for m in range(1, 5))

    def test_compatible(self):
        rng = random.Random(3)
        for _ in range(100):
            assert make_tower(random_series(H, rng), CFG).compatible()

    def test_wrong_shape(self):
        with pytest.raises(PreconditionError):
            make_tower(Series.const(TowerConfig(depth=2).shape, 1), CFG)


class TestValuation:
    def test_top_block_monomial(self):
        g = u(-7, 2) + u(-6)
        tw = make_tower(t(g), CFG)
        assert tower_valuation(tw, 0).value == g
        v = tower_valuation(tw, 4)
        assert v.boundary and v.value == H.zero()

    def test_unit(self):
        tw = make_tower(const(5), CFG)
        for n in range(5):
            v = tower_valuation(tw, n)
            assert v.value == H.zero() and v.in_ring and not v.in_ideal

    def test_projection_keeps_low_indices(self):
        g = u(-5) + u(-1, -3)
        v = tower_valuation(make_tower(t(g), CFG), 2)
        assert v.value == u(-5)
        assert v.in_ideal

    def test_ideal_chain(self):
        rng = random.Random(11)
        for _ in range(200):
            tw = make_tower(random_series(H, rng), CFG)
            flags = [tower_valuation(tw, n).in_ideal for n in range(5)]
            for n in range(4):
                assert not flags[n + 1] or flags[n]

    def test_homomorphism(self):
        rng = random.Random(5)
        for _ in range(100):
            x, y = random_series(H, rng), random_series(H, rng)
            if x.is_exact_zero() or y.is_exact_zero():
                continue
            vx = tower_valuation(make_tower(x, CFG), 0).value
            vy = tower_valuation(make_tower(y, CFG), 0).value
            assert tower_valuation(make_tower(x * y, CFG), 0).value == vx + vy


def catalan_root(a, terms):
    """``-1 + sum C(k-1) a^k``, the root of ``T^2 + T + a`` near ``-1``."""
    y = const(-1)
    p = const(1)
    for k in range(1, terms + 1):
        p = p * a
        y = y + p.scale(Fraction(comb(2 * k - 2, k - 1), k))
    return y


class TestRootLift:
    def test_quadratic(self):
        g1 = u(-3)
        a = make_tower(t(g1), CFG)
        root, cert = lift_root_through_stages([a], 1, CFG)
        assert cert.ok, cert.failures
        assert root[0] == const(-1) and root[1] == const(-1)
        T = g1 * 5
        assert root[2].agrees_with(catalan_root(t(g1), 4), T)
        assert root[4].agrees_with(catalan_root(t(g1), 4), T)

    def test_zero_coefficients_exact(self):
        z = make_tower(Series.zero(H), CFG)
        root, cert = lift_root_through_stages([z, z], 2, CFG)
        assert cert.ok
        assert all(c == const(-1) for c in root.coords)

    def test_cubic_residuals(self):
        a0 = make_tower(t(u(-5)) + t(u(-7, 2)), CFG)
        a1 = make_tower(t(u(-6), 3), CFG)
        root, cert = lift_root_through_stages([a0, a1], 2, CFG)
        assert cert.ok, cert.failures
        for st in cert.payload["stages"][3:]:
            assert st["residual"] is None or st["residual"] >= st["cutoff"]
        assert root.compatible()

    def test_coefficient_outside_ideal(self):
        a = make_tower(t(u(-1)), CFG)
        with pytest.raises(PreconditionError):
            lift_root_through_stages([a], 1, CFG)


class TestNonHenselian:
    def test_certificate(self):
        cert = non_henselian_certificate(1, 3, 5)
        assert cert.ok, cert.failures
        assert cert.payload["residue_derivative_at_root"] in ("1", "-1")
        assert recheck_non_henselian(cert)

    def test_every_stage(self):
        for m in range(1, 5):
            assert non_henselian_certificate(m, 2, 3).ok

    def test_not_prime(self):
        with pytest.raises(CertificateRejected) as ei:
            non_henselian_certificate(1, 3, 4)
        assert ei.value.reason == "q-not-prime"

    def test_q_not_above_p(self):
        with pytest.raises(CertificateRejected) as ei:
            non_henselian_certificate(1, 5, 5)
        assert ei.value.reason == "q-not-above-p"

    def test_smooth_numbers(self):
        assert smooth_numbers(3, 20) == [1, 2, 3, 4, 6, 8, 9, 12, 16, 18]


class TestValueGroup:
    @pytest.mark.parametrize("n", [0, 1, 2, 3, 4])
    def test_report(self, n):
        rep = value_group_report(CFG, n, samples=30, seed=n)
        assert rep.ok, rep.failures
        assert rep.payload["boundary"] == (n == 4)

    def test_index_zero_unit(self):
        tw = make_tower(t(u(0, 3)), CFG)
        assert tw[1] is not INF
        assert tower_valuation(tw, 1).value == H.zero()

    def test_boundary_value(self):
        v = tower_valuation(make_tower(t(u(-7)), CFG), 4)
        assert v.value == H.zero() and v.boundary
