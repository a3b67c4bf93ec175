
import pytest

from hahnval.errors import CertificateRejected, PrecisionError, PreconditionError
from hahnval.groups import G_EX, lex_pair
from hahnval.hensel import (
    Polynomial,
    eisenstein_check,
    hensel_lift,
    newton_family,
    rat_derivative,
    rat_eval,
    residue_poly,
    simple_root_check,
)
from hahnval.series import Series
from hahnval.tower import eisenstein_family

L = lex_pair("int", "int")
BH, BL = L.unit(0), L.unit(1)


def t(g, c=1):
    return Series.monomial(g, c)


c = t(G_EX.unit(1))
F = newton_family(G_EX, 2, c)  # T^2 - T - c


class TestResiduePolynomial:
    def test_ideal_coefficient_vanishes(self):
        assert residue_poly(F) == [0, -1, 1]

    def test_eisenstein_family(self):
        _, g = eisenstein_family(L, 5, BH, BL)
        assert residue_poly(g) == [0, 0, 0, 0, 1, 1]

    def test_constant_coefficients(self):
        f = Polynomial.from_rationals(G_EX, [5, 2, 0, 1])
        assert residue_poly(f) == [5, 2, 0, 1]

    def test_negative_valuation_coefficient(self):
        from hahnval.errors import NotInValuationRing
        with pytest.raises(NotInValuationRing):
            residue_poly(Polynomial([t(-G_EX.unit(0)), Series.const(G_EX, 1)]))


class TestSimpleRoot:
    def test_quadratic(self):
        assert simple_root_check([0, -1, 1], 1)

    def test_eisenstein_residue(self):
        fbar = [0, 0, 0, 0, 1, 1]
        assert simple_root_check(fbar, -1)
        # q T^(q-1) + (q-1) T^(q-2) at -1 for q = 5
        assert rat_eval(rat_derivative(fbar), -1) == 1

    def test_double_root(self):
        assert not simple_root_check([0, 0, 1], 0)

    def test_not_a_root(self):
        assert not simple_root_check([0, -1, 1], 2)


class TestLift:
    def test_one_branch_matches_substitution(self):
        T = G_EX.unit(1, 3)
        lift = hensel_lift(F, 1, T)
        expected = 1 + c - c * c
        assert lift.root.agrees_with(expected, T)
        # exact substitution: (1 + c - c^2)^2 - (1 + c - c^2) - c = -2c^3 + c^4
        assert F.eval(expected) == c ** 4 - (c ** 3).scale(2)
        assert lift.residual >= T and lift.root.residue() == 1

    def test_zero_branch(self):
        T = G_EX.unit(1, 3)
        lift = hensel_lift(F, 0, T)
        assert lift.root.agrees_with(c * c - c, T) and lift.root.residue() == 0

    def test_exact_root(self):
        f = Polynomial.from_rationals(G_EX, [0, -1, 1])
        lift = hensel_lift(f, 1, G_EX.unit(0))
        assert lift.exact and lift.root == Series.const(G_EX, 1)

    def test_doubling_on_family(self):
        a = t(G_EX.distinguished()) + t(G_EX.unit(3), -2)
        for n in (2, 3, 5):
            f = newton_family(G_EX, n, a)
            T = a.valuation() * 9
            lift = hensel_lift(f, 1, T)
            assert lift.doubling_holds() and len(lift.history) >= 3
            assert f.eval(lift.root, T).known_at_least(T)

    def test_uniqueness(self):
        T = G_EX.unit(1, 6)
        y1 = hensel_lift(F, 1, T).root
        y2 = hensel_lift(F, 1, T, start=(1 + c).truncate(T)).root
        assert y1.agrees_with(y2, T)

    def test_start_with_wrong_residue(self):
        with pytest.raises(PreconditionError):
            hensel_lift(F, 1, G_EX.unit(1, 3), start=Series.const(G_EX, 2))

    def test_non_simple_root(self):
        with pytest.raises(PreconditionError):
            hensel_lift(newton_family(G_EX, 3, c), 0, G_EX.unit(1, 3))

    def test_coefficient_precision(self):
        f = newton_family(G_EX, 2, Series(G_EX, {G_EX.unit(1): 1}, G_EX.unit(1, 2)))
        with pytest.raises(PrecisionError):
            hensel_lift(f, 1, G_EX.unit(1, 3))

    def test_unreachable_target(self):
        # residual valuation 1_2 never doubles past 1_1
        f = newton_family(G_EX, 2, t(G_EX.unit(2)))
        with pytest.raises(PrecisionError):
            hensel_lift(f, 1, G_EX.unit(1))

    def test_nonpositive_target(self):
        with pytest.raises(PreconditionError):
            hensel_lift(F, 1, G_EX.zero())


class TestEisenstein:
    def test_degree_five(self):
        a, g = eisenstein_family(L, 5, BH, BL)
        cert = eisenstein_check(g, a)
        assert all(cert.divides) and not cert.square_divides_constant and cert.oracle_agrees
        assert cert.recheck()

    def test_square_divides_constant(self):
        a, g = eisenstein_family(L, 5, BH, BL)
        coeffs = list(g.coeffs)
        coeffs[0] = a * a * t(BH)
        with pytest.raises(CertificateRejected) as ei:
            eisenstein_check(Polynomial(coeffs), a)
        assert ei.value.reason == "square-divides-constant"

    def test_dependent_prime(self):
        _, g = eisenstein_family(L, 5, BH, BL)
        bad = t(BH) + t(BH * 2) + 1
        with pytest.raises(CertificateRejected) as ei:
            eisenstein_check(g, bad)
        assert ei.value.reason == "dependent-support"

    def test_coefficient_not_divisible(self):
        a, g = eisenstein_family(L, 3, BH, BL)
        coeffs = list(g.coeffs)
        coeffs[1] = t(BH)
        with pytest.raises(CertificateRejected) as ei:
            eisenstein_check(Polynomial(coeffs), a)
        assert ei.value.reason == "coefficient-not-divisible"

    def test_not_monic(self):
        a, g = eisenstein_family(L, 3, BH, BL)
        coeffs = list(g.coeffs)
        coeffs[-1] = Series.const(L, 2)
        with pytest.raises(CertificateRejected):
            eisenstein_check(Polynomial(coeffs), a)
