from fractions import Fraction

import pytest

from hahnval.errors import CertificateRejected, PrecisionError
from hahnval.groups import G_EX, hahn_sum, lex_pair
from hahnval.lattice import (
    LaurentEmbedding,
    basis_coordinates,
    hnf_basis,
    poly_divide,
    prime_certificate,
    rational_rank,
    ring_divides,
    sympy_divides,
)
from hahnval.series import Series

L = lex_pair("int", "int")
BH, BL = L.unit(0), L.unit(1)
a = Series.monomial(BH) + Series.monomial(BL) + 1


def t(g, c=1):
    return Series.monomial(g, c)


class TestLinearAlgebra:
    def test_rank(self):
        assert rational_rank([[1, 2], [2, 4]])[0] == 1
        assert rational_rank([[1, 0], [Fraction(1, 2), 1]]) == (2, [0, 1])

    def test_hnf(self):
        basis = hnf_basis([[2, 4], [3, 5], [0, 0]])
        # the lattice spanned by (2,4),(3,5) has index 2 in Z^2
        assert len(basis) == 2 and abs(basis[0][0] * basis[1][1] - basis[0][1] * basis[1][0]) == 2
        assert basis_coordinates(basis, [5, 9]) is not None
        with pytest.raises(ValueError):
            basis_coordinates(basis, [1, 0])

    def test_embedding_round_trip(self):
        G = hahn_sum(0, 5, "rat")
        elems = [G.unit(0, Fraction(1, 2)), G.unit(1, 3) + G.unit(0), G.unit(2)]
        emb = LaurentEmbedding.for_elements(G, elems)
        assert emb.rank == 3
        for g in elems:
            assert emb.element(emb.exponent(g)) == g


class TestPrimeCertificate:
    def test_accepts_a(self):
        c = prime_certificate(a)
        assert c.rank == 2 and set(c.support) == {BH, BL} and c.recheck()

    def test_dependent_support(self):
        g = G_EX.unit(1)
        with pytest.raises(CertificateRejected) as ei:
            prime_certificate(t(g) + t(g * 2) + 1)
        assert ei.value.reason == "dependent-support"

    def test_too_few_points(self):
        with pytest.raises(CertificateRejected) as ei:
            prime_certificate(t(G_EX.unit(1)) + 1)
        assert ei.value.reason == "too-few-points"

    def test_zero_not_in_support(self):
        with pytest.raises(CertificateRejected) as ei:
            prime_certificate(t(BH) + t(BL))
        assert ei.value.reason == "zero-not-in-support"

    def test_distinguished_element_is_a_coordinate(self):
        r = t(G_EX.distinguished()) + t(G_EX.unit(0)) + 1
        assert prime_certificate(r).rank == 2

    def test_truncated_rejected(self):
        with pytest.raises(CertificateRejected):
            prime_certificate(Series(L, {L.zero(): 1}, BH))


class TestDivision:
    def test_poly_divide(self):
        # (x+1)(x-1) / (x+1)
        quo, rem = poly_divide({(2,): Fraction(1), (0,): Fraction(-1)}, {(1,): Fraction(1), (0,): Fraction(1)})
        assert quo == {(1,): 1, (0,): -1} and rem == {}

    def test_constructed_multiple(self):
        ok, q = ring_divides(a, a * t(BH))
        assert ok and q == t(BH)

    def test_monomial_not_divisible(self):
        assert ring_divides(a, t(BH)) == (False, None)
        assert not sympy_divides(a, t(BH))

    def test_square_does_not_divide(self):
        assert ring_divides(a * a, a * t(BH)) == (False, None)
        assert not sympy_divides(a * a, a * t(BH))

    def test_negative_exponents(self):
        r = a * (t(-BH) + t(BL * 3, -2))
        ok, q = ring_divides(a, r)
        assert ok and q * a == r and sympy_divides(a, r)

    def test_units_divide_everything(self):
        ok, q = ring_divides(t(BL, 3), a)
        assert ok and q * t(BL, 3) == a

    def test_requires_exact(self):
        with pytest.raises(PrecisionError):
            ring_divides(a, Series(L, {L.zero(): 1}, BH))

    def test_extended_group(self):
        A = G_EX.distinguished()
        d = t(A) + t(G_EX.unit(2)) + 1
        r = d * (t(A) - 2)
        assert ring_divides(d, r)[0] and sympy_divides(d, r)
        assert not ring_divides(d, r + 1)[0] and not sympy_divides(d, r + 1)
