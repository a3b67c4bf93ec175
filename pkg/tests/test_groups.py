from fractions import Fraction

import pytest

from hahnval.errors import PreconditionError, ShapeMismatch, UnsupportedShape
from hahnval.groups import (
    DYADIC,
    G_EX,
    INT,
    NEG_OMEGA_DYADIC,
    NEG_OMEGA_INT,
    RAT,
    GroupElement,
    GroupShape,
    ext_hahn_sum,
    group_arith,
    group_cmp,
    hahn_sum,
    is_discrete,
    is_n_divisible,
    known_closed,
    lex_pair,
    lift_from_quotient,
    quotient,
    quotient_project,
    vmin_support,
)

A = G_EX.distinguished()
H7 = hahn_sum(-7, 0, "int")


def u(shape, i, c=1):
    return shape.unit(i, c)


class TestShapes:
    def test_extended_needs_one_sided_range(self):
        with pytest.raises(UnsupportedShape):
            GroupShape("extsum", None, 0, "int", coef=2)
        with pytest.raises(UnsupportedShape):
            GroupShape("extsum", 0, 5, "int", coef=2)

    def test_components_are_scalar(self):
        with pytest.raises(UnsupportedShape):
            GroupShape("hahnsum", 0, 3, "hahnsum")

    def test_quotient_cut_in_range(self):
        with pytest.raises(UnsupportedShape):
            quotient(H7, 3)
        assert quotient(H7, -2).hi == -2

    def test_text(self):
        assert str(G_EX) == "(extsum omega int 2)"
        assert str(NEG_OMEGA_DYADIC) == "(hahnsum -omega dyadic)"
        assert str(lex_pair("int", "rat")) == "(lex int rat)"


class TestArithmetic:
    def test_inverse_gives_empty_map(self):
        x = group_arith("add", u(NEG_OMEGA_INT, 0), u(NEG_OMEGA_INT, 0, -1))
        assert x.coeffs == () and x.is_zero()

    def test_doubling_a(self):
        x = group_arith("add", A, A)
        assert x.k == 2 and x.coeffs == ()

    def test_scalar_componentwise(self):
        x = GroupElement(G_EX, {0: 1, 1: 2})
        assert group_arith("scalar", x, 3) == GroupElement(G_EX, {0: 3, 1: 6})

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatch):
            u(G_EX, 0) + u(NEG_OMEGA_INT, 0)

    def test_no_zero_entries(self):
        x = GroupElement(G_EX, {0: 1, 1: 0, 2: -3})
        assert x.coeffs == ((0, 1), (2, -3))

    def test_scalar_shape_rejects_other_keys(self):
        with pytest.raises(Exception):
            GroupElement(INT, {1: 1})

    def test_index_range_enforced(self):
        with pytest.raises(Exception):
            GroupElement(G_EX, {-1: 1})


class TestOrder:
    def test_more_significant_index_dominates(self):
        assert group_cmp(u(NEG_OMEGA_INT, -5), u(NEG_OMEGA_INT, 0)) == ">"

    def test_a_is_positive(self):
        assert group_cmp(A, G_EX.zero()) == ">"
        assert A.effective(0) == 2

    def test_reflexive(self):
        x = GroupElement(G_EX, {3: -1}, 1)
        assert group_cmp(x, x) == "="

    def test_extended_effective_coefficients(self):
        # a - 2*1_0 - 2*1_1 has effective coefficient 2 from index 2 on
        x = A - u(G_EX, 0, 2) - u(G_EX, 1, 2)
        assert x.vmin() == 2 and x > G_EX.zero()
        # 1_0 - a is negative: effective coefficient -1 at index 0
        assert u(G_EX, 0) - A < G_EX.zero()


class TestVmin:
    def test_single_point(self):
        assert vmin_support(u(G_EX, 1, 3)) == 1

    def test_cancelling_position_zero(self):
        assert vmin_support(A - u(G_EX, 0, 2)) == 1

    def test_zero(self):
        assert vmin_support(G_EX.zero()) is None


class TestDivisibility:
    def test_a_not_2_divisible(self):
        assert is_n_divisible(A, 2) == (False, None)

    def test_dyadic_one_not_3_divisible(self):
        assert not is_n_divisible(DYADIC.elem(1), 3)[0]
        assert is_n_divisible(DYADIC.elem(Fraction(3, 4)), 3) == (True, DYADIC.elem(Fraction(1, 4)))

    def test_constructed_multiple(self):
        ok, q = is_n_divisible(u(G_EX, 2, 5), 5)
        assert ok and q == u(G_EX, 2)

    def test_two_a_is_2_divisible(self):
        assert is_n_divisible(A * 2, 2) == (True, A)

    def test_n_must_be_positive(self):
        with pytest.raises(PreconditionError):
            is_n_divisible(A, 0)

    def test_rat_is_divisible(self):
        assert is_n_divisible(RAT.elem(Fraction(2, 7)), 9)[0]


class TestDiscreteness:
    def test_neg_omega_int_discrete(self):
        assert is_discrete(NEG_OMEGA_INT) == (True, u(NEG_OMEGA_INT, 0))

    def test_extended_dense(self):
        assert is_discrete(G_EX) == (False, None)

    def test_rat_dense(self):
        assert is_discrete(RAT) == (False, None)

    def test_closedness_table(self):
        assert known_closed(G_EX) is False
        assert known_closed(NEG_OMEGA_DYADIC) is False
        assert known_closed(NEG_OMEGA_INT) is True
        assert known_closed(RAT) is True
        assert known_closed(ext_hahn_sum(0, "int", 1)) is True


class TestQuotient:
    def test_drop_fine_entries(self):
        x = u(H7, -3) + u(H7, 0)
        assert lift_from_quotient(quotient_project(x, -2)) == u(H7, -3)

    def test_fully_dropped(self):
        assert quotient_project(u(H7, 0), -2).is_zero()

    def test_support_projection(self):
        x = u(H7, -4, 2) + u(H7, -1, 5)
        assert lift_from_quotient(quotient_project(x, -2)) == u(H7, -4, 2)

    def test_cut_outside_range(self):
        with pytest.raises(PreconditionError):
            quotient_project(u(H7, 0), 4)

    def test_extended_shape_rejected(self):
        with pytest.raises(UnsupportedShape):
            quotient_project(A, 2)
