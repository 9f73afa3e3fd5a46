import pytest
from sympy.polys.domains import QQ

from diffop import (
    AssociatedPolynomial,
    DiffOp,
    commutator,
    fuchsian_everywhere,
    graded_profile,
    indicial_data,
    indicial_ring,
    is_zr_invariant,
    principal_level,
    right_divide,
)
from errors import CoefficientNotVanishing, GrowingCoefficient, NonMonicDivisor, ZeroOperator
from exactnum import RationalFunction


def test_derivative_times_x(op):
    assert DiffOp.d() * DiffOp.x() == DiffOp.x() * DiffOp.d() + 1


def test_euler_product_expands_to_third_derivative(op):
    assert op("x^-3*D*(D-1)*(D-2)") == op("d^3")


def test_bessel_text_matches_constructor(op):
    expected = DiffOp.from_dict({2: 1, 0: RationalFunction.monomial(-2, -2)}, QQ)
    assert op("d^2 - 2*x^-2") == expected
    assert op("d^2 - 2*x^-2").order == 2


def test_zero_operator_has_no_order():
    with pytest.raises(ZeroOperator):
        DiffOp.zero().order


def test_product_is_associative(make_operator):
    for _ in range(100):
        a, b, c = make_operator(2, rational=True), make_operator(1, rational=True), make_operator(2)
        assert (a * b) * c == a * (b * c)


def test_commutator_with_euler_scales_homogeneous_operators(op):
    L = op("d^2 - 2*x^-2")
    assert commutator(L, DiffOp.euler()) == L * 2


def test_associated_polynomial_is_multiplicative(make_operator):
    for _ in range(100):
        a, b = make_operator(2), make_operator(3)
        for rho, sigma in ((1, 1), (2, -1), (1, 0)):
            product = graded_profile(a * b, rho, sigma)
            pa, pb = graded_profile(a, rho, sigma), graded_profile(b, rho, sigma)
            assert product.order_v == pa.order_v + pb.order_v
            assert product.assoc_poly == pa.assoc_poly * pb.assoc_poly


def test_growing_coefficients_have_no_profile(op):
    with pytest.raises(GrowingCoefficient):
        graded_profile(op("d^2 + x"), 1, 1)


def test_indicial_composition_law(make_operator):
    for _ in range(100):
        a, b = make_operator(2), make_operator(2)
        da, db = indicial_data(a), indicial_data(b)
        R, D = indicial_ring(QQ)
        expected = da.indicial_poly.compose(D, D + db.weight) * db.indicial_poly
        assert indicial_data(a * b).indicial_poly == expected
        assert indicial_data(a * b).weight == da.weight + db.weight


def test_indicial_roots_of_bessel_operator(op):
    data = indicial_data(op("d^2 - 2*x^-2"))
    assert data.weight == -2
    assert data.roots() == [-1, 2]
    (cls,) = data.classes
    assert cls.offsets == (0, 3)
    assert cls.span == 3


def test_indicial_polynomial_of_third_order_example(op):
    data = indicial_data(op("d^3 + x^-2*d"))
    R, D = indicial_ring(QQ)
    assert data.indicial_poly == D ** 3 - 3 * D ** 2 + 3 * D


def test_non_integer_roots_form_separate_classes(op):
    data = indicial_data(op("d^2 + 3/16*x^-2"))
    assert len(data.classes) == 2
    assert data.roots() == [QQ(1, 4), QQ(3, 4)]


def test_principal_level_and_associated_polynomial(op):
    L = op("d^2 + x^-1")
    level = principal_level(L)
    assert level.level == QQ(3, 2)
    assert (level.rho, level.sigma) == (2, -1)
    profile = graded_profile(L, 2, -1)
    assert profile.assoc_poly == AssociatedPolynomial({(0, 2): QQ(1), (-1, 0): QQ(1)})


def test_principal_level_of_bessel_operator_is_one(op):
    level = principal_level(op("d^2 - 2*x^-2"))
    assert level.level == 1
    assert level.fuchsian_at_infinity


def test_principal_level_needs_vanishing_coefficients(op):
    with pytest.raises(CoefficientNotVanishing):
        principal_level(op("d^2 + x"))


def test_fuchsian_test_flags_third_order_pole(op):
    report = fuchsian_everywhere(op("d^2 + x^-3"))
    assert not report.fuchsian
    (point,) = report.points
    assert point.factor == "x"
    assert not point.regular


def test_bessel_operator_is_fuchsian(op):
    assert fuchsian_everywhere(op("d^2 - 2*x^-2")).fuchsian


def test_right_division(op):
    quotient, remainder = right_divide(op("d^2 - 2*x^-2"), op("d + x^-1"))
    assert quotient == op("d - x^-1")
    assert remainder.is_zero()


def test_right_division_needs_monic_divisor(op):
    with pytest.raises(NonMonicDivisor):
        right_divide(op("d^2"), op("2*d"))


def test_zr_invariance_of_bessel_operators(op):
    assert is_zr_invariant(op("d^2 - 2*x^-2"), 2)
    assert not is_zr_invariant(op("d^2 - 2*x^-2 + x^-3"), 2)
    assert is_zr_invariant(op("d^3 + x^-3"), 3)


def test_right_division_reconstructs_the_dividend(make_operator):
    for _ in range(50):
        Q, L = make_operator(4, rational=True), make_operator(2)
        quotient, remainder = right_divide(Q, L)
        assert quotient * L + remainder == Q
        assert quotient.order == 2
        assert remainder.is_zero() or remainder.order < 2
