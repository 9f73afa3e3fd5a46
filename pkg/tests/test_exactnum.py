import pytest
from sympy.polys.domains import QQ

from errors import (
    IntegrationObstruction,
    PrecisionUnderflow,
    ReducibleMinimalPolynomial,
    UnsupportedFieldSplit,
    ZeroArgument,
)
from exactnum import (
    LaurentPoly,
    LogFunction,
    RationalFunction,
    SeriesAtInfinity,
    field_extend,
    format_scalar,
    log_derive,
    nullspace,
    scalar,
    split_integer,
    unify_domains,
)


def test_scalar_accepts_text_and_domain_elements():
    assert scalar("3/4") == QQ(3, 4)
    assert scalar("-1/2") == QQ(-1, 2)
    assert scalar(QQ(1, 3)) == QQ(1, 3)
    assert format_scalar(QQ(-3, 4)) == "-3/4"
    assert format_scalar(QQ(5)) == "5"


def test_field_extend_square_root_of_two():
    field = field_extend("a^2 - 2")
    a = field.generator
    assert field.degree == 2
    assert not (a * a - field.domain.convert(2))


def test_field_extend_linear_stays_rational():
    field = field_extend([1, -3])
    assert field.is_rational
    assert field.generator == QQ(3)


def test_reducible_minimal_polynomial_is_rejected():
    with pytest.raises(ReducibleMinimalPolynomial):
        field_extend("a^2 - 1")


def test_only_one_extension_per_computation():
    k2 = field_extend("a^2 - 2").domain
    k3 = field_extend("a^2 - 3").domain
    assert unify_domains(QQ, k2) == k2
    with pytest.raises(UnsupportedFieldSplit):
        unify_domains(k2, k3)


def test_split_integer():
    n, rest = split_integer(QQ(7, 2))
    assert n == 3 and rest == QQ(1, 2)
    n, rest = split_integer(QQ(-1, 4))
    assert n == -1 and rest == QQ(3, 4)


def test_laurent_arithmetic():
    p = LaurentPoly.from_dict({1: 1, -1: 1})
    assert p * p == LaurentPoly.from_dict({2: 1, 0: 2, -2: 1})
    assert LaurentPoly.monomial(-2).derivative() == LaurentPoly.monomial(-3, -2)
    assert (p - p).is_zero()
    with pytest.raises(ZeroArgument):
        LaurentPoly.zero().degree


def test_series_inverse_of_one_minus_reciprocal():
    s = SeriesAtInfinity({0: QQ(1), -1: QQ(-1)}, -10)
    inv = s.inverse()
    assert all(inv.coefficient(-k) == 1 for k in range(10))
    with pytest.raises(PrecisionUnderflow):
        inv.coefficient(-10)


def test_series_product_keeps_the_common_window():
    a = SeriesAtInfinity({0: QQ(1)}, -5)
    b = SeriesAtInfinity({-1: QQ(2)}, -8)
    product = a * b
    assert product.order == max(-5 - 1, -8 + 0)
    assert product.coefficient(-1) == 2


def test_antiderivative_refuses_reciprocal():
    with pytest.raises(IntegrationObstruction):
        SeriesAtInfinity({-1: QQ(1)}, -6).antiderivative()


def test_rational_function_expansion_at_infinity():
    f = RationalFunction.from_polys({0: 1}, {1: 1, 0: 1})  # 1/(x + 1)
    series = f.expand(-6)
    assert [series.coefficient(-k) for k in range(1, 6)] == [1, -1, 1, -1, 1]
    assert f.ord_at_infinity() == -1


def test_rational_function_derivative():
    f = RationalFunction.monomial(-1, 3)
    assert f.derivative() == RationalFunction.monomial(-2, -3)


def test_log_function_derivative_and_shift():
    f = LogFunction.monomial(2, 1)  # x^2 ln x
    expected = LogFunction.from_terms([(2, 1, 1), (1, 1, 0)])
    assert f.derivative() == expected
    shifted = f.shift_log(1)
    assert shifted == LogFunction.from_terms([(1, 2, 1), (1, 2, 0)])


def test_log_function_groups_by_exponent_class():
    f = LogFunction.from_terms([(1, QQ(1, 2), 0), (1, QQ(3, 2), 0), (1, 1, 0)])
    assert len(f.groups) == 2


def _random_log_function(rng, gamma):
    terms = [
        (QQ(rng.choice([-3, -2, -1, 1, 2, 3]), rng.choice([1, 2, 3])), gamma + rng.randint(-3, 3), rng.randint(0, 2))
        for _ in range(3)
    ]
    return LogFunction.from_terms(terms)


def test_log_derive_is_a_derivation(rng):
    for _ in range(100):
        gamma = rng.choice([QQ(0), QQ(1, 2), QQ(1, 3)])
        f, g = _random_log_function(rng, gamma), _random_log_function(rng, gamma)
        assert log_derive(f * g) == log_derive(f) * g + f * log_derive(g)


def test_nullspace_of_a_single_relation():
    basis = nullspace([[QQ(1), QQ(1)]], 2)
    assert len(basis) == 1
    v = basis[0]
    assert v[0] + v[1] == 0 and v[0]


def _random_extension_element(rng, field):
    return field.element([QQ(rng.randint(-6, 6), rng.choice([1, 2, 3])) for _ in range(2)])


def test_quadratic_field_laws(rng):
    field = field_extend("a^2 - 2")
    one = field.domain.one
    for _ in range(200):
        a, b, c = (_random_extension_element(rng, field) for _ in range(3))
        assert not ((a * b) * c - a * (b * c))
        assert not (a * (b + c) - (a * b + a * c))
        assert not ((a + b) - (b + a))
        if a:
            assert not (a * (one / a) - one)


def _random_rational_function(rng):
    numerator = {rng.randint(0, 3): QQ(rng.randint(-4, 4) or 1, rng.choice([1, 2])) for _ in range(3)}
    denominator = {4: QQ(1)}
    denominator.update({rng.randint(0, 3): QQ(rng.randint(-3, 3), rng.choice([1, 2])) for _ in range(2)})
    return RationalFunction.from_polys(numerator, denominator)


def test_rational_function_expansion_times_denominator_is_numerator(rng):
    for _ in range(100):
        f = _random_rational_function(rng)
        series = f.expand(-10)
        assert series.top == f.ord_at_infinity()
        product = series * SeriesAtInfinity.from_laurent(f.denominator, -100)
        assert product.order == -10 + f.denominator.degree
        assert product.agrees_with(SeriesAtInfinity.from_laurent(f.numerator, -100))


def test_ord_at_infinity_is_additive(rng):
    for _ in range(100):
        f, g = _random_rational_function(rng), _random_rational_function(rng)
        assert (f * g).ord_at_infinity() == f.ord_at_infinity() + g.ord_at_infinity()
        assert (f / g).ord_at_infinity() == f.ord_at_infinity() - g.ord_at_infinity()
        if not (f + g).is_zero():
            assert (f + g).ord_at_infinity() <= max(f.ord_at_infinity(), g.ord_at_infinity())


def test_ord_of_shifted_cube_quotient():
    f = RationalFunction.from_polys({1: 1, 0: 1}, {3: 1})  # (x + 1)/x^3
    assert f.ord_at_infinity() == -2
    series = f.expand(-6)
    assert series.terms == {-2: QQ(1), -3: QQ(1)}
