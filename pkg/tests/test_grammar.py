import pytest
from sympy.polys.domains import QQ

from errors import OperatorSyntaxError, UnknownSymbol
from exactnum import LaurentPoly, field_extend, format_scalar
from grammar import (
    format_kernel,
    format_operator,
    format_psdo,
    laurent_to_json,
    operator_from_json,
    operator_to_json,
    parse_kernel,
    parse_kernel_list,
    parse_operator,
    parse_scalar,
    parse_scalar_list,
)
from psdo import nth_root


def test_syntax_error_reports_position():
    with pytest.raises(OperatorSyntaxError) as info:
        parse_operator("d^2 +")
    assert info.value.position == 5


def test_unknown_symbol():
    with pytest.raises(UnknownSymbol):
        parse_operator("d^2 + y")


@pytest.mark.parametrize("text", ["x^(1/2)*d", "x/d", "d^-1"])
def test_rejected_operator_text(text):
    with pytest.raises(OperatorSyntaxError):
        parse_operator(text)


@pytest.mark.parametrize(
    "text, same",
    [
        ("x*D*(D - 1)", "x^3*d^2"),
        ("∂^2", "d^2"),
        ("x**-2", "x^-2"),
        ("(x + 1)^-1*d", "1/(x + 1)*d"),
    ],
)
def test_equivalent_spellings(text, same):
    assert parse_operator(text) == parse_operator(same)


def test_bessel_operator_prints_back():
    assert format_operator(parse_operator("d^2 - 2*x^-2")) == "d^2 - 2*x^-2"


def test_printer_round_trip(make_operator):
    for _ in range(200):
        L = make_operator(3, rational=True)
        assert parse_operator(format_operator(L)) == L


def test_json_round_trip(make_operator):
    for _ in range(50):
        L = make_operator(2, rational=True)
        assert operator_from_json(operator_to_json(L)) == L


def test_operator_document_from_text():
    assert operator_from_json({"text": "d^2"}) == parse_operator("d^2")
    with pytest.raises(OperatorSyntaxError):
        operator_from_json({"order": 2})


def test_truncated_operator_marks_its_floor():
    assert format_psdo(nth_root(parse_operator("d^2 - 2*x^-2"), 3)).endswith("+ O(d^(-3))")


def test_kernel_text():
    f = parse_kernel("x^(1/2)*ln^2")
    assert format_kernel(f) == "x^(1/2)*ln^2"
    assert (parse_kernel("ln(x)") - parse_kernel("ln")).is_zero()
    assert len(parse_kernel_list("x; x^3 - 2")) == 2
    assert len(parse_kernel_list("x, x^2")) == 2


def test_scalars():
    assert parse_scalar_list("-1, 2, 3/4") == [QQ(-1), QQ(2), QQ(3, 4)]
    dom = field_extend("a^2 - 2").domain
    assert parse_scalar("a^2", dom) == dom.convert(2)
    with pytest.raises(OperatorSyntaxError):
        parse_scalar("x")


def test_extension_scalars():
    dom = field_extend("a^2 - 2").domain
    value = parse_scalar("(1 + 3*a)/2", dom)
    assert value == dom.convert(QQ(1, 2)) + dom.convert(QQ(3, 2)) * dom.unit
    assert format_scalar(value) == "(1 + 3*a)/2"
    assert parse_scalar("a*a - 1", dom) == dom.one


def test_scalar_text_must_be_polynomial_in_the_generator():
    dom = field_extend("a^2 - 2").domain
    with pytest.raises(OperatorSyntaxError):
        parse_scalar("1/a", dom)
    with pytest.raises(UnknownSymbol):
        parse_scalar("a")


def test_laurent_json_keys_are_exponents():
    assert laurent_to_json(LaurentPoly.from_dict({2: 1, -1: QQ(1, 2)})) == {"2": "1", "-1": "1/2"}
