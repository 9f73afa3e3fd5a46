import pytest

import config
import darboux
from bessel import BesselParams, bessel_operator, bessel_rank
from bispectral import string_pair, zr_invariance
from darboux import (
    KernelSpec,
    bessel_kernel_basis,
    cofactor,
    darboux_step,
    dt_shape,
    kernel_validate,
    minimal_kernel_solution,
    monomial_darboux,
    order_two_family,
    rational_reconstruct,
)
from diffop import indicial_data
from errors import InvarianceLost, MonodromyNotClosed, NotARightFactor, NotInKernel, ReconstructionFailed
from exactnum import LaurentPoly, RationalFunction
from grammar import format_kernel, parse_kernel_list
from psdo import solve_wave_operator


def _spec(beta, power, kernel):
    return KernelSpec(BesselParams.of(beta), power, tuple(parse_kernel_list(kernel)))


def test_first_order_kernel_over_d_squared(op):
    transform = monomial_darboux(_spec(["0", "1"], 1, "x"))
    assert transform.P == op("d - x^-1")
    assert transform.Q == op("d + x^-1")
    assert transform.L == op("d^2 - 2*x^-2")
    assert transform.Q * transform.P == op("d^2")


def test_third_order_transform_is_bessel():
    transform = monomial_darboux(_spec(["0", "1", "2"], 1, "x"))
    assert transform.L == bessel_operator(BesselParams.of(["-1", "1", "3"]))


def test_adler_moser_operator(op):
    transform = order_two_family(1, parse_kernel_list("x; x^3 - 2"), 2)
    expected = op("d^2 - 6*x*(x^3 - 2)/(x^3 + 1)^2")
    assert transform.L == expected
    assert transform.P * transform.Q == expected ** 2
    assert transform.Q * transform.P == op("d^4")


def test_unknown_family():
    with pytest.raises(ValueError):
        order_two_family(3, parse_kernel_list("x"), 1)


def test_closure_is_checked_before_membership():
    with pytest.raises(MonodromyNotClosed):
        kernel_validate(_spec(["0", "1"], 2, "ln"))


def test_kernel_membership():
    with pytest.raises(NotInKernel):
        kernel_validate(_spec(["0", "1"], 1, "x^2"))


def test_dependent_kernel_is_reduced():
    checked = kernel_validate(_spec(["0", "1"], 2, "x; 2*x; x^3"))
    assert len(checked.basis) == 2


def test_kernel_basis_with_repeated_roots():
    spec = bessel_kernel_basis(BesselParams.of(["1/2", "1/2"]), 1)
    assert sorted(format_kernel(f) for f in spec.basis) == ["x^(1/2)", "x^(1/2)*ln"]
    assert len(bessel_kernel_basis(BesselParams.of(["0", "1"]), 2).basis) == 4


def test_cofactor_rejects_large_divisor(op):
    with pytest.raises(NotARightFactor):
        cofactor(BesselParams.of(["0", "1"]), 1, op("d^3"))


def test_dt_shape(op):
    shape = dt_shape(op("d - x^-1"), 2)
    assert shape.shape_ok
    assert shape.residue == 1
    assert not dt_shape(op("d - x^-1 + x^-2"), 2).shape_ok


def test_minimal_solution_of_bessel_operator(op):
    L = op("d^2 - 2*x^-2")
    root_class = indicial_data(L).classes[0]
    solution = minimal_kernel_solution(L, root_class, 2, 12)
    assert solution.lam == -1
    assert all(not c for e, c in solution.series.terms.items() if e != 0)


def test_darboux_step_lowers_to_d_squared(op):
    L = op("d^2 - 2*x^-2")
    K = solve_wave_operator(L, prec=24, depth=6)
    root_class = indicial_data(L).classes[0]
    L_new, K_new, record = darboux_step(L, K, root_class, 2, 24)
    assert (L_new - op("d^2")).is_zero()
    assert record.roots_match
    assert (record.Q - op("d - x^-1")).is_zero()
    assert K_new.top_order == 0


def test_rational_reconstruction():
    target = RationalFunction.from_polys(LaurentPoly.from_dict({0: 1}), LaurentPoly.from_dict({1: 1, 0: 1}))
    assert rational_reconstruct(target.expand(-12), 2) == target
    with pytest.raises(ReconstructionFailed):
        rational_reconstruct(target.expand(-3), 2)


def _generated_operators():
    order_two = [order_two_family(1, parse_kernel_list(f"x; x^3 + {c}"), 2).L for c in (1, 2, 3, 4, 5)]
    order_two += [order_two_family(1, parse_kernel_list(f"x; x^3 - {c}"), 2).L for c in (1, 2, 3, 4, 5)]
    order_three = [monomial_darboux(_spec(["0", "1", "2"], 1, f"x + {c}")).L for c in range(1, 11)]
    return order_two + order_three


@pytest.mark.slow
def test_root_shift_law_on_generated_operators():
    operators = _generated_operators()
    assert len(operators) == 20
    for L in operators:
        data = indicial_data(L)
        actionable = [c for c in data.classes if c.span >= L.order]
        assert actionable
        K = solve_wave_operator(L, prec=24, depth=4)
        _, _, record = darboux_step(L, K, actionable[0], 1, 24)
        assert record.predicted_poly == record.observed_poly


def test_darboux_step_rejects_roots_off_the_shift_rule(op, monkeypatch):
    L = op("d^2 - 2*x^-2")
    K = solve_wave_operator(L, prec=24, depth=6)
    root_class = indicial_data(L).classes[0]
    monkeypatch.setattr(darboux, "predicted_indicial", lambda poly, lam, N, dom: poly)
    with pytest.raises(InvarianceLost):
        darboux_step(L, K, root_class, 2, 24)


def test_second_family_keeps_rank_two(op):
    transform = order_two_family(2, parse_kernel_list("x^(1/2)"), 1)
    assert transform.L == op("d^2 - 3/4*x^-2")
    assert transform.Q * transform.P == op("d^2 + 1/4*x^-2")
    assert transform.L == bessel_operator(BesselParams.of(["-1/2", "3/2"]))
    assert bessel_rank(BesselParams.of(["1/2", "1/2"]), 8).rank == 2
    assert bessel_rank(BesselParams.of(["-1/2", "3/2"]), 8).rank == 2


def test_third_order_transform_keeps_rank_one():
    transform = monomial_darboux(_spec(["0", "1", "2"], 1, "x"))
    assert bessel_rank(BesselParams.of(["0", "1", "2"]), 8).rank == 1
    assert bessel_rank(BesselParams.of(["-1", "1", "3"]), 8).rank == 1
    assert transform.L == bessel_operator(BesselParams.of(["-1", "1", "3"]))


@pytest.mark.slow
def test_darboux_steps_keep_a_string_pair(op):
    current = op("d^2 - 6*x*(x^3 - 2)/(x^3 + 1)^2")
    span = max(c.span for c in indicial_data(current).classes)
    prec = config.default_precision(2, span)
    K = solve_wave_operator(current, prec)
    r = zr_invariance(current).maximal
    numbers = []
    while True:
        numbers.append(string_pair(current, K).n)
        actionable = [c for c in indicial_data(current).classes if c.span >= 2]
        if not actionable:
            break
        current, K, record = darboux_step(current, K, actionable[0], r, prec)
        assert record.roots_match
    assert numbers[0] == 1 and numbers[-1] == 0
    assert len(numbers) == 3
    assert (current - op("d^2")).is_zero()
