import pytest
from sympy.polys.domains import QQ

from bessel import (
    BesselParams,
    bessel_operator,
    bessel_rank,
    bessel_wave_coeffs,
    bessel_wave_operator,
    normalize_beta,
)
from bispectral import zr_invariance
from diffop import DiffOp, commutator
from errors import NotNormalized
from psdo import solve_wave_operator


def test_bessel_operator_in_d_form(op):
    assert bessel_operator(BesselParams.of(["-1", "2"])) == op("d^2 - 2*x^-2")
    assert bessel_operator(BesselParams.of(["0", "1"])) == op("d^2")


def test_normalize_beta():
    params, shift = normalize_beta(BesselParams.of(["0", "0"]))
    assert shift == QQ(1, 2)
    assert params.describe() == ["1/2", "1/2"]
    assert params.is_normalized()


def test_params_compare_by_value():
    assert BesselParams.of(["1/2", "3/2"]) == BesselParams.of([QQ(1, 2), QQ(3, 2)])
    assert BesselParams.of(["0", "1"]).is_normalized()


@pytest.mark.parametrize(
    "beta, rank",
    [
        (["-1", "2"], 1),
        (["0", "1"], 1),
        (["1/4", "3/4"], 2),
        (["-1/2", "3/2"], 2),
    ],
)
def test_bessel_rank(beta, rank):
    witness = bessel_rank(BesselParams.of(beta), 8)
    assert witness.rank == rank
    assert witness.upper_bound


def test_rank_bound_below_order():
    with pytest.raises(ValueError):
        bessel_rank(BesselParams.of(["-1", "1", "3"]), 2)


def test_wave_coefficients():
    coeffs = bessel_wave_coeffs(BesselParams.of(["-1", "2"]), 4)
    assert coeffs.coefficient(0) == 1
    assert coeffs.coefficient(-1) == -1
    assert coeffs.coefficient(-2) == 0


def test_wave_coefficients_need_normalized_beta():
    with pytest.raises(NotNormalized):
        bessel_wave_coeffs(BesselParams.of(["0", "0"]), 4)


@pytest.mark.parametrize("beta", [["-1", "2"], ["-1", "1", "3"]])
def test_closed_form_wave_operator_matches_solver(beta):
    params = BesselParams.of(beta)
    closed = bessel_wave_operator(params, 3)
    solved = solve_wave_operator(bessel_operator(params), prec=20, depth=3)
    for j in range(1, 4):
        assert closed.alpha(j).to_laurent() == solved.alpha(j).to_laurent()


NORMALIZED_BETAS = [
    ["0", "1"],
    ["-1", "2"],
    ["1/4", "3/4"],
    ["1/2", "1/2"],
    ["0", "1", "2"],
    ["-1", "1", "3"],
    ["1/2", "1", "3/2"],
    ["-2", "2", "3"],
    ["0", "1", "2", "3"],
    ["-1", "1", "3", "3"],
    ["1/2", "1/2", "5/2", "5/2"],
    ["-3", "1", "4", "4"],
]


@pytest.mark.parametrize("beta", NORMALIZED_BETAS)
def test_string_law_and_symmetry(beta):
    params = BesselParams.of(beta)
    assert params.is_normalized()
    L = bessel_operator(params)
    assert commutator(L, DiffOp.euler()) == L * params.order
    assert zr_invariance(L).maximal == params.order
