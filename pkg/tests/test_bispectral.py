import pytest

import bispectral
from bessel import BesselParams, bessel_operator
from bispectral import (
    build_lambda,
    default_string_bound,
    find_theta,
    power_expand,
    spectral_probe,
    string_pair,
    verify_bispectral,
    verify_string_identities,
    zr_invariance,
)
from errors import InvarianceLost, NotFound, ResidualNonzero, UnsupportedCoefficient
from exactnum import LaurentPoly, RationalFunction
from psdo import PsdOp, solve_wave_operator

BESSEL = "d^2 - 2*x^-2"
ADLER_MOSER = "d^2 - 6*x*(x^3 - 2)/(x^3 + 1)^2"


@pytest.fixture
def bessel(op):
    L = op(BESSEL)
    return L, solve_wave_operator(L, prec=16, depth=16)


def test_theta_of_free_operator(op):
    theta, m = find_theta(op("d^2"))
    assert theta == LaurentPoly.monomial(1)
    assert m == 1


def test_theta_of_bessel_operator(op):
    theta, m = find_theta(op(BESSEL))
    assert theta == LaurentPoly.monomial(2)
    assert m == 2


def test_theta_search_exhausts_bounds(op):
    with pytest.raises(NotFound):
        find_theta(op("d^2 + x^-1"), max_deg=8, max_m=6)


def test_theta_needs_rational_coefficients(op):
    with pytest.raises(UnsupportedCoefficient):
        find_theta(op(BESSEL).expand(-10))


def test_lambda_and_certificate(op, bessel):
    L, K = bessel
    theta = LaurentPoly.monomial(2)
    Lam = build_lambda(L, K, theta, 16, 16)
    assert Lam == op(BESSEL)
    cert = verify_bispectral(L, Lam, LaurentPoly.monomial(2), theta, 16, 16, K)
    assert cert.verified
    assert cert.m == 2
    assert cert.zr_L == 2
    assert cert.zr_Lam == 2
    assert cert.checked == {"L": 55, "Lambda": 55}


def test_wrong_lambda_is_rejected(op, bessel):
    L, K = bessel
    with pytest.raises(ResidualNonzero) as info:
        verify_bispectral(L, op("d^2 - 3*x^-2"), LaurentPoly.monomial(2), LaurentPoly.monomial(2), 16, 16, K)
    assert info.value.details["side"] == "Lambda"


def test_string_pair_of_bessel_operator(op, bessel):
    L, K = bessel
    pair = string_pair(L, K, n_max=2)
    assert pair.n == 0
    assert pair.exact
    assert pair.Q == op("x*d")
    assert verify_string_identities(L, pair.Q, pair.n, 3) == {1: True, 2: True, 3: True}
    assert power_expand(pair.Q, L) == [pair.Q]


def test_string_bound_from_indicial_span(op):
    assert default_string_bound(op(BESSEL)) == 2
    assert default_string_bound(op("d^2")) == 1


def test_zr_invariance(op):
    assert zr_invariance(op(BESSEL)).maximal == 2
    assert zr_invariance(op("d^2 + x^-3")).valid == (1,)


def test_power_expansion(op):
    L = op(BESSEL)
    parts = power_expand(L * L + op("x*d") * L + op("x^-1"), L)
    assert len(parts) == 3
    assert parts[0] == op("1")
    assert parts[1] == op("x*d")
    assert parts[2] == op("x^-1")


@pytest.mark.slow
def test_probe_rank(op):
    report = spectral_probe(op(BESSEL), order_bound=3, depth=8)
    assert report.rank == 1
    assert sorted(w.order for w in report.witnesses) == [2, 3]
    assert all(w.f == LaurentPoly.monomial(w.order) for w in report.witnesses)


SELF_DUAL = [["-1", "2"], ["0", "1"], ["1/4", "3/4"], ["1/2", "1/2"], ["0", "1", "2"], ["-1", "1", "3"]]


@pytest.mark.slow
@pytest.mark.parametrize("beta", SELF_DUAL)
def test_bessel_operators_are_self_dual(beta):
    L = bessel_operator(BesselParams.of(beta))
    N = L.order
    cert = verify_bispectral(L, L, LaurentPoly.monomial(N), LaurentPoly.monomial(N), prec=32, depth=8)
    assert cert.verified


@pytest.mark.parametrize("beta", [["-1", "2"], ["1/4", "3/4"], ["0", "1", "2"], ["-1", "1", "3"]])
def test_string_identities_of_bessel_operators(op, beta):
    L = bessel_operator(BesselParams.of(beta))
    K = solve_wave_operator(L, prec=24, depth=8)
    pair = string_pair(L, K, n_max=1)
    assert pair.n == 0
    assert pair.Q == op("x*d")
    assert verify_string_identities(L, pair.Q, 0, 3) == {1: True, 2: True, 3: True}


@pytest.mark.slow
def test_probe_rank_two_has_even_symbols():
    report = spectral_probe(bessel_operator(BesselParams.of(["1/4", "3/4"])), order_bound=6, depth=8)
    assert report.rank == 2
    assert sorted(w.order for w in report.witnesses) == [2, 4, 6]
    assert all(e % 2 == 0 for w in report.witnesses for e in w.f.terms)


def test_probe_rejects_a_symbol_mismatch(op, monkeypatch):
    monkeypatch.setattr(bispectral, "bispectral_b1", lambda K, M: PsdOp({0: RationalFunction.monomial(7)}))
    with pytest.raises(InvarianceLost):
        spectral_probe(op(BESSEL), order_bound=2, depth=6)


@pytest.fixture
def adler_moser(op):
    L = op(ADLER_MOSER)
    K = solve_wave_operator(L)
    return L, K, string_pair(L, K)


@pytest.mark.slow
def test_string_pair_of_adler_moser_operator(op, adler_moser):
    L, K, pair = adler_moser
    assert pair.n == 1
    assert pair.exact
    assert verify_string_identities(L, pair.Q, pair.n, 2) == {1: True, 2: True}
    for j, order in enumerate(K.decay_orders(), start=1):
        assert order is None or order <= -j


@pytest.mark.slow
def test_power_expansion_of_adler_moser_partner(op, adler_moser):
    L, _, pair = adler_moser
    parts = power_expand(pair.Q, L, string_partner=True)
    assert len(parts) == 2
    assert parts[0] == op("x*d")


@pytest.mark.parametrize("text", ["x*d^3 + d^2", "x*d^3 + x^2"])
def test_power_expansion_rejects_non_partners(op, text):
    with pytest.raises(InvarianceLost):
        power_expand(op(text), op("d^2"), string_partner=True)
