"""
Generalized Bessel operators L_beta = x^-N (D - beta_1) ... (D - beta_N).
"""

import logging
from dataclasses import dataclass
from math import gcd

from sympy.polys.domains import QQ

from diffop import DiffOp, commutator, indicial_ring
from errors import NotNormalized, ResonantBeta
from exactnum import (
    RationalFunction,
    SeriesAtInfinity,
    format_scalar,
    nullspace,
    echelon_by_last,
    scalar,
)
from psdo import WaveOperator

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class BesselParams:
    beta: tuple
    domain: object = QQ

    @classmethod
    def of(cls, values, domain=QQ):
        return cls(tuple(scalar(v, domain) for v in values), domain)

    @property
    def order(self):
        return len(self.beta)

    def is_normalized(self):
        N = self.order
        return not (sum(self.beta, self.domain.zero) - self.domain.convert(QQ(N * (N - 1), 2)))

    def shifted(self, c):
        return BesselParams(tuple(b + c for b in self.beta), self.domain)

    def describe(self):
        return [format_scalar(b) for b in self.beta]

    def __eq__(self, other):
        if not isinstance(other, BesselParams) or self.order != other.order:
            return NotImplemented
        return all(not (a - b) for a, b in zip(self.beta, other.beta))

    __hash__ = None


@dataclass(frozen=True, eq=False)
class RankWitness:
    rank: int
    witnesses: tuple
    bound: int
    upper_bound: bool = True


def euler_product(beta, domain):
    """(D - beta_1) ... (D - beta_N) as a differential operator."""
    D = DiffOp.euler(domain)
    result = DiffOp.identity(domain)
    for b in beta:
        result = result * (D - DiffOp.function(RationalFunction.constant(b, domain), domain))
    return result


def bessel_operator(params):
    """x^-N (D - beta_1) ... (D - beta_N) in d-form."""
    dom = params.domain
    N = params.order
    return DiffOp.x(-N, 1, dom) * euler_product(params.beta, dom)


def normalize_beta(params):
    """Shift beta by c so that sum(beta) = N(N-1)/2; returns (params, c)."""
    N = params.order
    dom = params.domain
    total = sum(params.beta, dom.zero)
    c = (dom.convert(QQ(N * (N - 1), 2)) - total) * dom.convert(QQ(1, N))
    return params.shifted(c), c


def _symbol_poly(params):
    R, D = indicial_ring(params.domain)
    p = R.one
    for b in params.beta:
        p *= D - b
    return R, D, p


def bessel_rank(params, order_bound):
    """Upper bound on the rank from homogeneous commuting operators x^-s h(D).

    For each s, solves p(D - s) h(D) = h(D - N) p(D) with deg h <= s.
    """
    N = params.order
    if order_bound < N:
        raise ValueError("order bound must be at least the operator order")
    R, D, p = _symbol_poly(params)
    L = bessel_operator(params)
    witnesses = []
    orders = [N]
    for s in range(1, order_bound + 1):
        columns = []
        for j in range(s + 1):
            columns.append(p.compose(D, D - s) * D ** j - (D - N) ** j * p)
        powers = sorted({m for col in columns for m in col.monoms()})
        rows = [[col.coeff(D ** m[0]) if m[0] else col.coeff(1) for col in columns] for m in powers]
        solutions = nullspace(rows, s + 1, params.domain)
        if not solutions:
            continue
        h_vec = echelon_by_last(solutions, params.domain)[-1]
        h = sum((R(c) * D ** j for j, c in enumerate(h_vec)), R.zero)
        M = DiffOp.x(-s, 1, params.domain) * _apply_poly_in_euler(h, params.domain)
        if not commutator(L, M).is_zero():
            logger.warning("rank witness of order %d failed the commutator check", s)
            continue
        witnesses.append((s, h))
        orders.append(s)
    r = 0
    for s in orders:
        r = gcd(r, s)
    logger.info("rank estimate %d from %d witnesses up to order %d", r, len(witnesses), order_bound)
    return RankWitness(r, tuple(witnesses), order_bound)


def _apply_poly_in_euler(h, domain):
    D = DiffOp.euler(domain)
    result = DiffOp.zero(domain)
    for (j,), c in h.terms():
        result = result + (D ** j) * c
    return result


def _euler_table(beta, s, domain):
    """Coefficients E_j(s) of t^(s+j) in prod(t + D - beta_i) t^s."""
    table = {s: domain.one}
    for b in beta:
        nxt = {}
        for power, c in table.items():
            nxt[power + 1] = nxt.get(power + 1, domain.zero) + c
            nxt[power] = nxt.get(power, domain.zero) + (power - b) * c
        table = nxt
    return {power - s: c for power, c in table.items()}


def bessel_wave_coeffs(params, prec):
    """c_k with Psi = e^(xz) (1 + sum_k c_k (xz)^-k), as a series in t = xz."""
    if not params.is_normalized():
        raise NotNormalized("wave coefficients need sum(beta) = N(N-1)/2")
    N = params.order
    dom = params.domain
    c = [dom.one]
    tables = {}
    for k in range(1, prec):
        acc = dom.zero
        for m in range(max(0, k - N + 1), k):
            if m not in tables:
                tables[m] = _euler_table(params.beta, -m, dom)
            e = tables[m].get(N - 1 - k + m)
            if e and c[m]:
                acc = acc + c[m] * e
        denominator = _euler_table(params.beta, -k, dom).get(N - 1, dom.zero)
        if not denominator:
            raise ResonantBeta("recursion denominator vanishes", index=k)
        c.append(-acc / denominator)
    return SeriesAtInfinity({-k: v for k, v in enumerate(c)}, -prec, dom)


def bessel_wave_operator(params, depth):
    """Exact wave operator with alpha_j = c_j x^-j."""
    coeffs = bessel_wave_coeffs(params, depth + 1)
    dom = params.domain
    terms = {-j: RationalFunction.monomial(-j, coeffs.coefficient(-j), dom) for j in range(depth + 1)}
    return WaveOperator(terms, -depth, dom)
