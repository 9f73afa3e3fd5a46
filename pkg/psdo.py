"""
Truncated pseudo-differential operators sum_j a_j(x) d^j.

Every operator records ``floor``: the lowest power of d whose coefficient is
known. ``floor=None`` marks an exact operator with finite support.
"""

import logging

import config
from diffop import DiffOp, as_coefficient, generalized_binomial, leibniz_product
from errors import (
    CoefficientNotVanishing,
    DepthExhausted,
    NonUnitLeadingCoefficient,
    NotNormalized,
    UnsupportedCoefficient,
)
from exactnum import LaurentPoly, RationalFunction, SeriesAtInfinity, unify_domains
from sympy.polys.domains import QQ

logger = logging.getLogger(__name__)


def _reciprocal(c):
    if isinstance(c, SeriesAtInfinity):
        return c.inverse()
    return RationalFunction.constant(1, c.domain) / c


class PsdOp:
    __slots__ = ("coefficients", "floor", "domain")

    def __init__(self, coefficients, floor=None, domain=None):
        kept = {}
        for j, c in coefficients.items():
            if floor is not None and j < floor:
                continue
            if isinstance(c, RationalFunction) and c.is_zero():
                continue
            kept[j] = c
        dom = unify_domains(domain, *(c.domain for c in kept.values()))
        self.coefficients = {j: c.convert(dom) for j, c in sorted(kept.items(), reverse=True)}
        self.floor = floor
        self.domain = dom

    @classmethod
    def from_diffop(cls, L):
        return cls(dict(enumerate(L.coefficients)), None, L.domain)

    @classmethod
    def coerce(cls, value, domain=QQ):
        if isinstance(value, PsdOp):
            return value
        if isinstance(value, DiffOp):
            return cls.from_diffop(value)
        return cls({0: as_coefficient(value, domain)}, None, domain)

    @classmethod
    def d_power(cls, j, domain=QQ):
        return cls({j: RationalFunction.constant(1, domain)}, None, domain)

    @classmethod
    def identity(cls, domain=QQ):
        return cls.d_power(0, domain)

    @property
    def top_order(self):
        powers = [j for j, c in self.coefficients.items() if not c.is_zero()]
        return max(powers) if powers else None

    @property
    def depth(self):
        if self.floor is None:
            return None
        return self.top_order - self.floor

    def is_zero(self):
        return self.top_order is None

    def coefficient(self, j):
        if self.floor is not None and j < self.floor:
            raise DepthExhausted("coefficient below the retained depth", power=j, floor=self.floor)
        return self.coefficients.get(j, RationalFunction.zero(self.domain))

    def leading_coefficient(self):
        return self.coefficients[self.top_order]

    def negative_part(self):
        return {j: c for j, c in self.coefficients.items() if j < 0}

    def strictly_pseudo_vanishes(self):
        return all(c.is_zero() for c in self.negative_part().values())

    def truncate(self, floor):
        """Forget powers below ``floor``."""
        new_floor = floor if self.floor is None else max(floor, self.floor)
        return PsdOp(self.coefficients, new_floor, self.domain)

    def map_coefficients(self, fn):
        return PsdOp({j: fn(c) for j, c in self.coefficients.items()}, self.floor, self.domain)

    # --- arithmetic ---

    def __add__(self, other):
        other = PsdOp.coerce(other, self.domain)
        floors = [f for f in (self.floor, other.floor) if f is not None]
        terms = dict(self.coefficients)
        for j, c in other.coefficients.items():
            terms[j] = terms[j] + c if j in terms else c
        return PsdOp(terms, max(floors) if floors else None, unify_domains(self.domain, other.domain))

    __radd__ = __add__

    def __neg__(self):
        return self.map_coefficients(lambda c: -c)

    def __sub__(self, other):
        return self + (-PsdOp.coerce(other, self.domain))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (PsdOp, DiffOp)):
            return psdo_mul(self, other)
        if isinstance(other, (RationalFunction, SeriesAtInfinity)):
            return psdo_mul(self, PsdOp.coerce(other, self.domain))
        return self.map_coefficients(lambda c: c * other)

    def __rmul__(self, other):
        if isinstance(other, DiffOp):
            return psdo_mul(other, self)
        return self.map_coefficients(lambda c: other * c)

    def __pow__(self, n):
        if n < 0:
            return psdo_invert(self) ** (-n)
        result = PsdOp.identity(self.domain)
        for _ in range(n):
            result = result * self
        return result

    def __repr__(self):
        from grammar import format_psdo
        return f"PsdOp({format_psdo(self)})"


class WaveOperator(PsdOp):
    """1 + sum_j alpha_j d^-j."""

    __slots__ = ()

    def alpha(self, j):
        return self.coefficient(-j)

    def decay_orders(self):
        """ord(alpha_j) for j = 1..depth, None where alpha_j vanishes to precision."""
        orders = []
        for j in range(1, self.depth + 1):
            a = self.alpha(j)
            orders.append(None if a.is_zero() else a.ord_at_infinity())
        return orders


def _product_floor(a, b, ta, tb):
    floors = []
    if a.floor is not None:
        floors.append(a.floor + tb)
    if b.floor is not None:
        floors.append(b.floor + ta)
    if floors:
        return max(floors)
    if any(j < 0 for j in a.coefficients):
        return ta + tb - config.DEPTH
    return None


def psdo_mul(a, b):
    """Product truncated to the surviving depth."""
    a, b = PsdOp.coerce(a), PsdOp.coerce(b)
    dom = unify_domains(a.domain, b.domain)
    if a.is_zero() or b.is_zero():
        return PsdOp({}, None, dom)
    ta, tb = a.top_order, b.top_order
    floor = _product_floor(a, b, ta, tb)
    terms = leibniz_product(a.coefficients, b.coefficients, floor)
    return PsdOp(terms, floor, dom)


def psdo_invert(a, depth=None):
    """Inverse; costs one unit of depth."""
    a = PsdOp.coerce(a)
    if a.is_zero():
        raise NonUnitLeadingCoefficient("zero operator has no inverse")
    t = a.top_order
    lead = a.leading_coefficient()
    if lead.is_zero():
        raise NonUnitLeadingCoefficient("leading coefficient vanishes to precision")
    if a.depth is None:
        target = depth if depth is not None else config.DEPTH
    else:
        target = a.depth - 1 if depth is None else min(depth, a.depth - 1)
    if target < 0:
        raise DepthExhausted("no depth left for the inverse", depth=a.depth)
    inv_lead = _reciprocal(lead)
    result = {-t: inv_lead}
    derivatives = {-t: [inv_lead]}
    for s in range(1, target + 1):
        acc = None
        for i, ai in a.coefficients.items():
            for j, cache in derivatives.items():
                l = i + j + s
                if l < 0 or (i >= 0 and l > i):
                    continue
                while len(cache) <= l:
                    cache.append(cache[-1].derivative())
                term = ai * cache[l] * generalized_binomial(i, l)
                acc = term if acc is None else acc + term
        b = -(acc * inv_lead) if acc is not None else RationalFunction.zero(a.domain)
        result[-t - s] = b
        derivatives[-t - s] = [b]
    logger.debug("inverted operator of order %d to depth %d", t, target)
    return PsdOp(result, -t - target, a.domain)


def psdo_root(A, k, depth):
    """Monic k-th root d^M + u_1 d^(M-1) + ... of a monic operator of order kM."""
    A = PsdOp.coerce(A)
    T = A.top_order
    if T % k:
        raise NotNormalized("order is not divisible by the root degree", order=T, degree=k)
    if not (A.leading_coefficient() - 1).is_zero():
        raise NotNormalized("operator must be monic")
    M = T // k
    dom = A.domain
    root = {M: RationalFunction.constant(1, dom)}
    for i in range(1, depth + 1):
        current = PsdOp(root, None, dom)
        power = current
        floor = T - i
        for _ in range(k - 1):
            power = PsdOp(leibniz_product(power.coefficients, current.coefficients, floor), floor, dom)
        c = power.coefficients.get(T - i)
        target = A.coefficient(T - i)
        u = target - c if c is not None else target
        root[M - i] = u * (dom.one / k)
    return PsdOp(root, M - depth, dom)


def nth_root(L, depth=None):
    """P = L^(1/N) = d + O(d^-1) for a normalized operator."""
    if not L.is_normalized():
        raise NotNormalized("operator must be monic with vanishing subleading coefficient")
    depth = config.DEPTH if depth is None else depth
    return psdo_root(L, L.order, depth)


def solve_wave_operator(L, prec=None, depth=None):
    """K = 1 + sum alpha_j d^-j with L K = K d^N, integration constants zero."""
    if not L.is_normalized():
        raise NotNormalized("operator must be monic with vanishing subleading coefficient")
    N = L.order
    depth = config.DEPTH if depth is None else depth
    prec = config.default_precision(N) if prec is None else prec
    dom = L.domain
    V = {}
    for k, v in enumerate(L.coefficients[:N - 1]):
        if v.is_zero():
            continue
        if v.ord_at_infinity() >= 0:
            raise CoefficientNotVanishing("coefficient does not vanish at infinity", power=k)
        V[k] = v.expand(-prec) if isinstance(v, RationalFunction) else v
    one = SeriesAtInfinity({0: dom.one}, -prec, dom)
    alphas = {0: one}
    derivatives = {0: [one]}

    def derivative(j, l):
        cache = derivatives[j]
        while len(cache) <= l:
            cache.append(cache[-1].derivative())
        return cache[l]

    for s in range(1, depth + 1):
        r = SeriesAtInfinity.zero(-prec, dom)
        for j in range(s):
            l = s + 1 - j
            if l <= N:
                r = r + derivative(j, l) * generalized_binomial(N, l)
            for k, v in V.items():
                l = k - j - N + 1 + s
                if 0 <= l <= k:
                    r = r + v * derivative(j, l) * generalized_binomial(k, l)
        alpha = (r * (dom.one / -N)).antiderivative()
        if not alpha.is_zero() and alpha.ord_at_infinity() > -1:
            raise CoefficientNotVanishing("wave coefficient does not decay", index=s)
        alphas[s] = alpha
        derivatives[s] = [alpha]
        logger.debug("alpha_%d known above x^%d", s, alpha.order)
    return WaveOperator({-j: a for j, a in alphas.items()}, -depth, dom)


def diff_part(P):
    """Drop all negative powers of d."""
    P = PsdOp.coerce(P)
    return DiffOp.from_dict({j: c for j, c in P.coefficients.items() if j >= 0}, P.domain)


def bispectral_b(P):
    """Anti-isomorphism x -> d_z, d_x -> z, applied to normal-ordered symbols.

    x^a d^j maps to z^j d_z^a. Series coefficients contribute their known
    terms only; their O-bound becomes the lowest known power of d_z.
    """
    P = PsdOp.coerce(P)
    dom = P.domain
    swapped = {}
    floors = []
    for j, c in P.coefficients.items():
        if isinstance(c, SeriesAtInfinity):
            terms = c.terms
            floors.append(c.order + 1)
        elif c.is_laurent():
            terms = c.to_laurent().terms
        else:
            raise UnsupportedCoefficient("coefficient is not a Laurent polynomial", power=j)
        for a, value in terms.items():
            swapped.setdefault(a, {})[j] = value
    z_order = P.floor - 1 if P.floor is not None else None
    result = {}
    for a, table in swapped.items():
        if z_order is None:
            result[a] = RationalFunction.from_laurent(LaurentPoly(table, dom))
        else:
            result[a] = SeriesAtInfinity(table, z_order, dom)
    floor = max(floors) if floors else None
    return PsdOp(result, floor, dom)


def conjugate_by_wave(K, P, depth=None):
    """K^-1 P K."""
    return psdo_invert(K, depth) * PsdOp.coerce(P, K.domain) * K


def bispectral_b1(K, P, depth=None):
    return bispectral_b(conjugate_by_wave(K, P, depth))
