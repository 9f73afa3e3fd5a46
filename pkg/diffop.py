"""
Ordinary differential operators sum_k V_k(x) d^k with exact rational or
truncated-series coefficients, plus the weight and indicial machinery.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from math import factorial

from sympy.functions.combinatorial.numbers import stirling
from sympy.polys.domains import QQ
from sympy.polys.rings import ring

from errors import (
    CoefficientNotVanishing,
    GrowingCoefficient,
    NonMonicDivisor,
    NotNormalized,
    PrecisionUnderflow,
    UnsupportedCoefficient,
    UnsupportedFieldSplit,
    ZeroOperator,
)
from exactnum import (
    LaurentPoly,
    LogFunction,
    RationalFunction,
    SeriesAtInfinity,
    is_integer_scalar,
    is_scalar,
    rational_field,
    scalar_key,
    to_rational,
    unify_domains,
)

logger = logging.getLogger(__name__)


def generalized_binomial(i, l):
    """C(i, l) for any integer i and l >= 0."""
    num = 1
    for t in range(l):
        num *= i - t
    return num // factorial(l)


def as_coefficient(value, domain=QQ):
    """Wrap scalars and Laurent polynomials as rational-function coefficients."""
    if isinstance(value, (RationalFunction, SeriesAtInfinity)):
        return value
    if isinstance(value, LaurentPoly):
        return RationalFunction.from_laurent(value)
    return RationalFunction.constant(value, domain)


def shift_coefficient(c, k):
    """Multiply a coefficient by x^k."""
    if isinstance(c, SeriesAtInfinity):
        return c.shift(k)
    return c * RationalFunction.monomial(k, 1, c.domain)


def _accumulate(acc, power, term):
    acc[power] = acc[power] + term if power in acc else term


def leibniz_product(left, right, floor=None):
    """Normal-ordered product of {power: coefficient} maps.

    (a d^i)(b d^j) = sum_l C(i, l) a b^(l) d^(i+j-l); powers below ``floor``
    are dropped, which is required when ``left`` has negative powers.
    """
    derivatives = {}
    result = {}
    for i, a in left.items():
        if a.is_zero():
            continue
        for j, b in right.items():
            top = i + j
            max_l = top - floor if floor is not None else i
            if i >= 0:
                max_l = min(max_l, i)
            cache = derivatives.setdefault(j, [b])
            for l in range(max_l + 1):
                while len(cache) <= l:
                    cache.append(cache[-1].derivative())
                bl = cache[l]
                if bl.is_zero() and not isinstance(bl, SeriesAtInfinity):
                    break
                _accumulate(result, top - l, a * bl * generalized_binomial(i, l))
    return result


class DiffOp:
    """Differential operator; ``coefficients[k]`` multiplies d^k."""

    __slots__ = ("coefficients", "domain")

    def __init__(self, coefficients, domain=None):
        coeffs = list(coefficients)
        while coeffs and coeffs[-1].is_zero():
            coeffs.pop()
        dom = unify_domains(domain, *(c.domain for c in coeffs))
        self.coefficients = tuple(c.convert(dom) for c in coeffs)
        self.domain = dom

    # --- constructors ---

    @classmethod
    def from_dict(cls, terms, domain=QQ):
        if not terms:
            return cls((), domain)
        values = {k: as_coefficient(v, domain) for k, v in terms.items()}
        dom = unify_domains(domain, *(v.domain for v in values.values()))
        series = [v for v in values.values() if isinstance(v, SeriesAtInfinity)]
        if series:
            zero = SeriesAtInfinity.zero(min(s.order for s in series), dom)
        else:
            zero = RationalFunction.zero(dom)
        top = max(values)
        if min(values) < 0:
            raise ValueError("differential operators have no negative powers of d")
        return cls([values.get(k, zero) for k in range(top + 1)], dom)

    @classmethod
    def zero(cls, domain=QQ):
        return cls((), domain)

    @classmethod
    def identity(cls, domain=QQ):
        return cls.from_dict({0: 1}, domain)

    @classmethod
    def d(cls, power=1, domain=QQ):
        return cls.from_dict({power: 1}, domain)

    @classmethod
    def x(cls, exponent=1, coefficient=1, domain=QQ):
        return cls.from_dict({0: RationalFunction.monomial(exponent, coefficient, domain)}, domain)

    @classmethod
    def euler(cls, domain=QQ):
        """D = x d."""
        return cls.from_dict({1: RationalFunction.monomial(1, 1, domain)}, domain)

    @classmethod
    def function(cls, value, domain=QQ):
        return cls.from_dict({0: value}, domain)

    # --- structure ---

    @property
    def order(self):
        if not self.coefficients:
            raise ZeroOperator("order of the zero operator")
        return len(self.coefficients) - 1

    def is_zero(self):
        return not self.coefficients

    @property
    def is_series(self):
        return any(isinstance(c, SeriesAtInfinity) for c in self.coefficients)

    def coefficient(self, k):
        if 0 <= k < len(self.coefficients):
            return self.coefficients[k]
        return RationalFunction.zero(self.domain)

    def leading_coefficient(self):
        return self.coefficients[self.order]

    def items(self):
        return {k: c for k, c in enumerate(self.coefficients) if not c.is_zero()}

    def is_monic(self):
        return bool(self.coefficients) and (self.leading_coefficient() - 1).is_zero()

    def is_normalized(self):
        """Monic with vanishing subleading coefficient."""
        return self.is_monic() and (self.order == 0 or self.coefficients[self.order - 1].is_zero())

    def convert(self, domain):
        return DiffOp([c.convert(domain) for c in self.coefficients], domain)

    def expand(self, order):
        """Promote rational coefficients to series known above x^order."""
        return DiffOp(
            [c.expand(order) if isinstance(c, RationalFunction) else c for c in self.coefficients],
            self.domain,
        )

    def map_coefficients(self, fn):
        return DiffOp([fn(c) for c in self.coefficients], self.domain)

    # --- arithmetic ---

    def _as_op(self, other):
        if isinstance(other, DiffOp):
            return other
        return DiffOp.function(other, self.domain)

    def __add__(self, other):
        other = self._as_op(other)
        n = max(len(self.coefficients), len(other.coefficients))
        coeffs = []
        for k in range(n):
            if k >= len(self.coefficients):
                coeffs.append(other.coefficients[k])
            elif k >= len(other.coefficients):
                coeffs.append(self.coefficients[k])
            else:
                coeffs.append(self.coefficients[k] + other.coefficients[k])
        return DiffOp(coeffs, unify_domains(self.domain, other.domain))

    __radd__ = __add__

    def __neg__(self):
        return DiffOp([-c for c in self.coefficients], self.domain)

    def __sub__(self, other):
        return self + (-self._as_op(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, DiffOp):
            if isinstance(other, (RationalFunction, SeriesAtInfinity, LaurentPoly)):
                other = DiffOp.function(other, self.domain)
            elif is_scalar(other):
                return DiffOp([c * other for c in self.coefficients], self.domain)
            else:
                return NotImplemented
        return dop_mul(self, other)

    def __rmul__(self, other):
        if not (is_scalar(other) or isinstance(other, (RationalFunction, SeriesAtInfinity, LaurentPoly))):
            return NotImplemented
        if isinstance(other, LaurentPoly):
            other = RationalFunction.from_laurent(other)
        return DiffOp([other * c for c in self.coefficients], self.domain)

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative powers of differential operators are pseudo-differential")
        result = DiffOp.identity(self.domain)
        for _ in range(n):
            result = result * self
        return result

    def __eq__(self, other):
        if not isinstance(other, DiffOp):
            other = DiffOp.function(other, self.domain)
        return (self - other).is_zero()

    __hash__ = None

    def __repr__(self):
        from grammar import format_operator
        return f"DiffOp({format_operator(self)})"

    def __str__(self):
        from grammar import format_operator
        return format_operator(self)

    # --- D-form ---

    def d_form(self):
        """Coefficients W_j with L = sum_j W_j D^j, using d^k = x^-k sum_j s(k,j) D^j."""
        result = {}
        for k, v in enumerate(self.coefficients):
            if v.is_zero():
                continue
            shifted = shift_coefficient(v, -k)
            for j in range(k + 1):
                s = int(stirling(k, j, kind=1, signed=True))
                if s:
                    _accumulate(result, j, shifted * s)
        return {j: w for j, w in result.items() if not w.is_zero()}


def dop_mul(a, b):
    """Product of differential operators by normal ordering."""
    if a.is_zero() or b.is_zero():
        return DiffOp.zero(unify_domains(a.domain, b.domain))
    terms = leibniz_product(dict(enumerate(a.coefficients)), dict(enumerate(b.coefficients)))
    top = a.order + b.order
    product = DiffOp.from_dict(terms, unify_domains(a.domain, b.domain))
    if product.is_zero() or product.order < top:
        raise PrecisionUnderflow(
            "leading coefficient lost all retained terms", expected_order=top
        )
    return product


def commutator(a, b):
    return a * b - b * a


def ad_power(L, X, i):
    """(ad L)^i X."""
    result = X
    for _ in range(i):
        if result.is_zero():
            break
        result = commutator(L, result)
    return result


# --- weight gradings ---

class AssociatedPolynomial:
    """Bivariate polynomial sum c * X^a * Y^b with Laurent X-exponents."""

    __slots__ = ("terms",)

    def __init__(self, terms):
        self.terms = {k: c for k, c in terms.items() if c}

    def __mul__(self, other):
        terms = {}
        for (a1, b1), c1 in self.terms.items():
            for (a2, b2), c2 in other.terms.items():
                key = (a1 + a2, b1 + b2)
                terms[key] = terms[key] + c1 * c2 if key in terms else c1 * c2
        return AssociatedPolynomial(terms)

    def __eq__(self, other):
        if not isinstance(other, AssociatedPolynomial):
            return NotImplemented
        keys = set(self.terms) | set(other.terms)
        return all(not (self.terms.get(k, 0) - other.terms.get(k, 0)) for k in keys)

    __hash__ = None

    def __repr__(self):
        return " + ".join(f"{c}*X^{a}*Y^{b}" for (a, b), c in sorted(self.terms.items(), reverse=True))


@dataclass(frozen=True, eq=False)
class GradedProfile:
    rho: int
    sigma: int
    order_v: int
    assoc_poly: AssociatedPolynomial


def _require_bounded(L):
    for k, v in L.items().items():
        if v.ord_at_infinity() > 0:
            raise GrowingCoefficient(
                "coefficient grows at infinity", power=k, order=v.ord_at_infinity()
            )


def graded_profile(L, rho, sigma):
    """(rho, sigma)-order and associated polynomial."""
    if rho + sigma <= 0:
        raise ValueError("rho + sigma must be positive")
    if L.is_zero():
        raise ZeroOperator("graded profile of the zero operator")
    _require_bounded(L)
    weights = {k: rho * v.ord_at_infinity() + sigma * k for k, v in L.items().items()}
    top = max(weights.values())
    assoc = AssociatedPolynomial(
        {
            (L.coefficients[k].ord_at_infinity(), k): L.coefficients[k].leading_coefficient()
            for k, w in weights.items()
            if w == top
        }
    )
    return GradedProfile(rho, sigma, top, assoc)


# --- indicial data ---

@lru_cache(maxsize=None)
def indicial_ring(domain):
    return ring("D", domain)


@dataclass(frozen=True, eq=False)
class RootClass:
    """Roots {alpha + k : factor(alpha) = 0, k in offsets} of one class modulo the integers."""

    factor: object
    offsets: tuple

    @property
    def degree(self):
        return self.factor.degree()

    @property
    def span(self):
        return max(self.offsets) - min(self.offsets)

    @property
    def min_offset(self):
        return min(self.offsets)

    def multiplicity(self, offset):
        return self.offsets.count(offset)

    def factor_coefficients(self):
        """Dense coefficients, highest degree first."""
        return list(self.factor.to_dense())

    def base_root(self):
        """The root alpha of a linear factor."""
        if self.degree != 1:
            raise UnsupportedFieldSplit("class factor has degree above one", degree=self.degree)
        return -self.factor.coeff(1)

    def roots(self):
        alpha = self.base_root()
        return [alpha + k for k in self.offsets]

    def sort_key(self):
        coeffs = [c for _, c in sorted(((m[0], c) for m, c in self.factor.terms()), reverse=True)]
        return (self.degree, tuple(scalar_key(c) for c in coeffs), self.min_offset)


@dataclass(frozen=True, eq=False)
class IndicialData:
    weight: int
    indicial_poly: object
    classes: tuple

    def roots(self):
        """Flat sorted root multiset; only for classes with linear factors."""
        result = []
        for cls in self.classes:
            result.extend(cls.roots())
        return sorted(result, key=scalar_key)

    def class_of(self, root):
        for cls in self.classes:
            if cls.degree == 1:
                k = root - cls.base_root()
                if is_integer_scalar(k) and int(QQ.numer(to_rational(k))) in cls.offsets:
                    return cls
        return None


def _integer_shift(g, h):
    """k with h(l) = g(l - k), or None."""
    if g.degree() != h.degree():
        return None
    d = g.degree()
    gen = g.ring.gens[0]
    g1 = g.coeff(gen ** (d - 1))
    h1 = h.coeff(gen ** (d - 1))
    k = (g1 - h1) / d
    if not is_integer_scalar(k):
        return None
    k = int(QQ.numer(to_rational(k)))
    if g.compose(gen, gen - k) == h:
        return k
    return None


def group_root_classes(poly):
    """Split a polynomial in D into classes of roots differing by integers."""
    _, factors = poly.factor_list()
    monic = [(f.monic(), m) for f, m in factors if f.degree() > 0]
    groups = []
    for f, m in sorted(monic, key=lambda fm: [scalar_key(c) for _, c in sorted(fm[0].terms(), reverse=True)]):
        for group in groups:
            base = group[0][0]
            k = _integer_shift(base, f)
            if k is not None:
                group.append((f, m, k))
                break
        else:
            groups.append([(f, m, 0)])
    classes = []
    for group in groups:
        low = min(k for _, _, k in group)
        base = next(f for f, _, k in group if k == low)
        offsets = []
        for _, m, k in group:
            offsets.extend([k - low] * m)
        classes.append(RootClass(base, tuple(sorted(offsets))))
    classes.sort(key=RootClass.sort_key)
    return tuple(classes)


def indicial_data(L, split=False):
    """Weight, indicial polynomial in D and its classes of roots modulo the integers."""
    if L.is_zero():
        raise ZeroOperator("indicial data of the zero operator")
    _require_bounded(L)
    W = L.d_form()
    weight = max(w.ord_at_infinity() for w in W.values())
    R, D = indicial_ring(L.domain)
    poly = R.zero
    for j, w in W.items():
        if w.ord_at_infinity() == weight:
            poly += R(w.leading_coefficient()) * D ** j
    classes = group_root_classes(poly)
    if split and L.domain != QQ and any(c.degree > 1 for c in classes):
        raise UnsupportedFieldSplit("an irreducible indicial factor needs a second extension")
    logger.debug("indicial polynomial %s with weight %d, %d classes", poly, weight, len(classes))
    return IndicialData(weight, poly, classes)


# --- regularity ---

@dataclass(frozen=True)
class PrincipalLevel:
    level: object
    fuchsian_at_infinity: bool
    rho: int = None
    sigma: int = None


def principal_level(L):
    """r = max(1, max_k(2 + ord(V_{N-k})/k)) for a normalized operator."""
    if not L.is_normalized():
        raise NotNormalized("operator must be monic with vanishing subleading coefficient")
    N = L.order
    level = QQ.one
    for k in range(2, N + 1):
        v = L.coefficients[N - k]
        if v.is_zero():
            continue
        o = v.ord_at_infinity()
        if o >= 0:
            raise CoefficientNotVanishing("coefficient does not vanish at infinity", power=N - k, order=o)
        level = max(level, 2 + QQ(o, k))
    if level == 1:
        return PrincipalLevel(level, True)
    rho = int(QQ.denom(level))
    return PrincipalLevel(level, False, rho, int(QQ.numer(level)) - 2 * rho)


@dataclass(frozen=True)
class SingularPoint:
    factor: str
    pole_orders: tuple
    regular: bool


@dataclass(frozen=True)
class FuchsianReport:
    points: tuple
    infinity_regular: bool

    @property
    def fuchsian(self):
        return self.infinity_regular and all(p.regular for p in self.points)


def _require_rational(L):
    if L.is_series:
        raise UnsupportedCoefficient("operation needs rational coefficients")


def fuchsian_everywhere(L):
    """Pole-order test at every finite singular point plus the test at infinity."""
    _require_rational(L)
    N = L.order
    lead = L.leading_coefficient()
    poles = {}
    infinity_regular = True
    for k in range(N):
        w = L.coefficients[k] / lead
        if w.is_zero():
            continue
        if w.ord_at_infinity() > -(N - k):
            infinity_regular = False
        _, factors = w.frac.denom.factor_list()
        for f, m in factors:
            if f.degree() <= 0:
                continue
            key = str(f.monic()).replace("**", "^")
            poles.setdefault(key, []).append((N - k, m))
    # zeros of the leading coefficient are singular too
    _, lead_factors = lead.frac.numer.factor_list()
    for f, _ in lead_factors:
        if f.degree() > 0:
            poles.setdefault(str(f.monic()).replace("**", "^"), [])
    points = tuple(
        SingularPoint(key, tuple(m for _, m in entries), all(m <= i for i, m in entries))
        for key, entries in sorted(poles.items())
    )
    return FuchsianReport(points, infinity_regular)


# --- division ---

def right_divide(Q, L):
    """Q = Q1 * L + q with order(q) < order(L)."""
    if L.is_zero() or L.order < 1 or not L.is_monic():
        raise NonMonicDivisor("divisor must be monic of positive order")
    N = L.order
    quotient = DiffOp.zero(unify_domains(Q.domain, L.domain))
    remainder = Q
    while not remainder.is_zero() and remainder.order >= N:
        k = remainder.order - N
        c = remainder.leading_coefficient()
        term = DiffOp.from_dict({k: c}, remainder.domain)
        quotient = quotient + term
        step = term * L
        remainder = DiffOp(
            [remainder.coefficient(i) - step.coefficient(i) for i in range(remainder.order)],
            remainder.domain,
        )
    return quotient, remainder


# --- applying operators to functions ---

def apply_to_log(L, f):
    """L f for Laurent-polynomial coefficients."""
    result = LogFunction.zero(unify_domains(L.domain, f.domain))
    derivative = f
    for k, v in enumerate(L.coefficients):
        if k:
            derivative = derivative.derivative()
        if v.is_zero():
            continue
        if isinstance(v, SeriesAtInfinity) or not v.is_laurent():
            raise UnsupportedCoefficient("coefficient is not a Laurent polynomial", power=k)
        result = result + derivative.mul_laurent(v.to_laurent())
    return result


def clear_denominators(L):
    """Polynomial-coefficient operator c(x) L with c the lcm of the denominators."""
    _require_rational(L)
    if L.is_zero():
        return L
    den = None
    for v in L.coefficients:
        if v.is_zero():
            continue
        den = v.frac.denom if den is None else den.lcm(v.frac.denom)
    F, _ = rational_field(L.domain)
    return L.map_coefficients(lambda c: c * RationalFunction(F.new(den), L.domain))


def annihilates(L, f):
    """True when L f = 0 exactly."""
    return apply_to_log(clear_denominators(L), f).is_zero()


def coefficient_support_ok(v, residue, r):
    """Every exponent of v is congruent to ``residue`` modulo r."""
    if v.is_zero():
        return True
    if isinstance(v, SeriesAtInfinity):
        return all((e - residue) % r == 0 for e in v.support())
    num, den = v.numerator.terms, v.denominator.terms
    cn = {e % r for e in num}
    cd = {e % r for e in den}
    if len(cn) != 1 or len(cd) != 1:
        return False
    return (cn.pop() - cd.pop() - residue) % r == 0


def is_zr_invariant(L, r):
    """Coefficient of d^k only has exponents congruent to -(N - k) modulo r."""
    N = L.order
    return all(coefficient_support_ok(v, -(N - k), r) for k, v in enumerate(L.coefficients))
