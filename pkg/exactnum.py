"""
Exact scalar and coefficient arithmetic.

Scalars are sympy domain elements: ``QQ`` elements or elements of a single
simple extension ``QQ.algebraic_field(alpha)``. Zero tests always go through
``bool(c)`` because extension elements do not compare equal to Python ints.
"""

import logging
from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from math import gcd, comb

from sympy import CRootOf, Poly, Symbol, sympify
from sympy.polys.domains import QQ
from sympy.polys.fields import field as fraction_field
from sympy.polys.matrices import DomainMatrix
from sympy.polys.polyclasses import ANP

from errors import (
    IntegrationObstruction,
    PrecisionUnderflow,
    ReducibleMinimalPolynomial,
    UnsupportedFieldSplit,
    ZeroArgument,
)

logger = logging.getLogger(__name__)


# --- Scalars ---

def unify_domains(*domains):
    """QQ plus one extension gives the extension; two extensions are rejected."""
    result = QQ
    for dom in domains:
        if dom is None or dom == QQ:
            continue
        if result == QQ:
            result = dom
        elif result != dom:
            raise UnsupportedFieldSplit(
                "only one algebraic extension may be active", first=result, second=dom
            )
    return result


def scalar(value, domain=QQ):
    """Convert ints, strings "p/q" and domain elements into ``domain``."""
    if isinstance(value, str):
        value = QQ.from_sympy(sympify(value))
    return domain.convert(value)


def to_rational(c):
    """Rational scalar as a QQ element; extension elements must be constant."""
    if isinstance(c, ANP):
        rep = c.rep
        if len(rep) > 1:
            raise ValueError(f"{c} is not rational")
        return QQ.convert(rep[0]) if rep else QQ.zero
    return QQ.convert(c)


def is_rational_scalar(c):
    return not isinstance(c, ANP) or len(c.rep) <= 1


def is_integer_scalar(c):
    if not is_rational_scalar(c):
        return False
    return QQ.denom(to_rational(c)) == 1


def split_integer(c):
    """Return (n, rest) with c = n + rest and rest canonical modulo the integers."""
    if isinstance(c, ANP):
        rep = c.rep
        constant = to_rational(rep[-1]) if rep else QQ.zero
    else:
        constant = to_rational(c)
    n = int(QQ.numer(constant) // QQ.denom(constant))
    return n, c - n


def scalar_key(c):
    """Total order on scalars used for deterministic tie-breaks."""
    if isinstance(c, ANP):
        degree = len(c.mod) - 1
        rep = [to_rational(a) for a in c.rep]
        return tuple([QQ.zero] * (degree - len(rep)) + rep)
    return (to_rational(c),)


def format_scalar(c):
    """Exact text form: "p/q" for rationals, "(c0 + c1*a)/q" for extension elements."""
    if is_rational_scalar(c):
        q = to_rational(c)
        num, den = QQ.numer(q), QQ.denom(q)
        return str(num) if den == 1 else f"{num}/{den}"
    coeffs = [to_rational(a) for a in reversed(c.rep)]
    den = 1
    for a in coeffs:
        d = int(QQ.denom(a))
        den = den * d // gcd(den, d)
    parts = []
    for power, a in enumerate(coeffs):
        num = int(QQ.numer(a * den))
        if num == 0:
            continue
        mono = "" if power == 0 else ("a" if power == 1 else f"a^{power}")
        if not mono:
            body = str(abs(num))
        elif abs(num) == 1:
            body = mono
        else:
            body = f"{abs(num)}*{mono}"
        if not parts:
            parts.append(("-" if num < 0 else "") + body)
        else:
            parts.append(("- " if num < 0 else "+ ") + body)
    text = "(" + " ".join(parts) + ")"
    return text if den == 1 else f"{text}/{den}"


# --- Number fields ---

@dataclass(frozen=True)
class NumberField:
    minimal_polynomial: tuple
    domain: object

    @property
    def degree(self):
        return len(self.minimal_polynomial) - 1

    @property
    def is_rational(self):
        return self.degree == 1

    @property
    def generator(self):
        if self.is_rational:
            return -scalar(self.minimal_polynomial[1], self.domain)
        return self.domain.unit

    def element(self, coefficients):
        """Element from ascending coefficients in the generator."""
        value = self.domain.zero
        power = self.domain.one
        for c in coefficients:
            value = value + scalar(c, self.domain) * power
            power = power * self.generator
        return value

    def describe(self):
        terms = []
        for power, c in zip(range(self.degree, -1, -1), self.minimal_polynomial):
            if c:
                terms.append(f"{format_scalar(c)}*a^{power}")
        return " + ".join(terms)


RATIONALS = NumberField((QQ.one, QQ.zero), QQ)


def field_extend(minpoly):
    """Return the simple extension defined by a monic irreducible polynomial.

    ``minpoly`` is either a sequence of rational coefficients (highest degree
    first) or polynomial text in one variable such as ``"a^2 - 2"``.
    """
    if isinstance(minpoly, str):
        expr = sympify(minpoly.replace("^", "**"))
        symbols = sorted(expr.free_symbols, key=str)
        if len(symbols) > 1:
            raise ReducibleMinimalPolynomial("minimal polynomial must be univariate", text=minpoly)
        var = symbols[0] if symbols else Symbol("a")
        poly = Poly(expr, var, domain=QQ)
    else:
        poly = Poly([scalar(c) for c in minpoly], Symbol("a"), domain=QQ)
    if poly.degree() < 1:
        raise ReducibleMinimalPolynomial("minimal polynomial must have degree at least 1")
    poly = poly.monic()
    coefficients = tuple(QQ.from_sympy(c) for c in poly.all_coeffs())
    if poly.degree() == 1:
        return NumberField(coefficients, QQ)
    if not poly.is_irreducible:
        _, factors = poly.factor_list()
        raise ReducibleMinimalPolynomial(
            "minimal polynomial factors over QQ",
            factors=", ".join(str(f.as_expr()) for f, _ in factors),
        )
    domain = QQ.algebraic_field(CRootOf(poly, 0))
    logger.debug("extension field of degree %d: %s", poly.degree(), domain)
    return NumberField(coefficients, domain)


# --- Laurent polynomials ---

def _clean(terms):
    return {e: c for e, c in terms.items() if c}


@dataclass(frozen=True, eq=False)
class LaurentPoly:
    terms: dict
    domain: object = QQ

    @classmethod
    def from_dict(cls, terms, domain=QQ):
        return cls(_clean({int(e): scalar(c, domain) for e, c in terms.items()}), domain)

    @classmethod
    def monomial(cls, exponent, coefficient=1, domain=QQ):
        return cls.from_dict({exponent: scalar(coefficient, domain)}, domain)

    @classmethod
    def zero(cls, domain=QQ):
        return cls({}, domain)

    def is_zero(self):
        return not self.terms

    @property
    def degree(self):
        if not self.terms:
            raise ZeroArgument("degree of the zero Laurent polynomial")
        return max(self.terms)

    @property
    def low_degree(self):
        if not self.terms:
            raise ZeroArgument("low degree of the zero Laurent polynomial")
        return min(self.terms)

    def leading_coefficient(self):
        return self.terms[self.degree]

    def coefficient(self, exponent):
        return self.terms.get(exponent, self.domain.zero)

    def convert(self, domain):
        if domain == self.domain:
            return self
        return LaurentPoly({e: domain.convert(c) for e, c in self.terms.items()}, domain)

    def _unified(self, other):
        dom = unify_domains(self.domain, other.domain)
        return self.convert(dom), other.convert(dom), dom

    def __add__(self, other):
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly.monomial(0, other, self.domain) if other else LaurentPoly.zero(self.domain)
        a, b, dom = self._unified(other)
        terms = dict(a.terms)
        for e, c in b.terms.items():
            terms[e] = terms.get(e, dom.zero) + c
        return LaurentPoly(_clean(terms), dom)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly({e: -c for e, c in self.terms.items()}, self.domain)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, LaurentPoly):
            c = scalar(other, self.domain) if not isinstance(other, ANP) else other
            if isinstance(other, ANP) and self.domain == QQ:
                raise UnsupportedFieldSplit("mixing an extension scalar into a rational polynomial")
            return LaurentPoly(_clean({e: v * c for e, v in self.terms.items()}), self.domain)
        a, b, dom = self._unified(other)
        terms = {}
        for e1, c1 in a.terms.items():
            for e2, c2 in b.terms.items():
                terms[e1 + e2] = terms.get(e1 + e2, dom.zero) + c1 * c2
        return LaurentPoly(_clean(terms), dom)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return not (self - other).terms

    def shift(self, k):
        """Multiply by x^k."""
        return LaurentPoly({e + k: c for e, c in self.terms.items()}, self.domain)

    def derivative(self):
        return LaurentPoly(_clean({e - 1: c * e for e, c in self.terms.items() if e}), self.domain)

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{format_scalar(c)}*x^{e}" for e, c in sorted(self.terms.items(), reverse=True))


# --- Truncated series at infinity ---

class SeriesAtInfinity:
    """x-expansion at infinity with known terms above ``order``.

    Exponents <= ``order`` are unknown (the O-term). A series without known
    terms is zero to precision.
    """

    __slots__ = ("terms", "order", "domain")

    def __init__(self, terms, order, domain=QQ):
        self.terms = {e: c for e, c in terms.items() if c and e > order}
        self.order = order
        self.domain = domain

    @classmethod
    def from_laurent(cls, poly, order):
        return cls(dict(poly.terms), order, poly.domain)

    @classmethod
    def zero(cls, order, domain=QQ):
        return cls({}, order, domain)

    def is_zero(self):
        return not self.terms

    @property
    def leading_exponent(self):
        if not self.terms:
            return None
        return max(self.terms)

    @property
    def top(self):
        """Leading exponent, or the O-bound when nothing is known."""
        return max(self.terms) if self.terms else self.order

    @property
    def step(self):
        lead = self.leading_exponent
        if lead is None:
            return 1
        s = 0
        for e in self.terms:
            s = gcd(s, lead - e)
        return s or 1

    @property
    def precision(self):
        """Number of retained slots from the leading exponent down to the O-term."""
        return (self.top - self.order) // self.step

    @property
    def coefficients(self):
        lead, s = self.top, self.step
        return [self.terms.get(lead - k * s, self.domain.zero) for k in range(self.precision)]

    def ord_at_infinity(self):
        if not self.terms:
            raise ZeroArgument("series is zero to precision", order=self.order)
        return max(self.terms)

    def leading_coefficient(self):
        return self.terms[self.ord_at_infinity()]

    def coefficient(self, exponent):
        if exponent <= self.order:
            raise PrecisionUnderflow("coefficient below the retained precision", exponent=exponent)
        return self.terms.get(exponent, self.domain.zero)

    def convert(self, domain):
        if domain == self.domain:
            return self
        return SeriesAtInfinity({e: domain.convert(c) for e, c in self.terms.items()}, self.order, domain)

    def truncate(self, order):
        """Forget terms at or below ``order``."""
        return SeriesAtInfinity(self.terms, max(order, self.order), self.domain)

    def to_laurent(self):
        return LaurentPoly(dict(self.terms), self.domain)

    def expand(self, order):
        return self.truncate(order)

    def support(self):
        return set(self.terms)

    def _promote(self, other, for_product):
        if isinstance(other, SeriesAtInfinity):
            dom = unify_domains(self.domain, other.domain)
            return self.convert(dom), other.convert(dom)
        if isinstance(other, RationalFunction):
            dom = unify_domains(self.domain, other.domain)
            if for_product:
                if other.is_zero():
                    return self.convert(dom), SeriesAtInfinity.zero(self.order, dom)
                r = other.ord_at_infinity()
                return self.convert(dom), other.convert(dom).expand(self.order + r - self.top)
            return self.convert(dom), other.convert(dom).expand(self.order)
        return None, None

    def __add__(self, other):
        if not isinstance(other, (SeriesAtInfinity, RationalFunction)):
            return self + SeriesAtInfinity({0: scalar(other, self.domain)}, self.order, self.domain)
        a, b = self._promote(other, False)
        terms = dict(a.terms)
        for e, c in b.terms.items():
            terms[e] = terms.get(e, a.domain.zero) + c
        return SeriesAtInfinity(terms, max(a.order, b.order), a.domain)

    __radd__ = __add__

    def __neg__(self):
        return SeriesAtInfinity({e: -c for e, c in self.terms.items()}, self.order, self.domain)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, (SeriesAtInfinity, RationalFunction)):
            dom = self.domain
            if isinstance(other, ANP) and dom == QQ:
                raise UnsupportedFieldSplit("mixing an extension scalar into a rational series")
            c = other if isinstance(other, ANP) else scalar(other, dom)
            return SeriesAtInfinity({e: v * c for e, v in self.terms.items()}, self.order, dom)
        a, b = self._promote(other, True)
        order = max(a.order + b.top, b.order + a.top)
        terms = {}
        for e1, c1 in a.terms.items():
            for e2, c2 in b.terms.items():
                if e1 + e2 > order:
                    terms[e1 + e2] = terms.get(e1 + e2, a.domain.zero) + c1 * c2
        return SeriesAtInfinity(terms, order, a.domain)

    __rmul__ = __mul__

    def shift(self, k):
        return SeriesAtInfinity({e + k: c for e, c in self.terms.items()}, self.order + k, self.domain)

    def derivative(self):
        return SeriesAtInfinity({e - 1: c * e for e, c in self.terms.items() if e}, self.order - 1, self.domain)

    def antiderivative(self):
        """Term-wise antiderivative with zero constant of integration."""
        if -1 in self.terms:
            raise IntegrationObstruction("antiderivative of x^-1 needs a logarithm")
        return SeriesAtInfinity(
            {e + 1: c / (e + 1) for e, c in self.terms.items()}, self.order + 1, self.domain
        )

    def inverse(self):
        if not self.terms:
            raise ZeroArgument("cannot invert a series that is zero to precision")
        e = self.leading_exponent
        a0 = self.terms[e]
        count = e - self.order
        b = [self.domain.one / a0]
        for n in range(1, count):
            acc = self.domain.zero
            for i in range(1, n + 1):
                ai = self.terms.get(e - i)
                if ai:
                    acc = acc + ai * b[n - i]
            b.append(-acc / a0)
        return SeriesAtInfinity({-e - k: c for k, c in enumerate(b)}, self.order - 2 * e, self.domain)

    def __truediv__(self, other):
        if isinstance(other, RationalFunction):
            other = other.expand(self.order - self.top + other.ord_at_infinity() - 1)
        if isinstance(other, SeriesAtInfinity):
            return self * other.inverse()
        return self * (self.domain.one / scalar(other, self.domain))

    def agrees_with(self, other):
        """Equality on the common window of known terms."""
        return (self - other).is_zero()

    def __eq__(self, other):
        if isinstance(other, SeriesAtInfinity):
            return self.order == other.order and (self - other).is_zero()
        return NotImplemented

    __hash__ = None

    def __repr__(self):
        body = " + ".join(f"{format_scalar(c)}*x^{e}" for e, c in sorted(self.terms.items(), reverse=True))
        return f"{body or '0'} + O(x^{self.order})"


# --- Rational functions ---

@lru_cache(maxsize=None)
def rational_field(domain):
    """Cached fraction field K(x) and its generator."""
    return fraction_field("x", domain)


class RationalFunction:
    """Exact rational function of x backed by a sympy fraction-field element."""

    __slots__ = ("frac", "domain")

    def __init__(self, frac, domain=QQ):
        self.frac = frac
        self.domain = domain

    @classmethod
    def from_laurent(cls, poly):
        F, x = rational_field(poly.domain)
        value = F.zero
        for e, c in poly.terms.items():
            value = value + F(c) * x ** e
        return cls(value, poly.domain)

    @classmethod
    def from_polys(cls, numerator, denominator, domain=QQ):
        """From LaurentPoly or dict numerator and denominator."""
        if isinstance(numerator, dict):
            numerator = LaurentPoly.from_dict(numerator, domain)
        if isinstance(denominator, dict):
            denominator = LaurentPoly.from_dict(denominator, domain)
        if denominator.is_zero():
            raise ZeroArgument("zero denominator")
        num = cls.from_laurent(numerator.convert(domain))
        den = cls.from_laurent(denominator.convert(domain))
        return cls(num.frac / den.frac, domain)

    @classmethod
    def constant(cls, c, domain=QQ):
        F, _ = rational_field(domain)
        return cls(F(scalar(c, domain) if not isinstance(c, ANP) else c), domain)

    @classmethod
    def monomial(cls, exponent, coefficient=1, domain=QQ):
        return cls.from_laurent(LaurentPoly.monomial(exponent, coefficient, domain))

    @classmethod
    def zero(cls, domain=QQ):
        F, _ = rational_field(domain)
        return cls(F.zero, domain)

    def is_zero(self):
        return not self.frac

    def convert(self, domain):
        if domain == self.domain:
            return self
        F, _ = rational_field(domain)
        numer = self.frac.numer.set_ring(F.ring)
        denom = self.frac.denom.set_ring(F.ring)
        return RationalFunction(F.new(numer, denom), domain)

    @staticmethod
    def _poly_terms(poly):
        return {monom[0]: c for monom, c in poly.terms()}

    @property
    def numerator(self):
        lc = self.frac.denom.LC
        return LaurentPoly(_clean({e: c / lc for e, c in self._poly_terms(self.frac.numer).items()}), self.domain)

    @property
    def denominator(self):
        lc = self.frac.denom.LC
        return LaurentPoly(_clean({e: c / lc for e, c in self._poly_terms(self.frac.denom).items()}), self.domain)

    def is_laurent(self):
        return len(self.frac.denom.terms()) == 1

    def to_laurent(self):
        """Exact Laurent polynomial; only for monomial denominators."""
        if not self.is_laurent():
            raise ValueError(f"{self} is not a Laurent polynomial")
        den = self.denominator
        (e, c), = den.terms.items()
        return LaurentPoly(_clean({k - e: v / c for k, v in self.numerator.terms.items()}), self.domain)

    def ord_at_infinity(self):
        if self.is_zero():
            raise ZeroArgument("ord of the zero function")
        return self.frac.numer.degree() - self.frac.denom.degree()

    def leading_coefficient(self):
        return self.frac.numer.LC / self.frac.denom.LC

    @property
    def top(self):
        return self.ord_at_infinity()

    def expand(self, order):
        """Exact series at infinity; known terms are those above ``order``."""
        num = self.numerator.terms
        den = self.denominator
        if not num:
            return SeriesAtInfinity.zero(order, self.domain)
        d_deg = den.degree
        d_lc = den.leading_coefficient()
        remainder = dict(num)
        terms = {}
        e = max(remainder) - d_deg
        while e > order:
            c = remainder.get(e + d_deg)
            if c:
                q = c / d_lc
                terms[e] = q
                for k, v in den.terms.items():
                    key = e + k
                    remainder[key] = remainder.get(key, self.domain.zero) - q * v
            e -= 1
        return SeriesAtInfinity(terms, order, self.domain)

    def support(self):
        """Exponents occurring in the reduced numerator and denominator."""
        return set(self.numerator.terms) | set(self.denominator.terms)

    def derivative(self):
        _, x = rational_field(self.domain)
        return RationalFunction(self.frac.diff(x), self.domain)

    def _unify(self, other):
        dom = unify_domains(self.domain, other.domain)
        return self.convert(dom), other.convert(dom), dom

    def _lift(self, other):
        if isinstance(other, RationalFunction):
            return self._unify(other)
        dom = self.domain
        if isinstance(other, ANP) and dom == QQ:
            raise UnsupportedFieldSplit("mixing an extension scalar into a rational function")
        return self, RationalFunction.constant(other, dom), dom

    def __add__(self, other):
        if isinstance(other, SeriesAtInfinity):
            return NotImplemented
        a, b, dom = self._lift(other)
        return RationalFunction(a.frac + b.frac, dom)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.frac, self.domain)

    def __sub__(self, other):
        if isinstance(other, SeriesAtInfinity):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, SeriesAtInfinity):
            return NotImplemented
        a, b, dom = self._lift(other)
        return RationalFunction(a.frac * b.frac, dom)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, SeriesAtInfinity):
            return self.expand(other.order - other.top + self.top - 1) / other
        a, b, dom = self._lift(other)
        if b.is_zero():
            raise ZeroArgument("division by the zero function")
        return RationalFunction(a.frac / b.frac, dom)

    def __pow__(self, n):
        return RationalFunction(self.frac ** n, self.domain)

    def __eq__(self, other):
        if isinstance(other, RationalFunction):
            return (self - other).is_zero()
        if isinstance(other, SeriesAtInfinity):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def __repr__(self):
        return f"RationalFunction({self.numerator!r} / {self.denominator!r})"


# --- Log-monomial functions ---

@dataclass(frozen=True, eq=False)
class LogGroup:
    """x^gamma * sum_j table[j](x) * (ln x)^j with gamma canonical modulo the integers."""

    gamma: object
    table: dict = dc_field(default_factory=dict)

    @property
    def max_log_power(self):
        return max(self.table) if self.table else -1


class LogFunction:
    """Finite sum of terms c * x^(gamma + k) * (ln x)^j."""

    __slots__ = ("groups", "domain")

    def __init__(self, groups, domain=QQ):
        cleaned = []
        for g in groups:
            table = {j: p for j, p in g.table.items() if not p.is_zero()}
            if table:
                cleaned.append(LogGroup(g.gamma, table))
        cleaned.sort(key=lambda g: scalar_key(g.gamma))
        self.groups = tuple(cleaned)
        self.domain = domain

    @classmethod
    def zero(cls, domain=QQ):
        return cls((), domain)

    @classmethod
    def monomial(cls, exponent, log_power=0, coefficient=1, domain=QQ):
        exponent = scalar(exponent, domain) if not isinstance(exponent, ANP) else exponent
        n, gamma = split_integer(exponent)
        poly = LaurentPoly.monomial(n, coefficient, domain)
        return cls((LogGroup(gamma, {log_power: poly}),), domain)

    @classmethod
    def from_terms(cls, terms, domain=QQ):
        """Sum of (coefficient, exponent, log_power) triples."""
        result = cls.zero(domain)
        for coefficient, exponent, log_power in terms:
            result = result + cls.monomial(exponent, log_power, coefficient, domain)
        return result

    def is_zero(self):
        return not self.groups

    def terms(self):
        """Iterate (coefficient, exponent, log_power) triples."""
        for g in self.groups:
            for j, p in sorted(g.table.items()):
                for e, c in sorted(p.terms.items()):
                    yield c, g.gamma + e, j

    @property
    def max_log_power(self):
        return max((g.max_log_power for g in self.groups), default=-1)

    def convert(self, domain):
        if domain == self.domain:
            return self
        groups = [
            LogGroup(domain.convert(g.gamma), {j: p.convert(domain) for j, p in g.table.items()})
            for g in self.groups
        ]
        return LogFunction(groups, domain)

    def _group_map(self):
        return {scalar_key(g.gamma): g for g in self.groups}

    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        dom = unify_domains(self.domain, other.domain)
        a, b = self.convert(dom), other.convert(dom)
        merged = a._group_map()
        for key, g in b._group_map().items():
            if key in merged:
                table = dict(merged[key].table)
                for j, p in g.table.items():
                    table[j] = table[j] + p if j in table else p
                merged[key] = LogGroup(g.gamma, table)
            else:
                merged[key] = g
        return LogFunction(merged.values(), dom)

    __radd__ = __add__

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        if isinstance(c, ANP):
            dom = unify_domains(self.domain)
            if dom == QQ:
                raise UnsupportedFieldSplit("mixing an extension scalar into a rational function")
        return LogFunction(
            [LogGroup(g.gamma, {j: p * c for j, p in g.table.items()}) for g in self.groups], self.domain
        )

    def mul_laurent(self, poly):
        dom = unify_domains(self.domain, poly.domain)
        a = self.convert(dom)
        return LogFunction(
            [LogGroup(g.gamma, {j: p * poly for j, p in g.table.items()}) for g in a.groups], dom
        )

    def __mul__(self, other):
        if isinstance(other, LaurentPoly):
            return self.mul_laurent(other)
        if not isinstance(other, LogFunction):
            return self.scale(other)
        dom = unify_domains(self.domain, other.domain)
        a, b = self.convert(dom), other.convert(dom)
        result = LogFunction.zero(dom)
        for g1 in a.groups:
            for g2 in b.groups:
                n, gamma = split_integer(g1.gamma + g2.gamma)
                table = {}
                for j1, p1 in g1.table.items():
                    for j2, p2 in g2.table.items():
                        prod = (p1 * p2).shift(n)
                        table[j1 + j2] = table[j1 + j2] + prod if j1 + j2 in table else prod
                result = result + LogFunction((LogGroup(gamma, table),), dom)
        return result

    def shift_log(self, t=1):
        """Substitute ln x -> ln x + t."""
        t = scalar(t, self.domain) if not isinstance(t, ANP) else t
        groups = []
        for g in self.groups:
            table = {}
            for j, p in g.table.items():
                for i in range(j + 1):
                    term = p * (t ** (j - i) * comb(j, i))
                    table[i] = table[i] + term if i in table else term
            groups.append(LogGroup(g.gamma, table))
        return LogFunction(groups, self.domain)

    def derivative(self):
        dom = self.domain
        groups = []
        for g in self.groups:
            table = {}
            for j, p in g.table.items():
                for e, c in p.terms.items():
                    table.setdefault(j, {})
                    table[j][e - 1] = table[j].get(e - 1, dom.zero) + (g.gamma + e) * c
                    if j:
                        table.setdefault(j - 1, {})
                        table[j - 1][e - 1] = table[j - 1].get(e - 1, dom.zero) + c * j
            groups.append(LogGroup(g.gamma, {j: LaurentPoly(_clean(t), dom) for j, t in table.items()}))
        return LogFunction(groups, dom)

    def __eq__(self, other):
        if not isinstance(other, LogFunction):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def __repr__(self):
        if not self.groups:
            return "0"
        parts = []
        for c, exponent, j in self.terms():
            log = "" if j == 0 else ("*ln" if j == 1 else f"*ln^{j}")
            parts.append(f"{format_scalar(c)}*x^({format_scalar(exponent)}){log}")
        return " + ".join(parts)


# --- Module-level operations ---

def ord_at_infinity(value):
    """Exponent of the leading term at infinity."""
    return value.ord_at_infinity()


def log_derive(f):
    """d/dx of a log-monomial function with d(ln x)/dx = 1/x."""
    return f.derivative()


# --- Linear algebra over the scalar field ---

def nullspace(rows, ncols, domain=QQ):
    """Basis of solutions c of sum_i row[i] * c[i] = 0 for every row."""
    rows = [r for r in rows if any(r)]
    if not rows:
        return [[domain.one if i == j else domain.zero for i in range(ncols)] for j in range(ncols)]
    matrix = DomainMatrix([[domain.convert(v) for v in r] for r in rows], (len(rows), ncols), domain)
    return matrix.nullspace().to_list()


def echelon_by_last(vectors, domain=QQ):
    """Row-reduce so that every vector has a distinct last nonzero entry."""
    if not vectors:
        return []
    n = len(vectors[0])
    reversed_rows = [list(reversed(v)) for v in vectors]
    reduced, _ = DomainMatrix(reversed_rows, (len(vectors), n), domain).rref()
    return [list(reversed(r)) for r in reduced.to_list() if any(r)]


def is_scalar(value):
    return isinstance(value, (int, ANP)) or QQ.of_type(value)
