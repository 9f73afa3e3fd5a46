"""
Text grammar for operators and kernel functions, plus the printers.

Operators: sums of products of numbers, ``x``, ``d`` (the derivative),
``D`` (x*d) and parenthesised groups, with ``^`` for integer powers and
``/`` only by functions. Kernels: sums of products of numbers, ``x^g`` with
rational g and ``ln`` (or ``ln(x)``) powers.
"""

import logging
import re

from sympy import Poly, Symbol
from sympy.core.sympify import SympifyError, sympify
from sympy.polys.domains import QQ
from sympy.polys.polyerrors import BasePolynomialError

from diffop import DiffOp
from errors import OperatorSyntaxError, UnknownSymbol
from exactnum import (
    LaurentPoly,
    LogFunction,
    RationalFunction,
    SeriesAtInfinity,
    format_scalar,
    scalar,
)

logger = logging.getLogger(__name__)

TOKEN = re.compile(
    r"\s*(?:(?P<number>\d+(?:\.\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>\*\*|[-+*/^()∂]))"
)


def tokenize(text):
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise OperatorSyntaxError("unexpected character", pos, text)
        kind = m.lastgroup
        value = m.group(kind)
        if value == "**":
            value = "^"
        if value == "∂":
            kind, value = "name", "d"
        tokens.append((kind, value, m.start(kind)))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    """Precedence climbing over a token list; value construction is delegated."""

    def __init__(self, text, semantics):
        self.text = text
        self.tokens = tokenize(text)
        self.index = 0
        self.sem = semantics

    def peek(self):
        return self.tokens[self.index]

    def advance(self):
        token = self.tokens[self.index]
        self.index += 1
        return token

    def expect(self, value):
        kind, got, pos = self.advance()
        if got != value:
            raise OperatorSyntaxError(f"expected {value!r}", pos, self.text)

    def parse(self):
        value = self.expression()
        kind, got, pos = self.peek()
        if kind != "end":
            raise OperatorSyntaxError(f"unexpected {got!r}", pos, self.text)
        return value

    def expression(self):
        kind, got, _ = self.peek()
        if got in ("+", "-"):
            self.advance()
            value = self.term()
            if got == "-":
                value = self.sem.neg(value)
        else:
            value = self.term()
        while self.peek()[1] in ("+", "-"):
            _, op, _ = self.advance()
            rhs = self.term()
            value = self.sem.add(value, rhs) if op == "+" else self.sem.sub(value, rhs)
        return value

    def term(self):
        value = self.factor()
        while self.peek()[1] in ("*", "/"):
            _, op, pos = self.advance()
            rhs = self.factor()
            value = self.sem.mul(value, rhs) if op == "*" else self.sem.div(value, rhs, pos)
        return value

    def factor(self):
        if self.peek()[1] == "-":
            self.advance()
            return self.sem.neg(self.factor())
        base = self.atom()
        if self.peek()[1] == "^":
            _, _, pos = self.advance()
            base = self.sem.power(base, self.exponent(), pos)
        return base

    def exponent(self):
        kind, got, pos = self.peek()
        if got == "(":
            self.advance()
            sign = 1
            if self.peek()[1] in ("+", "-"):
                sign = -1 if self.advance()[1] == "-" else 1
            value = self._integer()
            if self.peek()[1] == "/":
                self.advance()
                value = QQ(value, self._integer())
            self.expect(")")
            return sign * QQ.convert(value)
        sign = 1
        if got in ("+", "-"):
            self.advance()
            sign = -1 if got == "-" else 1
        return sign * QQ(self._integer())

    def _integer(self):
        kind, got, pos = self.advance()
        if kind != "number" or "." in got:
            raise OperatorSyntaxError("expected an integer", pos, self.text)
        return int(got)

    def atom(self):
        kind, got, pos = self.advance()
        if kind == "number":
            return self.sem.number(QQ.from_sympy(sympify(got, rational=True)))
        if kind == "name":
            if self.peek()[1] == "(" and got in self.sem.calls:
                self.advance()
                inner = self.expression()
                self.expect(")")
                return self.sem.call(got, inner, pos)
            return self.sem.symbol(got, pos, self.text)
        if got == "(":
            value = self.expression()
            self.expect(")")
            return value
        if kind == "end":
            raise OperatorSyntaxError("unexpected end of input", pos, self.text)
        raise OperatorSyntaxError(f"unexpected {got!r}", pos, self.text)


class _OperatorSemantics:
    calls = ()

    def __init__(self, domain, generator):
        self.domain = domain
        self.generator = generator

    def _scalar_op(self, value):
        return DiffOp.function(RationalFunction.constant(value, self.domain), self.domain)

    def number(self, value):
        return self._scalar_op(scalar(value, self.domain))

    def symbol(self, name, pos, text):
        if name == "x":
            return DiffOp.x(1, 1, self.domain)
        if name == "d":
            return DiffOp.d(1, self.domain)
        if name == "D":
            return DiffOp.euler(self.domain)
        if name == self.generator and self.domain != QQ:
            return self._scalar_op(self.domain.unit)
        raise UnknownSymbol(f"unknown symbol {name!r}", position=pos, text=text)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def div(self, a, b, pos):
        if b.is_zero() or b.order > 0:
            raise OperatorSyntaxError("division only by nonzero functions", pos)
        return a * DiffOp.function(RationalFunction.constant(1, self.domain) / b.coefficients[0], self.domain)

    def power(self, base, exponent, pos):
        if QQ.denom(exponent) != 1:
            raise OperatorSyntaxError("operator exponents must be integers", pos)
        n = int(QQ.numer(exponent))
        if n >= 0:
            return base ** n
        if base.is_zero() or base.order > 0:
            raise OperatorSyntaxError("negative powers only of functions", pos)
        return DiffOp.function(base.coefficients[0] ** n, self.domain)


class _KernelSemantics:
    calls = ("ln", "log")

    def __init__(self, domain, generator):
        self.domain = domain
        self.generator = generator

    def _constant(self, value):
        return LogFunction.monomial(0, 0, value, self.domain)

    def number(self, value):
        return self._constant(scalar(value, self.domain))

    def symbol(self, name, pos, text):
        if name == "x":
            return LogFunction.monomial(1, 0, 1, self.domain)
        if name in self.calls:
            return LogFunction.monomial(0, 1, 1, self.domain)
        if name == self.generator and self.domain != QQ:
            return self._constant(self.domain.unit)
        raise UnknownSymbol(f"unknown symbol {name!r}", position=pos, text=text)

    def call(self, name, inner, pos):
        if not (inner - LogFunction.monomial(1, 0, 1, self.domain)).is_zero():
            raise OperatorSyntaxError("ln only of x", pos)
        return LogFunction.monomial(0, 1, 1, self.domain)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def div(self, a, b, pos):
        terms = list(b.terms())
        if len(terms) != 1 or terms[0][2] != 0:
            raise OperatorSyntaxError("kernel division only by monomials", pos)
        c, exponent, _ = terms[0]
        return a * LogFunction.monomial(-exponent, 0, self.domain.one / c, self.domain)

    def power(self, base, exponent, pos):
        terms = list(base.terms())
        if len(terms) == 1:
            c, e, j = terms[0]
            if j == 0 and not (c - self.domain.one):
                return LogFunction.monomial(e * scalar(exponent, self.domain), 0, 1, self.domain)
        if QQ.denom(exponent) != 1 or exponent < 0:
            raise OperatorSyntaxError("only x takes rational or negative exponents", pos)
        result = self._constant(self.domain.one)
        for _ in range(int(QQ.numer(exponent))):
            result = result * base
        return result


def parse_operator(text, domain=QQ, generator="a"):
    """Parse operator text such as ``d^2 - 2*x^-2`` or ``x^-3*D*(D-1)*(D-2)``."""
    result = _Parser(text, _OperatorSemantics(domain, generator)).parse()
    logger.debug("parsed %r into an operator of %d coefficients", text, len(result.coefficients))
    return result


def parse_kernel(text, domain=QQ, generator="a"):
    return _Parser(text, _KernelSemantics(domain, generator)).parse()


def parse_kernel_list(text, domain=QQ, generator="a"):
    """Semicolon- or comma-separated kernel functions."""
    parts = [p for p in re.split(r"[;,]", text) if p.strip()]
    return [parse_kernel(p, domain, generator) for p in parts]


def parse_scalar(text, domain=QQ, generator="a"):
    """Scalar literal "p/q" or "(c0 + c1*a)/q", read with sympy."""
    gen = Symbol(generator)
    try:
        expr = sympify(text.replace("^", "**"), locals={generator: gen}, rational=True)
    except (SympifyError, SyntaxError, TypeError) as e:
        raise OperatorSyntaxError("not a scalar literal", 0, text) from e
    stray = expr.free_symbols - {gen}
    if stray:
        raise OperatorSyntaxError(f"not a scalar literal, found {sorted(map(str, stray))[0]!r}", 0, text)
    try:
        coefficients = Poly(expr, gen, domain=QQ).all_coeffs()
    except BasePolynomialError as e:
        raise OperatorSyntaxError("not a scalar literal", 0, text) from e
    if len(coefficients) > 1 and domain == QQ:
        raise UnknownSymbol(f"unknown symbol {generator!r}", position=0, text=text)
    value = domain.zero
    for c in coefficients:
        value = value * (domain.unit if domain != QQ else domain.one) + domain.convert(QQ.from_sympy(c))
    return value


def parse_scalar_list(text, domain=QQ, generator="a"):
    """Comma-separated scalars; top-level commas only."""
    items, depth, current = [], 0, ""
    for ch in text:
        if ch == "," and depth == 0:
            items.append(current)
            current = ""
            continue
        depth += (ch == "(") - (ch == ")")
        current += ch
    items.append(current)
    return [parse_scalar(item.strip(), domain, generator) for item in items if item.strip()]


# --- printing ---

def _wrap(text):
    return text if re.fullmatch(r"-?[\w/^]+", text) else f"({text})"


def format_laurent(poly, var="x"):
    if poly.is_zero():
        return "0"
    parts = []
    for e, c in sorted(poly.terms.items(), reverse=True):
        coeff = format_scalar(c)
        negative = coeff.startswith("-") and "+" not in coeff
        if negative:
            coeff = coeff[1:]
        if e == 0:
            body = coeff
        else:
            power = var if e == 1 else f"{var}^{e}"
            body = power if coeff == "1" else f"{coeff}*{power}"
        parts.append(("-" if negative else "+", body))
    text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        text += f" {sign} {body}"
    return text


def format_coefficient(c):
    if isinstance(c, SeriesAtInfinity):
        return f"({format_laurent(c.to_laurent())} + O(x^{c.order}))"
    if c.is_laurent():
        return format_laurent(c.to_laurent())
    return f"({format_laurent(c.numerator)})/({format_laurent(c.denominator)})"


def _format_terms(items):
    parts = []
    for k, c in sorted(items, reverse=True):
        if k == 0:
            power = ""
        else:
            power = "d" if k == 1 else (f"d^{k}" if k > 0 else f"d^({k})")
        coeff = format_coefficient(c)
        negative = coeff.startswith("-") and not re.search(r" [+-] ", coeff)
        if negative:
            coeff = coeff[1:]
        if not power:
            body = coeff
        elif coeff == "1":
            body = power
        else:
            body = f"{_wrap(coeff)}*{power}"
        parts.append(("-" if negative else "+", body))
    if not parts:
        return "0"
    text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        text += f" {sign} {body}"
    return text


def format_operator(L):
    """Printer whose output parses back to the same operator."""
    return _format_terms(L.items().items())


def format_psdo(P):
    text = _format_terms((j, c) for j, c in P.coefficients.items() if not c.is_zero())
    if P.floor is not None:
        text += f" + O(d^({P.floor - 1}))"
    return text


def format_kernel(f):
    """Kernel function in the kernel grammar, e.g. ``x^(1/2)*ln^2``."""
    if f.is_zero():
        return "0"
    parts = []
    for c, exponent, j in f.terms():
        factors = [] if not (c - f.domain.one) else [_wrap(format_scalar(c))]
        e = format_scalar(exponent)
        if e != "0":
            factors.append("x" if e == "1" else f"x^({e})")
        if j:
            factors.append("ln" if j == 1 else f"ln^{j}")
        parts.append("*".join(factors) or "1")
    return " + ".join(parts)


# --- JSON term form ---

def laurent_to_json(poly):
    return {str(e): format_scalar(c) for e, c in sorted(poly.terms.items(), reverse=True)}


def laurent_from_json(data, domain=QQ, generator="a"):
    return LaurentPoly.from_dict(
        {int(e): parse_scalar(str(c), domain, generator) for e, c in data.items()}, domain
    )


def coefficient_to_json(k, c):
    if isinstance(c, SeriesAtInfinity):
        return {"dpow": k, "series": laurent_to_json(c.to_laurent()), "order": c.order}
    return {"dpow": k, "num": laurent_to_json(c.numerator), "den": laurent_to_json(c.denominator)}


def coefficient_from_json(term, domain=QQ, generator="a"):
    if "series" in term:
        poly = laurent_from_json(term["series"], domain, generator)
        return SeriesAtInfinity(poly.terms, int(term["order"]), domain)
    num = laurent_from_json(term.get("num", {"0": "1"}), domain, generator)
    den = laurent_from_json(term.get("den", {"0": "1"}), domain, generator)
    return RationalFunction.from_polys(num, den, domain)


def operator_to_json(L):
    return {
        "order": L.order if not L.is_zero() else None,
        "text": format_operator(L),
        "terms": [coefficient_to_json(k, c) for k, c in sorted(L.items().items(), reverse=True)],
    }


def psdo_to_json(P):
    return {
        "order": P.top_order,
        "floor": P.floor,
        "text": format_psdo(P),
        "terms": [coefficient_to_json(j, c) for j, c in P.coefficients.items() if not c.is_zero()],
    }


def operator_from_json(data, domain=QQ, generator="a"):
    """Operator document: {"terms": [...]} or {"text": "..."}."""
    if "terms" in data:
        terms = {}
        for term in data["terms"]:
            k = int(term["dpow"])
            c = coefficient_from_json(term, domain, generator)
            terms[k] = terms[k] + c if k in terms else c
        return DiffOp.from_dict(terms, domain) if terms else DiffOp.zero(domain)
    if "text" in data:
        return parse_operator(data["text"], domain, generator)
    raise OperatorSyntaxError("operator document needs 'terms' or 'text'", 0)
