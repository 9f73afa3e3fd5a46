"""
Monomial Darboux transformations of Bessel operators and the single
minimal-root steps used by the reduction pipeline.
"""

import logging
from dataclasses import dataclass

from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.rings import ring

from bessel import BesselParams, bessel_operator
from diffop import (
    DiffOp,
    annihilates,
    apply_to_log,
    coefficient_support_ok,
    indicial_data,
    indicial_ring,
    is_zr_invariant,
    right_divide,
)
from errors import (
    InvarianceLost,
    LogResidue,
    MonodromyNotClosed,
    NonzeroRemainder,
    NotAPerfectPower,
    NotARightFactor,
    NotInKernel,
    NotNormalized,
    PrecisionUnderflow,
    ReconstructionFailed,
    ResonanceBelowMinimal,
    UnsupportedFieldSplit,
    ZeroWronskian,
)
from exactnum import (
    LaurentPoly,
    LogFunction,
    LogGroup,
    RationalFunction,
    SeriesAtInfinity,
    echelon_by_last,
    field_extend,
    nullspace,
    scalar_key,
    to_rational,
    unify_domains,
)
from psdo import PsdOp, WaveOperator, diff_part, psdo_invert, psdo_root

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class KernelSpec:
    base: BesselParams
    power: int
    basis: tuple

    @property
    def domain(self):
        return unify_domains(self.base.domain, *(f.domain for f in self.basis))


@dataclass(frozen=True, eq=False)
class CheckedKernel:
    spec: KernelSpec
    basis: tuple
    operator: DiffOp


@dataclass(frozen=True, eq=False)
class DarbouxTransform:
    kernel: CheckedKernel
    P: DiffOp
    Q: DiffOp
    L: DiffOp
    power_out: int


@dataclass(frozen=True, eq=False)
class MinimalSolution:
    """phi = x^lam * series with series = 1 + sum_k c_k x^(-k r)."""

    lam: object
    series: SeriesAtInfinity
    r: int
    domain: object

    def log_derivative(self):
        """phi'/phi as a series."""
        u = self.series
        return u.derivative() * u.inverse() + RationalFunction.monomial(-1, self.lam, self.domain)


@dataclass(frozen=True, eq=False)
class DarbouxStepRecord:
    root_class: object
    lam: object
    solution: MinimalSolution
    P: DiffOp
    Q: DiffOp
    predicted_poly: object
    observed_poly: object

    @property
    def roots_match(self):
        return self.predicted_poly == self.observed_poly


@dataclass(frozen=True)
class DtShape:
    shape_ok: bool
    residue: int
    modulus: int


# --- kernels ---

def _coordinates(f):
    coords = {}
    for g in f.groups:
        for j, p in g.table.items():
            for e, c in p.terms.items():
                coords[(scalar_key(g.gamma), -j, -e)] = (g.gamma, j, e, c)
    return coords


def _vectorize(functions, dom):
    columns = {}
    for f in functions:
        for key, (gamma, j, e, _) in _coordinates(f).items():
            columns[key] = (gamma, j, e)
    order = sorted(columns)
    rows = []
    for f in functions:
        coords = _coordinates(f)
        rows.append([dom.convert(coords[k][3]) if k in coords else dom.zero for k in order])
    return order, columns, rows


def _rank(rows, ncols, dom):
    if not rows or not ncols:
        return 0
    return DomainMatrix(rows, (len(rows), ncols), dom).rank()


def _from_row(row, order, columns, dom):
    groups = {}
    for value, key in zip(row, order):
        if not value:
            continue
        gamma, j, e = columns[key]
        table = groups.setdefault(key[0], (gamma, {}))[1]
        table.setdefault(j, {})[e] = value
    return LogFunction(
        [LogGroup(gamma, {j: LaurentPoly(t, dom) for j, t in table.items()}) for gamma, table in groups.values()],
        dom,
    )


def kernel_validate(spec):
    """Exact kernel membership, monodromy closure and a row-reduced basis."""
    dom = spec.domain
    basis = [f.convert(dom) for f in spec.basis]
    # the span must contain every class projection and every ln-shift
    candidates = []
    for f in basis:
        candidates.extend(LogFunction((g,), dom) for g in f.groups)
        candidates.append(f.shift_log(1))
    order, columns, rows = _vectorize(basis + candidates, dom)
    base_rows = rows[:len(basis)]
    rank = _rank(base_rows, len(order), dom)
    if _rank(rows, len(order), dom) != rank:
        raise MonodromyNotClosed("span is not closed under ln x -> ln x + 1", rank=rank)
    Ld = bessel_operator(spec.base) ** spec.power
    for i, f in enumerate(basis):
        if not apply_to_log(Ld, f).is_zero():
            raise NotInKernel("basis element is not annihilated", index=i, power=spec.power)
    if rank < len(basis):
        logger.warning("kernel basis is dependent; keeping %d of %d elements", rank, len(basis))
    reduced, _ = DomainMatrix(base_rows, (len(base_rows), len(order)), dom).rref()
    checked = tuple(
        _from_row(row, order, columns, dom) for row in reduced.to_list() if any(row)
    )
    logger.debug("validated kernel of dimension %d inside ker L^%d", len(checked), spec.power)
    return CheckedKernel(spec, checked, Ld)


def bessel_kernel_basis(base, d):
    """x^rho (ln x)^j for every root rho of L_beta^d and j below its multiplicity."""
    N = base.order
    dom = base.domain
    distinct = []
    for k in range(d):
        for b in base.beta:
            rho = b + k * N
            for entry in distinct:
                if not (entry[0] - rho):
                    entry[1] += 1
                    break
            else:
                distinct.append([rho, 1])
    basis = [LogFunction.monomial(rho, j, 1, dom) for rho, m in distinct for j in range(m)]
    return KernelSpec(base, d, tuple(basis))


# --- Wronskian quotients ---

def wronskian_operator(basis):
    """Monic P with P f = 0 for every f in the basis, certified log-free."""
    basis = list(basis)
    n = len(basis)
    if n == 0:
        return DiffOp.identity(QQ)
    dom = unify_domains(*(f.domain for f in basis))
    R, X, Y = ring("X,Y", dom)
    entries = [[None] * n for _ in range(n + 1)]
    for i, f in enumerate(basis):
        f = f.convert(dom)
        if len(f.groups) != 1:
            raise MonodromyNotClosed("basis element mixes exponent classes", index=i)
        derivatives = [f]
        for _ in range(n):
            derivatives.append(derivatives[-1].derivative())
        exponents = [
            e for g_f in derivatives for g in g_f.groups for p in g.table.values() for e in p.terms
        ]
        low = min(exponents, default=0)
        # column i is scaled by x^(-gamma_i - low); the scale cancels in every quotient
        for k, g_f in enumerate(derivatives):
            entry = R.zero
            for g in g_f.groups:
                for j, p in g.table.items():
                    for e, c in p.terms.items():
                        entry += R(c) * X ** (e - low) * Y ** j
            entries[k][i] = entry
    ring_domain = R.to_domain()
    minors = []
    for k in range(n + 1):
        rows = [entries[m] for m in range(n + 1) if m != k]
        minors.append(DomainMatrix(rows, (n, n), ring_domain).det())
    F_n = minors[n]
    if not F_n:
        raise ZeroWronskian("Wronskian of the basis vanishes", size=n)
    F_n0 = F_n.subs(Y, 0)
    if not F_n0:
        raise LogResidue("Wronskian vanishes at ln x = 0", index=n)
    coefficients = {}
    for k, F_k in enumerate(minors):
        F_k0 = F_k.subs(Y, 0)
        if F_k * F_n0 != F_k0 * F_n:
            raise LogResidue("cofactor quotient depends on ln x", index=k)
        if not F_k0:
            continue
        sign = 1 if (n + k) % 2 == 0 else -1
        num = LaurentPoly({m[0]: c * sign for m, c in F_k0.terms()}, dom)
        den = LaurentPoly({m[0]: c for m, c in F_n0.terms()}, dom)
        coefficients[k] = RationalFunction.from_polys(num, den, dom)
    P = DiffOp.from_dict(coefficients, dom)
    for i, f in enumerate(basis):
        if not annihilates(P, f):
            raise LogResidue("quotient operator misses a basis element", index=i)
    logger.debug("Wronskian operator of order %d", n)
    return P


def cofactor(base, d, P):
    """Q = L_beta^d P^-1, exact."""
    Ld = bessel_operator(base) ** d
    if P.order > Ld.order:
        raise NotARightFactor("divisor order exceeds L^d", order=P.order)
    inverse = psdo_invert(PsdOp.from_diffop(P), Ld.order - P.order + 1)
    Q = diff_part(PsdOp.from_diffop(Ld) * inverse)
    if not (Q * P) == Ld:
        raise NotARightFactor("Q P differs from L^d", power=d)
    return Q


def transformed_operator(P, Q, d_prime):
    """L with L^d_prime = P Q, certified by re-powering."""
    PQ = P * Q
    if d_prime == 1:
        return PQ
    if PQ.order % d_prime:
        raise NotAPerfectPower("order is not divisible", order=PQ.order, power=d_prime)
    M = PQ.order // d_prime
    try:
        root = psdo_root(PsdOp.from_diffop(PQ), d_prime, M)
    except NotNormalized as e:
        raise NotAPerfectPower(str(e), power=d_prime) from e
    L = diff_part(root)
    if not (L ** d_prime) == PQ:
        raise NotAPerfectPower("P Q is not a perfect power", power=d_prime)
    return L


def monomial_darboux(spec, d_prime=None):
    """Kernel -> (P, Q, L) with Q P = L_beta^d and L^d' = P Q."""
    checked = kernel_validate(spec)
    P = wronskian_operator(checked.basis)
    Q = cofactor(spec.base, spec.power, P)
    L = transformed_operator(P, Q, d_prime or spec.power)
    logger.info("monomial Darboux transformation of order %d over beta %s", L.order, spec.base.describe())
    return DarbouxTransform(checked, P, Q, L, d_prime or spec.power)


def order_two_family(family, kernel, d):
    """Order-two examples built over u = 0 (family 1) or u = -x^-2/4 (family 2)."""
    if family == 1:
        base = BesselParams.of([0, 1])
    elif family == 2:
        base = BesselParams.of(["1/2", "1/2"])
    else:
        raise ValueError("family must be 1 or 2")
    return monomial_darboux(KernelSpec(base, d, tuple(kernel)))


def dt_shape(P, N):
    """Does P have the form x^-n sum_k p_k(x^N) D^k with rational p_k."""
    W = P.d_form()
    residue = None
    for w in W.values():
        if isinstance(w, SeriesAtInfinity):
            e = w.ord_at_infinity()
        else:
            e = next(iter(w.numerator.terms)) - next(iter(w.denominator.terms))
        residue = e % N
        break
    if residue is None:
        return DtShape(True, 0, N)
    ok = all(coefficient_support_ok(w, residue, N) for w in W.values())
    return DtShape(ok, residue, N)


# --- minimal-root steps ---

def _lift_class(L, root_class):
    """Minimal root of the class, extending the field for nonlinear factors."""
    if root_class.degree == 1:
        return L, root_class.base_root(), L.domain
    if L.domain != QQ:
        raise UnsupportedFieldSplit("class root needs a second extension", degree=root_class.degree)
    coeffs = [to_rational(c) for c in root_class.factor_coefficients()]
    field = field_extend(coeffs)
    return L.convert(field.domain), field.generator, field.domain


def minimal_kernel_solution(L, root_class, r, prec):
    """phi = x^lam (1 + sum_k c_k x^(-k r)) from the weight recursion of L."""
    L, lam, dom = _lift_class(L, root_class)
    W = L.d_form()
    weight = max(w.ord_at_infinity() for w in W.values())
    low = weight - prec * r - 1
    W = {j: (w.expand(low) if isinstance(w, RationalFunction) else w) for j, w in W.items()}

    def p(i, mu):
        total = dom.zero
        for j, w in W.items():
            c = w.coefficient(weight - i)
            if c:
                total = total + c * mu ** j
        return total

    c = [dom.one]
    for k in range(1, prec):
        try:
            denominator = p(0, lam - k * r)
            if not denominator:
                raise ResonanceBelowMinimal("indicial polynomial vanishes below the chosen root", index=k)
            acc = dom.zero
            for m in range(k):
                if c[m]:
                    acc = acc + c[m] * p((k - m) * r, lam - m * r)
        except PrecisionUnderflow:
            break
        c.append(-acc / denominator)
    series = SeriesAtInfinity({-k * r: v for k, v in enumerate(c)}, -len(c) * r, dom)
    logger.debug("minimal solution with %d coefficients, step %d", len(c), r)
    return MinimalSolution(lam, series, r, dom)


def _convert_wave(K, dom):
    return WaveOperator({j: c.convert(dom) for j, c in K.coefficients.items()}, K.floor, dom)


def predicted_indicial(poly, lam, N, dom):
    """Chosen root lam moves to lam + N - 1, every other root moves down by one."""
    R, D = indicial_ring(dom)
    p = poly.set_ring(R).monic()
    shifted = p.compose(D, D + 1)
    quotient, remainder = divmod(shifted, D - (lam - 1))
    if remainder:
        raise ValueError("chosen root is not a root of the indicial polynomial")
    return (quotient * (D - (lam + N - 1))).monic()


def darboux_step(L, K, root_class, r, prec):
    """One Darboux step at the minimal root of a class."""
    solution = minimal_kernel_solution(L, root_class, r, prec)
    dom = solution.domain
    lam = solution.lam
    L = L.convert(dom)
    K = _convert_wave(K, dom)
    N = L.order
    P = DiffOp.from_dict({1: 1, 0: -solution.log_derivative()}, dom)
    Q, remainder = right_divide(L, P)
    if not remainder.is_zero():
        raise NonzeroRemainder("L is not divisible by P to precision", order=remainder.order)
    L_new = P * Q
    K_new = PsdOp.from_diffop(P) * K * PsdOp.d_power(-1, dom)
    K_new = WaveOperator(K_new.coefficients, K_new.floor, dom)
    before = indicial_data(L).indicial_poly
    predicted = predicted_indicial(before, lam, N, dom)
    R, _ = indicial_ring(dom)
    observed = indicial_data(L_new).indicial_poly.set_ring(R).monic()
    if not is_zr_invariant(L_new, r):
        raise InvarianceLost("step broke the Z_r symmetry", r=r)
    record = DarbouxStepRecord(root_class, lam, solution, P, Q, predicted, observed)
    if not record.roots_match:
        raise InvarianceLost("indicial roots do not follow the shift rule", lam=lam, observed=observed)
    logger.info("Darboux step at root %s, order %d", lam, N)
    return L_new, K_new, record


# --- rational reconstruction ---

def rational_reconstruct(c, deg_bound):
    """Rational function with denominator degree <= deg_bound matching the series."""
    if isinstance(c, RationalFunction):
        return c
    dom = c.domain
    if c.is_zero():
        return RationalFunction.zero(dom)
    slots = -1 - c.order
    if slots < 2 * deg_bound + 2:
        raise ReconstructionFailed("too few known terms", known=slots, bound=deg_bound)
    for t in range(deg_bound + 1):
        rows = [
            [c.terms.get(e - i, dom.zero) for i in range(t + 1)]
            for e in range(c.order + t + 1, 0)
        ]
        solutions = [v for v in echelon_by_last(nullspace(rows, t + 1, dom), dom) if v[t]]
        if not solutions:
            continue
        v = solutions[0]
        den = LaurentPoly({i: vi / v[t] for i, vi in enumerate(v) if vi}, dom)
        product = c * RationalFunction.from_laurent(den)
        num = LaurentPoly({e: value for e, value in product.terms.items() if e >= 0}, dom)
        if num.is_zero():
            continue
        candidate = RationalFunction.from_polys(num, den, dom)
        if (candidate.expand(c.order) - c).is_zero():
            logger.debug("reconstructed a rational function with denominator degree %d", t)
            return candidate
    raise ReconstructionFailed("no rational function within the degree bound", bound=deg_bound)
