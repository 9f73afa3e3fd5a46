"""
Bispectrality: theta search, Lambda from the wave operator, two-sided
residual certificates, string pairs and the commutant probe.
"""

import logging
from dataclasses import dataclass, field
from math import ceil, factorial, gcd

import config
from darboux import rational_reconstruct
from diffop import (
    DiffOp,
    ad_power,
    commutator,
    generalized_binomial,
    indicial_data,
    is_zr_invariant,
    right_divide,
)
from errors import (
    IdentityFailed,
    InvarianceLost,
    NoStringNumber,
    NotFound,
    ReconstructionFailed,
    ResidualNonzero,
    TailNotVanishing,
    UnsupportedCoefficient,
)
from exactnum import (
    LaurentPoly,
    RationalFunction,
    SeriesAtInfinity,
    echelon_by_last,
    nullspace,
)
from psdo import (
    PsdOp,
    bispectral_b,
    bispectral_b1,
    conjugate_by_wave,
    diff_part,
    nth_root,
    psdo_invert,
    solve_wave_operator,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class BispectralCertificate:
    L: DiffOp
    Lam: DiffOp
    f: LaurentPoly
    theta: LaurentPoly
    m: int
    depth: int
    prec: int
    checked: dict
    residuals: dict
    zr_L: int = None
    zr_Lam: int = None

    @property
    def verified(self):
        return all(v == 0 for v in self.residuals.values())


@dataclass(frozen=True, eq=False)
class StringPair:
    L: DiffOp
    Q: DiffOp
    n: int
    exact: bool


@dataclass(frozen=True)
class ZrInvariance:
    maximal: int
    valid: tuple


@dataclass(frozen=True, eq=False)
class ProbeWitness:
    M: DiffOp
    f: LaurentPoly
    order: int


@dataclass(frozen=True, eq=False)
class ProbeReport:
    witnesses: list = field(default_factory=list)
    rank: int = 0
    bound: int = 0


# --- linear systems over rational-function coefficients ---

def _linear_rows(columns, domain):
    """Rows of sum_i t_i g_i = 0 where each column is a list of RationalFunctions."""
    rows = []
    if not columns:
        return rows
    length = max(len(col) for col in columns)
    for slot in range(length):
        entries = [col[slot] if slot < len(col) else None for col in columns]
        dens = [g.frac.denom for g in entries if g is not None and not g.is_zero()]
        if not dens:
            continue
        den = dens[0]
        for d in dens[1:]:
            den = den.lcm(d)
        numerators = []
        for g in entries:
            if g is None or g.is_zero():
                numerators.append({})
            else:
                scaled = g.frac.numer * den.exquo(g.frac.denom)
                numerators.append({m[0]: c for m, c in scaled.terms()})
        exponents = sorted({e for num in numerators for e in num})
        for e in exponents:
            rows.append([num.get(e, domain.zero) for num in numerators])
    return rows


def _operator_slots(op, top):
    return [op.coefficient(k) for k in range(top + 1)]


# --- theta search ---

def find_theta(L, max_deg=None, max_m=None):
    """Smallest (m, deg) with (ad L)^(m+1) theta = 0; returns (theta, m)."""
    if L.is_series:
        raise UnsupportedCoefficient("theta search needs rational coefficients")
    max_deg = config.THETA_MAX_DEG if max_deg is None else max_deg
    max_m = config.THETA_MAX_M if max_m is None else max_m
    dom = L.domain
    # images[i] = (ad L)^(m+1) x^i
    images = {i: commutator(L, DiffOp.x(i, 1, dom)) for i in range(1, max_deg + 1)}
    for m in range(1, max_m + 1):
        images = {i: commutator(L, X) for i, X in images.items()}
        for deg in range(1, max_deg + 1):
            ops = [images[i] for i in range(1, deg + 1)]
            top = max((op.order for op in ops if not op.is_zero()), default=0)
            rows = _linear_rows([_operator_slots(op, top) for op in ops], dom)
            solutions = [v for v in echelon_by_last(nullspace(rows, deg, dom), dom) if v[deg - 1]]
            if not solutions:
                continue
            v = solutions[0]
            lead = v[deg - 1]
            theta = LaurentPoly.from_dict({i + 1: c / lead for i, c in enumerate(v) if c}, dom)
            logger.info("theta of degree %d found with m = %d", deg, m)
            return theta, m
    raise NotFound("no theta within bounds", max_deg=max_deg, max_m=max_m)


# --- Lambda ---

def build_lambda(L, K, theta, prec=None, depth=None):
    """Lambda = b(K^-1 theta K), with tail and leading-coefficient checks."""
    m = theta.degree
    Theta = conjugate_by_wave(K, RationalFunction.from_laurent(theta), depth)
    for j, c in Theta.coefficients.items():
        if isinstance(c, SeriesAtInfinity):
            stray = [e for e in c.terms if e < 0 or e > m]
            if c.order >= 0:
                raise TailNotVanishing("coefficient not known down to x^0", power=j, order=c.order)
        else:
            stray = [e for e in c.to_laurent().terms if e < 0 or e > m] if c.is_laurent() else [None]
        if stray:
            raise TailNotVanishing("conjugated theta is not polynomial of degree m", power=j, exponent=stray[0])
    image = bispectral_b(Theta)
    terms = {}
    for a, c in image.coefficients.items():
        poly = c.to_laurent()
        if not poly.is_zero():
            terms[a] = RationalFunction.from_laurent(poly)
    Lam = DiffOp.from_dict(terms, K.domain) if terms else DiffOp.zero(K.domain)
    for k in (m, m - 1):
        if k < 0:
            continue
        got = Lam.coefficient(k)
        expected = RationalFunction.constant(theta.coefficient(k), K.domain)
        if not (got - expected).is_zero():
            raise TailNotVanishing("leading coefficients of Lambda differ from theta", power=k)
    logger.debug("Lambda of order %d assembled", m)
    return Lam


# --- two-sided residuals ---

def _accumulate(table, J, term):
    """Add ``term`` to row J; rows are [sum, highest exponent any summand reaches]."""
    if J in table:
        row = table[J]
        row[0] = row[0] + term
        row[1] = max(row[1], term.top)
    else:
        table[J] = [term, term.top]


def _derivatives(K, depth, prec):
    cache = {}
    for j in range(depth + 1):
        a = K.alpha(j)
        cache[j] = [a.expand(-prec) if isinstance(a, RationalFunction) else a]

    def get(j, l):
        seq = cache[j]
        while len(seq) <= l:
            seq.append(seq[-1].derivative())
        return seq[l]

    return get


def _check(side, residual, window):
    """Number of coefficient slots compared; raises on the first nonzero row."""
    checked = 0
    for J in sorted(residual, reverse=True):
        if J < window:
            continue
        series, ceiling = residual[J]
        # known exponents of row J run from the O-bound up to the highest summand
        checked += max(0, ceiling - series.order)
        if not series.is_zero():
            raise ResidualNonzero(
                f"{side} residual is nonzero", side=side, bidegree=(series.leading_exponent, J)
            )
    return checked


def verify_bispectral(L, Lam, f, theta, prec=None, depth=None, K=None):
    """Check L psi = f(z) psi and Lam psi = theta(x) psi for psi = K e^(xz)."""
    depth = config.DEPTH if depth is None else depth
    prec = config.default_precision(L.order) if prec is None else prec
    if K is None:
        K = solve_wave_operator(L, prec, depth)
    alpha = _derivatives(K, depth, prec)

    x_side = {}
    for k, V in L.items().items():
        for i in range(k + 1):
            b = generalized_binomial(k, i)
            for j in range(depth + 1):
                _accumulate(x_side, k - i - j, V * alpha(j, i) * b)
    for e, c in f.terms.items():
        for j in range(depth + 1):
            _accumulate(x_side, e - j, alpha(j, 0) * (-c))
    window_x = max(L.order, f.degree) - depth

    z_side = {}
    a_max = 0
    for i, Li in Lam.items().items():
        if not Li.is_laurent():
            raise UnsupportedCoefficient("Lambda coefficients must be Laurent in z", power=i)
        poly = Li.to_laurent()
        a_max = max(a_max, poly.degree)
        for a, lam in poly.terms.items():
            for l in range(i + 1):
                b = generalized_binomial(i, l)
                for j in range(depth + 1):
                    falling = generalized_binomial(-j, l) * factorial(l)
                    if not falling:
                        continue
                    term = alpha(j, 0).shift(i - l) * (lam * b * falling)
                    _accumulate(z_side, a - j - l, term)
    theta_fn = RationalFunction.from_laurent(theta)
    for j in range(depth + 1):
        _accumulate(z_side, -j, -(theta_fn * alpha(j, 0)))
    window_z = a_max - depth

    checked = {"L": _check("L", x_side, window_x), "Lambda": _check("Lambda", z_side, window_z)}
    logger.info("bispectral residuals vanish on %d + %d coefficients", checked["L"], checked["Lambda"])
    return BispectralCertificate(
        L, Lam, f, theta, Lam.order if not Lam.is_zero() else 0, depth, prec,
        checked, {side: 0 for side in checked},
        zr_invariance(L).maximal, zr_invariance(Lam).maximal if not Lam.is_zero() else None,
    )


# --- string pairs ---

def default_string_bound(L):
    data = indicial_data(L)
    span = max((c.span for c in data.classes), default=0)
    return ceil(span / L.order)


def _exact_operator(Q, L):
    """Rational reconstruction of every coefficient, or None."""
    if L.is_series:
        return None
    terms = {}
    try:
        for k, c in enumerate(Q.coefficients):
            if isinstance(c, SeriesAtInfinity):
                if c.is_zero():
                    continue
                bound = max(1, (-1 - c.order) // 4)
                terms[k] = rational_reconstruct(c, bound)
            else:
                terms[k] = c
    except ReconstructionFailed:
        return None
    return DiffOp.from_dict(terms, Q.domain)


def string_pair(L, K, n_max=None, prec=None):
    """Minimal n with K x d^(nN+1) K^-1 differential, and Q its differential part."""
    N = L.order
    n_max = default_string_bound(L) if n_max is None else n_max
    inverse = psdo_invert(K)
    attempts = []
    for n in range(n_max + 1):
        X = DiffOp.from_dict({n * N + 1: RationalFunction.monomial(1, 1, K.domain)}, K.domain)
        S = K * X * inverse
        if not S.strictly_pseudo_vanishes():
            logger.debug("string number %d rejected: pseudo-differential tail", n)
            attempts.append({"n": n, "outcome": "pseudo-differential tail"})
            continue
        Qs = diff_part(S)
        Q = _exact_operator(Qs, L)
        if Q is not None and commutator(L, Q) == (L ** (n + 1)) * N:
            logger.info("string pair with n = %d verified exactly", n)
            return _checked_pair(StringPair(L, Q, n, True), K)
        residual = commutator(L, Qs) - (L ** (n + 1)) * N
        if residual.is_zero():
            logger.warning("string pair with n = %d verified to precision only", n)
            return _checked_pair(StringPair(L, Qs, n, False), K)
        attempts.append({"n": n, "outcome": "string law fails", "Q": Q if Q is not None else Qs})
    raise NoStringNumber("no string number within the bound", n_max=n_max, attempts=attempts)


def verify_string_identities(L, Q, n, i_max):
    """(ad L)^i (Q^i) = i! N^i L^(i(n+1)) for i = 1..i_max."""
    N = L.order
    report = {}
    for i in range(1, i_max + 1):
        lhs = ad_power(L, Q ** i, i)
        rhs = (L ** (i * (n + 1))) * (factorial(i) * N ** i)
        if not (lhs - rhs).is_zero():
            raise IdentityFailed("string identity fails", index=i)
        report[i] = True
    return report


def zr_invariance(L):
    valid = tuple(r for r in range(1, L.order + 1) if is_zr_invariant(L, r))
    return ZrInvariance(max(valid), valid)


def _weight(op):
    """wt with wt(x) = 1 and wt(d) = -1; None for the zero operator."""
    if op.is_zero():
        return None
    return max(w.ord_at_infinity() for w in op.d_form().values())


def _checked_pair(pair, K):
    """String pairs force ord(alpha_j) <= -j on the wave operator."""
    for j, order in enumerate(K.decay_orders(), start=1):
        if order is not None and order > -j:
            raise InvarianceLost("wave coefficient decays too slowly for a string pair", index=j, order=order)
    return pair


def power_expand(Q, L, string_partner=False):
    """[q_0, ..., q_n] with Q = q_0 L^n + ... + q_n and ord q_i < ord L.

    For a string partner q_0 must be x d and wt(q_i) <= -iN.
    """
    N = L.order
    n = Q.order // N if not Q.is_zero() else 0
    parts = []
    remainder = Q
    for level in range(n, 0, -1):
        if remainder.is_zero() or remainder.order < level * N:
            parts.append(DiffOp.zero(Q.domain))
            continue
        q, remainder = right_divide(remainder, L ** level)
        parts.append(q)
    parts.append(remainder)
    if string_partner:
        if not (parts[0] - DiffOp.euler(Q.domain)).is_zero():
            raise InvarianceLost("leading part of the string partner is not x d", q0=parts[0])
        for i, q in enumerate(parts[1:], start=1):
            w = _weight(q)
            if w is not None and w > -i * N:
                raise InvarianceLost("string partner part has too high a weight", index=i, weight=w)
    return parts


# --- commutant probe ---

def spectral_probe(L, K=None, order_bound=None, depth=None):
    """Operators M = sum c_i P^i commuting with L, P = L^(1/N), within the order bound."""
    if L.is_series:
        raise UnsupportedCoefficient("probe needs rational coefficients")
    order_bound = config.PROBE_BOUND * L.order if order_bound is None else order_bound
    depth = config.DEPTH if depth is None else depth
    dom = L.domain
    P = nth_root(L, depth + order_bound)
    powers = [PsdOp.identity(dom)]
    for _ in range(order_bound):
        powers.append(powers[-1] * P)
    powers = powers[1:]
    floor = max(p.floor for p in powers if p.floor is not None)
    columns = []
    for p in powers:
        columns.append([p.coefficient(j) for j in range(-1, floor - 1, -1)])
    rows = _linear_rows(columns, dom)
    solutions = echelon_by_last(nullspace(rows, order_bound, dom), dom)
    if K is None:
        K = solve_wave_operator(L, config.default_precision(L.order), depth)
    witnesses = []
    for v in solutions:
        M = None
        for c, p in zip(v, powers):
            if c:
                M = p * c if M is None else M + p * c
        M = diff_part(M)
        if not commutator(M, L).is_zero():
            logger.debug("probe candidate of order %d failed the commutator check", M.order)
            continue
        image = bispectral_b1(K, M)
        f = image.coefficient(0)
        f_poly = f.to_laurent()
        expected = LaurentPoly.from_dict({i + 1: c for i, c in enumerate(v) if c}, dom)
        if not (f_poly - expected).is_zero():
            raise InvarianceLost("b1 image of a probe witness disagrees with its symbol", order=M.order, f=f_poly)
        witnesses.append(ProbeWitness(M, f_poly, M.order))
    rank = 0
    for w in witnesses:
        rank = gcd(rank, w.order)
    for w in witnesses:
        stray = [e for e in w.f.terms if e % rank]
        if stray:
            raise InvarianceLost("probe witness is not a polynomial in z^r", r=rank, exponent=stray[0])
    logger.info("probe found %d witnesses up to order %d, rank estimate %d", len(witnesses), order_bound, rank)
    return ProbeReport(witnesses, rank, order_bound)
