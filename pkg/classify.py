"""
Admissibility gate, reduction to a Bessel operator by minimal-root Darboux
steps, and the three-way characterization report.
"""

import logging
from dataclasses import dataclass, field

import config
from bessel import BesselParams, RankWitness, bessel_operator, bessel_rank
from bispectral import build_lambda, find_theta, spectral_probe, string_pair, verify_bispectral, zr_invariance
from darboux import darboux_step, rational_reconstruct
from diffop import (
    DiffOp,
    FuchsianReport,
    PrincipalLevel,
    fuchsian_everywhere,
    indicial_data,
    principal_level,
    right_divide,
)
from errors import (
    NoStringNumber,
    NonzeroStringNumberAtTermination,
    NotAdmissible,
    NotFound,
    ReconstructionFailed,
    StepLimitExceeded,
    ToolkitError,
    UnsupportedFieldSplit,
)
from exactnum import LaurentPoly, SeriesAtInfinity
from psdo import solve_wave_operator

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class AdmissibilityReport:
    monic: bool
    subleading_zero: bool
    vanishing: bool
    decay: bool
    principal: PrincipalLevel = None
    fuchsian: FuchsianReport = None
    reasons: tuple = ()

    @property
    def admissible(self):
        return self.monic and self.subleading_zero and self.vanishing and self.decay


@dataclass(frozen=True, eq=False)
class ReductionCertificate:
    L: DiffOp
    steps: list
    beta: BesselParams
    A: DiffOp
    B: DiffOp
    exact: bool
    ab_verified: bool
    ba_verified: bool
    r: int
    prec: int
    depth: int
    max_steps: int
    rank: RankWitness = None
    probe_rank: int = None

    @property
    def m(self):
        return len(self.steps)

    @property
    def verified(self):
        return self.ab_verified and self.ba_verified


@dataclass(frozen=True)
class Verdict:
    status: str
    detail: str = ""

    @property
    def truth(self):
        """True, False or None for bound-limited negatives."""
        if self.status == "yes":
            return True
        if self.status == "no witness within bounds":
            return None
        return False


@dataclass(frozen=True, eq=False)
class CharacterizationReport:
    L: DiffOp
    verdicts: dict = field(default_factory=dict)

    @property
    def consistent(self):
        truths = {v.truth for v in self.verdicts.values()}
        return not (True in truths and False in truths)


def admissible(L):
    """Monic, V_(N-1) = 0, V_j -> 0 at infinity with ord(V_j) <= -2."""
    reasons = []
    N = L.order
    monic = L.is_monic()
    if not monic:
        reasons.append("leading coefficient is not 1")
    sub = N == 0 or L.coefficient(N - 1).is_zero()
    if not sub:
        reasons.append("subleading coefficient does not vanish")
    lower = {k: v for k, v in L.items().items() if k <= N - 2}
    vanishing = all(v.ord_at_infinity() < 0 for v in lower.values())
    if not vanishing:
        reasons.append("a coefficient does not vanish at infinity")
    decay = all(v.ord_at_infinity() <= -2 for v in lower.values())
    if vanishing and not decay:
        reasons.append("a coefficient decays slower than x^-2")
    principal = principal_level(L) if monic and sub and vanishing else None
    fuchsian = None if L.is_series else fuchsian_everywhere(L)
    return AdmissibilityReport(monic, sub, vanishing, decay, principal, fuchsian, tuple(reasons))


def _measure(offsets):
    low = min(offsets)
    return (max(offsets) - low, offsets.count(low))


def _shifted_offsets(offsets, N):
    rest = list(offsets)
    rest.remove(min(offsets))
    return [min(offsets) + N - 1] + [k - 1 for k in rest]


def _final_beta(L):
    data = indicial_data(L)
    if any(c.degree > 1 for c in data.classes):
        raise UnsupportedFieldSplit("final indicial roots are not in the working field")
    return BesselParams(tuple(data.roots()), L.domain)


def _reconstructed(P, prec):
    c = P.coefficient(0)
    if isinstance(c, SeriesAtInfinity):
        c = rational_reconstruct(c, max(1, (-1 - c.order) // 4))
    return DiffOp.from_dict({1: 1, 0: c}, P.domain)


def _compose(factors, domain):
    result = DiffOp.identity(domain)
    for op in factors:
        result = op * result
    return result


def reduce_to_bessel(L, prec=None, depth=None, max_steps=None, rank_bound=None, probe=False):
    """Darboux steps until every root class has span < N, then certificate assembly."""
    gate = admissible(L)
    if not gate.admissible:
        raise NotAdmissible("operator is outside the admissible class", reasons="; ".join(gate.reasons))
    N = L.order
    span0 = max((c.span for c in indicial_data(L).classes), default=0)
    prec = config.default_precision(N, span0) if prec is None else prec
    depth = config.DEPTH if depth is None else depth
    max_steps = config.default_max_steps(N, span0) if max_steps is None else max_steps
    r = zr_invariance(L).maximal
    K = solve_wave_operator(L, prec, depth)
    current = L
    steps = []
    while True:
        actionable = [c for c in indicial_data(current).classes if c.span >= N]
        if not actionable:
            break
        if len(steps) >= max_steps:
            raise StepLimitExceeded("step limit reached", steps=len(steps), max_steps=max_steps)
        chosen = actionable[0]
        before = _measure(list(chosen.offsets))
        after = _measure(_shifted_offsets(chosen.offsets, N))
        logger.info("step %d: class span %d, multiplicity %d at the minimum", len(steps) + 1, *before)
        current, K, record = darboux_step(current, K, chosen, r, prec)
        if not after < before:
            raise StepLimitExceeded("progress measure did not decrease", step=len(steps) + 1)
        steps.append(record)

    try:
        pair = string_pair(current, K, n_max=0)
    except NoStringNumber as e:
        raise NonzeroStringNumberAtTermination(
            "terminal operator has no string pair with n = 0",
            steps=steps, terminal=current, string_attempts=e.details.get("attempts", []),
            prec=prec, depth=depth,
        ) from e
    attempt = [{"n": pair.n, "outcome": "verified", "Q": pair.Q, "exact": pair.exact}]
    euler = DiffOp.euler(current.domain)
    if not (pair.Q - euler).is_zero():
        raise NonzeroStringNumberAtTermination(
            "terminal string partner is not x d", steps=steps, terminal=current, string_attempts=attempt
        )
    beta = _final_beta(current)
    if not (current - bessel_operator(beta)).is_zero():
        raise NonzeroStringNumberAtTermination(
            "terminal operator is not a Bessel operator",
            steps=steps, terminal=current, string_attempts=attempt, beta=beta.describe(),
        )

    dom = current.domain
    L_dom = L.convert(dom)
    m = len(steps)
    exact = True
    try:
        Ps = [_reconstructed(rec.P, prec) for rec in steps]
    except ReconstructionFailed:
        if config.REQUIRE_EXACT:
            raise
        logger.warning("reconstruction failed; certificate is series-verified at precision %d", prec)
        exact = False
        Ps = [rec.P for rec in steps]
    B = _compose(Ps, dom)
    Lm = L_dom ** m
    target = bessel_operator(beta) ** m
    if exact:
        if m:
            A, remainder = right_divide(Lm, B)
            if not remainder.is_zero():
                raise ReconstructionFailed("composed factor does not divide L^m", steps=m)
        else:
            A = DiffOp.identity(dom)
    else:
        A = DiffOp.identity(dom)
        for rec in steps:
            A = A * rec.Q
    ab = (A * B - Lm).is_zero()
    ba = (B * A - target).is_zero()
    if exact and not ba:
        raise ReconstructionFailed("B A differs from the Bessel power", steps=m)
    rank = bessel_rank(beta, max(rank_bound or config.RANK_BOUND, N))
    probe_rank = spectral_probe(L).rank if probe else None
    logger.info("reduced to beta %s in %d steps", beta.describe(), m)
    return ReductionCertificate(
        L, steps, beta, A, B, exact, ab, ba, r, prec, depth, max_steps, rank, probe_rank
    )


def characterization_report(L, max_deg=None, max_m=None, prec=None, depth=None, max_steps=None):
    """Bispectrality, Fuchsian test and reduction verdicts side by side."""
    verdicts = {}
    gate = admissible(L)

    if not gate.admissible:
        verdicts["bispectral"] = Verdict("rejected", "; ".join(gate.reasons))
    else:
        try:
            theta, m = find_theta(L, max_deg, max_m)
            depth_b = config.DEPTH if depth is None else depth
            prec_b = config.default_precision(L.order) if prec is None else prec
            K = solve_wave_operator(L, prec_b, depth_b)
            Lam = build_lambda(L, K, theta, prec_b, depth_b)
            f = LaurentPoly.monomial(L.order, 1, L.domain)
            verify_bispectral(L, Lam, f, theta, prec_b, depth_b, K)
            verdicts["bispectral"] = Verdict("yes", f"theta of degree {theta.degree}, m = {m}")
        except NotFound as e:
            verdicts["bispectral"] = Verdict("no witness within bounds", e.message)
        except ToolkitError as e:
            verdicts["bispectral"] = Verdict("no", e.code)

    if L.is_series:
        verdicts["fuchsian"] = Verdict("no witness within bounds", "series coefficients")
    else:
        report = fuchsian_everywhere(L)
        bad = [p.factor for p in report.points if not p.regular]
        if not report.infinity_regular:
            bad.append("infinity")
        verdicts["fuchsian"] = Verdict("yes" if report.fuchsian else "no", ", ".join(bad))

    try:
        cert = reduce_to_bessel(L, prec, depth, max_steps)
        verdicts["reduction"] = Verdict("yes", f"beta' = ({', '.join(cert.beta.describe())}), m = {cert.m}")
    except (NotAdmissible, NonzeroStringNumberAtTermination) as e:
        verdicts["reduction"] = Verdict("rejected", e.code)
    except StepLimitExceeded as e:
        verdicts["reduction"] = Verdict("no witness within bounds", e.code)
    except ToolkitError as e:
        verdicts["reduction"] = Verdict("no", e.code)

    report = CharacterizationReport(L, verdicts)
    if not report.consistent:
        logger.warning("characterization verdicts disagree: %s", {k: v.status for k, v in verdicts.items()})
    return report
