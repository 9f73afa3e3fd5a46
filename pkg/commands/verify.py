"""
Verify - two-sided bispectral certificates
"""
import click

import config
from bispectral import build_lambda, find_theta, verify_bispectral
from certificates import bispectral_certificate
from exactnum import LaurentPoly
from grammar import laurent_from_json, operator_from_json
from psdo import solve_wave_operator
from session import finish, load_operator


def _supplied_witnesses(doc, L, domain):
    """Lambda, f and theta given next to the operator, or None."""
    if "lambda" not in doc:
        return None
    lam_doc = doc["lambda"]
    Lam = operator_from_json({"text": lam_doc} if isinstance(lam_doc, str) else lam_doc, domain)
    if "theta" not in doc:
        raise click.BadParameter("a supplied lambda needs theta", param_hint="--op")
    theta = laurent_from_json(doc["theta"], domain)
    f = laurent_from_json(doc["f"], domain) if "f" in doc else LaurentPoly.monomial(L.order, 1, domain)
    return Lam, f, theta


@click.command(name="verify")
@click.option("--op", "source", required=True, help="Operator document (JSON or text file, or inline text).")
@click.option("--theta-deg", type=int, default=None, help="Largest theta degree searched.")
@click.option("--max-m", type=int, default=None, help="Largest ad-nilpotency order searched.")
@click.option("--prec", type=int, default=None)
@click.option("--depth", type=int, default=None)
@click.pass_obj
def verify(session, source, theta_deg, max_m, prec, depth):
    """Check L psi = z^N psi and Lambda psi = theta(x) psi on the truncated wave function."""
    L, doc = load_operator(session, source)
    prec, depth = session.with_bounds(prec, depth)
    prec = config.default_precision(L.order) if prec is None else prec
    theta_deg = config.THETA_MAX_DEG if theta_deg is None else theta_deg
    max_m = config.THETA_MAX_M if max_m is None else max_m
    K = solve_wave_operator(L, prec, depth)
    supplied = _supplied_witnesses(doc, L, session.domain)
    if supplied is None:
        theta, _ = find_theta(L, theta_deg, max_m)
        Lam = build_lambda(L, K, theta, prec, depth)
        f = LaurentPoly.monomial(L.order, 1, session.domain)
    else:
        Lam, f, theta = supplied
    cert = verify_bispectral(L, Lam, f, theta, prec, depth, K)
    document = bispectral_certificate(cert, {"theta_max_deg": theta_deg, "theta_max_m": max_m}).dump()
    finish(session, [(0 if cert.verified else 1, document)])


def setup(group):
    group.add_command(verify)
