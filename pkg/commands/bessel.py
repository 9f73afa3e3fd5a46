"""
Bessel - generalized Bessel operators and their rank witnesses
"""
import click

import config
from bessel import BesselParams, bessel_rank, normalize_beta
from certificates import bessel_certificate
from grammar import parse_scalar_list
from session import finish


@click.command(name="bessel")
@click.option("--beta", required=True, help='Comma-separated exponents, e.g. "-1,2".')
@click.option("--normalize", is_flag=True, help="Shift beta so that its sum is N(N-1)/2.")
@click.option("--rank-bound", type=int, default=None, help="Largest order searched for commuting operators.")
@click.pass_obj
def bessel(session, beta, normalize, rank_bound):
    """Emit L_beta = x^-N (D - beta_1)...(D - beta_N) with a rank report."""
    values = parse_scalar_list(beta, session.domain)
    if not values:
        raise click.BadParameter("beta needs at least one exponent", param_hint="--beta")
    given = BesselParams(tuple(values), session.domain)
    params, shift = normalize_beta(given) if normalize else (given, None)
    bound = max(config.RANK_BOUND if rank_bound is None else rank_bound, params.order)
    rank = bessel_rank(params, bound)
    cert = bessel_certificate(given, params, shift, rank)
    finish(session, [(0 if cert.verified else 1, cert.dump())])


def setup(group):
    group.add_command(bessel)
