"""
String - string pairs [L, Q] = N L^(n+1) and their higher identities
"""
import click

import config
from bispectral import default_string_bound, power_expand, string_pair, verify_string_identities
from certificates import string_certificate
from psdo import solve_wave_operator
from session import finish, load_operator


@click.command(name="string")
@click.option("--op", "source", required=True, help="Operator document (JSON or text file, or inline text).")
@click.option("--n-max", type=int, default=None, help="Largest string number tried.")
@click.option("--i-max", type=int, default=3, show_default=True, help="Highest identity index checked.")
@click.option("--prec", type=int, default=None)
@click.option("--depth", type=int, default=None)
@click.pass_obj
def string(session, source, n_max, i_max, prec, depth):
    """Find the minimal string number n and the partner Q = (K x d^(nN+1) K^-1)_+."""
    L, _ = load_operator(session, source)
    prec, depth = session.with_bounds(prec, depth)
    prec = config.default_precision(L.order) if prec is None else prec
    n_max = default_string_bound(L) if n_max is None else n_max
    K = solve_wave_operator(L, prec, depth)
    pair = string_pair(L, K, n_max, prec)
    identities = verify_string_identities(L, pair.Q, pair.n, i_max) if pair.exact else {}
    parts = power_expand(pair.Q, L, string_partner=True) if pair.exact else None
    bounds = {"prec": prec, "depth": depth, "n_max": n_max, "i_max": i_max}
    cert = string_certificate(pair, identities, bounds, parts)
    finish(session, [(0 if cert.verified else 1, cert.dump())])


def setup(group):
    group.add_command(string)
