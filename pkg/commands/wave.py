"""
Wave - the normalized wave operator K with L K = K d^N
"""
import click

import config
from certificates import wave_certificate
from psdo import PsdOp, solve_wave_operator
from session import finish, load_operator


@click.command(name="wave")
@click.option("--op", "source", required=True, help="Operator document (JSON or text file, or inline text).")
@click.option("--prec", type=int, default=None)
@click.option("--depth", type=int, default=None)
@click.pass_obj
def wave(session, source, prec, depth):
    """Emit K = 1 + sum alpha_j d^-j and the decay orders ord(alpha_j)."""
    L, _ = load_operator(session, source)
    prec, depth = session.with_bounds(prec, depth)
    prec = config.default_precision(L.order) if prec is None else prec
    K = solve_wave_operator(L, prec, depth)
    residual = PsdOp.from_diffop(L) * K - K * PsdOp.d_power(L.order, L.domain)
    cert = wave_certificate(L, K, residual, {"prec": prec, "depth": K.depth})
    finish(session, [(0 if cert.verified else 1, cert.dump())])


def setup(group):
    group.add_command(wave)
