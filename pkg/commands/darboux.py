"""
Darboux - monomial Darboux transformations of Bessel operators
"""
import click

from bessel import BesselParams, bessel_operator
from certificates import darboux_certificate
from darboux import KernelSpec, dt_shape, monomial_darboux
from grammar import parse_kernel_list, parse_scalar_list
from session import finish

FAMILY_BASES = {1: ["0", "1"], 2: ["1/2", "1/2"]}


@click.command(name="darboux")
@click.option("--base", default=None, help='Bessel exponents of the base operator, e.g. "0,1".')
@click.option("--family", type=click.Choice(["1", "2"]), default=None, help="Order-two family instead of --base.")
@click.option("--power", type=int, default=1, show_default=True, help="Power d of the base operator.")
@click.option("--kernel", required=True, help='Kernel functions separated by ";", e.g. "x; x^3 - 2".')
@click.option("--out-power", type=int, default=None, help="Power d' with L^d' = P Q (defaults to d).")
@click.pass_obj
def darboux(session, base, family, power, kernel, out_power):
    """Emit P, Q and the transformed operator for a kernel inside ker L_beta^d."""
    if (base is None) == (family is None):
        raise click.UsageError("give exactly one of --base and --family")
    exponents = FAMILY_BASES[int(family)] if family else parse_scalar_list(base, session.domain)
    params = BesselParams.of(exponents, session.domain)
    spec = KernelSpec(params, power, tuple(parse_kernel_list(kernel, session.domain)))
    transform = monomial_darboux(spec, out_power)
    residuals = {
        "QP - L_beta^d": transform.Q * transform.P - bessel_operator(params) ** power,
        "L^d' - PQ": transform.L ** transform.power_out - transform.P * transform.Q,
    }
    shape = dt_shape(transform.P, params.order)
    cert = darboux_certificate(transform, residuals, shape)
    finish(session, [(0 if cert.verified else 1, cert.dump())])


def setup(group):
    group.add_command(darboux)
