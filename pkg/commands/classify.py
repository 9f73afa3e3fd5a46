"""
Classify - reduction of an admissible operator to a Bessel operator
"""
import click

from certificates import reduction_certificate
from classify import reduce_to_bessel
from session import finish, load_operator, run_many


def classify_one(session, source, prec=None, depth=None, max_steps=None, rank_bound=None, probe=False):
    L, _ = load_operator(session, source)
    prec, depth = session.with_bounds(prec, depth)
    cert = reduce_to_bessel(L, prec, depth, max_steps, rank_bound, probe)
    return (0 if cert.verified else 1), reduction_certificate(cert).dump()


@click.command(name="classify")
@click.option("--op", "sources", required=True, multiple=True, help="Operator document; repeat for several.")
@click.option("--prec", type=int, default=None)
@click.option("--depth", type=int, default=None)
@click.option("--max-steps", type=int, default=None, help="Largest number of Darboux steps.")
@click.option("--rank-bound", type=int, default=None, help="Order bound for the rank of the final Bessel operator.")
@click.option("--probe", is_flag=True, help="Also estimate the rank of the input from its commutant.")
@click.pass_obj
def classify(session, sources, prec, depth, max_steps, rank_bound, probe):
    """Emit a reduction certificate A B = L^m, B A = L_beta'^m per operator."""
    session.inputs = list(sources)
    results = run_many(
        classify_one, session, session.inputs,
        prec=prec, depth=depth, max_steps=max_steps, rank_bound=rank_bound, probe=probe,
    )
    finish(session, results)


def setup(group):
    group.add_command(classify)
