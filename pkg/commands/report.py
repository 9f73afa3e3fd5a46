"""
Report - bispectrality, Fuchsian test and reduction side by side
"""
import logging

import click
import pandas as pd

from certificates import report_certificate
from classify import characterization_report
from session import finish, load_operator, run_many

logger = logging.getLogger(__name__)

VERDICT_KEYS = ("bispectral", "fuchsian", "reduction")


def report_one(session, source, theta_deg=None, max_m=None, prec=None, depth=None, max_steps=None):
    L, _ = load_operator(session, source)
    prec, depth = session.with_bounds(prec, depth)
    report = characterization_report(L, theta_deg, max_m, prec, depth, max_steps)
    bounds = {"theta_max_deg": theta_deg, "theta_max_m": max_m, "prec": prec, "depth": depth, "max_steps": max_steps}
    return (0 if report.consistent else 1), report_certificate(report, bounds).dump()


def verdict_table(sources, documents):
    rows = []
    for source, doc in zip(sources, documents):
        row = {"source": source, "operator": doc.get("inputs", {}).get("L", {}).get("text", "")}
        verdicts = doc.get("witnesses", {}).get("verdicts", {})
        for key in VERDICT_KEYS:
            row[key] = verdicts.get(key, {}).get("status", "error")
        row["consistent"] = doc.get("witnesses", {}).get("consistent", False)
        rows.append(row)
    return pd.DataFrame(rows, columns=["source", "operator", *VERDICT_KEYS, "consistent"])


@click.command(name="report")
@click.option("--op", "sources", required=True, multiple=True, help="Operator document; repeat for several.")
@click.option("--theta-deg", type=int, default=None)
@click.option("--max-m", type=int, default=None)
@click.option("--prec", type=int, default=None)
@click.option("--depth", type=int, default=None)
@click.option("--max-steps", type=int, default=None)
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False), default=None, help="Also export the verdict table.")
@click.pass_obj
def report(session, sources, theta_deg, max_m, prec, depth, max_steps, csv_path):
    """Emit the three verdicts for each operator; they agree on admissible input."""
    session.inputs = list(sources)
    results = run_many(
        report_one, session, session.inputs,
        theta_deg=theta_deg, max_m=max_m, prec=prec, depth=depth, max_steps=max_steps,
    )
    if csv_path:
        df = verdict_table(session.inputs, [doc for _, doc in results])
        df.to_csv(csv_path, index=False)
        logger.info("✅ verdict table written to %s", csv_path)
    finish(session, results)


def setup(group):
    group.add_command(report)
