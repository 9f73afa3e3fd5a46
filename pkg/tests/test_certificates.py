import json
from pathlib import Path

import pytest
from click.testing import CliRunner
from pydantic import ValidationError

from bessel import BesselParams, bessel_rank
from certificates import Certificate, Term, bessel_certificate, error_document, operator_document
from cli import cli
from errors import ResidualNonzero
from grammar import parse_operator

GOLDEN = Path(__file__).parent / "golden"

RUNS = {
    "bispectral": ["verify", "--op", "d^2 - 2*x^-2", "--prec", "16", "--depth", "16"],
    "string": ["string", "--op", "d^2 - 2*x^-2", "--prec", "16", "--depth", "16"],
    "reduction": ["classify", "--op", "d^2 - 2*x^-2", "--prec", "24", "--depth", "24"],
}


@pytest.mark.parametrize("kind", sorted(RUNS))
def test_golden_certificate(kind):
    expected = json.loads((GOLDEN / f"{kind}.json").read_text(encoding="utf-8"))
    result = CliRunner().invoke(cli, RUNS[kind])
    assert result.exit_code == 0
    document = json.loads(result.stdout)
    for key in ("kind", "inputs", "bounds", "residuals", "verified"):
        assert document[key] == expected[key]
    for key, value in expected["witnesses"].items():
        assert document["witnesses"][key] == value


def test_operator_document_terms():
    doc = operator_document(parse_operator("x*d"))
    assert doc == {"order": 1, "text": "x*d", "terms": [{"dpow": 1, "num": {"1": "1"}, "den": {"0": "1"}}]}


def test_unknown_kind_is_rejected():
    with pytest.raises(ValidationError):
        Certificate(kind="proof", verified=True)


def test_terms_forbid_extra_keys():
    with pytest.raises(ValidationError):
        Term(dpow=0, num={"0": "1"}, weight=3)


def test_error_document():
    doc = error_document(ResidualNonzero("Lambda residual is nonzero", side="Lambda"))
    assert doc["error"]["code"] == "RESIDUAL_NONZERO"
    assert doc["error"]["details"] == {"side": "Lambda"}


def test_bessel_certificate_records_string_law():
    params = BesselParams.of(["-1", "2"])
    cert = bessel_certificate(params, params, None, bessel_rank(params, 4)).dump()
    assert cert["verified"]
    assert cert["residuals"] == {"string_law": "0"}
    assert cert["witnesses"]["shift"] is None
    assert cert["bounds"] == {"rank_bound": 4}
