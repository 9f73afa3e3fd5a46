import json

import pandas as pd
import pytest
from click.testing import CliRunner

import classify
from bispectral import StringPair
from cli import cli
from grammar import parse_operator

BESSEL = "d^2 - 2*x^-2"


@pytest.fixture
def run():
    runner = CliRunner()

    def invoke(*args):
        return runner.invoke(cli, list(args))

    return invoke


def _document(result):
    return json.loads(result.stdout)


def test_commands_are_discovered():
    assert {"bessel", "darboux", "verify", "string", "classify", "report", "wave"} <= set(cli.commands)


def test_bessel_command(run):
    result = run("bessel", "--beta", "-1,2")
    assert result.exit_code == 0
    doc = _document(result)
    assert doc["kind"] == "bessel"
    assert doc["witnesses"]["operator"]["text"] == BESSEL
    assert doc["witnesses"]["rank"] == 1
    assert doc["residuals"] == {"string_law": "0"}


def test_bessel_normalize(run):
    doc = _document(run("bessel", "--beta", "0,0", "--normalize"))
    assert doc["witnesses"]["beta"] == ["1/2", "1/2"]
    assert doc["witnesses"]["shift"] == "1/2"


def test_darboux_command(run):
    result = run("darboux", "--base", "0,1", "--kernel", "x")
    assert result.exit_code == 0
    doc = _document(result)
    assert doc["witnesses"]["L"]["text"] == BESSEL
    assert doc["verified"]


def test_classify_from_file(run, tmp_path):
    path = tmp_path / "bessel.json"
    path.write_text(json.dumps({"text": BESSEL}), encoding="utf-8")
    result = run("classify", "--op", str(path), "--prec", "24", "--depth", "24")
    assert result.exit_code == 0
    doc = _document(result)
    assert doc["kind"] == "reduction"
    assert doc["witnesses"]["beta"] == ["0", "1"]
    assert doc["witnesses"]["m"] == 1


def test_faulty_lambda_fails_verification(run, tmp_path):
    path = tmp_path / "faulty.json"
    path.write_text(
        json.dumps({"text": BESSEL, "lambda": "d^2 - 3*x^-2", "theta": {"2": "1"}}), encoding="utf-8"
    )
    result = run("verify", "--op", str(path), "--prec", "16", "--depth", "16")
    assert result.exit_code == 1
    assert _document(result)["error"]["code"] == "RESIDUAL_NONZERO"


def test_syntax_error_is_a_usage_error(run):
    result = run("wave", "--op", "d^2 +")
    assert result.exit_code == 2
    assert _document(result)["error"]["code"] == "SYNTAX_ERROR"


def test_wave_command(run):
    result = run("wave", "--op", BESSEL, "--depth", "4")
    assert result.exit_code == 0
    doc = _document(result)
    assert doc["witnesses"]["decay_orders"] == [-1, None, None, None]
    assert doc["bounds"]["depth"] == 4


def test_string_command(run):
    doc = _document(run("string", "--op", BESSEL, "--prec", "16", "--depth", "16"))
    assert doc["witnesses"]["n"] == 0
    assert doc["witnesses"]["Q"]["text"] == "x*d"
    assert doc["verified"]


def test_report_with_csv(run, tmp_path):
    csv_path = tmp_path / "verdicts.csv"
    result = run("report", "--op", BESSEL, "--op", "d^2 - x", "--csv", str(csv_path))
    assert result.exit_code == 0
    docs = _document(result)
    assert [d["witnesses"]["consistent"] for d in docs] == [True, True]
    table = pd.read_csv(csv_path)
    assert len(table) == 2
    assert list(table["reduction"]) == ["yes", "rejected"]


def test_output_file(run, tmp_path):
    out = tmp_path / "bessel.json"
    result = run("-o", str(out), "bessel", "--beta", "1/4,3/4")
    assert result.exit_code == 0
    doc = json.loads(out.read_text(encoding="utf-8"))
    assert doc["witnesses"]["rank"] == 2


def test_terminal_failure_document_carries_the_chain(run, monkeypatch):
    partner = parse_operator("x*d + 1")
    monkeypatch.setattr(classify, "string_pair", lambda L, K, n_max=None, prec=None: StringPair(L, partner, 0, True))
    result = run("classify", "--op", "d^2 + 3/16*x^-2")
    assert result.exit_code == 1
    error = _document(result)["error"]
    assert error["code"] == "NONZERO_STRING_NUMBER_AT_TERMINATION"
    assert error["details"]["steps"] == []
    assert error["details"]["terminal"]["text"] == "d^2 + 3/16*x^-2"
    assert error["details"]["string_attempts"][0]["Q"]["text"] == "x*d + 1"
