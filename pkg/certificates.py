"""
JSON documents emitted by the CLI.

Every certificate has the shape {kind, inputs, bounds, witnesses, residuals,
verified}. Scalars are exact strings ("p/q" or extension elements in the
generator ``a``); bounds and counters are integers.
"""

from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from bessel import bessel_operator
from darboux import DarbouxStepRecord
from diffop import DiffOp, commutator
from exactnum import format_scalar
from grammar import format_kernel, laurent_to_json, operator_to_json, psdo_to_json


class Term(BaseModel):
    model_config = ConfigDict(extra="forbid")

    dpow: int
    num: Optional[Dict[str, str]] = None
    den: Optional[Dict[str, str]] = None
    series: Optional[Dict[str, str]] = None
    order: Optional[int] = None


class OperatorDocument(BaseModel):
    order: Optional[int] = None
    floor: Optional[int] = None
    text: str
    terms: List[Term] = Field(default_factory=list)


class Certificate(BaseModel):
    kind: Literal["bessel", "darboux", "bispectral", "string", "reduction", "report", "wave"]
    inputs: Dict[str, Any] = Field(default_factory=dict)
    bounds: Dict[str, Optional[int]] = Field(default_factory=dict)
    witnesses: Dict[str, Any] = Field(default_factory=dict)
    residuals: Dict[str, str] = Field(default_factory=dict)
    verified: bool

    def dump(self):
        return self.model_dump(mode="json")


class ErrorBody(BaseModel):
    code: str
    message: str
    details: Dict[str, Any] = Field(default_factory=dict)


class ErrorDocument(BaseModel):
    error: ErrorBody


def operator_document(L):
    return OperatorDocument.model_validate(operator_to_json(L)).model_dump(mode="json", exclude_none=True)


def psdo_document(P):
    return OperatorDocument.model_validate(psdo_to_json(P)).model_dump(mode="json", exclude_none=True)


def step_document(rec):
    return {
        "root": format_scalar(rec.lam),
        "class_span": rec.root_class.span,
        "P": operator_document(rec.P),
        "roots_match": rec.roots_match,
    }


def _detail_json(value):
    """Operators and step records as documents, containers recursively, the rest as text."""
    if value is None or isinstance(value, (bool, int, str)):
        return value
    if isinstance(value, DiffOp):
        return operator_document(value)
    if isinstance(value, DarbouxStepRecord):
        return step_document(value)
    if isinstance(value, dict):
        return {str(k): _detail_json(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_detail_json(v) for v in value]
    return str(value)


def error_document(error):
    body = error.to_dict()
    body["details"] = _detail_json(body["details"])
    return ErrorDocument(error=ErrorBody(**body)).model_dump(mode="json")


def residual_text(op):
    """"0" for a vanishing residual, otherwise the printed operator."""
    return "0" if op.is_zero() else str(op)


# --- builders ---

def bessel_certificate(given, params, shift, rank):
    """Operator, normalization shift, rank witnesses and the string law [L, x d] = N L."""
    L = bessel_operator(params)
    string_law = commutator(L, DiffOp.euler(params.domain)) - L * params.order
    return Certificate(
        kind="bessel",
        inputs={"beta": given.describe()},
        bounds={"rank_bound": rank.bound},
        witnesses={
            "operator": operator_document(L),
            "beta": params.describe(),
            "shift": format_scalar(shift) if shift is not None else None,
            "normalized": params.is_normalized(),
            "rank": rank.rank,
            "rank_is_upper_bound": rank.upper_bound,
            "commuting_orders": [s for s, _ in rank.witnesses],
        },
        residuals={"string_law": residual_text(string_law)},
        verified=string_law.is_zero(),
    )


def darboux_certificate(transform, residuals, shape=None):
    spec = transform.kernel.spec
    return Certificate(
        kind="darboux",
        inputs={
            "base": spec.base.describe(),
            "power": spec.power,
            "kernel": [format_kernel(f) for f in spec.basis],
            "out_power": transform.power_out,
        },
        bounds={"power": spec.power, "out_power": transform.power_out},
        witnesses={
            "kernel_basis": [format_kernel(f) for f in transform.kernel.basis],
            "P": operator_document(transform.P),
            "Q": operator_document(transform.Q),
            "L": operator_document(transform.L),
            "dt_shape": None if shape is None else {
                "shape_ok": shape.shape_ok, "residue": shape.residue, "modulus": shape.modulus,
            },
        },
        residuals={k: residual_text(v) for k, v in residuals.items()},
        verified=all(v.is_zero() for v in residuals.values()),
    )


def bispectral_certificate(cert, bounds):
    return Certificate(
        kind="bispectral",
        inputs={"L": operator_document(cert.L)},
        bounds={"prec": cert.prec, "depth": cert.depth, **bounds},
        witnesses={
            "Lambda": operator_document(cert.Lam),
            "f": laurent_to_json(cert.f),
            "theta": laurent_to_json(cert.theta),
            "m": cert.m,
            "zr_L": cert.zr_L,
            "zr_Lambda": cert.zr_Lam,
            "checked": cert.checked,
        },
        residuals={k: str(v) for k, v in cert.residuals.items()},
        verified=cert.verified,
    )


def string_certificate(pair, identities, bounds, parts=None):
    return Certificate(
        kind="string",
        inputs={"L": operator_document(pair.L)},
        bounds=bounds,
        witnesses={
            "n": pair.n,
            "Q": operator_document(pair.Q),
            "exact": pair.exact,
            "identities": {str(i): ok for i, ok in identities.items()},
            "power_expansion": [operator_document(q) for q in parts] if parts else None,
        },
        residuals={f"identity_{i}": "0" if ok else "nonzero" for i, ok in identities.items()},
        verified=pair.exact and all(identities.values()),
    )


def reduction_certificate(cert):
    steps = [step_document(rec) for rec in cert.steps]
    witnesses = {
        "beta": cert.beta.describe(),
        "m": cert.m,
        "steps": steps,
        "A": operator_document(cert.A),
        "B": operator_document(cert.B),
        "exact": cert.exact,
        "r": cert.r,
        "rank": cert.rank.rank if cert.rank is not None else None,
        "probe_rank": cert.probe_rank,
    }
    return Certificate(
        kind="reduction",
        inputs={"L": operator_document(cert.L)},
        bounds={"prec": cert.prec, "depth": cert.depth, "max_steps": cert.max_steps},
        witnesses=witnesses,
        residuals={
            "AB - L^m": "0" if cert.ab_verified else "nonzero",
            "BA - L_beta^m": "0" if cert.ba_verified else "nonzero",
        },
        verified=cert.verified,
    )


def report_certificate(report, bounds):
    verdicts = {k: {"status": v.status, "detail": v.detail} for k, v in report.verdicts.items()}
    return Certificate(
        kind="report",
        inputs={"L": operator_document(report.L)},
        bounds=bounds,
        witnesses={"verdicts": verdicts, "consistent": report.consistent},
        verified=report.consistent,
    )


def wave_certificate(L, K, residual, bounds):
    return Certificate(
        kind="wave",
        inputs={"L": operator_document(L)},
        bounds=bounds,
        witnesses={"K": psdo_document(K), "decay_orders": K.decay_orders()},
        residuals={"LK - K d^N": residual_text(residual)},
        verified=residual.is_zero(),
    )
