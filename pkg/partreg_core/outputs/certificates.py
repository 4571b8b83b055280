"""
JSON certificates: every command's result as a versioned, self-contained document.

Each document carries "schema": "v1" and a "kind" tag. Rationals are written as
"p/q" strings. Documents include whatever an independent checker needs to
recheck the claim (the system, the colouring spec, the inputs).
"""

import json
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from partreg_core.colouring.rules import Colouring
from partreg_core.colouring.search import SolutionReport
from partreg_core.config import EngineConfig
from partreg_core.logging import get_logger
from partreg_core.model.ratlin import RatMatrix, format_rational
from partreg_core.model.systems import CoefficientSequence, LinearSystem
from partreg_core.reasoning.columns import PartitionCertificate
from partreg_core.reasoning.trace import SolverTrace
from partreg_core.reasoning.witnesses import ImageEvaluation, ObstructionReport, ViolationReport
from partreg_core.sumsets.stabilize import CosetReport, StabilizationReport
from partreg_core.validation import InvariantViolation

logger = get_logger(__name__)

SCHEMA_VERSION = "v1"

KINDS = (
    "columns-certificate",
    "bad-colouring",
    "mono-solution",
    "stabilization-report",
    "coset-report",
    "solver-trace",
    "mod3-obstruction",
    "iprnz-violation",
    "image-expressions",
    "selftest",
)


def envelope(kind: str, payload: Dict[str, Any]) -> Dict[str, Any]:
    """Wrap a payload with the schema version and kind tag."""
    if kind not in KINDS:
        raise InvariantViolation(f"Unknown certificate kind {kind!r}")
    return {"schema": SCHEMA_VERSION, "kind": kind, **payload}


def columns_document(matrix: RatMatrix, cert: Optional[PartitionCertificate]) -> Dict[str, Any]:
    return envelope(
        "columns-certificate",
        {
            "matrix": matrix.to_dict(),
            "has_property": cert is not None,
            "certificate": cert.to_dict() if cert else None,
        },
    )


def bad_colouring_document(
    system: LinearSystem, r: int, n: int, colouring: Optional[Colouring], distinct: bool = False
) -> Dict[str, Any]:
    return envelope(
        "bad-colouring",
        {
            "system": system.to_dict(),
            "r": r,
            "N": n,
            "distinct": distinct,
            "found": colouring is not None,
            "colours": colouring.level_colours(0).tolist() if colouring else None,
        },
    )


def mono_solution_document(
    system: LinearSystem,
    colouring: Colouring,
    report: Optional[SolutionReport],
    bound: int,
    distinct: bool = False,
) -> Dict[str, Any]:
    return envelope(
        "mono-solution",
        {
            "system": system.to_dict(),
            "colouring": colouring.to_dict(),
            "bound": bound,
            "distinct": distinct,
            "found": report is not None,
            "solution": report.to_dict() if report else None,
        },
    )


def stabilization_document(
    report: Union[StabilizationReport, CosetReport],
    set_spec: str,
    window: int,
    mode: str,
    config: EngineConfig,
    levels: int = 1,
    k: Optional[int] = None,
) -> Dict[str, Any]:
    kind = "coset-report" if isinstance(report, CosetReport) else "stabilization-report"
    return envelope(
        kind,
        {
            "set": set_spec,
            "window": window,
            "mode": mode,
            "levels": levels,
            "k": k,
            "config": config.to_dict(),
            "report": report.to_dict(),
        },
    )


def solver_document(
    system: LinearSystem,
    colouring: Colouring,
    seq: CoefficientSequence,
    report: SolutionReport,
    trace: SolverTrace,
) -> Dict[str, Any]:
    return envelope(
        "solver-trace",
        {
            "system": system.to_dict(),
            "colouring": colouring.to_dict(),
            "sequence": seq.to_dict(),
            "solution": report.to_dict(),
            "trace": trace.to_dict(),
        },
    )


def obstruction_document(report: ObstructionReport) -> Dict[str, Any]:
    return envelope("mod3-obstruction", report.to_dict())


def violation_document(report: ViolationReport, y: Any, x: Any) -> Dict[str, Any]:
    if isinstance(x, dict):
        x_payload: Any = {k: format_rational(v) for k, v in x.items()}
    else:
        x_payload = format_rational(x)
    return envelope(
        "iprnz-violation",
        {"input": {"delta": format_rational(report.delta), "y": format_rational(y), "x": x_payload}, "report": report.to_dict()},
    )


def image_document(n: int, values: Dict[str, Any], evaluation: ImageEvaluation, seq: CoefficientSequence) -> Dict[str, Any]:
    return envelope(
        "image-expressions",
        {
            "n": n,
            "sequence": seq.to_dict(),
            "assignment": {k: format_rational(v) for k, v in values.items()},
            **evaluation.to_dict(),
        },
    )


def selftest_document(results: List[Dict[str, Any]], quick: bool) -> Dict[str, Any]:
    return envelope(
        "selftest",
        {"quick": quick, "passed": all(r["passed"] for r in results), "criteria": results},
    )


def dumps(document: Dict[str, Any]) -> str:
    return json.dumps(document, indent=2)


def write_document(document: Dict[str, Any], out: Optional[str] = None) -> None:
    """Write a document to a file, or to stdout when out is None or "-"."""
    text = dumps(document)
    if out is None or out == "-":
        sys.stdout.write(text + "\n")
        return
    Path(out).write_text(text + "\n", encoding="utf-8")
    logger.info(f"{document['kind']} written to {out}")


def load_document(path: str) -> Dict[str, Any]:
    """
    Read a certificate and check its envelope.

    Raises:
        InvariantViolation: If the schema or kind is missing or unknown
    """
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise InvariantViolation(f"{path} is not valid JSON: {e}")
    if not isinstance(data, dict) or data.get("schema") != SCHEMA_VERSION:
        raise InvariantViolation(f"{path}: schema must be {SCHEMA_VERSION!r}")
    if data.get("kind") not in KINDS:
        raise InvariantViolation(f"{path}: unknown kind {data.get('kind')!r}")
    return data
