"""
Command implementations behind the partreg CLI.

Each run_* function takes the parsed arguments and returns the certificate
document it produced. Exit codes are decided by the caller from the
exceptions raised here.
"""

import argparse
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

from partreg_core.colouring.rules import parse_colouring
from partreg_core.colouring.search import find_mono_solution, search_bad_colouring
from partreg_core.config import EngineConfig
from partreg_core.ingestion.dsl import load_system, parse_system
from partreg_core.ingestion.specs import stabilize_spec
from partreg_core.logging import get_logger
from partreg_core.model.ratlin import RatMatrix, parse_rational
from partreg_core.model.systems import (
    CoefficientSequence,
    LinearSystem,
    SystemFamily,
    default_sequence,
    generate_prefix,
    image_variables,
)
from partreg_core.outputs import certificates
from partreg_core.outputs.verify import verify_document
from partreg_core.reasoning.columns import columns_property
from partreg_core.reasoning.solver import recheck_trace, solve
from partreg_core.reasoning.witnesses import image_expressions, verify_iprnz, verify_mod3_obstruction
from partreg_core.validation import ContractViolation, InternalError, SearchLimits

logger = get_logger(__name__)

FAMILIES = {
    "a": SystemFamily.SYSTEM_A,
    "b": SystemFamily.SYSTEM_B,
    "c": SystemFamily.SYSTEM_C,
}


def parse_matrix(text: str) -> RatMatrix:
    """Rows separated by ';', entries by ',' (e.g. "1,1,-1;2,0,1/2")."""
    rows = [[parse_rational(entry) for entry in row.split(",")] for row in text.split(";") if row.strip()]
    if not rows:
        raise ContractViolation("Matrix has no rows")
    return RatMatrix.from_rows(rows)


def system_from_args(args: argparse.Namespace) -> LinearSystem:
    """The system named by --system, --system-file or --family with -n."""
    if getattr(args, "system_file", None):
        return load_system(args.system_file)
    if getattr(args, "system", None):
        return parse_system(args.system.replace(";", "\n"))
    if getattr(args, "family", None) and getattr(args, "n", None):
        family = FAMILIES[args.family]
        seq = CoefficientSequence.parse(args.seq) if getattr(args, "seq", None) else None
        return generate_prefix(family, args.n, seq)
    raise ContractViolation("Give a system with --system, --system-file or --family and -n")


def load_assignment(path: str) -> Dict[str, Any]:
    """Read a YAML (or JSON) mapping of variable names to rationals."""
    data = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
    if not isinstance(data, dict):
        raise ContractViolation(f"{path} must contain a mapping of variable names to values")
    return {str(k): parse_rational(str(v)) for k, v in data.items()}


def run_check_columns(args: argparse.Namespace, config: EngineConfig, limits: SearchLimits) -> dict:
    if args.matrix:
        matrix = parse_matrix(args.matrix)
    else:
        matrix = system_from_args(args).matrix
    cert = columns_property(matrix, args.max_cols or limits.max_columns)
    return certificates.columns_document(matrix, cert)


def run_search_bad(args: argparse.Namespace, config: EngineConfig, limits: SearchLimits) -> dict:
    system = system_from_args(args)
    colouring = search_bad_colouring(system, args.r, args.window, args.distinct, limits)
    return certificates.bad_colouring_document(system, args.r, args.window, colouring, args.distinct)


def run_find_solution(args: argparse.Namespace, config: EngineConfig, limits: SearchLimits) -> dict:
    system = system_from_args(args)
    col = parse_colouring(args.colouring, args.window, args.max_level)
    bound = args.bound or min(config.search_bound, max(abs(col.domain.lo), abs(col.domain.hi)))
    report = find_mono_solution(system, col, bound, args.distinct, args.level, limits=limits)
    return certificates.mono_solution_document(system, col, report, bound, args.distinct)


def run_sumset_stabilize(args: argparse.Namespace, config: EngineConfig, limits: SearchLimits) -> dict:
    mode = "dyadic" if args.dyadic else args.mode
    report = stabilize_spec(args.set, args.window, mode, args.levels, args.k, config)
    return certificates.stabilization_document(
        report, args.set, args.window, mode, config, args.levels, args.k
    )


def solve_colouring(
    family: SystemFamily, spec: str, config: EngineConfig, window: Optional[int], levels: Optional[int]
):
    """Colouring window for a family: [1..window] for A and C, dyadic levels for B."""
    if family == SystemFamily.SYSTEM_B:
        return parse_colouring(spec, window or config.dyadic_window, (levels or config.levels) - 1)
    return parse_colouring(spec, window or config.window)


def solve_document(
    family: SystemFamily,
    spec: str,
    n_target: int,
    seq: Optional[CoefficientSequence] = None,
    config: Optional[EngineConfig] = None,
    limits: Optional[SearchLimits] = None,
    window: Optional[int] = None,
    levels: Optional[int] = None,
) -> dict:
    """
    Run the solver and re-verify its output before returning the document.

    Raises:
        InternalError: If the emitted solution or trace fails re-verification
    """
    config = config or EngineConfig()
    seq = seq or default_sequence(family)
    col = solve_colouring(family, spec, config, window, levels)
    report, trace = solve(family, col, n_target, seq, config, limits)
    document = certificates.solver_document(generate_prefix(family, n_target, seq), col, seq, report, trace)
    result = verify_document(document)
    problems = recheck_trace(col, trace, config)
    if not result.valid or problems:
        raise InternalError(f"Solver output failed re-verification: {result.failures + problems}")
    return document


def run_solve(args: argparse.Namespace, config: EngineConfig, limits: SearchLimits) -> dict:
    family = FAMILIES[args.family]
    seq = CoefficientSequence.parse(args.seq) if args.seq else None
    return solve_document(family, args.colouring, args.n, seq, config, limits, args.window, args.levels)


def run_verify_counterexample(args: argparse.Namespace, config: EngineConfig, limits: SearchLimits) -> dict:
    seq = CoefficientSequence.parse(args.seq) if args.seq else None
    if args.which == "mod3":
        report = verify_mod3_obstruction(args.n, args.window, args.residue, seq, limits)
        return certificates.obstruction_document(report)

    values = load_assignment(args.assign) if args.assign else None
    if args.which == "iprnz":
        if values is not None:
            y = values.pop("y")
            x: Any = values
        else:
            y, x = parse_rational(args.y), parse_rational(args.x)
        report = verify_iprnz(parse_rational(args.delta), y, x)
        return certificates.violation_document(report, y, x)

    if values is None:
        y, x = parse_rational(args.y), parse_rational(args.x)
        values = {name: (y if name == "y" else x) for name in image_variables(args.n)}
    evaluation = image_expressions(args.n, values, seq)
    return certificates.image_document(args.n, values, evaluation, seq or CoefficientSequence.pow2())
