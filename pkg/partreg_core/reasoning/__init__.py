"""
Reasoning layer: columns property, the constructive solver and counterexample verifiers.
"""

from partreg_core.reasoning.columns import (
    PartitionCertificate,
    columns_property,
    verify_certificate,
    matrix_family,
)
from partreg_core.reasoning.solver import (
    solve,
    solve_system_a,
    solve_system_b,
    solve_system_c,
    recheck_trace,
)
from partreg_core.reasoning.trace import SolverTrace, ClassSummary
from partreg_core.reasoning.witnesses import (
    verify_mod3_obstruction,
    verify_iprnz,
    image_expressions,
)

__all__ = [
    "PartitionCertificate",
    "columns_property",
    "verify_certificate",
    "matrix_family",
    "solve",
    "solve_system_a",
    "solve_system_b",
    "solve_system_c",
    "recheck_trace",
    "SolverTrace",
    "ClassSummary",
    "verify_mod3_obstruction",
    "verify_iprnz",
    "image_expressions",
]
