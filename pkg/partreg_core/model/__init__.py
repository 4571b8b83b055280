"""
Model layer: exact rational matrices and the linear systems built from them.
"""

from partreg_core.model.ratlin import RatMatrix, rref, span_member, format_rational, parse_rational
from partreg_core.model.systems import (
    SystemFamily,
    CoefficientSequence,
    LinearSystem,
    Assignment,
    SolutionCheck,
    check_solution,
    generate_prefix,
    generate_difference_system,
    generate_image_system,
    generate_vdw_image,
    render,
)

__all__ = [
    "RatMatrix",
    "rref",
    "span_member",
    "format_rational",
    "parse_rational",
    "SystemFamily",
    "CoefficientSequence",
    "LinearSystem",
    "Assignment",
    "SolutionCheck",
    "check_solution",
    "generate_prefix",
    "generate_difference_system",
    "generate_image_system",
    "generate_vdw_image",
    "render",
]
