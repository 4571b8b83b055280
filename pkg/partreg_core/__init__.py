"""
partreg-core: Partition regularity of linear systems on finite windows

Decides Rado's columns property, searches colourings for monochromatic
solutions, detects stabilization of iterated sumsets and constructs verified
monochromatic solutions of the infinite Systems A, B and C on concrete
colourings. Every result is emitted as a re-verifiable JSON certificate.
"""

__version__ = "0.1.0"

from partreg_core.model.systems import LinearSystem, Assignment, SystemFamily, CoefficientSequence
from partreg_core.colouring.rules import Colouring, parse_colouring
from partreg_core.reasoning.columns import columns_property, PartitionCertificate
from partreg_core.reasoning.solver import solve
from partreg_core.reasoning.trace import SolverTrace
from partreg_core.logging import configure_logging, get_logger
from partreg_core.config import EngineConfig
from partreg_core.validation import SearchLimits, ValidationError, Inconclusive

__all__ = [
    "LinearSystem",
    "Assignment",
    "SystemFamily",
    "CoefficientSequence",
    "Colouring",
    "parse_colouring",
    "columns_property",
    "PartitionCertificate",
    "solve",
    "SolverTrace",
    "configure_logging",
    "get_logger",
    "EngineConfig",
    "SearchLimits",
    "ValidationError",
    "Inconclusive",
]
