"""
Ingestion layer: parse equation text and set specs into systems and windowed sets.
"""

from partreg_core.ingestion.dsl import parse_system, load_system
from partreg_core.ingestion.specs import parse_set, parse_set_levels, stabilize_spec

__all__ = [
    "parse_system",
    "load_system",
    "parse_set",
    "parse_set_levels",
    "stabilize_spec",
]
