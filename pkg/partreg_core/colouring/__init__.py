"""
Colouring layer: finite colourings of integer and dyadic windows, monochromatic
solution search and bad-colouring search.
"""

from partreg_core.colouring.rules import (
    Domain,
    ColouringRule,
    ExplicitArray,
    ResidueMod,
    Sign,
    LevelRule,
    Colouring,
    explicit_colouring,
    parse_colouring,
    load_colouring_file,
    verify_colouring_partition,
)
from partreg_core.colouring.search import (
    SolutionReport,
    find_mono_solution,
    search_bad_colouring,
    is_bad_colouring,
    relabel,
)

__all__ = [
    "Domain",
    "ColouringRule",
    "ExplicitArray",
    "ResidueMod",
    "Sign",
    "LevelRule",
    "Colouring",
    "explicit_colouring",
    "parse_colouring",
    "load_colouring_file",
    "verify_colouring_partition",
    "SolutionReport",
    "find_mono_solution",
    "search_bad_colouring",
    "is_bad_colouring",
    "relabel",
]
