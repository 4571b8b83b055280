"""
Sumsets layer: finite-window set arithmetic, densities, stabilization and progressions.
"""

from partreg_core.sumsets.windowset import (
    WindowSet,
    sumset,
    difference,
    iterate_sumset,
    sumset_layers,
)
from partreg_core.sumsets.density import window_density, dyadic_level_density, dyadic_dstar
from partreg_core.sumsets.stabilize import (
    StabilizationReport,
    CosetReport,
    DyadicStabilizationReport,
    stabilize_symmetric,
    stabilize_asymmetric,
    stabilize_dyadic,
)
from partreg_core.sumsets.progressions import ProgressionWitness, find_progression

__all__ = [
    "WindowSet",
    "sumset",
    "difference",
    "iterate_sumset",
    "sumset_layers",
    "window_density",
    "dyadic_level_density",
    "dyadic_dstar",
    "StabilizationReport",
    "CosetReport",
    "DyadicStabilizationReport",
    "stabilize_symmetric",
    "stabilize_asymmetric",
    "stabilize_dyadic",
    "ProgressionWitness",
    "find_progression",
]
