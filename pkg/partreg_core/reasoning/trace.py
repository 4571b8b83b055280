"""
Audit trail of a constructive solver run.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional

from partreg_core.model.ratlin import format_rational
from partreg_core.model.systems import SystemFamily
from partreg_core.reasoning.extension import ExtensionWitness
from partreg_core.sumsets.progressions import ProgressionWitness


@dataclass
class ClassSummary:
    """
    Stabilization outcome for one dense colour class.

    Attributes:
        colour: Colour index
        density: Window density (d* proxy for dyadic runs)
        m: Modulus of the stable sumset
        K: Stabilization index
        certified: Whether the stabilization run was certified
        residues: Cosets of m*Z met by A - kA (System C only)
    """

    colour: int
    density: Fraction
    m: int
    K: int
    certified: bool
    residues: Optional[List[int]] = None

    def to_dict(self) -> dict:
        data = {
            "colour": self.colour,
            "density": format_rational(self.density),
            "m": self.m,
            "K": self.K,
            "certified": self.certified,
        }
        if self.residues is not None:
            data["residues"] = list(self.residues)
        return data


@dataclass
class SolverTrace:
    """
    Every intermediate result the solver relied on.

    Attributes:
        family: System family solved
        n_target: Number of equations requested
        densities: Window density of every colour class
        dense_classes: Colours at or above the density threshold
        per_class: Stabilization summary of every dense class
        m: lcm of the per-class moduli
        K: Largest per-class index (at least 2)
        progression: Progression the prefix system was solved in
        p_rows: Rows of the prefix system P
        p_solution: Values of P's variables
        extensions: Witnesses for the equations past P
        recursion_depth: Induction steps taken (System C)
        recursion_moduli: Modulus used at each induction step
        child: Trace of the recursive run (System C)
        colour: Colour of the final solution
        levels: Dyadic levels used (System B)
        notes: Free-form remarks (clipping, fallbacks)
    """

    family: SystemFamily
    n_target: int
    densities: Dict[int, Fraction] = field(default_factory=dict)
    dense_classes: List[int] = field(default_factory=list)
    per_class: List[ClassSummary] = field(default_factory=list)
    m: int = 1
    K: int = 2
    progression: Optional[ProgressionWitness] = None
    p_rows: int = 0
    p_solution: Dict[str, Fraction] = field(default_factory=dict)
    extensions: List[ExtensionWitness] = field(default_factory=list)
    recursion_depth: int = 0
    recursion_moduli: List[int] = field(default_factory=list)
    child: Optional["SolverTrace"] = None
    colour: int = 0
    levels: List[int] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        """Serialize to dictionary."""
        return {
            "family": self.family.value,
            "n_target": self.n_target,
            "densities": {str(c): format_rational(d) for c, d in self.densities.items()},
            "dense_classes": list(self.dense_classes),
            "per_class": [entry.to_dict() for entry in self.per_class],
            "m": self.m,
            "K": self.K,
            "progression": self.progression.to_dict() if self.progression else None,
            "p_rows": self.p_rows,
            "p_solution": {k: format_rational(v) for k, v in self.p_solution.items()},
            "extensions": [w.to_dict() for w in self.extensions],
            "recursion_depth": self.recursion_depth,
            "recursion_moduli": list(self.recursion_moduli),
            "child": self.child.to_dict() if self.child else None,
            "colour": self.colour,
            "levels": list(self.levels),
            "notes": list(self.notes),
        }
