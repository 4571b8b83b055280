"""
Finite homogeneous linear systems and generators for the truncated families.

Every equation is stored as a row of a RatMatrix in "sum(coeff * var) = 0" form.
Variables use the canonical names "y", "x_i_j", "z_i_j" (and "z_i" for the
single right-hand variable of System C) so certificates stay readable.
"""

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from partreg_core.model.ratlin import (
    RatMatrix,
    RatVector,
    RationalLike,
    format_rational,
    to_rational,
    vector,
)
from partreg_core.validation import ContractViolation, InvariantViolation, check_positive


class SystemFamily(str, Enum):
    """Provenance tag of a LinearSystem."""

    SYSTEM_A = "SystemA"
    SYSTEM_B = "SystemB"
    SYSTEM_C = "SystemC"
    DIFFERENCE = "DifferenceSystem"
    CUSTOM = "Custom"


class SequenceKind(str, Enum):
    """Kind of y-coefficient sequence."""

    POWERS_OF_TWO = "pow2"
    INVERSE_POWERS_OF_TWO = "invpow2"
    CUSTOM = "custom"


@dataclass(frozen=True)
class CoefficientSequence:
    """
    The y-coefficients c(1), c(2), ... of a family.

    Attributes:
        kind: Sequence kind
        values: Explicit integers for CUSTOM sequences (c(n) = values[n-1])
    """

    kind: SequenceKind = SequenceKind.POWERS_OF_TWO
    values: Tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind == SequenceKind.CUSTOM:
            if not self.values:
                raise InvariantViolation("A custom coefficient sequence needs at least one value")
            if any(v == 0 for v in self.values):
                raise InvariantViolation("Coefficient sequences must be non-zero")

    @classmethod
    def pow2(cls) -> "CoefficientSequence":
        return cls(SequenceKind.POWERS_OF_TWO)

    @classmethod
    def invpow2(cls) -> "CoefficientSequence":
        return cls(SequenceKind.INVERSE_POWERS_OF_TWO)

    @classmethod
    def custom(cls, values: Iterable[int]) -> "CoefficientSequence":
        return cls(SequenceKind.CUSTOM, tuple(int(v) for v in values))

    @classmethod
    def parse(cls, text: str) -> "CoefficientSequence":
        """Parse "pow2", "invpow2" or a comma-separated integer list."""
        cleaned = text.strip().lower()
        if cleaned == SequenceKind.POWERS_OF_TWO.value:
            return cls.pow2()
        if cleaned == SequenceKind.INVERSE_POWERS_OF_TWO.value:
            return cls.invpow2()
        try:
            return cls.custom(int(part) for part in cleaned.split(",") if part.strip())
        except ValueError:
            raise ContractViolation(f"Unknown coefficient sequence {text!r}")

    def c(self, n: int) -> Fraction:
        """Coefficient of y in equation n (1-based)."""
        check_positive(n, "equation index")
        if self.kind == SequenceKind.POWERS_OF_TWO:
            return Fraction(2**n)
        if self.kind == SequenceKind.INVERSE_POWERS_OF_TWO:
            return Fraction(1, 2**n)
        if n > len(self.values):
            raise ContractViolation(
                f"Custom sequence has {len(self.values)} values; c({n}) is undefined"
            )
        return Fraction(self.values[n - 1])

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "values": list(self.values)}

    @classmethod
    def from_dict(cls, data: dict) -> "CoefficientSequence":
        return cls(SequenceKind(data["kind"]), tuple(data.get("values", ())))

    def describe(self) -> str:
        if self.kind == SequenceKind.CUSTOM:
            return ",".join(str(v) for v in self.values)
        return self.kind.value


def default_sequence(family: SystemFamily) -> CoefficientSequence:
    """Powers of two for Systems A and C, inverse powers for System B."""
    if family == SystemFamily.SYSTEM_B:
        return CoefficientSequence.invpow2()
    return CoefficientSequence.pow2()


@dataclass(frozen=True)
class LinearSystem:
    """
    A finite homogeneous linear system.

    Attributes:
        matrix: Equation rows over the variables (sum(coeff * var) = 0)
        variables: Variable names, one per column
        family: Provenance tag
    """

    matrix: RatMatrix
    variables: Tuple[str, ...]
    family: SystemFamily = SystemFamily.CUSTOM

    def __post_init__(self):
        if self.matrix.ncols != len(self.variables):
            raise InvariantViolation(
                f"Matrix has {self.matrix.ncols} columns but {len(self.variables)} variables"
            )
        if len(set(self.variables)) != len(self.variables):
            raise InvariantViolation("Variable names must be distinct")
        for i, row in enumerate(self.matrix.rows):
            if all(x == 0 for x in row):
                raise InvariantViolation(f"Row {i + 1} has no non-zero entry")
        for j, name in enumerate(self.variables):
            if all(row[j] == 0 for row in self.matrix.rows):
                raise InvariantViolation(f"Variable {name} does not occur in any equation")

    @classmethod
    def from_rows(
        cls,
        rows: Iterable[Iterable[RationalLike]],
        variables: Sequence[str],
        family: SystemFamily = SystemFamily.CUSTOM,
    ) -> "LinearSystem":
        return cls(RatMatrix.from_rows(rows), tuple(variables), family)

    @property
    def num_equations(self) -> int:
        return self.matrix.nrows

    def restrict(self, n_rows: int) -> "LinearSystem":
        """First n_rows equations over the variables they mention (original order)."""
        check_positive(n_rows, "n_rows")
        if n_rows > self.num_equations:
            raise ContractViolation(
                f"System has {self.num_equations} equations; cannot keep {n_rows}"
            )
        rows = self.matrix.rows[:n_rows]
        keep = [j for j in range(len(self.variables)) if any(row[j] != 0 for row in rows)]
        return LinearSystem(
            RatMatrix(tuple(tuple(row[j] for j in keep) for row in rows)),
            tuple(self.variables[j] for j in keep),
            self.family,
        )

    def to_dict(self) -> dict:
        """Serialize to dictionary ({variables, rows, family})."""
        return {
            "variables": list(self.variables),
            "rows": [[format_rational(x) for x in row] for row in self.matrix.rows],
            "family": self.family.value,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "LinearSystem":
        return cls.from_rows(data["rows"], data["variables"], SystemFamily(data.get("family", "Custom")))


@dataclass(frozen=True)
class Assignment:
    """
    Non-zero rational values for named variables.

    Attributes:
        values: Mapping of variable name to value
    """

    values: Mapping[str, Fraction]

    def __post_init__(self):
        normalized = {name: to_rational(v) for name, v in self.values.items()}
        for name, v in normalized.items():
            if v == 0:
                raise InvariantViolation(f"Variable {name} has value 0; values must be non-zero")
        object.__setattr__(self, "values", normalized)

    def __getitem__(self, name: str) -> Fraction:
        return self.values[name]

    def __contains__(self, name: object) -> bool:
        return name in self.values

    def scaled(self, factor: Fraction) -> "Assignment":
        return Assignment({k: v * factor for k, v in self.values.items()})

    def to_dict(self) -> Dict[str, str]:
        return {k: format_rational(v) for k, v in self.values.items()}

    @classmethod
    def from_dict(cls, data: Mapping[str, RationalLike]) -> "Assignment":
        return cls({k: to_rational(v) for k, v in data.items()})


@dataclass
class SolutionCheck:
    """Exact residual of every row under an assignment."""

    residuals: List[Fraction] = field(default_factory=list)
    all_zero: bool = False

    def to_dict(self) -> dict:
        return {
            "residuals": [format_rational(r) for r in self.residuals],
            "all_zero": self.all_zero,
        }


def check_solution(system: LinearSystem, assignment: Assignment) -> SolutionCheck:
    """
    Evaluate every row of a system exactly.

    Raises:
        InvariantViolation: If a system variable is missing from the assignment
    """
    missing = [v for v in system.variables if v not in assignment]
    if missing:
        raise InvariantViolation(f"Assignment is missing variables: {', '.join(missing)}")
    values = [assignment[v] for v in system.variables]
    residuals = [sum((a * x for a, x in zip(row, values)), Fraction(0)) for row in system.matrix.rows]
    return SolutionCheck(residuals=residuals, all_zero=all(r == 0 for r in residuals))


def x_name(i: int, j: int) -> str:
    return f"x_{i}_{j}"


def z_name(i: int, j: Optional[int] = None) -> str:
    return f"z_{i}" if j is None else f"z_{i}_{j}"


def generate_prefix(
    family: SystemFamily, n: int, seq: Optional[CoefficientSequence] = None
) -> LinearSystem:
    """
    First n equations of System A, B or C.

    Row i encodes x_{i,1} + ... + x_{i,i} + c(i)*y - (z_{i,1} + ... + z_{i,i}) = 0,
    with a single z_i on the right for System C. Variables are y followed by the
    x's and z's of row 1, then row 2, and so on, so prefixes nest.

    Args:
        family: SYSTEM_A, SYSTEM_B or SYSTEM_C
        n: Number of equations (>= 1)
        seq: y-coefficients (defaults: powers of two, inverse powers for System B)

    Returns:
        The truncated LinearSystem

    Raises:
        ContractViolation: If n < 1 or the family has no prefix generator
    """
    if family not in (SystemFamily.SYSTEM_A, SystemFamily.SYSTEM_B, SystemFamily.SYSTEM_C):
        raise ContractViolation(f"No prefix generator for family {family.value}")
    if n < 1:
        raise ContractViolation(f"Prefix length must be >= 1, got {n}")
    seq = seq or default_sequence(family)

    variables = ["y"]
    for i in range(1, n + 1):
        variables.extend(x_name(i, j) for j in range(1, i + 1))
        if family == SystemFamily.SYSTEM_C:
            variables.append(z_name(i))
        else:
            variables.extend(z_name(i, j) for j in range(1, i + 1))
    index = {name: k for k, name in enumerate(variables)}

    rows = []
    for i in range(1, n + 1):
        row = [Fraction(0)] * len(variables)
        row[index["y"]] = seq.c(i)
        for j in range(1, i + 1):
            row[index[x_name(i, j)]] = Fraction(1)
        if family == SystemFamily.SYSTEM_C:
            row[index[z_name(i)]] = Fraction(-1)
        else:
            for j in range(1, i + 1):
                row[index[z_name(i, j)]] = Fraction(-1)
        rows.append(row)
    return LinearSystem.from_rows(rows, variables, family)


def generate_difference_system(n: int) -> LinearSystem:
    """Rows i*y - x_i + z_i = 0 for 1 <= i <= n (not partition regular)."""
    check_positive(n, "n")
    variables = ["y"]
    for i in range(1, n + 1):
        variables.extend([f"x_{i}", f"z_{i}"])
    rows = []
    for i in range(1, n + 1):
        row = [0] * len(variables)
        row[0] = i
        row[2 * i - 1] = -1
        row[2 * i] = 1
        rows.append(row)
    return LinearSystem.from_rows(rows, variables, SystemFamily.DIFFERENCE)


ImageRow = Tuple[str, RatVector]


def image_variables(n: int) -> List[str]:
    """Variables of the System I expressions: y, then x_{i,j} row by row."""
    names = ["y"]
    for i in range(1, n + 1):
        names.extend(x_name(i, j) for j in range(1, i + 1))
    return names


def generate_image_system(n: int, seq: Optional[CoefficientSequence] = None) -> List[ImageRow]:
    """
    Expressions of System I up to row n.

    For each i the compound expression x_{i,1} + ... + x_{i,i} + c(i)*y (named
    "z_i", the System C variable it stands for) is followed by one identity row
    per x_{i,j}; the identity row of y comes last.

    Returns:
        (name, coefficient vector over image_variables(n)) pairs
    """
    check_positive(n, "n")
    seq = seq or CoefficientSequence.pow2()
    names = image_variables(n)
    index = {name: k for k, name in enumerate(names)}

    def unit(name: str) -> RatVector:
        row = [Fraction(0)] * len(names)
        row[index[name]] = Fraction(1)
        return tuple(row)

    rows: List[ImageRow] = []
    for i in range(1, n + 1):
        compound = [Fraction(0)] * len(names)
        compound[index["y"]] = seq.c(i)
        for j in range(1, i + 1):
            compound[index[x_name(i, j)]] = Fraction(1)
        rows.append((z_name(i), tuple(compound)))
        rows.extend((x_name(i, j), unit(x_name(i, j))) for j in range(1, i + 1))
    rows.append(("y", unit("y")))
    return rows


def generate_vdw_image(length: int) -> Tuple[List[str], List[ImageRow]]:
    """
    Image rows a + i*d (0 <= i < length) of a length-l arithmetic progression.

    Returns:
        (variables ["a", "d"], rows named "a+i*d")
    """
    check_positive(length, "length")
    rows = [(f"a+{i}*d", vector([1, i])) for i in range(length)]
    return ["a", "d"], rows


def evaluate_image_rows(
    variables: Sequence[str], rows: Sequence[ImageRow], values: Mapping[str, Fraction]
) -> List[Tuple[str, Fraction]]:
    """
    Evaluate image expressions exactly.

    Raises:
        InvariantViolation: If a variable has no value
    """
    missing = [v for v in variables if v not in values]
    if missing:
        raise InvariantViolation(f"Assignment is missing variables: {', '.join(missing)}")
    point = [to_rational(values[v]) for v in variables]
    return [
        (name, sum((a * x for a, x in zip(coeffs, point)), Fraction(0)))
        for name, coeffs in rows
    ]


def render(system: LinearSystem) -> str:
    """
    Pretty-print a system in the equation grammar accepted by parse_system.

    Positive terms go on the left and negative ones on the right. When that
    layout would change the first-appearance order of variables, every row is
    written as "... = 0" with terms in column order instead.
    """
    split = [_split_row(system, row) for row in system.matrix.rows]
    seen: List[str] = []
    for lhs, rhs in split:
        for name, _ in lhs + rhs:
            if name not in seen:
                seen.append(name)
    if tuple(seen) == system.variables:
        return "\n".join(f"{_format_sum(lhs)} = {_format_sum(rhs)}" for lhs, rhs in split)

    lines = []
    for row in system.matrix.rows:
        terms = [(name, a) for name, a in zip(system.variables, row) if a != 0]
        lines.append(f"{_format_signed(terms)} = 0")
    return "\n".join(lines)


def _split_row(system: LinearSystem, row: RatVector) -> Tuple[List[Tuple[str, Fraction]], List[Tuple[str, Fraction]]]:
    lhs = [(name, a) for name, a in zip(system.variables, row) if a > 0]
    rhs = [(name, -a) for name, a in zip(system.variables, row) if a < 0]
    return lhs, rhs


def _format_term(name: str, coeff: Fraction) -> str:
    if coeff == 1:
        return name
    return f"{format_rational(coeff)} {name}"


def _format_sum(terms: List[Tuple[str, Fraction]]) -> str:
    if not terms:
        return "0"
    return " + ".join(_format_term(name, a) for name, a in terms)


def _format_signed(terms: List[Tuple[str, Fraction]]) -> str:
    parts = []
    for k, (name, a) in enumerate(terms):
        body = _format_term(name, abs(a))
        if k == 0:
            parts.append(body if a > 0 else f"-{body}")
        else:
            parts.append(f"+ {body}" if a > 0 else f"- {body}")
    return " ".join(parts)
