"""
Exact rational linear algebra: RatMatrix, reduced row echelon form and span membership.

All scalars are fractions.Fraction, which is normalized on construction
(positive denominator, lowest terms) and hashable, so equality is structural.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from partreg_core.validation import ContractViolation, DimensionMismatchError

Rational = Fraction
RatVector = Tuple[Fraction, ...]

RationalLike = Union[Fraction, int, str]


def to_rational(value: RationalLike) -> Fraction:
    """Coerce an int, Fraction or "p/q" string to a Fraction."""
    if isinstance(value, str):
        return parse_rational(value)
    if isinstance(value, float):
        raise ContractViolation(f"Floating point value {value!r} is not an exact rational")
    return Fraction(value)


def format_rational(value: Fraction) -> str:
    """Render a rational as "p/q", omitting q when it is 1."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_rational(text: str) -> Fraction:
    """
    Parse "p" or "p/q" into a Fraction.

    Raises:
        ContractViolation: If the text is not an integer or an integer ratio
    """
    cleaned = text.strip().replace("−", "-")
    num, sep, den = cleaned.partition("/")
    try:
        if not sep:
            return Fraction(int(num))
        q = int(den)
    except ValueError:
        raise ContractViolation(f"Not a rational: {text!r}")
    if q <= 0:
        raise ContractViolation(f"Denominator must be positive in {text!r}")
    try:
        return Fraction(int(num), q)
    except ValueError:
        raise ContractViolation(f"Not a rational: {text!r}")


def vector(values: Iterable[RationalLike]) -> RatVector:
    """Build a RatVector from ints, Fractions or "p/q" strings."""
    return tuple(to_rational(v) for v in values)


@dataclass(frozen=True)
class RatMatrix:
    """
    An m x n matrix of rationals stored row-major.

    Attributes:
        rows: Tuple of equal-length row tuples
    """

    rows: Tuple[RatVector, ...]

    def __post_init__(self):
        if not self.rows or not self.rows[0]:
            raise DimensionMismatchError("RatMatrix needs at least one row and one column")
        width = len(self.rows[0])
        if any(len(row) != width for row in self.rows):
            raise DimensionMismatchError("All rows of a RatMatrix must have the same length")

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[RationalLike]]) -> "RatMatrix":
        return cls(tuple(vector(row) for row in rows))

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0])

    def column(self, index: int) -> RatVector:
        return tuple(row[index] for row in self.rows)

    def columns(self) -> List[RatVector]:
        return [self.column(i) for i in range(self.ncols)]

    def transpose(self) -> "RatMatrix":
        return RatMatrix(tuple(self.columns()))

    def select_columns(self, order: Sequence[int]) -> "RatMatrix":
        """Return the matrix with columns taken in the given order."""
        return RatMatrix(tuple(tuple(row[i] for i in order) for row in self.rows))

    def to_dict(self) -> dict:
        """Serialize to dictionary with "p/q" string entries."""
        return {"rows": [[format_rational(x) for x in row] for row in self.rows]}

    @classmethod
    def from_dict(cls, data: dict) -> "RatMatrix":
        return cls.from_rows(data["rows"])


def rref(matrix: RatMatrix) -> Tuple[RatMatrix, Tuple[int, ...]]:
    """
    Compute the exact reduced row echelon form.

    Args:
        matrix: Input matrix

    Returns:
        (reduced matrix, strictly increasing pivot columns)

    Example:
        >>> rref(RatMatrix.from_rows([[2, 4], [1, 2]]))[1]
        (0,)
    """
    grid = [list(row) for row in matrix.rows]
    nrows, ncols = matrix.nrows, matrix.ncols
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        pivot_row = next((i for i in range(r, nrows) if grid[i][c] != 0), None)
        if pivot_row is None:
            continue
        grid[r], grid[pivot_row] = grid[pivot_row], grid[r]
        lead = grid[r][c]
        grid[r] = [x / lead for x in grid[r]]
        for i in range(nrows):
            if i != r and grid[i][c] != 0:
                factor = grid[i][c]
                grid[i] = [a - factor * b for a, b in zip(grid[i], grid[r])]
        pivots.append(c)
        r += 1
    return RatMatrix(tuple(tuple(row) for row in grid)), tuple(pivots)


def span_member(vectors: Sequence[Sequence[Fraction]], target: Sequence[Fraction]) -> Optional[List[Fraction]]:
    """
    Express target as a rational combination of vectors.

    Solves via the rref of the matrix whose columns are the vectors followed by
    the target. Free coefficients are set to zero.

    Args:
        vectors: Spanning vectors, all of the target's length
        target: Vector to express

    Returns:
        Coefficients with sum(c_i * v_i) == target exactly, or None when target
        is outside the span

    Raises:
        DimensionMismatchError: If lengths differ or the target is empty
    """
    dim = len(target)
    if dim == 0:
        raise DimensionMismatchError("span_member needs a non-empty target")
    for v in vectors:
        if len(v) != dim:
            raise DimensionMismatchError(
                f"Vector of length {len(v)} does not match target length {dim}"
            )

    augmented = RatMatrix(
        tuple(
            tuple(Fraction(v[i]) for v in vectors) + (Fraction(target[i]),)
            for i in range(dim)
        )
    )
    reduced, pivots = rref(augmented)
    last = len(vectors)
    if last in pivots:
        return None

    coefficients = [Fraction(0)] * len(vectors)
    for row_index, col in enumerate(pivots):
        coefficients[col] = reduced.rows[row_index][last]
    return coefficients


def combine(vectors: Sequence[Sequence[Fraction]], coefficients: Sequence[Fraction], dim: int) -> RatVector:
    """Return sum(c_i * v_i) as a vector of length dim."""
    if len(vectors) != len(coefficients):
        raise DimensionMismatchError("Coefficient count does not match vector count")
    total = [Fraction(0)] * dim
    for v, c in zip(vectors, coefficients):
        if len(v) != dim:
            raise DimensionMismatchError("Vector length does not match dimension")
        for i in range(dim):
            total[i] += c * v[i]
    return tuple(total)


def column_sum(matrix: RatMatrix, indices: Iterable[int]) -> RatVector:
    """Sum of the selected columns of a matrix."""
    total = [Fraction(0)] * matrix.nrows
    for j in indices:
        for i, row in enumerate(matrix.rows):
            total[i] += row[j]
    return tuple(total)
