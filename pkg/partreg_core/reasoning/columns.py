"""
Rado's columns property: search, certificates and certificate checking.

A matrix has the columns property when its column indices split into ordered
parts I_1, ..., I_s such that the columns of I_1 sum to zero and the column sum
of every later part lies in the rational span of the columns in earlier parts.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, combinations_with_replacement, permutations, product
from math import lcm
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from partreg_core.logging import get_logger
from partreg_core.model.ratlin import (
    RatMatrix,
    combine,
    column_sum,
    format_rational,
    span_member,
    to_rational,
)
from partreg_core.validation import ContractViolation, LimitExceeded, SearchLimits

logger = get_logger(__name__)


@dataclass(frozen=True)
class PartitionCertificate:
    """
    Ordered partition of the column indices witnessing the columns property.

    Attributes:
        parts: I_1, ..., I_s as sorted index tuples
        witnesses: For each part after the first, coefficients expressing its
            column sum over the sorted union of all earlier parts
    """

    parts: Tuple[Tuple[int, ...], ...]
    witnesses: Tuple[Tuple[Fraction, ...], ...]

    def to_dict(self) -> dict:
        return {
            "parts": [list(p) for p in self.parts],
            "witnesses": [[format_rational(c) for c in w] for w in self.witnesses],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PartitionCertificate":
        return cls(
            parts=tuple(tuple(int(i) for i in p) for p in data["parts"]),
            witnesses=tuple(tuple(to_rational(c) for c in w) for w in data["witnesses"]),
        )


def _subsets(indices: Sequence[int]) -> Iterable[Tuple[int, ...]]:
    """Non-empty subsets by increasing size, lexicographic within a size."""
    for size in range(1, len(indices) + 1):
        yield from combinations(indices, size)


def _integer_columns(matrix: RatMatrix) -> np.ndarray:
    scaled = []
    for row in matrix.rows:
        scale = lcm(*(a.denominator for a in row))
        scaled.append([int(a * scale) for a in row])
    return np.array(scaled, dtype=object)


def _complete(matrix: RatMatrix, first: Tuple[int, ...]) -> Optional[PartitionCertificate]:
    """
    Extend I_1 greedily to a full certificate.

    The span only grows, and if any certificate starts with I_1 then the rest of
    its next unfinished part is always a valid choice. So the greedy pass only
    gets stuck when no certificate starts with I_1, and taking the least
    admissible part each time gives the least completion.
    """
    parts = [first]
    witnesses: List[Tuple[Fraction, ...]] = []
    used = sorted(first)
    remaining = [j for j in range(matrix.ncols) if j not in first]
    while remaining:
        basis = [matrix.column(j) for j in used]
        singles = [span_member(basis, matrix.column(j)) for j in remaining]
        if all(w is not None for w in singles):
            for j in remaining:
                basis = [matrix.column(i) for i in used]
                parts.append((j,))
                witnesses.append(tuple(span_member(basis, matrix.column(j))))
                used = sorted(used + [j])
            break
        for part in _subsets(remaining):
            coeffs = span_member(basis, column_sum(matrix, part))
            if coeffs is not None:
                parts.append(part)
                witnesses.append(tuple(coeffs))
                used = sorted(used + list(part))
                remaining = [j for j in remaining if j not in part]
                break
        else:
            return None
    return PartitionCertificate(tuple(parts), tuple(witnesses))


def columns_property(
    matrix: RatMatrix, max_columns: Optional[int] = None
) -> Optional[PartitionCertificate]:
    """
    Decide the columns property and return the least certificate.

    Candidates for I_1 are tried by increasing size, then lexicographically;
    each later part is the least admissible subset of what remains.

    Args:
        matrix: Coefficient matrix
        max_columns: Column cap (default from SearchLimits)

    Returns:
        PartitionCertificate, or None when the matrix lacks the property

    Raises:
        LimitExceeded: If the matrix has more columns than the cap
    """
    cap = max_columns if max_columns is not None else SearchLimits().max_columns
    if matrix.ncols > cap:
        raise LimitExceeded(f"Matrix has {matrix.ncols} columns; the cap is {cap}")
    cols = _integer_columns(matrix)
    for first in _subsets(range(matrix.ncols)):
        if any(cols[:, list(first)].sum(axis=1) != 0):
            continue
        cert = _complete(matrix, first)
        if cert is None:
            continue
        logger.debug(f"Columns property holds with I_1={first}")
        return cert
    logger.debug(f"No zero-sum column subset among {matrix.ncols} columns")
    return None


def verify_certificate(matrix: RatMatrix, cert: PartitionCertificate) -> bool:
    """
    Recheck every certificate condition exactly.

    Raises:
        ContractViolation: If a part refers to a column outside the matrix
    """
    n = matrix.ncols
    flat = [j for part in cert.parts for j in part]
    for j in flat:
        if not 0 <= j < n:
            raise ContractViolation(f"Column index {j} outside 0..{n - 1}")
    if not cert.parts or any(len(p) == 0 for p in cert.parts):
        return False
    if sorted(flat) != list(range(n)):
        return False
    if any(x != 0 for x in column_sum(matrix, cert.parts[0])):
        return False
    if len(cert.witnesses) != len(cert.parts) - 1:
        return False
    earlier = sorted(cert.parts[0])
    for part, coeffs in zip(cert.parts[1:], cert.witnesses):
        if len(coeffs) != len(earlier):
            return False
        basis = [matrix.column(j) for j in earlier]
        if combine(basis, coeffs, matrix.nrows) != column_sum(matrix, part):
            return False
        earlier = sorted(earlier + list(part))
    return True


def permute_columns(matrix: RatMatrix, order: Sequence[int]) -> RatMatrix:
    """Matrix whose column k is column order[k] of the input."""
    if sorted(order) != list(range(matrix.ncols)):
        raise ContractViolation(f"{list(order)} is not a permutation of the columns")
    return matrix.select_columns(order)


def _canonical(columns: Sequence[Tuple[int, ...]], m: int) -> Tuple[Tuple[int, ...], ...]:
    forms = []
    for rows in permutations(range(m)):
        for signs in product((1, -1), repeat=m):
            moved = sorted(tuple(signs[k] * col[rows[k]] for k in range(m)) for col in columns)
            forms.append(tuple(moved))
    return min(forms)


def matrix_family(m: int, n: int, entries: Sequence[int]) -> List[RatMatrix]:
    """
    All m x n matrices over the given entries, one per class under row
    permutation, row negation and column permutation.

    Matrices with a zero row or a zero column are left out.
    """
    if m < 1 or n < 1:
        raise ContractViolation(f"Need m, n >= 1, got {m}x{n}")
    zero = (0,) * m
    column_pool = [c for c in product(sorted(set(entries)), repeat=m) if c != zero]
    seen = set()
    family = []
    for cols in combinations_with_replacement(column_pool, n):
        if any(all(col[i] == 0 for col in cols) for i in range(m)):
            continue
        key = _canonical(cols, m)
        if key in seen:
            continue
        seen.add(key)
        family.append(RatMatrix.from_rows([[col[i] for col in key] for i in range(m)]))
    logger.debug(f"Matrix family {m}x{n} over {sorted(set(entries))}: {len(family)} classes")
    return family

