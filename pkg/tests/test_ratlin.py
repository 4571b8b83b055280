"""
Tests for exact rational linear algebra.
"""
from fractions import Fraction

import numpy as np
import pytest

from partreg_core.model.ratlin import (
    RatMatrix,
    column_sum,
    combine,
    format_rational,
    parse_rational,
    rref,
    span_member,
    to_rational,
    vector,
)
from partreg_core.validation import ContractViolation, DimensionMismatchError


@pytest.mark.parametrize(
    "text,expected",
    [
        ("3", Fraction(3)),
        ("-7", Fraction(-7)),
        ("2/4", Fraction(1, 2)),
        ("−3/4", Fraction(-3, 4)),
        (" 5/3 ", Fraction(5, 3)),
    ],
)
def test_parse_rational(text, expected):
    """Test parsing integers and ratios, including the unicode minus."""
    assert parse_rational(text) == expected


@pytest.mark.parametrize("text", ["1/0", "3/-4", "abc", "1.5", "", "1/x"])
def test_parse_rational_rejects_garbage(text):
    """Test that malformed rationals raise ContractViolation."""
    with pytest.raises(ContractViolation):
        parse_rational(text)


def test_format_rational():
    """Test that integral values drop the denominator."""
    assert format_rational(Fraction(3)) == "3"
    assert format_rational(Fraction(-6, 4)) == "-3/2"


def test_vector_rejects_float():
    """Test that floats are not silently accepted as rationals."""
    with pytest.raises(ContractViolation):
        vector([1, 0.5])


def test_matrix_shape_checks():
    """Test that empty and ragged matrices are rejected."""
    with pytest.raises(DimensionMismatchError):
        RatMatrix(())
    with pytest.raises(DimensionMismatchError):
        RatMatrix.from_rows([[1, 2], [3]])


def test_matrix_columns_and_transpose():
    """Test column access on a 2x3 matrix."""
    m = RatMatrix.from_rows([[1, 2, 3], [4, 5, "1/2"]])

    assert m.nrows == 2
    assert m.ncols == 3
    assert m.column(2) == (Fraction(3), Fraction(1, 2))
    assert m.transpose().nrows == 3
    assert m.select_columns([2, 0]).rows[0] == (Fraction(3), Fraction(1))


def test_matrix_dict_round_trip():
    """Test serialization of a matrix with fractional entries."""
    m = RatMatrix.from_rows([[1, "-2/3"]])
    data = m.to_dict()

    assert data == {"rows": [["1", "-2/3"]]}
    assert RatMatrix.from_dict(data) == m


def test_rref_dependent_rows():
    """Test that a rank-one matrix has a single pivot."""
    reduced, pivots = rref(RatMatrix.from_rows([[2, 4], [1, 2]]))

    assert pivots == (0,)
    assert reduced.rows[0] == (Fraction(1), Fraction(2))
    assert reduced.rows[1] == (Fraction(0), Fraction(0))


def test_rref_full_rank():
    """Test that an invertible matrix reduces to the identity."""
    reduced, pivots = rref(RatMatrix.from_rows([[0, 1], [3, 1]]))

    assert pivots == (0, 1)
    assert reduced.rows == ((1, 0), (0, 1))


def test_span_member_found():
    """Test expressing a vector in a basis."""
    basis = [vector([1, 0]), vector([1, 1])]
    coeffs = span_member(basis, vector([3, 4]))

    assert coeffs is not None
    assert combine(basis, coeffs, 2) == (Fraction(3), Fraction(4))


def test_span_member_outside_span():
    """Test that a vector outside the span gives None."""
    assert span_member([vector([1, 2])], vector([1, 0])) is None


def test_span_member_of_zero_with_no_vectors():
    """Test that the zero vector lies in the empty span."""
    assert span_member([], vector([0, 0])) == []
    assert span_member([], vector([0, 1])) is None


def test_span_member_dimension_mismatch():
    """Test that mismatched lengths raise DimensionMismatchError."""
    with pytest.raises(DimensionMismatchError):
        span_member([vector([1, 2, 3])], vector([1, 2]))


def test_column_sum():
    """Test summing selected columns."""
    m = RatMatrix.from_rows([[1, 2, 3], [4, 5, 6]])

    assert column_sum(m, [0, 2]) == (Fraction(4), Fraction(10))
    assert column_sum(m, []) == (Fraction(0), Fraction(0))


def _random_fraction(rng):
    return Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 7)))


def _random_matrix(rng, nrows, ncols):
    return RatMatrix.from_rows(
        [[_random_fraction(rng) for _ in range(ncols)] for _ in range(nrows)]
    )


def test_rref_idempotent():
    """Test that reducing a reduced matrix changes nothing."""
    rng = np.random.default_rng(7)
    for _ in range(40):
        m = _random_matrix(rng, int(rng.integers(1, 5)), int(rng.integers(1, 6)))
        reduced, pivots = rref(m)

        assert rref(reduced) == (reduced, pivots)
        assert list(pivots) == sorted(set(pivots))


def test_rref_rank_deficient_idempotent():
    """Test idempotence when a row repeats another."""
    reduced, pivots = rref(RatMatrix.from_rows([[1, "1/2", 3], [2, 1, 6], [0, 0, 1]]))

    assert pivots == (0, 2)
    assert rref(reduced) == (reduced, pivots)


def test_rational_field_identities():
    """Test field laws and the text form on random rationals."""
    rng = np.random.default_rng(11)
    for _ in range(200):
        a, b, c = (_random_fraction(rng) for _ in range(3))

        assert (a + b) + c == a + (b + c)
        assert a * (b + c) == a * b + a * c
        assert a + (-a) == 0
        if a != 0:
            assert a * (1 / a) == 1
        assert parse_rational(format_rational(a)) == a
        assert to_rational(format_rational(a)) == a


def test_span_member_recombines_random_targets():
    """Test that returned coefficients rebuild targets inside the span."""
    rng = np.random.default_rng(5)
    for _ in range(40):
        dim = int(rng.integers(2, 5))
        basis = [vector(_random_fraction(rng) for _ in range(dim)) for _ in range(3)]
        weights = [_random_fraction(rng) for _ in basis]
        target = combine(basis, weights, dim)

        coeffs = span_member(basis, target)

        assert coeffs is not None
        assert combine(basis, coeffs, dim) == target


def test_span_member_rejects_random_targets_outside_span():
    """Test None for a target off a single line."""
    rng = np.random.default_rng(3)
    for _ in range(20):
        v = vector([_random_fraction(rng), 1])
        off = (v[0] + 1, Fraction(1))

        assert span_member([v], off) is None
