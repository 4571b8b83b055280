"""
Tests for the columns property search and certificate checking.
"""
from fractions import Fraction

import pytest

from partreg_core.colouring.search import search_bad_colouring
from partreg_core.ingestion.dsl import parse_system
from partreg_core.model.ratlin import RatMatrix
from partreg_core.model.systems import LinearSystem, SystemFamily, generate_prefix
from partreg_core.reasoning.columns import (
    PartitionCertificate,
    columns_property,
    matrix_family,
    permute_columns,
    verify_certificate,
)
from partreg_core.validation import ContractViolation, LimitExceeded


def test_schur_has_columns_property():
    """Test the least certificate of x + y = z."""
    matrix = RatMatrix.from_rows([[1, 1, -1]])
    cert = columns_property(matrix)

    assert cert is not None
    assert cert.parts == ((0, 2), (1,))
    assert cert.witnesses == ((Fraction(1), Fraction(0)),)
    assert verify_certificate(matrix, cert)


@pytest.mark.parametrize("rows", [[[2, 2, -1]], [[1, 1, -3]], [[1, 2, 4]]])
def test_equations_without_columns_property(rows):
    """Test single equations with no zero-sum column subset."""
    assert columns_property(RatMatrix.from_rows(rows)) is None


def test_two_row_system():
    """Test a 2x4 system whose later part needs a span witness."""
    matrix = RatMatrix.from_rows([[1, -1, 0, 1], [0, 1, -1, 1]])
    cert = columns_property(matrix)

    assert cert is not None
    assert cert.parts[0] == (0, 1, 2)
    assert verify_certificate(matrix, cert)


def test_system_a_prefix_has_columns_property():
    """Test that finite prefixes of System A satisfy the columns property."""
    matrix = generate_prefix(SystemFamily.SYSTEM_A, 2).matrix
    cert = columns_property(matrix)

    assert cert is not None
    assert verify_certificate(matrix, cert)


def test_column_cap():
    """Test that too many columns raise LimitExceeded."""
    with pytest.raises(LimitExceeded):
        columns_property(RatMatrix.from_rows([[1, 1, -1]]), max_columns=2)


def test_verify_certificate_rejects_tampering():
    """Test that broken certificates fail the exact recheck."""
    matrix = RatMatrix.from_rows([[1, 1, -1]])
    cert = columns_property(matrix)

    wrong_witness = PartitionCertificate(cert.parts, ((Fraction(2), Fraction(0)),))
    assert not verify_certificate(matrix, wrong_witness)

    not_zero_sum = PartitionCertificate(((0, 1), (2,)), ((Fraction(-1), Fraction(0)),))
    assert not verify_certificate(matrix, not_zero_sum)

    missing_column = PartitionCertificate(((0, 2),), ())
    assert not verify_certificate(matrix, missing_column)

    with pytest.raises(ContractViolation):
        verify_certificate(matrix, PartitionCertificate(((0, 5), (1,)), ((Fraction(1), Fraction(0)),)))


def test_certificate_dict_round_trip():
    """Test certificate serialization with rational witnesses."""
    cert = PartitionCertificate(((0, 2), (1,)), ((Fraction(1, 2), Fraction(0)),))

    assert cert.to_dict() == {"parts": [[0, 2], [1]], "witnesses": [["1/2", "0"]]}
    assert PartitionCertificate.from_dict(cert.to_dict()) == cert


def test_property_invariant_under_column_permutation():
    """Test that permuting columns keeps the property."""
    matrix = RatMatrix.from_rows([[1, -1, 0, 1], [0, 1, -1, 1]])
    permuted = permute_columns(matrix, [3, 1, 0, 2])

    assert columns_property(permuted) is not None
    with pytest.raises(ContractViolation):
        permute_columns(matrix, [0, 0, 1, 2])


def test_matrix_family_single_row():
    """Test the 1x3 family over {-1, 0, 1} up to symmetry."""
    family = matrix_family(1, 3, [-1, 0, 1])
    keys = {m.rows for m in family}

    assert len(keys) == len(family)
    assert all(m.nrows == 1 and m.ncols == 3 for m in family)
    assert all(any(x != 0 for x in m.column(j)) for m in family for j in range(3))
    # x + y = z is among them, and so is x + y + z = 0, which lacks the property
    assert any(columns_property(m) is not None for m in family)
    assert any(columns_property(m) is None for m in family)


def test_columns_property_agrees_with_bad_colouring_search():
    """Test regular 1x3 equations against exhaustive 2-colourings of [1..12]."""
    for matrix in matrix_family(1, 3, range(-2, 3)):
        system = LinearSystem(matrix, ("v1", "v2", "v3"))
        regular = columns_property(matrix) is not None
        bad = search_bad_colouring(system, 2, 12)

        assert regular == (bad is None), matrix.to_dict()


def test_equation_without_property_is_still_two_regular():
    """Test that x + y = 3z lacks the property yet every 2-colouring of [1..9] has a solution."""
    system = parse_system("x + y = 3 z")

    assert columns_property(system.matrix) is None
    # (1,2,1) splits 1 and 2; then (2,4,2) (3,3,2) (3,6,3) (4,5,3) (3,9,4) force (6,9,5)
    assert search_bad_colouring(system, 2, 9) is None
    assert search_bad_colouring(system, 2, 20) is None
