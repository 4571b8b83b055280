"""
Tests for the equation DSL.
"""
from fractions import Fraction

import pytest

from partreg_core.ingestion.dsl import load_system, parse_system
from partreg_core.model.systems import SystemFamily, generate_prefix, render
from partreg_core.validation import SystemSyntaxError


def test_parse_schur():
    """Test parsing x + y = z."""
    system = parse_system("x + y = z")

    assert system.variables == ("x", "y", "z")
    assert system.matrix.rows == ((1, 1, -1),)
    assert system.family == SystemFamily.CUSTOM


def test_parse_coefficients_and_comments():
    """Test rational coefficients, '*' and trailing comments."""
    text = """
    # two equations
    2*x + 1/2 y = z   # first
    x - 3 w = 0
    """
    system = parse_system(text)

    assert system.variables == ("x", "y", "z", "w")
    assert system.matrix.rows[0] == (2, Fraction(1, 2), -1, 0)
    assert system.matrix.rows[1] == (1, 0, 0, -3)


def test_parse_combines_repeated_variables():
    """Test that repeated variables on both sides are combined."""
    system = parse_system("x + x + y = x + z")

    assert system.matrix.rows == ((1, 1, -1),)


def test_parse_unicode_minus():
    """Test that the unicode minus sign is accepted."""
    system = parse_system("x − y = 0")

    assert system.matrix.rows == ((1, -1),)


def test_parse_rejects_constant():
    """Test that inhomogeneous equations are rejected."""
    with pytest.raises(SystemSyntaxError) as exc:
        parse_system("x + y = z + 1")
    assert exc.value.line == 1


def test_parse_rejects_trivial_row():
    """Test that an equation reducing to 0 = 0 is rejected."""
    with pytest.raises(SystemSyntaxError):
        parse_system("x + y = z\nx = x")


def test_parse_rejects_empty():
    """Test that text without equations is rejected."""
    with pytest.raises(SystemSyntaxError):
        parse_system("# nothing here\n")


def test_parse_reports_column():
    """Test that an unexpected character is located."""
    with pytest.raises(SystemSyntaxError) as exc:
        parse_system("x + $ = y")
    assert exc.value.line == 1
    assert exc.value.column == 5


@pytest.mark.parametrize("text", ["x + y", "x + = y", "2 * = y", "x = y = z"])
def test_parse_grammar_errors(text):
    """Test malformed equations."""
    with pytest.raises(SystemSyntaxError):
        parse_system(text)


def test_render_round_trip():
    """Test that rendering a generated prefix parses back to the same system."""
    system = generate_prefix(SystemFamily.SYSTEM_B, 3)

    assert parse_system(render(system), SystemFamily.SYSTEM_B) == system


def test_load_system(tmp_path):
    """Test reading equations from a file."""
    path = tmp_path / "schur.eq"
    path.write_text("x + y = z\n", encoding="utf-8")

    system = load_system(path)

    assert system.variables == ("x", "y", "z")
