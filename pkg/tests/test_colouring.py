"""
Tests for colourings and the monochromatic / bad-colouring searches.
"""
from fractions import Fraction

import pytest

from partreg_core.colouring.rules import (
    Domain,
    explicit_colouring,
    load_colouring_file,
    parse_colouring,
    verify_colouring_partition,
)
from partreg_core.colouring.search import (
    find_mono_solution,
    is_bad_colouring,
    relabel,
    search_bad_colouring,
)
from partreg_core.ingestion.dsl import parse_system
from partreg_core.validation import ContractViolation, LimitExceeded, SearchLimits

SCHUR = "x + y = z"


def test_domain_contains():
    """Test membership of integers and dyadic rationals."""
    domain = Domain(1, 10, max_level=2)

    assert domain.contains(Fraction(10))
    assert domain.contains(Fraction(5, 2))
    assert domain.contains(Fraction(1, 4))
    assert not domain.contains(Fraction(1, 8))
    assert not domain.contains(Fraction(1, 3))
    assert not domain.contains(Fraction(11))


def test_residue_colouring():
    """Test mod:3 colours and its spec string."""
    col = parse_colouring("mod:3", 30)

    assert col.r == 3
    assert col.colour_of(Fraction(3)) == 1
    assert col.colour_of(Fraction(4)) == 2
    assert col.spec == "mod:3"
    assert verify_colouring_partition(col)


def test_residue_colouring_uses_lowest_terms():
    """Test that dyadic points are coloured by their reduced numerator."""
    col = parse_colouring("mod:3", 10, max_level=1)

    assert col.colour_of(Fraction(5, 2)) == 3
    assert col.colour_of(Fraction(4, 2)) == col.colour_of(Fraction(2))


def test_residue_colouring_with_map():
    """Test an explicit residue map that leaves a residue uncoloured."""
    col = parse_colouring("mod:3:0=1,1=2", 10)

    assert col.spec == "mod:3:0=1,1=2"
    assert col.r == 2
    assert not verify_colouring_partition(col)


def test_level_colouring():
    """Test the level-parity colouring."""
    col = parse_colouring("level:2", 10, max_level=2)

    assert col.colour_of(Fraction(3)) == 1
    assert col.colour_of(Fraction(3, 2)) == 2
    assert col.colour_of(Fraction(3, 4)) == 1


def test_sign_colouring_leaves_zero_uncoloured():
    """Test that 0 gets no colour under the sign rule."""
    assert not verify_colouring_partition(parse_colouring("sign", 5))
    assert verify_colouring_partition(parse_colouring("sign", 5, lo=1))


def test_colour_of_outside_domain():
    """Test that colouring outside the domain is a contract violation."""
    col = parse_colouring("mod:3", 10)

    with pytest.raises(ContractViolation):
        col.colour_of(Fraction(11))
    with pytest.raises(ContractViolation):
        col.colour_of(Fraction(1, 2))


@pytest.mark.parametrize("spec", ["mod:x", "level:two", "rainbow"])
def test_parse_colouring_rejects_bad_specs(spec):
    """Test malformed colouring specs."""
    with pytest.raises(ContractViolation):
        parse_colouring(spec, 10)


def test_load_colouring_file(tmp_path):
    """Test reading one colour per line."""
    path = tmp_path / "schur4.col"
    path.write_text("1\n2\n# comment\n2\n1\n", encoding="utf-8")

    col = load_colouring_file(path)

    assert col.level_colours().tolist() == [1, 2, 2, 1]
    assert col.domain == Domain(1, 4)


def test_induced_colouring():
    """Test the colouring induced along a progression."""
    col = parse_colouring("mod:3", 30)
    induced = col.induced(3, 5)

    assert induced.level_colours().tolist() == [1, 1, 1, 1, 1]
    assert induced.r == 3


def test_relabel():
    """Test permuting colour labels."""
    col = explicit_colouring([1, 2, 2, 1])

    assert relabel(col, [2, 1]).level_colours().tolist() == [2, 1, 1, 2]
    with pytest.raises(ContractViolation):
        relabel(col, [1, 1])


def test_find_mono_solution_schur():
    """Test the lexicographically least monochromatic Schur triple under mod:2."""
    system = parse_system(SCHUR)
    report = find_mono_solution(system, parse_colouring("mod:2", 20))

    assert report is not None
    assert report.colour == 1
    assert [report.assignment[v] for v in ("x", "y", "z")] == [2, 2, 4]
    assert report.check.all_zero


def test_find_mono_solution_distinct():
    """Test that distinct values skip x = y."""
    system = parse_system(SCHUR)
    report = find_mono_solution(system, parse_colouring("mod:2", 20), distinct=True)

    assert [report.assignment[v] for v in ("x", "y", "z")] == [2, 4, 6]


def test_find_mono_solution_bound_checked():
    """Test that the search bound must fit the domain."""
    with pytest.raises(ContractViolation):
        find_mono_solution(parse_system(SCHUR), parse_colouring("mod:2", 20), 21)


def test_find_mono_solution_dyadic_level():
    """Test searching at dyadic level 1."""
    col = parse_colouring("mod:2", 20, max_level=1)
    report = find_mono_solution(parse_system(SCHUR), col, level=1)

    assert report is not None
    assert report.level == 1
    assert report.assignment["x"].denominator in (1, 2)
    assert report.check.all_zero


def test_schur_bad_colouring_of_four():
    """Test the first bad 2-colouring of [1..4] for x + y = z."""
    col = search_bad_colouring(parse_system(SCHUR), 2, 4)

    assert col is not None
    assert col.level_colours().tolist() == [1, 2, 2, 1]
    assert is_bad_colouring(parse_system(SCHUR), col)


def test_schur_number_two_colours():
    """Test that every 2-colouring of [1..5] has a Schur triple."""
    assert search_bad_colouring(parse_system(SCHUR), 2, 5) is None


def test_search_bad_colouring_space_cap():
    """Test that r^N beyond the cap raises LimitExceeded."""
    with pytest.raises(LimitExceeded):
        search_bad_colouring(parse_system(SCHUR), 2, 30)
    with pytest.raises(LimitExceeded):
        search_bad_colouring(parse_system(SCHUR), 2, 21, limits=SearchLimits.strict())
