"""
Tests for certificate documents, re-verification and reports.
"""
import json
from fractions import Fraction

import pytest

from partreg_core.cli.commands import solve_document
from partreg_core.colouring.rules import parse_colouring
from partreg_core.colouring.search import find_mono_solution, search_bad_colouring
from partreg_core.config import EngineConfig
from partreg_core.ingestion.dsl import parse_system
from partreg_core.ingestion.specs import stabilize_spec
from partreg_core.model.ratlin import RatMatrix
from partreg_core.model.systems import CoefficientSequence, SystemFamily, image_variables
from partreg_core.outputs.certificates import (
    bad_colouring_document,
    columns_document,
    envelope,
    image_document,
    load_document,
    mono_solution_document,
    obstruction_document,
    stabilization_document,
    violation_document,
    write_document,
)
from partreg_core.outputs.reports import generate_markdown_report, save_report
from partreg_core.outputs.verify import verify_document, verify_documents
from partreg_core.reasoning.columns import columns_property
from partreg_core.reasoning.witnesses import (
    image_expressions,
    verify_iprnz,
    verify_mod3_obstruction,
)
from partreg_core.validation import InvariantViolation

SCHUR = "x + y = z"


def _failed(result, invariant):
    return any(f.split(":")[0] == invariant for f in result.failures)


@pytest.fixture
def schur_columns_doc():
    matrix = RatMatrix.from_rows([[1, 1, -1]])
    return columns_document(matrix, columns_property(matrix))


@pytest.fixture
def mono_doc():
    system = parse_system(SCHUR)
    col = parse_colouring("mod:2", 20)
    return mono_solution_document(system, col, find_mono_solution(system, col, 20), 20)


@pytest.fixture
def solver_doc():
    config = EngineConfig(
        window=2000,
        levels=8,
        dyadic_window=600,
        stabilize_window=1500,
        extension_window=1500,
        k_max=16,
        l_cap=6,
    )
    return solve_document(SystemFamily.SYSTEM_C, "mod:1", 2, config=config, window=2000)


def test_envelope_tags_schema_and_kind():
    """Test the common document header."""
    doc = envelope("selftest", {"passed": True})

    assert doc["schema"] == "v1"
    assert doc["kind"] == "selftest"
    with pytest.raises(InvariantViolation):
        envelope("mystery", {})


def test_columns_certificate_verifies(schur_columns_doc):
    """Test that a genuine columns certificate passes."""
    result = verify_document(schur_columns_doc)

    assert result.valid
    assert result.kind == "columns-certificate"


def test_columns_certificate_tampered_witness(schur_columns_doc):
    """Test that a wrong span witness is caught."""
    schur_columns_doc["certificate"]["witnesses"] = [["2", "0"]]

    result = verify_document(schur_columns_doc)

    assert not result.valid
    assert _failed(result, "witness-recombination")


def test_columns_negative_verdict_rechecked():
    """Test that negative verdicts are enumerated for small matrices."""
    matrix = RatMatrix.from_rows([[2, 2, -1]])
    honest = columns_document(matrix, None)
    assert verify_document(honest).valid

    lying = columns_document(RatMatrix.from_rows([[1, 1, -1]]), None)
    result = verify_document(lying)
    assert _failed(result, "no-partition")


def test_bad_colouring_verifies():
    """Test that the Schur colouring of [1..4] passes, and a broken one fails."""
    system = parse_system(SCHUR)
    doc = bad_colouring_document(system, 2, 4, search_bad_colouring(system, 2, 4))
    assert verify_document(doc).valid

    doc["colours"] = [1, 1, 2, 2]
    result = verify_document(doc)
    assert _failed(result, "no-monochromatic-solution")

    doc["colours"] = [1, 3, 2, 1]
    assert _failed(verify_document(doc), "colouring-total")


def test_mono_solution_verifies(mono_doc):
    """Test that a found monochromatic solution passes."""
    assert verify_document(mono_doc).valid


def test_mono_solution_changed_value(mono_doc):
    """Test that an altered value breaks the residual check."""
    mono_doc["solution"]["assignment"]["z"] = "5"

    result = verify_document(mono_doc)

    assert not result.valid
    assert _failed(result, "residuals-zero")


def test_mono_solution_outside_domain(mono_doc):
    """Test that values outside the coloured window are rejected."""
    assignment = mono_doc["solution"]["assignment"]
    assignment.update({"x": "20", "y": "22", "z": "42"})

    result = verify_document(mono_doc)

    assert _failed(result, "inside-domain")
    assert _failed(result, "within-bound")


def test_solver_trace_verifies(solver_doc):
    """Test that a solver document passes, and fails once tampered with."""
    assert verify_document(solver_doc).valid

    solver_doc["solution"]["assignment"]["z_2"] = "7"
    result = verify_document(solver_doc)
    assert _failed(result, "residuals-zero")


def test_solver_trace_extension_balance(solver_doc):
    """Test that a broken extension witness is caught."""
    solver_doc["trace"]["extensions"][0]["zs"] = ["9"]

    assert _failed(verify_document(solver_doc), "extension-balance")


def test_stabilization_report_recomputed():
    """Test that stabilization reports are rechecked by a fresh run."""
    config = EngineConfig()
    doc = stabilization_document(stabilize_spec("mod:3,1", 3000, config=config), "mod:3,1", 3000, "difference", config)
    assert doc["kind"] == "stabilization-report"
    assert verify_document(doc).valid

    doc["report"]["m"] = 6
    assert _failed(verify_document(doc), "stable-m")


def test_coset_report_kind():
    """Test that asymmetric runs emit a coset report."""
    config = EngineConfig()
    report = stabilize_spec("mod:3,1", 3000, "asymmetric", k=2, config=config)
    doc = stabilization_document(report, "mod:3,1", 3000, "asymmetric", config, k=2)

    assert doc["kind"] == "coset-report"
    assert verify_document(doc).valid


def test_mod3_obstruction_document():
    """Test the residue-class obstruction certificate."""
    doc = obstruction_document(verify_mod3_obstruction(3, 200))
    assert verify_document(doc).valid

    doc["agree"] = False
    assert _failed(verify_document(doc), "checks-agree")


def test_iprnz_document():
    """Test the interval-escape certificate."""
    eighth = Fraction(1, 8)
    doc = violation_document(verify_iprnz(Fraction(1, 2), eighth, eighth), eighth, eighth)
    assert verify_document(doc).valid

    doc["report"]["value"] = "5/4"
    assert _failed(verify_document(doc), "expression-value")


def test_image_document():
    """Test that the image rows are recomputed from the assignment."""
    values = {name: 1 for name in image_variables(2)}
    seq = CoefficientSequence.pow2()
    doc = image_document(2, values, image_expressions(2, values), seq)
    assert verify_document(doc).valid

    doc["assignment"]["y"] = "2"
    assert _failed(verify_document(doc), "image-row")


def test_verify_rejects_bad_envelopes(schur_columns_doc):
    """Test schema, kind and shape problems."""
    assert _failed(verify_document(dict(schur_columns_doc, schema="v0")), "schema")
    assert _failed(verify_document(dict(schur_columns_doc, kind="mystery")), "kind")

    broken = dict(schur_columns_doc)
    del broken["matrix"]
    assert _failed(verify_document(broken), "well-formed")


def test_verify_documents(schur_columns_doc, mono_doc):
    """Test that a batch is valid only when every document is."""
    ok, results = verify_documents([schur_columns_doc, mono_doc])
    assert ok
    assert len(results) == 2

    mono_doc["solution"]["assignment"]["x"] = "4"
    ok, _ = verify_documents([schur_columns_doc, mono_doc])
    assert not ok


def test_write_and_load_document(tmp_path, schur_columns_doc):
    """Test writing a certificate and loading it back."""
    path = tmp_path / "columns.json"
    write_document(schur_columns_doc, str(path))

    assert load_document(str(path)) == schur_columns_doc


def test_load_document_rejects_bad_files(tmp_path):
    """Test JSON, schema and kind checks on load."""
    not_json = tmp_path / "a.json"
    not_json.write_text("{oops", encoding="utf-8")
    old_schema = tmp_path / "b.json"
    old_schema.write_text(json.dumps({"schema": "v0", "kind": "selftest"}), encoding="utf-8")
    odd_kind = tmp_path / "c.json"
    odd_kind.write_text(json.dumps({"schema": "v1", "kind": "mystery"}), encoding="utf-8")

    for path in (not_json, old_schema, odd_kind):
        with pytest.raises(InvariantViolation):
            load_document(str(path))


def test_markdown_report(solver_doc):
    """Test the solver report layout."""
    report = generate_markdown_report(solver_doc)

    assert report.startswith("# SystemC Solver Report")
    assert "## Colour Classes" in report
    assert "inside the progression 1*[3] at level 0" in report
    assert "## Extension Witnesses" in report
    assert "*Generated by partreg-core*" in report


def test_markdown_report_without_step(solver_doc):
    """Test that traces written before the step field still render."""
    del solver_doc["trace"]["progression"]["step"]

    assert "inside the progression 1*[3]" in generate_markdown_report(solver_doc)


def test_save_report(tmp_path, solver_doc):
    """Test saving in both formats."""
    md_path = tmp_path / "report.md"
    json_path = tmp_path / "report.json"

    save_report(solver_doc, str(md_path), format="markdown")
    save_report(solver_doc, str(json_path), format="json")

    assert "Solver Report" in md_path.read_text(encoding="utf-8")
    assert json.loads(json_path.read_text(encoding="utf-8"))["kind"] == "solver-trace"
    with pytest.raises(ValueError):
        save_report(solver_doc, str(tmp_path / "x"), format="html")
