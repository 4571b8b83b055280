"""
Outputs layer: JSON certificates, their independent re-verification and solver reports.
"""

from partreg_core.outputs.certificates import (
    SCHEMA_VERSION,
    load_document,
    write_document,
)
from partreg_core.outputs.reports import generate_markdown_report, generate_json_report, save_report
from partreg_core.outputs.verify import VerificationResult, verify_document

__all__ = [
    "SCHEMA_VERSION",
    "load_document",
    "write_document",
    "generate_markdown_report",
    "generate_json_report",
    "save_report",
    "VerificationResult",
    "verify_document",
]
