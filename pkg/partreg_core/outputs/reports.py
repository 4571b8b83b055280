"""
Report generation: render solver runs as markdown or JSON reports.
"""

import json
from datetime import datetime
from typing import Any, Dict

from partreg_core.logging import get_logger
from partreg_core.model.ratlin import format_rational

logger = get_logger(__name__)


def generate_markdown_report(document: Dict[str, Any]) -> str:
    """
    Generate a markdown-formatted report of a solver-trace document.

    Args:
        document: A "solver-trace" certificate

    Returns:
        Markdown-formatted report string
    """
    trace = document["trace"]
    solution = document["solution"]
    lines = []

    # Header
    lines.append(f"# {trace['family']} Solver Report")
    lines.append("")
    lines.append(f"**Colouring:** `{document['colouring']['spec']}`")
    domain = document["colouring"]["domain"]
    lines.append(
        f"**Window:** [{domain['lo']}, {domain['hi']}], levels 0..{domain['max_level']}"
    )
    lines.append(f"**Equations:** {trace['n_target']}")
    lines.append(f"**Analysis Time:** {datetime.now().isoformat()}")
    lines.append("")
    lines.append("---")
    lines.append("")

    # Summary
    lines.append("## Summary")
    lines.append("")
    lines.append(
        f"Found a solution of the first {trace['n_target']} equations in colour "
        f"{solution['colour']} (m = {trace['m']}, K = {trace['K']})."
    )
    lines.append("")
    lines.append("---")
    lines.append("")

    # Colour classes
    lines.append("## Colour Classes")
    lines.append("")
    lines.append("| Colour | Density | Dense | m | K | Certified |")
    lines.append("|---|---|---|---|---|---|")
    per_class = {entry["colour"]: entry for entry in trace["per_class"]}
    for colour, density in trace["densities"].items():
        entry = per_class.get(int(colour))
        if entry:
            lines.append(
                f"| {colour} | {density} | yes | {entry['m']} | {entry['K']} | {entry['certified']} |"
            )
        else:
            lines.append(f"| {colour} | {density} | no | | | |")
    lines.append("")

    # Prefix system
    lines.append("## Prefix System")
    lines.append("")
    progression = trace.get("progression")
    if progression:
        step = progression.get("step", progression["multiplier"] * progression["d"])
        lines.append(
            f"Solved {trace['p_rows']} equation(s) inside the progression "
            f"{step}*[{progression['l']}] at level {progression['j']}."
        )
    elif trace.get("child"):
        lines.append(
            f"Recursed {trace['recursion_depth']} time(s) with moduli {trace['recursion_moduli']}."
        )
    lines.append("")
    for name, value in list(trace["p_solution"].items())[:20]:
        lines.append(f"- `{name}` = {value}")
    lines.append("")

    # Extensions
    if trace["extensions"]:
        lines.append("## Extension Witnesses")
        lines.append("")
        for witness in trace["extensions"]:
            lines.append(
                f"- Equation {witness['k']}: target {witness['target']}, "
                f"x = [{', '.join(witness['xs'])}], z = [{', '.join(witness['zs'])}]"
            )
        lines.append("")

    if trace["notes"]:
        lines.append("## Notes")
        lines.append("")
        for note in trace["notes"]:
            lines.append(f"- {note}")
        lines.append("")

    lines.append("---")
    lines.append("")

    # Residuals
    lines.append("## Verification")
    lines.append("")
    residuals = solution["check"]["residuals"]
    nonzero = [r for r in residuals if r != format_rational(0)]
    lines.append(f"All {len(residuals)} residuals zero: {not nonzero}")
    lines.append("")
    lines.append("---")
    lines.append("")
    lines.append("*Generated by partreg-core*")

    return "\n".join(lines)


def generate_json_report(document: Dict[str, Any], indent: int = 2) -> str:
    """
    Generate a JSON report with a generation timestamp.

    Args:
        document: Any certificate document
        indent: JSON indentation level

    Returns:
        JSON-formatted report string
    """
    report = {**document, "generated_at": datetime.now().isoformat()}
    return json.dumps(report, indent=indent, default=str)


def save_report(document: Dict[str, Any], output_path: str, format: str = "markdown") -> None:
    """
    Save a report to a file.

    Args:
        document: Certificate document to render
        output_path: Path to save the report
        format: Report format ("markdown" or "json")

    Raises:
        ValueError: If the format is not supported
    """
    if format == "markdown":
        content = generate_markdown_report(document)
    elif format == "json":
        content = generate_json_report(document)
    else:
        raise ValueError(f"Unsupported format: {format}")

    with open(output_path, "w", encoding="utf-8") as f:
        f.write(content)

    logger.info(f"Report saved to: {output_path}")
