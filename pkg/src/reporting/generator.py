"""
Report generator for battery runs and result tables.

Outputs markdown for humans and TSV for tables; exact values are rendered
as p/q strings, never as floats.
"""

from datetime import datetime
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence
import json
import logging

from src.models import RunReport, fraction_str

logger = logging.getLogger(__name__)


def _cell(value: Any) -> str:
    value = fraction_str(value)
    if isinstance(value, (dict, list)):
        return json.dumps(value, separators=(",", ":"))
    return str(value)


class ReportGenerator:
    """Generates markdown and TSV renderings of battery reports."""

    def __init__(self, output_dir: Path = Path("reports")):
        """
        Initialize report generator.

        Args:
            output_dir: Directory to save reports (created when a report is saved)
        """
        self.output_dir = Path(output_dir)

    def format_checks_table(self, report: RunReport) -> str:
        """
        Format checks as markdown table.

        Args:
            report: Battery report

        Returns:
            Markdown table
        """
        lines = [
            "| Check | Anchor | Expected | Actual | Result | Seconds |",
            "|-------|--------|----------|--------|--------|---------|",
        ]
        for check in report.checks:
            status = "PASS" if check.passed else "FAIL"
            lines.append(
                f"| {check.name} | {check.anchor} | `{_cell(check.expected)}` | `{_cell(check.actual)}` "
                f"| {status} | {check.seconds:.2f} |"
            )
        return "\n".join(lines) + "\n"

    def format_failures(self, report: RunReport) -> str:
        failed = [c for c in report.checks if not c.passed]
        if not failed:
            return "_All checks passed_\n"
        sections = []
        for check in failed:
            sections.append(f"### {check.name}\n")
            sections.append(f"- Expected: `{_cell(check.expected)}`")
            sections.append(f"- Actual: `{_cell(check.actual)}`")
            if check.detail:
                sections.append(f"- Detail: `{_cell(check.detail)}`")
            sections.append("")
        return "\n".join(sections)

    def generate_report_content(self, report: RunReport) -> str:
        """
        Generate the full markdown report.

        Args:
            report: Battery report

        Returns:
            Markdown document
        """
        totals = report.totals()
        return (
            f"# mrdlab battery ({report.scope})\n\n"
            f"Started {report.started_at.isoformat(timespec='seconds')}, "
            f"{totals['passed']}/{totals['checks']} passed in {report.seconds:.1f}s.\n\n"
            f"## Checks\n\n{self.format_checks_table(report)}\n"
            f"## Failures\n\n{self.format_failures(report)}"
        )

    def to_tsv(self, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
        """Tab-separated table with exact cells."""
        lines = ["\t".join(header)]
        lines.extend("\t".join(_cell(v) for v in row) for row in rows)
        return "\n".join(lines) + "\n"

    def report_tsv(self, report: RunReport) -> str:
        return self.to_tsv(
            ["check", "anchor", "expected", "actual", "passed", "seconds"],
            ([c.name, c.anchor, c.expected, c.actual, c.passed, f"{c.seconds:.3f}"] for c in report.checks),
        )

    def save_report(self, report: RunReport, filename: Optional[str] = None) -> Path:
        """
        Save the markdown report.

        Args:
            report: Battery report
            filename: Optional filename (default: battery_<scope>_<timestamp>.md)

        Returns:
            Path to saved report
        """
        if filename is None:
            timestamp = datetime.now().strftime('%Y%m%d_%H%M%S')
            filename = f"battery_{report.scope}_{timestamp}.md"
        self.output_dir.mkdir(parents=True, exist_ok=True)
        filepath = self.output_dir / filename
        with open(filepath, 'w', encoding='utf-8') as f:
            f.write(self.generate_report_content(report))
        logger.info(f"Report saved to: {filepath}")
        return filepath
