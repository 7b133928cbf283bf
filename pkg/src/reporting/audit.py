"""
Audit files for battery runs and searches.

Every run is saved as timestamped JSON so that evaluate_results.py can
re-check it later.
"""

import json
from datetime import datetime
from pathlib import Path
from typing import Optional
import logging

from src.models import RunReport, SearchResult

logger = logging.getLogger(__name__)


class AuditLogger:
    """Writes machine-readable records of runs."""

    def __init__(self, output_dir: Path = Path("reports")):
        """
        Initialize audit logger.

        Args:
            output_dir: Directory to save audit files
        """
        self.output_dir = Path(output_dir)

    def _path(self, stem: str, suffix: str, filename: Optional[str]) -> Path:
        self.output_dir.mkdir(parents=True, exist_ok=True)
        if filename is None:
            timestamp = datetime.now().strftime('%Y%m%d_%H%M%S')
            filename = f"{stem}_{timestamp}.{suffix}"
        return self.output_dir / filename

    def save_report(self, report: RunReport, filename: Optional[str] = None) -> Path:
        """
        Save a battery report as JSON.

        Args:
            report: Battery report
            filename: Optional filename (default: battery_<scope>_<timestamp>.json)

        Returns:
            Path to saved file
        """
        filepath = self._path(f"battery_{report.scope}", "json", filename)
        payload = report.model_dump(mode="json")
        payload["totals"] = report.totals()
        with open(filepath, 'w', encoding='utf-8') as f:
            json.dump(payload, f, indent=2)
        logger.info(f"Battery report saved to: {filepath}")
        return filepath

    def generate_summary(self, report: RunReport) -> str:
        """
        Generate a short markdown summary, failed checks first.

        Args:
            report: Battery report

        Returns:
            Markdown formatted summary
        """
        totals = report.totals()
        lines = [
            "# Battery Summary\n",
            f"- **scope**: {report.scope}",
            f"- **checks**: {totals['checks']}",
            f"- **passed**: {totals['passed']}",
            f"- **failed**: {totals['failed']}",
            f"- **seconds**: {report.seconds:.1f}\n",
        ]
        ordered = sorted(report.checks, key=lambda c: c.passed)
        for check in ordered:
            mark = "x" if check.passed else " "
            lines.append(f"- [{mark}] {check.name}: {check.anchor}")
        return "\n".join(lines) + "\n"

    def save_summary(self, report: RunReport, filename: Optional[str] = None) -> Path:
        filepath = self._path(f"battery_{report.scope}_summary", "md", filename)
        with open(filepath, 'w', encoding='utf-8') as f:
            f.write(self.generate_summary(report))
        logger.info(f"Battery summary saved to: {filepath}")
        return filepath

    def save_search(self, result: SearchResult, filename: Optional[str] = None) -> Path:
        """Save a search result (witness included) as JSON."""
        stem = f"search_nu{result.k}_{result.m}x{result.n}_q{result.q}"
        filepath = self._path(stem, "json", filename)
        with open(filepath, 'w', encoding='utf-8') as f:
            json.dump(result.model_dump(mode="json"), f, indent=2)
        logger.info(f"Search result saved to: {filepath}")
        return filepath
