from fractions import Fraction
import json

import pytest

from src.models import CheckResult, RunReport, SearchResult, fraction_str
from src.reporting.audit import AuditLogger
from src.reporting.battery import Outcome, run_check
from src.reporting.generator import ReportGenerator


@pytest.fixture
def report():
    return RunReport(scope="fast", checks=[
        CheckResult(name="weights", anchor="binary 2x3", expected=[Fraction(1, 42)], actual=[Fraction(1, 42)], passed=True),
        CheckResult(name="census", anchor="cosets", expected={"a": 1}, actual={"a": 2}, passed=False,
                    detail={"ratio": Fraction(5, 336)}),
    ])


class TestModels:
    def test_fraction_str(self):
        assert fraction_str({"x": [Fraction(1, 2), Fraction(4, 2)], "y": 3}) == {"x": ["1/2", "2"], "y": 3}

    def test_check_values_are_exact_strings(self, report):
        assert report.checks[0].expected == ["1/42"]
        assert report.checks[1].detail == {"ratio": "5/336"}

    def test_totals(self, report):
        assert report.totals() == {"checks": 2, "passed": 1, "failed": 1}
        assert not report.ok


class TestGenerator:
    def test_tsv_cells(self):
        tsv = ReportGenerator().to_tsv(["rank", "weight"], [(1, Fraction(1, 56)), (2, Fraction(5, 336))])
        assert tsv == "rank\tweight\n1\t1/56\n2\t5/336\n"

    def test_markdown(self, report, tmp_path):
        generator = ReportGenerator(tmp_path)
        content = generator.generate_report_content(report)
        assert "1/2 passed" in content
        assert "| weights | binary 2x3 |" in content
        assert "### census" in content
        path = generator.save_report(report, "battery.md")
        assert path.read_text(encoding="utf-8") == content

    def test_report_tsv(self, report):
        lines = ReportGenerator().report_tsv(report).splitlines()
        assert lines[0].split("\t")[:3] == ["check", "anchor", "expected"]
        assert lines[2].split("\t")[4] == "False"


class TestAudit:
    def test_json_report(self, report, tmp_path):
        path = AuditLogger(tmp_path).save_report(report)
        payload = json.loads(path.read_text())
        assert payload["totals"]["failed"] == 1
        assert path.name.startswith("battery_fast_")

    def test_summary_lists_failures_first(self, report):
        summary = AuditLogger().generate_summary(report)
        assert summary.index("[ ] census") < summary.index("[x] weights")

    def test_search(self, tmp_path):
        result = SearchResult(m=3, n=2, q=2, k=1, minimum=6, proof=True)
        path = AuditLogger(tmp_path).save_search(result)
        assert path.name.startswith("search_nu1_3x2_q2_")
        assert json.loads(path.read_text())["minimum"] == 6


class TestRunCheck:
    def test_exception_becomes_failed_check(self):
        def broken(scope):
            raise ZeroDivisionError("boom")

        result = run_check("broken", "none", broken, "fast")
        assert not result.passed
        assert result.detail == {"error": "ZeroDivisionError", "message": "boom"}

    def test_outcome_is_recorded(self):
        result = run_check("ok", "none", lambda scope: Outcome(1, 1, True, {"scope": scope}), "fast")
        assert result.passed
        assert result.detail == {"scope": "fast"}
