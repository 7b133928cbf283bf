#!/usr/bin/env python3
"""
Re-check a saved battery report against the reference values.

Usage:
    python evaluate_results.py <report_file>

Example:
    python evaluate_results.py "reports/battery_fast_*.json"
"""

import sys
import json
import glob
from pathlib import Path
from typing import Any, Dict, List, Tuple

# Path to evaluation data file
EVALUATION_FILE = Path(__file__).parent / "evaluation_data.json"


def load_evaluation_data() -> Tuple[Dict[str, Any], Dict[str, Any]]:
    """Load reference values from JSON file (single source of truth)."""
    if not EVALUATION_FILE.exists():
        print(f"❌ Evaluation data file not found: {EVALUATION_FILE}")
        print("Please ensure evaluation_data.json exists in the project root.")
        sys.exit(1)

    with open(EVALUATION_FILE, 'r') as f:
        data = json.load(f)

    return data['checks'], data.get('evaluation_criteria', {})


# Load evaluation data at module level
EVALUATION_DATA, CRITERIA = load_evaluation_data()


def load_report(file_pattern: str) -> Dict[str, Any]:
    """Load a battery report written by AuditLogger."""
    files = glob.glob(file_pattern)
    if not files:
        print(f"❌ No report file found matching: {file_pattern}")
        sys.exit(1)

    # Use most recent file
    report_file = sorted(files)[-1]
    print(f"📂 Loading report from: {report_file}\n")

    with open(report_file, 'r') as f:
        return json.load(f)


def normalize(value: Any) -> Any:
    """Compare leaves as strings so 56, "56" and Fraction(56) agree."""
    if isinstance(value, dict):
        return {str(k): normalize(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [normalize(v) for v in value]
    return str(value)


def diff_values(expected: Dict[str, Any], actual: Dict[str, Any]) -> List[str]:
    """Keys of ``expected`` whose recorded value differs."""
    actual = actual or {}
    return [
        key for key, value in expected.items()
        if normalize(actual.get(key)) != normalize(value)
    ]


def evaluate_report(report: Dict[str, Any]) -> Dict[str, Any]:
    """Compare every recorded check with its reference entry."""
    scope = report.get('scope', 'all')
    recorded = {check['name']: check for check in report.get('checks', [])}

    matched, mismatched, missing = [], [], []
    for name, reference in EVALUATION_DATA.items():
        check = recorded.get(name)
        if check is None:
            missing.append(name)
            print(f"⚠️  {name}: not in report")
            continue

        expected = dict(reference['expected'])
        if scope == 'all':
            expected.update(reference.get('full_only', {}))
        wrong = diff_values(expected, check.get('actual'))

        if wrong or not check.get('passed'):
            mismatched.append(name)
            print(f"❌ {name}: {reference['description']}")
            for key in wrong:
                print(f"     {key}: expected {expected[key]!r}, got {(check.get('actual') or {}).get(key)!r}")
            if check.get('detail', {}).get('error'):
                print(f"     raised {check['detail']['error']}: {check['detail'].get('message')}")
        else:
            matched.append(name)
            print(f"✅ {name}: {reference['description']}")

    unknown = sorted(set(recorded) - set(EVALUATION_DATA))
    total = len(EVALUATION_DATA)
    return {
        'scope': scope,
        'total': total,
        'matched': len(matched),
        'mismatched': mismatched,
        'missing': missing,
        'unknown': unknown,
        'pass_rate': len(matched) / total if total else 0,
    }


def print_summary(report: Dict[str, Any], metrics: Dict[str, Any]):
    """Print evaluation summary."""
    print("\n" + "="*60)
    print(f"EVALUATION SUMMARY: battery ({metrics['scope']})")
    print("="*60)

    print(f"\n📊 Reference Agreement:")
    print(f"  Matched:    {metrics['pass_rate']:.0%} ({metrics['matched']}/{metrics['total']})")
    print(f"  Mismatched: {', '.join(metrics['mismatched']) or 'none'}")
    print(f"  Missing:    {', '.join(metrics['missing']) or 'none'}")
    if metrics['unknown']:
        print(f"  Unreferenced checks: {', '.join(metrics['unknown'])}")

    totals = report.get('totals', {})
    print(f"\n⏱️  Run:")
    print(f"  Started:  {report.get('started_at', 'N/A')}")
    print(f"  Seconds:  {report.get('seconds', 0):.1f}")
    print(f"  Passed:   {totals.get('passed', 'N/A')}/{totals.get('checks', 'N/A')}")

    slowest = sorted(report.get('checks', []), key=lambda c: c.get('seconds', 0), reverse=True)[:3]
    if slowest:
        print(f"\n🐢 Slowest checks:")
        for check in slowest:
            print(f"  {check['name']:<20} {check.get('seconds', 0):.2f}s")

    target = CRITERIA.get(f"{'full' if metrics['scope'] == 'all' else 'fast'}_pass_rate", 1.0)
    print(f"\n✅ Assessment:")
    if metrics['pass_rate'] >= target:
        print(f"  🌟 REPRODUCED - every reference value matched")
    else:
        print(f"  ⚠️  NOT REPRODUCED - below the {target:.0%} target")

    print("\n" + "="*60 + "\n")


def main():
    if len(sys.argv) < 2:
        print("Usage: python evaluate_results.py <report_file>")
        print("\nExamples:")
        print('  python evaluate_results.py "reports/battery_fast_*.json"')
        print('  python evaluate_results.py "reports/battery_all_*.json"')
        sys.exit(1)

    report = load_report(sys.argv[1])

    print(f"📋 Checking recorded values:\n")
    metrics = evaluate_report(report)
    print_summary(report, metrics)
    sys.exit(0 if metrics['pass_rate'] >= 1.0 else 1)


if __name__ == "__main__":
    main()
