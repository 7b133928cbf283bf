import pytest

from src.reporting.battery import (
    CHECKS,
    check_counting,
    check_coset_census,
    check_f_set_extraction,
    check_floor_cases,
    check_joint_laws,
    check_nu1_3x2,
    check_nu2_3x2,
    check_orthomorphism,
    check_plane_lemma,
    check_total_weight,
    check_vertex_example,
    check_weight_goodness,
    check_weight_tables,
    run_battery,
)


@pytest.mark.parametrize("check", [
    check_weight_tables,
    check_total_weight,
    check_weight_goodness,
    check_coset_census,
    check_nu1_3x2,
    check_floor_cases,
    check_plane_lemma,
    check_vertex_example,
    check_orthomorphism,
    check_joint_laws,
    check_f_set_extraction,
])
def test_fast_checks_pass(check):
    outcome = check("fast")
    assert outcome.passed, (outcome.expected, outcome.actual)


def test_counting_check():
    outcome = check_counting("fast")
    assert outcome.passed
    assert outcome.detail["tuples"] > 0


def test_fast_scope_skips_the_line_search():
    outcome = check_nu2_3x2("fast")
    assert outcome.passed
    assert outcome.detail == {"search": "skipped in fast scope"}
    assert "nu" not in outcome.actual


def test_unknown_scope():
    with pytest.raises(ValueError):
        run_battery("medium")


def test_check_names_are_unique():
    names = [name for name, _, _ in CHECKS]
    assert len(names) == len(set(names))


@pytest.mark.slow
def test_full_battery():
    report = run_battery("all")
    assert report.ok, [c.name for c in report.checks if not c.passed]
