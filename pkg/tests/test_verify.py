"""The check suite itself: coverage, determinism of the report text."""

from phasekit.verify import DEFAULT_TOLERANCES, format_report, run_verification


def test_static_checks_all_pass_and_cover_the_suite():
    results = run_verification(include_dynamics=False)
    assert len(results) >= 12
    assert len({r.name for r in results}) == len(results)
    assert all(r.passed for r in results)


def test_report_is_deterministic_text():
    results = run_verification(include_dynamics=False)
    again = run_verification(include_dynamics=False)
    assert format_report(results) == format_report(again)
    assert format_report(results).endswith("checks passed\n")


def test_tolerance_overrides_apply():
    results = run_verification(
        tolerances={"reality": 1e-30}, include_dynamics=False
    )
    failed = [r for r in results if not r.passed]
    assert [r.name for r in failed] == ["wigner_reality"]
    assert failed[0].tolerance == 1e-30
    assert DEFAULT_TOLERANCES["reality"] == 1e-9
