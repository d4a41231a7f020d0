"""Shared test configuration: acceptance-criteria result reporting.

Acceptance tests register one measured result per criterion; after the run
pytest prints a PASS/FAIL line for each, with the measured values, so the
gate can be read off the terminal without digging through test output.
"""

CRITERIA = (
    "parser round-trip",
    "alignment optimality",
    "gold round-trip",
    "metric oracle equivalence",
    "err anchors",
    "gradient check",
    "desk-scale experiment",
    "determinism",
)

_results: dict = {}


def record_criterion(name: str, passed: bool, detail: str = "") -> None:
    assert name in CRITERIA, f"unknown acceptance criterion {name!r}"
    _results[name] = (bool(passed), detail)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for name in CRITERIA:
        if name in _results:
            passed, detail = _results[name]
            status = "PASS" if passed else "FAIL"
        else:
            status, detail = "FAIL", "not run"
        line = f"{status}  {name}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)
