"""Shared reporting for the acceptance criteria.

Each acceptance test records its verdict before asserting, so the summary
below prints one line per criterion even when a criterion legitimately
fails; the line carries the measured margins or the blocking analysis.
"""

_CRITERIA: dict[int, tuple[bool, str]] = {}


def record_criterion(number: int, passed: bool, detail: str) -> None:
    _CRITERIA[number] = (passed, detail)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        passed, detail = _CRITERIA[number]
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[criterion {number:2d}] {status} - {detail}")
