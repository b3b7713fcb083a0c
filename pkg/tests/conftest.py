"""Suite-wide pytest hooks: the acceptance summary block.

``test_acceptance.py`` records one line per criterion into the dict below;
after the run those lines are echoed in a terminal summary so the verdicts
are visible even with output capturing on.
"""

ACCEPTANCE_LINES: dict[int, str] = {}


def record_criterion(number: int, passed: bool, detail: str) -> None:
    verdict = "PASS" if passed else "FAIL"
    ACCEPTANCE_LINES[number] = f"criterion {number}: {verdict} — {detail}"


def record_skip(number: int, detail: str) -> None:
    ACCEPTANCE_LINES[number] = f"criterion {number}: SKIP — {detail}"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[number])
