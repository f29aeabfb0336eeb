"""Shared test helpers and the acceptance-criterion summary reporter."""

from __future__ import annotations

_ACCEPTANCE_LINES: list[str] = []


def record_criterion(number: int, ok: bool, detail: str) -> None:
    """Register one acceptance-criterion outcome for the terminal summary."""
    _ACCEPTANCE_LINES.append(
        "criterion %d: %s  %s" % (number, "PASS" if ok else "FAIL", detail)
    )


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for line in sorted(_ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
