"""Suite-wide pytest plumbing.

The acceptance tests register one verdict line each; the terminal summary
replays them after the run so the whole gate can be audited from a plain
``pytest -v`` invocation, stdout capture notwithstanding.
"""

from __future__ import annotations

import time

_SESSION_START = time.perf_counter()
_ACCEPTANCE_LINES: list[str] = []


def record_criterion(line: str) -> None:
    """Queue one acceptance verdict line for the terminal summary."""
    _ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_LINES:
        return
    elapsed = time.perf_counter() - _SESSION_START
    terminalreporter.section("acceptance criteria")
    for line in _ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
    terminalreporter.write_line(f"suite wall time: {elapsed:.1f} s")
