"""Repo-wide pytest plumbing: the acceptance-criterion recorder.

Acceptance tests wrap their assertions in the `criterion` context manager,
and every recorded criterion gets one PASS/FAIL line in the terminal
summary, visible even when stdout capture is on.
"""

from __future__ import annotations

import pytest

_RESULTS: list[tuple[str, str, str]] = []


class _Criterion:
    def __init__(self, tag: str, name: str) -> None:
        self.tag = tag
        self.name = name

    def __enter__(self) -> "_Criterion":
        return self

    def __exit__(self, exc_type, exc, tb) -> bool:
        status = "PASS" if exc_type is None else "FAIL"
        _RESULTS.append((self.tag, self.name, status))
        print(f"[{self.tag}] {self.name}: {status}")
        return False


@pytest.fixture
def criterion():
    """criterion(tag, name) -> context manager recording PASS or FAIL."""
    return _Criterion


def pytest_terminal_summary(terminalreporter) -> None:
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for tag, name, status in _RESULTS:
        terminalreporter.write_line(f"[{tag}] {name}: {status}")
