"""Collects one verdict line per acceptance criterion and prints them at the end of the run."""

import pytest

_LINES: dict[int, list[tuple[bool, str]]] = {}


@pytest.fixture
def report():
    def record(number: int, ok: bool, detail: str) -> None:
        _LINES.setdefault(number, []).append((ok, detail))
        print(f"criterion {number}: {'PASS' if ok else 'FAIL'} ({detail})")

    return record


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_LINES):
        parts = _LINES[number]
        ok = all(p[0] for p in parts)
        detail = "; ".join(p[1] for p in parts)
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}")
