import time
from contextlib import contextmanager

import pytest

_RESULTS: list[tuple[int, str, bool, float, str]] = []


class Criterion:
    def __init__(self):
        self.notes: list[str] = []

    def note(self, text: str) -> None:
        self.notes.append(text)


@pytest.fixture
def criterion():
    @contextmanager
    def _run(number: int, title: str, budget_s: float):
        rec = Criterion()
        start = time.perf_counter()
        ok = False
        try:
            yield rec
            elapsed = time.perf_counter() - start
            assert elapsed < budget_s, f"took {elapsed:.2f}s, budget {budget_s}s"
            ok = True
        finally:
            elapsed = time.perf_counter() - start
            _RESULTS.append((number, title, ok, elapsed, "; ".join(rec.notes)))

    return _run


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, elapsed, notes in sorted(_RESULTS):
        status = "PASS" if ok else "FAIL"
        line = f"[{status}] {number}. {title} ({elapsed:.2f}s)"
        if notes:
            line += f" -- {notes}"
        terminalreporter.write_line(line)
