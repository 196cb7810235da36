"""Collects acceptance verdicts and prints them at the end of the session."""

import pytest

_VERDICTS = []


class AcceptanceLog:
    def record(self, criterion, ok, detail=""):
        line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'}  {detail}".rstrip()
        _VERDICTS.append(line)
        print(line)
        return ok

    def note(self, text):
        _VERDICTS.append(f"    {text}")
        print(text)


@pytest.fixture(scope="session")
def acceptance():
    return AcceptanceLog()


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in _VERDICTS:
            terminalreporter.write_line(line)
