"""One test per acceptance criterion, each at its stated tolerance.

Every check prints a single PASS/FAIL line; the lines are also collected and
repeated in the terminal summary so the table appears under ``pytest -v``.
"""
import pytest

from airytau import acceptance

LINES = []


@pytest.mark.parametrize("fn", acceptance.ALL, ids=[f"criterion_{i}" for i in range(1, 12)])
def test_criterion(fn):
    check = fn()
    line = check.line()
    LINES.append(line)
    print(line)
    assert check.passed, line
