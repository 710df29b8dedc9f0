import mpmath
import pytest
from mpmath import mp


def digits_agree(a, b):
    """Number of matching significant digits between a and b."""
    with mp.workdps(80):
        a, b = mpmath.mpc(a), mpmath.mpc(b)
        if a == b:
            return 80
        scale = max(abs(a), abs(b))
        return float(-mpmath.log10(abs(a - b) / scale))


@pytest.fixture
def agree():
    return digits_agree


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(LINES, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
