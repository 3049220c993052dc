import math
from fractions import Fraction

import pytest

from tripole.exactnum import QScalar
from tripole.field import DisplacementField
from tripole.geometry import TilingParams

SQ3 = math.sqrt(3.0)
T_FLOAT = 2.0 - SQ3


@pytest.fixture(scope="session")
def unit_field():
    """L = eps = 1, exact backend."""
    return DisplacementField(TilingParams(QScalar(1), 8), QScalar(1))


@pytest.fixture(scope="session")
def odd_field():
    """Non-trivial exact L and eps so that scalings are not hidden by ones."""
    return DisplacementField(TilingParams(QScalar(Fraction(3, 7)), 8), QScalar(Fraction(5, 32)))


@pytest.fixture(scope="session")
def float_field():
    return DisplacementField(TilingParams(QScalar(1), 8), 0.156)


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE_LINES = []


def record_criterion(n: int, title: str, ok: bool, detail: str = "") -> bool:
    line = f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {title}" + (f"  [{detail}]" if detail else "")
    ACCEPTANCE_LINES.append((n, line))
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
