import sys
from fractions import Fraction

import pytest

from stickysim.constructions import TailParams


@pytest.fixture
def paper_params():
    return TailParams(Fraction(1, 4), Fraction(1, 2), Fraction(3, 4))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    verdicts = getattr(mod, "VERDICTS", None)
    if not verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(verdicts):
        terminalreporter.write_line(verdicts[number])
