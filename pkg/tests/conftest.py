"""Shared configurations for the test suite.

The figure configurations are built to satisfy their captions: the figures
themselves are only available as captions, so each fixture documents the
property it was built to exhibit.
"""
import pytest

from ringmarch.io import parse

# k=3, n=8. Mid track: green (0) behind blue (2), red (5) ahead and facing it.
# Top track: a purple conflict pair at x=5,6. Bottom track: two clockwise
# locusts that leave the cell under blue's post-move position free.
STEP_LEFT = """\
t=0
..>..><.
>.>..<..
>.....>.
"""
BLUE = 3  # scan order: bottom track first
PURPLE = (6, 7)

# One track holding two segments whose compact partition has
# L1 = 3, L2 = 3, L3 = 1.
POTENTIAL_TRACK = ">>..>><<..<<...."

# Two compact sets with facing heads one cell apart.
DEADLOCKED = ">.>><.<<.."


@pytest.fixture
def step_left():
    return parse(STEP_LEFT)


@pytest.fixture
def potential_track():
    return parse(POTENTIAL_TRACK)


@pytest.fixture
def deadlocked():
    return parse(DEADLOCKED)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import VERDICTS
    except ImportError:
        return
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in VERDICTS:
            terminalreporter.write_line(line)
