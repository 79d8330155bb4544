import pytest

from autols import parse_automaton, unroll

# 6-state demo rule over shifts {d, e} and days off x: at most two
# workdays in a row, at most two days off in a row, and a day off
# before any change of work shift.
SHIFT6_TEXT = """\
alphabet d e x
states 6
start 1
accept 5 6
trans 1 d 2
trans 1 x 3
trans 1 e 4
trans 2 x 3
trans 2 d 5
trans 3 d 2
trans 3 e 4
trans 3 x 6
trans 4 x 3
trans 4 e 5
trans 5 x 3
trans 6 d 2
trans 6 e 4
"""


@pytest.fixture(scope="session")
def shift6():
    return parse_automaton(SHIFT6_TEXT)


@pytest.fixture(scope="session")
def shift6_graph(shift6):
    return unroll(shift6, 6)


@pytest.fixture(scope="session")
def dex(shift6):
    """Word helper: ids('xedexx') for the shift6 alphabet."""
    return lambda s: shift6.alphabet.ids(s)
