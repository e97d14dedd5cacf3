import pytest

from quantmon import boolprop as bp
from quantmon import qprop as qp
from quantmon.trace import Alphabet


@pytest.fixture(scope="session")
def server():
    return qp.server_alphabet(1).alphabet


@pytest.fixture(scope="session")
def ab():
    return Alphabet(("a", "b"))


@pytest.fixture(scope="session")
def never_b(ab):
    return bp.safety_never(ab, "b")


@pytest.fixture(scope="session")
def eventually_a(ab):
    return bp.cosafety_eventually(ab, "a")


@pytest.fixture(scope="session")
def inf_often_a(ab):
    return bp.buchi_infinitely_often(ab, "a")


@pytest.fixture(scope="session")
def ev_always_a(ab):
    return bp.cobuchi_eventually_always(ab, "a")
