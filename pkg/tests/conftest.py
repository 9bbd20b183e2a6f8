import pytest

from stabtree.graph import build_graph
from stabtree.protocol import ROOT_STATE, ProcessState, Status


@pytest.fixture
def path3():
    """r(0) - a(1) - b(2), unit weights."""
    return build_graph([(0, 1, 1), (1, 2, 1)], 3, 0)


@pytest.fixture
def triangle():
    """r(0), a(1), b(2) with weights r-a=2, a-b=3, b-r=1."""
    return build_graph([(0, 1, 2), (1, 2, 3), (2, 0, 1)], 3, 0)


@pytest.fixture
def two_comp():
    """Components {r} and {a(1), b(2)} with a-b=1."""
    return build_graph([(1, 2, 1)], 3, 0)


def mk_config(g, **overrides):
    """Configuration builder: mk_config(g, n1=(Status.C, 0, 1), ...).

    Unspecified non-root nodes default to isolated (par self, d 0).
    """
    states = []
    for u in range(g.node_count):
        if u == g.root_id:
            states.append(ROOT_STATE)
        elif f"n{u}" in overrides:
            status, par, d = overrides[f"n{u}"]
            states.append(ProcessState(status, par, d))
        else:
            states.append(ProcessState(Status.I, u, 0))
    return tuple(states)
