import pytest
from hypothesis import strategies as st

from dforest.graph import DirectedGraph
from dforest.testkit import F1, F2, F3, F4, F5, F7, fixtures


@st.composite
def digraphs(draw, min_n=0, max_n=8):
    n = draw(st.integers(min_n, max_n))
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return DirectedGraph.from_edges(n, edges)


@pytest.fixture(params=fixtures(), ids=lambda f: f.name)
def fixture_graph(request):
    return request.param.graph()


@pytest.fixture
def cycle3():
    return F1.graph()


@pytest.fixture
def two_cycles():
    return F2.graph()


@pytest.fixture
def k4():
    return F3.graph()


@pytest.fixture
def k4_pendant():
    return F4.graph()


@pytest.fixture
def path3():
    return F5.graph()


@pytest.fixture
def joined_cycles():
    return F7.graph()


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[num])
