import networkx as nx
import pytest

from adamotif import Graph
from adamotif.datasets import les_miserables


def from_nx(g: nx.Graph) -> Graph:
    return Graph([str(v) for v in g.nodes], [(str(a), str(b)) for a, b in g.edges])


def to_nx(g: Graph) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from(g.nodes)
    h.add_edges_from(g.edges)
    return h


@pytest.fixture(scope="session")
def lesmis() -> Graph:
    return les_miserables()


@pytest.fixture
def triangle() -> Graph:
    return Graph(["a", "b", "c"], [("a", "b"), ("b", "c"), ("a", "c")])


@pytest.fixture
def two_triangles() -> Graph:
    return Graph(
        list("abcdef"),
        [("a", "b"), ("b", "c"), ("a", "c"), ("d", "e"), ("e", "f"), ("d", "f")],
    )


@pytest.fixture(scope="session")
def lesmis_run(lesmis):
    from adamotif import PipelineConfig, run_pipeline

    return run_pipeline(PipelineConfig(), graph=lesmis, name="lesmis")


ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record(criterion: int, passed: bool, detail: str) -> None:
    ACCEPTANCE[criterion] = (bool(passed), detail)
    print(f"criterion {criterion}: {'PASS' if passed else 'FAIL'} ({detail})")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
