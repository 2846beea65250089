import io
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adamotif import DomainError, Graph, GraphParseError, induced_subgraph, load_edge_list
from adamotif.graph import degree, dump_edge_list, guess_format


def test_lesmis_counts(lesmis):
    assert len(lesmis) == 77
    assert lesmis.number_of_edges() == 254


def test_empty_input_is_empty_graph():
    for fmt in ("whitespace", "csv", "json"):
        g = load_edge_list(b"", fmt)
        assert len(g) == 0 and g.number_of_edges() == 0


def test_undirected_duplicates_collapse():
    g = load_edge_list(b"a b\nb a\n")
    assert g.nodes == ("a", "b")
    assert g.number_of_edges() == 1


def test_self_loops_dropped_with_count():
    g = load_edge_list(b"a a\na b\nc c\n")
    assert g.self_loops_dropped == 2
    assert g.edges == (("a", "b"),)
    assert g.nodes == ("a", "b", "c")


def test_comments_and_blank_lines_ignored():
    g = load_edge_list(b"# header\n\na b\n  # indented comment\nb c\n")
    assert g.number_of_edges() == 2


def test_wrong_arity_reports_line():
    with pytest.raises(GraphParseError) as err:
        load_edge_list(b"a b\nb c d\n")
    assert err.value.line == 2
    assert "line 2" in str(err.value)


def test_csv_header_optional():
    with_header = load_edge_list(b"source,target\na,b\nb,c\n", "csv")
    without = load_edge_list(b"a,b\nb,c\n", "csv")
    assert with_header.edges == without.edges == (("a", "b"), ("b", "c"))


def test_csv_bad_row():
    with pytest.raises(GraphParseError) as err:
        load_edge_list(b"a,b\nc\n", "csv")
    assert err.value.line == 2


def test_json_node_link_with_isolated_node_and_labels():
    doc = {
        "nodes": [{"id": "x", "label": "Ex"}, {"id": "y"}, {"id": "lonely"}],
        "links": [{"source": "x", "target": "y"}],
    }
    g = load_edge_list(json.dumps(doc).encode(), "json")
    assert set(g.nodes) == {"x", "y", "lonely"}
    assert g.labels == {"x": "Ex"}
    assert degree(g, "lonely") == 0


def test_json_errors():
    with pytest.raises(GraphParseError):
        load_edge_list(b"[1, 2]", "json")
    with pytest.raises(GraphParseError):
        load_edge_list(b'{"links": [{"source": "a"}]}', "json")
    with pytest.raises(GraphParseError):
        load_edge_list(b"{oops", "json")


def test_invalid_utf8():
    with pytest.raises(GraphParseError):
        load_edge_list(b"\xff\xfe a b")


def test_unknown_format():
    with pytest.raises(DomainError):
        load_edge_list(b"a b", "graphml")


def test_stream_and_path_sources(tmp_path):
    p = tmp_path / "g.txt"
    p.write_bytes(b"a b\n")
    assert load_edge_list(str(p)).edges == (("a", "b"),)
    assert load_edge_list(io.BytesIO(b"a b\n")).edges == (("a", "b"),)
    assert load_edge_list(io.StringIO("a b\n")).edges == (("a", "b"),)


def test_guess_format():
    assert guess_format("x.JSON") == "json"
    assert guess_format("x.csv") == "csv"
    assert guess_format("x.edges") == "whitespace"


def test_graph_rejects_invalid_edges():
    with pytest.raises(DomainError):
        Graph(["a"], [("a", "a")])
    with pytest.raises(DomainError):
        Graph(["a"], [("a", "b")])


def test_induced_subgraph(triangle):
    s = induced_subgraph(triangle, {"a", "b"})
    assert s.graph.number_of_edges() == 1
    assert induced_subgraph(triangle, triangle.nodes).graph.number_of_edges() == 3
    assert len(induced_subgraph(triangle, set()).graph) == 0
    with pytest.raises(DomainError, match="zz"):
        induced_subgraph(triangle, {"a", "zz"})


def test_degree():
    star = Graph([str(i) for i in range(6)], [("0", str(i)) for i in range(1, 6)])
    assert degree(star, "0") == 5
    k4 = Graph(list("abcd"), [(a, b) for a in "abcd" for b in "abcd" if a < b])
    assert all(degree(k4, v) == 3 for v in k4.nodes)
    with pytest.raises(DomainError):
        degree(k4, "q")


def test_connected_components(two_triangles):
    comps = two_triangles.connected_components()
    assert sorted(map(sorted, comps)) == [["a", "b", "c"], ["d", "e", "f"]]
    assert not two_triangles.is_connected()


edge_lists = st.lists(
    st.tuples(st.integers(0, 15).map(str), st.integers(0, 15).map(str)), max_size=40
)


@settings(max_examples=60, deadline=None)
@given(edge_lists, st.sampled_from(["whitespace", "csv", "json"]))
def test_round_trip_and_handshake(pairs, fmt):
    text = "".join(f"{a} {b}\n" for a, b in pairs).encode()
    g = load_edge_list(text)
    assert int(g.degrees().sum()) == 2 * g.number_of_edges()
    again = load_edge_list(dump_edge_list(g, fmt), fmt)
    assert again.edge_set() == g.edge_set()
    # isolated nodes survive only in the node-link format
    if fmt == "json":
        assert again.nodes == g.nodes


@settings(max_examples=60, deadline=None)
@given(edge_lists, st.sets(st.integers(0, 15).map(str)), st.sets(st.integers(0, 15).map(str)))
def test_induction_is_monotone(pairs, m1, m2):
    g = load_edge_list("".join(f"{a} {b}\n" for a, b in pairs).encode())
    small = {v for v in m1 if v in g.nodes}
    big = small | {v for v in m2 if v in g.nodes}
    e1 = induced_subgraph(g, small).graph.edge_set()
    e2 = induced_subgraph(g, big).graph.edge_set()
    assert e1 <= e2
