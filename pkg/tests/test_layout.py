import math

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adamotif import DomainError, Graph, LayoutParams, force_layout, representative_layouts, synthesize_supergraph
from adamotif import barneshut
from adamotif.alignment import AlignmentMatching
from adamotif.layout import (
    ABSENT,
    NodeEncoding,
    LARGE,
    MEDIUM,
    PLAIN,
    RINGED,
    SMALL,
    difference_layout,
    force_layout_array,
    layout_energy,
    ring_level,
)

from conftest import from_nx


def test_single_node_at_center():
    pos = force_layout(Graph(["x"]))
    assert pos["x"] == (800.0, 600.0)


def test_two_nodes_reach_link_length():
    pos = force_layout(Graph(["a", "b"], [("a", "b")]))
    d = math.dist(pos["a"], pos["b"])
    assert abs(d - 30.0) <= 0.2 * 30.0
    mid = np.mean([pos["a"], pos["b"]], axis=0)
    assert np.allclose(mid, (800, 600), atol=1e-6)


def test_deterministic_and_centred(lesmis):
    a = force_layout(lesmis)
    b = force_layout(lesmis)
    assert a == b
    assert np.allclose(np.mean(list(a.values()), axis=0), (800, 600), atol=1e-6)
    assert all(np.isfinite(v).all() for v in a.values())


def test_seed_changes_layout(lesmis):
    assert force_layout(lesmis, LayoutParams(seed=1)) != force_layout(lesmis, LayoutParams(seed=2))


def test_params_validation():
    with pytest.raises(DomainError):
        LayoutParams(iterations=0)
    with pytest.raises(DomainError):
        LayoutParams(ideal_link_length=-1)
    with pytest.raises(DomainError):
        force_layout(Graph())


@pytest.mark.parametrize("builder", [
    lambda: nx.karate_club_graph(),
    lambda: nx.les_miserables_graph(),
    lambda: nx.barabasi_albert_graph(120, 2, seed=3),
])
def test_energy_decreases_in_most_iterations(builder):
    g = from_nx(builder())
    params = LayoutParams()
    energies = []
    force_layout_array(g, params, callback=lambda it, pos: energies.append(layout_energy(g, pos, params)))
    drops = np.diff(energies) <= 1e-9 * np.abs(energies[:-1])
    assert drops.mean() >= 0.95


def test_barnes_hut_used_on_large_graphs_is_accurate():
    rng = np.random.default_rng(0)
    pts = rng.random((800, 2)) * 1000
    exact = barneshut.exact_repulsion(pts)
    assert np.allclose(barneshut.repulsion(pts, theta=0.0), exact)
    approx = barneshut.repulsion(pts, theta=0.9)
    rel = np.linalg.norm(approx - exact, axis=1) / np.linalg.norm(exact, axis=1)
    assert np.median(rel) < 0.02


def test_barnes_hut_coincident_points():
    pts = np.array([[0.0, 0.0], [0.0, 0.0], [1.0, 0.0]])
    assert np.all(np.isfinite(barneshut.repulsion(pts)))


def test_large_graph_layout_finite():
    g = from_nx(nx.barabasi_albert_graph(700, 2, seed=1))
    pos = force_layout_array(g, LayoutParams(iterations=40))
    assert np.all(np.isfinite(pos))


def test_representatives_share_coordinates():
    g = from_nx(nx.lollipop_graph(4, 3))
    h = Graph([f"h{v}" for v in g.nodes], [(f"h{a}", f"h{b}") for a, b in g.edges])
    sg = synthesize_supergraph([g, h])
    pa, pb = representative_layouts(sg)
    matched = dict(sg.matchings[1].pairs)
    for s, t in matched.items():
        assert pb[t] == pa[s]
    super_pos = set(force_layout(sg.graph).values())
    assert set(pa.values()) <= super_pos and set(pb.values()) <= super_pos


def test_singleton_representative_layout_is_plain():
    g = from_nx(nx.cycle_graph(5))
    (pos,) = representative_layouts(synthesize_supergraph([g]))
    assert pos == force_layout(g)


def test_ring_levels():
    assert [ring_level(k) for k in range(7)] == [None, SMALL, MEDIUM, MEDIUM, LARGE, LARGE, LARGE]


def hub_leaves_pair():
    """Representative: hub h with leaves p, q, r, s.  Individual: hub H with
    leaves P, Q, R, one of which (R) carries two extra unmatched leaves;
    s has no counterpart."""
    rep = Graph(list("hpqrs"), [("h", x) for x in "pqrs"])
    ind = Graph(["H", "P", "Q", "R", "u1", "u2"], [("H", "P"), ("H", "Q"), ("H", "R"), ("R", "u1"), ("R", "u2")])
    matching = AlignmentMatching(
        (("h", "H"), ("p", "P"), ("q", "Q"), ("r", "R")), frozenset(rep.nodes), frozenset(ind.nodes)
    )
    return rep, ind, matching


def test_hub_leaves_pair_one_absent_one_ringed():
    rep, ind, matching = hub_leaves_pair()
    pos = {v: (float(i), 0.0) for i, v in enumerate(rep.nodes)}
    lay = difference_layout(ind, rep, pos, matching)
    assert lay.count(ABSENT) == 1 and lay.node_encoding["s"].kind == ABSENT
    assert lay.count(RINGED) == 1
    assert lay.node_encoding["r"] == NodeEncoding(RINGED, 2)
    assert lay.node_encoding["r"].level == MEDIUM
    assert lay.dashed_edges == frozenset({("h", "s")})
    assert lay.positions == pos


def test_perfect_match_is_all_plain():
    g = from_nx(nx.petersen_graph())
    m = AlignmentMatching(tuple((v, v) for v in g.nodes), frozenset(g.nodes), frozenset(g.nodes))
    lay = difference_layout(g, g, force_layout(g), m)
    assert lay.count(PLAIN) == len(g) and not lay.dashed_edges


def test_missing_position_rejected():
    rep, ind, matching = hub_leaves_pair()
    with pytest.raises(DomainError):
        difference_layout(ind, rep, {"h": (0.0, 0.0)}, matching)


def test_three_hidden_neighbours_is_medium():
    rep = Graph(["a", "b"], [("a", "b")])
    ind = Graph(["A", "B", "x", "y", "z"], [("A", "B"), ("A", "x"), ("A", "y"), ("A", "z")])
    m = AlignmentMatching((("a", "A"), ("b", "B")), frozenset(rep.nodes), frozenset(ind.nodes))
    enc = difference_layout(ind, rep, {"a": (0.0, 0.0), "b": (1.0, 0.0)}, m).node_encoding["a"]
    assert (enc.kind, enc.hidden_count, enc.level) == (RINGED, 3, MEDIUM)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 100_000), st.integers(0, 100_000), st.floats(0.2, 1.0))
def test_difference_encoding_matches_set_arithmetic(sr, si, keep):
    rng = np.random.default_rng(sr + si)
    rep = from_nx(nx.gnp_random_graph(8, 0.35, seed=sr))
    raw = nx.gnp_random_graph(9, 0.35, seed=si)
    ind = Graph([f"i{v}" for v in raw.nodes], [(f"i{a}", f"i{b}") for a, b in raw.edges])
    k = max(1, int(keep * 8))
    left = rng.permutation(list(rep.nodes))[:k]
    right = rng.permutation(list(ind.nodes))[:k]
    m = AlignmentMatching(tuple(zip(left, right)), frozenset(rep.nodes), frozenset(ind.nodes))
    lay = difference_layout(ind, rep, {v: (0.0, 0.0) for v in rep.nodes}, m)

    matched_ind = set(right)
    absent = set(rep.nodes) - set(left)
    assert {v for v, e in lay.node_encoding.items() if e.kind == ABSENT} == absent
    for a, b in zip(left, right):
        hidden = len(ind.neighbors(b) - matched_ind)
        enc = lay.node_encoding[a]
        assert enc.hidden_count == hidden
        assert enc.kind == (RINGED if hidden else PLAIN)
        assert enc.level == ring_level(hidden)
    expected_dashed = {e for e in rep.edges if e[0] in absent or e[1] in absent}
    assert lay.dashed_edges == expected_dashed
    # every unmatched individual node next to a matched one shows up in some ring
    for u in set(ind.nodes) - matched_ind:
        if ind.neighbors(u) & matched_ind:
            partners = [a for a, b in zip(left, right) if b in ind.neighbors(u)]
            assert any(lay.node_encoding[a].kind == RINGED for a in partners)
