import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adamotif import DomainError, affinity_propagation, cluster_representatives, cluster_subgraphs
from adamotif.clustering import REPRESENTATIVE, similarity_matrix


def blobs(seed, k=3, per=20, spread=0.1, gap=10.0, dim=8):
    rng = np.random.default_rng(seed)
    centers = rng.standard_normal((k, dim))
    centers *= gap / np.min([np.linalg.norm(a - b) for a, b in itertools.combinations(centers, 2)])
    pts = np.concatenate([c + spread * rng.standard_normal((per, dim)) for c in centers])
    return pts, np.repeat(np.arange(k), per)


def test_identical_items_one_cluster():
    res = affinity_propagation(np.full((5, 5), -2.0))
    assert res.n_clusters == 1 and set(res.member_of) == {0}


def test_single_item():
    res = affinity_propagation(np.zeros((1, 1)))
    assert res.member_of == (0,) and res.exemplar_of == (0,)


def test_three_blobs():
    pts, labels = blobs(0)
    res = affinity_propagation(similarity_matrix(pts), seed=0)
    assert res.n_clusters == 3 and res.converged
    for c, ex in enumerate(res.exemplar_of):
        members = res.members(c)
        assert ex in members
        assert len(set(labels[members])) == 1 and labels[ex] == labels[members[0]]


def test_input_validation():
    with pytest.raises(DomainError):
        affinity_propagation(np.zeros((2, 3)))
    with pytest.raises(DomainError):
        affinity_propagation(np.array([[0.0, np.nan], [0.0, 0.0]]))
    with pytest.raises(DomainError):
        affinity_propagation(np.zeros((2, 2)), damping=0.4)
    with pytest.raises(DomainError):
        affinity_propagation(np.zeros((2, 2)), damping=1.0)


def test_non_convergence_is_flagged_not_raised():
    pts, _ = blobs(1, spread=2.0)
    res = affinity_propagation(similarity_matrix(pts), max_iter=3, convergence_iter=2)
    assert res.converged is False
    assert len(res.member_of) == len(pts)


def test_deterministic_under_seed():
    pts, _ = blobs(2, spread=3.0)
    S = similarity_matrix(pts)
    assert affinity_propagation(S, seed=5) == affinity_propagation(S, seed=5)


def test_similarity_is_negative_squared_distance():
    pts = np.array([[0.0, 0.0], [3.0, 4.0]])
    assert np.allclose(similarity_matrix(pts), [[0, -25], [-25, 0]])


def test_cluster_levels():
    pts, _ = blobs(3)
    first = cluster_subgraphs(list(pts), seed=1)
    reps = list(first.exemplar_of)
    second = cluster_representatives(reps, list(pts), seed=1)
    assert second.level == REPRESENTATIVE
    assert second.items == tuple(reps)
    assert sorted(second.item(i) for i in range(len(reps))) == sorted(reps)
    one = cluster_representatives([4], list(pts))
    assert one.n_clusters == 1 and one.item(0) == 4
    with pytest.raises(DomainError):
        cluster_representatives([], list(pts))


def test_raising_preference_never_reduces_clusters():
    pts, _ = blobs(4, spread=1.5)
    S = similarity_matrix(pts)
    base = affinity_propagation(S, seed=0)
    high = affinity_propagation(S, preference=float(np.median(S)) + 1e3, seed=0)
    assert high.n_clusters >= base.n_clusters


def _net(S, pref, exemplars):
    ex = np.array(exemplars)
    choice = ex[np.argmax(S[:, ex], axis=1)]
    choice[ex] = ex
    return sum(pref if i == c else S[i, c] for i, c in enumerate(choice))


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 8), st.integers(0, 100_000))
def test_exemplars_near_brute_force_optimum(n, seed):
    pts = np.random.default_rng(seed).standard_normal((n, 2)) * 3
    S = similarity_matrix(pts)
    pref = float(np.median(S[~np.eye(n, dtype=bool)]))
    res = affinity_propagation(S, seed=0)
    k = res.n_clusters
    best = max(_net(S, pref, c) for c in itertools.combinations(range(n), k))
    got = _net(S, pref, res.exemplar_of)
    assert got >= best - 0.05 * abs(best) - 1e-9


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 15), st.integers(0, 100_000))
def test_assignment_invariants(n, seed):
    pts = np.random.default_rng(seed).standard_normal((n, 3))
    res = affinity_propagation(similarity_matrix(pts), seed=seed)
    assert len(res.member_of) == n
    assert sorted(set(res.member_of)) == list(range(res.n_clusters))
    for c, ex in enumerate(res.exemplar_of):
        assert res.member_of[ex] == c
