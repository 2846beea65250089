"""Affinity propagation and the two-level clustering of community subgraphs."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .embedding import EmbeddingVector
from .errors import DomainError

log = logging.getLogger(__name__)

SUBGRAPH = "subgraph"
REPRESENTATIVE = "representative"


@dataclass(frozen=True)
class ClusterAssignment:
    """``member_of[i]`` is the cluster of item ``i``; ``exemplar_of[c]`` the
    item chosen as exemplar of cluster ``c``. Items are positions in the
    list that was clustered (see ``items`` for the mapping back to subgraph
    indices when clustering a subset)."""

    member_of: tuple[int, ...]
    exemplar_of: tuple[int, ...]
    level: str = SUBGRAPH
    converged: bool = True
    iterations: int = 0
    items: tuple[int, ...] | None = None

    @property
    def n_clusters(self) -> int:
        return len(self.exemplar_of)

    def members(self, c: int) -> list[int]:
        return [i for i, k in enumerate(self.member_of) if k == c]

    def item(self, i: int) -> int:
        return self.items[i] if self.items is not None else i


@dataclass(frozen=True)
class APParams:
    damping: float = 0.9
    max_iter: int = 1000
    convergence_iter: int = 50
    preference: float | str = "median"


def _assign(S: np.ndarray, exemplars: np.ndarray) -> np.ndarray:
    choice = exemplars[np.argmax(S[:, exemplars], axis=1)]
    choice[exemplars] = exemplars
    return choice


def _net_similarity(S: np.ndarray, exemplars: np.ndarray) -> float:
    return float(np.max(S[:, exemplars], axis=1).sum() - np.max(S[exemplars][:, exemplars], axis=1).sum()
                 + S[exemplars, exemplars].sum())


def _polish(S: np.ndarray, exemplars: np.ndarray, max_rounds: int = 100) -> np.ndarray:
    """Refine exemplars at a fixed cluster count by k-medoids swaps: replace
    an exemplar by a non-exemplar whenever that raises the net similarity
    (``S`` carries preferences on its diagonal). Net similarity never
    decreases, so AP's answer is kept unless a strictly better one is found."""
    n = S.shape[0]
    exemplars = np.sort(exemplars)
    current = _net_similarity(S, exemplars)
    for _ in range(max_rounds):
        best_gain, best_set = 1e-12 * max(1.0, abs(current)), None
        for pos in range(len(exemplars)):
            for cand in range(n):
                if cand in exemplars:
                    continue
                trial = exemplars.copy()
                trial[pos] = cand
                trial.sort()
                gain = _net_similarity(S, trial) - current
                if gain > best_gain:
                    best_gain, best_set = gain, trial
        if best_set is None:
            break
        exemplars, current = best_set, current + best_gain
    return exemplars


def _finalize(S: np.ndarray, exemplars: np.ndarray) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Assign items to their most similar exemplar and number clusters in
    order of their smallest member."""
    n = S.shape[0]
    exemplars = np.sort(exemplars)
    choice = _assign(S, exemplars)
    order: dict[int, int] = {}
    for i in range(n):
        order.setdefault(int(choice[i]), len(order))
    member_of = tuple(order[int(choice[i])] for i in range(n))
    exemplar_of = tuple(sorted(order, key=order.__getitem__))
    return member_of, exemplar_of


def affinity_propagation(
    similarity,
    preference: float | str = "median",
    damping: float = 0.9,
    max_iter: int = 1000,
    convergence_iter: int = 50,
    seed: int = 0,
    level: str = SUBGRAPH,
) -> ClusterAssignment:
    """Frey-Dueck affinity propagation on a dense similarity matrix.

    Non-convergence is reported through ``converged=False`` rather than an
    exception; the assignment from the last iteration is returned.
    """
    S = np.array(similarity, dtype=np.float64)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise DomainError(f"similarity matrix must be square, got shape {S.shape}")
    if not np.all(np.isfinite(S)):
        raise DomainError("similarity matrix has non-finite entries")
    if not 0.5 <= damping < 1.0:
        raise DomainError(f"damping must lie in [0.5, 1), got {damping}")
    n = S.shape[0]
    if n == 0:
        raise DomainError("nothing to cluster")
    if n == 1:
        return ClusterAssignment((0,), (0,), level)

    off = S[~np.eye(n, dtype=bool)]
    if preference == "median":
        pref = float(np.median(off))
    else:
        pref = float(preference)

    if np.ptp(off) <= 1e-12 * max(1.0, abs(off[0])):
        # indistinguishable items: one cluster unless self-preference wins
        if pref < off[0] or np.isclose(pref, off[0]):
            return ClusterAssignment((0,) * n, (0,), level)
        return ClusterAssignment(tuple(range(n)), tuple(range(n)), level)

    S = S.copy()
    np.fill_diagonal(S, pref)
    rng = np.random.default_rng(seed)
    scale = max(float(np.max(np.abs(S))), np.finfo(float).tiny)
    S = S + 1e-9 * scale * rng.standard_normal((n, n))

    R = np.zeros((n, n))
    A = np.zeros((n, n))
    rows = np.arange(n)
    history = np.zeros((n, convergence_iter), dtype=bool)
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        AS = A + S
        first = np.argmax(AS, axis=1)
        best = AS[rows, first]
        AS[rows, first] = -np.inf
        second = np.max(AS, axis=1)
        R_new = S - best[:, None]
        R_new[rows, first] = S[rows, first] - second
        R = damping * R + (1 - damping) * R_new

        Rp = np.maximum(R, 0)
        Rp[rows, rows] = R[rows, rows]
        col = Rp.sum(axis=0)
        A_new = col[None, :] - Rp
        diag = A_new[rows, rows].copy()
        A_new = np.minimum(A_new, 0)
        A_new[rows, rows] = diag
        A = damping * A + (1 - damping) * A_new

        is_ex = (np.diag(A) + np.diag(R)) > 0
        history[:, (it - 1) % convergence_iter] = is_ex
        if it >= convergence_iter:
            stable = history.all(axis=1) | ~history.any(axis=1)
            if stable.all() and is_ex.any():
                converged = True
                break

    exemplars = np.flatnonzero(np.diag(A) + np.diag(R) > 0)
    if exemplars.size == 0:
        exemplars = np.array([int(np.argmax(np.diag(A) + np.diag(R)))])
    if not converged:
        log.warning("affinity propagation did not converge in %d iterations", max_iter)
    exemplars = _polish(S, exemplars)
    member_of, exemplar_of = _finalize(S, exemplars)
    return ClusterAssignment(member_of, exemplar_of, level, converged, it)


def similarity_matrix(embeddings) -> np.ndarray:
    """Negative squared Euclidean distances between embedding vectors."""
    X = np.stack([e.values if isinstance(e, EmbeddingVector) else np.asarray(e) for e in embeddings])
    sq = np.sum(X * X, axis=1)
    D = sq[:, None] + sq[None, :] - 2.0 * X @ X.T
    D = np.maximum(D, 0.0)
    np.fill_diagonal(D, 0.0)
    return -D


def cluster_subgraphs(embeddings, seed: int = 0, params: APParams | None = None) -> ClusterAssignment:
    params = params or APParams()
    if len(embeddings) == 0:
        raise DomainError("need at least one embedding")
    return affinity_propagation(
        similarity_matrix(embeddings),
        preference=params.preference,
        damping=params.damping,
        max_iter=params.max_iter,
        convergence_iter=params.convergence_iter,
        seed=seed,
        level=SUBGRAPH,
    )


def cluster_representatives(
    representatives, embeddings, seed: int = 0, params: APParams | None = None
) -> ClusterAssignment:
    """Cluster the exemplar subgraphs; ``representatives`` are indices into
    ``embeddings`` and are recorded in ``items`` of the result."""
    params = params or APParams()
    reps = [int(r) for r in representatives]
    if not reps:
        raise DomainError("need at least one representative")
    res = affinity_propagation(
        similarity_matrix([embeddings[r] for r in reps]),
        preference=params.preference,
        damping=params.damping,
        max_iter=params.max_iter,
        convergence_iter=params.convergence_iter,
        seed=seed,
        level=REPRESENTATIVE,
    )
    return ClusterAssignment(
        res.member_of, res.exemplar_of, REPRESENTATIVE, res.converged, res.iterations, tuple(reps)
    )
