"""Low-rank spectral node similarity between two graphs and greedy matching.

Each node gets a spectral walk signature computed from the top-``k``
eigenpairs (by magnitude) of its graph's adjacency matrix::

    w_t = U_k diag(lambda_k)^t U_k^T 1,    t = 1..k
    sig_t(v) = log(1 + max(w_t[v], 0)) / t

``w_t`` is the low-rank approximation of the number of length-``t`` walks
leaving each node. It is invariant to eigenvector signs and to bases of
repeated eigenvalues (the truncation never splits a degenerate group), so
the similarity

    sim(a, b) = exp(-|sig(a) - sig(b)|^2 / (2 * bandwidth^2))

is invariant to node relabeling, symmetric between the two graphs, equals 1
on the diagonal of a self-alignment, and is strictly below 1 for nodes with
distinct signatures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from .errors import ConvergenceError, DomainError
from .graph import Graph, Subgraph

DENSE_LIMIT = 400
EIG_TOL = 1e-10
EIG_MAXITER = 10_000


@dataclass(frozen=True)
class AlignParams:
    rank: int = 8
    quantile_threshold: float = 0.5
    bandwidth: float = 0.5


@dataclass(frozen=True)
class SimilarityMatrix:
    values: np.ndarray = field(compare=False)
    rows: tuple[str, ...]
    cols: tuple[str, ...]

    @property
    def shape(self):
        return self.values.shape

    def __getitem__(self, key):
        a, b = key
        return float(self.values[self.rows.index(a), self.cols.index(b)])

    def transpose(self) -> "SimilarityMatrix":
        return SimilarityMatrix(self.values.T.copy(), self.cols, self.rows)


@dataclass(frozen=True)
class AlignmentMatching:
    pairs: tuple[tuple[str, str], ...]
    nodes_a: frozenset[str] = field(repr=False)
    nodes_b: frozenset[str] = field(repr=False)

    @property
    def forward(self) -> dict[str, str]:
        return dict(self.pairs)

    @property
    def backward(self) -> dict[str, str]:
        return {b: a for a, b in self.pairs}

    @property
    def unmatched_a(self) -> frozenset[str]:
        return self.nodes_a - {a for a, _ in self.pairs}

    @property
    def unmatched_b(self) -> frozenset[str]:
        return self.nodes_b - {b for _, b in self.pairs}

    def __len__(self):
        return len(self.pairs)


def _as_graph(g) -> Graph:
    return g.graph if isinstance(g, Subgraph) else g


def top_eigenpairs(g: Graph, rank: int) -> tuple[np.ndarray, np.ndarray]:
    """Eigenpairs of the adjacency matrix with the largest ``|lambda|``.

    ``k = min(rank, n - 1)`` (at least 1), widened so that no group of
    equal-magnitude eigenvalues is cut. Each eigenvector is signed so that
    its largest-magnitude entry is positive.
    """
    n = len(g)
    k = max(1, min(rank, n - 1))
    A = g.adjacency()
    if n <= DENSE_LIMIT:
        vals, vecs = np.linalg.eigh(A.toarray())
    else:
        want = min(n - 2, k + 4)
        v0 = np.ones(n) / math.sqrt(n)
        try:
            vals, vecs = eigsh(
                sparse.csr_matrix(A), k=want, which="LM", v0=v0, tol=EIG_TOL, maxiter=EIG_MAXITER
            )
        except ArpackNoConvergence as exc:
            raise ConvergenceError("eigen-solver did not converge", EIG_MAXITER) from exc
    order = np.lexsort((-vals, -np.abs(vals)))
    vals, vecs = vals[order], vecs[:, order]
    mags = np.abs(vals)
    tol = 1e-9 * max(1.0, mags[0])
    while k < len(vals) and abs(mags[k] - mags[k - 1]) <= tol:
        k += 1
    vals, vecs = vals[:k], vecs[:, :k].copy()
    pivots = np.argmax(np.abs(vecs), axis=0)
    signs = np.sign(vecs[pivots, np.arange(k)])
    signs[signs == 0] = 1.0
    return vals, vecs * signs


def walk_signatures(g: Graph, rank: int, length: int | None = None) -> np.ndarray:
    """``(n, length)`` low-rank walk signatures; ``length`` defaults to ``rank``."""
    vals, vecs = top_eigenpairs(g, rank)
    length = length or rank
    proj = vecs.T @ np.ones(len(g))
    sig = np.empty((len(g), length))
    for t in range(1, length + 1):
        walks = vecs @ (vals**t * proj)
        sig[:, t - 1] = np.log1p(np.maximum(walks, 0.0)) / t
    return sig


def align(a, b, rank: int = 8, bandwidth: float = 0.5) -> SimilarityMatrix:
    """Dense ``|V_a| x |V_b|`` node similarity in ``(0, 1]``."""
    ga, gb = _as_graph(a), _as_graph(b)
    if len(ga) == 0 or len(gb) == 0:
        raise DomainError("cannot align an empty graph")
    if rank < 1:
        raise DomainError("rank must be positive")
    sa = walk_signatures(ga, rank)
    sb = walk_signatures(gb, rank)
    d2 = (
        np.sum(sa * sa, axis=1)[:, None]
        + np.sum(sb * sb, axis=1)[None, :]
        - 2.0 * sa @ sb.T
    )
    d2 = np.maximum(d2, 0.0)
    # exact zeros for identical signatures
    d2[np.isclose(d2, 0.0, atol=1e-12)] = 0.0
    return SimilarityMatrix(np.exp(-d2 / (2.0 * bandwidth**2)), ga.nodes, gb.nodes)


def _ranks(ids) -> np.ndarray:
    order = sorted(range(len(ids)), key=ids.__getitem__)
    r = np.empty(len(ids), dtype=np.int64)
    r[order] = np.arange(len(ids))
    return r


def match_nodes(sim: SimilarityMatrix, a, b, quantile_threshold: float = 0.5) -> AlignmentMatching:
    """Greedy one-to-one matching favouring high similarity and high degree.

    Pairs are scored by ``sim * sqrt((1 + deg_a) * (1 + deg_b))`` and taken in
    descending score order (ties by node ids). Only the top
    ``ceil((1 - q) * N)`` entries by similarity (at least one) are eligible,
    i.e. those at or above the ``q``-quantile of all ``N`` similarities.
    """
    ga, gb = _as_graph(a), _as_graph(b)
    S = sim.values
    if S.shape != (len(ga), len(gb)) or sim.rows != ga.nodes or sim.cols != gb.nodes:
        raise DomainError(f"similarity shape {S.shape} does not match graphs ({len(ga)}, {len(gb)})")
    if not 0.0 <= quantile_threshold <= 1.0:
        raise DomainError("quantile_threshold must lie in [0, 1]")
    na, nb = S.shape
    total = na * nb
    ra = _ranks(ga.nodes)
    rb = _ranks(gb.nodes)
    ia = np.repeat(np.arange(na), nb)
    ib = np.tile(np.arange(nb), na)
    flat = S.ravel()

    keep = max(1, math.ceil((1.0 - quantile_threshold) * total - 1e-9))
    if keep < total:
        by_sim = np.lexsort((rb[ib], ra[ia], -flat))
        eligible = by_sim[:keep]
    else:
        eligible = np.arange(total)

    da = ga.degrees().astype(np.float64)
    db = gb.degrees().astype(np.float64)
    ea, eb = ia[eligible], ib[eligible]
    score = flat[eligible] * np.sqrt((1.0 + da[ea]) * (1.0 + db[eb]))
    order = np.lexsort((rb[eb], ra[ea], -score))

    used_a = np.zeros(na, dtype=bool)
    used_b = np.zeros(nb, dtype=bool)
    pairs = []
    limit = min(na, nb)
    for k in order:
        i, j = int(ea[k]), int(eb[k])
        if used_a[i] or used_b[j]:
            continue
        used_a[i] = used_b[j] = True
        pairs.append((ga.nodes[i], gb.nodes[j]))
        if len(pairs) == limit:
            break
    return AlignmentMatching(tuple(pairs), frozenset(ga.nodes), frozenset(gb.nodes))


def threshold_value(sim: SimilarityMatrix, quantile_threshold: float) -> float:
    """Smallest similarity that is still eligible under ``match_nodes``."""
    flat = np.sort(sim.values.ravel())[::-1]
    keep = max(1, math.ceil((1.0 - quantile_threshold) * flat.size - 1e-9))
    return float(flat[min(keep, flat.size) - 1])
