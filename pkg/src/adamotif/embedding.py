"""Whole-graph embeddings from pooled characteristic functions of node features.

Each node carries structural features (log degree, local clustering
coefficient). For every random-walk scale ``r`` and evaluation point ``theta``
we take the expectation of ``exp(i * theta * x)`` over the endpoint of an
``r``-step walk from each node, then average over nodes. Real and imaginary
parts are concatenated, so every coordinate lies in ``[-1, 1]``.

All reductions sum sorted values, which makes the result bit-identical under
any relabeling of the nodes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .graph import Graph, Subgraph


@dataclass(frozen=True)
class EmbeddingParams:
    theta_count: int = 16
    theta_max: float = 5.0
    scales: tuple[int, ...] = (1, 2)

    def thetas(self) -> np.ndarray:
        # evenly spaced on (0, theta_max]
        return self.theta_max * np.arange(1, self.theta_count + 1) / self.theta_count

    @property
    def dim(self) -> int:
        return len(FEATURES) * len(self.scales) * self.theta_count * 2


FEATURES = ("log_degree", "clustering")


@dataclass(frozen=True)
class EmbeddingVector:
    values: np.ndarray = field(compare=False)

    @property
    def dim(self) -> int:
        return int(self.values.shape[0])

    def __eq__(self, other):
        return isinstance(other, EmbeddingVector) and np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash(self.values.tobytes())


def node_features(g: Graph) -> np.ndarray:
    """``(n, 2)`` array: log(1 + degree) and local clustering coefficient."""
    deg = g.degrees()
    clustering = np.zeros(len(g))
    for i, v in enumerate(g.nodes):
        d = int(deg[i])
        if d < 2:
            continue
        nbrs = g.neighbors(v)
        links = sum(1 for u in nbrs for w in g.neighbors(u) if w in nbrs)
        clustering[i] = links / (d * (d - 1))  # links counted twice
    return np.column_stack([np.log1p(deg), clustering])


def _walk_step(values: np.ndarray, g: Graph) -> np.ndarray:
    """One step of the row-normalised walk operator applied to ``values``.

    Neighbour values are sorted before summation; isolated nodes keep their
    own value (self-absorbing row).
    """
    out = values.copy()
    idx = {v: i for i, v in enumerate(g.nodes)}
    for i, v in enumerate(g.nodes):
        nbrs = g.neighbors(v)
        if not nbrs:
            continue
        gathered = np.sort(values[[idx[u] for u in nbrs]], axis=0)
        out[i] = gathered.sum(axis=0) / len(nbrs)
    return out


def embed_subgraph(s: Subgraph | Graph, params: EmbeddingParams | None = None) -> EmbeddingVector:
    params = params or EmbeddingParams()
    g = s.graph if isinstance(s, Subgraph) else s
    if len(g) == 0:
        raise DomainError("cannot embed an empty subgraph")
    x = node_features(g)
    thetas = params.thetas()
    # (n, features, thetas)
    phase = x[:, :, None] * thetas[None, None, :]
    n = len(g)
    real = np.cos(phase).reshape(n, -1)
    imag = np.sin(phase).reshape(n, -1)
    stacked = np.concatenate([real, imag], axis=1)
    blocks = []
    current, step = stacked, 0
    for r in sorted(params.scales):
        while step < r:
            current = _walk_step(current, g)
            step += 1
        pooled = np.sort(current, axis=0).sum(axis=0) / n
        half = pooled.shape[0] // 2
        blocks.append(pooled[:half])
        blocks.append(pooled[half:])
    vec = np.concatenate(blocks)
    return EmbeddingVector(np.clip(vec, -1.0, 1.0))


def embedding_distance(a: EmbeddingVector, b: EmbeddingVector) -> float:
    if a.dim != b.dim:
        raise DomainError(f"dimension mismatch: {a.dim} != {b.dim}")
    return float(np.linalg.norm(a.values - b.values))
