"""Force-directed layout plus the similarity- and difference-aware procedures
that place representative and individual subgraphs."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import barneshut
from .alignment import AlignmentMatching
from .errors import DomainError
from .graph import Graph, Subgraph
from .supergraph import SuperGraph

Positions = dict[str, tuple[float, float]]

BARNES_HUT_ABOVE = 500

PLAIN = "plain"
ABSENT = "absent"
RINGED = "ringed"
SMALL, MEDIUM, LARGE = "small", "medium", "large"


@dataclass(frozen=True)
class LayoutParams:
    ideal_link_length: float = 30.0
    repulsion_strength: float = 1.0
    centering_strength: float = 0.01
    iterations: int = 300
    initial_temperature: float | None = None  # None: 0.1 x canvas diagonal
    decay: float = 1.0
    canvas: tuple[float, float] = (1600.0, 1200.0)
    theta: float = 0.9
    step: float = 0.1
    seed: int = 42

    def __post_init__(self):
        if self.iterations < 1:
            raise DomainError("iterations must be >= 1")
        if self.ideal_link_length <= 0:
            raise DomainError("ideal_link_length must be positive")

    @property
    def center(self) -> np.ndarray:
        return np.array(self.canvas, dtype=np.float64) / 2.0

    def start_temperature(self) -> float:
        if self.initial_temperature is not None:
            return float(self.initial_temperature)
        return 0.1 * math.hypot(*self.canvas)


def _edge_index(g: Graph) -> tuple[np.ndarray, np.ndarray]:
    if not g.edges:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty
    idx = {v: i for i, v in enumerate(g.nodes)}
    src = np.array([idx[a] for a, _ in g.edges])
    dst = np.array([idx[b] for _, b in g.edges])
    return src, dst


def initial_positions(n: int, params: LayoutParams) -> np.ndarray:
    rng = np.random.default_rng(params.seed)
    radius = params.ideal_link_length * math.sqrt(max(n, 1))
    r = radius * np.sqrt(rng.random(n))
    a = 2 * math.pi * rng.random(n)
    return params.center + np.column_stack([r * np.cos(a), r * np.sin(a)])


def layout_energy(g: Graph, pos: np.ndarray, params: LayoutParams) -> float:
    """Potential whose negative gradient is the force field of ``force_layout``."""
    k = params.ideal_link_length
    src, dst = _edge_index(g)
    e = 0.0
    if len(src):
        d = np.linalg.norm(pos[src] - pos[dst], axis=1)
        e += float(np.sum(d**3) / (3 * k))
    diff = pos[:, None, :] - pos[None, :, :]
    d = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    iu = np.triu_indices(len(pos), 1)
    e -= params.repulsion_strength * k * k * float(np.sum(np.log(np.maximum(d[iu], 1e-9))))
    e += 0.5 * params.centering_strength * float(np.sum((pos - params.center) ** 2))
    return e


def _forces(pos, src, dst, params: LayoutParams) -> np.ndarray:
    k = params.ideal_link_length
    n = len(pos)
    if n > BARNES_HUT_ABOVE:
        rep = barneshut.repulsion(pos, params.theta)
    else:
        rep = barneshut.exact_repulsion(pos)
    f = params.repulsion_strength * k * k * rep
    if len(src):
        delta = pos[dst] - pos[src]
        dist = np.linalg.norm(delta, axis=1)
        pull = delta * (dist / k)[:, None]  # magnitude d^2 / k
        np.add.at(f, src, pull)
        np.add.at(f, dst, -pull)
    f += params.centering_strength * (params.center - pos)
    return f


def force_layout_array(
    g: Graph,
    params: LayoutParams | None = None,
    init: np.ndarray | None = None,
    callback: Callable[[int, np.ndarray], None] | None = None,
) -> np.ndarray:
    params = params or LayoutParams()
    n = len(g)
    if n == 0:
        raise DomainError("cannot lay out an empty graph")
    pos = initial_positions(n, params) if init is None else np.array(init, dtype=np.float64)
    if n > 1:
        src, dst = _edge_index(g)
        # Jacobi-style preconditioning: spring stiffness grows with degree
        gain = params.step / (1.0 + np.bincount(np.r_[src, dst], minlength=n))
        t0 = params.start_temperature()
        for it in range(params.iterations):
            temp = t0 * max(0.0, 1.0 - params.decay * it / params.iterations)
            f = _forces(pos, src, dst, params) * gain[:, None]
            mag = np.linalg.norm(f, axis=1)
            scale = np.minimum(1.0, temp / np.maximum(mag, 1e-12))
            pos = pos + f * scale[:, None]
            if callback is not None:
                callback(it, pos)
    # the centering force's fixed point, enforced exactly
    pos = pos - pos.mean(axis=0) + params.center
    return pos


def force_layout(g, params: LayoutParams | None = None) -> Positions:
    g = g.graph if isinstance(g, Subgraph) else g
    pos = force_layout_array(g, params)
    return {v: (float(x), float(y)) for v, (x, y) in zip(g.nodes, pos)}


def representative_layouts(sg: SuperGraph, params: LayoutParams | None = None) -> list[Positions]:
    """One force layout of the super-graph, copied to each member through its
    provenance map, so aligned nodes share coordinates across members."""
    super_pos = force_layout(sg.graph, params)
    return [{v: super_pos[s] for v, s in prov.items()} for prov in sg.provenance]


def ring_level(hidden_count: int) -> str | None:
    if hidden_count <= 0:
        return None
    if hidden_count == 1:
        return SMALL
    if hidden_count <= 3:
        return MEDIUM
    return LARGE


@dataclass(frozen=True)
class NodeEncoding:
    kind: str = PLAIN
    hidden_count: int = 0

    @property
    def level(self) -> str | None:
        return ring_level(self.hidden_count) if self.kind == RINGED else None


@dataclass(frozen=True)
class DecoratedLayout:
    positions: Positions
    node_encoding: dict[str, NodeEncoding]
    dashed_edges: frozenset[tuple[str, str]] = field(default_factory=frozenset)
    edges: tuple[tuple[str, str], ...] = ()

    @classmethod
    def plain(cls, positions: Positions, g: Graph) -> "DecoratedLayout":
        return cls(dict(positions), {v: NodeEncoding() for v in positions}, frozenset(), tuple(g.edges))

    def count(self, kind: str) -> int:
        return sum(1 for e in self.node_encoding.values() if e.kind == kind)


def difference_layout(
    individual, representative, rep_positions: Positions, matching: AlignmentMatching
) -> DecoratedLayout:
    """Decorate the representative's layout with the differences of one
    individual subgraph. ``matching`` pairs representative nodes (side A)
    with individual nodes (side B)."""
    ind = individual.graph if isinstance(individual, Subgraph) else individual
    rep = representative.graph if isinstance(representative, Subgraph) else representative
    for v in rep.nodes:
        if v not in rep_positions:
            raise DomainError(f"no position for representative node {v!r}")
    forward = matching.forward
    matched_ind = set(forward.values())
    encoding: dict[str, NodeEncoding] = {}
    dashed = set()
    for v in rep.nodes:
        if v not in forward:
            encoding[v] = NodeEncoding(ABSENT)
            for w in rep.neighbors(v):
                dashed.add((v, w) if rep.index(v) < rep.index(w) else (w, v))
            continue
        u = forward[v]
        hidden = sum(1 for w in ind.neighbors(u) if w not in matched_ind)
        encoding[v] = NodeEncoding(RINGED, hidden) if hidden else NodeEncoding(PLAIN)
    positions = {v: rep_positions[v] for v in rep.nodes}
    return DecoratedLayout(positions, encoding, frozenset(dashed), tuple(rep.edges))
