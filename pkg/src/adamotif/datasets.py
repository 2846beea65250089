"""Bundled and synthetic benchmark graphs."""

from __future__ import annotations

from importlib import resources

import numpy as np

from .graph import Graph, load_edge_list

AS733_NODES = 6474
AS733_EDGES = 13895


def les_miserables() -> Graph:
    """Character co-appearance network, 77 nodes and 254 edges."""
    data = resources.files(__package__).joinpath("data/lesmis.txt").read_bytes()
    return load_edge_list(data, "whitespace")


def scale_free_graph(n: int, m: int, seed: int = 0) -> Graph:
    """Connected heavy-tailed graph with exactly ``n`` nodes and ``m`` edges.

    A preferential-attachment tree provides connectivity and the hub-dominated
    degree profile of router-level internet maps; the remaining ``m - n + 1``
    edges are drawn with probability proportional to current degree.
    """
    if m < n - 1 or m > n * (n - 1) // 2:
        raise ValueError(f"cannot build a connected simple graph with n={n}, m={m}")
    rng = np.random.default_rng(seed)
    deg = np.zeros(n, dtype=np.float64)
    edges: set[tuple[int, int]] = set()
    targets = [0]
    for v in range(1, n):
        u = targets[int(rng.integers(len(targets)))]
        edges.add((u, v))
        deg[u] += 1
        deg[v] += 1
        targets.extend((u, v))
    while len(edges) < m:
        batch = max(64, m - len(edges))
        p = deg / deg.sum()
        a = rng.choice(n, size=batch, p=p)
        b = rng.integers(0, n, size=batch)
        for u, v in zip(a.tolist(), b.tolist()):
            if u == v:
                continue
            e = (u, v) if u < v else (v, u)
            if e in edges:
                continue
            edges.add(e)
            deg[u] += 1
            deg[v] += 1
            if len(edges) == m:
                break
    nodes = [str(i) for i in range(n)]
    return Graph(nodes, [(str(u), str(v)) for u, v in sorted(edges)])


def as733_like(seed: int = 733) -> Graph:
    """Synthetic stand-in with the node and edge counts of the AS-733 snapshot."""
    return scale_free_graph(AS733_NODES, AS733_EDGES, seed)
