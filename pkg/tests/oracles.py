"""Brute-force oracles shared by the unit and acceptance tests."""

import numpy as np
import networkx as nx


def set_partitions(n: int) -> np.ndarray:
    """All partitions of n items as restricted growth strings."""
    out = []

    def rec(a, top):
        if len(a) == n:
            out.append(list(a))
            return
        for c in range(top + 2):
            a.append(c)
            rec(a, max(top, c))
            a.pop()

    rec([0], 0)
    return np.array(out)


_SAME = {}


def max_modularity(g: nx.Graph, resolution: float = 1.0) -> float:
    """Exact maximum modularity by enumerating every partition (n <= 9)."""
    n = len(g)
    if n not in _SAME:
        p = set_partitions(n)
        _SAME[n] = (p[:, :, None] == p[:, None, :]).reshape(len(p), -1).astype(float)
    A = nx.to_numpy_array(g, nodelist=list(g.nodes))
    k = A.sum(axis=1)
    m2 = k.sum()
    B = (A - resolution * np.outer(k, k) / m2).ravel()
    return float((_SAME[n] @ B).max() / m2)


def best_single_move_gain(g, assignment: dict, resolution: float = 1.0) -> float:
    """Largest modularity change from moving one node to another existing
    community or to a fresh one."""
    from adamotif import modularity

    q = modularity(g, assignment, resolution)
    labels = set(assignment.values())
    fresh = max(labels) + 1
    best = -np.inf
    for v in g.nodes:
        for c in labels | {fresh}:
            if c == assignment[v]:
                continue
            trial = dict(assignment)
            trial[v] = c
            best = max(best, modularity(g, trial, resolution) - q)
    return best


def small_connected_graphs(max_nodes: int):
    """Connected graphs with 2..max_nodes nodes from the networkx atlas (<= 7)."""
    from networkx.generators.atlas import graph_atlas_g

    return [g for g in graph_atlas_g() if 2 <= len(g) <= max_nodes and nx.is_connected(g)]



def max_weight_matching_bruteforce(W: np.ndarray) -> dict[int, int]:
    """Exact maximum-weight perfect matching of a square matrix by dynamic
    programming over subsets of columns (fine for n <= 12)."""
    n = W.shape[0]
    best = np.full(1 << n, -np.inf)
    choice = np.zeros(1 << n, dtype=np.int64)
    best[0] = 0.0
    for mask in range(1 << n):
        if best[mask] == -np.inf:
            continue
        row = bin(mask).count("1")
        if row == n:
            continue
        for col in range(n):
            if mask & (1 << col):
                continue
            nxt = mask | (1 << col)
            val = best[mask] + W[row, col]
            if val > best[nxt]:
                best[nxt] = val
                choice[nxt] = col
    out = {}
    mask = (1 << n) - 1
    for row in range(n - 1, -1, -1):
        col = int(choice[mask])
        out[row] = col
        mask ^= 1 << col
    return out
