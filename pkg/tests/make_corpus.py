"""Regenerate tests/data/connected8.g6: every connected graph on 8 nodes,
up to isomorphism (11117 graphs).

Every connected graph has a non-cut vertex, so each one arises from a
connected 7-node graph by attaching a new vertex to a nonempty subset.
"""

import itertools
import os

import networkx as nx
from networkx.generators.atlas import graph_atlas_g

OUT = os.path.join(os.path.dirname(__file__), "data", "connected8.g6")


def main():
    base = [g for g in graph_atlas_g() if len(g) == 7 and nx.is_connected(g)]
    buckets: dict[str, list[nx.Graph]] = {}
    for g in base:
        for k in range(1, 8):
            for subset in itertools.combinations(range(7), k):
                h = g.copy()
                h.add_edges_from((7, v) for v in subset)
                key = nx.weisfeiler_lehman_graph_hash(h, iterations=4)
                seen = buckets.setdefault(key, [])
                if not any(nx.is_isomorphic(h, o) for o in seen):
                    seen.append(h)
    graphs = [g for b in sorted(buckets) for g in buckets[b]]
    with open(OUT, "wb") as fh:
        for g in graphs:
            fh.write(nx.to_graph6_bytes(g, header=False))
    print(len(graphs))


if __name__ == "__main__":
    main()
