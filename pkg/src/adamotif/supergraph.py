"""Merge the representatives of one cluster into a single super-graph.

The largest member is the basis. Every other member, in descending size, is
aligned against the current super-graph: matched nodes are identified with
their partners, unmatched nodes are added, and every member edge is mapped
through the resulting provenance.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .alignment import AlignParams, AlignmentMatching, align, match_nodes
from .errors import DomainError
from .graph import Graph, Subgraph

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SuperGraph:
    graph: Graph = field(repr=False)
    provenance: tuple[dict[str, str], ...]
    members: tuple = field(repr=False)
    basis: int = 0
    order: tuple[int, ...] = ()
    matchings: tuple[AlignmentMatching | None, ...] = field(default=(), repr=False)
    warnings: tuple[str, ...] = ()

    def added_nodes(self) -> int:
        return len(self.graph) - len(_graph(self.members[self.basis]))


def _graph(m) -> Graph:
    return m.graph if isinstance(m, Subgraph) else m


def _fresh_id(taken, base: str) -> str:
    if base not in taken:
        return base
    k = 1
    while f"{base}#{k}" in taken:
        k += 1
    return f"{base}#{k}"


def synthesize_supergraph(members, params: AlignParams | None = None, keys=None) -> SuperGraph:
    """``keys`` (e.g. community indices) break size ties when choosing the
    basis and merge order; defaults to list position."""
    params = params or AlignParams()
    members = list(members)
    if not members:
        raise DomainError("cannot synthesize a super-graph from no members")
    keys = list(keys) if keys is not None else list(range(len(members)))
    order = sorted(range(len(members)), key=lambda i: (-len(_graph(members[i])), keys[i]))
    basis = order[0]
    bg = _graph(members[basis])
    nodes = list(bg.nodes)
    edges = list(bg.edges)
    labels = dict(bg.labels)
    provenance: list[dict[str, str] | None] = [None] * len(members)
    provenance[basis] = {v: v for v in bg.nodes}
    matchings: list[AlignmentMatching | None] = [None] * len(members)
    warnings = []
    current = bg
    for i in order[1:]:
        mg = _graph(members[i])
        sim = align(current, mg, params.rank, params.bandwidth)
        matching = match_nodes(sim, current, mg, params.quantile_threshold)
        matchings[i] = matching
        prov = {b: a for a, b in matching.pairs}
        taken = set(nodes)
        for v in mg.nodes:
            if v not in prov:
                new = _fresh_id(taken, v)
                taken.add(new)
                nodes.append(new)
                prov[v] = new
                if v in mg.labels:
                    labels[new] = mg.labels[v]
        if not matching.pairs:
            msg = f"member {keys[i]} shares no matched node with the super-graph; added as an island"
            log.warning(msg)
            warnings.append(msg)
        for a, b in mg.edges:
            edges.append((prov[a], prov[b]))
        provenance[i] = prov
        current = Graph(nodes, edges, labels)
    return SuperGraph(
        current, tuple(provenance), tuple(members), basis, tuple(order), tuple(matchings), tuple(warnings)
    )
