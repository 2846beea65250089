"""Undirected simple graph model, edge-list I/O and induced subgraphs.

Node identifiers are kept as the string tokens read from the input. Every
internal index (matrix row, array slot) is derived from the insertion order
of ``Graph.nodes`` and never leaks out of the module that created it.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np
from scipy import sparse

from .errors import DomainError, GraphParseError

log = logging.getLogger(__name__)

FORMATS = ("whitespace", "csv", "json")


class Graph:
    """Immutable undirected simple graph.

    Nodes keep the order in which they were first seen; edges are stored as
    ``(u, v)`` tuples with ``u`` preceding ``v`` in node order.
    """

    __slots__ = ("_nodes", "_index", "_adj", "_edges", "labels", "self_loops_dropped")

    def __init__(
        self,
        nodes: Iterable[str] = (),
        edges: Iterable[tuple[str, str]] = (),
        labels: Mapping[str, str] | None = None,
        self_loops_dropped: int = 0,
    ):
        order: dict[str, int] = {}
        for v in nodes:
            order.setdefault(str(v), len(order))
        adj: dict[str, set[str]] = {v: set() for v in order}
        edge_list = []
        for a, b in edges:
            a, b = str(a), str(b)
            if a == b:
                raise DomainError(f"self-loop on node {a!r}")
            for v in (a, b):
                if v not in order:
                    raise DomainError(f"edge endpoint {v!r} is not a node")
            if b in adj[a]:
                continue
            adj[a].add(b)
            adj[b].add(a)
            edge_list.append((a, b) if order[a] < order[b] else (b, a))
        self._nodes = tuple(order)
        self._index = order
        self._adj = {v: frozenset(n) for v, n in adj.items()}
        self._edges = tuple(edge_list)
        self.labels = dict(labels or {})
        self.self_loops_dropped = self_loops_dropped

    @property
    def nodes(self) -> tuple[str, ...]:
        return self._nodes

    @property
    def edges(self) -> tuple[tuple[str, str], ...]:
        return self._edges

    def __len__(self):
        return len(self._nodes)

    def __contains__(self, v):
        return v in self._index

    def __repr__(self):
        return f"Graph(n={len(self._nodes)}, m={len(self._edges)})"

    def number_of_edges(self) -> int:
        return len(self._edges)

    def index(self, v: str) -> int:
        try:
            return self._index[v]
        except KeyError:
            raise DomainError(f"unknown node {v!r}") from None

    def neighbors(self, v: str) -> frozenset[str]:
        try:
            return self._adj[v]
        except KeyError:
            raise DomainError(f"unknown node {v!r}") from None

    def has_edge(self, a: str, b: str) -> bool:
        return b in self._adj.get(a, ())

    def edge_set(self) -> frozenset[frozenset[str]]:
        return frozenset(frozenset(e) for e in self._edges)

    def degrees(self) -> np.ndarray:
        return np.array([len(self._adj[v]) for v in self._nodes], dtype=np.int64)

    def adjacency(self) -> sparse.csr_matrix:
        """Symmetric 0/1 adjacency in node order."""
        n = len(self._nodes)
        if not self._edges:
            return sparse.csr_matrix((n, n), dtype=np.float64)
        idx = self._index
        rows = np.array([idx[a] for a, _ in self._edges])
        cols = np.array([idx[b] for _, b in self._edges])
        data = np.ones(2 * len(rows))
        return sparse.csr_matrix(
            (data, (np.concatenate([rows, cols]), np.concatenate([cols, rows]))), shape=(n, n)
        )

    def connected_components(self) -> list[list[str]]:
        """Components as node lists, in order of their first node."""
        seen: set[str] = set()
        out = []
        for s in self._nodes:
            if s in seen:
                continue
            comp = [s]
            seen.add(s)
            stack = [s]
            while stack:
                u = stack.pop()
                for w in self._adj[u]:
                    if w not in seen:
                        seen.add(w)
                        comp.append(w)
                        stack.append(w)
            comp.sort(key=self._index.__getitem__)
            out.append(comp)
        return out

    def is_connected(self) -> bool:
        return len(self._nodes) > 0 and len(self.connected_components()) == 1


@dataclass(frozen=True)
class Subgraph:
    """Node-induced subgraph of ``parent``; ``graph`` holds the induced edges."""

    parent: Graph = field(repr=False)
    members: frozenset[str]
    graph: Graph = field(repr=False)

    @property
    def nodes(self):
        return self.graph.nodes

    @property
    def edges(self):
        return self.graph.edges

    def __len__(self):
        return len(self.graph)


def induced_subgraph(g: Graph, members: Iterable[str]) -> Subgraph:
    members = frozenset(members)
    for v in members:
        if v not in g:
            raise DomainError(f"node {v!r} is not in the graph")
    nodes = [v for v in g.nodes if v in members]
    edges = [(a, b) for a, b in g.edges if a in members and b in members]
    labels = {v: g.labels[v] for v in nodes if v in g.labels}
    return Subgraph(g, members, Graph(nodes, edges, labels))


def degree(g: Graph, v: str) -> int:
    return len(g.neighbors(v))


def _build(pairs, declared=(), labels=None) -> Graph:
    nodes = list(declared)
    edges = []
    loops = 0
    for a, b in pairs:
        nodes.append(a)
        nodes.append(b)
        if a == b:
            loops += 1
            continue
        edges.append((a, b))
    if loops:
        log.warning("dropped %d self-loop(s)", loops)
    return Graph(nodes, edges, labels, self_loops_dropped=loops)


def _parse_whitespace(text: str) -> Graph:
    pairs = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        tokens = stripped.split()
        if len(tokens) != 2:
            raise GraphParseError(f"expected 2 tokens, got {len(tokens)}", lineno)
        pairs.append((tokens[0], tokens[1]))
    return _build(pairs)


def _parse_csv(text: str) -> Graph:
    pairs = []
    reader = csv.reader(io.StringIO(text))
    for lineno, row in enumerate(reader, start=1):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 2:
            raise GraphParseError(f"expected 2 columns, got {len(row)}", lineno)
        a, b = row[0].strip(), row[1].strip()
        if lineno == 1 and (a.lower(), b.lower()) == ("source", "target"):
            continue
        pairs.append((a, b))
    return _build(pairs)


def _parse_json(text: str) -> Graph:
    if not text.strip():
        return Graph()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphParseError(exc.msg, exc.lineno) from exc
    if not isinstance(doc, dict):
        raise GraphParseError("top-level value must be an object")
    declared, labels = [], {}
    for i, node in enumerate(doc.get("nodes", [])):
        if not isinstance(node, dict) or "id" not in node:
            raise GraphParseError(f"nodes[{i}] has no 'id'")
        nid = str(node["id"])
        declared.append(nid)
        if node.get("label") is not None:
            labels[nid] = str(node["label"])
    pairs = []
    for i, link in enumerate(doc.get("links", doc.get("edges", []))):
        if not isinstance(link, dict) or "source" not in link or "target" not in link:
            raise GraphParseError(f"links[{i}] needs 'source' and 'target'")
        pairs.append((str(link["source"]), str(link["target"])))
    return _build(pairs, declared, labels)


_PARSERS = {"whitespace": _parse_whitespace, "csv": _parse_csv, "json": _parse_json}


def load_edge_list(source, format: str = "whitespace") -> Graph:
    """Read a graph from a path, a byte/text stream, or raw bytes."""
    if format not in _PARSERS:
        raise DomainError(f"unknown format {format!r}; expected one of {FORMATS}")
    if isinstance(source, (bytes, bytearray)):
        raw = bytes(source)
    elif hasattr(source, "read"):
        raw = source.read()
    else:
        with open(source, "rb") as fh:
            raw = fh.read()
    if isinstance(raw, bytes):
        try:
            raw = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise GraphParseError(f"input is not valid UTF-8: {exc}") from exc
    return _PARSERS[format](raw)


def guess_format(path: str) -> str:
    lower = str(path).lower()
    if lower.endswith(".json"):
        return "json"
    if lower.endswith(".csv"):
        return "csv"
    return "whitespace"


def dump_edge_list(g: Graph, format: str = "whitespace") -> bytes:
    if format == "whitespace":
        text = "".join(f"{a} {b}\n" for a, b in g.edges)
    elif format == "csv":
        text = "source,target\n" + "".join(f"{a},{b}\n" for a, b in g.edges)
    elif format == "json":
        nodes = []
        for v in g.nodes:
            entry = {"id": v}
            if v in g.labels:
                entry["label"] = g.labels[v]
            nodes.append(entry)
        links = [{"source": a, "target": b} for a, b in g.edges]
        text = json.dumps({"nodes": nodes, "links": links}, indent=1)
    else:
        raise DomainError(f"unknown format {format!r}")
    return text.encode("utf-8")
