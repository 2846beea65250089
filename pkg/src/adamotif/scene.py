"""The final scene and its SVG / JSON serializations."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from xml.sax.saxutils import escape

from .assembly import MotifEdge
from .errors import DomainError
from .layout import ABSENT, LARGE, MEDIUM, RINGED, SMALL, DecoratedLayout, NodeEncoding
from .motif import Motif, Polygon

SCHEMA_VERSION = 1
LABEL_THRESHOLD = 5

NODE_FILL = "#6b6b6b"
RING_SCALE = {SMALL: 1.4, MEDIUM: 1.8, LARGE: 2.3}  # outer ring radius / node radius


@dataclass(frozen=True)
class MotifScene:
    """``metadata`` must hold JSON-native values (dicts, lists, str, numbers)
    so that the JSON round trip is value-preserving."""

    motifs: tuple[Motif, ...]
    edges: tuple[MotifEdge, ...]
    canvas: tuple[float, float]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.motifs)
        for e in self.edges:
            a, b = e.endpoints
            if a == b or not (0 <= a < n and 0 <= b < n):
                raise DomainError(f"edge {e.endpoints} does not connect two existing motifs")

    @property
    def node_count(self) -> int:
        return sum(m.node_count for m in self.motifs)


def _f(x: float) -> str:
    s = f"{x:.2f}"
    return "0.00" if s == "-0.00" else s


def edge_stroke(gray: float) -> str:
    """Luminance falls linearly from 85% (gray 0) to 25% (gray 1)."""
    level = round(255 * (0.85 - 0.6 * min(max(gray, 0.0), 1.0)))
    return f"#{level:02x}{level:02x}{level:02x}"


def _path_d(points, close: bool) -> str:
    head, *rest = points
    d = f"M{_f(head[0])},{_f(head[1])}" + "".join(f" L{_f(x)},{_f(y)}" for x, y in rest)
    return d + " Z" if close else d


def _midpoint(path) -> tuple[float, float]:
    seg = [math.dist(p, q) for p, q in zip(path, path[1:])]
    half = sum(seg) / 2.0
    for (p, q), s in zip(zip(path, path[1:]), seg):
        if half <= s and s > 0:
            t = half / s
            return p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])
        half -= s
    return path[-1]


def render_svg(scene: MotifScene, label_threshold: int = LABEL_THRESHOLD) -> bytes:
    r = float(scene.metadata.get("node_radius", 3.0))
    w, h = scene.canvas
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_f(w)}" height="{_f(h)}" '
        f'viewBox="0 0 {_f(w)} {_f(h)}">',
        '<rect width="100%" height="100%" fill="#ffffff"/>',
        '<g class="motif-edges">',
    ]
    for e in scene.edges:
        path = e.bundle_path or (scene.motifs[e.endpoints[0]].anchor, scene.motifs[e.endpoints[1]].anchor)
        out.append(
            f'<path class="motif-edge" data-count="{e.count}" d="{_path_d(path, False)}" fill="none" '
            f'stroke="{edge_stroke(e.gray)}" stroke-width="1.5"/>'
        )
    out.append("</g>")
    for i, m in enumerate(scene.motifs):
        out.append(f'<g class="motif" data-community="{m.community}" data-cluster="{m.cluster}">')
        out.append(
            f'<path class="motif-contour" d="{_path_d(m.world_contour().vertices, True)}" fill="{m.color}" '
            f'fill-opacity="0.35" stroke="{m.color}" stroke-width="1.5"/>'
        )
        pos = m.world_positions()
        for a, b in m.internal.edges:
            (x1, y1), (x2, y2) = pos[a], pos[b]
            dash = ' stroke-dasharray="3,2"' if (a, b) in m.internal.dashed_edges else ""
            out.append(
                f'<line x1="{_f(x1)}" y1="{_f(y1)}" x2="{_f(x2)}" y2="{_f(y2)}" stroke="#8c8c8c" '
                f'stroke-width="0.8"{dash}/>'
            )
        for v, (x, y) in pos.items():
            enc = m.internal.node_encoding.get(v, NodeEncoding())
            if enc.kind == ABSENT:
                out.append(
                    f'<circle class="node-absent" cx="{_f(x)}" cy="{_f(y)}" r="{_f(r)}" fill="#ffffff" '
                    f'stroke="{NODE_FILL}" stroke-width="0.8" stroke-dasharray="1.5,1"/>'
                )
                continue
            if enc.kind == RINGED:
                outer = r * RING_SCALE[enc.level]
                out.append(
                    f'<circle class="node-ring ring-{enc.level}" cx="{_f(x)}" cy="{_f(y)}" '
                    f'r="{_f((r + outer) / 2.0)}" fill="none" stroke="#333333" stroke-width="{_f(outer - r)}"/>'
                )
            out.append(f'<circle class="node" cx="{_f(x)}" cy="{_f(y)}" r="{_f(r)}" fill="{NODE_FILL}"/>')
        out.append("</g>")
    out.append('<g class="edge-labels">')
    for e in scene.edges:
        if e.count < label_threshold:
            continue
        path = e.bundle_path or (scene.motifs[e.endpoints[0]].anchor, scene.motifs[e.endpoints[1]].anchor)
        x, y = _midpoint(list(path))
        out.append(
            f'<text class="edge-label" x="{_f(x)}" y="{_f(y)}" font-family="sans-serif" font-size="10" '
            f'text-anchor="middle" fill="{edge_stroke(e.gray)}">{escape(str(e.count))}</text>'
        )
    out.append("</g>")
    out.append("</svg>")
    return ("\n".join(out) + "\n").encode("utf-8")


def _motif_dict(m: Motif) -> dict:
    lay = m.internal
    return {
        "community": m.community,
        "cluster": m.cluster,
        "color": m.color,
        "anchor": list(m.anchor),
        "scale": m.scale,
        "node_count": m.node_count,
        "target_area": m.target_area,
        "representative": m.representative,
        "contour": {"vertices": [list(p) for p in m.contour.vertices], "degenerate": m.contour.degenerate},
        "nodes": [
            {
                "id": v,
                "x": x,
                "y": y,
                "kind": lay.node_encoding[v].kind,
                "hidden_count": lay.node_encoding[v].hidden_count,
            }
            for v, (x, y) in lay.positions.items()
        ],
        "edges": [list(e) for e in lay.edges],
        "dashed_edges": sorted(list(e) for e in lay.dashed_edges),
    }


def scene_to_dict(scene: MotifScene) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "canvas": list(scene.canvas),
        "metadata": scene.metadata,
        "motifs": [_motif_dict(m) for m in scene.motifs],
        "edges": [
            {
                "endpoints": list(e.endpoints),
                "count": e.count,
                "gray": e.gray,
                "bundle_path": [list(p) for p in e.bundle_path],
            }
            for e in scene.edges
        ],
    }


def render_json(scene: MotifScene) -> bytes:
    return (json.dumps(scene_to_dict(scene), indent=1, sort_keys=True) + "\n").encode("utf-8")


def _pt(p) -> tuple[float, float]:
    return float(p[0]), float(p[1])


def scene_from_dict(data: dict) -> MotifScene:
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise DomainError(f"unsupported scene schema_version {version!r}")
    motifs = []
    for md in data["motifs"]:
        nodes = md["nodes"]
        internal = DecoratedLayout(
            {n["id"]: _pt((n["x"], n["y"])) for n in nodes},
            {n["id"]: NodeEncoding(n["kind"], int(n["hidden_count"])) for n in nodes},
            frozenset(tuple(e) for e in md["dashed_edges"]),
            tuple(tuple(e) for e in md["edges"]),
        )
        contour = Polygon(tuple(_pt(p) for p in md["contour"]["vertices"]), bool(md["contour"]["degenerate"]))
        motifs.append(
            Motif(
                int(md["community"]),
                int(md["cluster"]),
                md["color"],
                contour,
                internal,
                float(md["scale"]),
                int(md["node_count"]),
                _pt(md["anchor"]),
                float(md["target_area"]),
                md["representative"],
            )
        )
    edges = tuple(
        MotifEdge(
            (int(e["endpoints"][0]), int(e["endpoints"][1])),
            int(e["count"]),
            float(e["gray"]),
            tuple(_pt(p) for p in e["bundle_path"]),
        )
        for e in data["edges"]
    )
    return MotifScene(tuple(motifs), edges, _pt(data["canvas"]), data.get("metadata", {}))


def load_scene(source) -> MotifScene:
    """Parse a JSON scene from bytes, str or a path."""
    if isinstance(source, (bytes, bytearray)):
        text = source.decode("utf-8")
    elif isinstance(source, str) and source.lstrip().startswith("{"):
        text = source
    else:
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    return scene_from_dict(json.loads(text))


def render(scene: MotifScene, format: str = "svg", label_threshold: int = LABEL_THRESHOLD) -> bytes:
    if format == "svg":
        return render_svg(scene, label_threshold)
    if format == "json":
        return render_json(scene)
    raise DomainError(f"unknown render format {format!r}")
