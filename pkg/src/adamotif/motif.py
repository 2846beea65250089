"""Motif geometry: concave contours, buffered outlines and size scaling.

Motif coordinates are local: the internal layout is centred on the origin
and the scene places each motif by translating it to its ``anchor``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import brentq
from scipy.spatial import Delaunay, QhullError, cKDTree
from shapely import affinity
from shapely.geometry import LineString, MultiPoint, Point
from shapely.geometry import Polygon as ShapelyPolygon
from shapely.geometry.polygon import orient
from shapely.ops import unary_union

from .errors import DomainError
from .layout import DecoratedLayout, NodeEncoding, Positions

PALETTE = (
    "#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#76b7b2", "#edc948",
    "#b07aa1", "#ff9da7", "#9c755f", "#17becf", "#bcbd22", "#bab0ac",
)

ARC_SEGMENTS = 9  # per quarter circle, i.e. 10 degree steps


@dataclass(frozen=True)
class MotifParams:
    """``base_area`` is the contour area per node; ``"auto"`` shrinks it below
    ``max_base_area`` so that all motifs together cover at most
    ``canvas_fill`` of the canvas."""

    base_area: float | str = "auto"
    max_base_area: float = 400.0
    canvas_fill: float = 0.1
    alpha: float | str = "auto"
    node_radius: float = 3.0
    buffer_factor: float = 2.5
    palette: tuple[str, ...] = PALETTE

    @property
    def buffer_distance(self) -> float:
        return self.node_radius * self.buffer_factor

    def resolve_base_area(self, total_nodes: int, canvas=(1600.0, 1200.0)) -> float:
        if self.base_area != "auto":
            return float(self.base_area)
        budget = self.canvas_fill * canvas[0] * canvas[1] / max(total_nodes, 1)
        return min(self.max_base_area, budget)


@dataclass(frozen=True)
class Polygon:
    """Simple counter-clockwise polygon; the closing vertex is implicit."""

    vertices: tuple[tuple[float, float], ...]
    degenerate: bool = False

    def __post_init__(self):
        if len(self.vertices) < 3:
            raise DomainError("a polygon needs at least 3 vertices")

    @classmethod
    def from_shapely(cls, poly, degenerate: bool = False) -> "Polygon":
        poly = orient(ShapelyPolygon(poly.exterior), 1.0)
        coords = list(poly.exterior.coords)[:-1]
        return cls(tuple((float(x), float(y)) for x, y in coords), degenerate)

    def to_shapely(self) -> ShapelyPolygon:
        return ShapelyPolygon(self.vertices)

    @property
    def area(self) -> float:
        v = np.asarray(self.vertices)
        x, y = v[:, 0], v[:, 1]
        return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))

    def contains(self, point, strict: bool = True) -> bool:
        p = Point(point)
        poly = self.to_shapely()
        return poly.contains(p) if strict else poly.covers(p)

    def translated(self, dx: float, dy: float) -> "Polygon":
        return Polygon(tuple((x + dx, y + dy) for x, y in self.vertices), self.degenerate)

    def bounding_radius(self, center=(0.0, 0.0)) -> float:
        v = np.asarray(self.vertices) - np.asarray(center)
        return float(np.max(np.hypot(v[:, 0], v[:, 1])))


def _circumradii(pts: np.ndarray, simplices: np.ndarray) -> np.ndarray:
    a = pts[simplices[:, 0]]
    b = pts[simplices[:, 1]]
    c = pts[simplices[:, 2]]
    la = np.linalg.norm(b - c, axis=1)
    lb = np.linalg.norm(c - a, axis=1)
    lc = np.linalg.norm(a - b, axis=1)
    cross = np.abs((b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0]))
    with np.errstate(divide="ignore", invalid="ignore"):
        r = la * lb * lc / (2.0 * cross)
    r[~np.isfinite(r)] = np.inf
    return r


def _capsule(pts: np.ndarray, radius: float) -> Polygon:
    if len(pts) == 1 or np.ptp(pts, axis=0).max() == 0:
        shape = Point(pts[0]).buffer(radius, quad_segs=ARC_SEGMENTS)
    else:
        # collinear: inflate the segment spanned by the extreme points
        d = pts - pts.mean(axis=0)
        axis = np.linalg.svd(d, full_matrices=False)[2][0]
        t = d @ axis
        ends = [pts[int(np.argmin(t))], pts[int(np.argmax(t))]]
        shape = LineString(ends).buffer(radius, quad_segs=ARC_SEGMENTS)
    return Polygon.from_shapely(shape, degenerate=True)


def default_alpha(points) -> float:
    """Twice the median nearest-neighbour distance."""
    pts = np.unique(np.asarray(points, dtype=np.float64), axis=0)
    if len(pts) < 2:
        return 1.0
    d, _ = cKDTree(pts).query(pts, k=2)
    return 2.0 * float(np.median(d[:, 1]))


def alpha_shape(points, alpha: float | None = None, node_radius: float = 3.0) -> Polygon:
    """Outer boundary of the alpha complex (triangles of circumradius below
    ``alpha``). If those triangles leave a point uncovered or fall apart into
    several pieces, ``alpha`` is raised to the smallest value that yields a
    single region covering every point; ``alpha = inf`` gives the convex hull.

    Fewer than three distinct points, or collinear input, yield a capsule
    around the points of radius ``node_radius``, flagged ``degenerate``.
    """
    pts = np.unique(np.asarray(points, dtype=np.float64).reshape(-1, 2), axis=0)
    if len(pts) == 0:
        raise DomainError("alpha_shape needs at least one point")
    if alpha is None:
        alpha = default_alpha(pts)
    if alpha <= 0:
        raise DomainError("alpha must be positive")
    if len(pts) < 3:
        return _capsule(pts, node_radius)
    try:
        tri = Delaunay(pts)
    except QhullError:
        return _capsule(pts, node_radius)
    simplices = tri.simplices
    radii = _circumradii(pts, simplices)
    finite = np.isfinite(radii)
    simplices, radii = simplices[finite], radii[finite]
    if len(simplices) == 0:
        return _capsule(pts, node_radius)

    scale = float(np.ptp(pts, axis=0).max())
    cloud = MultiPoint(pts)
    triangles = [ShapelyPolygon(pts[s]) for s in simplices]

    def region(limit: float):
        keep = [t for t, r in zip(triangles, radii) if r <= limit]
        if not keep:
            return None
        shape = unary_union(keep)
        if shape.geom_type != "Polygon":
            return None
        if not shape.buffer(1e-9 * scale).covers(cloud):
            return None
        return shape

    shape = region(alpha) if alpha < np.inf else None
    if shape is None:
        levels = np.unique(radii)
        lo = int(np.searchsorted(levels, alpha, side="left"))
        hi = len(levels) - 1
        while lo < hi:
            mid = (lo + hi) // 2
            if region(levels[mid]) is not None:
                hi = mid
            else:
                lo = mid + 1
        shape = region(levels[hi])
    poly = ShapelyPolygon(shape.exterior).simplify(0)
    return Polygon.from_shapely(poly)


def buffer_polygon(p: Polygon, distance: float) -> Polygon:
    """Outward offset by ``distance`` with round joins (10 degree arc steps)."""
    if distance < 0:
        raise DomainError("buffer distance must be non-negative")
    if distance == 0:
        return p
    grown = p.to_shapely().buffer(distance, quad_segs=ARC_SEGMENTS, join_style="round")
    if grown.geom_type != "Polygon":
        grown = grown.convex_hull
    return Polygon.from_shapely(grown, p.degenerate)


@dataclass(frozen=True)
class Motif:
    community: int
    cluster: int
    color: str
    contour: Polygon
    internal: DecoratedLayout
    scale: float
    node_count: int
    anchor: tuple[float, float] = (0.0, 0.0)
    target_area: float = 0.0
    representative: int | None = None

    @property
    def area(self) -> float:
        return self.contour.area

    @property
    def radius(self) -> float:
        return self.contour.bounding_radius()

    def placed(self, anchor) -> "Motif":
        return replace(self, anchor=(float(anchor[0]), float(anchor[1])))

    def world_contour(self) -> Polygon:
        return self.contour.translated(*self.anchor)

    def world_positions(self) -> Positions:
        ax, ay = self.anchor
        return {v: (x + ax, y + ay) for v, (x, y) in self.internal.positions.items()}


def cluster_color(cluster: int, palette=PALETTE) -> str:
    return palette[cluster % len(palette)]


def _scaled_layout(layout: DecoratedLayout, center: np.ndarray, s: float) -> DecoratedLayout:
    pos = {v: (float((x - center[0]) * s), float((y - center[1]) * s)) for v, (x, y) in layout.positions.items()}
    return replace(layout, positions=pos)


def build_motif(
    community: int,
    layout: DecoratedLayout | Positions,
    cluster: int,
    node_count: int,
    params: MotifParams | None = None,
    representative: int | None = None,
) -> Motif:
    """Contour the layout and scale it so the contour area equals
    ``base_area * node_count``."""
    params = params or MotifParams()
    if not isinstance(layout, DecoratedLayout):
        layout = DecoratedLayout(dict(layout), {v: NodeEncoding() for v in layout})
    if not layout.positions:
        raise DomainError("cannot build a motif from an empty layout")
    nodes = list(layout.positions)
    pts = np.array([layout.positions[v] for v in nodes], dtype=np.float64)
    center = pts.mean(axis=0)
    rel = pts - center
    base = params.base_area if params.base_area != "auto" else params.max_base_area
    target = float(base) * node_count
    r, d = params.node_radius, params.buffer_distance

    hull = alpha_shape(rel, None if params.alpha == "auto" else float(params.alpha), r)
    extent = float(np.max(np.hypot(rel[:, 0], rel[:, 1]))) if len(rel) else 0.0

    if extent == 0.0:
        # a single point: size comes from the outline distance alone
        def area_at(dist):
            return buffer_polygon(hull, dist).area

        dist = d
        if area_at(d) < target:
            dist = brentq(lambda x: area_at(x) - target, d, math.sqrt(target) + d, xtol=1e-9)
        contour = buffer_polygon(hull, dist)
        return Motif(community, cluster, cluster_color(cluster, params.palette), contour,
                     _scaled_layout(layout, center, 1.0), 1.0, node_count, (0.0, 0.0), target, representative)

    if hull.degenerate:
        d_pts = rel

        def contour_at(s):
            return _capsule(d_pts * s, r + d)
    else:
        base = hull.to_shapely()

        def contour_at(s):
            scaled = affinity.scale(base, s, s, origin=(0, 0))
            return buffer_polygon(Polygon.from_shapely(scaled), d)

    s_lo = 1e-6 / extent
    if contour_at(s_lo).area >= target:
        s = s_lo
    else:
        s_hi = 1.0 / extent
        while contour_at(s_hi).area < target:
            s_hi *= 2.0
        s = brentq(lambda x: contour_at(x).area - target, s_lo, s_hi, xtol=1e-12, rtol=1e-10)
    contour = contour_at(s)
    return Motif(community, cluster, cluster_color(cluster, params.palette), contour,
                 _scaled_layout(layout, center, s), float(s), node_count, (0.0, 0.0), target, representative)

