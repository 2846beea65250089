"""Inter-motif edges, global motif placement and force-directed edge bundling."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace

import numpy as np
from shapely.geometry import LineString, Point

from .community import CommunityPartition
from .errors import DomainError, PackingError
from .graph import Graph
from .motif import Motif

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class MotifEdge:
    endpoints: tuple[int, int]
    count: int
    gray: float
    bundle_path: tuple[tuple[float, float], ...] = ()


def gray_levels(counts) -> list[float]:
    """``ln(1 + c) / ln(1 + max c)``; all-equal counts map to 0.5."""
    counts = list(counts)
    if not counts:
        return []
    hi, lo = max(counts), min(counts)
    if hi == lo:
        return [0.5] * len(counts)
    denom = math.log1p(hi)
    return [math.log1p(c) / denom for c in counts]


def aggregate_edges(g: Graph, p: CommunityPartition) -> list[MotifEdge]:
    assignment = p.assignment
    counts: dict[tuple[int, int], int] = {}
    for a, b in g.edges:
        ca, cb = assignment[a], assignment[b]
        if ca == cb:
            continue
        key = (ca, cb) if ca < cb else (cb, ca)
        counts[key] = counts.get(key, 0) + 1
    keys = sorted(counts)
    grays = gray_levels(counts[k] for k in keys)
    return [MotifEdge(k, counts[k], gr) for k, gr in zip(keys, grays)]


@dataclass(frozen=True)
class GlobalLayoutParams:
    canvas: tuple[float, float] = (1600.0, 1200.0)
    padding: float = 8.0
    iterations: int = 300
    link_gap: float = 30.0
    link_strength: float = 0.3
    gravity: float = 0.02
    max_retries: int = 5
    growth: float = 1.25
    seed: int = 42


def _resolve_collisions(pos, radii, max_iter=5000, tol=1e-9):
    """Push overlapping discs apart until none overlap (within ``tol``)."""
    n = len(pos)
    if n < 2:
        return pos, 0.0
    iu = np.triu_indices(n, 1)
    need = radii[iu[0]] + radii[iu[1]]
    worst = 0.0
    for _ in range(max_iter):
        diff = pos[iu[1]] - pos[iu[0]]
        dist = np.hypot(diff[:, 0], diff[:, 1])
        overlap = need - dist
        hit = overlap > tol
        if not hit.any():
            return pos, 0.0
        worst = float(overlap[hit].max())
        i, j = iu[0][hit], iu[1][hit]
        d = dist[hit]
        u = diff[hit]
        zero = d < 1e-12
        if zero.any():
            # coincident centres: separate along a fixed index-dependent angle
            ang = (i[zero] * 2.399963 + j[zero]) % (2 * math.pi)
            u[zero] = np.column_stack([np.cos(ang), np.sin(ang)])
            d = np.where(zero, 1.0, d)
        u = u / d[:, None]
        # slight over-correction so the loop terminates on float noise
        push = (overlap[hit] * 0.5 + tol)[:, None] * u
        w_i = radii[j] / (radii[i] + radii[j])
        w_j = radii[i] / (radii[i] + radii[j])
        delta = np.zeros_like(pos)
        np.add.at(delta, i, -push * (2 * w_i)[:, None])
        np.add.at(delta, j, push * (2 * w_j)[:, None])
        counts = np.bincount(np.r_[i, j], minlength=n).astype(float)
        pos = pos + delta / np.maximum(counts, 1.0)[:, None]
    return pos, worst


def _simulate(radii, edges, params: GlobalLayoutParams, canvas):
    n = len(radii)
    rng = np.random.default_rng(params.seed)
    center = np.array(canvas) / 2.0
    spread = math.sqrt(float(np.sum(radii**2))) * 1.5
    r = spread * np.sqrt(rng.random(n))
    a = 2 * math.pi * rng.random(n)
    pos = center + np.column_stack([r * np.cos(a), r * np.sin(a)])
    if n == 1:
        return center[None, :].copy()
    aspect = np.array([1.0, canvas[0] / canvas[1]])
    if edges:
        src = np.array([e.endpoints[0] for e in edges])
        dst = np.array([e.endpoints[1] for e in edges])
        weight = np.array([e.gray for e in edges]) * params.link_strength
        rest = radii[src] + radii[dst] + params.link_gap
    for it in range(params.iterations):
        cool = 1.0 - it / params.iterations
        f = params.gravity * (center - pos) * aspect
        if edges:
            delta = pos[dst] - pos[src]
            dist = np.maximum(np.hypot(delta[:, 0], delta[:, 1]), 1e-9)
            pull = (weight * (dist - rest) / dist)[:, None] * delta * 0.5
            np.add.at(f, src, pull)
            np.add.at(f, dst, -pull)
        step = f * cool
        limit = np.maximum(radii, 1.0) * 0.5
        mag = np.hypot(step[:, 0], step[:, 1])
        step *= np.minimum(1.0, limit / np.maximum(mag, 1e-12))[:, None]
        pos = pos + step
        pos, _ = _resolve_collisions(pos, radii, max_iter=3)
    return pos


def global_motif_layout(motifs: list[Motif], edges: list[MotifEdge], params: GlobalLayoutParams | None = None):
    """Place motifs as discs (contour bounding radius plus padding) without
    overlap inside the canvas.

    Returns ``(anchors, canvas)``; the canvas grows by ``growth`` per retry
    when the packing does not fit.
    """
    params = params or GlobalLayoutParams()
    if not motifs:
        raise DomainError("no motifs to lay out")
    radii = np.array([m.radius + params.padding for m in motifs])
    for e in edges:
        for c in e.endpoints:
            if not 0 <= c < len(motifs):
                raise DomainError(f"edge endpoint {c} does not reference a motif")
    canvas = tuple(float(x) for x in params.canvas)
    for attempt in range(params.max_retries + 1):
        pos = _simulate(radii, edges, params, canvas)
        pos, worst = _resolve_collisions(pos, radii)
        lo = (pos - radii[:, None]).min(axis=0)
        hi = (pos + radii[:, None]).max(axis=0)
        box = hi - lo
        if worst == 0.0 and box[0] <= canvas[0] and box[1] <= canvas[1]:
            pos = pos - (lo + hi) / 2.0 + np.array(canvas) / 2.0
            return pos, canvas
        log.info("motif packing does not fit %s (box %s); growing canvas", canvas, box.round(1))
        canvas = (canvas[0] * params.growth, canvas[1] * params.growth)
    raise PackingError(f"motifs do not fit after {params.max_retries} canvas enlargements")


@dataclass(frozen=True)
class BundleParams:
    K: float = 0.1
    step: float = 0.1
    cycles: int = 6
    first_subdivisions: int = 1
    iterations: int = 50
    iteration_rate: float = 2.0 / 3.0
    compatibility_threshold: float = 0.6


def attachment_point(anchor, other, contour) -> tuple[float, float]:
    """Where the segment from ``anchor`` toward ``other`` leaves ``contour``."""
    seg = LineString([anchor, other])
    hits = seg.intersection(contour.to_shapely().exterior)
    if hits.is_empty:
        return float(anchor[0]), float(anchor[1])
    pts = [hits] if hits.geom_type == "Point" else [g for g in getattr(hits, "geoms", []) if g.geom_type == "Point"]
    if not pts:
        coords = list(hits.coords) if hasattr(hits, "coords") else []
        pts = [Point(c) for c in coords] or [Point(anchor)]
    target = Point(other)
    best = min(pts, key=lambda q: (q.distance(target), q.x, q.y))
    return float(best.x), float(best.y)


def edge_compatibility(P0, P1) -> np.ndarray:
    """Pairwise angle x scale x position x visibility compatibility for
    segments ``P0[i] -> P1[i]``."""
    v = P1 - P0
    length = np.maximum(np.hypot(v[:, 0], v[:, 1]), 1e-12)
    unit = v / length[:, None]
    mid = (P0 + P1) / 2.0

    ca = np.abs(np.clip(unit @ unit.T, -1.0, 1.0))
    avg = (length[:, None] + length[None, :]) / 2.0
    lmin = np.minimum(length[:, None], length[None, :])
    lmax = np.maximum(length[:, None], length[None, :])
    cs = 2.0 / (avg / lmin + lmax / avg)
    md = np.hypot(mid[:, None, 0] - mid[None, :, 0], mid[:, None, 1] - mid[None, :, 1])
    cp = avg / (avg + md)

    def visibility(A0, A1, B0, B1):
        # project B's endpoints onto the line through A, rows = A, cols = B
        d = A1 - A0
        dd = np.maximum(np.einsum("ij,ij->i", d, d), 1e-24)

        def proj(Q):
            t = ((Q[None, :, 0] - A0[:, None, 0]) * d[:, None, 0] + (Q[None, :, 1] - A0[:, None, 1]) * d[:, None, 1]) / dd[:, None]
            return A0[:, None, :] + t[..., None] * d[:, None, :]

        I0, I1 = proj(B0), proj(B1)
        im = (I0 + I1) / 2.0
        il = np.hypot(*(I1 - I0).transpose(2, 0, 1))
        am = (A0 + A1) / 2.0
        dm = np.hypot(*(am[:, None, :] - im).transpose(2, 0, 1))
        with np.errstate(divide="ignore", invalid="ignore"):
            vis = 1.0 - 2.0 * dm / il
        vis[~np.isfinite(vis)] = 0.0
        return np.maximum(vis, 0.0)

    cv = np.minimum(visibility(P0, P1, P0, P1), visibility(P0, P1, P0, P1).T)
    comp = ca * cs * cp * cv
    np.fill_diagonal(comp, 0.0)
    return comp


def _resample(path: np.ndarray, points: int) -> np.ndarray:
    """``points`` interior points at equal arc length along ``path``."""
    seg = np.hypot(*np.diff(path, axis=0).T)
    cum = np.r_[0.0, np.cumsum(seg)]
    total = cum[-1]
    if total == 0:
        return np.repeat(path[:1], points + 2, axis=0)
    t = np.linspace(0.0, total, points + 2)
    x = np.interp(t, cum, path[:, 0])
    y = np.interp(t, cum, path[:, 1])
    out = np.column_stack([x, y])
    out[0], out[-1] = path[0], path[-1]
    return out


def bundle_paths(P0: np.ndarray, P1: np.ndarray, params: BundleParams | None = None) -> list[np.ndarray]:
    """Force-directed edge bundling of segments ``P0[i] -> P1[i]``."""
    params = params or BundleParams()
    m = len(P0)
    paths = [np.vstack([P0[i], P1[i]]) for i in range(m)]
    if m < 2:
        return paths
    comp = edge_compatibility(P0, P1)
    ii, jj = np.nonzero(comp >= params.compatibility_threshold)
    if len(ii) == 0:
        return paths
    weight = comp[ii, jj]
    # pair edges so that their subdivision points run the same way
    same = np.hypot(*(P0[ii] - P0[jj]).T) + np.hypot(*(P1[ii] - P1[jj]).T)
    flip = np.hypot(*(P0[ii] - P1[jj]).T) + np.hypot(*(P1[ii] - P0[jj]).T)
    reverse = flip < same
    length = np.maximum(np.hypot(*(P1 - P0).T), 1e-12)

    pts = np.stack([_resample(p, params.first_subdivisions) for p in paths])
    step = params.step
    iterations = params.iterations
    subdiv = params.first_subdivisions
    for cycle in range(params.cycles):
        if cycle > 0:
            subdiv *= 2
            pts = np.stack([_resample(p, subdiv) for p in pts])
        kp = params.K / (length * (subdiv + 1))
        for _ in range(max(1, int(round(iterations)))):
            inner = pts[:, 1:-1]
            spring = (pts[:, :-2] - inner) + (pts[:, 2:] - inner)
            spring *= kp[:, None, None]
            other = pts[jj][:, 1:-1]
            other = np.where(reverse[:, None, None], other[:, ::-1], other)
            diff = other - inner[ii]
            dist = np.hypot(diff[..., 0], diff[..., 1])
            with np.errstate(divide="ignore", invalid="ignore"):
                unit = np.where(dist[..., None] > 1e-9, diff / dist[..., None], 0.0)
            electro = np.zeros_like(inner)
            np.add.at(electro, ii, unit * weight[:, None, None])
            pts[:, 1:-1] = inner + step * (spring + electro)
        step /= 2.0
        iterations *= params.iteration_rate
    return [p.copy() for p in pts]


def bundle_edges(edges: list[MotifEdge], motifs: list[Motif], params: BundleParams | None = None) -> list[MotifEdge]:
    """Fill ``bundle_path`` for every edge. Endpoints sit where the straight
    anchor-to-anchor segment leaves each motif contour."""
    if not edges:
        return []
    P0, P1 = [], []
    for e in edges:
        a, b = e.endpoints
        if not (0 <= a < len(motifs) and 0 <= b < len(motifs)):
            raise DomainError(f"edge {e.endpoints} references a missing motif")
        ma, mb = motifs[a], motifs[b]
        P0.append(attachment_point(ma.anchor, mb.anchor, ma.world_contour()))
        P1.append(attachment_point(mb.anchor, ma.anchor, mb.world_contour()))
    P0, P1 = np.array(P0), np.array(P1)
    paths = bundle_paths(P0, P1, params)
    out = []
    for e, path, a, b in zip(edges, paths, P0, P1):
        coords = [(float(x), float(y)) for x, y in path]
        coords[0] = (float(a[0]), float(a[1]))
        coords[-1] = (float(b[0]), float(b[1]))
        out.append(replace(e, bundle_path=tuple(coords)))
    return out
