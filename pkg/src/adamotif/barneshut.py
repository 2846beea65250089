"""Vectorised Barnes-Hut quadtree for inverse-distance repulsion.

Computes ``sum_j (p_i - p_j) / |p_i - p_j|^2`` for every point ``i``,
approximating far cells by their centre of mass when ``size / dist < theta``.
The tree is built level by level from Morton codes and traversed for all
points at once, one level per step.
"""

from __future__ import annotations

import numpy as np

MAX_DEPTH = 20
_MIN_D2 = 1e-12


def _interleave(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    def spread(v):
        v = v.astype(np.int64) & 0xFFFFF
        v = (v | (v << 16)) & 0x0000FFFF0000FFFF
        v = (v | (v << 8)) & 0x00FF00FF00FF00FF
        v = (v | (v << 4)) & 0x0F0F0F0F0F0F0F0F
        v = (v | (v << 2)) & 0x3333333333333333
        v = (v | (v << 1)) & 0x5555555555555555
        return v

    return spread(x) | (spread(y) << 1)


class _Level:
    __slots__ = ("prefix", "start", "count", "com", "child_start", "child_count")


def _build(points: np.ndarray):
    lo = points.min(axis=0)
    extent = float(np.max(points.max(axis=0) - lo))
    extent = extent * (1 + 1e-9) if extent > 0 else 1.0
    side = 1 << MAX_DEPTH
    grid = np.floor((points - lo) / extent * side).astype(np.int64)
    grid = np.clip(grid, 0, side - 1)
    codes = _interleave(grid[:, 0], grid[:, 1])
    order = np.argsort(codes, kind="stable")
    codes = codes[order]
    sorted_pts = points[order]

    levels: list[_Level] = []
    for depth in range(MAX_DEPTH + 1):
        shift = 2 * (MAX_DEPTH - depth)
        pref = codes >> shift
        boundary = np.flatnonzero(np.r_[True, pref[1:] != pref[:-1]])
        lvl = _Level()
        lvl.prefix = pref[boundary]
        lvl.start = boundary
        lvl.count = np.diff(np.r_[boundary, len(codes)])
        lvl.com = np.add.reduceat(sorted_pts, boundary, axis=0) / lvl.count[:, None]
        levels.append(lvl)
        if lvl.count.max() == 1:
            break
    for depth in range(len(levels) - 1):
        parent, child = levels[depth], levels[depth + 1]
        lo_idx = np.searchsorted(child.prefix, parent.prefix << 2, side="left")
        hi_idx = np.searchsorted(child.prefix, (parent.prefix << 2) + 4, side="left")
        parent.child_start = lo_idx
        parent.child_count = hi_idx - lo_idx
    last = levels[-1]
    last.child_start = None
    last.child_count = None
    return levels, order, codes, extent


def _expand(idx: np.ndarray, start: np.ndarray, count: np.ndarray):
    """Pair each ``idx[k]`` with ``start[k] + 0..count[k]-1``."""
    total = int(count.sum())
    if total == 0:
        return idx[:0], idx[:0]
    rep_idx = np.repeat(idx, count)
    offsets = np.arange(total) - np.repeat(np.cumsum(count) - count, count)
    return rep_idx, np.repeat(start, count) + offsets


def repulsion(points: np.ndarray, theta: float = 0.9) -> np.ndarray:
    """Approximate ``sum_j (p_i - p_j) / |p_i - p_j|^2`` for every ``i``."""
    points = np.asarray(points, dtype=np.float64)
    n = len(points)
    out = np.zeros((n, 2))
    if n < 2:
        return out
    levels, order, codes, extent = _build(points)
    sorted_pts = points[order]
    # position of each original point in sorted order
    rank = np.empty(n, dtype=np.int64)
    rank[order] = np.arange(n)

    pi = np.arange(n)
    cell = np.zeros(n, dtype=np.int64)
    for depth, lvl in enumerate(levels):
        if len(pi) == 0:
            break
        shift = 2 * (MAX_DEPTH - depth)
        size = extent / (1 << depth)
        com = lvl.com[cell]
        diff = points[pi] - com
        d2 = np.maximum(np.einsum("ij,ij->i", diff, diff), _MIN_D2)
        inside = (codes[rank[pi]] >> shift) == lvl.prefix[cell]
        count = lvl.count[cell]

        single = count == 1
        far = ~inside & (size * size < theta * theta * d2)
        accept = (single & ~inside) | (far & ~single)
        if accept.any():
            w = count[accept] / d2[accept]
            np.add.at(out, pi[accept], diff[accept] * w[:, None])

        expand = ~accept & ~single
        if not expand.any():
            break
        if depth == len(levels) - 1 or lvl.child_count is None:
            # coincident points at full depth: direct sum over members
            ei, ej = _expand(pi[expand], lvl.start[cell[expand]], count[expand])
            mask = order[ej] != ei
            ei, ej = ei[mask], ej[mask]
            diff = points[ei] - sorted_pts[ej]
            d2 = np.maximum(np.einsum("ij,ij->i", diff, diff), _MIN_D2)
            np.add.at(out, ei, diff / d2[:, None])
            break
        pi, cell = _expand(pi[expand], lvl.child_start[cell[expand]], lvl.child_count[cell[expand]])
    return out


def exact_repulsion(points: np.ndarray) -> np.ndarray:
    points = np.asarray(points, dtype=np.float64)
    diff = points[:, None, :] - points[None, :, :]
    d2 = np.einsum("ijk,ijk->ij", diff, diff)
    np.fill_diagonal(d2, np.inf)
    d2 = np.maximum(d2, _MIN_D2)
    return np.einsum("ijk,ij->ik", diff, 1.0 / d2)
