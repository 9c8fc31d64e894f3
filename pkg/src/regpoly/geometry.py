"""Planar primitives with tolerance-based equality.

Coordinates are plain floats, so every equality test is a proximity test.
Points are handled as an ``(n, 2)`` float array whose row index is the
point id; :class:`Point` exists for callers that prefer records.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .errors import BadK, BadSkip, Collinear, DuplicatePoints

TWO_PI = 2.0 * math.pi

# |signed area| below this times (max side)^2 counts as collinear
COLLINEAR_EPS = 1e-12

# angles this close below 2*pi are snapped to 0 when picking a canonical vertex
_PHASE_SNAP = 1e-9

_NEIGHBOURS = [(dx, dy) for dx in (-1, 0, 1) for dy in (-1, 0, 1)]


class Point(NamedTuple):
    x: float
    y: float
    id: int


@dataclass(frozen=True)
class Tolerances:
    tol_point: float
    tol_len: float
    tol_angle: float = 1e-9

    def __post_init__(self):
        for name in ("tol_point", "tol_len", "tol_angle"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ValueError("%s must be positive, got %r" % (name, v))

    @classmethod
    def for_points(cls, points, tol_point=None, tol_len=None, tol_angle=None):
        """Defaults scaled to the bounding box: tol_point = 1e-7 * diagonal,
        tol_len = 2 * tol_point."""
        xy = as_coords(points)
        if len(xy):
            span = xy.max(axis=0) - xy.min(axis=0)
            diag = float(math.hypot(span[0], span[1]))
        else:
            diag = 0.0
        if diag == 0.0:
            diag = 1.0
        if tol_point is None:
            tol_point = 1e-7 * diag
        if tol_len is None:
            tol_len = 2.0 * tol_point
        if tol_angle is None:
            tol_angle = 1e-9
        return cls(float(tol_point), float(tol_len), float(tol_angle))


def as_coords(points) -> np.ndarray:
    """Return points as a float ``(n, 2)`` array; accepts arrays, tuples or Points."""
    if isinstance(points, np.ndarray):
        xy = np.asarray(points, dtype=float)
    else:
        xy = np.array([(p[0], p[1]) for p in points], dtype=float)
    if xy.size == 0:
        return np.zeros((0, 2))
    if xy.ndim != 2 or xy.shape[1] != 2:
        raise ValueError("points must have shape (n, 2)")
    if not np.isfinite(xy).all():
        raise ValueError("coordinates must be finite")
    return xy


def bbox_diagonal(xy: np.ndarray) -> float:
    if len(xy) == 0:
        return 0.0
    span = xy.max(axis=0) - xy.min(axis=0)
    return float(math.hypot(span[0], span[1]))


class PointIndex:
    """Uniform grid with cell size ``tol_point``.

    Inputs are at least ``2 * tol_point`` apart, so a cell holds at most one
    point and a lookup scans the 3x3 block around the query cell.
    """

    def __init__(self, coords: np.ndarray, tol_point: float):
        self.coords = coords
        self.tol = float(tol_point)
        n = len(coords)
        if n:
            self.origin = coords.min(axis=0)
            hi = coords.max(axis=0)
        else:
            self.origin = np.zeros(2)
            hi = np.zeros(2)
        ncell = np.floor((hi - self.origin) / self.tol).astype(np.int64) + 1
        if ncell.max() > 2_000_000_000:
            raise ValueError("tol_point too small for the coordinate range")
        self.width = int(ncell[1]) + 2
        self.height = int(ncell[0]) + 2
        cells = self._cells(coords)
        self.cells = {(int(cx), int(cy)): i for i, (cx, cy) in enumerate(cells)}
        keys = cells[:, 0] * self.width + cells[:, 1]
        order = np.argsort(keys, kind="stable")
        self._keys = keys[order]
        self._ids = order.astype(np.int64)

    def __len__(self):
        return len(self.coords)

    def _cells(self, xy):
        return np.floor((np.asarray(xy, dtype=float) - self.origin) / self.tol).astype(np.int64)

    def query(self, x: float, y: float) -> Optional[int]:
        cx = math.floor((x - self.origin[0]) / self.tol)
        cy = math.floor((y - self.origin[1]) / self.tol)
        best = None
        best_d = self.tol
        for dx, dy in _NEIGHBOURS:
            i = self.cells.get((cx + dx, cy + dy))
            if i is None:
                continue
            p = self.coords[i]
            d = math.hypot(p[0] - x, p[1] - y)
            if d <= best_d:
                best, best_d = i, d
        return best

    def query_many(self, xy) -> np.ndarray:
        """Vectorised :meth:`query`; returns ids with -1 for misses."""
        xy = np.asarray(xy, dtype=float).reshape(-1, 2)
        m = len(xy)
        out = np.full(m, -1, dtype=np.int64)
        if m == 0 or len(self.coords) == 0:
            return out
        best_d = np.full(m, self.tol)
        with np.errstate(invalid="ignore", over="ignore"):
            c = np.floor((xy - self.origin) / self.tol)
        ok = (c[:, 0] >= -1) & (c[:, 0] <= self.height) & (c[:, 1] >= -1) & (c[:, 1] <= self.width)
        if not ok.any():
            return out
        sel = np.flatnonzero(ok)
        c = c[sel].astype(np.int64)
        q = xy[sel]
        nkeys = len(self._keys)
        for dx, dy in _NEIGHBOURS:
            cy = c[:, 1] + dy
            key = (c[:, 0] + dx) * self.width + cy
            pos = np.searchsorted(self._keys, key)
            pos[pos == nkeys] = nkeys - 1
            hit = (self._keys[pos] == key) & (cy >= 0) & (cy < self.width)
            if not hit.any():
                continue
            h = np.flatnonzero(hit)
            ids = self._ids[pos[h]]
            d = np.hypot(self.coords[ids, 0] - q[h, 0], self.coords[ids, 1] - q[h, 1])
            rows = sel[h]
            better = d <= best_d[rows]
            out[rows[better]] = ids[better]
            best_d[rows[better]] = d[better]
        return out


def build_point_index(points, tol: Tolerances) -> PointIndex:
    xy = as_coords(points)
    if len(xy) > 1:
        pairs = cKDTree(xy).query_pairs(2.0 * tol.tol_point, output_type="ndarray")
        if len(pairs):
            a, b = sorted(map(tuple, np.sort(pairs, axis=1)))[0]
            raise DuplicatePoints(int(a), int(b))
    return PointIndex(xy, tol.tol_point)


def query_point(index: PointIndex, loc) -> Optional[int]:
    return index.query(float(loc[0]), float(loc[1]))


def circumcenter(p, q, r) -> tuple:
    px, py = float(p[0]), float(p[1])
    bx, by = q[0] - px, q[1] - py
    cx, cy = r[0] - px, r[1] - py
    cross = bx * cy - by * cx
    scale = max(bx * bx + by * by, cx * cx + cy * cy, (bx - cx) ** 2 + (by - cy) ** 2)
    if scale == 0.0 or abs(cross) / 2.0 < COLLINEAR_EPS * scale:
        raise Collinear("points are collinear")
    b2 = bx * bx + by * by
    c2 = cx * cx + cy * cy
    d = 2.0 * cross
    return (px + (cy * b2 - by * c2) / d, py + (bx * c2 - cx * b2) / d)


def circumcenters(p: np.ndarray, q: np.ndarray, r: np.ndarray):
    """Vectorised :func:`circumcenter`; returns ``(centers, degenerate_mask)``."""
    b = q - p
    c = r - p
    cross = b[:, 0] * c[:, 1] - b[:, 1] * c[:, 0]
    b2 = (b * b).sum(axis=1)
    c2 = (c * c).sum(axis=1)
    bc2 = ((b - c) ** 2).sum(axis=1)
    scale = np.maximum(np.maximum(b2, c2), bc2)
    degenerate = (scale == 0.0) | (np.abs(cross) / 2.0 < COLLINEAR_EPS * scale)
    d = np.where(degenerate, 1.0, 2.0 * cross)
    centers = np.empty_like(p)
    centers[:, 0] = p[:, 0] + (c[:, 1] * b2 - b[:, 1] * c2) / d
    centers[:, 1] = p[:, 1] + (b[:, 0] * c2 - c[:, 0] * b2) / d
    return centers, degenerate


def interior_angle(k: int) -> float:
    if k < 3:
        raise BadK("k must be >= 3, got %r" % (k,))
    return math.pi - TWO_PI / k


def max_skip(k: int) -> int:
    """Largest skip d with a proper (non-degenerate) apex angle: ceil(k/2) - 1."""
    return (k + 1) // 2 - 1


def apex_angle(k: int, d: int) -> float:
    """Apex angle of the isosceles triangle whose equal sides skip ``d`` vertices
    of a regular k-gon (inscribed angle theorem)."""
    if k < 3:
        raise BadK("k must be >= 3, got %r" % (k,))
    if not 1 <= d <= max_skip(k):
        raise BadSkip("skip %r out of range for k=%d" % (d, k))
    return math.pi * (1.0 - 2.0 * d / k)


def polygon_vertex(center, radius: float, phase: float, k: int, j: int) -> tuple:
    a = phase + TWO_PI * j / k
    return (center[0] + radius * math.cos(a), center[1] + radius * math.sin(a))


def polygon_vertices(center, radius: float, phase: float, k: int) -> np.ndarray:
    a = phase + TWO_PI * np.arange(k) / k
    return np.column_stack((center[0] + radius * np.cos(a), center[1] + radius * np.sin(a)))


def canonical_phase(phase: float, k: int) -> float:
    step = TWO_PI / k
    ph = math.fmod(phase, step)
    if ph < 0:
        ph += step
    if ph >= step - _PHASE_SNAP * step:
        ph = 0.0
    return ph


@dataclass(frozen=True, eq=False)
class RegularPolygon:
    k: int
    center: tuple
    radius: float
    phase: float
    vertex_ids: tuple

    @property
    def key(self):
        return (self.k, self.vertex_ids)

    def __eq__(self, other):
        if not isinstance(other, RegularPolygon):
            return NotImplemented
        return self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def sort_key(self):
        return (self.k, self.center[0], self.center[1], self.vertex_ids)

    def vertices(self) -> np.ndarray:
        return polygon_vertices(self.center, self.radius, self.phase, self.k)

    def check(self, coords: np.ndarray, tol_point: float) -> bool:
        """True when the stored description satisfies the polygon invariants."""
        if self.k < 3 or len(self.vertex_ids) != self.k or len(set(self.vertex_ids)) != self.k:
            return False
        if not (self.radius > 0 and 0 <= self.phase < TWO_PI / self.k):
            return False
        d = np.hypot(*(coords[list(self.vertex_ids)] - self.vertices()).T)
        return bool((d <= tol_point).all())


def make_polygon(k: int, ids: Sequence[int], coords: np.ndarray) -> RegularPolygon:
    """Canonical description of the regular k-gon on the given vertex ids.

    A pure function of the id set, so every detector that finds the same
    vertices reports bit-identical descriptions.
    """
    ids = sorted(int(i) for i in ids)
    if len(ids) != k:
        raise ValueError("expected %d vertex ids, got %d" % (k, len(ids)))
    pts = coords[ids]
    center = pts.mean(axis=0)
    rel = pts - center
    radius = float(np.hypot(rel[:, 0], rel[:, 1]).mean())
    ang = np.mod(np.arctan2(rel[:, 1], rel[:, 0]), TWO_PI)
    ang[ang >= TWO_PI - _PHASE_SNAP] -= TWO_PI
    order = np.argsort(ang, kind="stable")
    phase = canonical_phase(max(float(ang[order[0]]), 0.0), k)
    return RegularPolygon(
        k=k,
        center=(float(center[0]), float(center[1])),
        radius=radius,
        phase=phase,
        vertex_ids=tuple(ids[i] for i in order),
    )


def rotate_about(pts: np.ndarray, center, angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    rel = np.asarray(pts, dtype=float) - center
    out = np.empty_like(rel)
    out[..., 0] = center[0] + c * rel[..., 0] - s * rel[..., 1]
    out[..., 1] = center[1] + s * rel[..., 0] + c * rel[..., 1]
    return out
