"""Brute-force ground truth.

Slow on purpose and free of detector code: only the geometry primitives
(point index, canonical polygon description) are shared.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .geometry import (
    TWO_PI,
    Tolerances,
    as_coords,
    bbox_diagonal,
    build_point_index,
    make_polygon,
    max_skip,
)


@dataclass
class OracleReport:
    polygons: list
    counts_by_k: dict = field(default_factory=dict)
    isosceles_triple_count: int = 0


def enumerate_all_gons(points, k_max: int, tol: Tolerances, k_min: int = 3) -> list:
    """Every regular k-gon, k_min <= k <= k_max, whose vertices are all input points.

    Each ordered pair (a, b) is tried as a pair of consecutive counterclockwise
    vertices; that fixes the centre, and the remaining k - 2 vertices are
    rotated copies of ``a`` which are probed one by one (vectorised over pairs).
    """
    xy = as_coords(points)
    index = build_point_index(xy, tol)
    n = len(xy)
    k_max = min(k_max, n)
    if n < 3 or k_max < max(3, k_min):
        return []
    ia, ib = np.nonzero(~np.eye(n, dtype=bool))
    a = xy[ia]
    b = xy[ib]
    mid = 0.5 * (a + b)
    e = b - a
    left = np.column_stack((-e[:, 1], e[:, 0]))
    side = np.hypot(e[:, 0], e[:, 1])
    # every vertex set has diameter >= sqrt(3) * circumradius
    reach = bbox_diagonal(xy) + 2 * tol.tol_point

    found = {}
    for k in range(max(3, k_min), k_max + 1):
        radius = side / (2.0 * math.sin(math.pi / k))
        live = np.flatnonzero(math.sqrt(3.0) * radius <= reach)
        if len(live) == 0:
            continue
        center = mid[live] + left[live] / (2.0 * math.tan(math.pi / k))
        rel = a[live] - center
        ids = [ia[live], ib[live]]
        for j in range(2, k):
            t = TWO_PI * j / k
            c, s = math.cos(t), math.sin(t)
            vj = center + np.column_stack((c * rel[:, 0] - s * rel[:, 1], s * rel[:, 0] + c * rel[:, 1]))
            hit = index.query_many(vj)
            keep = hit >= 0
            live, center, rel = live[keep], center[keep], rel[keep]
            ids = [col[keep] for col in ids] + [hit[keep]]
            if len(live) == 0:
                break
        for row in np.column_stack(ids) if len(live) else ():
            vs = frozenset(int(v) for v in row)
            if len(vs) == k and (k, vs) not in found:
                found[(k, vs)] = make_polygon(k, vs, xy)
    return sorted(found.values(), key=lambda g: g.sort_key())


def enumerate_isosceles(points, tol: Tolerances) -> list:
    """All ordered triples (p, q, r), q != r, with | |pq| - |pr| | <= tol_len."""
    xy = as_coords(points)
    n = len(xy)
    out = []
    if n < 3:
        return out
    diff = xy[:, None, :] - xy[None, :, :]
    dist = np.hypot(diff[..., 0], diff[..., 1])
    for p in range(n):
        row = dist[p]
        close = np.abs(row[:, None] - row[None, :]) <= tol.tol_len
        close[p, :] = False
        close[:, p] = False
        np.fill_diagonal(close, False)
        for q, r in zip(*np.nonzero(close)):
            out.append((p, int(q), int(r)))
    return out


def isosceles_in_gon_count(k: int) -> int:
    """Ordered isosceles triples among the vertices of one regular k-gon.

    Chord length depends only on the skip, so the apex pairs with the two
    vertices at skip d for each d < k/2; an equilateral triple is already
    counted once per apex.
    """
    if k < 3:
        raise ValueError("k must be >= 3")
    return k * max_skip(k) * 2


def oracle_report(points, k_max: int, tol: Tolerances) -> OracleReport:
    polys = enumerate_all_gons(points, k_max, tol)
    counts = Counter(g.k for g in polys)
    return OracleReport(polys, dict(sorted(counts.items())), len(enumerate_isosceles(points, tol)))
