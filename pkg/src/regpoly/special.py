"""Lookup of special triangles.

An isosceles triangle inscribed in a regular k-gon whose equal sides skip d
vertices has apex angle pi * (1 - 2d/k). When gcd(d, k) = 1 that angle
belongs to exactly one reduced fraction d/k, so the angle alone names the
polygon size.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .errors import BadK, BadSkip
from .geometry import (
    TWO_PI,
    Tolerances,
    circumcenters,
    max_skip,
)


@dataclass(frozen=True)
class SpecialEntry:
    k: int
    d: int
    angle: float


class SpecialTable:
    def __init__(self, k_max, ks, ds, angles):
        self.k_max = k_max
        self.ks = ks
        self.ds = ds
        self.angles = angles

    def __len__(self):
        return len(self.ks)

    @property
    def entries(self):
        return [SpecialEntry(int(k), int(d), float(a)) for k, d, a in zip(self.ks, self.ds, self.angles)]

    def entries_for(self, k: int):
        return sorted(int(d) for d in self.ds[self.ks == k])


@lru_cache(maxsize=8)
def build_table(k_max: int) -> SpecialTable:
    if k_max < 3:
        raise BadK("k_max must be >= 3, got %r" % (k_max,))
    ks, ds = [], []
    for k in range(3, k_max + 1):
        d = np.arange(1, max_skip(k) + 1)
        d = d[np.gcd(d, k) == 1]
        ks.append(np.full(len(d), k))
        ds.append(d)
    ks = np.concatenate(ks)
    ds = np.concatenate(ds)
    angles = np.pi * (1.0 - 2.0 * ds / ks)
    order = np.argsort(angles, kind="stable")
    return SpecialTable(k_max, ks[order], ds[order], angles[order])


def is_special(k: int, d: int) -> bool:
    if k < 3:
        raise BadK("k must be >= 3, got %r" % (k,))
    if not 1 <= d <= max_skip(k):
        raise BadSkip("skip %r out of range for k=%d" % (d, k))
    return math.gcd(d, k) == 1


def min_angle_gap(table: SpecialTable) -> float:
    if len(table) < 2:
        return math.inf
    return float(np.diff(table.angles).min())


def effective_tol_angle(table: SpecialTable, tol_angle: float) -> float:
    """``tol_angle`` capped at a quarter of the table's smallest angle gap."""
    gap = min_angle_gap(table)
    if tol_angle >= gap / 4:
        warnings.warn(
            "tol_angle %.3g exceeds a quarter of the angle gap %.3g for k_max=%d; capping"
            % (tol_angle, gap, table.k_max),
            stacklevel=2,
        )
        return gap / 4
    return tol_angle


def dump_table(table: SpecialTable, path) -> None:
    with open(path, "w") as f:
        f.write("# regpoly special-table v1: k d angle\n")
        for k, d, a in zip(table.ks, table.ds, table.angles):
            f.write("%d %d %.17g\n" % (k, d, a))


@dataclass(frozen=True)
class CandidateGon:
    k: int
    d: int
    center: tuple
    radius: float
    phase: float
    seed_ids: tuple
    apex_index: int


DEGENERATE, NONSPECIAL, CANDIDATE = 0, 1, 2


@dataclass
class Classified:
    """Column-wise classification of a batch of triples."""

    status: np.ndarray
    k: np.ndarray
    d: np.ndarray
    center: np.ndarray
    radius: np.ndarray
    phase: np.ndarray
    apex_index: np.ndarray


def classify_triangles(coords: np.ndarray, triples: np.ndarray, table: SpecialTable,
                       tol: Tolerances, k_min: int = 3, k_max: Optional[int] = None) -> Classified:
    """Vectorised :func:`classify_triangle` over an ``(m, 3)`` array of ids.

    Matches with k outside ``[k_min, k_max]`` are reported as non-special.
    """
    triples = np.asarray(triples, dtype=np.int64).reshape(-1, 3)
    m = len(triples)
    p, q, r = coords[triples[:, 0]], coords[triples[:, 1]], coords[triples[:, 2]]
    status = np.full(m, NONSPECIAL, dtype=np.int8)
    out_k = np.zeros(m, dtype=np.int64)
    out_d = np.zeros(m, dtype=np.int64)
    out_phase = np.zeros(m)
    out_apex = np.zeros(m, dtype=np.int64)

    centers, degenerate = circumcenters(p, q, r)
    status[degenerate] = DEGENERATE
    u, v = q - p, r - p
    lu, lv = np.hypot(u[:, 0], u[:, 1]), np.hypot(v[:, 0], v[:, 1])
    live = ~degenerate & (np.abs(lu - lv) <= tol.tol_len)
    theta = np.arctan2(np.abs(u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0]), (u * v).sum(axis=1))
    rel = p - centers
    radius = np.hypot(rel[:, 0], rel[:, 1])
    apex_ang = np.mod(np.arctan2(rel[:, 1], rel[:, 0]), TWO_PI)

    n_ent = len(table)
    pos = np.searchsorted(table.angles, theta)
    opts = np.clip(np.column_stack((pos - 1, pos, pos + 1)), 0, n_ent - 1)
    diffs = np.abs(table.angles[opts] - theta[:, None])
    rank = np.argsort(diffs, axis=1, kind="stable")
    opts = np.take_along_axis(opts, rank, axis=1)
    diffs = np.take_along_axis(diffs, rank, axis=1)

    unresolved = live.copy()
    for col in range(3):
        rows = np.flatnonzero(unresolved & (diffs[:, col] <= tol.tol_angle))
        if len(rows) == 0:
            continue
        e = opts[rows, col]
        k = table.ks[e]
        d = table.ds[e]
        step = TWO_PI / k
        ph = np.mod(apex_ang[rows], step)
        ja = np.rint((apex_ang[rows] - ph) / step).astype(np.int64) % k
        c = centers[rows]
        rad = radius[rows]
        a_plus = ph + step * (ja + d)
        a_minus = ph + step * (ja - d)
        vp = c + rad[:, None] * np.column_stack((np.cos(a_plus), np.sin(a_plus)))
        vm = c + rad[:, None] * np.column_stack((np.cos(a_minus), np.sin(a_minus)))
        qq, rr = q[rows], r[rows]

        def near(a, b):
            return np.hypot(a[:, 0] - b[:, 0], a[:, 1] - b[:, 1]) <= tol.tol_point

        seeds_ok = (near(qq, vp) & near(rr, vm)) | (near(qq, vm) & near(rr, vp))
        good = rows[seeds_ok]
        status[good] = CANDIDATE
        out_k[good] = k[seeds_ok]
        out_d[good] = d[seeds_ok]
        out_phase[good] = ph[seeds_ok]
        out_apex[good] = ja[seeds_ok]
        unresolved[good] = False

    if k_max is None:
        k_max = table.k_max
    out_of_range = (status == CANDIDATE) & ((out_k < k_min) | (out_k > k_max))
    status[out_of_range] = NONSPECIAL
    return Classified(status, out_k, out_d, centers, radius, out_phase, out_apex)


def classify_triangle(p, q, r, table: SpecialTable, tol: Tolerances, ids=(0, 1, 2)) -> Optional[CandidateGon]:
    """Candidate polygon for the triple with apex ``p``, or None when the
    triple is degenerate, not isosceles at ``p``, or matches no entry."""
    coords = np.array([p, q, r], dtype=float)
    c = classify_triangles(coords, np.array([[0, 1, 2]]), table, tol)
    if c.status[0] != CANDIDATE:
        return None
    return CandidateGon(
        k=int(c.k[0]),
        d=int(c.d[0]),
        center=(float(c.center[0, 0]), float(c.center[0, 1])),
        radius=float(c.radius[0]),
        phase=float(c.phase[0]),
        seed_ids=tuple(int(i) for i in ids),
        apex_index=int(c.apex_index[0]),
    )
