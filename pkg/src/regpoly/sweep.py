"""Left-to-right sweep for regular k-gons with k <= k_cut.

Vertices are visited in lexicographic (x, y) order. A regular polygon's
boundary splits at its lexicographically smallest and largest vertices into
two monotone chains. The smallest vertex starts a pair of signals, one per
chain; each chain vertex forwards its signal along the next polygon edge; the
largest vertex receives both and reports the polygon.

Every signal carries its candidate centre, fixed at origination, so two
chains only meet if they came from the same start. Finding "the incident edge
of the same length at angle phi_k" is a lookup of the rotated endpoint in the
point index, which is the per-vertex edge hash keyed by direction and length.
"""

from __future__ import annotations

import enum
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .geometry import (
    TWO_PI,
    Tolerances,
    as_coords,
    build_point_index,
    interior_angle,
    make_polygon,
)


class Side(enum.Enum):
    BELOW = "below"  # carried by the upper chain; the polygon lies below it
    ABOVE = "above"  # carried by the lower chain


class Signal(NamedTuple):
    k: int
    side: Side
    center_key: tuple
    edge_len_key: int
    center: tuple
    length: float


@dataclass
class SweepStats:
    originations: int = 0
    propagations: int = 0
    terminations: int = 0
    discards: int = 0
    signals: int = 0
    max_pending: int = 0
    pending_at_end: int = 0
    events: list = field(default_factory=list)


def _pairs_by_source(n, target=1_000_000):
    """Yield (src, dst) rank arrays covering every i < j, in chunks."""
    i0 = 0
    while i0 < n - 1:
        i1 = i0
        total = 0
        while i1 < n - 1 and total < target:
            total += n - 1 - i1
            i1 += 1
        rows = np.arange(i0, i1)
        counts = n - 1 - rows
        src = np.repeat(rows, counts)
        first = np.repeat(np.cumsum(counts) - counts, counts)
        dst = np.arange(len(src)) - first + src + 1
        yield src, dst
        i0 = i1


def originations(xy, order, rank, index, k_cut, tol):
    """All origination events, sorted by sweep position.

    Returns an int array of rows (rank_v, k, a, b): the right edges v->a and
    v->b have equal length and a CCW angle of phi_k from v->a to v->b, so a
    is the next vertex counterclockwise (lower chain) and b the next clockwise
    (upper chain).
    """
    rows = []
    ranked = xy[order]
    for src, dst in _pairs_by_source(len(xy)):
        v = ranked[src]
        e = ranked[dst] - v
        for k in range(3, k_cut + 1):
            phi = interior_angle(k)
            c, s = math.cos(phi), math.sin(phi)
            bp = v + np.column_stack((c * e[:, 0] - s * e[:, 1], s * e[:, 0] + c * e[:, 1]))
            b = index.query_many(bp)
            hit = np.flatnonzero(b >= 0)
            if len(hit) == 0:
                continue
            hit = hit[rank[b[hit]] > src[hit]]
            if len(hit):
                rows.append(np.column_stack((src[hit], np.full(len(hit), k), order[dst[hit]], b[hit])))
    if not rows:
        return np.zeros((0, 4), dtype=np.int64)
    out = np.concatenate(rows)
    return out[np.lexsort((rank[out[:, 2]], out[:, 1], out[:, 0]))]


def detect_small_gons(points, k_cut: int, tol: Tolerances, stats: SweepStats | None = None,
                      trace: bool = False) -> list:
    """Every regular k-gon with 3 <= k <= k_cut whose vertices are input points."""
    if k_cut < 3:
        raise ValueError("k_cut must be >= 3")
    xy = as_coords(points)
    index = build_point_index(xy, tol)
    if stats is None:
        stats = SweepStats()
    n = len(xy)
    if n < 3:
        return []
    k_cut = min(k_cut, n)
    order = np.lexsort((xy[:, 1], xy[:, 0]))
    rank = np.empty(n, dtype=np.int64)
    rank[order] = np.arange(n)
    starts = originations(xy, order, rank, index, k_cut, tol)
    start_pos = np.searchsorted(starts[:, 0], np.arange(n + 1))

    rot = {k: (math.cos(TWO_PI / k), math.sin(TWO_PI / k)) for k in range(3, k_cut + 1)}
    tp = tol.tol_point

    def turn(pt, center, k, sign):
        c, s = rot[k]
        s *= sign
        dx, dy = pt[0] - center[0], pt[1] - center[1]
        return index.query(center[0] + c * dx - s * dy, center[1] + s * dx + c * dy)

    pending = defaultdict(list)
    found = {}
    live = 0
    for i in range(n):
        v = int(order[i])
        pv = xy[v]
        incoming = pending.pop(v, ())
        props_before = stats.propagations

        # termination: pair up the two chains of the same start
        groups = {}
        for u, sig in incoming:
            groups.setdefault((sig.k, sig.center_key, sig.edge_len_key), {})[sig.side] = (u, sig)
        matched = set()
        for key, sides in groups.items():
            if len(sides) != 2:
                continue
            (u_lo, sig), (u_hi, _) = sides[Side.ABOVE], sides[Side.BELOW]
            k = sig.k
            if turn(pv, sig.center, k, -1) != u_lo or turn(pv, sig.center, k, +1) != u_hi:
                continue
            matched.add(key)
            c, s = math.cos(TWO_PI / k), math.sin(TWO_PI / k)
            ids = [v]
            rel = (pv[0] - sig.center[0], pv[1] - sig.center[1])
            for _ in range(k - 1):
                rel = (c * rel[0] - s * rel[1], s * rel[0] + c * rel[1])
                w = index.query(sig.center[0] + rel[0], sig.center[1] + rel[1])
                if w is None:
                    break
                ids.append(w)
            stats.terminations += 1
            if trace:
                stats.events.append(("terminate", v, k, sig.center_key))
            if len(ids) == k and len(set(ids)) == k:
                g = make_polygon(k, ids, xy)
                found.setdefault(g.key, g)

        # propagation along each unmatched chain
        for u, sig in incoming:
            if (sig.k, sig.center_key, sig.edge_len_key) in matched:
                continue
            w = turn(pv, sig.center, sig.k, 1 if sig.side is Side.ABOVE else -1)
            if w is not None and rank[w] > i:
                pw = xy[w]
                if abs(math.hypot(pw[0] - pv[0], pw[1] - pv[1]) - sig.length) <= tol.tol_len:
                    pending[w].append((v, sig))
                    stats.propagations += 1
                    continue
            stats.discards += 1

        # origination at v as a possible leftmost vertex
        for row in range(start_pos[i], start_pos[i + 1]):
            _, k, a, b = (int(x) for x in starts[row])
            pa = xy[a]
            ex, ey = pa[0] - pv[0], pa[1] - pv[1]
            h = 0.5 / math.tan(math.pi / k)
            center = (0.5 * (pv[0] + pa[0]) - h * ey, 0.5 * (pv[1] + pa[1]) + h * ex)
            length = math.hypot(ex, ey)
            ckey = (math.floor(center[0] / tp), math.floor(center[1] / tp))
            lkey = round(length / tol.tol_len)
            pending[b].append((v, Signal(k, Side.BELOW, ckey, lkey, center, length)))
            pending[a].append((v, Signal(k, Side.ABOVE, ckey, lkey, center, length)))
            stats.originations += 1
            if trace:
                stats.events.append(("originate", v, k, ckey))
        live = live - len(incoming) + stats.propagations - props_before + 2 * (start_pos[i + 1] - start_pos[i])
        stats.max_pending = max(stats.max_pending, int(live))

    stats.signals = 2 * stats.originations + stats.propagations
    stats.pending_at_end = sum(map(len, pending.values()))
    return sorted(found.values(), key=lambda g: g.sort_key())
