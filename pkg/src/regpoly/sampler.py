"""Uniform sampling of ordered isosceles triples.

Edges are grouped into buckets ``e(p, l)``: all edges of (nearly) equal
length ``l`` leaving apex ``p``. Picking a bucket with probability
proportional to C(|b|, 2), then an ordered pair of distinct edges inside it,
gives every ordered triple the same probability 1/|I|.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List

import numpy as np

from .errors import NoIsosceles
from .geometry import Tolerances, as_coords


@dataclass(frozen=True)
class Bucket:
    apex: int
    len_key: int
    length: float
    edges: tuple


class BucketIndex:
    """Flat-array storage for the bucket set B."""

    def __init__(self, apex, length, start, size, members, tol_len):
        self.apex = apex
        self.length = length
        self.start = start
        self.size = size
        self.members = members
        self.tol_len = tol_len
        pairs = size * (size - 1) // 2
        self.cum_weights = np.cumsum(pairs)
        self.total_pairs = int(self.cum_weights[-1]) if len(pairs) else 0
        self._alias = None

    def __len__(self):
        return len(self.apex)

    @property
    def buckets(self) -> List[Bucket]:
        return [self.bucket(i) for i in range(len(self))]

    def bucket(self, i: int) -> Bucket:
        s, m = self.start[i], self.size[i]
        return Bucket(
            apex=int(self.apex[i]),
            len_key=int(round(self.length[i] / self.tol_len)),
            length=float(self.length[i]),
            edges=tuple(int(v) for v in self.members[s:s + m]),
        )

    def alias_table(self):
        if self._alias is None:
            self._alias = AliasTable(self.size * (self.size - 1) // 2)
        return self._alias


def build_buckets(points, tol: Tolerances, chunk_rows: int | None = None) -> BucketIndex:
    """Group every directed edge by (apex, length) and drop singleton buckets.

    Per apex the distances are sorted and neighbours closer than ``tol_len``
    are chained into one bucket, which handles lengths that would straddle a
    rounding boundary.
    """
    xy = as_coords(points)
    n = len(xy)
    if n < 3:
        raise ValueError("need at least 3 points")
    if chunk_rows is None:
        chunk_rows = max(1, 2_000_000 // n)
    apex_parts, len_parts, size_parts, member_parts = [], [], [], []
    for r0 in range(0, n, chunk_rows):
        r1 = min(n, r0 + chunk_rows)
        rows = np.arange(r0, r1)
        d = np.hypot(xy[r0:r1, None, 0] - xy[None, :, 0], xy[r0:r1, None, 1] - xy[None, :, 1])
        d[rows - r0, rows] = np.inf
        order = np.argsort(d, axis=1, kind="stable")[:, : n - 1]
        ds = np.take_along_axis(d, order, axis=1)
        new = np.ones(ds.shape, dtype=bool)
        new[:, 1:] = np.diff(ds, axis=1) > tol.tol_len
        flat_new = new.ravel()
        gid = np.cumsum(flat_new) - 1
        sizes = np.bincount(gid)
        starts = np.flatnonzero(flat_new)
        keep = np.flatnonzero(sizes >= 2)
        if len(keep) == 0:
            continue
        ks = starts[keep]
        apex_parts.append(rows[ks // (n - 1)])
        len_parts.append(ds.ravel()[ks])
        size_parts.append(sizes[keep])
        in_kept = (sizes >= 2)[gid]
        member_parts.append(order.ravel()[in_kept])
    if not apex_parts:
        raise NoIsosceles("no two edges of equal length share an endpoint")
    size = np.concatenate(size_parts).astype(np.int64)
    start = np.concatenate(([0], np.cumsum(size)[:-1])).astype(np.int64)
    return BucketIndex(
        apex=np.concatenate(apex_parts).astype(np.int64),
        length=np.concatenate(len_parts),
        start=start,
        size=size,
        members=np.concatenate(member_parts).astype(np.int64),
        tol_len=tol.tol_len,
    )


def count_isosceles_triples(index: BucketIndex) -> int:
    return 2 * index.total_pairs


def _ordered_pair(i_flat, m):
    # index in [0, m(m-1)) -> ordered pair of distinct positions
    i = i_flat // (m - 1)
    j = i_flat % (m - 1)
    j = j + (j >= i)
    return i, j


class AliasTable:
    """Vose alias method over integer weights: O(1) per draw."""

    def __init__(self, weights):
        w = np.asarray(weights, dtype=float)
        n = len(w)
        scaled = w * n / w.sum()
        self.prob = np.ones(n)
        self.alias = np.arange(n)
        small = [i for i in range(n) if scaled[i] < 1.0]
        large = [i for i in range(n) if scaled[i] >= 1.0]
        while small and large:
            s, g = small.pop(), large.pop()
            self.prob[s] = scaled[s]
            self.alias[s] = g
            scaled[g] = scaled[g] + scaled[s] - 1.0
            (small if scaled[g] < 1.0 else large).append(g)

    def draw(self, rng, size):
        i = rng.integers(len(self.prob), size=size)
        flip = rng.random(size) >= self.prob[i]
        return np.where(flip, self.alias[i], i)


def _pick_buckets(index, rng, size, method):
    if method == "alias":
        return index.alias_table().draw(rng, size)
    if method != "prefix":
        raise ValueError("unknown method %r" % (method,))
    u = rng.integers(index.total_pairs, size=size)
    return np.searchsorted(index.cum_weights, u, side="right")


def sample_triples(index: BucketIndex, rng, size: int, method: str = "prefix") -> np.ndarray:
    """``size`` independent uniform ordered triples as an ``(size, 3)`` array."""
    if index.total_pairs == 0:
        raise NoIsosceles("empty bucket index")
    b = _pick_buckets(index, rng, size, method)
    m = index.size[b]
    i, j = _ordered_pair(rng.integers(m * (m - 1)), m)
    s = index.start[b]
    return np.column_stack((index.apex[b], index.members[s + i], index.members[s + j]))


def sample_triple(index: BucketIndex, rng, method: str = "prefix") -> tuple:
    p, q, r = sample_triples(index, rng, 1, method)[0]
    return int(p), int(q), int(r)


def sample_triple_counts(index: BucketIndex, rng, n_draws: int):
    """Outcome of ``n_draws`` independent draws, aggregated.

    Returns the distinct ordered triples hit and how often each was hit. The
    joint law equals that of drawing one at a time, but the cost is
    O(|B| + sum over buckets of min(hits, pairs in bucket)), which matters when
    n_draws far exceeds the number of triples.
    """
    if index.total_pairs == 0:
        raise NoIsosceles("empty bucket index")
    weights = (index.size * (index.size - 1) // 2) / index.total_pairs
    hits = rng.multinomial(n_draws, weights)
    npairs = index.size * (index.size - 1)
    out_b, out_i, out_j, out_c = [], [], [], []

    sparse = np.flatnonzero((hits > 0) & (hits < npairs))
    if len(sparse):
        b = np.repeat(sparse, hits[sparse])
        m = index.size[b]
        base = int(npairs.max())
        codes, cnt = np.unique(b * base + rng.integers(m * (m - 1)), return_counts=True)
        bb = codes // base
        i, j = _ordered_pair(codes % base, index.size[bb])
        out_b.append(bb), out_i.append(i), out_j.append(j), out_c.append(cnt)

    dense = np.flatnonzero(hits >= npairs)
    for M in np.unique(npairs[dense]):
        grp = dense[npairs[dense] == M]
        counts = rng.multinomial(hits[grp], np.full(M, 1.0 / M))
        gi, fi = np.nonzero(counts)
        bb = grp[gi]
        i, j = _ordered_pair(fi, index.size[bb])
        out_b.append(bb), out_i.append(i), out_j.append(j), out_c.append(counts[gi, fi])

    b = np.concatenate(out_b)
    i = np.concatenate(out_i)
    j = np.concatenate(out_j)
    c = np.concatenate(out_c).astype(np.int64)
    s = index.start[b]
    triples = np.column_stack((index.apex[b], index.members[s + i], index.members[s + j]))
    order = np.lexsort((triples[:, 2], triples[:, 1], triples[:, 0]))
    return triples[order], c[order]


def frequency_table(index: BucketIndex, universe, rng, draws: int, chunk: int = 1_000_000):
    """Draw ``draws`` triples and count hits on each triple of ``universe``.

    Returns ``(counts, stray)`` where ``stray`` counts draws outside the
    universe (should be zero when the universe is the full triple set).
    """
    universe = np.asarray(universe, dtype=np.int64).reshape(-1, 3)
    n = int(max(universe.max(), index.apex.max(), index.members.max())) + 1 if len(universe) else 1
    codes = (universe[:, 0] * n + universe[:, 1]) * n + universe[:, 2]
    order = np.argsort(codes)
    sorted_codes = codes[order]
    counts = np.zeros(len(universe), dtype=np.int64)
    stray = 0
    left = draws
    while left > 0:
        m = min(chunk, left)
        t = sample_triples(index, rng, m)
        c = (t[:, 0] * n + t[:, 1]) * n + t[:, 2]
        pos = np.clip(np.searchsorted(sorted_codes, c), 0, len(sorted_codes) - 1)
        ok = sorted_codes[pos] == c
        stray += int((~ok).sum())
        np.add.at(counts, order[pos[ok]], 1)
        left -= m
    return counts, stray
