"""Randomised detection of regular k-gons with k >= k_cut.

Draw many uniform isosceles triples, keep the ones whose apex angle names a
coprime skip fraction d/k, and check the single k-gon each of those implies.
Checks probe the missing vertices in random order and stop at the first
miss, so a sparse candidate costs O(1) expected probes.
"""

from __future__ import annotations

import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .errors import NoIsosceles
from .geometry import (
    TWO_PI,
    PointIndex,
    Tolerances,
    as_coords,
    build_point_index,
    canonical_phase,
    make_polygon,
)
from .sampler import build_buckets, sample_triple_counts
from .special import (
    CANDIDATE,
    DEGENERATE,
    CandidateGon,
    build_table,
    classify_triangles,
    effective_tol_angle,
)
from .sweep import SweepStats, detect_small_gons

DEFAULT_ALPHA = 0.068
DEFAULT_MULTIPLIER = 8.0


def default_k_cut(n: int, alpha: float = DEFAULT_ALPHA) -> int:
    return max(3, math.ceil(n ** alpha)) if n > 0 else 3


@dataclass(frozen=True)
class DetectorParams:
    k_cut: int
    tol: Tolerances
    alpha: float = DEFAULT_ALPHA
    sample_multiplier: float = DEFAULT_MULTIPLIER
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        if self.k_cut < 3:
            raise ValueError("k_cut must be >= 3")
        if not self.sample_multiplier > 0:
            raise ValueError("sample multiplier must be positive")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")

    @classmethod
    def for_points(cls, points, k_cut=None, alpha=DEFAULT_ALPHA, tol=None, **kw):
        xy = as_coords(points)
        if tol is None:
            tol = Tolerances.for_points(xy)
        if k_cut is None:
            k_cut = default_k_cut(len(xy), alpha)
        return cls(k_cut=k_cut, tol=tol, alpha=alpha, **kw)


class DedupKey(NamedTuple):
    k: int
    cx: int
    cy: int
    radius: int
    phase: int


def dedup_key(k, center, radius, phase, tol: Tolerances) -> DedupKey:
    q = tol.tol_point
    ph = canonical_phase(phase, k)
    return DedupKey(
        k,
        round(center[0] / q),
        round(center[1] / q),
        round(radius / q),
        round(ph * radius / q),
    )


@dataclass
class RunStats:
    samples_drawn: int = 0
    triples_degenerate: int = 0
    triples_nonspecial: int = 0
    candidates_tried: int = 0
    verifications_full: int = 0
    verifications_early_exit: int = 0
    probes_on_failure: int = 0
    distinct_triples: int = 0

    @property
    def mean_probes_on_failure(self) -> float:
        if self.verifications_early_exit == 0:
            return 0.0
        return self.probes_on_failure / self.verifications_early_exit

    def as_dict(self):
        d = {k: getattr(self, k) for k in self.__dataclass_fields__}
        d["mean_probes_on_failure"] = self.mean_probes_on_failure
        return d


def num_samples(n: int, c: float) -> int:
    """ceil(c * n^2 * ln(n)^2), at least 1."""
    if n < 3:
        raise ValueError("n must be >= 3")
    if not c > 0:
        raise ValueError("c must be positive")
    return max(1, math.ceil(c * n * n * math.log(n) ** 2))


@dataclass
class Verification:
    polygon: Optional[object]
    probes: int

    @property
    def full(self) -> bool:
        return self.polygon is not None


def verify_candidate(cand: CandidateGon, index: PointIndex, rng) -> Verification:
    """Probe the k - 3 unconfirmed vertices in uniformly random order and stop
    at the first one missing."""
    k = cand.k
    seeds = {cand.apex_index % k, (cand.apex_index + cand.d) % k, (cand.apex_index - cand.d) % k}
    rest = np.array([j for j in range(k) if j not in seeds], dtype=np.int64)
    rest = rest[rng.permutation(len(rest))]
    cx, cy = cand.center
    step = TWO_PI / k
    found = list(cand.seed_ids)
    for probes, j in enumerate(rest, start=1):
        a = cand.phase + step * j
        w = index.query(cx + cand.radius * math.cos(a), cy + cand.radius * math.sin(a))
        if w is None:
            return Verification(None, probes)
        found.append(w)
    if len(set(found)) != k:
        return Verification(None, len(rest))
    return Verification(make_polygon(k, found, index.coords), len(rest))


class _Memo:
    """Check-and-insert set of DedupKeys shared between workers."""

    def __init__(self):
        self._seen = set()
        self._lock = threading.Lock()

    def claim(self, key) -> bool:
        with self._lock:
            if key in self._seen:
                return False
            self._seen.add(key)
            return True


def _run_worker(xy, index, buckets, table, params, n_draws, rng, memo, k_max):
    stats = RunStats(samples_drawn=n_draws)
    found = {}
    triples, counts = sample_triple_counts(buckets, rng, n_draws)
    stats.distinct_triples = len(triples)
    cls = classify_triangles(xy, triples, table, params.tol, k_min=params.k_cut, k_max=k_max)
    stats.triples_degenerate = int(counts[cls.status == DEGENERATE].sum())
    is_cand = cls.status == CANDIDATE
    stats.candidates_tried = int(counts[is_cand].sum())
    stats.triples_nonspecial = n_draws - stats.triples_degenerate - stats.candidates_tried
    for row in np.flatnonzero(is_cand):
        k = int(cls.k[row])
        center = (float(cls.center[row, 0]), float(cls.center[row, 1]))
        radius = float(cls.radius[row])
        phase = float(cls.phase[row])
        if not memo.claim(dedup_key(k, center, radius, phase, params.tol)):
            continue
        cand = CandidateGon(k, int(cls.d[row]), center, radius, phase,
                            tuple(int(i) for i in triples[row]), int(cls.apex_index[row]))
        res = verify_candidate(cand, index, rng)
        if res.full:
            stats.verifications_full += 1
            found.setdefault(res.polygon.key, res.polygon)
        else:
            stats.verifications_early_exit += 1
            stats.probes_on_failure += res.probes
    return found, stats


def detect_large_gons(points, params: DetectorParams):
    """Regular k-gons with k >= k_cut, found by special-triangle sampling.

    Always sound (every output is verified vertex by vertex); complete with a
    probability that grows with ``params.sample_multiplier``. Returns
    ``(polygons, RunStats)``.
    """
    xy = as_coords(points)
    n = len(xy)
    index = build_point_index(xy, params.tol)
    stats = RunStats()
    if n < 3 or params.k_cut > n:
        return [], stats
    try:
        buckets = build_buckets(xy, params.tol)
    except NoIsosceles:
        return [], stats
    table = build_table(n)
    tol = params.tol
    tol_angle = effective_tol_angle(table, tol.tol_angle)
    if tol_angle != tol.tol_angle:
        tol = Tolerances(tol.tol_point, tol.tol_len, tol_angle)
        params = DetectorParams(params.k_cut, tol, params.alpha, params.sample_multiplier, params.seed, params.threads)
    total = num_samples(n, params.sample_multiplier)
    memo = _Memo()
    if params.threads == 1:
        results = [_run_worker(xy, index, buckets, table, params, total, np.random.default_rng(params.seed), memo, n)]
    else:
        streams = [np.random.default_rng(s) for s in np.random.SeedSequence(params.seed).spawn(params.threads)]
        shares = [total // params.threads + (w < total % params.threads) for w in range(params.threads)]
        with ThreadPoolExecutor(params.threads) as pool:
            results = list(pool.map(
                lambda w: _run_worker(xy, index, buckets, table, params, shares[w], streams[w], memo, n),
                range(params.threads)))
    found = {}
    for part, st in results:
        found.update(part)
        for name in ("samples_drawn", "triples_degenerate", "triples_nonspecial", "candidates_tried",
                     "verifications_full", "verifications_early_exit", "probes_on_failure",
                     "distinct_triples"):
            setattr(stats, name, getattr(stats, name) + getattr(st, name))
    return sorted(found.values(), key=lambda g: g.sort_key()), stats


@dataclass
class Detection:
    polygons: list
    sources: dict = field(default_factory=dict)
    sweep_stats: SweepStats = field(default_factory=SweepStats)
    run_stats: RunStats = field(default_factory=RunStats)


def detect(points, params: DetectorParams) -> Detection:
    """Sweep for k <= k_cut, sampling for k >= k_cut, merged by vertex set."""
    sweep_stats = SweepStats()
    small = detect_small_gons(points, params.k_cut, params.tol, sweep_stats)
    large, run_stats = detect_large_gons(points, params)
    merged = {}
    sources = {}
    for g in small:
        merged[g.key] = g
        sources[g.key] = "sweep"
    for g in large:
        if g.key not in merged:
            merged[g.key] = g
            sources[g.key] = "sampler"
    polys = sorted(merged.values(), key=lambda g: g.sort_key())
    return Detection(polys, sources, sweep_stats, run_stats)


def detect_all(points, params: DetectorParams) -> list:
    return detect(points, params).polygons
