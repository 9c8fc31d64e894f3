"""Timing ladder for the three detection phases."""

from __future__ import annotations

import csv
import io
import math
import time

import numpy as np

from .errors import NoIsosceles
from .geometry import Tolerances
from .large import DetectorParams, default_k_cut, detect_large_gons
from .sampler import build_buckets
from .sweep import SweepStats, detect_small_gons

PHASES = ("buckets", "sweep", "large")
FIELDS = ["n", "phase", "seconds", "k_cut", "polygons", "counter", "value"]


def _best_of(fn, repeat):
    best, out = math.inf, None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def run_ladder(sizes, seed=0, phases=PHASES, k_cut=None, multiplier=8.0, threads=1, repeat=3, log=None):
    """Time each phase on uniform random points for each n; one row per (n, phase)."""
    rows = []
    for n in sizes:
        xy = np.random.default_rng([seed, n]).random((n, 2))
        tol = Tolerances.for_points(xy)
        kc = k_cut if k_cut is not None else default_k_cut(n)
        if "buckets" in phases:
            t, idx = _best_of(lambda: _buckets_or_none(xy, tol), repeat)
            rows.append(dict(n=n, phase="buckets", seconds=t, k_cut=kc, polygons="",
                             counter="buckets", value=0 if idx is None else len(idx)))
        if "sweep" in phases:
            def sweep():
                stats = SweepStats()
                return detect_small_gons(xy, kc, tol, stats), stats

            t, (polys, st) = _best_of(sweep, repeat)
            rows.append(dict(n=n, phase="sweep", seconds=t, k_cut=kc, polygons=len(polys),
                             counter="signals", value=st.signals))
        if "large" in phases:
            params = DetectorParams(k_cut=kc, tol=tol, sample_multiplier=multiplier, seed=seed, threads=threads)
            t, (polys, st) = _best_of(lambda: detect_large_gons(xy, params), repeat)
            rows.append(dict(n=n, phase="large", seconds=t, k_cut=kc, polygons=len(polys),
                             counter="samples", value=st.samples_drawn))
        if log is not None:
            log("n=%d done" % n)
    return rows


def _buckets_or_none(xy, tol):
    try:
        return build_buckets(xy, tol)
    except NoIsosceles:
        return None


def loglog_slope(ns, seconds) -> float:
    x = np.log(np.asarray(ns, dtype=float))
    y = np.log(np.asarray(seconds, dtype=float))
    return float(np.polyfit(x, y, 1)[0])


def slopes(rows):
    out = {}
    for ph in sorted({r["phase"] for r in rows}):
        pts = sorted((r["n"], r["seconds"]) for r in rows if r["phase"] == ph)
        if len(pts) > 1:
            out[ph] = loglog_slope(*zip(*pts))
    return out


def to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=FIELDS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({**r, "seconds": "%.6f" % r["seconds"]})
    return buf.getvalue()
