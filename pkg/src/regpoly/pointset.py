"""Point files, synthetic instances and result serialisation.

Point file: one ``x y`` pair per line, ``#`` starts a comment. Coordinates
are written with ``repr`` so a load/save round trip is bit-exact. Result
text uses 10 significant digits for stable diffs.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from .errors import DuplicatePoints, InfeasibleSpec, ParseError
from .geometry import (
    RegularPolygon,
    Tolerances,
    as_coords,
    build_point_index,
    canonical_phase,
    make_polygon,
    polygon_vertices,
)

POINTS_HEADER = "# regpoly points v1"
RESULTS_HEADER = "# regpoly results v1: k cx cy r phase ids..."
RESULTS_FORMAT = "regpoly-results"
FORMAT_VERSION = 1
SOURCES = ("sweep", "sampler", "oracle")


@dataclass
class Instance:
    points: np.ndarray
    ground_truth: Optional[List[RegularPolygon]] = None
    meta: dict = field(default_factory=dict)

    @property
    def n(self):
        return len(self.points)


@dataclass
class ResultRecord:
    polygon: RegularPolygon
    source: str = "sweep"
    attachments: dict = field(default_factory=dict)


def parse_points(text: str, tol_point: Optional[float] = None) -> Instance:
    coords, lines = [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(lineno, raw)
        try:
            x, y = float(parts[0]), float(parts[1])
        except ValueError:
            raise ParseError(lineno, raw) from None
        if not (math.isfinite(x) and math.isfinite(y)):
            raise ParseError(lineno, raw)
        coords.append((x, y))
        lines.append(lineno)
    xy = np.array(coords, dtype=float).reshape(-1, 2)
    tol = Tolerances.for_points(xy, tol_point=tol_point)
    try:
        build_point_index(xy, tol)
    except DuplicatePoints as e:
        raise DuplicatePoints(e.id_a, e.id_b, (lines[e.id_a], lines[e.id_b])) from None
    return Instance(xy, None, {})


def load_points(path, tol_point: Optional[float] = None) -> Instance:
    inst = parse_points(Path(path).read_text(), tol_point)
    inst.meta["name"] = Path(path).stem
    return inst


def format_points(points, comment: Optional[str] = None) -> str:
    out = [POINTS_HEADER]
    if comment:
        out.extend("# " + line for line in comment.splitlines())
    out.extend("%r %r" % (float(x), float(y)) for x, y in as_coords(points))
    return "\n".join(out) + "\n"


def save_points(points, path, comment: Optional[str] = None) -> None:
    Path(path).write_text(format_points(points, comment))


@dataclass
class GenSpec:
    """Synthetic instance: embedded regular polygons plus uniform noise.

    ``embedded`` holds ``(k, (cx, cy), radius, phase)`` tuples. Each polygon
    loses ``round(drop_fraction * k)`` random vertices.
    """

    n_noise: int = 0
    embedded: Sequence = ()
    drop_fraction: float = 0.0
    seed: int = 0
    box: Optional[Sequence[float]] = None  # xmin, ymin, xmax, ymax for noise
    max_tries: int = 1000

    @classmethod
    def from_dict(cls, d):
        emb = [(int(e[0]), (float(e[1][0]), float(e[1][1])), float(e[2]), float(e[3])) for e in d.get("embedded", ())]
        return cls(int(d.get("n_noise", 0)), emb, float(d.get("drop_fraction", 0.0)), int(d.get("seed", 0)),
                   d.get("box"), int(d.get("max_tries", 1000)))

    def to_dict(self):
        return {
            "n_noise": self.n_noise,
            "embedded": [[k, list(c), r, ph] for k, c, r, ph in self.embedded],
            "drop_fraction": self.drop_fraction,
            "seed": self.seed,
            "box": list(self.box) if self.box is not None else None,
        }


def generate(spec: GenSpec, name: str = "generated") -> Instance:
    rng = np.random.default_rng(spec.seed)
    pts = []
    keep_poly = []
    for k, center, radius, phase in spec.embedded:
        if k < 3 or not radius > 0:
            raise InfeasibleSpec("bad embedded polygon k=%r radius=%r" % (k, radius))
        verts = polygon_vertices(center, radius, phase, k)
        n_drop = int(round(spec.drop_fraction * k))
        dropped = set(rng.choice(k, size=n_drop, replace=False).tolist()) if n_drop else set()
        keep_poly.append(not dropped)
        pts.append([(j, verts[j]) for j in range(k) if j not in dropped])

    # polygons may share vertices on purpose; merge exact coincidences
    xy_list, slot = [], {}
    share = 1e-9
    for verts in pts:
        for _, v in verts:
            key = (round(v[0] / share), round(v[1] / share))
            if key not in slot:
                slot[key] = len(xy_list)
                xy_list.append(v)
    base = np.array(xy_list, dtype=float).reshape(-1, 2)

    if spec.box is not None:
        lo, hi = np.array(spec.box[:2], float), np.array(spec.box[2:], float)
    elif len(base):
        lo, hi = np.minimum(base.min(axis=0), 0.0), np.maximum(base.max(axis=0), 1.0)
    else:
        lo, hi = np.zeros(2), np.ones(2)
    tol = Tolerances.for_points(np.vstack([base, lo, hi]))
    sep = 4.0 * tol.tol_point
    if len(base) > 1:
        d = np.hypot(*(base[:, None, :] - base[None, :, :]).transpose(2, 0, 1))
        np.fill_diagonal(d, np.inf)
        if d.min() <= sep:
            raise InfeasibleSpec("embedded polygons have vertices closer than %.3g" % sep)

    placed = np.zeros((len(base) + spec.n_noise, 2))
    placed[:len(base)] = base
    m = len(base)
    tries = 0
    while m < len(placed):
        cand = lo + (hi - lo) * rng.random(2)
        if m == 0 or np.hypot(*(placed[:m] - cand).T).min() > sep:
            placed[m] = cand
            m += 1
            tries = 0
            continue
        tries += 1
        if tries > spec.max_tries:
            raise InfeasibleSpec("cannot place noise point %d after %d tries" % (m - len(base), tries))
    xy = placed

    truth = []
    for (k, center, radius, phase), ok in zip(spec.embedded, keep_poly):
        if not ok:
            continue
        verts = polygon_vertices(center, radius, phase, k)
        ids = [slot[(round(v[0] / share), round(v[1] / share))] for v in verts]
        truth.append(make_polygon(k, ids, xy))
    meta = {"name": name, "seed": spec.seed, "spec": spec.to_dict()}
    return Instance(xy, sorted(set(truth), key=lambda g: g.sort_key()), meta)


def random_spec(rng, k_range=(3, 12), n_gons=(1, 3), n_noise=(10, 60), drop_prob=0.3, seed=None) -> GenSpec:
    """Random embedding layout used by the test-suite generators."""
    emb = []
    for _ in range(int(rng.integers(n_gons[0], n_gons[1] + 1))):
        k = int(rng.integers(k_range[0], k_range[1] + 1))
        emb.append((k, (float(rng.random()), float(rng.random())), float(0.1 + 0.3 * rng.random()),
                    float(rng.random() * 2 * math.pi)))
    drop = 0.0
    if rng.random() < drop_prob:
        drop = float(rng.uniform(0.05, 0.3))
    return GenSpec(int(rng.integers(n_noise[0], n_noise[1] + 1)), emb, drop,
                   int(rng.integers(2**31)) if seed is None else seed, box=(0.0, 0.0, 1.0, 1.0))


def _fmt(x: float) -> str:
    s = "%.10g" % x
    return "0" if s == "-0" else s


def polygon_to_dict(g: RegularPolygon, source: Optional[str] = None) -> dict:
    d = {
        "k": g.k,
        "center": [g.center[0], g.center[1]],
        "radius": g.radius,
        "phase": g.phase,
        "vertex_ids": list(g.vertex_ids),
    }
    if source is not None:
        d["source"] = source
    return d


def polygon_from_dict(d) -> RegularPolygon:
    k = int(d["k"])
    return RegularPolygon(k, (float(d["center"][0]), float(d["center"][1])), float(d["radius"]),
                          canonical_phase(float(d["phase"]), k), tuple(int(i) for i in d["vertex_ids"]))


def _sorted(results):
    return sorted(results, key=lambda r: r.polygon.sort_key())


def write_results(results: Sequence[ResultRecord], fmt: str = "text", points=None) -> bytes:
    """Serialise results; ordering depends only on the polygon set."""
    results = _sorted(results)
    if fmt == "text":
        if not results:
            return b""
        lines = [RESULTS_HEADER]
        for r in results:
            g = r.polygon
            lines.append(" ".join([str(g.k), _fmt(g.center[0]), _fmt(g.center[1]), _fmt(g.radius),
                                   _fmt(g.phase)] + [str(i) for i in g.vertex_ids]))
        return ("\n".join(lines) + "\n").encode()
    if fmt == "json":
        doc = {
            "format": RESULTS_FORMAT,
            "version": FORMAT_VERSION,
            "polygons": [dict(polygon_to_dict(r.polygon, r.source), **r.attachments) for r in results],
        }
        return (json.dumps(doc, indent=1) + "\n").encode()
    if fmt == "svg":
        return _svg(results, points)
    raise ValueError("unknown format %r" % (fmt,))


def _svg(results, points) -> bytes:
    xy = as_coords(points) if points is not None else np.zeros((0, 2))
    allv = [xy] + [r.polygon.vertices() for r in results]
    allv = np.vstack(allv) if any(len(a) for a in allv) else np.zeros((1, 2))
    lo, hi = allv.min(axis=0), allv.max(axis=0)
    span = float(max(hi[0] - lo[0], hi[1] - lo[1])) or 1.0
    size = 600.0
    pad = 20.0
    scale = (size - 2 * pad) / span

    def tx(p):
        # flip y so the picture is the usual way up
        return pad + (p[0] - lo[0]) * scale, size - pad - (p[1] - lo[1]) * scale

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        "<!-- regpoly results v%d -->" % FORMAT_VERSION,
        '<svg xmlns="http://www.w3.org/2000/svg" width="%d" height="%d" viewBox="0 0 %d %d">'
        % (size, size, size, size),
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    for r in results:
        g = r.polygon
        coords = xy[list(g.vertex_ids)] if len(xy) else g.vertices()
        path = " ".join(("M" if i == 0 else "L") + "%.3f,%.3f" % tx(p) for i, p in enumerate(coords))
        out.append('<path d="%s Z" fill="none" stroke="%s" stroke-width="1.2"><title>k=%d</title></path>'
                   % (path, _COLOURS[g.k % len(_COLOURS)], g.k))
    for p in xy:
        out.append('<circle cx="%.3f" cy="%.3f" r="2" fill="black"/>' % tx(p))
    out.append("</svg>")
    return ("\n".join(out) + "\n").encode()


_COLOURS = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
            "#bcbd22", "#17becf"]


def write_truth(polygons, path) -> None:
    doc = {"format": "regpoly-truth", "version": FORMAT_VERSION,
           "polygons": [polygon_to_dict(g) for g in sorted(polygons, key=lambda g: g.sort_key())]}
    Path(path).write_text(json.dumps(doc, indent=1) + "\n")


def read_polygons(path) -> List[RegularPolygon]:
    """Read polygons from a truth sidecar or a JSON result file."""
    doc = json.loads(Path(path).read_text())
    return [polygon_from_dict(d) for d in doc["polygons"]]


def parse_results_text(data: bytes):
    """Parse text results back into (k, vertex_ids) pairs."""
    out = []
    for line in data.decode().splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split()
        k = int(parts[0])
        out.append((k, tuple(int(i) for i in parts[5:5 + k])))
    return out
