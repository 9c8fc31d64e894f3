"""Command-line driver: ``regpoly {detect,oracle,gen,sample-stats,bench}``.

Results go to stdout (or ``-o``); statistics and warnings go to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import RegPolyError
from .geometry import Tolerances
from .large import DEFAULT_ALPHA, DEFAULT_MULTIPLIER, DetectorParams, default_k_cut, detect
from .oracle import enumerate_all_gons, enumerate_isosceles
from .pointset import (
    GenSpec,
    ResultRecord,
    format_points,
    generate,
    load_points,
    read_polygons,
    write_results,
    write_truth,
)

EXIT_OK, EXIT_USAGE = 0, 2


def _tolerances(args, points):
    return Tolerances.for_points(points, tol_point=args.tol_point, tol_angle=args.tol_angle)


def _emit(data: bytes, output):
    if output in (None, "-"):
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        Path(output).write_bytes(data)


def _diag(msg):
    print(msg, file=sys.stderr)


def _compare_truth(path, polygons):
    truth = {g.key for g in read_polygons(path)}
    got = {g.key for g in polygons}
    _diag("truth: %d/%d found, %d extra" % (len(truth & got), len(truth), len(got - truth)))


def cmd_detect(args):
    inst = load_points(args.input, args.tol_point)
    xy = inst.points
    tol = _tolerances(args, xy)
    k_cut = args.k_cut if args.k_cut is not None else default_k_cut(len(xy), args.alpha)
    params = DetectorParams(k_cut=k_cut, tol=tol, alpha=args.alpha, sample_multiplier=args.multiplier,
                            seed=args.seed, threads=args.threads)
    res = detect(xy, params)
    records = [ResultRecord(g, res.sources[g.key]) for g in res.polygons]
    _emit(write_results(records, args.format, xy), args.output)
    stats = {"n": len(xy), "k_cut": k_cut, "polygons": len(res.polygons),
             "sweep": {k: v for k, v in vars(res.sweep_stats).items() if k != "events"},
             "sampler": res.run_stats.as_dict()}
    _diag(json.dumps(stats, sort_keys=True))
    if args.truth:
        _compare_truth(args.truth, res.polygons)
    if args.figure:
        from .plotting import plot_polygons

        plot_polygons(xy, res.polygons, args.figure, title=Path(args.input).name)
    return EXIT_OK


def cmd_oracle(args):
    inst = load_points(args.input, args.tol_point)
    xy = inst.points
    tol = _tolerances(args, xy)
    k_max = args.k_max if args.k_max is not None else len(xy)
    polys = enumerate_all_gons(xy, k_max, tol)
    _emit(write_results([ResultRecord(g, "oracle") for g in polys], args.format, xy), args.output)
    if args.truth:
        _compare_truth(args.truth, polys)
    if args.figure:
        from .plotting import plot_polygons

        plot_polygons(xy, polys, args.figure, title=Path(args.input).name)
    return EXIT_OK


def _parse_gon(text):
    parts = [float(x) for x in text.split(",")]
    if len(parts) != 5:
        raise argparse.ArgumentTypeError("expected k,cx,cy,radius,phase")
    return (int(parts[0]), (parts[1], parts[2]), parts[3], parts[4])


def cmd_gen(args):
    if args.spec:
        text = Path(args.spec).read_text() if Path(args.spec).exists() else args.spec
        spec = GenSpec.from_dict(json.loads(text))
    else:
        spec = GenSpec(n_noise=args.noise, embedded=args.gon or [], drop_fraction=args.drop, seed=args.seed)
    inst = generate(spec)
    comment = "gen " + json.dumps(spec.to_dict(), sort_keys=True)
    _emit(format_points(inst.points, comment).encode(), args.output)
    if args.truth:
        write_truth(inst.ground_truth, args.truth)
    _diag("generated %d points, %d complete polygons" % (inst.n, len(inst.ground_truth)))
    return EXIT_OK


def cmd_sample_stats(args):
    from scipy import stats

    from .errors import NoIsosceles
    from .sampler import build_buckets, frequency_table

    xy = load_points(args.input, args.tol_point).points
    if len(xy) > args.max_n:
        raise ValueError("sample-stats enumerates all triples; refusing n=%d > %d" % (len(xy), args.max_n))
    tol = _tolerances(args, xy)
    universe = enumerate_isosceles(xy, tol) if len(xy) >= 3 else []
    if not universe:
        print("empty")
        return EXIT_OK
    try:
        index = build_buckets(xy, tol)
    except NoIsosceles:
        print("empty")
        return EXIT_OK
    rng = np.random.default_rng(args.seed)
    counts, stray = frequency_table(index, universe, rng, args.draws)
    expected = args.draws / len(universe)
    chi = stats.chisquare(counts)
    crit = stats.chi2.ppf(1 - args.alpha_level, len(universe) - 1)
    lines = ["# p q r count expected"]
    lines += ["%d %d %d %d %.3f" % (p, q, r, c, expected) for (p, q, r), c in zip(universe, counts)]
    lines.append("# triples=%d draws=%d stray=%d chi2=%.4f dof=%d critical=%.4f pvalue=%.4g %s" % (
        len(universe), args.draws, stray, chi.statistic, len(universe) - 1, crit, chi.pvalue,
        "PASS" if chi.statistic < crit and stray == 0 else "FAIL"))
    _emit(("\n".join(lines) + "\n").encode(), args.output)
    return EXIT_OK


def cmd_bench(args):
    from .bench import run_ladder, slopes, to_csv

    sizes = [int(s) for s in args.sizes.split(",")]
    phases = tuple(args.phases.split(","))
    rows = run_ladder(sizes, seed=args.seed, phases=phases, k_cut=args.k_cut, multiplier=args.multiplier,
                      threads=args.threads, repeat=args.repeat, log=_diag)
    _emit(to_csv(rows).encode(), args.output)
    sl = slopes(rows)
    for ph, s in sl.items():
        _diag("slope %s %.3f" % (ph, s))
    if args.figure:
        from .plotting import plot_scaling

        plot_scaling(rows, args.figure, sl)
    return EXIT_OK


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-point", type=float, default=None, help="point coincidence radius")
    common.add_argument("--tol-angle", type=float, default=None, help="apex angle match tolerance (radians)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("-o", "--output", default=None, help="output file (default stdout)")

    detector = argparse.ArgumentParser(add_help=False)
    detector.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    detector.add_argument("--k-cut", type=int, default=None, help="largest k handled by the sweep")
    detector.add_argument("--multiplier", type=float, default=DEFAULT_MULTIPLIER, help="sample count constant c")
    detector.add_argument("--threads", type=int, default=1)

    out = argparse.ArgumentParser(add_help=False)
    out.add_argument("--format", choices=("text", "json", "svg"), default="text")
    out.add_argument("--figure", default=None, help="also render a PNG/PDF figure here")
    out.add_argument("--truth", default=None, help="ground-truth sidecar to compare against")

    p = argparse.ArgumentParser(prog="regpoly", description="Find regular polygons in planar point sets.")
    p.add_argument("--version", action="version", version="%(prog)s " + __version__)
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("detect", parents=[common, detector, out], help="sweep + sampling detector")
    d.add_argument("input")
    d.set_defaults(func=cmd_detect)

    o = sub.add_parser("oracle", parents=[common, out], help="brute-force enumeration")
    o.add_argument("input")
    o.add_argument("--k-max", type=int, default=None)
    o.set_defaults(func=cmd_oracle)

    g = sub.add_parser("gen", parents=[common], help="generate a point set with embedded polygons")
    g.add_argument("--spec", default=None, help="JSON spec (file path or inline)")
    g.add_argument("--noise", type=int, default=0)
    g.add_argument("--gon", type=_parse_gon, action="append", help="k,cx,cy,radius,phase (repeatable)")
    g.add_argument("--drop", type=float, default=0.0)
    g.add_argument("--truth", default=None, help="write ground-truth sidecar JSON here")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("sample-stats", parents=[common], help="check sampler uniformity")
    s.add_argument("input")
    s.add_argument("--draws", type=int, default=1_000_000)
    s.add_argument("--alpha-level", type=float, default=1e-3, help="chi-square significance level")
    s.add_argument("--max-n", type=int, default=60)
    s.set_defaults(func=cmd_sample_stats)

    b = sub.add_parser("bench", parents=[common, detector], help="timing ladder as CSV")
    b.add_argument("--sizes", default="500,1000,2000,4000")
    b.add_argument("--phases", default="buckets,sweep,large")
    b.add_argument("--repeat", type=int, default=3)
    b.add_argument("--figure", default=None, help="log-log timing plot")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (RegPolyError, ValueError, OSError, json.JSONDecodeError) as e:
        print("regpoly %s: error: %s" % (args.command, e), file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
