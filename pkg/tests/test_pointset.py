import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from regpoly.errors import DuplicatePoints, InfeasibleSpec, ParseError
from regpoly.geometry import make_polygon
from regpoly.oracle import enumerate_all_gons
from regpoly.pointset import (
    GenSpec,
    ResultRecord,
    format_points,
    generate,
    load_points,
    parse_points,
    parse_results_text,
    polygon_from_dict,
    polygon_to_dict,
    random_spec,
    read_polygons,
    save_points,
    write_results,
    write_truth,
)

from conftest import SQUARE, keys, regular, tol_for


def test_parse_with_comments_and_blanks():
    inst = parse_points("# header\n\n0 0\n1 0  # trailing\n  1 1\n0 1\n")
    assert np.array_equal(inst.points, SQUARE)


@pytest.mark.parametrize("text,line", [("0 0\n1\n", 2), ("0 0\nx 1\n", 2), ("1 2 3\n", 1), ("0 nan\n", 1)])
def test_parse_errors(text, line):
    with pytest.raises(ParseError) as e:
        parse_points(text)
    assert e.value.line == line


def test_duplicate_reports_lines():
    with pytest.raises(DuplicatePoints) as e:
        parse_points("0 0\n# gap\n1 0\n1 1\n0 0\n")
    assert sorted(e.value.lines) == [1, 5]


@settings(max_examples=50)
@given(st.lists(st.tuples(st.floats(-1e6, 1e6), st.floats(-1e6, 1e6)), min_size=1, max_size=30, unique=True))
def test_roundtrip_bit_exact(pts):
    xy = np.array(pts, dtype=float)
    text = format_points(xy, "some\ncomment")
    try:
        back = parse_points(text).points
    except DuplicatePoints:
        return
    assert back.tobytes() == xy.tobytes()


def test_save_load(tmp_path):
    xy = regular(7, (1.5, -2), 3.3, 0.7)
    save_points(xy, tmp_path / "h.txt")
    inst = load_points(tmp_path / "h.txt")
    assert np.array_equal(inst.points, xy)
    assert inst.meta["name"] == "h"


def test_generate_truth_matches_oracle():
    spec = GenSpec(n_noise=20, embedded=[(6, (0.3, 0.3), 0.2, 0.1), (8, (0.7, 0.7), 0.2, 0.0)], seed=3,
                   box=(0, 0, 1, 1))
    inst = generate(spec)
    assert inst.n == 34
    tol = tol_for(inst.points)
    found = keys(enumerate_all_gons(inst.points, 8, tol))
    assert keys(inst.ground_truth) == {(6, tuple(range(6))), (8, tuple(range(6, 14)))}
    assert keys(inst.ground_truth) <= found


def test_generate_drop_and_shared_vertices():
    # two squares sharing an edge; dropping removes one vertex from each 5-gon
    spec = GenSpec(embedded=[(4, (0.5, 0.5), math.sqrt(0.5), math.pi / 4),
                             (4, (1.5, 0.5), math.sqrt(0.5), math.pi / 4)], seed=0)
    inst = generate(spec)
    assert inst.n == 6 and len(inst.ground_truth) == 2
    inst = generate(GenSpec(embedded=[(5, (0, 0), 1, 0), (10, (3, 3), 1, 0)], drop_fraction=0.2, seed=1))
    assert inst.n == 4 + 8
    assert inst.ground_truth == []


def test_generate_deterministic_and_infeasible():
    spec = random_spec(np.random.default_rng(5))
    a, b = generate(spec), generate(spec)
    assert a.points.tobytes() == b.points.tobytes()
    assert GenSpec.from_dict(json.loads(json.dumps(spec.to_dict()))).to_dict() == spec.to_dict()
    with pytest.raises(InfeasibleSpec):
        generate(GenSpec(embedded=[(2, (0, 0), 1, 0)]))
    with pytest.raises(InfeasibleSpec):
        generate(GenSpec(n_noise=50, box=(0, 0, 1e-12, 1e-12), embedded=[(3, (0, 0), 1, 0)], max_tries=20))


def _records():
    xy = np.vstack([SQUARE, regular(5, (3, 3), 1, 0.2)])
    return xy, [ResultRecord(make_polygon(5, range(4, 9), xy), "sampler"),
                ResultRecord(make_polygon(4, range(4), xy), "sweep")]


def test_text_results():
    xy, recs = _records()
    data = write_results(recs, "text", xy)
    lines = data.decode().splitlines()
    assert lines[0].startswith("# regpoly results v1")
    assert lines[1] == "4 0.5 0.5 0.7071067812 0.7853981634 2 3 0 1"
    assert parse_results_text(data) == [(4, (2, 3, 0, 1)), (5, tuple(recs[0].polygon.vertex_ids))]
    assert write_results(list(reversed(recs)), "text", xy) == data
    assert write_results([], "text") == b""


def test_json_results_and_truth(tmp_path):
    xy, recs = _records()
    doc = json.loads(write_results(recs, "json", xy))
    assert doc["format"] == "regpoly-results" and doc["version"] == 1
    assert [p["source"] for p in doc["polygons"]] == ["sweep", "sampler"]
    (tmp_path / "r.json").write_bytes(write_results(recs, "json", xy))
    assert [g.key for g in read_polygons(tmp_path / "r.json")] == [r.polygon.key for r in reversed(recs)]
    write_truth([r.polygon for r in recs], tmp_path / "t.json")
    back = read_polygons(tmp_path / "t.json")
    assert back == sorted((r.polygon for r in recs), key=lambda g: g.sort_key())
    g = recs[0].polygon
    assert polygon_from_dict(polygon_to_dict(g)) == g


def test_svg_and_bad_format():
    xy, recs = _records()
    svg = write_results(recs, "svg", xy).decode()
    assert svg.startswith("<?xml") and svg.count("<path") == 2 and svg.count("<circle") == len(xy)
    with pytest.raises(ValueError):
        write_results(recs, "yaml")
