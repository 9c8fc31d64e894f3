import itertools
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from regpoly.errors import BadK, BadSkip
from regpoly.geometry import Tolerances
from regpoly.special import (
    CANDIDATE,
    DEGENERATE,
    NONSPECIAL,
    build_table,
    classify_triangle,
    classify_triangles,
    dump_table,
    effective_tol_angle,
    is_special,
    min_angle_gap,
)

from conftest import regular, tol_for


def totient(k):
    # trial-division product formula, independent of the gcd filter
    result, m, p = k, k, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


def test_k15_entries():
    assert build_table(15).entries_for(15) == [1, 2, 4, 7]


def test_small_k_entries():
    t = build_table(12)
    assert t.entries_for(3) == [1]
    assert t.entries_for(4) == [1]
    assert t.entries_for(6) == [1]
    assert t.entries_for(12) == [1, 5]


def test_counts_are_half_totient():
    t = build_table(500)
    counts = np.bincount(t.ks, minlength=501)
    for k in range(3, 501):
        assert counts[k] == totient(k) // 2


def test_angles_sorted_and_distinct():
    t = build_table(60)
    assert np.all(np.diff(t.angles) > 0)
    assert min_angle_gap(t) > 0


def test_pentagon_angles():
    t = build_table(5)
    a = {(e.k, e.d): e.angle for e in t.entries}
    assert abs(a[(5, 2)] - math.pi / 5) < 1e-12
    assert abs(a[(5, 1)] - 3 * math.pi / 5) < 1e-12
    assert abs(a[(3, 1)] - math.pi / 3) < 1e-12


def test_min_gap_k5():
    # angles pi/5, pi/3, pi/2, 3pi/5: tightest pair is pi/2 vs 3pi/5
    assert min_angle_gap(build_table(5)) == pytest.approx(math.pi / 10, abs=1e-12)


def test_is_special():
    assert is_special(15, 7)
    assert not is_special(15, 3)
    assert not is_special(15, 5)
    with pytest.raises(BadK):
        is_special(2, 1)
    with pytest.raises(BadSkip):
        is_special(6, 3)
    with pytest.raises(BadSkip):
        is_special(6, 0)


def test_build_table_rejects_small():
    with pytest.raises(BadK):
        build_table(2)


def test_tol_angle_capping():
    t = build_table(20)
    gap = min_angle_gap(t)
    assert effective_tol_angle(t, 1e-12) == 1e-12
    with pytest.warns(UserWarning):
        assert effective_tol_angle(t, 1.0) == gap / 4


def test_dump_roundtrip(tmp_path):
    t = build_table(30)
    path = tmp_path / "table.txt"
    dump_table(t, path)
    rows = [line.split() for line in path.read_text().splitlines()[1:]]
    assert [(int(k), int(d)) for k, d, _ in rows] == [(int(k), int(d)) for k, d in zip(t.ks, t.ds)]
    assert np.array_equal([float(a) for *_, a in rows], t.angles)


def _tol(xy):
    return tol_for(xy)


def test_classify_pentagon_seed():
    v = regular(5, center=(1.0, -2.0), radius=3.0, phase=0.3)
    cand = classify_triangle(v[0], v[2], v[3], build_table(5), _tol(v), ids=(0, 2, 3))
    assert cand is not None
    assert (cand.k, cand.d) == (5, 2)
    assert cand.center == pytest.approx((1.0, -2.0), abs=1e-9)
    assert cand.radius == pytest.approx(3.0)
    assert cand.phase == pytest.approx(0.3)
    assert cand.apex_index == 0
    assert cand.seed_ids == (0, 2, 3)


def test_classify_degenerate_and_nonisosceles():
    table = build_table(8)
    tol = Tolerances(1e-9, 2e-9, 1e-9)
    assert classify_triangle((0, 0), (1, 0), (2, 0), table, tol) is None
    assert classify_triangle((0, 0), (1, 0), (0, 2), table, tol) is None
    # isosceles at the apex but 40 degrees matches no k <= 8
    a = math.radians(40)
    assert classify_triangle((0, 0), (1, 0), (math.cos(a), math.sin(a)), table, tol) is None
    c = classify_triangles(np.array([[0, 0], [1, 0], [2, 0.0]]), [[0, 1, 2]], table, tol)
    assert c.status[0] == DEGENERATE


@pytest.mark.parametrize("k", [5, 7, 9, 12, 15, 16, 30])
def test_every_inscribed_triple_classified(k):
    # apex at vertex i, sides at i +- d: a reduced skip names the k-gon,
    # otherwise the triple belongs to the k/g-gon through the same vertices
    v = regular(k, center=(0.2, -0.1), radius=2.0, phase=0.05)
    table = build_table(k)
    tol = _tol(v)
    trip = [(i, (i + d) % k, (i - d) % k) for i in range(k) for d in range(1, (k + 1) // 2)]
    c = classify_triangles(v, np.array(trip), table, tol)
    assert np.all(c.status == CANDIDATE)
    for (i, q, r), kk, dd in zip(trip, c.k, c.d):
        d = (q - i) % k
        g = math.gcd(d, k)
        assert (kk, dd) == (k // g, d // g)
    special = np.mean([math.gcd((q - i) % k, k) == 1 for i, q, _ in trip])
    assert special == pytest.approx((totient(k) // 2) / ((k + 1) // 2 - 1))


def test_out_of_range_k_is_nonspecial():
    v = regular(9, radius=1.0)
    c = classify_triangles(v, np.array([[0, 4, 5]]), build_table(9), _tol(v), k_min=10, k_max=9)
    assert c.status[0] == NONSPECIAL


def test_non_apex_triples_rejected():
    v = regular(7)
    table = build_table(7)
    tol = _tol(v)
    bad = [t for t in itertools.permutations(range(7), 3)
           if (t[1] - t[0]) % 7 != (t[0] - t[2]) % 7]
    c = classify_triangles(v, np.array(bad), table, tol)
    assert not np.any(c.status == CANDIDATE)


@settings(max_examples=60, deadline=None)
@given(
    st.integers(3, 40),
    st.floats(0.1, 100),
    st.floats(0, 2 * math.pi),
    st.floats(-50, 50),
    st.floats(-50, 50),
    st.data(),
)
def test_classify_recovers_parameters(k, radius, phase, cx, cy, data):
    v = regular(k, (cx, cy), radius, phase)
    d = data.draw(st.integers(1, (k + 1) // 2 - 1).filter(lambda d: math.gcd(d, k) == 1))
    i = data.draw(st.integers(0, k - 1))
    tol = _tol(v)
    cand = classify_triangle(v[i], v[(i + d) % k], v[(i - d) % k], build_table(40), tol)
    assert cand is not None and (cand.k, cand.d) == (k, d)
    assert math.dist(cand.center, (cx, cy)) < 1e-6 * radius
    step = 2 * math.pi / k
    diff = (cand.phase - phase) % step
    assert min(diff, step - diff) < 1e-6
