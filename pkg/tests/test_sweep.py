import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from regpoly.geometry import Tolerances
from regpoly.oracle import enumerate_all_gons
from regpoly.pointset import generate, random_spec
from regpoly.sweep import SweepStats, detect_small_gons

from conftest import SQUARE, int_lattice, keys, regular, tol_for, tri_lattice


def oracle_keys(xy, k_cut):
    return keys(enumerate_all_gons(xy, k_cut, tol_for(xy)))


def test_square():
    st_ = SweepStats()
    found = detect_small_gons(SQUARE, 4, tol_for(SQUARE), st_)
    assert [(g.k, set(g.vertex_ids)) for g in found] == [(4, {0, 1, 2, 3})]
    assert st_.terminations >= 1
    assert st_.pending_at_end == 0


def test_too_few_points_and_bad_cut():
    assert detect_small_gons(SQUARE[:2], 5, tol_for(SQUARE)) == []
    with pytest.raises(ValueError):
        detect_small_gons(SQUARE, 2, tol_for(SQUARE))


def test_collinear_has_nothing():
    xy = np.column_stack((np.arange(12.0), np.zeros(12)))
    assert detect_small_gons(xy, 12, tol_for(xy)) == []


@pytest.mark.parametrize("m", [3, 5, 6])
def test_integer_grid(m):
    xy = int_lattice(m)
    assert keys(detect_small_gons(xy, 8, tol_for(xy))) == oracle_keys(xy, 8)


@pytest.mark.parametrize("m", [4, 6])
def test_triangular_lattice(m):
    xy = tri_lattice(m)
    st_ = SweepStats()
    got = detect_small_gons(xy, 6, tol_for(xy), st_)
    assert keys(got) == oracle_keys(xy, 6)
    assert any(g.k == 6 for g in got)
    assert st_.pending_at_end == 0


def test_vertical_ties():
    # polygons whose extreme vertices share an x coordinate with other vertices
    xy = np.vstack([
        regular(4, (0, 0), 1.0, 0.0),               # diamond: single leftmost vertex
        regular(4, (5, 0), 1.0, math.pi / 4),       # axis square: two leftmost vertices
        regular(6, (10, 0), 1.0, math.pi / 6),      # hexagon with vertical sides
        regular(8, (15, 0), 1.0, math.pi / 8),
    ])
    got = detect_small_gons(xy, 8, tol_for(xy))
    # the octagon holds two squares and the hexagon two triangles
    assert sorted(g.k for g in got) == [3, 3, 4, 4, 4, 4, 6, 8]
    assert keys(got) == oracle_keys(xy, 8)


def test_shared_vertices_and_concentric():
    tri = regular(3, (0, 0), 1.0, 0.0)
    hexa = regular(6, (0, 0), 1.0, 0.0)[[1, 3, 5]]  # with tri, completes a hexagon
    outer = regular(5, (0, 0), 2.0, 0.3)
    tilted = regular(5, (0, 0), 2.0, 0.3 + math.pi / 5)
    xy = np.vstack([tri, hexa, outer, tilted])
    got = detect_small_gons(xy, 10, tol_for(xy))
    assert keys(got) == oracle_keys(xy, 10)
    assert sorted(g.k for g in got) == [3, 3, 5, 5, 6, 10]


def test_k_cut_limits_output():
    xy = np.vstack([regular(7, (0, 0), 1.0, 0.1), regular(5, (3, 3), 1.0, 0.2)])
    assert [g.k for g in detect_small_gons(xy, 6, tol_for(xy))] == [5]
    assert sorted(g.k for g in detect_small_gons(xy, 7, tol_for(xy))) == [5, 7]


def test_trace_events_balance():
    xy = np.vstack([regular(5, (0, 0), 1.0, 0.1), int_lattice(3) * 0.3 + 2])
    st_ = SweepStats()
    got = detect_small_gons(xy, 5, tol_for(xy), st_, trace=True)
    origin = {(v, k, c) for kind, v, k, c in st_.events if kind == "originate"}
    ends = [(k, c) for kind, v, k, c in st_.events if kind == "terminate"]
    assert len(ends) == len(got) == st_.terminations
    assert len(origin) == st_.originations
    assert {(k, c) for _, k, c in origin} >= set(ends)
    assert st_.signals == 2 * st_.originations + st_.propagations


@pytest.mark.parametrize("seed", range(8))
def test_generated_instances(seed):
    rng = np.random.default_rng(seed)
    inst = generate(random_spec(rng, k_range=(3, 10), n_noise=(10, 40)))
    tol = Tolerances.for_points(inst.points)
    got = keys(detect_small_gons(inst.points, 10, tol))
    assert got == keys(enumerate_all_gons(inst.points, 10, tol))
    assert keys(inst.ground_truth) <= got


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0, 2 * math.pi))
def test_invariant_under_relabel_and_rotation(seed, angle):
    rng = np.random.default_rng(seed)
    xy = np.vstack([tri_lattice(3), regular(5, (4, 0), 1.1, rng.random()), rng.uniform(-2, 6, (6, 2))])
    c, s = math.cos(angle), math.sin(angle)
    perm = rng.permutation(len(xy))
    moved = (xy @ np.array([[c, s], [-s, c]]))[perm]
    # moved[j] is the image of xy[perm[j]]
    before = {(g.k, frozenset(g.vertex_ids)) for g in detect_small_gons(xy, 6, tol_for(xy))}
    after = {(g.k, frozenset(perm[list(g.vertex_ids)].tolist()))
             for g in detect_small_gons(moved, 6, tol_for(moved))}
    assert before == after


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_matches_oracle_on_random_lattice_subsets(seed):
    rng = np.random.default_rng(seed)
    grid = tri_lattice(6) if rng.random() < 0.5 else int_lattice(6)
    xy = grid[rng.choice(len(grid), int(rng.integers(6, len(grid))), replace=False)]
    assert keys(detect_small_gons(xy, 6, tol_for(xy))) == oracle_keys(xy, 6)
