"""Interval union algebra: canonical form, set laws, metric facts.

Oracles here are hand-computed (distances on unions small enough to do on
paper) or brute membership grids; nothing is compared against the code's
own output.
"""

import math

import numpy as np
import pytest

from ardecomp.errors import UndefinedDistanceError
from ardecomp.intervals import (
    IntervalUnion,
    empty,
    from_pairs,
    full,
    hausdorff,
    normalize,
    point,
    set_algebra,
)


def random_union(rng, max_pieces=4):
    cuts = sorted(rng.uniform(0.0, 1.0, 2 * rng.integers(1, max_pieces + 1)))
    return normalize([(cuts[2 * i], cuts[2 * i + 1]) for i in range(len(cuts) // 2)])


def test_construction_merges_and_sorts():
    u = normalize([(0.5, 0.7), (0.0, 0.2), (0.2, 0.3)])
    assert u.pieces == ((0.0, 0.3), (0.5, 0.7))
    assert normalize([]).is_empty
    assert full().pieces == ((0.0, 1.0),)


def test_normalize_is_idempotent():
    rng = np.random.default_rng(11)
    for _ in range(100):
        u = random_union(rng)
        assert normalize(u.pieces).pieces == u.pieces


def test_singletons_survive():
    p = point(0.25)
    assert p.pieces == ((0.25, 0.25),)
    assert p.measure == 0.0
    assert p.union(point(0.75)).pieces == ((0.25, 0.25), (0.75, 0.75))
    # difference against a disjoint set must not erase a zero-width piece
    assert p.difference(point(0.5)).pieces == ((0.25, 0.25),)


def test_self_difference_is_exactly_empty():
    rng = np.random.default_rng(3)
    for _ in range(50):
        u = random_union(rng)
        assert u.difference(u).is_empty


def test_union_laws():
    rng = np.random.default_rng(7)
    for _ in range(50):
        u, v = random_union(rng), random_union(rng)
        assert u.union(v).pieces == v.union(u).pieces
        assert u.union(u).pieces == u.pieces
        assert u.union(empty()).pieces == u.pieces


def test_membership_tracks_set_algebra():
    # brute membership oracle on a grid, away from endpoints
    rng = np.random.default_rng(19)
    grid = np.linspace(0.003, 0.997, 211)
    for _ in range(40):
        u, v = random_union(rng), random_union(rng)
        ends = [e for s in (u, v) for piece in s.pieces for e in piece]
        for x in grid:
            x = float(x)
            if any(abs(x - e) < 1e-6 for e in ends):
                continue
            in_u, in_v = u.contains(x), v.contains(x)
            assert set_algebra("union", u, v).contains(x) == (in_u or in_v)
            assert set_algebra("intersect", u, v).contains(x) == (in_u and in_v)
            assert set_algebra("difference", u, v).contains(x) == (in_u and not in_v)


def test_de_morgan():
    rng = np.random.default_rng(23)
    for _ in range(50):
        u, v = random_union(rng), random_union(rng)
        lhs = u.union(v).complement()
        rhs = u.complement().intersect(v.complement())
        assert lhs.within(rhs, tol=1e-12) and rhs.within(lhs, tol=1e-12)


def test_distance_hand_values():
    u = from_pairs([[0.0, 0.2], [0.6, 0.8]])
    assert u.distance(0.1) == 0.0
    assert u.distance(0.3) == pytest.approx(0.1, abs=1e-15)
    assert u.distance(0.5) == pytest.approx(0.1, abs=1e-15)
    assert u.distance(1.0) == pytest.approx(0.2, abs=1e-15)


def test_distance_min_law():
    rng = np.random.default_rng(31)
    for _ in range(50):
        u, v = random_union(rng), random_union(rng)
        w = u.union(v)
        for x in rng.uniform(0.0, 1.0, 20):
            x = float(x)
            assert w.distance(x) == pytest.approx(
                min(u.distance(x), v.distance(x)), abs=1e-15
            )


def test_hausdorff_hand_values():
    assert hausdorff(full(), full()) == 0.0
    assert hausdorff(point(0.0), point(1.0)) == 1.0
    a = from_pairs([[0.0, 0.5]])
    b = from_pairs([[0.1, 0.5]])
    assert hausdorff(a, b) == pytest.approx(0.1, abs=1e-15)
    # supremum attained at a gap midpoint of the second set
    c = from_pairs([[0.0, 0.2], [0.8, 1.0]])
    assert hausdorff(full(), c) == pytest.approx(0.3, abs=1e-15)


def test_hausdorff_is_a_pseudometric():
    rng = np.random.default_rng(41)
    for _ in range(40):
        u, v, w = (random_union(rng) for _ in range(3))
        assert hausdorff(u, u) == 0.0
        assert hausdorff(u, v) == hausdorff(v, u)
        assert hausdorff(u, w) <= hausdorff(u, v) + hausdorff(v, w) + 1e-12


def test_empty_set_operations_raise():
    with pytest.raises(UndefinedDistanceError):
        empty().distance(0.5)
    with pytest.raises(UndefinedDistanceError):
        _ = empty().hull
    with pytest.raises(UndefinedDistanceError):
        hausdorff(empty(), full())


def test_contains_modes():
    u = from_pairs([[0.2, 0.4]])
    assert u.contains(0.2, mode="closed")
    assert not u.contains(0.2, mode="interior")
    assert u.contains(0.3, mode="interior")
    with pytest.raises(ValueError):
        u.contains(0.3, mode="open")


def test_dilate_clips_to_unit_interval():
    u = from_pairs([[0.0, 0.1], [0.95, 1.0]])
    d = u.dilate(0.1)
    assert d.pieces == ((0.0, 0.2), (0.85, 1.0))
    assert full().dilate(0.5).pieces == ((0.0, 1.0),)


def test_within_tolerance():
    u = from_pairs([[0.1, 0.3]])
    v = from_pairs([[0.12, 0.28]])
    assert v.within(u)
    assert not u.within(v)
    assert u.within(v, tol=0.02 + 1e-15)


def test_hull_and_measure():
    u = from_pairs([[0.1, 0.2], [0.7, 0.9]])
    assert u.hull == (0.1, 0.9)
    assert u.measure == pytest.approx(0.3, abs=1e-15)
    assert IntervalUnion().measure == 0.0
