"""Box covers, transition graphs, and the invariant-part operators.

The headline check is `inv` against a brute-force oracle: on a graph with
at most 64 boxes, a box lies on a bi-infinite path iff it admits walks of
length exactly 64 both forward and backward (any such walk revisits a node
and therefore closes a cycle).  Walk existence is read off boolean powers
of the adjacency matrix, computed by repeated squaring, with no shared
code paths with `inv` itself.
"""

import numpy as np
import pytest

from ardecomp.boxgraph import (
    BoxCover,
    TransitionGraph,
    build_graph,
    inv,
    inv_m,
    is_isolating,
    reach,
    recurrent_components,
)
from ardecomp.maps import doubling_map, square_map


def brute_bi_infinite(n, edges, subset):
    """Boxes of ``subset`` with length-64 walks in and out, via A^64."""
    a = np.zeros((n, n), dtype=np.int64)
    for k, targets in edges.items():
        if k not in subset:
            continue
        for j in targets:
            if j in subset:
                a[k, j] = 1
    p = a.copy()
    for _ in range(6):
        p = np.minimum(p @ p, 1)
    fwd = p.any(axis=1)
    bwd = p.any(axis=0)
    return frozenset(k for k in subset if fwd[k] and bwd[k])


def random_edges(rng, n):
    density = float(rng.uniform(0.3, 2.5)) / n
    edges = {}
    for k in range(n):
        targets = [j for j in range(n) if rng.uniform() < density]
        if targets:
            edges[k] = targets
    return edges


def test_cover_rejects_non_power_of_two():
    with pytest.raises(ValueError):
        BoxCover(48)
    with pytest.raises(ValueError):
        BoxCover(1)


def test_box_lookup_round_trip():
    cover = BoxCover(8)
    assert cover.width == 0.125
    assert cover.box_of(0.0) == 0
    assert cover.box_of(1.0) == 7  # right endpoint clamps into the last box
    for k in range(8):
        lo, hi = cover.box_interval(k)
        assert cover.box_of(0.5 * (lo + hi)) == k


def test_doubling_edges_by_hand():
    g = build_graph(doubling_map(), 4)
    assert set(g.out_boxes(0)) == {0, 1}
    assert set(g.out_boxes(1)) == {2, 3}
    assert set(g.out_boxes(2)) == {0, 1}
    assert set(g.out_boxes(3)) == {2, 3}


def test_square_edges_by_hand():
    # box k maps over [(k/4)^2, ((k+1)/4)^2]; strict overlap only
    g = build_graph(square_map(), 4)
    assert set(g.out_boxes(0)) == {0}
    assert set(g.out_boxes(1)) == {0}
    assert set(g.out_boxes(2)) == {1, 2}
    assert set(g.out_boxes(3)) == {2, 3}
    assert g.in_boxes(0) == [0, 1]


def test_square_self_loops_track_expansion():
    # fixed points 0 and 1 keep self-loops at every resolution
    for n in (16, 64, 256):
        g = build_graph(square_map(), n)
        assert g.has_edge(0, 0)
        assert g.has_edge(n - 1, n - 1)


def test_inv_against_matrix_oracle():
    rng = np.random.default_rng(2024)
    for trial in range(100):
        n = int(rng.choice([4, 8, 16, 32, 64]))
        edges = random_edges(rng, n)
        g = TransitionGraph.from_edges(n, edges)
        full_set = frozenset(range(n))
        assert inv(g, full_set) == brute_bi_infinite(n, edges, full_set)
        subset = frozenset(int(k) for k in np.flatnonzero(rng.uniform(size=n) < 0.6))
        assert inv(g, subset) == brute_bi_infinite(n, edges, subset)


def test_inv_m_is_antitone_and_stabilizes():
    rng = np.random.default_rng(77)
    for _ in range(20):
        n = 32
        g = TransitionGraph.from_edges(n, random_edges(rng, n))
        boxes = frozenset(range(n))
        prev = boxes
        for m in range(1, 9):
            cur = inv_m(g, boxes, m)
            assert cur <= prev
            prev = cur
        limit = inv(g, boxes)
        assert inv_m(g, boxes, n) == limit
        assert inv(g, limit) == limit


def test_inv_of_doubling_is_everything():
    g = build_graph(doubling_map(), 64)
    everything = frozenset(range(64))
    assert inv(g, everything) == everything


def test_is_isolating_empty_and_saturated():
    g = build_graph(square_map(), 4)
    assert is_isolating(g, frozenset()) == (True, None)
    # the invariant part of {0} is {0} itself: not isolated, witness returned
    ok, witness = is_isolating(g, frozenset({0}))
    assert not ok and witness == 0
    # one box of padding puts the core strictly inside
    assert is_isolating(g, frozenset({0, 1})) == (True, None)


def test_is_isolating_needs_cover_neighbors_inside():
    g = build_graph(square_map(), 8)
    ok, witness = is_isolating(g, frozenset({7}))
    assert not ok
    # the outer-approximation halo of the fixed point 1 pulls box 6 into
    # the core, so {6,7} saturates and one more box of padding is needed
    assert not is_isolating(g, frozenset({6, 7}))[0]
    assert is_isolating(g, frozenset({5, 6, 7})) == (True, None)


def test_reach_directions():
    g = TransitionGraph.from_edges(8, {0: [1], 1: [2], 2: [2], 5: [0]})
    assert reach(g, frozenset({0})) == frozenset({0, 1, 2})
    assert reach(g, frozenset({2}), direction="backward") == frozenset({0, 1, 2, 5})
    with pytest.raises(ValueError):
        reach(g, frozenset({0}), direction="sideways")


def test_recurrent_components_order_sources_first():
    g = build_graph(square_map(), 4)
    comps = recurrent_components(g)
    assert comps == [frozenset({3}), frozenset({2}), frozenset({0})]


def test_recurrent_components_respect_within():
    g = build_graph(square_map(), 4)
    comps = recurrent_components(g, within=frozenset({0, 1, 2}))
    assert comps == [frozenset({2}), frozenset({0})]


def test_transient_cycle_free_graph_has_empty_inv():
    g = TransitionGraph.from_edges(4, {0: [1], 1: [2], 2: [3]})
    assert inv(g, frozenset(range(4))) == frozenset()
    assert recurrent_components(g) == []


def test_dilate_boxes_clamps():
    cover = BoxCover(8)
    assert cover.dilate_boxes({0}, 1) == frozenset({0, 1})
    assert cover.dilate_boxes({7}, 2) == frozenset({5, 6, 7})
    assert cover.dilate_boxes({3}, 0) == frozenset({3})
