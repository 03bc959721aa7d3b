"""Lyapunov potential, discounted orbit supremum, and value readback.

The headline oracle is closed-form: with Morse data ({1}, {0}) under x^2
the potential reduces to g(x) = x, the orbit supremum is attained at the
start, and V(0.3) = (e-1) * sum e^-k * 0.3^(2^k).  That series was summed
independently with math.fsum and frozen below.
"""

import dataclasses
import math

import numpy as np
import pytest

from ardecomp.decomposition import leveled_decomposition
from ardecomp.errors import AmbiguousLevelError, OnOverlapError
from ardecomp.intervals import empty, from_pairs, point
from ardecomp.lyapunov import (
    LyapunovEvaluator,
    alpha_from_v,
    evaluator_from_chain,
    g_morse,
    g_pair,
    h_value,
    v_value,
    verify_monotone,
)
from ardecomp.maps import doubling_map, sqrt2_lorenz_map, square_map

# (e-1) * fsum(e^-k * 0.3^(2^k), k=1..40), computed outside this module
V_AT_03 = 0.05878007092769402


@pytest.fixture(scope="module")
def square_chain():
    return leveled_decomposition(square_map(), n_boxes=256)


@pytest.fixture(scope="module")
def square_ev(square_chain):
    return evaluator_from_chain(square_chain)


def singleton_ev(**kw):
    return LyapunovEvaluator(
        morse_sets=(point(1.0), point(0.0)), overlap=empty(), **kw
    )


def test_g_pair_endpoints_and_midpoint():
    a, r = point(0.0), point(1.0)
    assert g_pair(0.0, a, r) == 0.0
    assert g_pair(1.0, a, r) == 1.0
    assert g_pair(0.25, a, r) == 0.25
    with pytest.raises(OnOverlapError):
        g_pair(0.5, point(0.5), point(0.5))


def test_g_morse_singleton_reduces_to_identity():
    ev = singleton_ev()
    for x in (0.0, 0.125, 0.3, 0.8, 1.0):
        assert g_morse(ev, x) == x


def test_g_morse_synthetic_three_levels():
    # Morse sets {1}, {0.5}, {0}: the potential must hit the levels exactly
    ev = LyapunovEvaluator(
        morse_sets=(point(1.0), point(0.5), point(0.0)), overlap=empty()
    )
    assert g_morse(ev, 1.0) == 1.0
    assert g_morse(ev, 0.5) == 0.5
    assert g_morse(ev, 0.0) == 0.0
    # strictly between levels on the connecting regions
    assert 0.5 < g_morse(ev, 0.75) < 1.0
    assert 0.0 < g_morse(ev, 0.25) < 0.5


def test_g_morse_exact_levels_on_box_chain(square_ev, square_chain):
    for lo, hi in square_chain.morse_sets[0].pieces:
        assert g_morse(square_ev, lo) == 1.0
        assert g_morse(square_ev, hi) == 1.0
    for lo, hi in square_chain.morse_sets[1].pieces:
        assert g_morse(square_ev, lo) == 0.0
        assert g_morse(square_ev, 0.5 * (lo + hi)) == 0.0


def test_g_morse_refuses_overlap_margin():
    ev = LyapunovEvaluator(
        morse_sets=(point(1.0), point(0.0)),
        overlap=point(0.5),
        overlap_margin=0.01,
    )
    with pytest.raises(OnOverlapError):
        g_morse(ev, 0.505)
    assert g_morse(ev, 0.52) == 0.52  # outside the margin works


def test_g_morse_refuses_points_on_two_morse_sets():
    ev = LyapunovEvaluator(
        morse_sets=(from_pairs([[0.4, 0.6]]), from_pairs([[0.6, 0.8]])),
        overlap=empty(),
    )
    with pytest.raises(OnOverlapError):
        g_morse(ev, 0.6)


def test_evaluator_from_chain_defaults(square_chain):
    ev = evaluator_from_chain(square_chain)
    assert ev.level_count == 1
    assert ev.overlap_margin == square_chain.box_width
    assert ev.tail_bound == math.exp(-40.0)
    assert ev.sup_horizon == 200 and ev.series_horizon == 40


def test_v_closed_form_oracle():
    ev = singleton_ev()
    v, tail = v_value(ev, square_map(), 0.3)
    assert tail == math.exp(-40.0)
    assert abs(v - V_AT_03) <= 1e-12


def test_h_is_the_orbit_supremum():
    # x^2 orbits decrease toward 0, so the supremum sits at the start
    ev = singleton_ev()
    assert h_value(ev, square_map(), 0.3) == 0.3
    assert h_value(ev, square_map(), 0.0) == 0.0


def test_v_endpoint_values_on_chain(square_ev):
    f = square_map()
    v1, tail = v_value(square_ev, f, 1.0)
    assert abs(v1 - 1.0) <= tail + 1e-9
    v0, _ = v_value(square_ev, f, 0.0)
    assert abs(v0) <= 1e-12
    # everything stays inside [0, 1 + tail]
    rng = np.random.default_rng(3)
    for x in rng.uniform(0.0, 1.0, 50):
        v, _ = v_value(square_ev, f, float(x))
        assert -1e-15 <= v <= 1.0 + tail


def test_m1_morse_potential_equals_pair_potential(square_ev, square_chain):
    a = square_chain.levels[0].attracting
    r = square_chain.levels[0].repelling
    rng = np.random.default_rng(21)
    for x in rng.uniform(0.0, 1.0, 200):
        x = float(x)
        assert abs(g_morse(square_ev, x) - g_pair(x, a, r)) <= 1e-12


def test_verify_monotone_square(square_ev):
    rep = verify_monotone(square_map(), square_ev, samples=300, steps=4, seed=0)
    assert rep["violations"] == []
    assert rep["checked"] == 300
    assert rep["min_shared_decrement"] >= 0.0
    assert rep["max_independent_gap"] <= rep["tolerance"]
    assert not rep["degenerate"]


def test_verify_monotone_degenerate_is_zero():
    chain = leveled_decomposition(doubling_map(), n_boxes=256)
    ev = evaluator_from_chain(chain)
    rep = verify_monotone(doubling_map(), ev, samples=100, steps=3, seed=1)
    assert rep["degenerate"]
    assert rep["violations"] == []
    assert rep["min_shared_decrement"] == 0.0
    v, _ = v_value(ev, doubling_map(), 0.37)
    assert v == 0.0


def test_verify_monotone_sqrt2():
    f = sqrt2_lorenz_map()
    ev = evaluator_from_chain(leveled_decomposition(f, n_boxes=256))
    rep = verify_monotone(f, ev, samples=200, steps=3, seed=2)
    assert rep["violations"] == []


def test_alpha_from_v_bands_m1(square_ev, square_chain):
    tol = square_ev.tail_bound + 1e-9
    top = alpha_from_v(1.0, square_ev, square_chain)
    assert top.kind == "repeller" and top.level == 1
    gap = alpha_from_v(0.5, square_ev, square_chain)
    assert gap.kind == "repeller" and gap.level == 1
    bottom = alpha_from_v(0.0, square_ev, square_chain)
    assert bottom.kind == "whole-space"
    edge = alpha_from_v(1.0 + 0.5 * tol, square_ev, square_chain)
    assert edge.kind == "repeller"


def test_alpha_from_v_two_levels():
    # synthetic two-level data: bands at 1 and 1/2, gaps map to the band below
    ev = LyapunovEvaluator(
        morse_sets=(point(1.0), point(0.5), point(0.0)), overlap=empty()
    )
    chain = leveled_decomposition(square_map(), n_boxes=256)
    two = dataclasses.replace(
        chain,
        levels=(chain.levels[0], chain.levels[0]),
        morse_sets=ev.morse_sets,
    )
    assert alpha_from_v(0.5, ev, two).level == 2
    assert alpha_from_v(0.7, ev, two).level == 1
    assert alpha_from_v(0.3, ev, two).level == 2
    assert alpha_from_v(0.25 + 1e-6, ev, two).level == 2  # bottom gap reaches 0


def test_alpha_from_v_rejects_out_of_range(square_ev, square_chain):
    with pytest.raises(AmbiguousLevelError):
        alpha_from_v(1.5, square_ev, square_chain)
    with pytest.raises(AmbiguousLevelError):
        alpha_from_v(-0.2, square_ev, square_chain)


def test_alpha_from_v_degenerate_chain():
    chain = leveled_decomposition(doubling_map(), n_boxes=256)
    ev = evaluator_from_chain(chain)
    assert alpha_from_v(0.0, ev, chain).kind == "whole-space"
    with pytest.raises(AmbiguousLevelError):
        alpha_from_v(0.5, ev, chain)  # no level can produce this value


def test_alpha_from_v_truncated_chain(square_ev, square_chain):
    capped = dataclasses.replace(square_chain, truncated=True)
    out = alpha_from_v(0.0, square_ev, capped)
    assert out.kind == "unresolved"
