"""Piecewise-monotone maps: branch inverses, validation, JSON, builders.

The branch-inverse oracle is frozen first: 0.9^(1/2^20) computed two
independent ways (float pow and exp/log) agrees to the last bit, so the
20-fold preimage chain has a trusted closed-form target.
"""

import math

import numpy as np
import pytest

from ardecomp.errors import AmbiguousCriticalPointError, MapValidationError
from ardecomp.intervals import from_pairs, full, hausdorff
from ardecomp.maps import (
    Branch,
    PiecewiseMap,
    doubling_map,
    load_map_file,
    logistic_map,
    map_from_json,
    map_to_json,
    pl_lorenz_map,
    sqrt2_lorenz_map,
    square_map,
)

# 0.9 ** (2.0 ** -20.0) == math.exp(math.log(0.9) / 2 ** 20), checked offline
INVERSE_CHAIN_TARGET = 0.9999998995203873


def test_branch_inverse_chain_against_closed_form():
    f = square_map()
    x = 0.9
    for _ in range(20):
        pre = f.preimages(x)
        assert len(pre) == 1
        x = pre[0]
    assert x == pytest.approx(INVERSE_CHAIN_TARGET, abs=1e-15)
    # and the chain really inverts: iterating forward 20 times returns 0.9
    assert float(f.iterate(x, 20)[-1]) == pytest.approx(0.9, abs=1e-9)


def test_preimages_enumerate_branches():
    assert doubling_map().preimages(0.3) == pytest.approx((0.15, 0.65))
    assert pl_lorenz_map().preimages(0.5) == pytest.approx(
        (0.11538461538461539, 0.8846153846153845)
    )
    # 0 has a single preimage under x^2 even though both "roots" coincide
    assert square_map().preimages(0.0) == (0.0,)


def test_branch_inverse_accuracy_randomized():
    rng = np.random.default_rng(5)
    for f in (square_map(), doubling_map(), sqrt2_lorenz_map(), logistic_map(3.2)):
        for y in rng.uniform(0.001, 0.999, 200):
            y = float(y)
            for x in f.preimages(y):
                side = "left" if f.kind == "lorenz" and x == f.critical else "auto"
                assert f.eval(x, side=side) == pytest.approx(y, abs=1e-10)


def test_iterate_includes_start_and_length():
    f = square_map()
    orbit = f.iterate(0.5, 3)
    assert orbit.shape == (4,)
    assert list(orbit) == [0.5, 0.25, 0.0625, 0.00390625]


def test_critical_point_side_semantics():
    f = doubling_map()
    assert f.eval(0.5, side="left") == 1.0
    assert f.eval(0.5, side="right") == 0.0
    with pytest.raises(AmbiguousCriticalPointError):
        f.eval(0.5)


def test_critical_hit_reports_orbit_index():
    f = doubling_map()
    with pytest.raises(AmbiguousCriticalPointError) as err:
        f.iterate(0.25, 5)  # 0.25 -> 0.5, ambiguous at step 1
    assert err.value.x == 0.5
    assert err.value.index == 1


def test_sqrt2_lorenz_limits():
    f = sqrt2_lorenz_map()
    assert f.critical == 1.0 / math.sqrt(2.0)
    assert f.eval(f.critical, side="left") == 1.0
    assert f.eval(f.critical, side="right") == 0.0
    assert f.eval(1.0) == pytest.approx(0.41421356237309515, abs=1e-15)


def test_pl_lorenz_split_is_float_exact():
    f = pl_lorenz_map()
    assert f.critical == 0.5  # 0.65 / 1.3 rounds to exactly 0.5
    assert f.eval(0.25) == pytest.approx(1.3 * 0.25 + 0.35, abs=1e-15)
    assert f.eval(0.75) == pytest.approx(1.3 * 0.75 - 0.65, abs=1e-15)


def test_validation_rejects_bad_domains():
    b = Branch("affine", (0.2, 1.0), (0.5, 0.0), 1)
    with pytest.raises(MapValidationError) as err:
        PiecewiseMap((b,))
    assert "branches" in str(err.value)


def test_validation_rejects_wrong_orientation():
    b = Branch("affine", (0.0, 1.0), (-0.5, 0.5), 1)  # decreasing, declared inc
    with pytest.raises(MapValidationError) as err:
        PiecewiseMap((b,))
    assert err.value.field == "branches[0]"


def test_validation_rejects_escaping_image():
    b = Branch("affine", (0.0, 1.0), (2.0, 0.0), 1)
    with pytest.raises(MapValidationError):
        PiecewiseMap((b,))


def test_validation_rejects_discontinuity_without_lorenz_kind():
    left = Branch("affine", (0.0, 0.5), (1.0, 0.0), 1)
    right = Branch("affine", (0.5, 1.0), (1.0, -0.5), 1)
    with pytest.raises(MapValidationError) as err:
        PiecewiseMap((left, right), kind="continuous")
    assert "jump" in str(err.value)
    PiecewiseMap((left, right), kind="lorenz", critical=0.5)  # fine as lorenz


def test_validation_rejects_misplaced_critical():
    left = Branch("affine", (0.0, 0.5), (1.0, 0.0), 1)
    right = Branch("affine", (0.5, 1.0), (1.0, -0.5), 1)
    with pytest.raises(MapValidationError) as err:
        PiecewiseMap((left, right), kind="lorenz", critical=0.25)
    assert err.value.field == "critical_point"


def test_json_round_trip():
    for f in (square_map(), doubling_map(), sqrt2_lorenz_map(),
              pl_lorenz_map(), logistic_map(3.2)):
        g = map_from_json(map_to_json(f))
        assert g.kind == f.kind
        assert g.critical == f.critical
        assert len(g.branches) == len(f.branches)
        for x in np.linspace(0.01, 0.99, 37):
            x = float(x)
            if f.kind == "lorenz" and x == f.critical:
                continue
            assert g.eval(x) == f.eval(x)


def test_json_missing_key_names_the_field():
    obj = map_to_json(square_map())
    del obj["branches"][0]["params"]
    with pytest.raises(MapValidationError) as err:
        map_from_json(obj)
    assert err.value.field == "branches[0]"


def test_load_map_file(tmp_path):
    import json

    path = tmp_path / "m.json"
    path.write_text(json.dumps(map_to_json(doubling_map())))
    f = load_map_file(str(path))
    assert f.kind == "lorenz"
    assert f.critical == 0.5


def test_image_preimage_galois_connection():
    rng = np.random.default_rng(13)
    for f in (square_map(), doubling_map(), pl_lorenz_map()):
        for _ in range(20):
            cuts = sorted(rng.uniform(0.0, 1.0, 4))
            s = from_pairs([[cuts[0], cuts[1]], [cuts[2], cuts[3]]])
            # s subset f^-1(f(s)); f(f^-1(s)) subset s
            assert s.within(f.preimage_union(f.image_union(s)), tol=1e-9)
            back = f.image_union(f.preimage_union(s))
            if not back.is_empty:
                assert back.within(s, tol=1e-9)


def test_image_of_full_interval():
    # the doubling map is onto, the square map is onto, pl covers [0,0.35)
    # only via the right branch wrap
    assert hausdorff(doubling_map().image_union(full()), full()) == 0.0
    assert hausdorff(square_map().image_union(full()), full()) == 0.0
    img = pl_lorenz_map().image_union(full())
    assert img.pieces == ((0.0, 1.0),)


def test_preimage_points_land_in_set():
    rng = np.random.default_rng(29)
    f = logistic_map(3.2)
    s = from_pairs([[0.2, 0.4]])
    pre = f.preimage_union(s)
    for x in rng.uniform(0.0, 1.0, 200):
        x = float(x)
        if pre.contains(x, mode="interior", eps=1e-9):
            assert s.contains(f.eval(x), eps=1e-9)
