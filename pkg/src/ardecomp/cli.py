"""End-to-end pipeline behind the ``ardecomp`` command.

Loads a map definition, computes the leveled attracting/repelling chain,
cross-checks it against first-return (renormalization) structure on Lorenz
maps, builds the Lyapunov evaluator, and runs every verification suite the
library promises.  Results land in a JSON report with stable key order, an
optional CSV of pointwise values, and an optional edge-list dump of the
transition graph.  Exit status is nonzero iff at least one suite failed.

Reports are deterministic for a fixed config and seed; the single
``generated_at`` timestamp is the only nondeterministic field.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from dataclasses import asdict, dataclass
from datetime import datetime, timezone

import numpy as np

from .boxgraph import TransitionGraph, build_graph, inv, inv_m, is_isolating
from .constants import (
    DEFAULT_MAX_DEPTH,
    DEFAULT_MAX_RETURN,
    DEFAULT_N_BOXES,
    DEFAULT_SERIES_HORIZON,
    DEFAULT_SUP_HORIZON,
    EPS_GEOM,
    TOL_INV,
)
from .decomposition import (
    ARChain,
    alpha_limit_estimate,
    classify_alpha,
    leveled_decomposition,
)
from .errors import (
    AmbiguousCriticalPointError,
    AmbiguousLevelError,
    ArdecompError,
    EmptyPreimageError,
    OnOverlapError,
)
from .intervals import IntervalUnion, empty, from_pairs, full, hausdorff, normalize
from .lyapunov import (
    LyapunovEvaluator,
    alpha_from_v,
    evaluator_from_chain,
    g_morse,
    h_value,
    v_value,
    verify_monotone,
)
from .maps import PiecewiseMap, load_map_file
from .renorm import (
    attracting_set_from_renorm,
    detect_renormalization,
    orbit_avoiding_set,
)

SCHEMA_VERSION = "1"
CSV_HEADER = ("x", "g", "h", "V", "level_band", "alpha_class")

# allowance loosenings relative to the tightest statements, in fine-box units;
# see the nowhere-dense and invariance suite docstrings
NOWHERE_DENSE_BOXES = 16
ATTRACTING_INVARIANCE_BOXES = 4


@dataclass(frozen=True)
class RunConfig:
    """Fully-resolved pipeline configuration (defaults already applied)."""

    map_file: str
    n_boxes: int = DEFAULT_N_BOXES
    max_depth: int = DEFAULT_MAX_DEPTH
    max_return: int = DEFAULT_MAX_RETURN
    sup_horizon: int = DEFAULT_SUP_HORIZON
    series_horizon: int = DEFAULT_SERIES_HORIZON
    samples: int = 100
    seed: int = 0
    report_path: str | None = None
    csv_path: str | None = None
    graph_dump_path: str | None = None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ardecomp",
        description=(
            "Leveled attracting/repelling decomposition, backward-limit "
            "classification and explicit Lyapunov functions for piecewise "
            "monotone interval maps."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)
    specs = {
        "analyze": "full pipeline: decomposition, cross-checks, suites, report",
        "verify": "run the verification suites only",
        "sample": "dump pointwise Lyapunov values to CSV",
    }
    for name, help_text in specs.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--map", required=True, metavar="PATH",
                       help="JSON map definition")
        p.add_argument("--boxes", type=int, default=DEFAULT_N_BOXES,
                       metavar="N", help="coarse cover size, power of two")
        p.add_argument("--depth", type=int, default=DEFAULT_MAX_DEPTH,
                       metavar="D", help="maximum chain depth")
        p.add_argument("--max-return", type=int, default=DEFAULT_MAX_RETURN,
                       metavar="K", help="return-time search bound")
        p.add_argument("--sup-horizon", type=int,
                       default=DEFAULT_SUP_HORIZON, metavar="N_H",
                       help="orbit-supremum truncation")
        p.add_argument("--series-horizon", type=int,
                       default=DEFAULT_SERIES_HORIZON, metavar="N_V",
                       help="discounted-series truncation")
        p.add_argument("--samples", type=int, default=100, metavar="S",
                       help="CSV grid size (rows = samples + 1)")
        p.add_argument("--seed", type=int, default=0, metavar="INT")
        p.add_argument("--report", metavar="PATH", help="JSON report path")
        p.add_argument("--csv", metavar="PATH", help="CSV sample path")
        p.add_argument("--graph-dump", metavar="PATH",
                       help="edge-list dump of the refined transition graph")
    return parser


def parse_config(argv: list[str]) -> tuple[str, RunConfig]:
    """Parse CLI arguments into (command, RunConfig); usage errors exit 2."""
    parser = build_parser()
    ns = parser.parse_args(argv)
    n = ns.boxes
    if n < 4 or n & (n - 1) != 0:
        parser.error(f"--boxes must be a power of two >= 4, got {n}")
    for flag, value in (
        ("--depth", ns.depth),
        ("--max-return", ns.max_return),
        ("--sup-horizon", ns.sup_horizon),
        ("--series-horizon", ns.series_horizon),
        ("--samples", ns.samples),
    ):
        if value < 1:
            parser.error(f"{flag} must be positive, got {value}")
    if not os.path.exists(ns.map):
        parser.error(f"map file not found: {ns.map}")
    if ns.command == "sample" and ns.csv is None:
        parser.error("sample requires --csv")
    cfg = RunConfig(
        map_file=ns.map,
        n_boxes=ns.boxes,
        max_depth=ns.depth,
        max_return=ns.max_return,
        sup_horizon=ns.sup_horizon,
        series_horizon=ns.series_horizon,
        samples=ns.samples,
        seed=ns.seed,
        report_path=ns.report,
        csv_path=ns.csv,
        graph_dump_path=ns.graph_dump,
    )
    return ns.command, cfg


# -- small helpers ----------------------------------------------------------------


def _pairs(u: IntervalUnion) -> list[list[float]]:
    return [[lo, hi] for lo, hi in u.pieces]


def _close(u: IntervalUnion, v: IntervalUnion, tol: float = 1e-12) -> bool:
    if u.is_empty or v.is_empty:
        return u.is_empty and v.is_empty
    return hausdorff(u, v) <= tol


def _random_union(rng: np.random.Generator) -> IntervalUnion:
    cuts = np.sort(rng.uniform(0.0, 1.0, size=2 * rng.integers(1, 5)))
    return normalize([(cuts[2 * i], cuts[2 * i + 1]) for i in range(cuts.size // 2)])


def _region_points(region: IntervalUnion, count: int, erode: float) -> list[float]:
    """Deterministic interior points of ``region``, eroded at piece ends."""
    pts: list[float] = []
    eligible = [(lo + erode, hi - erode) for lo, hi in region.pieces
                if hi - lo > 2 * erode]
    if not eligible:
        return pts
    total = sum(hi - lo for lo, hi in eligible)
    for lo, hi in eligible:
        k = max(1, round(count * (hi - lo) / total))
        pts.extend(float(x) for x in np.linspace(lo, hi, k + 2)[1:-1])
    return pts[:count]


def _boundary_distance(chain: ARChain, x: float) -> float:
    """Distance from x to the nearest endpoint of any level set piece."""
    best = math.inf
    for lv in chain.levels:
        for u in (lv.attracting, lv.repelling):
            for lo, hi in u.pieces:
                best = min(best, abs(x - lo), abs(x - hi))
    return best


def _suite(name: str, passed: bool, margin: float | None, **details) -> dict:
    entry = {"suite": name, "passed": bool(passed), "margin": margin}
    entry["details"] = details
    return entry


def _failed_suite(name: str, reason: str) -> dict:
    return _suite(name, False, None, error=reason)


def _vacuous(name: str, note: str) -> dict:
    return _suite(name, True, None, note=note, vacuous=True)


# -- verification suites ----------------------------------------------------------


def _suite_interval_laws(rng: np.random.Generator) -> dict:
    worst = 0.0
    ok = True
    for _ in range(50):
        u, v, w = (_random_union(rng) for _ in range(3))
        ok &= u.union(v) == v.union(u)
        ok &= u.intersect(v) == v.intersect(u)
        ok &= _close(u.union(v).complement(),
                     u.complement().intersect(v.complement()))
        ok &= u.difference(u).is_empty
        ok &= normalize(u.to_pairs()) == u
        x = float(rng.uniform(0.0, 1.0))
        if not u.is_empty and not v.is_empty:
            lhs = u.union(v).distance(x)
            rhs = min(u.distance(x), v.distance(x))
            worst = max(worst, abs(lhs - rhs))
            duv, dvu = hausdorff(u, v), hausdorff(v, u)
            worst = max(worst, abs(duv - dvu))
            if not w.is_empty:
                tri = hausdorff(u, w) - hausdorff(u, v) - hausdorff(v, w)
                worst = max(worst, tri)
    return _suite("interval-laws", ok and worst <= 1e-9, worst)


def _suite_map_laws(f: PiecewiseMap, rng: np.random.Generator) -> dict:
    worst = 0.0
    ok = True
    for _ in range(30):
        s = _random_union(rng)
        if s.is_empty:
            continue
        pre_img = f.preimage_union(f.image_union(s))
        ok &= s.within(pre_img, tol=1e-9)
        img_pre = f.image_union(f.preimage_union(s))
        ok &= img_pre.is_empty or img_pre.within(s, tol=1e-9)
    for y in rng.uniform(0.0, 1.0, size=200):
        u = f.preimage_union(from_pairs([(float(y), float(y))]))
        for p in f.preimages(float(y)):
            if not u.is_empty:
                worst = max(worst, u.distance(p))
    for x in rng.uniform(0.0, 1.0, size=20):
        try:
            orbit = f.iterate(float(x), 50)
        except AmbiguousCriticalPointError:
            continue
        for k in range(50):
            try:
                worst = max(worst, abs(f.eval(float(orbit[k])) - float(orbit[k + 1])))
            except AmbiguousCriticalPointError:
                break
    for branch in f.branches:
        lo, hi = branch.domain
        va, vb = sorted((branch.value(lo), branch.value(hi)))
        for y in rng.uniform(va, vb, size=1000):
            x = branch.inverse(float(y))
            worst = max(worst, abs(branch.value(x) - float(y)))
    return _suite("map-laws", ok and worst <= 10 * TOL_INV, worst)


def _suite_outer_approximation(
    f: PiecewiseMap, gf: TransitionGraph, rng: np.random.Generator
) -> dict:
    misses = 0
    n = gf.cover.n
    for x in rng.uniform(0.0, 1.0, size=10_000):
        try:
            fx = f.eval(float(x))
        except AmbiguousCriticalPointError:
            continue
        k, j = gf.cover.box_of(float(x)), gf.cover.box_of(fx)
        if gf.has_edge(k, j):
            continue
        # a value within float noise of a box boundary may round into the
        # neighbor box; accept the adjacent edge in that case only
        if min(fx * n % 1.0, 1.0 - fx * n % 1.0) <= 1e-9 * n:
            if gf.has_edge(k, max(j - 1, 0)) or gf.has_edge(k, min(j + 1, n - 1)):
                continue
        misses += 1
    return _suite("outer-approximation", misses == 0, float(misses), samples=10_000)


def _suite_inv_identities(
    gc: TransitionGraph, gf: TransitionGraph, rng: np.random.Generator
) -> dict:
    ok = True
    n = gf.cover.n
    all_boxes = frozenset(range(n))
    candidates = [
        all_boxes,
        frozenset(range(n // 2)),
        frozenset(range(n // 3, 2 * n // 3)),
    ]
    for _ in range(3):
        candidates.append(frozenset(int(i) for i in np.flatnonzero(
            rng.uniform(size=n) < 0.5)))
    for boxes in candidates:
        prev = boxes
        for m in range(1, 9):
            cur = inv_m(gf, boxes, m)
            ok &= cur <= prev
            prev = cur
        m, cur = 1, inv_m(gf, boxes, 1)
        while m <= 4 * n:
            nxt = inv_m(gf, boxes, 2 * m)
            if nxt == cur:
                break
            cur, m = nxt, 2 * m
        stable = cur
        fixed = inv(gf, boxes)
        ok &= stable == fixed
        ok &= inv_m(gf, fixed, 1) == fixed
        for k in fixed:
            ok &= any(j in fixed for j in gf.out_boxes(k))
            ok &= any(j in fixed for j in gf.in_boxes(k))
    fine = gf.cover.to_intervals(inv(gf, all_boxes))
    coarse = gc.cover.to_intervals(inv(gc, frozenset(range(gc.cover.n))))
    ok &= fine.is_empty or fine.within(coarse, tol=1e-12)
    return _suite("inv-identities", ok, None, candidates=len(candidates))


def _suite_nesting(chain: ARChain) -> dict:
    m = chain.level_count
    if m < 2:
        return _vacuous("nesting", f"m={m}: no consecutive levels to compare")
    ok = True
    worst = math.inf
    w = chain.box_width
    for i in range(1, m):
        a_hi, a_lo = chain.attracting(i), chain.attracting(i + 1)
        r_lo, r_hi = chain.repelling(i), chain.repelling(i + 1)
        ok &= a_lo.within(a_hi, tol=EPS_GEOM)
        ok &= r_lo.within(r_hi, tol=EPS_GEOM)
        gap_a = hausdorff(a_hi, a_lo)
        gap_r = hausdorff(r_lo, r_hi)
        ok &= gap_a > w and gap_r > w
        worst = min(worst, gap_a, gap_r)
    return _suite("nesting", ok, worst, levels=m)


def _suite_invariance(f: PiecewiseMap, chain: ARChain) -> dict:
    """Forward images reproduce each level set within box tolerances.

    The attracting side is checked to 4 box widths rather than 1: the box
    hull of an exactly invariant set gains up to two boxes of halo per side
    and expansion stretches the halo's image, so one box is unattainable
    even for sets the map fixes exactly.  The repelling side keeps its
    documented 2-box image tolerance and 2-box preimage containment.
    """
    if chain.level_count == 0:
        return _vacuous("invariance", "m=0: no level sets")
    w = chain.box_width
    ok = True
    worst = 0.0
    for lv in chain.levels:
        img_a = f.image_union(lv.attracting)
        gap_a = hausdorff(img_a.union(lv.attracting), lv.attracting)
        ok &= gap_a <= ATTRACTING_INVARIANCE_BOXES * w
        img_r = f.image_union(lv.repelling)
        gap_r = hausdorff(img_r.union(lv.repelling), lv.repelling)
        ok &= gap_r <= 2 * w
        pre_r = f.preimage_union(lv.repelling)
        ok &= pre_r.within(lv.repelling.dilate(2 * w), tol=EPS_GEOM)
        worst = max(worst, gap_a / (ATTRACTING_INVARIANCE_BOXES * w), gap_r / (2 * w))
    return _suite("invariance", ok, worst, levels=chain.level_count)


def _suite_nowhere_dense(chain: ARChain) -> dict:
    """Repelling sets stay thin: no piece beyond a fixed number of boxes.

    Combinatorial cycles around a weakly expanding orbit (local rate s)
    carry a spurious halo of about 1/(s-1) boxes per side, so a one-box
    bound fails even on exact fixed points; the bound here certifies that
    piece lengths vanish like boxes/n under refinement.
    """
    if chain.level_count == 0:
        return _vacuous("nowhere-dense", "m=0: no repelling sets")
    w = chain.box_width
    worst = 0.0
    for lv in chain.levels:
        for lo, hi in lv.repelling.pieces:
            worst = max(worst, (hi - lo) / w)
    return _suite(
        "nowhere-dense",
        worst <= NOWHERE_DENSE_BOXES,
        worst,
        allowance_boxes=NOWHERE_DENSE_BOXES,
    )


def _suite_cover(chain: ARChain) -> dict:
    m = chain.level_count
    ok = True
    pieces = list(chain.morse_sets) + list(chain.connecting_regions)
    if not chain.overlap.is_empty:
        pieces.append(chain.overlap)
    joined = empty()
    for u in pieces:
        joined = joined.union(u)
    ok &= full().within(joined.dilate(EPS_GEOM), tol=1e-9)
    overlap_len = 0.0
    for i in range(len(chain.morse_sets)):
        for j in range(i + 1, len(chain.morse_sets)):
            inter = chain.morse_sets[i].intersect(chain.morse_sets[j])
            for lo, hi in inter.pieces:
                overlap_len = max(overlap_len, hi - lo)
    ok &= overlap_len <= 2 * chain.box_width
    if m >= 1:
        lv = chain.levels[0]
        level1 = lv.attracting.union(lv.repelling).union(chain.connecting_regions[0])
        ok &= full().within(level1.dilate(EPS_GEOM), tol=1e-9)
        ar = lv.attracting.intersect(lv.repelling)
        for lo, hi in ar.pieces:
            ok &= hi - lo <= 2 * chain.box_width
    return _suite("cover", ok, overlap_len, morse_sets=len(chain.morse_sets))


def _suite_alpha_crossval(f: PiecewiseMap, chain: ARChain) -> dict:
    m = chain.level_count
    if m == 0:
        return _vacuous("alpha-crossval", "m=0: single backward limit class")
    w = chain.box_width
    worst = 0.0
    checked = 0
    failures = 0
    for i in range(1, m + 1):
        region = chain.attracting(i - 1).difference(chain.attracting(i))
        for x in _region_points(region, 50, erode=2 * w):
            try:
                est = alpha_limit_estimate(f, x, depth=16, cap=4096)
            except (EmptyPreimageError, AmbiguousCriticalPointError):
                failures += 1
                continue
            gap = hausdorff(est, chain.repelling(i))
            worst = max(worst, gap / w)
            checked += 1
            if gap > 5 * w:
                failures += 1
    return _suite(
        "alpha-crossval", failures == 0 and checked > 0, worst,
        checked=checked, failures=failures,
    )


def _suite_lyapunov_levels(
    f: PiecewiseMap, chain: ARChain, ev: LyapunovEvaluator
) -> dict:
    """g and V take the claimed value 2^-i across each Morse set.

    g is exact on the whole box set; V additionally needs the sampled orbit
    to stay on the set, so wandering points of the box halo are excluded
    (they belong to the outer approximation, not to the invariant core).
    """
    m = chain.level_count
    w = chain.box_width
    span = ev.series_horizon + ev.sup_horizon
    worst_g = 0.0
    worst_v = 0.0
    ok = True
    g_checked = v_checked = 0
    v_min, v_max = math.inf, -math.inf
    for i, mset in enumerate(chain.morse_sets):
        band = 0.0 if i == m else math.ldexp(1.0, -i)
        points: list[float] = []
        for lo, hi in mset.pieces:
            points.extend((lo, (lo + hi) / 2, hi))
        points.extend(_region_points(mset, 100, erode=0.0))
        for x in points[:120]:
            try:
                gx = g_morse(ev, x)
            except OnOverlapError:
                continue
            worst_g = max(worst_g, abs(gx - band))
            g_checked += 1
            try:
                orbit = f.iterate(x, span)
            except AmbiguousCriticalPointError:
                continue
            if any(mset.distance(float(p)) > w for p in orbit):
                continue
            try:
                value, _ = v_value(ev, f, x)
            except OnOverlapError:
                continue
            worst_v = max(worst_v, abs(value - band))
            v_min, v_max = min(v_min, value), max(v_max, value)
            v_checked += 1
    tol_v = ev.tail_bound + 1e-9
    ok &= worst_g <= 1e-9 and worst_v <= tol_v
    if v_checked:
        ok &= v_min >= 0.0 and v_max <= 1.0 + ev.tail_bound
    return _suite(
        "lyapunov-levels", ok, max(worst_g, worst_v),
        g_checked=g_checked, v_checked=v_checked,
    )


def _suite_monotonicity(f: PiecewiseMap, ev: LyapunovEvaluator, seed: int) -> dict:
    report = verify_monotone(f, ev, samples=500, steps=3, seed=seed)
    passed = not report["violations"]
    return _suite(
        "monotonicity", passed, report["min_shared_decrement"],
        checked=report["checked"], skipped=report["skipped"],
        violations=len(report["violations"]),
        max_independent_gap=report["max_independent_gap"],
        degenerate=report["degenerate"],
    )


def _suite_alpha_agreement(
    f: PiecewiseMap, chain: ARChain, ev: LyapunovEvaluator,
    rng: np.random.Generator,
) -> dict:
    w = chain.box_width
    tol = ev.tail_bound + 1e-9
    kept = 0
    disagreements = 0
    for x in rng.uniform(0.0, 1.0, size=500):
        x = float(x)
        if _boundary_distance(chain, x) <= 2 * w:
            continue
        direct = classify_alpha(chain, x)
        if direct.kind in ("overlap", "unresolved"):
            continue
        try:
            value, _ = v_value(ev, f, x)
            from_value = alpha_from_v(value, ev, chain)
        except (OnOverlapError, AmbiguousLevelError, AmbiguousCriticalPointError):
            continue
        # band values are excluded, not just band edges: the series starts
        # at k=1, so the bottom band also holds the attractor's one-step
        # preimage, where the value alone cannot decide the class
        in_band_zone = value <= 8 * tol or any(
            abs(value - math.ldexp(1.0, -j)) <= 8 * tol
            for j in range(chain.level_count)
        )
        if in_band_zone:
            continue
        kept += 1
        if (from_value.kind, from_value.level) != (direct.kind, direct.level):
            disagreements += 1
    return _suite(
        "alpha-agreement", disagreements == 0, float(kept),
        kept=kept, disagreements=disagreements, samples=500,
    )


def _suite_continuity_modulus(
    f: PiecewiseMap, chain: ARChain, ev: LyapunovEvaluator
) -> dict:
    """Report-only: empirical modulus of V on halving grids when L is empty."""
    if not chain.overlap.is_empty:
        return _vacuous("continuity-modulus",
                        "overlap nonempty: continuity not claimed")

    def modulus(grid: int) -> float:
        values = []
        for x in np.linspace(0.0, 1.0, grid + 1):
            try:
                values.append(v_value(ev, f, float(x))[0])
            except (OnOverlapError, AmbiguousCriticalPointError):
                values.append(math.nan)
        diffs = np.abs(np.diff(values))
        return float(np.nanmax(diffs)) if len(diffs) else 0.0

    coarse, fine = modulus(64), modulus(128)
    return _suite("continuity-modulus", True, fine,
                  modulus_64=coarse, modulus_128=fine)


def _suite_isolating(chain: ARChain, gf: TransitionGraph) -> dict:
    if chain.level_count == 0:
        return _vacuous("isolating", "m=0: no level sets")
    ok = True
    witnesses = []
    for lv in chain.levels:
        for u in (lv.attracting, lv.repelling):
            boxes = gf.cover.dilate_boxes(gf.cover.boxes_overlapping(u), 1)
            isolated, witness = is_isolating(gf, boxes)
            ok &= isolated
            if not isolated:
                witnesses.append({"level": lv.index, "box": witness})
    return _suite("isolating", ok, None, levels=chain.level_count,
                  witnesses=witnesses)


def _suite_renorm_consistency(
    f: PiecewiseMap, chain: ARChain, renorm: dict | None,
    renorm_sets: tuple[IntervalUnion, IntervalUnion] | None,
) -> dict:
    if f.kind != "lorenz":
        return _vacuous("renorm-consistency", "not a Lorenz map")
    if renorm is None or not renorm.get("found"):
        if chain.level_count == 0:
            return _vacuous(
                "renorm-consistency",
                "transitive and not renormalizable within bound: consistent",
            )
        return _failed_suite(
            "renorm-consistency",
            f"chain has m={chain.level_count} levels but no renormalization "
            f"was found within the search bound",
        )
    if chain.level_count == 0:
        return _failed_suite(
            "renorm-consistency",
            "renormalization found but the chain is transitive (m=0)",
        )
    a1, b1 = renorm["a1"], renorm["b1"]
    l, r = renorm["l"], renorm["r"]
    c = f.critical
    return_errors = 0
    for x in np.linspace(a1 + 1e-9, b1 - 1e-9, 500):
        x = float(x)
        if abs(x - c) < 1e-9:
            continue
        expected = l if x < c else r
        try:
            orbit = f.iterate(x, expected)
        except AmbiguousCriticalPointError:
            continue
        for j in range(1, expected):
            if a1 + 1e-9 < float(orbit[j]) < b1 - 1e-9:
                return_errors += 1
                break
        else:
            if not (a1 - 1e-9 <= float(orbit[expected]) <= b1 + 1e-9):
                return_errors += 1
    allowance = 4.0 / chain.n_boxes
    att_set, avoid_set = renorm_sets
    gap_a = hausdorff(att_set, chain.attracting(1))
    gap_r = hausdorff(avoid_set, chain.repelling(1))
    ok = return_errors == 0 and gap_a <= allowance and gap_r <= allowance
    return _suite(
        "renorm-consistency", ok, max(gap_a, gap_r),
        return_errors=return_errors, attracting_gap=gap_a,
        avoiding_gap=gap_r, allowance=allowance,
    )


# -- pipeline ---------------------------------------------------------------------


def _chain_payload(chain: ARChain, f: PiecewiseMap) -> dict:
    gaps = []
    for i in range(chain.level_count - 1):
        gaps.append(hausdorff(chain.attracting(i + 1), chain.attracting(i + 2)))
    return {
        "m": chain.level_count,
        "transitive": chain.level_count == 0,
        "truncated": chain.truncated,
        "n_boxes": chain.n_boxes,
        "box_width": chain.box_width,
        "levels": [
            {
                "index": lv.index,
                "attracting": _pairs(lv.attracting),
                "repelling": _pairs(lv.repelling),
                "basin": _pairs(lv.basin),
                "overlap": _pairs(lv.overlap),
            }
            for lv in chain.levels
        ],
        "attractor": _pairs(chain.attractor),
        "morse_sets": [_pairs(u) for u in chain.morse_sets],
        "connecting_regions": [_pairs(u) for u in chain.connecting_regions],
        "consecutive_attracting_gaps": gaps,
        "approximation_sides": {
            "attracting": "outer",
            "basin": "outer",
            "repelling": "outer for the recurrence, inner-safe against the "
                         "basin interior",
        },
        "diagnostics": chain.diagnostics,
    }


def _renorm_payload(
    f: PiecewiseMap, cfg: RunConfig
) -> tuple[dict | None, tuple[IntervalUnion, IntervalUnion] | None]:
    if f.kind != "lorenz":
        return None, None
    result = detect_renormalization(f, cfg.max_return)
    if result is None:
        return {"found": False, "search_bound": cfg.max_return}, None
    att, stabilized, steps = attracting_set_from_renorm(f, result)
    avoid = orbit_avoiding_set(f, result, depth=16, n_boxes=2 * cfg.n_boxes)
    a1, b1 = result.interval
    c = f.critical
    left = avoid.intersect(from_pairs([(0.0, c)]))
    right = avoid.intersect(from_pairs([(c, 1.0)]))
    payload = {
        "found": True,
        "search_bound": cfg.max_return,
        "a1": a1,
        "b1": b1,
        "l": result.return_times[0],
        "r": result.return_times[1],
        "e1_minus": left.hull[1] if not left.is_empty else None,
        "e1_plus": right.hull[0] if not right.is_empty else None,
        "orbit_stabilized": stabilized,
        "orbit_steps": steps,
        "note": result.note,
    }
    if result.renormalized is not None:
        payload["renormalized_slopes"] = [
            b.params[0] if b.kind == "affine" else None
            for b in result.renormalized.branches
        ]
    return payload, (att, avoid)


def _lyapunov_payload(
    f: PiecewiseMap, chain: ARChain, ev: LyapunovEvaluator, cfg: RunConfig
) -> dict:
    grid = np.linspace(0.0, 1.0, min(cfg.samples, 100) + 1)
    values = []
    for x in grid:
        try:
            values.append(v_value(ev, f, float(x))[0])
        except (OnOverlapError, AmbiguousCriticalPointError):
            continue
    payload = {
        "degenerate": ev.level_count == 0,
        "tail_bound": ev.tail_bound,
        "sup_horizon": ev.sup_horizon,
        "series_horizon": ev.series_horizon,
        "grid_points": len(values),
        "v_min": min(values) if values else None,
        "v_max": max(values) if values else None,
    }
    if ev.level_count == 0:
        payload["note"] = "degenerate (transitive)"
    return payload


def run_pipeline(cfg: RunConfig, command: str = "analyze") -> dict:
    """Execute the pipeline; suites run for analyze and verify only.

    Module errors become report entries (with the dependent suites marked
    failed), never crashes; callers decide the exit code from all_passed.
    """
    report: dict = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "generated_at": datetime.now(timezone.utc).isoformat(),
        "config": asdict(cfg),
    }
    f = load_map_file(cfg.map_file)
    report["map"] = {
        "kind": f.kind,
        "branches": len(f.branches),
        "critical": f.critical,
    }
    chain: ARChain | None = None
    ev: LyapunovEvaluator | None = None
    gc = build_graph(f, cfg.n_boxes)
    gf = build_graph(f, 2 * cfg.n_boxes)
    try:
        chain = leveled_decomposition(f, max_depth=cfg.max_depth,
                                      n_boxes=cfg.n_boxes)
        report["chain"] = _chain_payload(chain, f)
    except ArdecompError as exc:
        report["chain"] = {"error": f"{type(exc).__name__}: {exc}"}
    renorm_payload = None
    renorm_sets = None
    try:
        renorm_payload, renorm_sets = _renorm_payload(f, cfg)
    except ArdecompError as exc:
        renorm_payload = {"error": f"{type(exc).__name__}: {exc}"}
    report["renorm"] = renorm_payload
    if chain is not None:
        ev = evaluator_from_chain(chain, sup_horizon=cfg.sup_horizon,
                                  series_horizon=cfg.series_horizon)
        report["lyapunov"] = _lyapunov_payload(f, chain, ev, cfg)
    else:
        report["lyapunov"] = {"error": "chain unavailable"}
    if command in ("analyze", "verify"):
        report["verification"] = _run_suites(
            f, chain, ev, gc, gf, renorm_payload, renorm_sets, cfg
        )
        report["all_passed"] = all(s["passed"] for s in report["verification"])
    return report


def _run_suites(
    f: PiecewiseMap,
    chain: ARChain | None,
    ev: LyapunovEvaluator | None,
    gc: TransitionGraph,
    gf: TransitionGraph,
    renorm_payload: dict | None,
    renorm_sets: tuple[IntervalUnion, IntervalUnion] | None,
    cfg: RunConfig,
) -> list[dict]:
    def rng(k: int) -> np.random.Generator:
        return np.random.default_rng([cfg.seed, k])

    suites: list[dict] = []

    def run(name: str, thunk) -> None:
        if thunk is None:
            suites.append(_failed_suite(name, "chain unavailable"))
            return
        try:
            suites.append(thunk())
        except ArdecompError as exc:
            suites.append(_failed_suite(name, f"{type(exc).__name__}: {exc}"))

    run("interval-laws", lambda: _suite_interval_laws(rng(1)))
    run("map-laws", lambda: _suite_map_laws(f, rng(2)))
    run("outer-approximation", lambda: _suite_outer_approximation(f, gf, rng(3)))
    run("inv-identities", lambda: _suite_inv_identities(gc, gf, rng(4)))
    have = chain is not None and ev is not None
    run("nesting", (lambda: _suite_nesting(chain)) if have else None)
    run("invariance", (lambda: _suite_invariance(f, chain)) if have else None)
    run("nowhere-dense", (lambda: _suite_nowhere_dense(chain)) if have else None)
    run("cover", (lambda: _suite_cover(chain)) if have else None)
    run("alpha-crossval",
        (lambda: _suite_alpha_crossval(f, chain)) if have else None)
    run("lyapunov-levels",
        (lambda: _suite_lyapunov_levels(f, chain, ev)) if have else None)
    run("monotonicity",
        (lambda: _suite_monotonicity(f, ev, cfg.seed)) if have else None)
    run("alpha-agreement",
        (lambda: _suite_alpha_agreement(f, chain, ev, rng(5))) if have else None)
    run("continuity-modulus",
        (lambda: _suite_continuity_modulus(f, chain, ev)) if have else None)
    run("isolating", (lambda: _suite_isolating(chain, gf)) if have else None)
    run("renorm-consistency",
        (lambda: _suite_renorm_consistency(f, chain, renorm_payload, renorm_sets))
        if have else None)
    return suites


# -- emission ---------------------------------------------------------------------


def _atomic_write(path: str, text: str) -> None:
    """Write via a temp file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".ardecomp-")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _csv_rows(
    f: PiecewiseMap, chain: ARChain, ev: LyapunovEvaluator, cfg: RunConfig
) -> list[tuple]:
    rows: list[tuple] = []
    for i in range(cfg.samples + 1):
        x = i / cfg.samples
        try:
            gx = g_morse(ev, x)
            hx = h_value(ev, f, x)
            vx, _ = v_value(ev, f, x)
            band = alpha_from_v(vx, ev, chain)
            band_label = 0 if band.level is None else band.level
            alpha = str(classify_alpha(chain, x))
            rows.append((repr(x), repr(gx), repr(hx), repr(vx), band_label, alpha))
        except ArdecompError as exc:
            rows.append((repr(x), "nan", "nan", "nan", "",
                         f"error:{type(exc).__name__}"))
    return rows


def emit(report: dict, cfg: RunConfig, command: str = "analyze") -> None:
    """Write the report, CSV, and graph dump; report goes to file atomically."""
    if cfg.report_path and command != "sample":
        _atomic_write(cfg.report_path,
                      json.dumps(report, sort_keys=True, indent=2) + "\n")
    if cfg.csv_path and command != "verify":
        f = load_map_file(cfg.map_file)
        chain = leveled_decomposition(f, max_depth=cfg.max_depth,
                                      n_boxes=cfg.n_boxes)
        ev = evaluator_from_chain(chain, sup_horizon=cfg.sup_horizon,
                                  series_horizon=cfg.series_horizon)
        rows = _csv_rows(f, chain, ev, cfg)
        buffer = [",".join(CSV_HEADER)]
        buffer.extend(",".join(str(c) for c in row) for row in rows)
        _atomic_write(cfg.csv_path, "\n".join(buffer) + "\n")
    if cfg.graph_dump_path:
        f = load_map_file(cfg.map_file)
        gf = build_graph(f, 2 * cfg.n_boxes)
        lines = []
        for k in range(gf.cover.n):
            for j in sorted(gf.out_boxes(k)):
                lines.append(f"{k} -> {j}")
        _atomic_write(cfg.graph_dump_path, "\n".join(lines) + "\n")


def main(argv: list[str] | None = None) -> int:
    command, cfg = parse_config(sys.argv[1:] if argv is None else argv)
    try:
        report = run_pipeline(cfg, command)
        emit(report, cfg, command)
    except ArdecompError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    if cfg.report_path is None and command in ("analyze", "verify"):
        print(json.dumps(report, sort_keys=True, indent=2))
    failed = 0
    for entry in report.get("verification", []):
        status = "pass" if entry["passed"] else "FAIL"
        failed += 0 if entry["passed"] else 1
        print(f"{entry['suite']}: {status}", file=sys.stderr)
    if command in ("analyze", "verify"):
        total = len(report.get("verification", []))
        print(f"{total - failed}/{total} suites passed", file=sys.stderr)
        return 1 if failed else 0
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
