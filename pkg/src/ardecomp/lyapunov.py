"""Explicit Lyapunov functions for a leveled attracting-repelling chain.

The base potential g interpolates between the Morse sets of a chain: it is
exactly 2^-i on the i-th Morse set and 0 on the attractor.  Its discounted
orbit supremum V decreases along every orbit and separates the levels, so
backward limit sets can be read off a single number.  All evaluations share
one orbit buffer per point, which makes the monotonicity V(x) >= V(f(x))
exact in floating point rather than approximate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import DEFAULT_SERIES_HORIZON, DEFAULT_SUP_HORIZON, EPS_GEOM
from .decomposition import AlphaClass, ARChain
from .errors import AmbiguousCriticalPointError, AmbiguousLevelError, OnOverlapError
from .intervals import IntervalUnion
from .maps import PiecewiseMap

# sum_{k>=1} e^-k = 1/(e-1), so this factor gives V = 1 on the top level
_NORMALIZER = math.expm1(1.0)


@dataclass(frozen=True)
class LyapunovEvaluator:
    """Morse data plus truncation horizons, bundled for evaluation.

    ``morse_sets`` runs from the outermost repelling recurrence M_0 down to
    the attractor M_m.  ``overlap`` collects the attracting-repelling
    intersections on which the potential has no single legitimate value;
    points within ``overlap_margin`` of it are refused rather than guessed.
    """

    morse_sets: tuple[IntervalUnion, ...]
    overlap: IntervalUnion
    sup_horizon: int = DEFAULT_SUP_HORIZON
    series_horizon: int = DEFAULT_SERIES_HORIZON
    overlap_margin: float = 0.0

    @property
    def level_count(self) -> int:
        """Number of repelling levels (one less than the Morse set count)."""
        return max(len(self.morse_sets) - 1, 0)

    @property
    def tail_bound(self) -> float:
        """Truncation error of the discounted series: e^-series_horizon."""
        return math.exp(-float(self.series_horizon))


def evaluator_from_chain(
    chain: ARChain,
    sup_horizon: int = DEFAULT_SUP_HORIZON,
    series_horizon: int = DEFAULT_SERIES_HORIZON,
    overlap_margin: float | None = None,
) -> LyapunovEvaluator:
    """Bundle a chain's Morse data; the overlap margin defaults to one box."""
    margin = chain.box_width if overlap_margin is None else overlap_margin
    return LyapunovEvaluator(
        morse_sets=chain.morse_sets,
        overlap=chain.overlap,
        sup_horizon=sup_horizon,
        series_horizon=series_horizon,
        overlap_margin=margin,
    )


def g_pair(x: float, attracting: IntervalUnion, repelling: IntervalUnion) -> float:
    """Relative distance d(x,A) / (d(x,A) + d(x,R)); 0 on A, 1 on R."""
    da = attracting.distance(x)
    dr = repelling.distance(x)
    if da + dr < EPS_GEOM:
        raise OnOverlapError(x)
    return da / (da + dr)


def g_morse(ev: LyapunovEvaluator, x: float) -> float:
    """Leveled potential: exactly 2^-i on Morse set i, 0 on the attractor.

    The i-th term uses the product of distances to all other Morse sets,
    weighted 2^i, so that at a point of M_i every other term vanishes and
    the surviving one reduces to P_i / (2^i P_i).  Points on two Morse sets
    at once (or inside the declared overlap margin) have no single value.
    """
    if ev.overlap_margin > 0 and not ev.overlap.is_empty:
        if ev.overlap.distance(x) <= ev.overlap_margin:
            raise OnOverlapError(x)
    dists = [s.distance(x) for s in ev.morse_sets]
    if sum(1 for d in dists if d < EPS_GEOM) >= 2:
        raise OnOverlapError(x)
    total = 0.0
    m = len(dists) - 1
    for i in range(m):
        prod = 1.0
        for j, d in enumerate(dists):
            if j != i:
                prod *= d
        denom = dists[i] + math.ldexp(prod, i)
        if denom < EPS_GEOM:
            raise OnOverlapError(x)
        total += prod / denom
    return total


def _potential_profile(ev: LyapunovEvaluator, orbit) -> list[float]:
    return [g_morse(ev, float(p)) for p in orbit]


def _suffix_maxima(values: list[float]) -> list[float]:
    """h_k = max of values from k on; non-increasing in k by construction."""
    out = list(values)
    for k in range(len(out) - 2, -1, -1):
        if out[k + 1] > out[k]:
            out[k] = out[k + 1]
    return out


def _discounted(ev: LyapunovEvaluator, suffix: list[float], offset: int) -> float:
    terms = [
        math.exp(-float(k)) * suffix[offset + k]
        for k in range(1, ev.series_horizon + 1)
    ]
    return _NORMALIZER * math.fsum(terms)


def h_value(ev: LyapunovEvaluator, f: PiecewiseMap, x: float) -> float:
    """Supremum of the potential along the orbit, truncated at sup_horizon."""
    if ev.level_count == 0:
        return 0.0
    orbit = f.iterate(x, ev.sup_horizon)
    return max(_potential_profile(ev, orbit))


def v_value(
    ev: LyapunovEvaluator, f: PiecewiseMap, x: float
) -> tuple[float, float]:
    """Discounted orbit supremum and its truncation bound.

    Returns (value, tail) with tail = e^-series_horizon; the exact value
    lies within tail of the returned one.  Value 1 on the outermost level,
    2^-i on deeper ones, 0 on the attractor.  A degenerate evaluator (no
    levels) sums nothing, so no orbit is computed at all.
    """
    if ev.level_count == 0:
        return 0.0, ev.tail_bound
    span = ev.series_horizon + ev.sup_horizon
    orbit = f.iterate(x, span)
    suffix = _suffix_maxima(_potential_profile(ev, orbit))
    return _discounted(ev, suffix, 0), ev.tail_bound


def verify_monotone(
    f: PiecewiseMap,
    ev: LyapunovEvaluator,
    samples: int = 200,
    steps: int = 3,
    seed: int = 0,
) -> dict:
    """Check V(x) >= V(f(x)) along sampled orbits; returns a report dict.

    Two routes are checked per sample: consecutive offsets into one shared
    orbit buffer (must never increase, without tolerance), and a fully
    independent recomputation at the next point (allowed the series tail).
    Points that land on an overlap, or whose orbit hits a two-valued
    critical point exactly, are skipped, not failed.
    """
    rng = np.random.default_rng(seed)
    span = steps + ev.series_horizon + ev.sup_horizon
    tol = ev.tail_bound + 1e-12
    report = {
        "samples": samples,
        "steps": steps,
        "checked": 0,
        "skipped": 0,
        "violations": [],
        "min_shared_decrement": math.inf,
        "max_independent_gap": -math.inf,
        "tolerance": tol,
        "degenerate": ev.level_count == 0,
    }
    if ev.level_count == 0:
        # the series is an empty sum, identically zero on every orbit
        report["checked"] = samples
        report["min_shared_decrement"] = 0.0
        report["max_independent_gap"] = 0.0
        return report
    for _ in range(samples):
        x = float(rng.uniform(0.0, 1.0))
        try:
            orbit = f.iterate(x, span)
            suffix = _suffix_maxima(_potential_profile(ev, orbit))
        except (OnOverlapError, AmbiguousCriticalPointError):
            report["skipped"] += 1
            continue
        values = [_discounted(ev, suffix, o) for o in range(steps + 1)]
        for o in range(steps):
            dec = values[o] - values[o + 1]
            report["min_shared_decrement"] = min(report["min_shared_decrement"], dec)
            if dec < 0:
                report["violations"].append(
                    {"x": x, "step": o, "route": "shared", "gap": dec}
                )
        try:
            indep, _ = v_value(ev, f, float(orbit[1]))
        except (OnOverlapError, AmbiguousCriticalPointError):
            report["skipped"] += 1
            continue
        gap = indep - values[0]
        report["max_independent_gap"] = max(report["max_independent_gap"], gap)
        if gap > tol:
            report["violations"].append(
                {"x": x, "step": 0, "route": "independent", "gap": gap}
            )
        report["checked"] += 1
    if report["checked"] == 0:
        report["min_shared_decrement"] = 0.0
        report["max_independent_gap"] = 0.0
    return report


def alpha_from_v(v: float, ev: LyapunovEvaluator, chain: ARChain) -> AlphaClass:
    """Read a backward-limit class off a Lyapunov value.

    Values within the series tail of 2^-j sit on Morse level j; values in
    the open gap below level j belong to orbits connecting into it.  Both
    map to the (j+1)-th repelling set.  Values at the bottom band are read
    as the attractor's whole-space backward limit, unless the chain was
    truncated by its depth cap, in which case the answer is left
    unresolved.

    The bottom band is genuinely ambiguous: the series discounts from the
    first iterate on, so it also vanishes on the attractor's one-step
    preimage.  Points there carry a repeller class that the value alone
    cannot recover.  Cross-checks against direct classification should
    therefore skip band values and compare on gap values only.
    """
    m = chain.level_count
    tol = ev.tail_bound + 1e-9
    if v < -tol or v > 1.0 + tol:
        raise AmbiguousLevelError(v)
    if v <= tol:
        if chain.truncated and m > 0:
            return AlphaClass("unresolved", None, ())
        return AlphaClass("whole-space", None, (chain.repelling(m + 1),))
    if m == 0:
        raise AmbiguousLevelError(v)
    for j in range(m):
        band = math.ldexp(1.0, -j)
        if abs(v - band) <= tol:
            return AlphaClass("repeller", j + 1, (chain.repelling(j + 1),))
        floor = tol if j == m - 1 else math.ldexp(1.0, -(j + 1)) + tol
        if floor < v < band - tol:
            return AlphaClass("repeller", j + 1, (chain.repelling(j + 1),))
    raise AmbiguousLevelError(v)
