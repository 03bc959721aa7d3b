"""Renormalization detection for expansive Lorenz maps.

A Lorenz map is renormalizable when some pair of branch iterates forms a
first-return map on a proper interval around the critical point that is
again a Lorenz map.  Detection searches return-time pairs (l, r) in order
of l + r, tracking the critical orbits in closed form: the candidate
interval is [f^{r-1}(f(c+)), f^{l-1}(f(c-))], and a pair qualifies when
the intermediate images neither cross the critical point (which would
break monotonicity of the composed branches) nor re-enter the open
candidate interval early (which would break the first-return property).
"""

from __future__ import annotations

from dataclasses import dataclass

from .boxgraph import BoxCover
from .constants import DEFAULT_MAX_RETURN, EPS_GEOM
from .errors import AmbiguousCriticalPointError
from .intervals import IntervalUnion, empty, normalize
from .maps import Branch, PiecewiseMap

_PROPER_MARGIN = 1e-9


@dataclass(frozen=True)
class RenormResult:
    """A detected first-return structure.

    ``interval`` is the return interval around the critical point,
    ``return_times`` the branch iterate counts (left, right), and
    ``renormalized`` the return map rescaled to a Lorenz map on [0,1]
    (None when the composed branches leave the supported branch kinds,
    with the reason recorded).
    """

    interval: tuple[float, float]
    return_times: tuple[int, int]
    renormalized: PiecewiseMap | None
    note: str = ""


def _orbit_intervals(
    f: PiecewiseMap, lo: float, hi: float, steps: int
) -> list[tuple[float, float]] | None:
    """Forward images of [lo, hi] under single branches; None if one straddles c."""
    c = f.critical
    out = []
    a, b = lo, hi
    for _ in range(steps):
        if a < c - EPS_GEOM and b > c + EPS_GEOM:
            return None
        branch = f.branches[0] if b <= c + EPS_GEOM else f.branches[1]
        a = min(max(branch.value(a), 0.0), 1.0)
        b = min(max(branch.value(b), 0.0), 1.0)
        out.append((a, b))
    return out


def _qualifies(f: PiecewiseMap, a1: float, b1: float, l: int, r: int) -> bool:
    c = f.critical
    if not (a1 + EPS_GEOM < c < b1 - EPS_GEOM):
        return False
    if b1 - a1 >= 1.0 - _PROPER_MARGIN:
        return False
    left = _orbit_intervals(f, a1, c, l)
    right = _orbit_intervals(f, c, b1, r)
    if left is None or right is None:
        return False
    for seq, steps in ((left, l), (right, r)):
        for j, (ia, ib) in enumerate(seq, start=1):
            if j < steps:
                # early visits must stay out of the open return interval
                if ib > a1 + EPS_GEOM and ia < b1 - EPS_GEOM:
                    return False
            else:
                if ia < a1 - 1e-9 or ib > b1 + 1e-9:
                    return False
    return True


def _compose_affine(f: PiecewiseMap, start: float, steps: int) -> tuple[float, float] | None:
    """(slope, intercept) of f^steps on the branch sequence starting near ``start``."""
    if any(b.kind != "affine" for b in f.branches):
        return None
    c = f.critical
    slope, intercept = 1.0, 0.0
    x = start
    for _ in range(steps):
        branch = f.branches[0] if x < c else f.branches[1]
        s, t = branch.params
        slope, intercept = s * slope, s * intercept + t
        x = min(max(branch.value(x), 0.0), 1.0)
    return slope, intercept


def _rescaled_return_map(
    f: PiecewiseMap, a1: float, b1: float, l: int, r: int
) -> tuple[PiecewiseMap | None, str]:
    width = b1 - a1
    c_hat = (f.critical - a1) / width
    left = _compose_affine(f, 0.5 * (a1 + f.critical), l)
    right = _compose_affine(f, 0.5 * (f.critical + b1), r)
    if left is None or right is None:
        return None, "composed branches are not affine; rescaled map not constructed"
    ls, li = left
    rs, ri = right
    # conjugate by x -> (x - a1)/width: slopes survive, intercepts rescale
    lb = Branch("affine", (0.0, c_hat), (ls, (ls * a1 + li - a1) / width), 1)
    rb = Branch("affine", (c_hat, 1.0), (rs, (rs * a1 + ri - a1) / width), 1)
    return (
        PiecewiseMap(branches=(lb, rb), kind="lorenz", critical=c_hat),
        "",
    )


def detect_renormalization(
    f: PiecewiseMap, max_return: int = DEFAULT_MAX_RETURN
) -> RenormResult | None:
    """Smallest first-return structure with both return times <= max_return.

    Pairs are tried in lexicographic (l + r, l) order, so the result is the
    minimal renormalization for the piecewise-linear examples this module
    is tested on.  None means no pair within the bound qualifies.
    """
    if f.kind != "lorenz":
        raise ValueError("renormalization detection needs a Lorenz map")
    fc_left = f.eval(f.critical, side="left")
    fc_right = f.eval(f.critical, side="right")
    for total in range(2, 2 * max_return + 1):
        for l in range(1, total):
            r = total - l
            if l > max_return or r > max_return:
                continue
            try:
                b1 = float(f.iterate(fc_left, l - 1)[-1]) if l > 1 else fc_left
                a1 = float(f.iterate(fc_right, r - 1)[-1]) if r > 1 else fc_right
            except AmbiguousCriticalPointError:
                continue
            if not _qualifies(f, a1, b1, l, r):
                continue
            rmap, note = _rescaled_return_map(f, a1, b1, l, r)
            return RenormResult(
                interval=(a1, b1),
                return_times=(l, r),
                renormalized=rmap,
                note=note,
            )
    return None


def attracting_set_from_renorm(
    f: PiecewiseMap, result: RenormResult, horizon: int = 64
) -> tuple[IntervalUnion, bool, int]:
    """Union of forward images of the return interval, iterated to stability.

    Returns (set, stabilized, steps); ``stabilized`` is False when one more
    image still added something at the horizon.
    """
    a1, b1 = result.interval
    acc = normalize([(a1, b1)])
    cur = acc
    for k in range(1, horizon + 1):
        cur = f.image_union(cur)
        if cur.within(acc, EPS_GEOM):
            return acc, True, k
        acc = acc.union(cur)
    return acc, False, horizon


def orbit_avoiding_set(
    f: PiecewiseMap, result: RenormResult, depth: int = 16, n_boxes: int = 512
) -> IntervalUnion:
    """Boxes whose forward orbit can avoid the open return interval.

    Iterates preimages of the return interval ``depth`` times and keeps
    every box not strictly inside the accumulated union, giving an outer
    approximation of the complement of all return-interval preimages.
    """
    cover = BoxCover(n_boxes)
    a1, b1 = result.interval
    acc = normalize([(a1, b1)])
    for _ in range(depth):
        pre = f.preimage_union(acc)
        nxt = acc.union(pre)
        if nxt.within(acc, EPS_GEOM):
            break
        acc = nxt
    kept = []
    for k in range(n_boxes):
        lo, hi = cover.box_interval(k)
        if not any(p < lo + EPS_GEOM and hi - EPS_GEOM < q for p, q in acc):
            kept.append(k)
    if not kept:
        return empty()
    return cover.to_intervals(kept)
