"""Canonical finite unions of closed subintervals of [0,1].

Every set handled by the library (attracting sets, repelling sets, Morse
sets, basins, box unions) is an :class:`IntervalUnion`.  The canonical form
is sorted, pairwise separated by gaps larger than ``eps``, with degenerate
(single-point) members allowed.  All operations are pure and return new
canonical values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .constants import EPS_GEOM
from .errors import DomainError, UndefinedDistanceError

Pair = tuple[float, float]


def _canonical(raw: Iterable[Pair], eps: float) -> tuple[Pair, ...]:
    pairs = sorted((float(lo), float(hi)) for lo, hi in raw)
    merged: list[list[float]] = []
    for lo, hi in pairs:
        if merged and lo - merged[-1][1] <= eps:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    return tuple((lo, hi) for lo, hi in merged)


@dataclass(frozen=True)
class IntervalUnion:
    """Sorted union of closed intervals, merged at construction."""

    pieces: tuple[Pair, ...] = ()

    def __iter__(self) -> Iterator[Pair]:
        return iter(self.pieces)

    def __len__(self) -> int:
        return len(self.pieces)

    def __bool__(self) -> bool:
        return bool(self.pieces)

    @property
    def is_empty(self) -> bool:
        return not self.pieces

    @property
    def measure(self) -> float:
        return math.fsum(hi - lo for lo, hi in self.pieces)

    @property
    def hull(self) -> Pair:
        if not self.pieces:
            raise UndefinedDistanceError("hull of an empty union")
        return (self.pieces[0][0], self.pieces[-1][1])

    def distance(self, x: float) -> float:
        """Distance from ``x`` to the set; 0 iff ``x`` is a member."""
        if not self.pieces:
            raise UndefinedDistanceError("distance to an empty union")
        best = math.inf
        for lo, hi in self.pieces:
            if x < lo:
                best = min(best, lo - x)
            elif x > hi:
                best = min(best, x - hi)
            else:
                return 0.0
        return best

    def contains(self, x: float, mode: str = "closed", eps: float = EPS_GEOM) -> bool:
        """Membership with closed (``<=`` plus slack) or interior (strict minus slack) semantics."""
        if mode == "closed":
            return any(lo - eps <= x <= hi + eps for lo, hi in self.pieces)
        if mode == "interior":
            return any(lo + eps < x < hi - eps for lo, hi in self.pieces)
        raise ValueError(f"unknown membership mode {mode!r}")

    def union(self, other: "IntervalUnion", eps: float = EPS_GEOM) -> "IntervalUnion":
        return IntervalUnion(_canonical(self.pieces + other.pieces, eps))

    def intersect(self, other: "IntervalUnion", eps: float = EPS_GEOM) -> "IntervalUnion":
        out: list[Pair] = []
        for a0, a1 in self.pieces:
            for b0, b1 in other.pieces:
                if b0 > a1:
                    break
                lo, hi = max(a0, b0), min(a1, b1)
                if lo <= hi:
                    out.append((lo, hi))
        return IntervalUnion(_canonical(out, eps))

    def difference(self, other: "IntervalUnion", eps: float = EPS_GEOM) -> "IntervalUnion":
        """Closure of the set difference.

        Carves each piece directly rather than complementing, so u \\ u is
        exactly empty and genuine single-point pieces survive.
        """
        out: list[Pair] = []
        for a0, a1 in self.pieces:
            cur = a0
            covered = False
            for b0, b1 in other.pieces:
                if b1 < a0 or b0 > a1:
                    continue
                covered = True
                if b0 > cur:
                    out.append((cur, min(b0, a1)))
                cur = max(cur, b1)
                if cur >= a1:
                    break
            if cur < a1 or (not covered and a0 == a1):
                out.append((max(cur, a0), a1))
        return IntervalUnion(_canonical(out, eps))

    def complement(self, eps: float = EPS_GEOM) -> "IntervalUnion":
        return full().difference(self, eps)

    def dilate(self, r: float, eps: float = EPS_GEOM) -> "IntervalUnion":
        """Grow every piece by ``r`` on both sides, clipped to [0,1]."""
        grown = [(max(0.0, lo - r), min(1.0, hi + r)) for lo, hi in self.pieces]
        return IntervalUnion(_canonical(grown, eps))

    def within(self, other: "IntervalUnion", tol: float = 0.0) -> bool:
        """True iff this union is contained in ``other`` dilated by ``tol``."""
        return self.difference(other.dilate(tol) if tol else other).is_empty

    def to_pairs(self) -> list[list[float]]:
        """JSON form: array of [lo, hi] pairs in canonical order."""
        return [[lo, hi] for lo, hi in self.pieces]


def normalize(raw: Sequence[Pair], eps: float = EPS_GEOM) -> IntervalUnion:
    """Validate raw pairs against [0,1] and return the canonical union."""
    for lo, hi in raw:
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise DomainError(f"non-finite endpoint in ({lo!r}, {hi!r})")
        if lo > hi:
            raise DomainError(f"interval ({lo!r}, {hi!r}) has lo > hi")
        if lo < -eps or hi > 1.0 + eps:
            raise DomainError(f"interval ({lo!r}, {hi!r}) leaves [0,1]")
    clipped = [(min(max(lo, 0.0), 1.0), min(max(hi, 0.0), 1.0)) for lo, hi in raw]
    return IntervalUnion(_canonical(clipped, eps))


def empty() -> IntervalUnion:
    return IntervalUnion(())


def full() -> IntervalUnion:
    return IntervalUnion(((0.0, 1.0),))


def point(x: float) -> IntervalUnion:
    return normalize([(x, x)])


def from_pairs(pairs: Sequence[Sequence[float]]) -> IntervalUnion:
    """Inverse of :meth:`IntervalUnion.to_pairs`, with validation."""
    return normalize([(p[0], p[1]) for p in pairs])


def set_algebra(kind: str, u: IntervalUnion, v: IntervalUnion) -> IntervalUnion:
    """Dispatch union/intersect/difference by name."""
    if kind == "union":
        return u.union(v)
    if kind == "intersect":
        return u.intersect(v)
    if kind == "difference":
        return u.difference(v)
    raise ValueError(f"unknown set-algebra kind {kind!r}")


def distance_point(x: float, s: IntervalUnion) -> float:
    return s.distance(x)


def _directed_hausdorff(u: IntervalUnion, v: IntervalUnion) -> float:
    # sup_{x in u} d(x, v) is attained at a piece endpoint of u or at a
    # gap midpoint of v that u covers; both candidate families are finite.
    worst = 0.0
    for lo, hi in u.pieces:
        worst = max(worst, v.distance(lo), v.distance(hi))
    for ( _, g0), (g1, _) in zip(v.pieces, v.pieces[1:]):
        mid = 0.5 * (g0 + g1)
        if u.contains(mid):
            worst = max(worst, v.distance(mid))
    return worst


def hausdorff(u: IntervalUnion, v: IntervalUnion) -> float:
    """Exact Hausdorff distance between two nonempty unions."""
    if u.is_empty or v.is_empty:
        raise UndefinedDistanceError("hausdorff distance against an empty union")
    return max(_directed_hausdorff(u, v), _directed_hausdorff(v, u))
