"""Piecewise-monotone self-maps of [0,1].

A map is an ordered list of strictly monotone branches whose domains tile
[0,1].  Two kinds are supported: ``continuous`` (adjacent branch values
agree at shared endpoints) and ``lorenz`` (exactly two increasing branches
split at a critical point ``c``, where the map carries two one-sided
values).  Branch inverses are closed-form, so preimages are exact up to
floating point; the bisection tolerance ``TOL_INV`` survives as the
accuracy contract they are tested against.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .constants import EPS_GEOM, TOL_INV
from .errors import AmbiguousCriticalPointError, MapValidationError
from .intervals import IntervalUnion, normalize

_MONOTONE_SAMPLES = 33


@dataclass(frozen=True)
class Branch:
    """One strictly monotone piece of the map.

    kind/params:
      - ``affine``:   f(x) = slope*x + intercept
      - ``power``:    f(x) = scale*x**exponent + offset   (exponent > 0)
      - ``logistic``: f(x) = r*x*(1-x)
    """

    kind: str
    domain: tuple[float, float]
    params: tuple[float, ...]
    orientation: int  # +1 increasing, -1 decreasing

    def value(self, x: float) -> float:
        if self.kind == "affine":
            slope, intercept = self.params
            return slope * x + intercept
        if self.kind == "power":
            exponent, scale, offset = self.params
            return scale * x**exponent + offset
        r = self.params[0]
        return r * x * (1.0 - x)

    def inverse(self, y: float) -> float:
        """The unique branch preimage of ``y``; caller clamps to the image first."""
        if self.kind == "affine":
            slope, intercept = self.params
            return (y - intercept) / slope
        if self.kind == "power":
            exponent, scale, offset = self.params
            t = (y - offset) / scale
            return max(t, 0.0) ** (1.0 / exponent)
        r = self.params[0]
        disc = max(0.25 - y / r, 0.0)
        root = math.sqrt(disc)
        return 0.5 - root if self.orientation > 0 else 0.5 + root

    def image(self) -> tuple[float, float]:
        lo, hi = self.domain
        va, vb = self.value(lo), self.value(hi)
        return (va, vb) if va <= vb else (vb, va)

    def validate(self, index: int) -> None:
        lo, hi = self.domain
        where = f"branches[{index}]"
        if not (0.0 <= lo < hi <= 1.0 + EPS_GEOM):
            raise MapValidationError(f"domain ({lo}, {hi}) is not a subinterval of [0,1]", where)
        xs = np.linspace(lo, hi, _MONOTONE_SAMPLES)
        vals = np.array([self.value(float(x)) for x in xs])
        diffs = np.diff(vals)
        if self.orientation > 0 and not np.all(diffs > 0):
            raise MapValidationError("declared increasing but samples are not", where)
        if self.orientation < 0 and not np.all(diffs < 0):
            raise MapValidationError("declared decreasing but samples are not", where)
        va, vb = self.image()
        if va < -EPS_GEOM or vb > 1.0 + EPS_GEOM:
            raise MapValidationError(f"image ({va}, {vb}) leaves [0,1]", where)


@dataclass(frozen=True)
class PiecewiseMap:
    """A continuous or Lorenz-type piecewise-monotone self-map of [0,1]."""

    branches: tuple[Branch, ...]
    kind: str = "continuous"
    critical: float | None = None

    def __post_init__(self):
        if self.kind not in ("continuous", "lorenz"):
            raise MapValidationError(f"unknown kind {self.kind!r}", "kind")
        if not self.branches:
            raise MapValidationError("a map needs at least one branch", "branches")
        for i, b in enumerate(self.branches):
            b.validate(i)
        doms = [b.domain for b in self.branches]
        if abs(doms[0][0]) > EPS_GEOM or abs(doms[-1][1] - 1.0) > EPS_GEOM:
            raise MapValidationError("branch domains must start at 0 and end at 1", "branches")
        for i in range(len(doms) - 1):
            if abs(doms[i][1] - doms[i + 1][0]) > EPS_GEOM:
                raise MapValidationError("branch domains must tile [0,1]", f"branches[{i + 1}]")
        if self.kind == "lorenz":
            if len(self.branches) != 2:
                raise MapValidationError("a Lorenz map has exactly two branches", "branches")
            if any(b.orientation < 0 for b in self.branches):
                raise MapValidationError("Lorenz branches must both increase", "branches")
            if self.critical is None or abs(self.critical - doms[0][1]) > EPS_GEOM:
                raise MapValidationError("critical_point must equal the branch split", "critical_point")
        else:
            for i in range(len(self.branches) - 1):
                left = self.branches[i].value(doms[i][1])
                right = self.branches[i + 1].value(doms[i + 1][0])
                if abs(left - right) > 1e-9:
                    raise MapValidationError(
                        f"branch values jump by {left - right:.3g} at {doms[i][1]}",
                        f"branches[{i + 1}]",
                    )

    # -- evaluation ---------------------------------------------------------

    def eval(self, x: float, side: str = "auto") -> float:
        """Value at ``x``; at a Lorenz critical point, ``side`` picks the limit."""
        if self.kind == "lorenz" and x == self.critical:
            if side == "left":
                branch = self.branches[0]
            elif side == "right":
                branch = self.branches[1]
            else:
                raise AmbiguousCriticalPointError(x)
        else:
            branch = self._branch_at(x)
        # clamp: float overshoot at domain corners must not leave [0,1]
        return min(max(branch.value(x), 0.0), 1.0)

    def _branch_at(self, x: float) -> Branch:
        for b in self.branches:
            if x <= b.domain[1]:
                return b
        return self.branches[-1]

    def iterate(self, x: float, n: int) -> np.ndarray:
        """Orbit (x, f(x), ..., f^n(x)); errors carry the index of a critical hit."""
        orbit = np.empty(n + 1)
        orbit[0] = x
        for k in range(n):
            try:
                orbit[k + 1] = self.eval(float(orbit[k]))
            except AmbiguousCriticalPointError as exc:
                raise AmbiguousCriticalPointError(exc.x, index=k) from None
        return orbit

    # -- preimages ----------------------------------------------------------

    def preimages(self, y: float) -> tuple[float, ...]:
        """All solutions of f(x) = y, one per branch whose image contains y."""
        hits: list[float] = []
        for b in self.branches:
            lo, hi = b.image()
            if lo - TOL_INV <= y <= hi + TOL_INV:
                x = b.inverse(min(max(y, lo), hi))
                hits.append(min(max(x, b.domain[0]), b.domain[1]))
        hits.sort()
        out: list[float] = []
        for x in hits:
            if not out or x - out[-1] > TOL_INV:
                out.append(x)
        return tuple(out)

    def image_union(self, s: IntervalUnion) -> IntervalUnion:
        """Exact forward image of a union, branch piece by branch piece."""
        pieces: list[tuple[float, float]] = []
        for b in self.branches:
            d0, d1 = b.domain
            for a0, a1 in s:
                lo, hi = max(a0, d0), min(a1, d1)
                if lo > hi:
                    continue
                va, vb = b.value(lo), b.value(hi)
                if va > vb:
                    va, vb = vb, va
                pieces.append((max(va, 0.0), min(vb, 1.0)))
        return normalize(pieces)

    def preimage_union(self, s: IntervalUnion) -> IntervalUnion:
        """Union over branches of the branch-inverse image of ``s``."""
        pieces: list[tuple[float, float]] = []
        for b in self.branches:
            i0, i1 = b.image()
            for a0, a1 in s:
                lo, hi = max(a0, i0), min(a1, i1)
                if lo > hi:
                    continue
                xa, xb = b.inverse(lo), b.inverse(hi)
                if xa > xb:
                    xa, xb = xb, xa
                d0, d1 = b.domain
                pieces.append((min(max(xa, d0), d1), min(max(xb, d0), d1)))
        return normalize(pieces)


# -- JSON schema --------------------------------------------------------------

_PARAM_NAMES = {
    "affine": ("slope", "intercept"),
    "power": ("exponent", "scale", "offset"),
    "logistic": ("r",),
}


def branch_from_json(obj: dict, index: int) -> Branch:
    where = f"branches[{index}]"
    for key in ("domain", "type", "params", "orientation"):
        if key not in obj:
            raise MapValidationError(f"missing key {key!r}", where)
    kind = obj["type"]
    if kind not in _PARAM_NAMES:
        raise MapValidationError(f"unknown branch type {kind!r}", f"{where}.type")
    if obj["orientation"] not in ("inc", "dec"):
        raise MapValidationError("orientation must be 'inc' or 'dec'", f"{where}.orientation")
    try:
        params = tuple(float(obj["params"][name]) for name in _PARAM_NAMES[kind])
    except (KeyError, TypeError) as exc:
        raise MapValidationError(f"params must supply {_PARAM_NAMES[kind]}", f"{where}.params") from exc
    domain = obj["domain"]
    if not (isinstance(domain, (list, tuple)) and len(domain) == 2):
        raise MapValidationError("domain must be a [lo, hi] pair", f"{where}.domain")
    return Branch(
        kind=kind,
        domain=(float(domain[0]), float(domain[1])),
        params=params,
        orientation=1 if obj["orientation"] == "inc" else -1,
    )


def map_from_json(obj: dict) -> PiecewiseMap:
    if "kind" not in obj or obj["kind"] not in ("continuous", "lorenz"):
        raise MapValidationError("kind must be 'continuous' or 'lorenz'", "kind")
    if "branches" not in obj or not isinstance(obj["branches"], list):
        raise MapValidationError("branches must be a list", "branches")
    branches = tuple(branch_from_json(b, i) for i, b in enumerate(obj["branches"]))
    critical = obj.get("critical_point")
    return PiecewiseMap(
        branches=branches,
        kind=obj["kind"],
        critical=None if critical is None else float(critical),
    )


def map_to_json(f: PiecewiseMap) -> dict:
    obj: dict = {"kind": f.kind, "branches": []}
    if f.critical is not None:
        obj["critical_point"] = f.critical
    for b in f.branches:
        obj["branches"].append(
            {
                "domain": [b.domain[0], b.domain[1]],
                "type": b.kind,
                "params": dict(zip(_PARAM_NAMES[b.kind], b.params)),
                "orientation": "inc" if b.orientation > 0 else "dec",
            }
        )
    return obj


def load_map_file(path: str) -> PiecewiseMap:
    with open(path) as fh:
        return map_from_json(json.load(fh))


# -- canonical test maps -------------------------------------------------------


def square_map() -> PiecewiseMap:
    """f(x) = x**2: one increasing power branch, fixed points 0 and 1."""
    return PiecewiseMap(
        branches=(Branch("power", (0.0, 1.0), (2.0, 1.0, 0.0), 1),),
    )


def doubling_map() -> PiecewiseMap:
    """f(x) = 2x mod 1 as a Lorenz map split at 1/2."""
    return PiecewiseMap(
        branches=(
            Branch("affine", (0.0, 0.5), (2.0, 0.0), 1),
            Branch("affine", (0.5, 1.0), (2.0, -1.0), 1),
        ),
        kind="lorenz",
        critical=0.5,
    )


def sqrt2_lorenz_map() -> PiecewiseMap:
    """f(x) = sqrt(2)*x mod 1, split at 1/sqrt(2)."""
    s = math.sqrt(2.0)
    c = 1.0 / s
    return PiecewiseMap(
        branches=(
            Branch("affine", (0.0, c), (s, 0.0), 1),
            Branch("affine", (c, 1.0), (s, -1.0), 1),
        ),
        kind="lorenz",
        critical=c,
    )


def pl_lorenz_map(slope: float = 1.3, lift: float = 0.35) -> PiecewiseMap:
    """f(x) = slope*x + lift mod 1, split where the lift wraps.

    The defaults give a once-renormalizable expansive Lorenz map whose
    return interval and invariant sets have simple closed forms, which the
    renormalization tests pin down exactly.
    """
    c = (1.0 - lift) / slope
    return PiecewiseMap(
        branches=(
            Branch("affine", (0.0, c), (slope, lift), 1),
            Branch("affine", (c, 1.0), (slope, lift - 1.0), 1),
        ),
        kind="lorenz",
        critical=c,
    )


def logistic_map(r: float = 3.2) -> PiecewiseMap:
    """f(x) = r*x*(1-x) split into its increasing and decreasing halves."""
    return PiecewiseMap(
        branches=(
            Branch("logistic", (0.0, 0.5), (r,), 1),
            Branch("logistic", (0.5, 1.0), (r,), -1),
        ),
    )
