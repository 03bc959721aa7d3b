"""Combinatorial outer approximation of a map on a uniform box cover.

Boxes are the dyadic intervals [k/n, (k+1)/n].  An edge k -> j means the
exact branch image of box k overlaps the interior of box j, so the true
transition relation is always a subgraph of the computed one.  On top of
the graph sit the standard set-oriented operators: depth-limited and full
invariant parts, isolation tests, reachability, and recurrent components.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator

import networkx as nx
import numpy as np

from .intervals import IntervalUnion, normalize
from .maps import PiecewiseMap

BoxSet = frozenset[int]

Range = tuple[int, int]  # inclusive target range


@dataclass(frozen=True)
class BoxCover:
    """Uniform dyadic partition of [0,1] into n boxes."""

    n: int

    def __post_init__(self):
        if self.n < 2 or self.n & (self.n - 1):
            raise ValueError(f"n_boxes must be a power of two >= 2, got {self.n}")

    @property
    def width(self) -> float:
        return 1.0 / self.n

    def box_of(self, x: float) -> int:
        return min(self.n - 1, max(0, int(x * self.n)))

    def box_interval(self, k: int) -> tuple[float, float]:
        return (k / self.n, (k + 1) / self.n)

    def boxes_overlapping(self, s: IntervalUnion) -> BoxSet:
        """Boxes whose intersection with ``s`` has positive length."""
        out: set[int] = set()
        for lo, hi in s:
            k0 = max(0, int(math.floor(lo * self.n)))
            k1 = min(self.n - 1, int(math.ceil(hi * self.n)) - 1)
            for k in range(k0, k1 + 1):
                if max(lo, k / self.n) < min(hi, (k + 1) / self.n):
                    out.add(k)
        return frozenset(out)

    def to_intervals(self, boxes: Iterable[int]) -> IntervalUnion:
        return normalize([self.box_interval(k) for k in boxes])

    def dilate_boxes(self, boxes: Iterable[int], steps: int = 1) -> BoxSet:
        out: set[int] = set()
        for k in boxes:
            out.update(range(max(0, k - steps), min(self.n - 1, k + steps) + 1))
        return frozenset(out)


def _target_range(lo: float, hi: float, n: int) -> Range | None:
    # strict overlap: j is a target iff lo < (j+1)/n and hi > j/n
    if hi <= lo:
        return None
    j0 = max(0, int(math.floor(lo * n)))
    j1 = min(n - 1, int(math.ceil(hi * n)) - 1)
    if j1 < j0:
        return None
    return (j0, j1)


class TransitionGraph:
    """Directed graph over a box cover; edges stored as target ranges."""

    def __init__(self, cover: BoxCover, out_ranges: list[tuple[Range, ...]]):
        self.cover = cover
        self._out = out_ranges
        self._reverse: list[list[int]] | None = None
        self._nx: nx.DiGraph | None = None

    @property
    def n(self) -> int:
        return self.cover.n

    def out_ranges(self, k: int) -> tuple[Range, ...]:
        return self._out[k]

    def out_boxes(self, k: int) -> Iterator[int]:
        for j0, j1 in self._out[k]:
            yield from range(j0, j1 + 1)

    def has_edge(self, k: int, j: int) -> bool:
        return any(j0 <= j <= j1 for j0, j1 in self._out[k])

    def in_boxes(self, j: int) -> list[int]:
        if self._reverse is None:
            rev: list[list[int]] = [[] for _ in range(self.n)]
            for k in range(self.n):
                for j0, j1 in self._out[k]:
                    for t in range(j0, j1 + 1):
                        rev[t].append(k)
            self._reverse = rev
        return self._reverse[j]

    def edge_count(self) -> int:
        return sum(j1 - j0 + 1 for ranges in self._out for j0, j1 in ranges)

    def nx_graph(self) -> nx.DiGraph:
        if self._nx is None:
            g = nx.DiGraph()
            g.add_nodes_from(range(self.n))
            for k in range(self.n):
                g.add_edges_from((k, j) for j in self.out_boxes(k))
            self._nx = g
        return self._nx

    @classmethod
    def from_edges(cls, n_boxes: int, edges: dict[int, Iterable[int]]) -> "TransitionGraph":
        """Synthetic graph over a cover; used by tests and oracles."""
        cover = BoxCover(n_boxes)
        out: list[tuple[Range, ...]] = [() for _ in range(n_boxes)]
        for k, targets in edges.items():
            out[k] = tuple((j, j) for j in sorted(set(targets)))
        return cls(cover, out)


def build_graph(f: PiecewiseMap, n_boxes: int) -> TransitionGraph:
    """Transition graph from exact per-branch interval images (no sampling)."""
    cover = BoxCover(n_boxes)
    n = cover.n
    out: list[tuple[Range, ...]] = []
    for k in range(n):
        blo, bhi = cover.box_interval(k)
        ranges: list[Range] = []
        for br in f.branches:
            d0, d1 = br.domain
            lo, hi = max(blo, d0), min(bhi, d1)
            if hi <= lo:
                continue
            va, vb = br.value(lo), br.value(hi)
            if va > vb:
                va, vb = vb, va
            rng = _target_range(max(va, 0.0), min(vb, 1.0), n)
            if rng is not None:
                ranges.append(rng)
        ranges.sort()
        merged: list[Range] = []
        for r in ranges:
            if merged and r[0] <= merged[-1][1] + 1:
                merged[-1] = (merged[-1][0], max(merged[-1][1], r[1]))
            else:
                merged.append(r)
        out.append(tuple(merged))
    return TransitionGraph(cover, out)


# -- invariant-part operators --------------------------------------------------


def _mask(g: TransitionGraph, boxes: Iterable[int]) -> np.ndarray:
    m = np.zeros(g.n, dtype=bool)
    for k in boxes:
        m[k] = True
    return m


def _step_forward(g: TransitionGraph, alive: np.ndarray, inside: np.ndarray) -> np.ndarray:
    """Boxes of ``inside`` with an out-neighbor in ``alive``."""
    csum = np.concatenate(([0], np.cumsum(alive)))
    out = np.zeros(g.n, dtype=bool)
    for k in np.flatnonzero(inside):
        for j0, j1 in g.out_ranges(int(k)):
            if csum[j1 + 1] - csum[j0] > 0:
                out[k] = True
                break
    return out


def _step_backward(g: TransitionGraph, alive: np.ndarray, inside: np.ndarray) -> np.ndarray:
    """Boxes of ``inside`` with an in-neighbor in ``alive``."""
    diff = np.zeros(g.n + 1, dtype=np.int64)
    for k in np.flatnonzero(alive):
        for j0, j1 in g.out_ranges(int(k)):
            diff[j0] += 1
            diff[j1 + 1] -= 1
    covered = np.cumsum(diff[:-1]) > 0
    return covered & inside


def inv_m(g: TransitionGraph, boxes: BoxSet, m: int) -> BoxSet:
    """Boxes admitting a path of length m forward and m backward inside ``boxes``."""
    inside = _mask(g, boxes)
    fwd = inside.copy()
    bwd = inside.copy()
    for _ in range(m):
        fwd = _step_forward(g, fwd, inside)
        bwd = _step_backward(g, bwd, inside)
    return frozenset(int(k) for k in np.flatnonzero(fwd & bwd))


def inv(g: TransitionGraph, boxes: BoxSet) -> BoxSet:
    """Boxes on a bi-infinite path inside ``boxes``.

    Computed by pruning boxes lacking an in- or out-neighbor in the current
    set until nothing changes; the result is the largest subset in which
    every box has both.
    """
    inside = _mask(g, boxes)
    while True:
        fwd = _step_forward(g, inside, inside)
        bwd = _step_backward(g, inside, inside)
        nxt = fwd & bwd
        if np.array_equal(nxt, inside):
            return frozenset(int(k) for k in np.flatnonzero(inside))
        inside = nxt


def is_isolating(g: TransitionGraph, boxes: BoxSet) -> tuple[bool, int | None]:
    """Whether the invariant part sits strictly inside ``boxes``.

    True iff every box of the invariant part has its existing cover
    neighbors inside ``boxes`` (missing neighbors at the domain ends are
    fine) and the invariant part is a proper subset.  Returns the offending
    box as witness on failure.
    """
    if not boxes:
        return True, None
    core = inv(g, boxes)
    if core == boxes:
        return False, min(core)
    for k in sorted(core):
        for nb in (k - 1, k + 1):
            if 0 <= nb < g.n and nb not in boxes:
                return False, k
    return True, None


def reach(g: TransitionGraph, boxes: BoxSet, direction: str = "forward") -> BoxSet:
    """Transitive closure of ``boxes`` under edges (or reversed edges)."""
    if direction not in ("forward", "backward"):
        raise ValueError(f"unknown direction {direction!r}")
    seen = set(boxes)
    stack = list(boxes)
    while stack:
        k = stack.pop()
        if direction == "forward":
            nbrs: Iterable[int] = g.out_boxes(k)
        else:
            nbrs = g.in_boxes(k)
        for j in nbrs:
            if j not in seen:
                seen.add(j)
                stack.append(j)
    return frozenset(seen)


def recurrent_components(g: TransitionGraph, within: BoxSet | None = None) -> list[BoxSet]:
    """Nontrivial strongly connected components, sources first.

    A component counts as recurrent if it has more than one box or a
    self-loop.  Components are ordered topologically by reachability with
    deterministic tie-breaking, so repelling candidates precede attracting
    ones.
    """
    graph = g.nx_graph()
    if within is not None:
        graph = graph.subgraph(within)
    comps = [
        frozenset(c)
        for c in nx.strongly_connected_components(graph)
        if len(c) > 1 or g.has_edge(min(c), min(c))
    ]
    if not comps:
        return []
    cond = nx.condensation(graph)
    order = {}
    key = {node: min(cond.nodes[node]["members"]) for node in cond.nodes}
    for rank, node in enumerate(nx.lexicographical_topological_sort(cond, key=key.get)):
        order[node] = rank
    mapping = cond.graph["mapping"]
    comps.sort(key=lambda c: (order[mapping[min(c)]], min(c)))
    return comps
