"""Leveled attracting/repelling decomposition and limit-set classification.

The decomposition peels one level at a time.  Within the current ambient
set, recurrent components of the transition graph are computed at the
working resolution and at its refinement; a coarse component survives if
some fine component projects into it, which filters the one-off spurious
cycles an outer approximation creates near repelling points.  Survivors
that no other survivor can reach act as the level's repelling recurrence;
everything downstream of the remaining survivors is the next attracting
set.  Repelling sets accumulate across levels as the backward reach of all
repelling recurrence found so far, which makes them nested by
construction.  The loop stops when the restricted graph is strongly
connected at both resolutions (the map is transitive on the remaining
set), or when the depth cap binds, in which case the chain is flagged
truncated.

Membership in the chain is decided at box resolution, so the derived
classification of backward limit sets answers with a box-width slack and
reports boundary cases as overlaps carrying both candidate answers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from .boxgraph import BoxSet, TransitionGraph, build_graph, reach, recurrent_components
from .constants import DEFAULT_MAX_DEPTH, DEFAULT_N_BOXES, EPS_GEOM
from .errors import EmptyPreimageError, InconsistencyError, ResolutionTooCoarseError
from .intervals import IntervalUnion, empty, full, hausdorff, normalize
from .maps import PiecewiseMap


@dataclass(frozen=True)
class ARLevel:
    """One attracting/repelling pair, with its basin and overlap."""

    index: int
    attracting: IntervalUnion
    repelling: IntervalUnion
    basin: IntervalUnion
    overlap: IntervalUnion


@dataclass(frozen=True)
class ARChain:
    """The full leveled decomposition of one map at one resolution.

    ``morse_sets`` lists M_0 .. M_m from the outermost repelling recurrence
    down to the attractor; ``connecting_regions`` lists the in-between
    regions C_0 .. C_{m-1}.  All sets are unions of boxes of width
    ``box_width`` (the refined working cover).
    """

    levels: tuple[ARLevel, ...]
    attractor: IntervalUnion
    morse_sets: tuple[IntervalUnion, ...]
    connecting_regions: tuple[IntervalUnion, ...]
    overlap: IntervalUnion
    truncated: bool
    n_boxes: int
    box_width: float
    diagnostics: dict = field(default_factory=dict, compare=False)

    @property
    def level_count(self) -> int:
        return len(self.levels)

    def attracting(self, i: int) -> IntervalUnion:
        """A_i with A_0 = [0,1]."""
        return full() if i == 0 else self.levels[i - 1].attracting

    def repelling(self, i: int) -> IntervalUnion:
        """R_i with R_{m+1} = [0,1]."""
        return full() if i == len(self.levels) + 1 else self.levels[i - 1].repelling


@dataclass(frozen=True)
class AlphaClass:
    """Classification of the backward limit set of a point.

    kind is one of ``whole-space``, ``repeller``, ``overlap`` (boundary or
    genuine overlap: both candidate answers are carried), ``unresolved``
    (point sits in the attractor of a depth-capped chain).
    """

    kind: str
    level: int | None = None
    candidates: tuple[IntervalUnion, ...] = ()

    def __str__(self) -> str:
        if self.level is None:
            return self.kind
        return f"{self.kind}({self.level})"


@dataclass(frozen=True)
class _LevelCandidate:
    attracting_boxes: BoxSet
    top_boxes: BoxSet
    basin_boxes: BoxSet
    coarse_gap: float
    note: str


def _restricted(g: TransitionGraph, ambient: IntervalUnion) -> BoxSet:
    return g.cover.boxes_overlapping(ambient)


def _strongly_connected(g: TransitionGraph, nodes: BoxSet) -> bool:
    if not nodes:
        return False
    sub = g.nx_graph().subgraph(nodes)
    return nx.is_strongly_connected(sub)


def _forward_closure(g: TransitionGraph, seeds: BoxSet, within: BoxSet) -> BoxSet:
    seen = set(seeds)
    stack = list(seeds)
    while stack:
        k = stack.pop()
        for j in g.out_boxes(k):
            if j in within and j not in seen:
                seen.add(j)
                stack.append(j)
    return frozenset(seen)


def _surviving_components(
    gc: TransitionGraph,
    gf: TransitionGraph,
    nodes_c: BoxSet,
    nodes_f: BoxSet,
) -> list[tuple[BoxSet, BoxSet]]:
    """Match fine recurrent components into coarse ones.

    Returns (coarse component, union of its fine components) for every
    coarse component that at least one fine component projects into.
    Components with no fine descendant are refinement artifacts and are
    dropped.
    """
    comps_c = recurrent_components(gc, within=nodes_c)
    comps_f = recurrent_components(gf, within=nodes_f)
    assigned: dict[int, set[int]] = {}
    for cf in comps_f:
        parents = {k // 2 for k in cf}
        for idx, cc in enumerate(comps_c):
            if parents <= cc:
                assigned.setdefault(idx, set()).update(cf)
                break
    return [(comps_c[i], frozenset(assigned[i])) for i in sorted(assigned)]


def _split_tops(gf: TransitionGraph, survivors: list[tuple[BoxSet, BoxSet]]) -> tuple[set[int], set[int]]:
    """Partition survivor boxes (fine) into top (unreachable from others) and rest."""
    reaches = [reach(gf, rep, "forward") for _, rep in survivors]
    top: set[int] = set()
    rest: set[int] = set()
    for i, (_, rep) in enumerate(survivors):
        reachable = any(rep & reaches[j] for j in range(len(survivors)) if j != i)
        (rest if reachable else top).update(rep)
    return top, rest


def _level_step(
    f: PiecewiseMap,
    ambient: IntervalUnion,
    gc: TransitionGraph,
    gf: TransitionGraph,
    level: int,
) -> _LevelCandidate | None:
    """One extraction step; None means f is transitive on the ambient set."""
    nodes_c = _restricted(gc, ambient)
    nodes_f = _restricted(gf, ambient)
    if _strongly_connected(gc, nodes_c) and _strongly_connected(gf, nodes_f):
        return None
    survivors = _surviving_components(gc, gf, nodes_c, nodes_f)
    if not survivors:
        # no persistent recurrence: ambient is a transient shell, stop
        return None
    top, rest = _split_tops(gf, survivors)
    note = ""
    if not rest:
        if len(survivors) == 1:
            # a single sink component: extract it if it is proper
            candidate = _forward_closure(gf, frozenset(survivors[0][1]), nodes_f)
            if candidate == nodes_f:
                return None
            top, rest = set(), set(survivors[0][1])
            note = "single recurrent component; repelling recurrence unchanged"
        else:
            raise InconsistencyError(
                f"level {level}: survivors are mutually unreachable, no attracting side"
            )
    att_f = _forward_closure(gf, frozenset(rest), nodes_f)
    if att_f == nodes_f:
        raise InconsistencyError(f"level {level}: attracting candidate is not proper")

    # stability across one refinement: redo the split on the coarse graph alone
    comps_c = recurrent_components(gc, within=nodes_c)
    coarse_survivor_idx = set()
    for i, cc in enumerate(comps_c):
        if any(cc == s[0] for s in survivors):
            coarse_survivor_idx.add(i)
    reaches_c = {i: reach(gc, comps_c[i], "forward") for i in coarse_survivor_idx}
    rest_c: set[int] = set()
    for i in coarse_survivor_idx:
        if any(comps_c[i] & reaches_c[j] for j in coarse_survivor_idx if j != i):
            rest_c.update(comps_c[i])
    if not rest_c and len(coarse_survivor_idx) == 1:
        rest_c.update(comps_c[next(iter(coarse_survivor_idx))])
    att_c = _forward_closure(gc, frozenset(rest_c), nodes_c) if rest_c else frozenset()
    gap = 0.0
    if att_c and att_f:
        gap = hausdorff(gc.cover.to_intervals(att_c), gf.cover.to_intervals(att_f))
        allowance = 4.0 * gc.cover.width
        if gap > allowance:
            raise ResolutionTooCoarseError(level, gap, allowance)

    basin = reach(gf, gf.cover.dilate_boxes(att_f, 1), "backward")
    return _LevelCandidate(
        attracting_boxes=att_f,
        top_boxes=frozenset(top),
        basin_boxes=basin,
        coarse_gap=gap,
        note=note,
    )


def maximal_proper_attracting_set(
    f: PiecewiseMap,
    ambient: IntervalUnion,
    g: TransitionGraph,
) -> tuple[IntervalUnion, IntervalUnion] | None:
    """Largest proper attracting candidate inside ``ambient``, with its basin.

    None when the restricted graph is strongly connected at the given
    resolution and its refinement (transitive case).
    """
    gf = build_graph(f, 2 * g.n)
    cand = _level_step(f, ambient, g, gf, level=1)
    if cand is None:
        return None
    return (
        gf.cover.to_intervals(cand.attracting_boxes),
        gf.cover.to_intervals(cand.basin_boxes),
    )


def repelling_set(f: PiecewiseMap, basin: IntervalUnion, g: TransitionGraph) -> IntervalUnion:
    """Boxes whose forward orbits can avoid the basin interior forever.

    The complement of the basin interior is taken at box level; a box
    belongs to the repelling set iff it can reach a cycle of the restricted
    graph on that complement.  Empty results are structurally impossible
    outside the transitive case and raise.
    """
    if basin.is_empty:
        raise InconsistencyError("repelling_set needs a nonempty basin")
    basin_boxes = g.cover.boxes_overlapping(basin)
    interior = {
        k
        for k in basin_boxes
        if all(nb in basin_boxes for nb in (k - 1, k + 1) if 0 <= nb < g.n)
    }
    outside = frozenset(range(g.n)) - frozenset(interior)
    cores = recurrent_components(g, within=outside)
    if not cores:
        raise InconsistencyError("no recurrence outside the basin interior")
    seeds: set[int] = set()
    for c in cores:
        seeds.update(c)
    sub_nodes = outside
    seen = set(seeds)
    stack = list(seeds)
    while stack:
        k = stack.pop()
        for j in g.in_boxes(k):
            if j in sub_nodes and j not in seen:
                seen.add(j)
                stack.append(j)
    return g.cover.to_intervals(seen)


def leveled_decomposition(
    f: PiecewiseMap,
    max_depth: int = DEFAULT_MAX_DEPTH,
    n_boxes: int = DEFAULT_N_BOXES,
) -> ARChain:
    """Extract the full attracting/repelling chain of ``f``.

    Levels are reported on the refined cover (2*n_boxes), whose width is
    the chain's ``box_width``.
    """
    gc = build_graph(f, n_boxes)
    gf = build_graph(f, 2 * n_boxes)
    ambient = full()
    tops_acc: set[int] = set()
    levels: list[ARLevel] = []
    diags: list[dict] = []
    truncated = True
    for i in range(1, max_depth + 1):
        cand = _level_step(f, ambient, gc, gf, level=i)
        if cand is None:
            truncated = False
            break
        tops_acc.update(cand.top_boxes)
        att = gf.cover.to_intervals(cand.attracting_boxes)
        if tops_acc:
            rep = gf.cover.to_intervals(reach(gf, frozenset(tops_acc), "backward"))
        else:
            rep = empty()
        if rep.is_empty:
            raise InconsistencyError(
                f"level {i}: repelling set is empty; no dual recurrence exists"
            )
        basin = gf.cover.to_intervals(cand.basin_boxes)
        levels.append(
            ARLevel(
                index=i,
                attracting=att,
                repelling=rep,
                basin=basin,
                overlap=att.intersect(rep),
            )
        )
        diags.append(
            {"level": i, "coarse_fine_gap": cand.coarse_gap, "note": cand.note}
        )
        ambient = att
    m = len(levels)
    morse = []
    for i in range(m + 1):
        a_i = full() if i == 0 else levels[i - 1].attracting
        r_next = full() if i + 1 > m else levels[i].repelling
        morse.append(a_i.intersect(r_next))
    connecting = []
    for j in range(m):
        a_j = full() if j == 0 else levels[j - 1].attracting
        taken = levels[j].attracting.union(levels[j].repelling)
        connecting.append(a_j.difference(taken))
    overlap = empty()
    for lv in levels:
        overlap = overlap.union(lv.overlap)
    return ARChain(
        levels=tuple(levels),
        attractor=ambient,
        morse_sets=tuple(morse),
        connecting_regions=tuple(connecting),
        overlap=overlap,
        truncated=truncated,
        n_boxes=n_boxes,
        box_width=gf.cover.width,
        diagnostics={"levels": diags},
    )


# -- classification -------------------------------------------------------------


def classify_alpha(chain: ARChain, x: float) -> AlphaClass:
    """Classify the backward limit set of ``x`` from chain membership.

    The chain's regions A_{i-1} \\ A_i and the attractor tile [0,1]; the
    class is read off the region containing ``x``.  When another region
    sits strictly within one box width, or ``x`` lies in a genuine
    attracting/repelling overlap, the answer is ``overlap`` with both
    candidate limit sets attached rather than a guess.  Exactly one box
    width away is resolved: the regions themselves are only known to one
    box, so demanding more would leave thin attractors unclassifiable.
    """
    m = chain.level_count
    w = chain.box_width
    if m == 0:
        return AlphaClass("whole-space", None, (full(),))
    for i in range(1, m + 1):
        level = chain.levels[i - 1]
        if level.attracting.distance(x) <= w and level.repelling.distance(x) <= w:
            return AlphaClass("overlap", i, (level.repelling, chain.repelling(i + 1)))
    # region i (1..m) is A_{i-1} \ A_i with answer R_i; region m+1 is the
    # attractor with answer X
    regions = [
        chain.attracting(i - 1).difference(chain.attracting(i))
        for i in range(1, m + 1)
    ]
    regions.append(chain.attractor)
    hits = [
        i
        for i, region in enumerate(regions, start=1)
        if not region.is_empty and region.contains(x, "closed", EPS_GEOM)
    ]
    if not hits:
        hits = [
            min(
                (i for i, r in enumerate(regions, start=1) if not r.is_empty),
                key=lambda i: regions[i - 1].distance(x),
            )
        ]
    rival, rival_index = math.inf, m + 1
    for i, region in enumerate(regions, start=1):
        if i not in hits and not region.is_empty:
            d = region.distance(x)
            if d < rival:
                rival, rival_index = d, i
    if len(hits) > 1 or rival < w:
        # ambiguity sits on the boundary between two regions; its level is
        # the smaller of the two, whose shared frontier is the edge of A_i
        i = min(min(hits), rival_index) if rival < w else min(hits)
        return AlphaClass("overlap", i, (chain.repelling(i), chain.repelling(i + 1)))
    i = hits[0]
    if i <= m:
        return AlphaClass("repeller", i, (chain.repelling(i),))
    if chain.truncated:
        return AlphaClass("unresolved", None, (chain.attractor,))
    return AlphaClass("whole-space", None, (full(),))


def alpha_limit_estimate(
    f: PiecewiseMap,
    x: float,
    depth: int,
    cap: int = 4096,
) -> IntervalUnion:
    """Empirical backward limit set by preimage iteration.

    Generations past the first three quarters of ``depth`` approximate the
    tail of the preimage tree; their points are returned as a degenerate
    interval union.  Generations are breadth-capped at ``cap`` points,
    retained evenly across [0,1] to preserve spread.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    gen = np.array([x])
    keep_from = depth - max(1, depth // 4)
    kept: list[np.ndarray] = []
    for d in range(1, depth + 1):
        nxt: set[float] = set()
        for p in gen:
            nxt.update(f.preimages(float(p)))
        if not nxt:
            raise EmptyPreimageError(d - 1)
        arr = np.array(sorted(nxt))
        if arr.size > cap:
            idx = np.linspace(0, arr.size - 1, cap).round().astype(int)
            arr = arr[np.unique(idx)]
        gen = arr
        if d > keep_from:
            kept.append(arr)
    pts = np.unique(np.concatenate(kept))
    return normalize([(p, p) for p in pts])
