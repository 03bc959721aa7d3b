"""First-return renormalization of a piecewise-linear Lorenz map.

The map x -> 1.3 x + 0.35 (mod 1) with the break at 0.5 returns to the
middle interval [0.35, 0.65] after two steps on each side.  Rescaling that
return map to [0,1] gives another Lorenz map with slope 1.69 = 1.3^2.  The
script shows the detected interval, the rescaled branches, the repelling
2-cycle that bounds the return window, and how the level-1 sets of the
box-graph decomposition line up with the renormalization structure.
"""

from ardecomp import (
    attracting_set_from_renorm,
    detect_renormalization,
    hausdorff,
    leveled_decomposition,
    orbit_avoiding_set,
    pl_lorenz_map,
)


def main():
    f = pl_lorenz_map()
    result = detect_renormalization(f, max_return=64)
    assert result is not None
    lo, hi = result.interval
    print(f"return interval: [{lo}, {hi}]")
    print(f"return times: left {result.return_times[0]}, "
          f"right {result.return_times[1]}")
    g = result.renormalized
    print(f"rescaled critical point: {g.critical}")
    for k, branch in enumerate(g.branches):
        slope, intercept = branch.params
        print(f"  branch {k}: {slope} * x + {intercept} on {branch.domain}")

    cyc = orbit_avoiding_set(f, result)
    print(f"\nrepelling set from the renormalization: {cyc.to_pairs()}")
    print(f"  (the 2-cycle 13/46 = {13/46}, 33/46 = {33/46})")

    att, stabilized, steps = attracting_set_from_renorm(f, result)
    print(f"attracting set from the renormalization "
          f"(stabilized={stabilized} in {steps} steps):")
    print(f"  {att.to_pairs()}")

    chain = leveled_decomposition(f, n_boxes=512)
    level = chain.levels[0]
    da = hausdorff(level.attracting, att)
    dr = hausdorff(level.repelling, cyc)
    print(f"\nbox-graph chain at 512 boxes: {chain.level_count} level(s)")
    print(f"  Hausdorff distance, A1 vs renormalization pieces: {da:.6f}")
    print(f"  Hausdorff distance, R1 vs repelling 2-cycle:      {dr:.6f}")
    print(f"  both within 4 box widths: {max(da, dr) <= 4 / 512}")


if __name__ == "__main__":
    main()
