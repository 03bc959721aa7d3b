"""The doubling map has no proper attracting set: the chain is trivial.

Every box reaches every box in the transition graph, so the decomposition
stops at level zero, the only Morse set is the whole interval, and the
Lyapunov function is identically zero.  Backward limit sets of every point
fill the interval.
"""

from ardecomp import (
    alpha_limit_estimate,
    classify_alpha,
    doubling_map,
    evaluator_from_chain,
    full,
    hausdorff,
    leveled_decomposition,
    v_value,
    verify_monotone,
)


def main():
    f = doubling_map()
    chain = leveled_decomposition(f, n_boxes=256)
    print(f"levels: {chain.level_count}")
    print(f"attractor: {chain.attractor.to_pairs()}")
    print(f"Morse sets: {[m.to_pairs() for m in chain.morse_sets]}")

    ev = evaluator_from_chain(chain)
    print(f"\nevaluator is degenerate: {ev.level_count == 0}")
    for x in (0.1, 0.37, 0.8):
        v, tail = v_value(ev, f, x)
        print(f"V({x}) = {v}  (tail bound {tail:.2e})")

    # a direct backward-orbit estimate confirms what the chain reports:
    # preimages of any point spread over the whole interval
    est = alpha_limit_estimate(f, 0.3, depth=12)
    print(f"\nbackward estimate from 0.3 at depth 12:")
    print(f"  distance to [0,1] in Hausdorff metric: {hausdorff(est, full()):.4f}")
    print(f"  chain classification of 0.3: {classify_alpha(chain, 0.3)}")

    report = verify_monotone(f, ev, samples=200, steps=5, seed=7)
    print(f"\nmonotonicity spot check: {len(report['violations'])} violations "
          f"in {report['checked']} sampled orbits")


if __name__ == "__main__":
    main()
