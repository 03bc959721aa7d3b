"""Walk through the x^2 map: two hyperbolic fixed points, one level.

0 attracts (f'(0) = 0) and 1 repels (f'(1) = 2), so the chain has a single
attracting/repelling pair and the Lyapunov profile drops from 1 at the
repeller through the connecting gap down to 0 at the attractor.
"""

from pathlib import Path

import numpy as np

from ardecomp import (
    alpha_from_v,
    classify_alpha,
    evaluator_from_chain,
    leveled_decomposition,
    square_map,
    v_value,
)


def main():
    f = square_map()
    chain = leveled_decomposition(f, n_boxes=256)
    print(f"levels: {chain.level_count}  (box width {chain.box_width})")
    level = chain.levels[0]
    print(f"A1 = {level.attracting.to_pairs()}")
    print(f"R1 = {level.repelling.to_pairs()}")
    print(f"connecting region C0 = {chain.connecting_regions[0].to_pairs()}")

    ev = evaluator_from_chain(chain)
    print("\n x      V(x)       class (direct)    class (from value)")
    for x in (0.0, 0.02, 0.2, 0.5, 0.9, 0.999, 1.0):
        v, _ = v_value(ev, f, x)
        direct = classify_alpha(chain, x)
        from_v = alpha_from_v(v, ev, chain)
        print(f"{x:5.3f}  {v:9.6f}   {str(direct):<17} {from_v}")
    print("(0.02 maps into the attracting box in one step, so its V is")
    print(" already 0; reading the class off the value alone cannot tell")
    print(" it from the attractor.  Band values carry that caveat.)")

    xs = np.linspace(0.0, 1.0, 257)
    vs = [v_value(ev, f, float(x))[0] for x in xs]
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        out = Path(__file__).with_name("square_lyapunov.png")
        plt.plot(xs, vs)
        plt.xlabel("x")
        plt.ylabel("V(x)")
        plt.title("Lyapunov profile of the squaring map")
        plt.savefig(out, dpi=120)
        print(f"\nwrote {out}")
    except ImportError:
        print("\nmatplotlib not installed; printing a coarse profile instead")
        for i in range(0, 257, 32):
            bar = "#" * int(40 * vs[i])
            print(f"x={xs[i]:5.3f} |{bar}")


if __name__ == "__main__":
    main()
