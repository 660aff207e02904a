"""Per-level spanning-tree and Steiner values on the square diagonals.

Coarse nets are the four corners, where the spanning tree costs 3 while the
Steiner tree costs 1 + sqrt(3); finer nets include the centre and both values
approach 2 sqrt(2).

    python3 scripts/diagonals.py --samples 143
"""

import argparse

from menger.functionals import L_M_estimate, L_MC_estimate
from menger.shapes import ShapeSpec, generate

SCHEDULE = [1.0, 0.5, 0.2, 0.1, 0.05, 0.02, 0.01]


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--samples", type=int, default=143)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    s = generate(ShapeSpec("square_diagonals", samples=args.samples))
    lm = L_M_estimate(s.space, s.indices, SCHEDULE, seed=args.seed)
    lmc = L_MC_estimate(s.space, s.indices, SCHEDULE, seed=args.seed)
    print("eps,net_size,mst,smt,smt_method")
    for a, b in zip(lm.levels, lmc.levels):
        print(f"{a['eps']},{a['size']},{a['value']:.6f},{b['value']:.6f},{b['method']}")
    print(f"L_M estimate {lm.value:.6f}, L_MC estimate {lmc.value:.6f}")


if __name__ == "__main__":
    main()
