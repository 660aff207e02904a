"""Lower estimates against proof-cover upper bounds as delta shrinks.

Prints one row per (shape, delta): the certified lower value, the best Steiner
witness, the cover sum, its bound and the relative bracket widths.

    python3 scripts/sandwich.py
"""

import argparse

from menger.functionals import L_MC_estimate, covers_edges, proof_cover
from menger.shapes import ShapeSpec, generate

SCHEDULE = [0.2, 0.1, 0.05, 0.02, 0.01, 0.005, 0.0025]
SHAPES = {"segment": ShapeSpec("segment", samples=2001),
          "koch(3)": ShapeSpec("koch", 3, samples=32),
          "diagonals": ShapeSpec("square_diagonals", samples=1001)}


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--deltas", default="0.02,0.01,0.005,0.0025")
    args = ap.parse_args()
    deltas = [float(x) for x in args.deltas.split(",")]

    print("shape,delta,certified_lower,value,cover_sum,bound,true,width_certified,width_value,edges_covered")
    for name, spec in SHAPES.items():
        s = generate(spec)
        est = L_MC_estimate(s.space, s.indices, SCHEDULE)
        lower = est.params["certified_lower"]
        edges = [e for c in s.components for e in zip(c, c[1:])]
        for delta in deltas:
            pc = proof_cover(s.space, s.indices, delta, eps_schedule=SCHEDULE)
            print(f"{name},{delta},{lower:.6f},{est.value:.6f},{pc.total:.6f},{pc.bound:.6f},{s.true_length:.6f},"
                  f"{(pc.total - lower) / s.true_length:.4f},{(pc.total - est.value) / s.true_length:.4f},"
                  f"{covers_edges(pc.cover, edges)}")


if __name__ == "__main__":
    main()
