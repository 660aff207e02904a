"""Semicontinuity sweeps over the shipped families, one CSV per family.

    python3 scripts/run_golab.py --out results/golab
"""

import argparse
from pathlib import Path

from menger.cli import dumps_csv
from menger.golab import counterexample_disconnected, family_experiment, lower_limit_experiment

FINE = [0.2, 0.1, 0.05, 0.02, 0.01, 0.005, 0.002, 0.001]


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", default="results/golab")
    ap.add_argument("--steps", type=int, default=6)
    ap.add_argument("--samples", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    for name in ("semicircle", "shrunk_koch", "constant"):
        samples = args.samples if name == "semicircle" else 4
        rep = family_experiment(name, args.steps, samples=samples, eps_schedule=FINE, seed=args.seed)
        (out / f"{name}.csv").write_text(dumps_csv(rep.rows()))
        print(f"{name:12s} limit={rep.limit_lmc:.6f} liminf={rep.liminf_estimate:.6f} "
              f"gap={rep.gap:+.6f} {rep.verdict}")

    rep = counterexample_disconnected(args.steps, FINE, seed=args.seed)
    (out / "disconnected.csv").write_text(dumps_csv(rep.rows()))
    print(f"{'disconnected':12s} limit={rep.limit_lmc:.6f} grids={[round(s['lmc_lower'], 4) for s in rep.steps]} "
          "lstar=0 per step")

    kept = lower_limit_experiment("semicircle", 8, [0.5, 0.25, 0.1], samples=64)
    print(f"lower limit of semicircles keeps {kept['kept']}/{kept['probe']} segment samples")


if __name__ == "__main__":
    main()
