"""Regenerate tests/data/frozen_oracles.json from the brute-force oracles.

Instances are stored with their coordinates, so the frozen values do not depend
on random-number streams.  Run from the repository root:

    python3 scripts/freeze_oracles.py
"""

import json
import sys
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

import oracles  # noqa: E402


def smt_instances(rng, count=200):
    out = []
    for _ in range(count):
        k = int(rng.integers(1, 5))
        c = int(rng.integers(0, 5))
        pts = rng.random((k + c, 2)).round(6)
        D = oracles.distance_matrix(pts)
        P, C = list(range(k)), list(range(k, k + c))
        out.append({"points": pts.tolist(), "P": P, "C": C, "smt": oracles.smt_bruteforce(D, P, C)})
    return out


def mst_instances(rng, count=200):
    out = []
    for _ in range(count):
        k = int(rng.integers(1, 7))
        dim = int(rng.integers(1, 4))
        pts = rng.random((k, dim)).round(6)
        D = oracles.distance_matrix(pts)
        out.append({"points": pts.tolist(), "mst": oracles.mst_enumerate(D, range(k))})
    return out


def main():
    rng = np.random.default_rng(20240611)
    data = {
        "smt_restricted": smt_instances(rng),
        "mst": mst_instances(rng),
        # ascending greedy on {0, 0.1, ..., 1.0} with eps = 0.25
        "greedy_trace": oracles.greedy_separated([round(0.1 * i, 10) for i in range(11)], 0.25),
        # grid {1/4, 2/4, 3/4, 1}: spanning tree through consecutive points
        "grid4_mst": oracles.mst_enumerate(oracles.distance_matrix([0.25, 0.5, 0.75, 1.0]), range(4)),
    }
    path = ROOT / "tests" / "data" / "frozen_oracles.json"
    path.parent.mkdir(exist_ok=True)
    path.write_text(json.dumps(data, indent=1) + "\n")
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
