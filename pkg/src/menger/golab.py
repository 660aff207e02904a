"""Desk-scale experiments on lower semicontinuity of length under set convergence.

Both sides of every comparison are estimates, so a verdict is either
"consistent" or "inconclusive"; no experiment ever reports a violation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .functionals import DEFAULT_SCHEDULE, L_MC_estimate, net_levels
from .metric import IndexSet, MetricError, MetricSpace, discrete_lower_limit, dist_to_set, excess, nearest_in
from .shapes import SampledShape, ShapeSpec, combine, generate

LATE_STEPS = 3
REL_TOL = 0.02


@dataclass(frozen=True)
class ConvergenceReport:
    steps: tuple[dict, ...]
    limit_lmc: float
    liminf_estimate: float
    gap: float
    verdict: str
    params: dict = field(default_factory=dict)
    notes: tuple[str, ...] = ()

    def rows(self) -> list[dict]:
        eps = self.params.get("eps_schedule", [])
        out = [{"step": s["step"], "excess": s["excess"], "lmc_lower": s["lmc_lower"],
                "params_eps": eps[-1] if eps else "", "verdict": ""} for s in self.steps]
        out.append({"step": "limit", "excess": 0.0, "lmc_lower": self.limit_lmc,
                    "params_eps": eps[-1] if eps else "", "verdict": self.verdict})
        return out

    def to_json(self) -> dict:
        return {"steps": [dict(s) for s in self.steps], "limit_lmc": self.limit_lmc,
                "liminf_estimate": self.liminf_estimate, "gap": self.gap, "verdict": self.verdict,
                "params": dict(self.params), "notes": list(self.notes)}


def _verdict(limit_value: float, liminf: float, rel_tol: float) -> str:
    return "consistent" if limit_value <= liminf + rel_tol * max(limit_value, liminf) else "inconclusive"


def convergence_experiment(limit_shape: SampledShape, sequence, eps_schedule=None, seed: int | None = 0,
                           grid_pitch: float | None = None, rel_tol: float = REL_TOL) -> ConvergenceReport:
    """Track excess(A, A_n) and Menger-Choquet estimates along a shape sequence."""
    sequence = list(sequence)
    if not sequence:
        raise MetricError("empty sequence")
    space, sets = combine([limit_shape] + sequence)
    A, seq = sets[0], sets[1:]
    sched = list(DEFAULT_SCHEDULE if eps_schedule is None else eps_schedule)
    steps = []
    for k, (shape, An) in enumerate(zip(sequence, seq), start=1):
        est = L_MC_estimate(space, An, sched, grid_pitch=grid_pitch, seed=seed)
        steps.append({"step": shape.spec.n if shape.spec.n else k, "excess": excess(space, A, An),
                      "lmc_lower": est.value, "certified_lower": est.params["certified_lower"],
                      "true_length": shape.true_length})
    limit = L_MC_estimate(space, A, sched, grid_pitch=grid_pitch, seed=seed).value
    liminf = min(s["lmc_lower"] for s in steps[-LATE_STEPS:])
    return ConvergenceReport(tuple(steps), limit, liminf, liminf - limit, _verdict(limit, liminf, rel_tol),
                             {"eps_schedule": sched, "seed": seed, "grid_pitch": grid_pitch, "rel_tol": rel_tol})


def family(name: str, steps: int, samples: int = 2) -> tuple[SampledShape, list[SampledShape]]:
    """Limit shape and sequence for a named family; ``samples`` points per edge or arc."""
    if steps < 1:
        raise MetricError("steps must be positive")
    if name == "semicircle":
        return (generate(ShapeSpec("semicircle_chain", 0, samples=max(samples, 2))),
                [generate(ShapeSpec("semicircle_chain", n, samples=samples)) for n in range(1, steps + 1)])
    if name == "shrunk_koch":
        return (generate(ShapeSpec("segment", samples=max(samples, 2), base=2.0)),
                [generate(ShapeSpec("shrunk_koch", n, samples=samples)) for n in range(1, steps + 1)])
    if name == "constant":
        s = generate(ShapeSpec("koch", 2, samples=samples))
        return s, [s] * steps
    raise MetricError(f"unknown family {name!r}")


def _shift_segment(shape: SampledShape) -> SampledShape:
    """Segment from (-1, 0) to (1, 0), matching the endpoints of the sequence."""
    c = shape.space.coords.copy()
    c[:, 0] -= 1.0
    return SampledShape(shape.spec, MetricSpace.euclidean(c), shape.components, shape.true_length, shape.meta)


def family_experiment(name: str, steps: int, samples: int = 64, eps_schedule=None, seed: int | None = 0,
                      grid_pitch: float | None = None) -> ConvergenceReport:
    limit, seq = family(name, steps, samples)
    if name == "shrunk_koch":
        limit = _shift_segment(limit)
    rep = convergence_experiment(limit, seq, eps_schedule, seed, grid_pitch)
    if name == "semicircle":
        note = "each member has length pi while the limit segment has length 2"
    elif name == "shrunk_koch":
        note = "member lengths grow without bound while the limit segment has length 2"
    else:
        note = "constant sequence"
    return ConvergenceReport(rep.steps, rep.limit_lmc, rep.liminf_estimate, rep.gap, rep.verdict,
                             dict(rep.params, family=name, samples=samples), (note,))


def counterexample_disconnected(n: int, eps_schedule=None, limit_samples: int = 1001,
                                seed: int | None = 0) -> ConvergenceReport:
    """Grids {1/m, ..., m/m} converging to [0, 1].

    Finite sets have outer linear measure 0, so ``lstar`` is 0 at every step,
    while the limit segment has length 1: without connectedness the measure is
    not lower semicontinuous.  The Menger-Choquet estimates of the grids are
    also reported; they stay positive because Steiner trees connect the grid.
    """
    if n < 1:
        raise MetricError("n must be positive")
    grids = [np.arange(1, m + 1) / m for m in range(1, n + 1)]
    limit = np.linspace(0.0, 1.0, limit_samples)
    pts = np.concatenate([limit] + grids)[:, None]
    space = MetricSpace.euclidean(pts)
    A = tuple(range(limit_samples))
    sched = list(DEFAULT_SCHEDULE if eps_schedule is None else eps_schedule)
    steps, off = [], limit_samples
    for m, g in enumerate(grids, start=1):
        An = tuple(range(off, off + len(g)))
        off += len(g)
        est = L_MC_estimate(space, An, sched, seed=seed)
        steps.append({"step": m, "excess": excess(space, A, An), "lmc_lower": est.value, "lstar": 0.0})
    limit_value = L_MC_estimate(space, A, sched, seed=seed).value
    notes = ("lstar of every finite grid is 0 while the limit segment has lstar 1",)
    return ConvergenceReport(tuple(steps), limit_value, 0.0, 0.0 - limit_value, "inconclusive",
                             {"eps_schedule": sched, "seed": seed, "lstar_steps": 0.0}, notes)


@dataclass(frozen=True)
class HitCollection:
    centers: IndexSet
    radius: float
    eps: float
    smt_value: float  # Steiner value of the centres

    def to_json(self) -> dict:
        return {"centers": list(self.centers), "radius": self.radius, "eps": self.eps,
                "smt_value": self.smt_value}


def hit_collection(space: MetricSpace, A, eps: float, eps_schedule=None, seed: int | None = 0,
                   grid_pitch: float | None = None) -> HitCollection:
    """Balls of radius eps / (2|P|) around a net P whose Steiner value is within eps/2 of the best found."""
    if not eps > 0:
        raise MetricError("eps must be positive")
    est = L_MC_estimate(space, A, eps_schedule, grid_pitch=grid_pitch, seed=seed)
    levels = net_levels(space, A, eps_schedule, seed)
    for (e, P), lv in zip(levels, est.levels):
        if lv["value"] > est.value - eps / 2:
            return HitCollection(P, eps / (2 * len(P)), float(eps), lv["value"])
    raise AssertionError("the best level always qualifies")


def check_hits(space: MetricSpace, B, hc: HitCollection) -> bool:
    """True iff ``B`` meets every open ball of the collection."""
    B = space.index_set(B)
    return bool(B) and all(dist_to_set(space, c, B) < hc.radius for c in hc.centers)


def hit_witnesses(space: MetricSpace, B, hc: HitCollection) -> IndexSet:
    """One point of ``B`` per ball: the nearest to its centre (lowest index on ties)."""
    if not check_hits(space, B, hc):
        raise MetricError("B does not hit every ball")
    near, _ = nearest_in(space, list(hc.centers), space.index_set(B))
    return tuple(sorted({int(x) for x in near}))


def closure_check(space: MetricSpace, A, extra, eps_schedule=None, resolution: float = math.inf,
                  seed: int | None = 0) -> dict:
    """Adding limit points close to ``A`` moves the estimate by at most |extra| e(extra, A)."""
    A, extra = space.index_set(A), space.index_set(extra)
    far = [x for x in extra if dist_to_set(space, x, A) > resolution]
    if far:
        raise MetricError(f"point {far[0]} is farther than {resolution} from the set")
    base = L_MC_estimate(space, A, eps_schedule, seed=seed).value
    closed = L_MC_estimate(space, sorted(set(A) | set(extra)), eps_schedule, seed=seed).value
    slack = len(extra) * excess(space, extra, A) if extra else 0.0
    diff = abs(closed - base)
    return {"lmc_set": base, "lmc_closure": closed, "difference": diff, "slack": slack,
            "within_slack": diff <= slack + 1e-9}


def lower_limit_experiment(name: str, steps: int, radii, samples: int = 64) -> dict:
    """Fraction of limit-shape sample points that survive the discrete lower-limit test."""
    limit, seq = family(name, steps, samples)
    if name == "shrunk_koch":
        limit = _shift_segment(limit)
    space, sets = combine([limit] + seq)
    kept = discrete_lower_limit(space, sets[1:], radii, sets[0])
    return {"probe": len(sets[0]), "kept": len(kept), "fraction": len(kept) / len(sets[0])}
