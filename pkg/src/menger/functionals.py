"""Length functionals of finite samples and the covers that bound them.

Net-based sups (``L_M``, ``L_MC``, ``L_IM``) are evaluated along a decreasing
schedule of farthest-point nets; covers give upper bounds on the outer linear
measure at scale ``delta``.  Every value carries its direction and the
resolution that produced it.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
import numpy as np

from .graphs import (IndexedGraph, SteinerTree, components_without, cut_chain, graph_length,
                     make_proper, maximal_chains, mst, spanning_tree)
from .metric import IndexSet, MetricError, MetricSpace, diam, farthest_point_gaps, max_eps_separated
from .steiner import TERMINAL_CAP, CapExceeded, SmtResult, smt_estimate, smt_restricted

log = logging.getLogger(__name__)

DEFAULT_SCHEDULE = (0.2, 0.1, 0.05, 0.025)
EXACT_METHODS = frozenset({"dp_exact", "topology_exact", "collinear_exact"})
COVER_TOL = 1e-12


class CoverError(ValueError):
    pass


@dataclass(frozen=True)
class LengthEstimate:
    functional: str
    value: float
    direction: str
    params: dict = field(default_factory=dict)
    levels: tuple = ()
    witness: object = None

    def to_json(self) -> dict:
        out = {"functional": self.functional, "value": self.value, "direction": self.direction,
               "params": dict(self.params), "levels": [dict(lv) for lv in self.levels]}
        if self.witness is not None and hasattr(self.witness, "to_json"):
            out["witness"] = self.witness.to_json()
        return out


@dataclass(frozen=True)
class Cover:
    """Finite cover of ``covered`` with one diameter bound per element.

    ``elements`` hold the sample indices each set contains.  ``diameters`` may
    exceed the diameter of those members: a Euclidean element stands for the
    ambient ``r``-neighbourhood of the convex hull of its core, whose diameter
    is what the sum charges.
    """

    elements: tuple[IndexSet, ...]
    delta: float
    covered: IndexSet
    diameters: tuple[float, ...]

    def validate(self, space: MetricSpace) -> None:
        if not self.delta > 0:
            raise CoverError("delta must be positive")
        if len(self.diameters) != len(self.elements):
            raise CoverError("one diameter per element is required")
        for k, (U, d) in enumerate(zip(self.elements, self.diameters)):
            if d > self.delta + COVER_TOL:
                raise CoverError(f"element {k} has diameter {d} > delta {self.delta}")
            if diam(space, U) > d + COVER_TOL:
                raise CoverError(f"element {k} has members wider than its recorded diameter")
        union = set().union(*map(set, self.elements)) if self.elements else set()
        missing = set(self.covered) - union
        if missing:
            raise CoverError(f"{len(missing)} points are not covered (first: {min(missing)})")

    def to_json(self) -> dict:
        return {"delta": self.delta, "covered": list(self.covered),
                "elements": [list(U) for U in self.elements], "diameters": list(self.diameters)}


def cover_from_sets(space: MetricSpace, elements, delta: float, covered) -> Cover:
    """Cover whose diameters are the member diameters themselves."""
    elements = tuple(space.index_set(U) for U in elements)
    return Cover(elements, float(delta), space.index_set(covered), tuple(diam(space, U) for U in elements))


def cover_sum(space: MetricSpace, cover: Cover) -> float:
    cover.validate(space)
    return float(math.fsum(cover.diameters))


def covers_edges(cover: Cover, edges) -> bool:
    """True iff both ends of every edge share an element.

    Elements are convex in the Euclidean case, so such a cover also covers the
    polyline through the sample, not only the sample points.
    """
    owner: dict[int, set[int]] = {}
    for k, U in enumerate(cover.elements):
        for x in U:
            owner.setdefault(x, set()).add(k)
    return all(owner.get(a, set()) & owner.get(b, set()) for a, b in edges)


# ---------------------------------------------------------------- net estimates

def _schedule(eps_schedule) -> list[float]:
    sched = [float(e) for e in (DEFAULT_SCHEDULE if eps_schedule is None else eps_schedule)]
    if not sched or any(e <= 0 for e in sched) or any(b >= a for a, b in zip(sched, sched[1:])):
        raise MetricError("eps schedule must be strictly decreasing and positive")
    return sched


def net_levels(space: MetricSpace, A, eps_schedule=None, seed: int | None = 0) -> list[tuple[float, IndexSet]]:
    """Nested maximal eps-separated subsets of ``A``, one per schedule entry.

    Prefixes of a farthest-point ordering, so coarse levels open on extreme
    points and every level contains the previous one.
    """
    A = space.index_set(A)
    if not A:
        raise MetricError("estimate of an empty set")
    sched = _schedule(eps_schedule)
    order, gaps = farthest_point_gaps(space, A, seed=seed, limit=sched[-1])
    levels = []
    for e in sched:
        k = int(np.searchsorted(-gaps, -e, side="right"))
        levels.append((e, tuple(sorted(order[:max(k, 1)]))))
    return levels


def L_M_estimate(space: MetricSpace, A, eps_schedule=None, seed: int | None = 0) -> LengthEstimate:
    """Largest spanning-tree length over the net levels: a lower bound for the Menger length."""
    A = space.index_set(A)
    levels, best, best_tree = [], 0.0, None
    for e, P in net_levels(space, A, eps_schedule, seed):
        tree, length = mst(space, P)
        levels.append({"eps": e, "size": len(P), "value": length, "method": "mst"})
        if best_tree is None or length > best:
            best, best_tree = length, tree
    return LengthEstimate("L_M", best, "lower", {"eps_schedule": _schedule(eps_schedule), "seed": seed},
                          tuple(levels), best_tree)


def _level_smt(space: MetricSpace, P, candidates: str, grid_pitch, A) -> SmtResult:
    if candidates == "sample" and len(P) <= TERMINAL_CAP:
        return smt_restricted(space, P, A)
    return smt_estimate(space, P, grid_pitch=grid_pitch)


def L_MC_estimate(space: MetricSpace, A, eps_schedule=None, candidates: str = "grid",
                  grid_pitch: float | None = None, seed: int | None = 0) -> LengthEstimate:
    """Menger-Choquet length from Steiner-tree lengths of nested nets.

    ``value`` is the largest per-level Steiner value.  A level is exact for
    collinear nets, planar nets of at most four points and matrix spaces within
    the terminal cap; elsewhere the level value is the shortest witness tree
    found.  ``params["certified_lower"]`` keeps the part that is a proven
    lower bound: exact levels plus the spanning-tree and diameter bounds.
    """
    if candidates not in ("grid", "sample"):
        raise MetricError("candidates must be 'grid' or 'sample'")
    A = space.index_set(A)
    levels, best, certified, witness, all_exact = [], 0.0, 0.0, None, True
    for e, P in net_levels(space, A, eps_schedule, seed):
        res = _level_smt(space, P, candidates, grid_pitch, A)
        exact = res.method in EXACT_METHODS and (candidates == "grid" or space.mode == "matrix")
        all_exact &= exact
        lower = res.length if exact else res.lower
        levels.append({"eps": e, "size": len(P), "value": res.length, "lower": lower,
                       "upper": res.upper, "method": res.method})
        certified = max(certified, lower)
        if witness is None or res.length > best:
            best, witness = res.length, res
    params = {"eps_schedule": _schedule(eps_schedule), "candidates": candidates, "grid_pitch": grid_pitch,
              "seed": seed, "certified_lower": certified, "exact_levels": all_exact}
    return LengthEstimate("L_MC", best, "lower", params, tuple(levels), witness.tree)


def L_IM_estimate(space: MetricSpace, A, eps_schedule=None, seed: int | None = 0) -> LengthEstimate:
    """Intrinsic Menger length: Steiner points restricted to ``A``, exact per level."""
    A = space.index_set(A)
    levels, best, witness = [], 0.0, None
    for e, P in net_levels(space, A, eps_schedule, seed):
        if len(P) > TERMINAL_CAP:
            raise CapExceeded(f"net at eps={e} has {len(P)} points, above the exact-DP cap of {TERMINAL_CAP}")
        res = smt_restricted(space, P, A)
        levels.append({"eps": e, "size": len(P), "value": res.length, "method": res.method})
        if witness is None or res.length > best:
            best, witness = res.length, res
    return LengthEstimate("L_IM", best, "lower", {"eps_schedule": _schedule(eps_schedule), "seed": seed},
                          tuple(levels), witness.tree)


def separated_bound_check(space: MetricSpace, A, eps: float, L_MC_upper: float, seeds=range(100)) -> bool:
    """Every greedy maximal eps-separated subset has at most max(2 L / eps, 1) points."""
    if not eps > 0:
        raise MetricError("eps must be positive")
    bound = max(2.0 * L_MC_upper / eps, 1.0)
    return all(len(max_eps_separated(space, A, eps, seed=s)) <= bound + 1e-9 for s in seeds)


# ---------------------------------------------------------------- proof covers

@dataclass(frozen=True)
class ProofCover:
    cover: Cover
    total: float
    bound: float
    lmc_estimate: float
    P: IndexSet
    eps: float
    tree_length: float

    @property
    def bound_ok(self) -> bool:
        return self.total <= self.bound + 1e-9

    def to_json(self) -> dict:
        return {"sum": self.total, "bound": self.bound, "bound_ok": self.bound_ok,
                "lmc_estimate": self.lmc_estimate, "P": list(self.P), "eps": self.eps,
                "tree_length": self.tree_length, "cover": self.cover.to_json()}


def cover_bound(delta: float, lmc: float) -> float:
    return (1 + 16 * delta) * (lmc + delta / 4) + 9 * delta


def _fattened(space: MetricSpace, A: np.ndarray, core, r: float):
    """Sample points within ``r`` of ``core`` and the diameter charged for the element."""
    core = list(core)
    if len(core) == 1:
        d = space.row(core[0], A)
    else:
        d = np.full(len(A), np.inf)
        for k in range(0, len(core), 256):
            d = np.minimum(d, space.pairwise(core[k:k + 256], A).min(axis=0))
    members = tuple(int(a) for a in A[d < r])
    if space.mode == "euclidean":
        width = diam(space, core) + 2 * r
    else:
        width = diam(space, members)
    return members, width


def proof_cover(space: MetricSpace, A, delta: float, eps_schedule=None, seed: int | None = 0,
                grid_pitch: float | None = None) -> ProofCover:
    """Build a delta-cover of ``A`` from a near-optimal Steiner tree of a fine net.

    ``P`` is the coarsest net whose Steiner value is within ``delta/4`` of the
    Menger-Choquet estimate.  With ``eps = min(min gap of P, delta^2, delta/|P|)``
    the fine net ``P'`` extends ``P``; its spanning tree ``T'`` is split into
    the union ``T`` of paths between points of ``P`` and the components hanging
    off it.  Chains of ``T`` are cut at ``delta/2`` and fattened by ``2 eps``;
    hanging components of length at least ``eps`` are fattened by ``eps``.
    """
    if not 0 < delta < 1 / 8:
        raise MetricError("delta must lie in (0, 1/8)")
    A = space.index_set(A)
    if not A:
        raise MetricError("cover of an empty set")
    if len(A) == 1:
        cover = Cover((A,), delta, A, (0.0,))
        return ProofCover(cover, 0.0, cover_bound(delta, 0.0), 0.0, A, 0.0, 0.0)
    est = L_MC_estimate(space, A, eps_schedule, grid_pitch=grid_pitch, seed=seed)
    lmc = est.value
    levels = net_levels(space, A, eps_schedule, seed)
    P = next(P for (e, P), lv in zip(levels, est.levels) if lv["value"] > lmc - delta / 4)
    gap = diam(space, P) if len(P) == 1 else float(np.min(space.pairwise(P)[np.triu_indices(len(P), 1)]))
    eps = min(gap if len(P) > 1 else math.inf, delta * delta, delta / len(P))
    Pp = max_eps_separated(space, A, eps, seed=seed, start=P)
    Tp, tp_len = mst(space, Pp)
    Tp = SteinerTree.build(Tp.vertices, Tp.edges, P)
    T = make_proper(space, Tp)
    log.info("proof_cover: |P|=%d eps=%.3g |P'|=%d l(T')=%.6g l(T)=%.6g", len(P), eps, len(Pp), tp_len,
             graph_length(space, T))
    Aarr = np.asarray(A, dtype=np.intp)
    t = delta / 2
    cores: list[tuple[tuple[int, ...], float]] = []
    if len(T.vertices) == 1:
        cores.append(((T.vertices[0],), 2 * eps))
    else:
        for chain in maximal_chains(T):
            pieces, _ = cut_chain(space, chain, t)
            cores += [(c.path, 2 * eps) for c in pieces]
    # components of T' hanging off T
    tree_edges = set(T.edges)
    for root, (verts, edges) in components_without(Tp, tree_edges).items():
        hang = verts - set(T.vertices)
        if not hang:
            continue
        length = sum(space.dist(a, b) for a, b in edges)
        if length < eps:
            continue  # within eps of its attachment vertex, absorbed by the 2 eps fattening
        if length + 2 * eps <= delta:
            cores.append((tuple(sorted(verts)), eps))
            continue
        # oversized component: cut it along its own chains (branch points and the attachment are terminals)
        adj = IndexedGraph(tuple(verts), tuple(edges)).adjacency()
        ends = {v for v in verts if len(adj[v]) != 2} | (verts - hang)
        sub = SteinerTree.build(verts, edges, ends)
        for chain in maximal_chains(sub):
            pieces, _ = cut_chain(space, chain, t)
            cores += [(c.path, eps) for c in pieces]
    elements, widths = [], []
    for core, r in cores:
        members, width = _fattened(space, Aarr, core, r)
        elements.append(members)
        widths.append(width)
    cover = Cover(tuple(elements), delta, A, tuple(widths))
    cover.validate(space)
    total = float(math.fsum(widths))
    return ProofCover(cover, total, cover_bound(delta, lmc), lmc, P, eps, tp_len)


# ---------------------------------------------------------------- joining a cover

@dataclass(frozen=True)
class JoinedTree:
    tree: SteinerTree
    length: float
    vertex_bound: float   # sum of (|V_i| - 1) diam(U_i)
    cover_bound: float    # sum of diam(U_i) + delta (|P| - 2)


def cover_join_tree(space: MetricSpace, cover: Cover, P) -> JoinedTree:
    """Steiner tree on ``P`` routed through the intersection graph of the cover.

    Each point of ``P`` is assigned to the first element containing it; the
    minimal subtree of the intersection graph spanning those elements supplies
    one junction point (outside ``P``) per tree edge, and each element's points
    are linked by a path.
    """
    P = space.index_set(P)
    if len(P) < 2:
        raise MetricError("cover_join_tree needs at least two points")
    cover.validate(space)
    elems = [set(U) for U in cover.elements]
    owner = {}
    for p in P:
        hits = [i for i, U in enumerate(elems) if p in U]
        if not hits:
            raise CoverError(f"point {p} is not covered")
        owner[p] = hits[0]
    by_point: dict[int, list[int]] = {}
    for i, U in enumerate(elems):
        for x in U:
            by_point.setdefault(x, []).append(i)
    nbrs = {i: set() for i in range(len(elems))}
    for ids in by_point.values():
        for a in ids:
            nbrs[a].update(b for b in ids if b != a)
    required = set(owner.values())
    root = min(required)
    parent, seen, queue = {root: None}, {root}, [root]
    for i in queue:
        for j in sorted(nbrs[i]):
            if j not in seen:
                seen.add(j)
                parent[j] = i
                queue.append(j)
    if len(seen) != len(elems):
        raise CoverError("intersection graph of the cover is disconnected")
    # minimal subtree: keep the BFS-tree paths from required elements to the root
    keep = set()
    for i in required:
        while i is not None and i not in keep:
            keep.add(i)
            i = parent[i]
    # the root may be a non-required leaf of that subtree; prune such leaves
    tedges = {(min(i, parent[i]), max(i, parent[i])) for i in keep if parent[i] is not None}
    changed = True
    while changed:
        changed = False
        for i in list(keep):
            inc = [e for e in tedges if i in e]
            if i not in required and len(inc) <= 1 and len(keep) > 1:
                keep.discard(i)
                tedges -= set(inc)
                changed = True
    pset = set(P)
    V = {i: [p for p in P if owner[p] == i] for i in keep}
    for i, j in sorted(tedges):
        junction = sorted((elems[i] & elems[j]) - pset)
        if not junction:
            raise CoverError(f"elements {i} and {j} meet only in points of P")
        V[i].append(junction[0])
        V[j].append(junction[0])
    edges, verts = set(), set(P)
    vertex_bound = 0.0
    for i in sorted(keep):
        path = list(dict.fromkeys(V[i]))
        verts.update(path)
        edges.update((a, b) for a, b in zip(path, path[1:]) if a != b)
        vertex_bound += (len(path) - 1) * cover.diameters[i]
    g = IndexedGraph(tuple(verts), tuple(edges))
    tree = make_proper(space, spanning_tree(space, g, P))
    length = graph_length(space, tree)
    bound2 = float(math.fsum(cover.diameters)) + cover.delta * (len(P) - 2)
    return JoinedTree(tree, length, vertex_bound, bound2)
