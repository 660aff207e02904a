"""Steiner tree lengths on finite metric samples.

``smt_restricted`` is exact when Steiner points must come from a finite
candidate set (Dreyfus-Wagner over the metric closure).  For the Euclidean
plane, ``smt_euclidean_small`` is exact for up to four terminals; beyond that
only bracketing certificates are available.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .graphs import IndexedGraph, SteinerTree, graph_length, make_proper, mst, spanning_tree
from .metric import MetricError, MetricSpace, diam, nearest_in

TERMINAL_CAP = 12
MAX_GRID = 900
WEISZFELD_TOL = 1e-10
WEISZFELD_MAX_ITER = 10_000
COLLAPSE_TOL = 1e-9


class CapExceeded(ValueError):
    pass


@dataclass(frozen=True)
class SmtResult:
    tree: SteinerTree
    length: float
    method: str
    lower: float
    upper: float
    space: MetricSpace  # the space ``tree`` indexes into (may carry extra Steiner coordinates)

    def to_json(self) -> dict:
        return {"length": self.length, "lower": self.lower, "upper": self.upper,
                "method": self.method, "tree": self.tree.to_json()}


def _single(P) -> SteinerTree:
    return SteinerTree.build([P[0]], [], [P[0]])


def smt_restricted(space: MetricSpace, P, candidates=(), cap: int = TERMINAL_CAP) -> SmtResult:
    """Shortest Steiner tree on ``P`` whose Steiner points lie in ``candidates``."""
    P = space.index_set(P)
    if not P:
        raise MetricError("smt of an empty set")
    if len(P) > cap:
        raise CapExceeded(f"{len(P)} terminals exceed the exact-DP cap of {cap}")
    if len(P) == 1:
        return SmtResult(_single(P), 0.0, "dp_exact", 0.0, 0.0, space)
    pset = set(P)
    nodes = list(P) + [c for c in space.index_set(candidates) if c not in pset]
    D = space.pairwise(nodes)
    m, k = len(nodes), len(P)
    full = (1 << (k - 1)) - 1
    dp = np.full((full + 1, m), np.inf)
    via = np.zeros((full + 1, m), dtype=np.intp)     # relaxation source u
    split = np.zeros((full + 1, m), dtype=np.intp)   # sub-mask used at u
    cols = np.arange(m)
    for mask in range(1, full + 1):
        if mask & (mask - 1) == 0:
            t = mask.bit_length()  # terminal node index (node 0 is the root)
            dp[mask] = D[t]
            via[mask] = t
            continue
        g = np.full(m, np.inf)
        best_sub = np.zeros(m, dtype=np.intp)
        low = mask & -mask
        sub = (mask - 1) & mask
        while sub:
            if sub & low:
                val = dp[sub] + dp[mask ^ sub]
                better = val < g
                g = np.where(better, val, g)
                best_sub = np.where(better, sub, best_sub)
            sub = (sub - 1) & mask
        M = g[:, None] + D
        u = np.argmin(M, axis=0)
        dp[mask] = M[u, cols]
        via[mask] = u
        split[mask] = best_sub[u]
    edges = set()
    stack = [(full, 0)]
    while stack:
        mask, v = stack.pop()
        u = int(via[mask, v])
        if u != v:
            edges.add((nodes[u], nodes[v]))
        if mask & (mask - 1):
            s = int(split[mask, u])
            stack += [(s, u), (mask ^ s, u)]
    verts = set(P) | {x for e in edges for x in e}
    g = IndexedGraph(tuple(verts), tuple(edges))
    tree = make_proper(space, spanning_tree(space, g, P))
    length = graph_length(space, tree)
    return SmtResult(tree, length, "dp_exact", length, length, space)


def _prufer_tree(seq, n):
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    edges = []
    for x in seq:
        leaf = min(i for i in range(n) if degree[i] == 1)
        edges.append((leaf, x))
        degree[leaf] -= 1
        degree[x] -= 1
    u, v = [i for i in range(n) if degree[i] == 1]
    edges.append((u, v))
    return edges


def _steiner_topologies(k: int):
    """Labelled trees on ``k`` terminals plus ``j`` Steiner points of degree exactly 3."""
    if k == 2:
        yield 0, [(0, 1)]
        return
    seen = set()
    for j in range(0, k - 1):
        n = k + j
        if n < 3:
            continue
        for seq in itertools.product(range(n), repeat=n - 2):
            if any(seq.count(s) != 2 for s in range(k, n)):
                continue
            edges = _prufer_tree(seq, n)
            key = (j, frozenset(frozenset(e) for e in edges))
            if key in seen:
                continue
            seen.add(key)
            yield j, edges


def _optimise_steiner(term_xy, j, edges):
    """Gauss-Seidel Weiszfeld updates for the free Steiner points; None when a point collapses."""
    k = len(term_xy)
    nbrs = {s: [] for s in range(k, k + j)}
    for a, b in edges:
        if a >= k:
            nbrs[a].append(b)
        if b >= k:
            nbrs[b].append(a)
    xy = [tuple(p) for p in term_xy]
    for s in range(k, k + j):
        fixed = [xy[w] for w in nbrs[s] if w < k] or term_xy
        xy.append((sum(p[0] for p in fixed) / len(fixed) + 1e-3 * (s - k),
                   sum(p[1] for p in fixed) / len(fixed)))
    scale = max(1e-12, max(math.dist(a, b) for a in term_xy for b in term_xy))
    for _ in range(WEISZFELD_MAX_ITER):
        move = 0.0
        for s in range(k, k + j):
            sx, sy = xy[s]
            wx = wy = wsum = 0.0
            for w in nbrs[s]:
                px, py = xy[w]
                d = math.hypot(px - sx, py - sy)
                if d < COLLAPSE_TOL * scale:
                    return None
                wx += px / d
                wy += py / d
                wsum += 1.0 / d
            nx, ny = wx / wsum, wy / wsum
            move = max(move, math.hypot(nx - sx, ny - sy))
            xy[s] = (nx, ny)
        if move < WEISZFELD_TOL:
            break
    return xy


def smt_euclidean_small(space: MetricSpace, P) -> SmtResult:
    """Exact planar Steiner minimal tree for at most four terminals.

    Every tree topology whose Steiner points have degree 3 is optimised to
    stationarity; topologies whose Steiner points collapse onto a neighbour
    are skipped because the merged topology is enumerated separately.
    """
    P = space.index_set(P)
    if space.mode != "euclidean" or space.dim != 2:
        raise MetricError("smt_euclidean_small needs a planar euclidean space")
    if not 1 <= len(P) <= 4:
        raise CapExceeded("smt_euclidean_small handles 1 to 4 terminals")
    if len(P) == 1:
        return SmtResult(_single(P), 0.0, "topology_exact", 0.0, 0.0, space)
    term_xy = [tuple(space.coords[p]) for p in P]
    k = len(P)
    best = None
    for j, edges in _steiner_topologies(k):
        xy = _optimise_steiner(term_xy, j, edges) if j else term_xy
        if xy is None:
            continue
        length = sum(math.dist(xy[a], xy[b]) for a, b in edges)
        if best is None or length < best[0] - 1e-12:
            best = (length, j, edges, xy)
    length, j, edges, xy = best
    ext = space.extended(xy[k:]) if j else space
    label = list(P) + list(range(space.n, space.n + j))
    tree = SteinerTree.build(label, [(label[a], label[b]) for a, b in edges], P)
    length = graph_length(ext, tree)
    return SmtResult(tree, length, "topology_exact", length - 1e-8, length, ext)


def moore_lower(mst_length: float, count: int) -> float:
    if count <= 1:
        return 0.0
    return mst_length * count / (2 * (count - 1))


def smt_bounds(space: MetricSpace, P) -> SmtResult:
    """Bracket from the spanning tree: ``mst |P| / (2(|P|-1)) <= smt <= mst``."""
    P = space.index_set(P)
    if not P:
        raise MetricError("smt of an empty set")
    tree, length = mst(space, P)
    return SmtResult(tree, length, "mst_upper", moore_lower(length, len(P)), length, space)


def collinear(space: MetricSpace, P, tol: float = 1e-12) -> bool:
    if space.mode != "euclidean":
        return False
    X = space.coords[list(P)]
    if space.dim == 1 or len(P) <= 2:
        return True
    X = X - X[0]
    s = np.linalg.svd(X, compute_uv=False)
    return bool(s[1] <= tol * max(1.0, s[0]))


def smt_collinear(space: MetricSpace, P) -> SmtResult:
    """Points on one line: the tree is the path in line order and its length is the span."""
    P = space.index_set(P)
    X = space.coords[list(P)]
    if len(P) > 1:
        far = int(np.argmax(np.linalg.norm(X - X[0], axis=1)))
        direction = X[far] - X[0]
        order = [P[i] for i in np.argsort((X - X[0]) @ direction, kind="stable")]
    else:
        order = list(P)
    tree = SteinerTree.build(P, list(zip(order, order[1:])), P)
    length = graph_length(space, tree)
    return SmtResult(tree, length, "collinear_exact", length, length, space)


def candidate_grid(space: MetricSpace, P, pitch: float, max_points: int = MAX_GRID) -> np.ndarray:
    X = space.coords[list(P)]
    lo, hi = X.min(axis=0), X.max(axis=0)
    axes = [np.arange(a, b + pitch / 2, pitch) if b > a else np.array([a]) for a, b in zip(lo, hi)]
    count = int(np.prod([len(ax) for ax in axes]))
    if count > max_points:
        raise CapExceeded(f"candidate grid of pitch {pitch} has {count} points (cap {max_points})")
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, space.dim)


def smt_grid(space: MetricSpace, P, pitch: float) -> SmtResult:
    """Steiner points restricted to a grid over the bounding box: an upper bound on ``smt(P)``."""
    P = space.index_set(P)
    if space.mode != "euclidean":
        raise MetricError("grid candidates need a euclidean space")
    grid = candidate_grid(space, P, pitch)
    ext = space.extended(grid)
    res = smt_restricted(ext, P, range(space.n, ext.n))
    _, mst_len = mst(space, P)
    lower = max(moore_lower(mst_len, len(P)), diam(space, P))
    return SmtResult(res.tree, res.length, "dp_grid", min(lower, res.length), res.length, ext)


def smt_estimate(space: MetricSpace, P, grid_pitch: float | None = None) -> SmtResult:
    """Best available value for ``smt(P)`` with its certificate.

    Exact for singletons, collinear sets, finite (matrix) ambients within the
    terminal cap, and planar sets of at most four points.  Otherwise the value
    is the shortest witness tree found (grid DP or spanning tree), bracketed
    below by the larger of the spanning-tree bound and the diameter.
    """
    P = space.index_set(P)
    if not P:
        raise MetricError("smt of an empty set")
    if len(P) == 1:
        return SmtResult(_single(P), 0.0, "dp_exact", 0.0, 0.0, space)
    if space.mode == "matrix":
        if len(P) <= TERMINAL_CAP:
            return smt_restricted(space, P, range(space.n))
        return smt_bounds(space, P)
    if collinear(space, P):
        return smt_collinear(space, P)
    if space.dim == 2 and len(P) <= 4:
        return smt_euclidean_small(space, P)
    bounds = smt_bounds(space, P)
    lower = max(bounds.lower, diam(space, P))
    best = SmtResult(bounds.tree, bounds.length, "mst_upper", lower, bounds.length, space)
    if grid_pitch and space.dim == 2 and len(P) <= TERMINAL_CAP:
        try:
            g = smt_grid(space, P, grid_pitch)
        except CapExceeded:
            g = None
        if g is not None and g.length < best.length:
            best = SmtResult(g.tree, g.length, "dp_grid", lower, g.length, g.space)
    return best


def augment_tree(space: MetricSpace, tree_Q: SteinerTree, P) -> SteinerTree:
    """Attach every point of ``P`` missing from the tree to its nearest terminal of the tree."""
    P = space.index_set(P)
    if not P:
        raise MetricError("augment_tree needs a non-empty P")
    verts = set(tree_Q.vertices)
    missing = [p for p in P if p not in verts]
    edges = list(tree_Q.edges)
    if missing:
        near, _ = nearest_in(space, missing, tree_Q.terminals)
        edges += [(p, int(v)) for p, v in zip(missing, near)]
    return SteinerTree.build(verts | set(missing), edges, P)
