"""Graphs whose vertices are indices of a metric space.

Edge lengths are always the ambient distances; there are no free weights.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .metric import IndexSet, MetricSpace


DELAUNAY_MIN = 2000  # planar sets above this size use the Delaunay graph for their spanning tree


class GraphError(ValueError):
    pass


def _edge(a: int, b: int) -> tuple[int, int]:
    a, b = int(a), int(b)
    if a == b:
        raise GraphError(f"self-loop at {a}")
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class IndexedGraph:
    vertices: IndexSet
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        verts = tuple(sorted({int(v) for v in self.vertices}))
        edges = tuple(sorted({_edge(a, b) for a, b in self.edges}))
        vs = set(verts)
        for a, b in edges:
            if a not in vs or b not in vs:
                raise GraphError(f"edge {(a, b)} has an endpoint outside the vertex set")
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", edges)

    def adjacency(self) -> dict[int, list[int]]:
        adj: dict[int, list[int]] = {v: [] for v in self.vertices}
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        for v in adj:
            adj[v].sort()
        return adj

    def degree(self, v: int) -> int:
        return sum(1 for e in self.edges if v in e)

    def is_connected(self) -> bool:
        if not self.vertices:
            return False
        adj = self.adjacency()
        seen = {self.vertices[0]}
        stack = [self.vertices[0]]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == len(self.vertices)

    def to_json(self) -> dict:
        return {"vertices": list(self.vertices), "edges": [list(e) for e in self.edges]}


@dataclass(frozen=True)
class SteinerTree:
    """A tree whose vertex set contains ``terminals``; other vertices are Steiner points."""

    graph: IndexedGraph
    terminals: IndexSet

    def __post_init__(self):
        terms = tuple(sorted({int(t) for t in self.terminals}))
        object.__setattr__(self, "terminals", terms)
        g = self.graph
        if not terms:
            raise GraphError("a Steiner tree needs at least one terminal")
        if not set(terms) <= set(g.vertices):
            raise GraphError("every terminal must be a vertex of the tree")
        if len(g.edges) != len(g.vertices) - 1 or not g.is_connected():
            raise GraphError("graph is not a tree")

    @classmethod
    def build(cls, vertices: Iterable[int], edges: Iterable, terminals: Iterable[int]) -> "SteinerTree":
        return cls(IndexedGraph(tuple(vertices), tuple(map(tuple, edges))), tuple(terminals))

    @property
    def vertices(self) -> IndexSet:
        return self.graph.vertices

    @property
    def edges(self):
        return self.graph.edges

    @property
    def steiner_points(self) -> IndexSet:
        t = set(self.terminals)
        return tuple(v for v in self.vertices if v not in t)

    def to_json(self) -> dict:
        out = self.graph.to_json()
        out["terminals"] = list(self.terminals)
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "SteinerTree":
        return cls.build(obj["vertices"], obj["edges"], obj["terminals"])


@dataclass(frozen=True)
class Chain:
    """A tree path ``x_1 .. x_n`` (a single vertex is a chain of length 0)."""

    path: tuple[int, ...]

    @property
    def edges(self) -> list[tuple[int, int]]:
        return [_edge(a, b) for a, b in zip(self.path, self.path[1:])]


def graph_length(space: MetricSpace, g: IndexedGraph | SteinerTree) -> float:
    edges = g.edges
    if not edges:
        return 0.0
    e = np.asarray(edges, dtype=np.intp)
    if space.mode == "matrix":
        return float(space.matrix[e[:, 0], e[:, 1]].sum())
    return float(np.linalg.norm(space.coords[e[:, 0]] - space.coords[e[:, 1]], axis=1).sum())


def path_length(space: MetricSpace, path: Sequence[int]) -> float:
    if len(path) < 2:
        return 0.0
    p = np.asarray(path, dtype=np.intp)
    if space.mode == "matrix":
        return float(space.matrix[p[:-1], p[1:]].sum())
    return float(np.linalg.norm(np.diff(space.coords[p], axis=0), axis=1).sum())


def mst(space: MetricSpace, P) -> tuple[SteinerTree, float]:
    """Minimum spanning tree on exactly ``P`` (dense Prim, lowest index wins ties)."""
    P = np.asarray(space.index_set(P), dtype=np.intp)
    if len(P) == 0:
        raise GraphError("mst of an empty set")
    n = len(P)
    if n > DELAUNAY_MIN and space.mode == "euclidean" and space.dim == 2:
        edges = _delaunay_mst(space.coords[P])
        if edges is not None:
            tree = SteinerTree.build(P.tolist(), [(int(P[a]), int(P[b])) for a, b in edges], P.tolist())
            return tree, graph_length(space, tree)
    in_tree = np.zeros(n, dtype=bool)
    in_tree[0] = True
    key = space.row(int(P[0]), P)
    parent = np.zeros(n, dtype=np.intp)
    key[0] = np.inf
    edges = []
    for _ in range(n - 1):
        k = int(np.argmin(np.where(in_tree, np.inf, key)))
        in_tree[k] = True
        edges.append((int(P[parent[k]]), int(P[k])))
        row = space.row(int(P[k]), P)
        better = (~in_tree) & (row < key)
        key = np.where(better, row, key)
        parent = np.where(better, k, parent)
    tree = SteinerTree.build(P.tolist(), edges, P.tolist())
    return tree, graph_length(space, tree)


def _delaunay_mst(X: np.ndarray):
    """Planar minimum spanning tree restricted to Delaunay edges; None when degenerate."""
    from scipy.sparse import coo_matrix
    from scipy.sparse.csgraph import minimum_spanning_tree
    from scipy.spatial import Delaunay, QhullError

    try:
        simplices = Delaunay(X).simplices
    except QhullError:
        return None  # collinear input
    e = np.vstack([simplices[:, [0, 1]], simplices[:, [1, 2]], simplices[:, [0, 2]]])
    e = np.unique(np.sort(e, axis=1), axis=0)
    w = np.linalg.norm(X[e[:, 0]] - X[e[:, 1]], axis=1)
    if np.any(w == 0):
        return None  # coincident points vanish from a sparse graph
    m = minimum_spanning_tree(coo_matrix((w, (e[:, 0], e[:, 1])), shape=(len(X), len(X)))).tocoo()
    if m.nnz != len(X) - 1:
        return None
    return list(zip(m.row.tolist(), m.col.tolist()))


def spanning_tree(space: MetricSpace, g: IndexedGraph, terminals: Iterable[int]) -> SteinerTree:
    """Minimum-length spanning tree of a connected graph ``g`` (Kruskal on its own edges)."""
    parent = {v: v for v in g.vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    weighted = sorted((space.dist(a, b), a, b) for a, b in g.edges)
    kept = []
    for _, a, b in weighted:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
            kept.append((a, b))
    if len(kept) != len(g.vertices) - 1:
        raise GraphError("graph is not connected")
    return SteinerTree.build(g.vertices, kept, terminals)


def is_proper(tree: SteinerTree) -> bool:
    adj = tree.graph.adjacency()
    terms = set(tree.terminals)
    return all(len(adj[v]) >= 2 for v in tree.vertices if v not in terms) or len(tree.vertices) == 1


def make_proper(space: MetricSpace | None, tree: SteinerTree) -> SteinerTree:
    """Repeatedly delete Steiner points of degree 1 together with their edge.

    Also realises "the union of all tree paths between terminals".
    """
    adj = {v: set(ns) for v, ns in tree.graph.adjacency().items()}
    terms = set(tree.terminals)
    stack = [v for v in adj if v not in terms and len(adj[v]) <= 1]
    while stack:
        v = stack.pop()
        if v not in adj:
            continue
        for w in adj.pop(v):
            adj[w].discard(v)
            if w not in terms and len(adj[w]) <= 1:
                stack.append(w)
    edges = {_edge(a, b) for a in adj for b in adj[a]}
    return SteinerTree.build(adj.keys(), edges, tree.terminals)


def _is_interior(v, adj, terms) -> bool:
    return v not in terms and len(adj[v]) == 2


def maximal_chains(tree: SteinerTree) -> list[Chain]:
    """Split a proper tree into its maximal chains (interior vertices are degree-2 Steiner points)."""
    if len(tree.terminals) < 2:
        raise GraphError("maximal chains need at least two terminals")
    if not is_proper(tree):
        raise GraphError("tree is not proper")
    adj = tree.graph.adjacency()
    terms = set(tree.terminals)
    used: set[tuple[int, int]] = set()
    chains = []
    for b in tree.vertices:
        if _is_interior(b, adj, terms):
            continue
        for first in adj[b]:
            if _edge(b, first) in used:
                continue
            path = [b, first]
            while _is_interior(path[-1], adj, terms):
                a, c = adj[path[-1]]
                path.append(c if a == path[-2] else a)
            used.update(_edge(x, y) for x, y in zip(path, path[1:]))
            chains.append(Chain(tuple(path)))
    return chains


def reduce_tree(space: MetricSpace | None, tree: SteinerTree) -> SteinerTree:
    """Contract every maximal chain to one edge between its endpoints."""
    if len(tree.vertices) == 1:
        return tree
    chains = maximal_chains(tree)
    edges = {_edge(c.path[0], c.path[-1]) for c in chains}
    verts = {v for e in edges for v in e}
    return SteinerTree.build(verts, edges, tree.terminals)


def cut_chain(space: MetricSpace, chain: Chain, t: float) -> tuple[list[Chain], list[tuple[int, int]]]:
    """Online bin-packing cut of a chain into pieces of length at most ``t``.

    Walk from ``x_1``; extend the current piece while it stays within ``t``,
    otherwise close it and start the next piece at the shared vertex.  An edge
    longer than ``t`` closes the current piece (possibly a single vertex), is
    reported as excluded, and the walk restarts past it.  Consecutive pieces
    share their cut vertex, so every vertex is covered and every edge lies in a
    piece or is excluded.
    """
    if not t > 0:
        raise GraphError("t must be positive")
    path = chain.path
    pieces: list[list[int]] = []
    excluded: list[tuple[int, int]] = []
    cur = [path[0]]
    cur_len = 0.0
    for a, b in zip(path, path[1:]):
        w = space.dist(a, b)
        if w > t:
            pieces.append(cur)
            excluded.append(_edge(a, b))
            cur, cur_len = [b], 0.0
        elif cur_len + w <= t:
            cur.append(b)
            cur_len += w
        else:
            pieces.append(cur)
            cur, cur_len = [a, b], w
    pieces.append(cur)
    return [Chain(tuple(p)) for p in pieces], excluded


def _cycle_graph(order: Sequence[int]) -> IndexedGraph:
    n = len(order)
    return IndexedGraph(tuple(order), tuple((order[i], order[(i + 1) % n]) for i in range(n)))


def cycle_order(cycle: IndexedGraph) -> list[int]:
    """Vertex order around a cycle graph, starting at its lowest vertex."""
    adj = cycle.adjacency()
    if len(cycle.vertices) < 3 or any(len(ns) != 2 for ns in adj.values()):
        raise GraphError("not a cycle")
    start = cycle.vertices[0]
    order = [start, adj[start][0]]
    while True:
        a, b = adj[order[-1]]
        nxt = b if a == order[-2] else a
        if nxt == start:
            break
        order.append(nxt)
    if len(order) != len(cycle.vertices):
        raise GraphError("not a single cycle")
    return order


def _dfs_doubling(tree: SteinerTree) -> list[int]:
    adj = tree.graph.adjacency()
    terms = set(tree.terminals)
    root = tree.terminals[0]
    order, seen, stack = [], {root}, [root]
    while stack:
        v = stack.pop()
        if v in terms:
            order.append(v)
        for w in reversed(adj[v]):
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return order


def _induction_order(space: MetricSpace, tree: SteinerTree) -> list[int]:
    tree = reduce_tree(space, make_proper(space, tree))
    P = list(tree.terminals)
    if len(P) <= 3:
        return P
    adj = tree.graph.adjacency()
    terms = set(P)
    leaves = {v for v in tree.vertices if v in terms and len(adj[v]) == 1}
    pruned = {v: [w for w in adj[v] if w not in leaves] for v in tree.vertices if v not in leaves}
    pick = None
    for v in sorted(pruned):
        if v in terms or len(pruned[v]) > 1:
            continue
        hanging = [w for w in adj[v] if w in leaves]
        if len(hanging) >= 2:
            pick = (v, hanging[0], hanging[1])
            break
    if pick is None:
        return _dfs_doubling(tree)
    v, p1, p2 = pick
    rest = [e for e in tree.edges if p1 not in e and p2 not in e]
    sub = SteinerTree.build([u for u in tree.vertices if u not in (p1, p2)], rest,
                            [u for u in P if u not in (p1, p2)] + [v])
    order = _induction_order(space, sub)
    k = order.index(v)
    u, w = order[k - 1], order[(k + 1) % len(order)]
    if space.dist(u, p1) + space.dist(p2, w) <= space.dist(u, p2) + space.dist(p1, w):
        order[k:k + 1] = [p1, p2]
    else:
        order[k:k + 1] = [p2, p1]
    return order


def tree_to_cycle(space: MetricSpace, tree: SteinerTree) -> IndexedGraph:
    """A cycle through exactly the terminals of length at most twice the tree length."""
    if len(tree.terminals) < 3:
        raise GraphError("tree_to_cycle needs at least three terminals")
    order = _induction_order(space, tree)
    if sorted(order) != list(tree.terminals):
        order = _dfs_doubling(tree)
    return _cycle_graph(order)


def cycle_longest_edge_removal(space: MetricSpace, cycle: IndexedGraph) -> IndexedGraph:
    order = cycle_order(cycle)
    m = len(order)
    lengths = [space.dist(order[i], order[(i + 1) % m]) for i in range(m)]
    k = max(range(m), key=lambda i: (lengths[i], [-x for x in _edge(order[i], order[(i + 1) % m])]))
    path = order[k + 1:] + order[:k + 1]
    return IndexedGraph(tuple(path), tuple(zip(path, path[1:])))


def components_without(tree: SteinerTree, removed_edges: Iterable[tuple[int, int]]) -> dict[int, tuple[set[int], list]]:
    """Connected components of the tree after deleting ``removed_edges`` (vertices kept).

    Returns ``{root: (vertex set, edge list)}`` keyed by the lowest vertex of each component.
    """
    removed = {_edge(*e) for e in removed_edges}
    adj = defaultdict(list)
    for e in tree.edges:
        if e not in removed:
            adj[e[0]].append(e[1])
            adj[e[1]].append(e[0])
    seen: set[int] = set()
    out = {}
    for v in tree.vertices:
        if v in seen:
            continue
        comp, stack = {v}, [v]
        while stack:
            for w in adj[stack.pop()]:
                if w not in comp:
                    comp.add(w)
                    stack.append(w)
        seen |= comp
        edges = [e for e in tree.edges if e not in removed and e[0] in comp]
        out[min(comp)] = (comp, edges)
    return out
