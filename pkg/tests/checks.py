"""Inequality checks shared by the hypothesis suites and the acceptance gate.

Each ``check_*`` raises AssertionError with a message on failure.
"""

from __future__ import annotations

import numpy as np

from menger.graphs import (Chain, SteinerTree, cut_chain, cycle_longest_edge_removal, cycle_order, graph_length,
                           is_proper, make_proper, maximal_chains, mst, path_length, tree_to_cycle)
from menger.metric import MetricSpace, excess, max_eps_separated
from menger.steiner import augment_tree, smt_euclidean_small, smt_restricted

TOL = 1e-9


def prufer_edges(seq, n):
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
    return edges + [(u, v)]


def proper_tree(points, seq, terminals) -> tuple[MetricSpace, SteinerTree]:
    space = MetricSpace.euclidean(points)
    n = len(points)
    edges = prufer_edges(seq, n) if n > 1 else []
    return space, make_proper(space, SteinerTree.build(range(n), edges, terminals))


def random_instance(rng, n_min=2, n_max=8, t_min=2, t_max=8):
    """Random planar points, a random labelled tree on them and a terminal subset."""
    n = int(rng.integers(max(n_min, t_min), n_max + 1))
    pts = rng.random((n, 2))
    seq = rng.integers(0, n, size=max(n - 2, 0)).tolist()
    k = int(rng.integers(t_min, min(t_max, n) + 1))
    terms = sorted(rng.choice(n, size=k, replace=False).tolist())
    return proper_tree(pts, seq, terms)


def check_steiner2(points, P, Q):
    """smt(P) <= smt(Q) + |P| e(P, Q) with exact smt on a finite metric, plus the augmentation bound."""
    X = np.asarray(points, dtype=float)
    D = np.sqrt(((X[:, None] - X[None]) ** 2).sum(-1))
    space = MetricSpace.from_matrix((D + D.T) / 2)
    everything = range(space.n)
    sP = smt_restricted(space, P, everything)
    sQ = smt_restricted(space, Q, everything)
    slack = len(set(P)) * excess(space, P, Q)
    assert sP.length <= sQ.length + slack + TOL, (sP.length, sQ.length, slack)
    aug = augment_tree(space, sQ.tree, P)
    assert set(aug.terminals) == set(P)
    assert graph_length(space, aug) <= sQ.length + slack + TOL


def check_moore(points):
    """mst(P) <= 2(|P|-1)/|P| smt(P) with the exact planar smt."""
    space = MetricSpace.euclidean(points)
    P = range(space.n)
    m = mst(space, P)[1]
    s = smt_euclidean_small(space, P).length
    k = space.n
    assert m <= 2 * (k - 1) / k * s + TOL, (m, s)


def check_moore2(space, tree):
    """Cycle through exactly the terminals, at most twice the tree length; path bound after cutting."""
    cyc = tree_to_cycle(space, tree)
    assert set(cyc.vertices) == set(tree.terminals)
    assert len(cycle_order(cyc)) == len(tree.terminals)
    c_len = graph_length(space, cyc)
    assert c_len <= 2 * graph_length(space, tree) + TOL, (c_len, graph_length(space, tree))
    path = cycle_longest_edge_removal(space, cyc)
    m = len(tree.terminals)
    assert graph_length(space, path) <= (m - 1) / m * c_len + TOL


def check_chain2(space, path, t):
    """The four postconditions of the chain cut."""
    chain = Chain(tuple(path))
    pieces, excluded = cut_chain(space, chain, t)
    total = path_length(space, path)
    k = len(pieces)
    # 1. count bound k < 1 + 2l/t, compared as (k-1) t < 2l (a length-0 chain has one piece)
    if total > 0:
        assert (k - 1) * t < 2 * total, (k, total, t)
    else:
        assert k == 1
    # 2. every piece fits
    for p in pieces:
        assert path_length(space, p.path) <= t + TOL
    # 3. pieces are consecutive sub-paths covering every vertex, overlapping in at most a cut vertex
    flat = [v for p in pieces for v in p.path]
    assert set(flat) == set(path)
    for a, b in zip(pieces, pieces[1:]):
        assert len(set(a.path) & set(b.path)) <= 1
    inside = {e for p in pieces for e in p.edges}
    assert len(inside) == sum(len(p.edges) for p in pieces), "pieces share an edge"
    # 4. an edge in no piece is longer than t
    for e in chain.edges:
        if e not in inside:
            assert e in excluded and space.dist(*e) > t
    assert set(excluded) | inside == set(chain.edges)


def check_chain1(tree):
    """Maximal chains are edge-disjoint, cover every edge, and number at most 2|P| - 3."""
    assert is_proper(tree)
    chains = maximal_chains(tree)
    edges = [e for c in chains for e in c.edges]
    assert len(edges) == len(set(edges)) == len(tree.edges)
    assert set(edges) == set(tree.edges)
    assert len(chains) <= 2 * len(tree.terminals) - 3, (len(chains), len(tree.terminals))


def check_totally_bounded(points, eps, seeds=range(100)):
    """Every greedy maximal eps-separated subset has at most max(2 L / eps, 1) points.

    For a finite set the Menger-Choquet length is smt(A) <= mst(A), so the
    spanning-tree length is a valid upper value for L.
    """
    space = MetricSpace.euclidean(points)
    A = range(space.n)
    L = mst(space, A)[1]
    bound = max(2 * L / eps, 1.0)
    for s in seeds:
        assert len(max_eps_separated(space, A, eps, seed=s)) <= bound + TOL
