import math

import numpy as np
import pytest

from menger.functionals import (Cover, CoverError, L_IM_estimate, L_M_estimate, L_MC_estimate, cover_bound,
                                cover_from_sets, cover_join_tree, cover_sum, covers_edges, net_levels, proof_cover,
                                separated_bound_check)
from menger.graphs import mst
from menger.metric import MetricError, MetricSpace, excess
from menger.shapes import ShapeSpec, generate
from menger.steiner import CapExceeded

SQ5 = MetricSpace.euclidean([[0, 0], [1, 0], [1, 1], [0, 1], [0.5, 0.5]])


def segment(n=1001):
    s = generate(ShapeSpec("segment", samples=n))
    return s.space, s.indices


def diagonals(n=143):
    s = generate(ShapeSpec("square_diagonals", samples=n))
    return s.space, s.indices


def test_intrinsic_values_on_the_square():
    assert L_IM_estimate(SQ5, [0, 1, 2, 3]).value == pytest.approx(3.0)
    assert L_IM_estimate(SQ5, range(5)).value == pytest.approx(2 * math.sqrt(2))
    assert L_IM_estimate(SQ5, [2]).value == 0


def test_intrinsic_cap_is_reported_with_eps():
    space, A = segment(101)
    with pytest.raises(CapExceeded, match="eps=0.05"):
        L_IM_estimate(space, A, [0.2, 0.05])


def test_menger_values():
    space, A = diagonals()
    est = L_M_estimate(space, A, [1.0, 0.5, 0.2, 0.1, 0.05, 0.01])
    assert est.value == pytest.approx(3.0)
    assert est.direction == "lower"
    two = MetricSpace.euclidean([[0, 0], [0.3, 0.4]])
    assert L_M_estimate(two, [0, 1]).value == pytest.approx(0.5)
    space, A = segment()
    assert L_M_estimate(space, A, [0.1, 0.01]).value == pytest.approx(1.0)


def test_menger_choquet_values():
    space, A = diagonals()
    est = L_MC_estimate(space, A, [1.0, 0.5, 0.2, 0.1, 0.05, 0.01])
    assert est.value == pytest.approx(2 * math.sqrt(2), abs=0.02)
    assert est.params["certified_lower"] == pytest.approx(1 + math.sqrt(3), abs=1e-6)
    assert L_MC_estimate(SQ5, [3]).value == 0
    space, A = segment()
    seg = L_MC_estimate(space, A)
    assert seg.value == pytest.approx(1.0) and seg.params["exact_levels"]


def test_menger_choquet_monotone_on_nested_exact_levels():
    space, A = segment(501)
    est = L_MC_estimate(space, A, [0.5, 0.2, 0.1, 0.05, 0.02])
    values = [lv["value"] for lv in est.levels]
    assert all(lv["method"] == "collinear_exact" for lv in est.levels)
    assert values == sorted(values)
    levels = net_levels(space, A, [0.5, 0.2, 0.1, 0.05, 0.02])
    for (_, a), (_, b) in zip(levels, levels[1:]):
        assert set(a) <= set(b)


def test_matrix_mode_estimates_are_exact_per_level():
    rng = np.random.default_rng(3)
    X = rng.random((9, 2))
    D = np.sqrt(((X[:, None] - X[None]) ** 2).sum(-1))
    M = MetricSpace.from_matrix((D + D.T) / 2)
    est = L_MC_estimate(M, range(9), [0.5, 0.2, 0.01])
    assert est.params["exact_levels"]
    values = [lv["value"] for lv in est.levels]
    assert values == sorted(values)


def test_spanning_tree_non_monotonicity_witness():
    assert mst(SQ5, [0, 1, 2, 3])[1] == 3
    assert mst(SQ5, range(5))[1] == pytest.approx(2 * math.sqrt(2), abs=1e-15)


def test_schedule_validation():
    with pytest.raises(MetricError):
        L_M_estimate(SQ5, range(5), [0.1, 0.2])
    with pytest.raises(MetricError):
        L_M_estimate(SQ5, [], [0.1])


def test_separated_bound_examples():
    space, A = segment(101)
    assert separated_bound_check(space, A, 0.1, 1.0, seeds=range(20))
    assert separated_bound_check(SQ5, [2], 0.3, 0.0)
    space, A = diagonals(41)
    assert separated_bound_check(space, A, 0.2, 2 * math.sqrt(2), seeds=range(20))
    assert not separated_bound_check(space, A, 0.05, 0.01, seeds=range(2))


def test_cover_sum_examples():
    space, A = segment(11)
    assert cover_sum(space, cover_from_sets(space, [A], 1.0, A)) == pytest.approx(1.0)
    assert cover_sum(space, cover_from_sets(space, [[a] for a in A], 0.1, A)) == 0
    halves = cover_from_sets(space, [range(0, 6), range(5, 11)], 0.5, A)
    assert cover_sum(space, halves) >= 1.0 - 1e-12
    with pytest.raises(CoverError):
        cover_sum(space, cover_from_sets(space, [A], 0.5, A))
    with pytest.raises(CoverError):
        cover_sum(space, cover_from_sets(space, [range(5)], 1.0, A))
    bad = Cover(((0, 10),), 2.0, (0, 10), (0.5,))
    with pytest.raises(CoverError):
        bad.validate(space)


@pytest.mark.parametrize("delta", [0.1, 0.05, 0.025])
def test_proof_cover_on_segment(delta):
    space, A = segment()
    pc = proof_cover(space, A, delta)
    pc.cover.validate(space)
    assert pc.bound_ok
    assert pc.bound == pytest.approx(cover_bound(delta, 1.0))
    edges = list(zip(A, A[1:]))
    assert covers_edges(pc.cover, edges)
    assert pc.total >= 1.0 - 1e-9


def test_proof_cover_bound_arithmetic():
    assert cover_bound(0.05, 1.0) == pytest.approx(1.8 * 1.0125 + 0.45)


def test_proof_cover_singleton_and_range():
    pc = proof_cover(SQ5, [4], 0.05)
    assert pc.total == 0 and pc.cover.elements == ((4,),)
    with pytest.raises(MetricError):
        proof_cover(SQ5, range(5), 0.125)
    with pytest.raises(MetricError):
        proof_cover(SQ5, [], 0.05)


def test_proof_cover_on_diagonals():
    space, A = diagonals()
    pc = proof_cover(space, A, 0.05)
    pc.cover.validate(space)
    assert pc.bound_ok
    assert pc.total >= 2 * math.sqrt(2) - 1e-9


def windows(space, A, width, step):
    xs = space.coords[list(A), 0]
    out = []
    lo = 0.0
    while lo < 1.0 - 1e-12:
        out.append([a for a, x in zip(A, xs) if lo - 1e-12 <= x <= lo + width + 1e-12])
        lo += step
    return out


def test_cover_join_tree_on_segment_windows():
    space, A = segment(201)
    cover = cover_from_sets(space, windows(space, A, 0.15, 0.1), 0.15, A)
    assert len(cover.elements) == 10
    j = cover_join_tree(space, cover, [0, 200])
    assert j.length <= j.vertex_bound + 1e-12
    assert j.vertex_bound <= j.cover_bound + 1e-12
    assert j.cover_bound == pytest.approx(sum(cover.diameters))
    assert j.length == pytest.approx(1.0)


def test_cover_join_tree_inside_one_element():
    space, A = segment(21)
    cover = cover_from_sets(space, [A], 1.0, A)
    j = cover_join_tree(space, cover, [3, 7])
    assert j.length <= 1.0 and set(j.tree.terminals) == {3, 7}


def test_cover_join_tree_on_diagonals():
    space, A = diagonals(101)
    X = space.coords
    delta = 0.15
    elems = []
    for sign in (1, -1):
        on = [a for a in A if abs((X[a, 1] - 0.5) - sign * (X[a, 0] - 0.5)) < 1e-9]
        t = X[on, 0]
        lo = 0.0
        while lo < 1.0 - 1e-12:
            elems.append([a for a, x in zip(on, t) if lo - 1e-12 <= x <= lo + 0.1 + 1e-12])
            lo += 0.07
    cover = cover_from_sets(space, elems, delta, A)
    corners = [int(np.argmin(np.linalg.norm(X - c, axis=1))) for c in ([0, 0], [1, 0], [1, 1], [0, 1])]
    j = cover_join_tree(space, cover, corners)
    assert j.length <= j.cover_bound + 1e-12
    assert j.cover_bound <= sum(cover.diameters) + 2 * delta + 1e-12
    assert j.length >= 1 + math.sqrt(3) - 1e-9


def test_cover_join_tree_errors():
    space, A = segment(21)
    apart = cover_from_sets(space, [range(0, 5), range(10, 21), range(4, 6)], 1.0, range(0, 6))
    with pytest.raises(CoverError, match="disconnected"):
        cover_join_tree(space, apart, [0, 4])
    only_p = cover_from_sets(space, [range(0, 3), range(2, 6)], 1.0, range(6))
    with pytest.raises(CoverError, match="only in points of P"):
        cover_join_tree(space, only_p, [0, 2, 5])
    with pytest.raises(MetricError):
        cover_join_tree(space, only_p, [0])


def test_excess_of_nets_is_below_eps():
    space, A = diagonals(61)
    for e, P in net_levels(space, A, [0.3, 0.1, 0.05]):
        assert excess(space, A, P) < e
