import math

import numpy as np
import pytest

from menger.metric import MetricError, hausdorff
from menger.shapes import (KOCH_DEPTH_CAP, ShapeSpec, combine, generate, koch_vertex_persistence, koch_vertices,
                           polyline_length)


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_semicircle_chain_lengths(n):
    s = generate(ShapeSpec("semicircle_chain", n=n, samples=10_000))
    assert s.true_length == math.pi
    assert polyline_length(s) == pytest.approx(math.pi, abs=1e-4)
    assert s.meta["arcs"] == 2 ** (n - 1)
    assert s.space.coords[:, 0].min() == -1 and s.space.coords[:, 0].max() == 1


def test_semicircle_chain_n0_is_the_segment():
    s = generate(ShapeSpec("semicircle_chain", n=0, samples=101))
    assert s.true_length == 2 and polyline_length(s) == pytest.approx(2)


def test_semicircle_chain_approaches_the_segment_in_hausdorff():
    seg = generate(ShapeSpec("polyline", samples=2001, vertices=((-1, 0), (1, 0))))
    prev = math.inf
    for n in range(1, 9):
        s = generate(ShapeSpec("semicircle_chain", n=n, samples=200))
        space, (A, B) = combine([s, seg])
        h = hausdorff(space, A, B)
        assert h == pytest.approx(2.0 ** (1 - n), abs=2e-3)
        assert h < prev
        prev = h


def test_koch_small_depths():
    for n in (0, 1):
        s = generate(ShapeSpec("koch", n=n))
        assert s.true_length == pytest.approx((4 / 3) ** n)
        assert polyline_length(s) == pytest.approx((4 / 3) ** n)
    assert generate(ShapeSpec("koch", n=0)).true_length == 1


@pytest.mark.parametrize("n", range(0, 7))
def test_koch_vertex_count_and_length(n):
    v = koch_vertices(n)
    assert len(v) == 4 ** n + 1
    assert np.linalg.norm(np.diff(v, axis=0), axis=1).sum() == pytest.approx((4 / 3) ** n, rel=1e-12)
    s = generate(ShapeSpec("koch", n=n, samples=4))
    assert polyline_length(s) == pytest.approx(s.true_length, rel=1e-12)


def test_koch_bumps_point_up():
    v = koch_vertices(1)
    assert v[2, 1] == pytest.approx(math.sqrt(3) / 6)
    assert np.all(koch_vertices(4)[:, 1] >= -1e-12)


def test_koch_vertex_persistence():
    for n in range(0, 5):
        for m in range(n + 1, 6):
            assert koch_vertex_persistence(n, m)
    moved = koch_vertices(2).copy()
    moved[3] += [0.0, 1e-6]
    assert not koch_vertex_persistence(2, 4, moved)
    with pytest.raises(MetricError):
        koch_vertex_persistence(3, 3)


@pytest.mark.parametrize("n", range(1, KOCH_DEPTH_CAP + 1))
def test_shrunk_koch_length_exceeds_geometric_floor(n):
    s = generate(ShapeSpec("shrunk_koch", n=n, samples=2))
    assert s.true_length > (16 / 15) ** n
    assert polyline_length(s) == pytest.approx(s.true_length, rel=1e-12)
    X = s.space.coords
    assert X[:, 0].min() == pytest.approx(-1) and X[:, 0].max() == pytest.approx(1)


def test_shrunk_koch_first_step_is_the_full_curve():
    s = generate(ShapeSpec("shrunk_koch", n=1))
    assert s.meta["scale"] == 1 and s.true_length == pytest.approx(8 / 3)


def test_square_diagonals():
    s = generate(ShapeSpec("square_diagonals", samples=143))
    assert s.true_length == pytest.approx(2 * math.sqrt(2))
    assert polyline_length(s) == pytest.approx(2 * math.sqrt(2))
    assert s.space.n == 2 * 143 - 1  # the centre is shared
    assert len(s.components) == 2


def test_polyline_and_segment():
    s = generate(ShapeSpec("polyline", samples=5, vertices=((0, 0), (3, 0), (3, 4))))
    assert s.true_length == 7 and polyline_length(s) == pytest.approx(7)
    assert s.space.n == 9
    assert generate(ShapeSpec("segment", samples=3, base=2.5)).true_length == 2.5


def test_spec_validation():
    for bad in (dict(kind="circle"), dict(kind="koch", n=KOCH_DEPTH_CAP + 1), dict(kind="shrunk_koch", n=0),
                dict(kind="segment", samples=1), dict(kind="segment", base=0.0), dict(kind="polyline"),
                dict(kind="koch", n=-1)):
        with pytest.raises(MetricError):
            ShapeSpec(**bad)


def test_combine_offsets():
    a = generate(ShapeSpec("segment", samples=3))
    b = generate(ShapeSpec("koch", n=1))
    space, sets = combine([a, b])
    assert sets == [(0, 1, 2), tuple(range(3, 8))]
    assert space.n == 8
