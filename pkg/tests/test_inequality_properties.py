"""Tree and net inequalities on 500 generated instances each, tolerance 1e-9."""

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

import checks

INEQUALITIES = settings(max_examples=500, deadline=None, derandomize=True)

coord = st.floats(min_value=0.0, max_value=1.0, allow_nan=False, allow_infinity=False)
point = st.tuples(coord, coord)


def point_lists(lo, hi):
    return st.lists(point, min_size=lo, max_size=hi)


@st.composite
def nested_pairs(draw):
    pts = draw(point_lists(2, 7))
    n = len(pts)
    P = draw(st.sets(st.integers(0, n - 1), min_size=1, max_size=5))
    Q = draw(st.sets(st.integers(0, n - 1), min_size=1, max_size=5))
    return pts, sorted(P), sorted(Q)


@st.composite
def proper_trees(draw, t_min=2, n_max=8):
    n = draw(st.integers(t_min, n_max))
    pts = draw(st.lists(point, min_size=n, max_size=n))
    seq = draw(st.lists(st.integers(0, n - 1), min_size=max(n - 2, 0), max_size=max(n - 2, 0)))
    terms = draw(st.sets(st.integers(0, n - 1), min_size=t_min, max_size=n))
    return checks.proper_tree(pts, seq, sorted(terms))


@st.composite
def chains(draw):
    pts = draw(st.lists(st.tuples(st.floats(-3, 3), st.floats(-3, 3)), min_size=1, max_size=12))
    t = draw(st.floats(min_value=0.05, max_value=3.0))
    return pts, t


@given(nested_pairs())
@INEQUALITIES
def test_steiner_tree_augmentation_inequality(inst):
    checks.check_steiner2(*inst)


@given(point_lists(2, 4))
@INEQUALITIES
def test_spanning_tree_vs_steiner_ratio_bound(pts):
    checks.check_moore(pts)


@given(proper_trees(t_min=3, n_max=7))
@INEQUALITIES
def test_tree_to_cycle_doubling_bound(inst):
    space, tree = inst
    checks.check_moore2(space, tree)


@given(chains())
@INEQUALITIES
def test_chain_cut_postconditions(inst):
    from menger.metric import MetricSpace

    pts, t = inst
    space = MetricSpace.euclidean(pts)
    checks.check_chain2(space, list(range(space.n)), t)


@given(proper_trees(t_min=2, n_max=10))
@INEQUALITIES
def test_maximal_chain_count(inst):
    _, tree = inst
    checks.check_chain1(tree)


@given(point_lists(1, 25), st.floats(min_value=0.02, max_value=1.5))
@settings(max_examples=500, deadline=None, derandomize=True)
def test_separated_set_cardinality(pts, eps):
    checks.check_totally_bounded(np.asarray(pts), eps, seeds=range(100))
