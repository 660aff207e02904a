"""Finite metric spaces and the set-distance functionals built on them.

Every set is an index subset of one ambient :class:`MetricSpace`.  Empty-set
conventions follow ``sup {} = 0`` and ``inf {} = inf``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

TRIANGLE_TOL = 1e-9

IndexSet = tuple[int, ...]


class MetricError(ValueError):
    """Raised for malformed spaces or out-of-range indices."""


@dataclass(frozen=True, eq=False)
class MetricSpace:
    """A finite ambient sample, either Euclidean coordinates or a distance matrix.

    Euclidean spaces never materialise the full distance matrix, so samples of
    a few hundred thousand points are fine as long as callers only ask for
    distances between moderate subsets.
    """

    mode: str
    coords: np.ndarray | None = None
    matrix: np.ndarray | None = None
    n: int = field(init=False)

    def __post_init__(self):
        if self.mode == "euclidean":
            c = np.asarray(self.coords, dtype=float)
            if c.ndim == 1:
                c = c[:, None]
            if c.ndim != 2 or c.shape[0] < 1 or c.shape[1] < 1:
                raise MetricError("euclidean space needs a non-empty (n, dim) coordinate array")
            if not np.all(np.isfinite(c)):
                raise MetricError("coordinates must be finite")
            c.setflags(write=False)
            object.__setattr__(self, "coords", c)
            object.__setattr__(self, "n", c.shape[0])
        elif self.mode == "matrix":
            m = np.asarray(self.matrix, dtype=float)
            _validate_matrix(m)
            m.setflags(write=False)
            object.__setattr__(self, "matrix", m)
            object.__setattr__(self, "n", m.shape[0])
        else:
            raise MetricError(f"unknown metric mode {self.mode!r}")

    @classmethod
    def euclidean(cls, points) -> "MetricSpace":
        return cls("euclidean", coords=points)

    @classmethod
    def from_matrix(cls, matrix) -> "MetricSpace":
        return cls("matrix", matrix=matrix)

    @property
    def dim(self) -> int | None:
        return None if self.coords is None else self.coords.shape[1]

    def check_index(self, i) -> int:
        i = int(i)
        if not 0 <= i < self.n:
            raise MetricError(f"index {i} out of range [0, {self.n})")
        return i

    def index_set(self, A: Iterable[int]) -> IndexSet:
        """Normalise ``A`` to a sorted duplicate-free tuple, checking bounds."""
        out = sorted({int(a) for a in A})
        if out and (out[0] < 0 or out[-1] >= self.n):
            bad = out[0] if out[0] < 0 else out[-1]
            raise MetricError(f"index {bad} out of range [0, {self.n})")
        return tuple(out)

    def dist(self, i, j) -> float:
        i, j = self.check_index(i), self.check_index(j)
        if self.mode == "matrix":
            return float(self.matrix[i, j])
        return float(np.linalg.norm(self.coords[i] - self.coords[j]))

    def pairwise(self, I: Sequence[int], J: Sequence[int] | None = None) -> np.ndarray:
        """Distance block ``d(I[a], J[b])``; ``J`` defaults to ``I``."""
        I = np.asarray(I, dtype=np.intp)
        J = I if J is None else np.asarray(J, dtype=np.intp)
        if self.mode == "matrix":
            return self.matrix[np.ix_(I, J)]
        x, y = self.coords[I], self.coords[J]
        if x.shape[0] == 0 or y.shape[0] == 0:
            return np.zeros((x.shape[0], y.shape[0]))
        from scipy.spatial.distance import cdist

        return cdist(x, y)

    def row(self, i: int, J: Sequence[int]) -> np.ndarray:
        return self.pairwise([i], J)[0]

    def extended(self, new_points) -> "MetricSpace":
        """Euclidean space with ``new_points`` appended after the existing points."""
        if self.mode != "euclidean":
            raise MetricError("only euclidean spaces can be extended by coordinates")
        pts = np.asarray(new_points, dtype=float).reshape(-1, self.dim)
        return MetricSpace.euclidean(np.vstack([self.coords, pts]))

    def to_json(self) -> dict:
        if self.mode == "euclidean":
            return {"dim": int(self.dim), "points": self.coords.tolist()}
        return {"matrix": self.matrix.tolist()}

    @classmethod
    def from_json(cls, obj: dict) -> "MetricSpace":
        if "matrix" in obj:
            return cls.from_matrix(obj["matrix"])
        if "points" not in obj:
            raise MetricError('point-set JSON needs "points" or "matrix"')
        pts = obj["points"]
        dim = obj.get("dim")
        if dim is not None:
            dim = int(dim)
            if dim < 1:
                raise MetricError("dim must be positive")
            for p in pts:
                if len(p) != dim:
                    raise MetricError(f"point {p!r} does not have dim {dim}")
        return cls.euclidean(np.asarray(pts, dtype=float).reshape(len(pts), -1))


def _validate_matrix(m: np.ndarray) -> None:
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise MetricError("distance matrix must be square and non-empty")
    if not np.all(np.isfinite(m)) or np.any(m < 0):
        raise MetricError("distance matrix entries must be finite and non-negative")
    if not np.array_equal(m, m.T):
        raise MetricError("distance matrix is not symmetric")
    if np.any(np.diag(m) != 0):
        raise MetricError("distance matrix diagonal must be zero")
    # d(i,k) <= d(i,j) + d(j,k) for every j, one slice at a time
    for j in range(m.shape[0]):
        if np.any(m > m[:, j][:, None] + m[j, :][None, :] + TRIANGLE_TOL):
            raise MetricError("distance matrix violates the triangle inequality")


def dist(space: MetricSpace, i, j) -> float:
    return space.dist(i, j)


def diam(space: MetricSpace, A) -> float:
    A = space.index_set(A)
    if len(A) < 2:
        return 0.0
    if space.mode == "euclidean" and len(A) > 2000:
        from scipy.spatial import ConvexHull

        pts = space.coords[list(A)]
        if space.dim == 2:
            try:
                hull = np.asarray(A)[ConvexHull(pts).vertices]
                return float(space.pairwise(hull).max())
            except Exception:  # degenerate (collinear) hulls
                pass
        # blockwise max to bound memory
        best = 0.0
        arr = np.asarray(A)
        for k in range(0, len(arr), 1000):
            best = max(best, float(space.pairwise(arr[k:k + 1000], arr).max()))
        return best
    return float(space.pairwise(A).max())


def dist_to_set(space: MetricSpace, i, B) -> float:
    i = space.check_index(i)
    B = space.index_set(B)
    if not B:
        return float("inf")
    return float(space.row(i, B).min())


def nearest_in(space: MetricSpace, I: Sequence[int], B: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
    """For each ``i`` in ``I`` the nearest member of ``B`` (lowest index on ties) and its distance."""
    I = np.asarray(I, dtype=np.intp)
    B = np.asarray(sorted(B), dtype=np.intp)
    if space.mode == "euclidean" and len(I) * len(B) > 4_000_000:
        from scipy.spatial import cKDTree

        k = min(2, len(B))
        d, idx = cKDTree(space.coords[B]).query(space.coords[I], k=k)
        if k == 1:
            return B[idx], d
        near, best = B[idx[:, 0]], d[:, 0]
        tie = np.flatnonzero(d[:, 1] <= d[:, 0])
        if len(tie):  # resolve ties exactly, whatever their multiplicity
            near[tie], best[tie] = _nearest_brute(space, I[tie], B)
        return near, best
    return _nearest_brute(space, I, B)


def _nearest_brute(space: MetricSpace, I: np.ndarray, B: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    near = np.empty(len(I), dtype=np.intp)
    best = np.empty(len(I))
    step = max(1, 2_000_000 // max(1, len(B)))
    for s in range(0, len(I), step):
        block = space.pairwise(I[s:s + step], B)
        k = np.argmin(block, axis=1)
        near[s:s + step] = B[k]
        best[s:s + step] = block[np.arange(len(k)), k]
    return near, best


def excess(space: MetricSpace, A, B) -> float:
    A, B = space.index_set(A), space.index_set(B)
    if not A:
        return 0.0
    if not B:
        return float("inf")
    _, d = nearest_in(space, A, B)
    return float(d.max())


def hausdorff(space: MetricSpace, A, B) -> float:
    return max(excess(space, A, B), excess(space, B, A))


def seeded_order(A: IndexSet, seed: int | None) -> list[int]:
    """Greedy visiting order: ascending for ``seed=None``, else a seed-keyed permutation."""
    if seed is None:
        return list(A)
    rng = np.random.default_rng(seed)
    return [A[k] for k in rng.permutation(len(A))]


def farthest_point_order(space: MetricSpace, A, seed: int | None = 0, limit: float = 0.0) -> list[int]:
    """Farthest-point ordering of ``A``.

    The first point is the one farthest from a seed-chosen probe (lowest index
    on ties), so the ordering opens on an extreme point.  Generation stops once
    the next point would lie closer than ``limit`` to the points already taken.
    """
    return farthest_point_gaps(space, A, seed, limit)[0]


def farthest_point_gaps(space: MetricSpace, A, seed: int | None = 0,
                        limit: float = 0.0) -> tuple[list[int], np.ndarray]:
    """Farthest-point ordering together with each point's distance to its predecessors.

    The gaps are non-increasing (the first is inf), so the prefix of points
    with gap >= eps is a maximal eps-separated subset of ``A``.
    """
    A = np.asarray(space.index_set(A), dtype=np.intp)
    if len(A) == 0:
        return [], np.empty(0)
    row = _row_function(space, A)
    probe = 0 if seed is None else int(np.random.default_rng(seed).integers(len(A)))
    first = int(np.argmax(row(probe)))
    order, gaps = [int(A[first])], [np.inf]
    mind = row(first)
    while len(order) < len(A):
        k = int(np.argmax(mind))
        if mind[k] <= 0 or mind[k] < limit:
            break
        order.append(int(A[k]))
        gaps.append(float(mind[k]))
        np.minimum(mind, row(k), out=mind)
    return order, np.asarray(gaps)


def _row_function(space: MetricSpace, A: np.ndarray):
    """``k -> d(A[k], A)`` without re-gathering the block of ``A`` on every call."""
    if space.mode == "matrix":
        block = space.matrix[np.ix_(A, A)]
        return lambda k: block[k].copy()
    from scipy.spatial.distance import cdist

    X = np.ascontiguousarray(space.coords[A])
    return lambda k: cdist(X[k:k + 1], X)[0]


def max_eps_separated(space: MetricSpace, A, eps: float, seed: int | None = 0,
                      start=(), order: Sequence[int] | None = None) -> IndexSet:
    """Greedy maximal ``eps``-separated subset of ``A``, which is also an ``eps``-net of ``A``.

    Points of ``start`` are accepted first (they must already be ``eps``-separated);
    the rest are visited in ``order`` if given, else in a seed-keyed permutation
    (ascending when ``seed`` is None).
    """
    if not eps > 0:
        raise MetricError("eps must be positive")
    A = space.index_set(A)
    if not A:
        return ()
    start = list(space.index_set(start))
    visit = list(order) if order is not None else seeded_order(A, seed)
    arr = np.asarray(A, dtype=np.intp)
    pos = {a: k for k, a in enumerate(A)}
    mind = np.full(len(A), np.inf)
    taken: list[int] = []

    def accept(i):
        nonlocal mind
        taken.append(i)
        mind = np.minimum(mind, space.row(i, arr))

    for s in start:
        if s in pos and mind[pos[s]] < eps:
            raise MetricError("start set is not eps-separated")
        accept(s)
    for i in visit:
        if mind[pos[i]] >= eps:
            accept(i)
    return tuple(sorted(set(taken)))


def discrete_lower_limit(space: MetricSpace, sequence: Sequence, radii: Sequence[float], probe) -> IndexSet:
    """Probe points that lie in the lower limit of ``sequence`` at the given radii.

    A finite sequence has no "eventually", so radius ``r_k`` (k = 0..K-1) is
    checked on the tail that starts at index ``floor((k+1) N / (K+1))``:
    smaller radii must be met by later, shorter tails.  A probe point ``x``
    survives if every set in each tail meets the open ball ``B(x, r_k)``.
    """
    if len(sequence) == 0:
        raise MetricError("empty sequence")
    radii = [float(r) for r in radii]
    if not radii or any(r <= 0 for r in radii) or any(b >= a for a, b in zip(radii, radii[1:])):
        raise MetricError("radii must be a strictly decreasing positive schedule")
    probe = space.index_set(probe)
    if not probe:
        raise MetricError("probe must be non-empty")
    sets = [space.index_set(s) for s in sequence]
    N, K = len(sets), len(radii)
    # distance from each probe point to each set, computed once
    gaps = np.array([[dist_to_set(space, x, S) for S in sets] for x in probe])
    keep = np.ones(len(probe), dtype=bool)
    for k, r in enumerate(radii):
        start = ((k + 1) * N) // (K + 1)
        keep &= np.all(gaps[:, start:] < r, axis=1)
    return tuple(x for x, ok in zip(probe, keep) if ok)
