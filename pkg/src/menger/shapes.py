"""Planar test figures sampled as polylines with analytic lengths."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .metric import MetricError, MetricSpace

KINDS = ("segment", "polyline", "semicircle_chain", "koch", "shrunk_koch", "square_diagonals")
KOCH_DEPTH_CAP = 8
MERGE_TOL = 1e-12


@dataclass(frozen=True)
class ShapeSpec:
    """``samples`` counts points per edge or arc, endpoints included."""

    kind: str
    n: int = 0
    samples: int = 2
    base: float = 1.0
    vertices: tuple = ()  # polyline only

    def __post_init__(self):
        if self.kind not in KINDS:
            raise MetricError(f"unknown shape kind {self.kind!r}")
        if self.n < 0:
            raise MetricError("n must be non-negative")
        if self.samples < 2:
            raise MetricError("at least two samples per edge are needed")
        if not self.base > 0:
            raise MetricError("base length must be positive")
        if self.kind in ("koch", "shrunk_koch") and self.n > KOCH_DEPTH_CAP:
            raise MetricError(f"Koch depth is capped at {KOCH_DEPTH_CAP}")
        if self.kind == "shrunk_koch" and self.n < 1:
            raise MetricError("shrunk_koch needs n >= 1")
        if self.kind == "polyline" and len(self.vertices) < 2:
            raise MetricError("a polyline needs at least two vertices")


@dataclass(frozen=True)
class SampledShape:
    spec: ShapeSpec
    space: MetricSpace
    components: tuple[tuple[int, ...], ...]
    true_length: float
    meta: dict = field(default_factory=dict)

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(range(self.space.n))


def _densify(vertices: np.ndarray, samples: int) -> np.ndarray:
    """Insert ``samples - 2`` evenly spaced points inside every edge."""
    if samples == 2:
        return vertices
    t = np.linspace(0.0, 1.0, samples)[:-1]
    a, b = vertices[:-1], vertices[1:]
    pts = (a[:, None, :] + t[None, :, None] * (b - a)[:, None, :]).reshape(-1, 2)
    return np.vstack([pts, vertices[-1:]])


def koch_vertices(n: int, base: float = 1.0, start=None) -> np.ndarray:
    """Vertices of the n-th Koch polygon on ``start``..``start + (base, 0)``, bumps on the left."""
    a = np.array([-base / 2, 0.0]) if start is None else np.asarray(start, dtype=float)
    pts = np.array([a, a + [base, 0.0]])
    c, s = 0.5, math.sqrt(3) / 2
    for _ in range(n):
        p, q = pts[:-1], pts[1:]
        d = (q - p) / 3
        p1, p3 = p + d, p + 2 * d
        apex = p1 + np.stack([c * d[:, 0] - s * d[:, 1], s * d[:, 0] + c * d[:, 1]], axis=1)
        new = np.stack([p, p1, apex, p3], axis=1).reshape(-1, 2)
        pts = np.vstack([new, pts[-1:]])
    return pts


def _semicircle_vertices(n: int, samples: int) -> np.ndarray:
    if n == 0:
        return np.c_[np.linspace(-1.0, 1.0, samples), np.zeros(samples)]
    arcs = 2 ** (n - 1)
    r = 2.0 ** (1 - n)
    theta = np.linspace(math.pi, 0.0, samples)
    chunks = []
    for k in range(arcs):
        cx = -1.0 + r * (2 * k + 1)
        arc = np.c_[cx + r * np.cos(theta), r * np.sin(theta)]
        arc[0], arc[-1] = (cx - r, 0.0), (cx + r, 0.0)
        chunks.append(arc if k == 0 else arc[1:])
    return np.vstack(chunks)


def _merge(polylines: list[np.ndarray]) -> tuple[MetricSpace, tuple[tuple[int, ...], ...]]:
    """Pool polyline points into one space, identifying coordinates that coincide."""
    index: dict[tuple[float, float], int] = {}
    coords, comps = [], []
    for line in polylines:
        ids = []
        for x, y in line:
            key = (round(float(x) / MERGE_TOL) * MERGE_TOL, round(float(y) / MERGE_TOL) * MERGE_TOL)
            if key not in index:
                index[key] = len(coords)
                coords.append((float(x), float(y)))
            ids.append(index[key])
        comps.append(tuple(ids))
    return MetricSpace.euclidean(np.array(coords)), tuple(comps)


def generate(spec: ShapeSpec) -> SampledShape:
    k, n, m = spec.kind, spec.n, spec.samples
    meta: dict = {"kind": k, "n": n, "samples": m}
    if k == "segment":
        lines = [np.c_[np.linspace(0.0, spec.base, m), np.zeros(m)]]
        true = spec.base
    elif k == "polyline":
        v = np.asarray(spec.vertices, dtype=float).reshape(-1, 2)
        lines = [_densify(v, m)]
        true = float(np.linalg.norm(np.diff(v, axis=0), axis=1).sum())
    elif k == "semicircle_chain":
        lines = [_semicircle_vertices(n, m)]
        true = 2.0 if n == 0 else math.pi
        meta.update(arcs=0 if n == 0 else 2 ** (n - 1), radius=0.0 if n == 0 else 2.0 ** (1 - n))
    elif k == "koch":
        lines = [_densify(koch_vertices(n, spec.base), m)]
        true = spec.base * (4 / 3) ** n
        meta.update(base=spec.base)
    elif k == "shrunk_koch":
        s = 0.8 ** (n - 1)
        inner = koch_vertices(n, 2.0 * s, start=(-s, 0.0))
        v = np.vstack([[-1.0, 0.0], inner, [1.0, 0.0]]) if s < 1 else inner
        lines = [_densify(v, m)]
        true = 2.0 * (1 - s) + 2.0 * s * (4 / 3) ** n
        meta.update(scale=s, end_segment=1 - s, base=2.0)
    else:  # square_diagonals
        t = np.linspace(0.0, 1.0, m)
        lines = [np.c_[t, t], np.c_[t, 1 - t]]
        true = 2 * math.sqrt(2)
    space, comps = _merge(lines)
    return SampledShape(spec, space, comps, float(true), meta)


def polyline_length(shape: SampledShape) -> float:
    c = shape.space.coords
    return float(math.fsum(float(np.linalg.norm(np.diff(c[list(p)], axis=0), axis=1).sum())
                           for p in shape.components))


def koch_vertex_persistence(n: int, m: int, vertices_n: np.ndarray | None = None, tol: float = 1e-12) -> bool:
    """Every vertex of the n-th Koch polygon is (within ``tol``) a vertex of the m-th."""
    if not 0 <= n < m <= KOCH_DEPTH_CAP:
        raise MetricError("need 0 <= n < m <= depth cap")
    from scipy.spatial import cKDTree

    vn = koch_vertices(n) if vertices_n is None else np.asarray(vertices_n, dtype=float)
    d, _ = cKDTree(koch_vertices(m)).query(vn)
    return bool(np.all(d <= tol))


def combine(shapes) -> tuple[MetricSpace, list[tuple[int, ...]]]:
    """One ambient space holding several shapes; returns each shape's index set in it."""
    shapes = list(shapes)
    dims = {s.space.dim for s in shapes}
    if len(dims) != 1:
        raise MetricError("shapes live in spaces of different dimension")
    offset, parts, sets = 0, [], []
    for s in shapes:
        parts.append(s.space.coords)
        sets.append(tuple(range(offset, offset + s.space.n)))
        offset += s.space.n
    return MetricSpace.euclidean(np.vstack(parts)), sets
