"""Deterministic point clouds: sampled textbook sets and random instances.

Continuous sets are only ever represented by samples with explicit
resolution parameters. A finite sample always has a nonempty properly
efficient set, so statements of the form "no point is properly efficient"
show up here as trade-off constants that grow without bound as the
resolution is refined.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .efficiency import PointCloud, make_cloud

DISTRIBUTIONS = ("sphere-shell", "gaussian", "convex-frontier")


def _grid_count(h: float) -> int:
    if not 0 < h <= 0.1:
        raise ValueError(f"grid step h must satisfy 0 < h <= 0.1, got {h}")
    N = round(1.0 / h)
    if abs(N * h - 1.0) > 1e-9:
        raise ValueError(f"grid step h must divide 1 evenly, got {h}")
    return N


def gen_hyperbola(T: float, n: int) -> PointCloud:
    """Points ``(t, 1/t)`` with ``t`` log-spaced over ``[-T, -1/T]``.

    Odd ``n`` puts ``t = -1`` (the point ``(-1, -1)``) exactly in the middle.
    """
    if not T > 1:
        raise ValueError(f"T must exceed 1, got {T}")
    if n < 3:
        raise ValueError(f"n must be at least 3, got {n}")
    L = math.log10(T)
    e = np.linspace(L, -L, n)
    if n % 2:
        e[n // 2] = 0.0
    e = 0.5 * (e - e[::-1])  # exact antisymmetry so 1/t is sampled at the mirrored t
    pts = np.column_stack([-(10.0 ** e), -(10.0 ** -e)])
    return make_cloud(pts)


def hyperbola_center(F: PointCloud) -> int:
    """Index of ``(-1, -1)`` in a hyperbola sample."""
    hit = np.flatnonzero(np.all(F.points == -1.0, axis=1))
    if hit.size != 1:
        raise ValueError("cloud does not contain (-1, -1)")
    return int(hit[0])


def _box1(N: int):
    # -1 <= y1 <= 0, -y1 <= y2 <= 1
    return [(i, j) for i in range(-N, 1) for j in range(-i, N + 1)]


def gen_boxes_e521(h: float) -> PointCloud:
    """Grid of spacing ``h`` over the union of the triangle
    ``{-1 <= y1 <= 0, -y1 <= y2 <= 1}`` and the square ``[0, 1] x [-1, 1]``.

    The grid contains every segment point ``(t, -t)`` with ``t`` a multiple
    of ``h`` in ``[-1, 0]`` and the corner ``(0, -1)``.
    """
    N = _grid_count(h)
    ij = set(_box1(N))
    ij.update((i, j) for i in range(0, N + 1) for j in range(-N, N + 1))
    ij = sorted(ij)
    pts = np.array([(i / N, j / N) for i, j in ij])
    return make_cloud(pts)


def boxes_expected_gmin(h: float) -> set[tuple[float, float]]:
    """Proper minima of the ``gen_boxes_e521`` grid: segment points with
    ``y1 < 0`` plus ``(0, -1)``."""
    N = _grid_count(h)
    out = {(i / N, -i / N) for i in range(-N, 0)}
    out.add((0.0, -1.0))
    return out


def e522_g(x):
    x = np.asarray(x, dtype=np.float64)
    return np.where(x < 0, np.expm1(np.minimum(x, 0.0)), x * x + 2.0 * x)


def e522_phi(y):
    """Strictly convex, strictly monotone ``g(y1) + g(y2)``."""
    y = np.asarray(y, dtype=np.float64)
    return e522_g(y[..., 0]) + e522_g(y[..., 1])


def gen_staircase_e522(h: float, tail: float) -> PointCloud:
    """Segment ``{(t, -t) : -1 <= t <= 1}`` plus the vertical ray
    ``{(1, y2) : y2 <= -1}`` cut at depth ``tail``; spacing ``h``."""
    N = _grid_count(h)
    if tail < 0:
        raise ValueError("tail must be nonnegative")
    seg = [(i / N, -i / N) for i in range(-N, N + 1)]
    depth = int(round(tail * N))
    ray = [(1.0, -1.0 - j / N) for j in range(1, depth + 1)]
    return make_cloud(np.array(seg + ray))


def gen_curved_e523(h: float) -> PointCloud:
    """Grid over the triangle of the boxes example joined with
    ``{0 <= y1 <= 1, -sqrt(y1)/2 <= y2 <= 1}``, including the lower curve."""
    N = _grid_count(h)
    pts = [(i / N, j / N) for i, j in _box1(N)]
    for i in range(0, N + 1):
        x = i / N
        low = -0.5 * math.sqrt(x)
        pts.append((x, low))
        pts.extend((x, j / N) for j in range(-N, N + 1) if j / N > low)
    return make_cloud(np.array(sorted(set(pts))))


def gen_random(n: int, ell: int, seed, distribution: str = "gaussian") -> PointCloud:
    """Random cloud of ``n`` points in ``R^ell``.

    ``convex-frontier`` places the points on the part of the unit sphere
    inside the negative orthant, so no point dominates another.
    """
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    if ell < 2:
        raise ValueError(f"ell must be at least 2, got {ell}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n, ell))
    if distribution == "gaussian":
        pts = g
    elif distribution == "sphere-shell":
        pts = g / np.linalg.norm(g, axis=1, keepdims=True) * rng.uniform(1.0, 2.0, size=(n, 1))
    elif distribution == "convex-frontier":
        pts = -np.abs(g) / np.linalg.norm(g, axis=1, keepdims=True)
    else:
        raise ValueError(f"unknown distribution {distribution!r}; expected one of {DISTRIBUTIONS}")
    return make_cloud(pts)


@dataclass(frozen=True)
class InstanceSpec:
    kind: str
    params: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> InstanceSpec:
        data = json.loads(text)
        return cls(data["kind"], dict(data.get("params", {})))


_GENERATORS = {
    "hyperbola": gen_hyperbola,
    "boxes_e521": gen_boxes_e521,
    "staircase_e522": gen_staircase_e522,
    "staircase_e523": gen_curved_e523,
    "random": gen_random,
}

KINDS = tuple(_GENERATORS)


def generate(spec: InstanceSpec) -> PointCloud:
    try:
        gen = _GENERATORS[spec.kind]
    except KeyError:
        raise ValueError(f"unknown instance kind {spec.kind!r}; expected one of {KINDS}") from None
    return gen(**spec.params)
