"""Efficient and properly efficient subsets of finite point clouds.

Conventions
-----------
* A cloud is a set: points closer than ``tol`` in every coordinate are merged.
* ``y0`` is excluded from ``Min(F, D)`` when some other ``y`` in ``F`` has
  ``y0 - y`` in ``D`` (lower is better).
* Geoffrion's minimal trade-off constant of ``y0`` is

      K*(y0) = max over (y, i) with y_i < y0_i - tol of
               min over j with y_j > y0_j + tol of (y0_i - y_i) / (y_j - y0_j)

  with ``inf`` when some loss has no compensating gain and ``0`` when no
  competitor improves on ``y0`` anywhere.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .cones import (
    DEFAULT_TOL,
    DELTA,
    DimensionError,
    HalfspaceCone,
    UnionConeDK,
    as_point,
    check_tol,
    contains_closed,
    contains_interior,
    dK_contains,
    make_cp,
    make_csm,
    make_cw_eps,
    p_enclosed_in_dK,
)
from .gerstewitz import GerstewitzForm, SumForm, functional_from_dict, make_sum_form

BENSON_MAX_ELL = 6
BENSON_MAX_POINTS = 64
# pairwise scans are done in row blocks of this many points
_BLOCK = 256


class NotProperlyEfficient(ValueError):
    """The requested point has no finite trade-off bound."""


class VerificationError(RuntimeError):
    """A constructed certificate failed its own check. Should never happen."""


# ------------------------------------------------------------------ cloud


@dataclass(frozen=True, eq=False)
class PointCloud:
    points: np.ndarray
    labels: tuple | None = None
    merged: int = 0

    @property
    def ell(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.points.shape[0]

    def __getitem__(self, i) -> np.ndarray:
        return self.points[i]

    def __eq__(self, other):
        return (isinstance(other, PointCloud) and np.array_equal(self.points, other.points)
                and self.labels == other.labels)

    __hash__ = None


def make_cloud(points, labels=None, tol: float = DEFAULT_TOL) -> PointCloud:
    """Validate points and merge near-duplicates (first occurrence wins).

    Two points are duplicates when they agree within ``tol`` in every
    coordinate. A :class:`UserWarning` reports how many rows were merged.
    """
    tol = check_tol(tol)
    P = np.array(points, dtype=np.float64, ndmin=2)
    if P.ndim != 2 or P.shape[0] == 0:
        raise ValueError("a point cloud needs at least one point")
    if P.shape[1] < 2:
        raise DimensionError(f"points need at least 2 coordinates, got {P.shape[1]}")
    if not np.all(np.isfinite(P)):
        raise ValueError("point coordinates must be finite")
    if labels is not None:
        labels = tuple(str(s) for s in labels)
        if len(labels) != P.shape[0]:
            raise ValueError(f"{len(labels)} labels for {P.shape[0]} points")

    keep = np.ones(P.shape[0], dtype=bool)
    if P.shape[0] > 1:
        pairs = cKDTree(P).query_pairs(r=tol, p=np.inf, output_type="ndarray")
        if len(pairs):
            pairs = pairs[np.lexsort((pairs[:, 1], pairs[:, 0]))]
            for i, j in pairs:
                if keep[i]:
                    keep[j] = False
    merged = int((~keep).sum())
    if merged:
        warnings.warn(f"merged {merged} duplicate point(s) within tolerance {tol}", stacklevel=2)
        P = P[keep]
        if labels is not None:
            labels = tuple(lab for lab, k in zip(labels, keep) if k)
    P.setflags(write=False)
    return PointCloud(P, labels, merged)


def _cloud(F, tol: float = DEFAULT_TOL) -> PointCloud:
    return F if isinstance(F, PointCloud) else make_cloud(F, tol=tol)


# ----------------------------------------------------------------- oracles


@dataclass(frozen=True)
class DominationOracle:
    """Membership test for a domination set.

    ``variant`` is one of ``orthant-closed``, ``orthant-open``, ``cone``
    (a :class:`HalfspaceCone`, closed or open) or ``dK`` (``D^K``, open or
    closure).
    """

    variant: str
    cone: HalfspaceCone | None = None
    K: float | None = None
    open: bool = False

    def contains(self, diffs: np.ndarray, tol: float) -> np.ndarray:
        ell = diffs.shape[1]
        if self.variant == "orthant-closed":
            return np.all(diffs >= -tol, axis=1)
        if self.variant == "orthant-open":
            return np.all(diffs > tol, axis=1)
        if self.variant == "cone":
            f = contains_interior if self.open else contains_closed
            return f(self.cone, diffs, tol)
        if self.variant == "dK":
            return dK_contains(UnionConeDK(self.K, ell), diffs, "open" if self.open else "closure", tol)
        raise ValueError(f"unknown oracle variant {self.variant!r}")


ORTHANT_CLOSED = DominationOracle("orthant-closed")
ORTHANT_OPEN = DominationOracle("orthant-open", open=True)


def cone_oracle(H: HalfspaceCone, open: bool = False) -> DominationOracle:
    return DominationOracle("cone", cone=H, open=open)


def dK_oracle(K: float, open: bool = True) -> DominationOracle:
    return DominationOracle("dK", K=float(K), open=open)


def _dominated_mask(P: np.ndarray, D: DominationOracle, tol: float) -> np.ndarray:
    n, ell = P.shape
    out = np.zeros(n, dtype=bool)
    for start in range(0, n, _BLOCK):
        rows = P[start:start + _BLOCK]
        diffs = (rows[:, None, :] - P[None, :, :]).reshape(-1, ell)
        hit = D.contains(diffs, tol).reshape(rows.shape[0], n)
        r = np.arange(rows.shape[0])
        hit[r, start + r] = False
        out[start:start + rows.shape[0]] = hit.any(axis=1)
    return out


def min_set(F, D: DominationOracle = ORTHANT_CLOSED, tol: float = DEFAULT_TOL) -> list[int]:
    """Indices of ``Min(F, D)``.

    Because clouds are deduplicated, ``y0 - y`` is never within ``tol`` of the
    origin for ``y != y0``, so a closed domination set needs no explicit
    removal of 0.
    """
    F = _cloud(F, tol)
    tol = check_tol(tol)
    return [int(i) for i in np.flatnonzero(~_dominated_mask(F.points, D, tol))]


def wmin_set(F, tol: float = DEFAULT_TOL) -> list[int]:
    return min_set(F, ORTHANT_OPEN, tol)


# --------------------------------------------------------------- Geoffrion


def _minimal_K(P: np.ndarray, y0: np.ndarray, tol: float) -> float:
    A = y0 - P  # losses are positive entries, gains negative entries
    loss = np.where(A > tol, A, 0.0).max(axis=1)
    gain = np.where(A < -tol, -A, 0.0).max(axis=1)
    has_loss = loss > 0
    if not np.any(has_loss):
        return 0.0
    if np.any(has_loss & (gain == 0)):
        return math.inf
    # for a fixed loss coordinate the best compensation is the largest gain
    return float(np.max(loss[has_loss] / gain[has_loss]))


def geoffrion_minimal_K(F, index: int, tol: float = DEFAULT_TOL) -> float:
    """Smallest K for which ``F[index]`` satisfies Geoffrion's bound; ``math.inf`` if none."""
    F = _cloud(F, tol)
    return _minimal_K(F.points, F.points[index], check_tol(tol))


def certificate_K(k_star: float, delta: float = DELTA) -> float:
    """The K used to build certificates: ``k_star`` inflated by ``1 + delta``.

    ``k_star == 0`` means no competitor improves on the point anywhere, so any
    K works; 1 is used.
    """
    if math.isinf(k_star):
        raise NotProperlyEfficient("not properly efficient; minimal-K is infinite")
    return k_star * (1.0 + delta) if k_star > 0 else 1.0


def gmin_set(F, tol: float = DEFAULT_TOL) -> list[tuple[int, float]]:
    F = _cloud(F, tol)
    tol = check_tol(tol)
    out = []
    for i in range(len(F)):
        k = _minimal_K(F.points, F.points[i], tol)
        if math.isfinite(k):
            out.append((i, k))
    return out


def gmin_via_dK(F, K: float, tol: float = DEFAULT_TOL) -> list[int]:
    """``Min(F, D^K)``: drop ``y0`` when some ``y0 - y`` lies in the open ``D^K``."""
    return min_set(F, dK_oracle(K, open=True), tol)


def gmin_via_cone(F, H: HalfspaceCone, tol: float = DEFAULT_TOL) -> list[int]:
    """``Min(F, H)`` for a closed polyhedral cone ``H``."""
    return min_set(F, cone_oracle(H, open=False), tol)


def _is_min_for(P: np.ndarray, index: int, D: DominationOracle, tol: float) -> bool:
    diffs = np.delete(P[index] - P, index, axis=0)
    return not bool(np.any(D.contains(diffs, tol))) if len(diffs) else True


# ------------------------------------------------------------- certificates


@dataclass(frozen=True, eq=False)
class Certificate:
    """Proof object for one point of a cloud.

    ``k_star`` is ``None`` when the trade-off bound is infinite. ``cone_param``
    names an enclosing cone family and its parameter, e.g.
    ``{"family": "cp", "p": 0.67}``. ``functional`` is the scalarizing form and
    ``verified_min`` its minimum over the cloud.
    """

    index: int
    k_star: float | None
    cone_param: dict | None = None
    functional: GerstewitzForm | SumForm | None = None
    verified_min: float | None = None
    checks: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "k_star": self.k_star,
            "cone_param": self.cone_param,
            "functional": None if self.functional is None else self.functional.to_dict(),
            "verified_min": self.verified_min,
            "checks": self.checks,
        }

    @classmethod
    def from_dict(cls, data: dict, tol: float = DEFAULT_TOL) -> Certificate:
        fn = data.get("functional")
        return cls(
            index=int(data["index"]),
            k_star=data["k_star"],
            cone_param=data.get("cone_param"),
            functional=None if fn is None else functional_from_dict(fn, tol),
            verified_min=data.get("verified_min"),
            checks=dict(data.get("checks") or {}),
        )


def henig_certificate(F, index: int, tol: float = DEFAULT_TOL) -> Certificate:
    """Certify ``F[index]`` as efficient for the polyhedral cone ``C^p``, ``p = ell K``."""
    F = _cloud(F, tol)
    tol = check_tol(tol)
    k_star = _minimal_K(F.points, F.points[index], tol)
    K = certificate_K(k_star)
    p = p_enclosed_in_dK(K, F.ell)
    if not _is_min_for(F.points, index, cone_oracle(make_cp(p, F.ell)), tol):
        raise VerificationError(f"point {index} is not in Min(F, C^p) for p={p}")
    return Certificate(index, k_star, {"family": "cp", "p": p}, checks={"min_for_cp": True})


# ------------------------------------------------------------------ Benson


def _simplex_vertex_systems(ell: int):
    """Active-set index tuples: choose ``ell`` of the ``2 ell + 1`` inequalities."""
    return np.array(list(itertools.combinations(range(2 * ell + 1), ell)), dtype=int)


def _cone_meets_negative_orthant(G: np.ndarray, tol: float) -> np.ndarray:
    """For each generator matrix ``G[c]`` (ell x (ell+1)) decide whether some
    ``lam >= 0`` with ``sum(lam) = 1`` gives ``G lam <= tol`` everywhere and
    ``<= -tol`` somewhere.

    The feasible polytope ``{lam in simplex : G lam <= tol}`` is explored by
    enumerating all its vertices: each vertex is the solution of the equality
    plus ``ell`` active inequalities drawn from the rows of ``G`` and the
    bounds ``lam >= 0``. The minimum of each coordinate of ``G lam`` over the
    polytope is attained at a vertex.
    """
    n, ell, nv = G.shape
    subsets = _simplex_vertex_systems(ell)
    # inequality rows: G rows (G lam <= tol) then -e_k (-lam_k <= 0)
    ineq = np.concatenate([G, np.broadcast_to(-np.eye(nv), (n, nv, nv))], axis=1)
    rhs = np.concatenate([np.full(ell, tol), np.zeros(nv)])
    S = subsets.shape[0]
    M = np.empty((n, S, nv, nv))
    M[:, :, 0, :] = 1.0
    M[:, :, 1:, :] = ineq[:, subsets, :]
    r = np.empty((S, nv))
    r[:, 0] = 1.0
    r[:, 1:] = rhs[subsets]
    r = np.broadcast_to(r, (n, S, nv))
    det = np.linalg.det(M)
    ok = np.abs(det) > 1e-12
    lam = np.full((n, S, nv), np.nan)
    if np.any(ok):
        lam[ok] = np.linalg.solve(M[ok], r[ok][..., None])[..., 0]
    v = np.einsum("nij,nsj->nsi", G, lam)
    eps = 1e-12
    feasible = ok & np.all(lam >= -eps, axis=2) & np.all(v <= tol + eps, axis=2)
    hits = feasible & np.any(v <= -tol, axis=2)
    return hits.any(axis=1)


def benson_check(F, index: int, tol: float = DEFAULT_TOL) -> bool:
    """Benson proper efficiency of ``F[index]`` w.r.t. the orthant.

    The closed cone generated by ``F + R^ell_+ - y0`` is the union over
    ``y`` in ``F`` of the convex cones spanned by ``y - y0`` and the unit
    vectors (closure adds the orthant itself, spanned by the unit vectors).
    The point is Benson-proper iff none of those convex cones meets the
    negative orthant outside the origin; each is decided by a small linear
    feasibility problem solved exactly by vertex enumeration.
    """
    F = _cloud(F, tol)
    tol = check_tol(tol)
    if F.ell > BENSON_MAX_ELL or len(F) > BENSON_MAX_POINTS:
        raise ValueError(
            f"benson_check supports ell <= {BENSON_MAX_ELL} and at most {BENSON_MAX_POINTS} points; "
            "use geoffrion_minimal_K for larger instances")
    y0 = F.points[index]
    g = np.delete(F.points - y0, index, axis=0)
    if g.shape[0] == 0:
        return True
    G = np.concatenate([g[:, :, None], np.broadcast_to(np.eye(F.ell), (g.shape[0], F.ell, F.ell))], axis=2)
    return not bool(_cone_meets_negative_orthant(G, tol).any())


# --------------------------------------------------------------- existence


def existence_check(F, u, member, tol: float = DEFAULT_TOL) -> bool:
    """Whether ``(F - u)`` avoids ``-member``.

    ``member`` is a :class:`UnionConeDK` (open membership, emptiness) or a
    :class:`HalfspaceCone` (closed membership; the origin itself is allowed).
    """
    F = _cloud(F, tol)
    tol = check_tol(tol)
    u = as_point(u, F.ell)
    diffs = u - F.points
    if isinstance(member, UnionConeDK):
        if member.ell != F.ell:
            raise DimensionError("cone and cloud dimensions differ")
        return not bool(np.any(dK_contains(member, diffs, "open", tol)))
    if isinstance(member, HalfspaceCone):
        nonzero = np.max(np.abs(diffs), axis=1) > tol
        return not bool(np.any(contains_closed(member, diffs, tol) & nonzero))
    raise TypeError(f"unsupported family member {type(member).__name__}")


EXISTENCE_FAMILIES = ("dK", "cp", "csm", "cw")
# number of doublings tried by existence_search
EXISTENCE_STEPS = 64


def _family_member(family: str, t: float, weights, ell: int):
    if family == "dK":
        return UnionConeDK(t, ell)
    if family == "cp":
        return make_cp(t, ell)
    if family == "csm":
        return make_csm(weights, t)
    if family == "cw":
        return make_cw_eps(weights, t)
    raise ValueError(f"unknown family {family!r}; expected one of {EXISTENCE_FAMILIES}")


def existence_search(F, u, family: str, start: float | None = None, weights=None,
                     steps: int = EXISTENCE_STEPS, tol: float = DEFAULT_TOL) -> tuple[bool, float | None]:
    """Search a cone family for a member ``C`` with ``(F - u)`` avoiding ``-C``.

    The members shrink towards the orthant as ``K``, ``p`` or ``m`` grow and as
    ``eps`` falls, so the parameter walks a geometric grid in that direction:
    ``start * 2**t`` (``start / 2**t`` for ``cw``), ``t = 0 .. steps - 1``.
    ``weights`` is the vector ``s`` (``csm``) or ``w`` (``cw``), all-ones by
    default. Returns ``(found, parameter)``.
    """
    F = _cloud(F, tol)
    tol = check_tol(tol)
    if family not in EXISTENCE_FAMILIES:
        raise ValueError(f"unknown family {family!r}; expected one of {EXISTENCE_FAMILIES}")
    if family in ("csm", "cw"):
        weights = np.ones(F.ell) if weights is None else as_point(weights, F.ell)
    default = {"dK": 1.0, "cp": 1.0, "csm": 2.0, "cw": 0.5}[family]
    start = default if start is None else float(start)
    if family == "csm" and start <= 1:
        raise ValueError("csm search needs m > 1")
    for t in range(steps):
        param = start / 2.0**t if family == "cw" else start * 2.0**t
        if existence_check(F, u, _family_member(family, param, weights, F.ell), tol):
            return True, param
    return False, None


# ------------------------------------------------------ NI and invariance


def ni_pmin(F, tol: float = DEFAULT_TOL) -> list[int]:
    """Nehse-Iwanow proper minima of a finite (hence closed) cloud.

    For closed sets these coincide with the Geoffrion set whenever the latter
    is nonempty; a finite cloud always has a nonempty Geoffrion set.
    """
    return [i for i, _ in gmin_set(F, tol)]


def ni_functionals(F, k=None, tol: float = DEFAULT_TOL) -> dict[int, SumForm]:
    """Convex (sublinear) witness functional for every NI-proper point.

    Each point ``y0`` gets the sum form anchored at ``y0``; the returned forms
    vanish at ``y0`` and are positive on the rest of the cloud.
    """
    F = _cloud(F, tol)
    tol = check_tol(tol)
    out = {}
    for i, k_star in gmin_set(F, tol):
        sf = make_sum_form(certificate_K(k_star), k, F.ell, anchor=F.points[i], tol=tol)
        vals = sf(F.points)
        others = np.delete(vals, i)
        if abs(vals[i]) > 1e-9 or np.any(others <= tol):
            raise VerificationError(f"sum functional for point {i} is not uniquely minimised there")
        out[i] = sf
    return out


@dataclass(frozen=True)
class InvarianceReport:
    n_extra: int
    seed: int
    violations: int
    details: list

    @property
    def ok(self) -> bool:
        return self.violations == 0


def plus_orthant_invariance(F, n_extra: int, seed: int, tol: float = DEFAULT_TOL) -> InvarianceReport:
    """Add ``n_extra`` points ``y + d`` (``d`` nonzero in the orthant) and
    check that the properly efficient set is unchanged."""
    F = _cloud(F, tol)
    tol = check_tol(tol)
    if n_extra < 1:
        raise ValueError("n_extra must be at least 1")
    rng = np.random.default_rng(seed)
    base = {i for i, _ in gmin_set(F, tol)}
    src = rng.integers(len(F), size=n_extra)
    d = np.abs(rng.standard_normal((n_extra, F.ell)))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    d *= rng.uniform(0.01, 1.0, size=(n_extra, 1))
    extra = F.points[src] + d
    union = make_cloud(np.vstack([F.points, extra]), tol=tol)
    after = {i for i, _ in gmin_set(union, tol)}
    n0 = len(F)
    details = []
    if union.merged:
        details.append(f"{union.merged} added point(s) coincided with existing points")
    lost = base - after
    gained = {i for i in after if i >= n0} | ({i for i in after if i < n0} - base)
    if lost:
        details.append(f"lost original indices {sorted(lost)}")
    if gained:
        details.append(f"gained indices {sorted(gained)}")
    return InvarianceReport(n_extra, seed, len(lost) + len(gained), details)
