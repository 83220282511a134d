"""Polyhedral domination cones and the open union cones D^K.

Closed cones are stored in halfspace form ``{y : B y >= 0}``. The open,
generally non-convex cone ``D^K = U_i D^{i,K}`` with

    D^{i,K} = {y : y_i > 0, y_i + K y_j > 0 for all j != i}

is never materialised as halfspaces; it is kept as the pair ``(K, ell)``.

Membership is decided with a slack threshold ``tol``: a non-strict
inequality holds when its slack is ``>= -tol``, a strict one when the slack
is ``> +tol``. Points in the band ``(-tol, +tol]`` are therefore in the
closure but not in the interior.

All membership functions accept a single point of shape ``(ell,)`` (and
return a ``bool``) or a batch of shape ``(n, ell)`` (and return a boolean
array).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_TOL = 1e-9
# multiplicative safety margin for constants that must satisfy a strict bound
DELTA = 1e-6
MAX_DRAWS = 10**6


class DimensionError(ValueError):
    """Point dimension does not match the cone or cloud."""


def check_tol(tol: float) -> float:
    tol = float(tol)
    if not np.isfinite(tol) or tol <= 0:
        raise ValueError(f"tolerance must be a positive finite number, got {tol}")
    return tol


def as_point(y, ell: int | None = None) -> np.ndarray:
    """Validate ``y`` as a finite outcome vector with at least two coordinates."""
    arr = np.asarray(y, dtype=np.float64)
    if arr.ndim != 1:
        raise DimensionError(f"a point must be one-dimensional, got shape {arr.shape}")
    if arr.shape[0] < 2:
        raise DimensionError(f"points need at least 2 coordinates, got {arr.shape[0]}")
    if ell is not None and arr.shape[0] != ell:
        raise DimensionError(f"expected a point in R^{ell}, got R^{arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("point coordinates must be finite")
    return arr


def _as_batch(y, ell: int) -> tuple[np.ndarray, bool]:
    arr = np.asarray(y, dtype=np.float64)
    single = arr.ndim == 1
    arr = np.atleast_2d(arr)
    if arr.ndim != 2 or arr.shape[1] != ell:
        raise DimensionError(f"expected points in R^{ell}, got shape {np.shape(y)}")
    return arr, single


def _finish(mask: np.ndarray, single: bool):
    return bool(mask[0]) if single else mask


@dataclass(frozen=True, eq=False)
class HalfspaceCone:
    """Closed polyhedral cone ``{y : rows @ y >= 0}``."""

    rows: np.ndarray

    def __post_init__(self):
        rows = np.array(self.rows, dtype=np.float64, ndmin=2)
        if rows.ndim != 2 or rows.shape[0] < 1 or rows.shape[1] < 2:
            raise DimensionError(f"cone rows must form an m x ell matrix, m >= 1, ell >= 2; got {rows.shape}")
        if not np.all(np.isfinite(rows)):
            raise ValueError("cone rows must be finite")
        if np.any(np.all(rows == 0.0, axis=1)):
            raise ValueError("cone rows must not be identically zero")
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)

    @property
    def ell(self) -> int:
        return self.rows.shape[1]

    def slacks(self, y) -> np.ndarray:
        arr, _ = _as_batch(y, self.ell)
        return arr @ self.rows.T

    def __eq__(self, other):
        return isinstance(other, HalfspaceCone) and np.array_equal(self.rows, other.rows)

    def __hash__(self):
        return hash(self.rows.tobytes())

    def __repr__(self):
        return f"HalfspaceCone(rows={self.rows.tolist()})"


@dataclass(frozen=True)
class UnionConeDK:
    """The open union ``D^K`` in ``R^ell``."""

    K: float
    ell: int

    def __post_init__(self):
        if not (np.isfinite(self.K) and self.K > 0):
            raise ValueError(f"K must be positive and finite, got {self.K}")
        if int(self.ell) < 2:
            raise ValueError(f"ell must be at least 2, got {self.ell}")
        object.__setattr__(self, "K", float(self.K))
        object.__setattr__(self, "ell", int(self.ell))

    @property
    def is_convex(self) -> bool:
        # D^K u {0} is convex exactly when ell == 2 and K >= 1
        return self.ell == 2 and self.K >= 1.0


def contains_closed(cone: HalfspaceCone, y, tol: float = DEFAULT_TOL):
    """True where every row slack of ``y`` is at least ``-tol``."""
    tol = check_tol(tol)
    arr, single = _as_batch(y, cone.ell)
    return _finish(np.all(arr @ cone.rows.T >= -tol, axis=1), single)


def contains_interior(cone: HalfspaceCone, y, tol: float = DEFAULT_TOL):
    """True where every row slack of ``y`` exceeds ``tol``.

    Correct for full-dimensional cones without redundant rows (everything the
    ``make_*`` constructors return). A caller-supplied cone with a redundant
    row that is tight on the whole cone would report an empty interior.
    """
    tol = check_tol(tol)
    arr, single = _as_batch(y, cone.ell)
    return _finish(np.all(arr @ cone.rows.T > tol, axis=1), single)


def _dk_mask(K: float, arr: np.ndarray, closure: bool, tol: float) -> np.ndarray:
    # pair[n, i, j] = y_i + K y_j; the diagonal is replaced by y_i itself
    ell = arr.shape[1]
    pair = arr[:, :, None] + K * arr[:, None, :]
    idx = np.arange(ell)
    pair[:, idx, idx] = arr
    if closure:
        ok = pair >= -tol
    else:
        ok = pair > tol
    return np.any(np.all(ok, axis=2), axis=1)


def dK_contains(d: UnionConeDK, y, mode: str = "open", tol: float = DEFAULT_TOL):
    """Membership in ``D^K`` (``mode="open"``) or its closure (``mode="closure"``)."""
    if mode not in ("open", "closure"):
        raise ValueError(f"mode must be 'open' or 'closure', got {mode!r}")
    tol = check_tol(tol)
    arr, single = _as_batch(y, d.ell)
    return _finish(_dk_mask(d.K, arr, mode == "closure", tol), single)


def diK_contains(i: int, K: float, y, mode: str = "open", tol: float = DEFAULT_TOL):
    """Membership in a single ``D^{i,K}`` (0-based ``i``) or its closure."""
    tol = check_tol(tol)
    arr = np.atleast_2d(np.asarray(y, dtype=np.float64))
    if not 0 <= i < arr.shape[1]:
        raise ValueError(f"index i must lie in [0, {arr.shape[1]}), got {i}")
    if mode not in ("open", "closure"):
        raise ValueError(f"mode must be 'open' or 'closure', got {mode!r}")
    pair = arr[:, i][:, None] + K * arr
    pair[:, i] = arr[:, i]
    ok = pair >= -tol if mode == "closure" else pair > tol
    mask = np.all(ok, axis=1)
    return bool(mask[0]) if np.ndim(y) == 1 else mask


# ---------------------------------------------------------------- families


def _positive_vector(v, name: str) -> np.ndarray:
    arr = as_point(v)
    if np.any(arr <= 0):
        raise ValueError(f"{name} must be strictly positive (in the interior of the orthant)")
    return arr


def _positive(x: float, name: str) -> float:
    x = float(x)
    if not (np.isfinite(x) and x > 0):
        raise ValueError(f"{name} must be positive and finite, got {x}")
    return x


def make_orthant(ell: int) -> HalfspaceCone:
    return HalfspaceCone(np.eye(int(ell)))


def make_cp(p: float, ell: int) -> HalfspaceCone:
    """``C^p``: rows ``p e_i + sum_{j != i} e_j``."""
    p = _positive(p, "p")
    if int(ell) < 2:
        raise ValueError(f"ell must be at least 2, got {ell}")
    rows = np.ones((ell, ell)) + (p - 1.0) * np.eye(ell)
    return HalfspaceCone(rows)


def make_csm(s, m: float) -> HalfspaceCone:
    """``C(s/m)``: rows ``e_i + s/m``."""
    s = _positive_vector(s, "s")
    m = _positive(m, "m")
    return HalfspaceCone(np.eye(s.size) + s[None, :] / m)


def make_cw_eps(w, eps: float) -> HalfspaceCone:
    """``C_w(eps)``: rows ``w_i e_i + eps w``."""
    w = _positive_vector(w, "w")
    eps = _positive(eps, "eps")
    return HalfspaceCone(np.diag(w) + eps * w[None, :])


def make_cw_comma_eps(w, eps: float) -> HalfspaceCone:
    """``C_{w,eps}``: rows ``w_i e_i + eps * (1, ..., 1)``."""
    w = _positive_vector(w, "w")
    eps = _positive(eps, "eps")
    return HalfspaceCone(np.diag(w) + eps)


def make_lambda(eps: float, ell: int) -> HalfspaceCone:
    """``Lambda_eps``, defined for ``0 < eps < 1/ell``; equals ``C^p`` with
    ``p = (1 - (ell - 1) eps) / eps`` up to row scaling."""
    ell = int(ell)
    eps = float(eps)
    if not eps > 0:
        raise ValueError(f"eps must be > 0, got {eps}")
    if not eps < 1.0 / ell:
        raise ValueError(f"eps must be < 1/ell = {1.0 / ell}, got {eps}")
    rows = np.full((ell, ell), eps)
    np.fill_diagonal(rows, 1.0 - (ell - 1) * eps)
    return HalfspaceCone(rows)


def make_cl_diK(i: int, K: float, ell: int) -> HalfspaceCone:
    """Closure of ``D^{i,K}`` (0-based ``i``): row ``e_i`` then rows ``e_i + K e_j``."""
    K = _positive(K, "K")
    ell = int(ell)
    if not 0 <= i < ell:
        raise ValueError(f"index i must lie in [0, {ell}), got {i}")
    rows = [np.eye(ell)[i]]
    for j in range(ell):
        if j != i:
            r = np.zeros(ell)
            r[i] = 1.0
            r[j] = K
            rows.append(r)
    return HalfspaceCone(np.array(rows))


def lambda_to_p(eps: float, ell: int) -> float:
    return (1.0 - (ell - 1) * eps) / eps


# ------------------------------------------------------ inclusion constants


def k_enclosing_cp(p: float, ell: int, delta: float = DELTA) -> float:
    """Smallest safe K with ``D^K' ⊆ C^p`` for every ``K' >= K``."""
    p = _positive(p, "p")
    return (1.0 + delta) * max((ell - 1) / p, p + ell - 2)


def p_enclosed_in_dK(K: float, ell: int) -> float:
    """``p`` such that ``C^p minus {0}`` lies in ``D^K``."""
    return ell * _positive(K, "K")


def k_for_csm(s, m: float) -> float:
    """K with ``C(s/m) minus {0}`` inside ``D^K``; requires ``m > 1``."""
    s = _positive_vector(s, "s")
    m = float(m)
    if not m > 1:
        raise ValueError(f"m must be > 1, got {m}")
    return (m - 1.0) / s.sum()


def k_for_cw(w, eps: float) -> float:
    """K with ``C_w(eps) minus {0}`` inside ``D^K``."""
    w = _positive_vector(w, "w")
    eps = _positive(eps, "eps")
    return w.min() / (2.0 * eps * w.sum())


def k_for_cw_comma(w, eps: float) -> float:
    """K with ``C_{w,eps} minus {0}`` inside ``D^K``."""
    w = _positive_vector(w, "w")
    eps = _positive(eps, "eps")
    return w.min() / (2.0 * w.size * eps)


def m_for_dK(s, K: float) -> float:
    """Inverse of :func:`k_for_csm`."""
    s = _positive_vector(s, "s")
    return 1.0 + _positive(K, "K") * s.sum()


def eps_for_dK(w, K: float) -> float:
    """Inverse of :func:`k_for_cw`."""
    w = _positive_vector(w, "w")
    return w.min() / (2.0 * _positive(K, "K") * w.sum())


def strictly_contains_orthant(cone: HalfspaceCone, tol: float = DEFAULT_TOL) -> bool:
    """Whether every nonzero orthant vector lies in the interior of ``cone``."""
    return bool(np.all(cone.rows > check_tol(tol)))


def enclose_dK_in_cone(H: HalfspaceCone, tol: float = DEFAULT_TOL, delta: float = DELTA) -> float:
    """Return K with ``D^K`` inside the interior of ``H``.

    For each coordinate i the largest ``t_i`` keeping ``e_i - t_i sum_{j != i} e_j``
    in ``H`` is computed row by row; then ``K = (1 + delta) max_i 1/t_i``.
    """
    if not strictly_contains_orthant(H, tol):
        raise ValueError("cone does not strictly contain the orthant")
    B = H.rows
    t = np.empty(H.ell)
    for i in range(H.ell):
        rest = B.sum(axis=1) - B[:, i]
        pos = rest > 0
        t[i] = np.min(B[pos, i] / rest[pos]) if np.any(pos) else 1.0
    return (1.0 + delta) * float(np.max(1.0 / t))


# ---------------------------------------------------------------- sampling


def sample_cone(region, n: int, seed, ell: int | None = None, *, closed: bool = False,
                tol: float = DEFAULT_TOL, max_draws: int = MAX_DRAWS) -> np.ndarray:
    """Draw ``n`` unit vectors lying in ``region``.

    ``region`` is a :class:`HalfspaceCone` (interior, or closure with
    ``closed=True``), a :class:`UnionConeDK` (open, or closure) or the string
    ``"sphere"`` (then ``ell`` is required). Proposals are isotropic Gaussians
    normalised to the unit sphere, accepted by the region's membership test.
    The result is deterministic in ``seed``.
    """
    n = int(n)
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    if isinstance(region, HalfspaceCone):
        dim = region.ell
        test = (lambda x: contains_closed(region, x, tol)) if closed else (
            lambda x: contains_interior(region, x, tol))
    elif isinstance(region, UnionConeDK):
        dim = region.ell
        mode = "closure" if closed else "open"
        test = lambda x: dK_contains(region, x, mode, tol)  # noqa: E731
    elif region == "sphere":
        if ell is None:
            raise ValueError("sphere sampling needs ell")
        dim = int(ell)
        test = None
    else:
        raise ValueError(f"unknown sampling region {region!r}")
    if ell is not None and int(ell) != dim:
        raise DimensionError(f"region lives in R^{dim}, not R^{ell}")

    rng = np.random.default_rng(seed)
    out = []
    have = drawn = 0
    while have < n:
        batch = min(max(2 * (n - have), 1024), max_draws - drawn)
        if batch <= 0:
            raise RuntimeError(f"rejection budget of {max_draws} draws exceeded ({have}/{n} accepted)")
        g = rng.standard_normal((batch, dim))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        drawn += batch
        if test is not None:
            g = g[test(g)]
        out.append(g)
        have += g.shape[0]
    return np.concatenate(out)[:n]
