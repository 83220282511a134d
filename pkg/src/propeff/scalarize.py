"""Scalarizing functionals that certify proper efficiency.

Every constructor here verifies its output before returning it; a failed
check raises :class:`~propeff.efficiency.VerificationError` instead of
handing back an unverified certificate.
"""

from __future__ import annotations

import numpy as np

from .cones import (
    DEFAULT_TOL,
    HalfspaceCone,
    as_point,
    check_tol,
    make_cp,
    p_enclosed_in_dK,
    strictly_contains_orthant,
)
from .efficiency import (
    Certificate,
    NotProperlyEfficient,
    VerificationError,
    _cloud,
    _is_min_for,
    _minimal_K,
    certificate_K,
    cone_oracle,
)
from .gerstewitz import make_form, make_sum_form

ZERO_TOL = 1e-9


def _k_star(F, index: int, tol: float) -> float:
    k_star = _minimal_K(F.points, F.points[index], tol)
    if not np.isfinite(k_star):
        raise NotProperlyEfficient(f"point {index} is not properly efficient; minimal-K is infinite")
    return k_star


def argmin_scan(F, functional, tol: float = DEFAULT_TOL) -> list[int]:
    """Indices whose value lies within ``tol`` of the minimum over ``F``."""
    F = _cloud(F, tol)
    tol = check_tol(tol)
    vals = np.asarray(functional(F.points))
    return [int(i) for i in np.flatnonzero(vals <= vals.min() + tol)]


def verify_certificate(F, cert: Certificate, tol: float = DEFAULT_TOL) -> tuple[float, list[int]]:
    """Re-evaluate a certificate's functional on ``F``: ``(minimum, argmin)``."""
    F = _cloud(F, tol)
    if cert.functional is None:
        raise ValueError("certificate carries no functional")
    vals = np.asarray(cert.functional(F.points))
    return float(vals.min()), argmin_scan(F, cert.functional, tol)


def _check_unique_zero_min(vals: np.ndarray, index: int, tol: float, what: str) -> float:
    others = np.delete(vals, index)
    if abs(vals[index]) > ZERO_TOL:
        raise VerificationError(f"{what}: value {vals[index]!r} at the certified point is not 0")
    if others.size and others.min() <= tol:
        j = int(np.argmin(np.where(np.arange(vals.size) == index, np.inf, vals)))
        raise VerificationError(f"{what}: point {j} has value {vals[j]!r} <= tol, minimiser not unique")
    return float(vals.min())


def build_proper_functional(F, index: int, k=None, tol: float = DEFAULT_TOL) -> Certificate:
    """Full certificate for ``F[index]``.

    Contents: the minimal trade-off constant, the enclosing cone ``C^p`` with
    ``p = ell K`` (checked by a dominance scan), and the sum of Gerstewitz
    functionals over the closed cones ``cl D^{i,K}`` anchored at the point,
    which must vanish there and be positive on the rest of the cloud.
    """
    F = _cloud(F, tol)
    tol = check_tol(tol)
    k_star = _k_star(F, index, tol)
    K = certificate_K(k_star)
    sf = make_sum_form(K, k, F.ell, anchor=F.points[index], tol=tol)
    vals = np.asarray(sf(F.points))
    vmin = _check_unique_zero_min(vals, index, tol, "sum functional")
    p = p_enclosed_in_dK(K, F.ell)
    if not _is_min_for(F.points, index, cone_oracle(make_cp(p, F.ell)), tol):
        raise VerificationError(f"point {index} is not in Min(F, C^p) for p={p}")
    return Certificate(
        index=index,
        k_star=k_star,
        cone_param={"family": "cp", "p": p, "K": K},
        functional=sf,
        verified_min=vmin,
        checks={"unique_argmin": True, "min_for_cp": True},
    )


def cone_scalarization_argmin(F, a, H: HalfspaceCone, k=None, tol: float = DEFAULT_TOL,
                              check: bool = True) -> list[int]:
    """Minimisers over ``F`` of ``phi_{a - H, k}``.

    The cone must hold every nonzero orthant vector in its interior and ``k``
    must be interior to it. With ``check`` on, every minimiser is confirmed
    to be properly efficient.
    """
    F = _cloud(F, tol)
    tol = check_tol(tol)
    if H.ell != F.ell:
        raise ValueError(f"cone lives in R^{H.ell}, cloud in R^{F.ell}")
    if not strictly_contains_orthant(H, tol):
        raise ValueError("hypothesis failed: the cone's interior must contain every nonzero orthant vector")
    k = np.ones(F.ell) if k is None else as_point(k, F.ell)
    if np.any(H.rows @ k <= tol):
        raise ValueError("hypothesis failed: k must lie in the interior of the cone")
    form = make_form(H, None, a, k, tol)
    idx = argmin_scan(F, form, tol)
    if check:
        stray = [i for i in idx if not np.isfinite(_minimal_K(F.points, F.points[i], tol))]
        if stray:
            raise VerificationError(f"minimisers {stray} of the cone scalarization are not properly efficient")
    return idx


def unique_minimizer_certificate(F, index: int, k=None, tol: float = DEFAULT_TOL) -> Certificate:
    """``phi_{y0 - C^p, k}`` with ``p = ell K`` has ``F[index]`` as its unique minimiser."""
    F = _cloud(F, tol)
    tol = check_tol(tol)
    k_star = _k_star(F, index, tol)
    K = certificate_K(k_star)
    p = p_enclosed_in_dK(K, F.ell)
    H = make_cp(p, F.ell)
    k = np.ones(F.ell) if k is None else as_point(k, F.ell)
    form = make_form(H, None, F.points[index], k, tol)
    vals = np.asarray(form(F.points))
    vmin = _check_unique_zero_min(vals, index, tol, "cone functional")
    if argmin_scan(F, form, tol) != [index]:
        raise VerificationError(f"argmin of the cone functional is not {{{index}}}")
    return Certificate(index, k_star, {"family": "cp", "p": p, "K": K}, form, vmin,
                       checks={"unique_argmin": True})


def linear_scalarization(F, weights, tol: float = DEFAULT_TOL, check: bool = True) -> list[int]:
    """Minimisers of ``w . y`` over ``F`` for strictly positive weights."""
    F = _cloud(F, tol)
    tol = check_tol(tol)
    w = as_point(weights, F.ell)
    if np.any(w <= 0):
        raise ValueError("weights must be strictly positive")
    idx = argmin_scan(F, lambda P: P @ w, tol)
    if check:
        if any(not np.isfinite(_minimal_K(F.points, F.points[i], tol)) for i in idx):
            raise VerificationError("a weighted-sum minimiser is not properly efficient")
    return idx
