"""Gerstewitz functionals for polyhedral sets.

For ``H = {z : B z >= b}``, an anchor ``a`` and a direction ``k`` with
``B_j . k > 0`` for every row, the functional

    phi(y) = inf {t : y in a - H + t k}

has the closed form ``max_j (B_j . (y - a) + b_j) / (B_j . k)``. Only this
polyhedral case is supported; the value is always finite.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cones import (
    DEFAULT_TOL,
    HalfspaceCone,
    as_point,
    check_tol,
    make_cl_diK,
    sample_cone,
)


@dataclass(frozen=True, eq=False)
class GerstewitzForm:
    B: np.ndarray
    b: np.ndarray
    a: np.ndarray
    k: np.ndarray
    denominators: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        d = self.B @ self.k
        d.setflags(write=False)
        object.__setattr__(self, "denominators", d)

    @property
    def ell(self) -> int:
        return self.B.shape[1]

    @property
    def is_conic(self) -> bool:
        return not np.any(self.a) and not np.any(self.b)

    def __call__(self, y):
        return evaluate(self, y)

    def to_dict(self) -> dict:
        return {
            "kind": "gerstewitz",
            "B": self.B.tolist(),
            "b": self.b.tolist(),
            "a": self.a.tolist(),
            "k": self.k.tolist(),
        }


def make_form(B, b=None, a=None, k=None, tol: float = DEFAULT_TOL) -> GerstewitzForm:
    """Build ``phi_{a - H, k}`` for ``H = {z : B z >= b}``.

    ``b`` and ``a`` default to zero, ``k`` to the all-ones vector. ``B`` may
    also be a :class:`HalfspaceCone`.
    """
    tol = check_tol(tol)
    if isinstance(B, HalfspaceCone):
        B = B.rows
    B = np.array(B, dtype=np.float64, ndmin=2)
    m, ell = B.shape
    b = np.zeros(m) if b is None else np.array(b, dtype=np.float64).reshape(m)
    a = np.zeros(ell) if a is None else as_point(a, ell).copy()
    k = np.ones(ell) if k is None else as_point(k, ell).copy()
    if not np.all(np.isfinite(B)) or not np.all(np.isfinite(b)):
        raise ValueError("form data must be finite")
    if np.any(B @ k <= tol):
        raise ValueError("direction not interior to recession cone: some B_j . k <= tol")
    for arr in (B, b, a, k):
        arr.setflags(write=False)
    return GerstewitzForm(B, b, a, k)


def form_from_dict(data: dict, tol: float = DEFAULT_TOL) -> GerstewitzForm:
    return make_form(data["B"], data["b"], data["a"], data["k"], tol)


def evaluate(form: GerstewitzForm, y):
    """Value of the form at ``y`` (shape ``(ell,)``) or at each row of ``y``."""
    arr = np.asarray(y, dtype=np.float64)
    vals = ((arr - form.a) @ form.B.T + form.b) / form.denominators
    return float(vals.max()) if arr.ndim == 1 else vals.max(axis=-1)


# ``eval`` in the operation list; kept as an alias that does not shadow the builtin
eval_form = evaluate


@dataclass(frozen=True, eq=False)
class SumForm:
    """Sum over i of ``phi_{anchor - cl D^{i,K}, k}``.

    With ``anchor = y0`` the value at ``y`` equals the sum evaluated at ``y - y0``.
    """

    terms: tuple
    K: float
    k: np.ndarray
    anchor: np.ndarray

    @property
    def ell(self) -> int:
        return self.k.size

    def __call__(self, y):
        return eval_sum(self, y)

    def to_dict(self) -> dict:
        return {
            "kind": "sum",
            "K": self.K,
            "k": self.k.tolist(),
            "anchor": self.anchor.tolist(),
        }


def make_sum_form(K: float, k=None, ell: int | None = None, anchor=None,
                  tol: float = DEFAULT_TOL) -> SumForm:
    if ell is None:
        if k is None:
            raise ValueError("need k or ell")
        ell = len(k)
    k = np.ones(ell) if k is None else as_point(k, ell).copy()
    if np.any(k <= 0):
        raise ValueError("k must be strictly positive")
    if not (np.isfinite(K) and K > 0):
        raise ValueError(f"K must be positive, got {K}")
    anchor = np.zeros(ell) if anchor is None else as_point(anchor, ell).copy()
    terms = tuple(make_form(make_cl_diK(i, K, ell), None, anchor, k, tol) for i in range(ell))
    k.setflags(write=False)
    anchor.setflags(write=False)
    return SumForm(terms, float(K), k, anchor)


def sum_form_from_dict(data: dict, tol: float = DEFAULT_TOL) -> SumForm:
    return make_sum_form(data["K"], data["k"], len(data["k"]), data.get("anchor"), tol)


def functional_from_dict(data: dict, tol: float = DEFAULT_TOL):
    if data["kind"] == "sum":
        return sum_form_from_dict(data, tol)
    if data["kind"] == "gerstewitz":
        return form_from_dict(data, tol)
    raise ValueError(f"unknown functional kind {data['kind']!r}")


def eval_sum(sf: SumForm, y):
    arr = np.asarray(y, dtype=np.float64)
    total = sum(evaluate(t, arr) for t in sf.terms)
    return float(total) if arr.ndim == 1 else total


def interior_by_sign(form: GerstewitzForm, y, tol: float = DEFAULT_TOL):
    """Decide ``y in int H`` from the sign of the form at ``a - y``."""
    tol = check_tol(tol)
    arr = np.asarray(y, dtype=np.float64)
    vals = evaluate(form, form.a - arr)
    return vals < -tol


# ---------------------------------------------------------- sampled checks


@dataclass(frozen=True)
class HarnessReport:
    name: str
    n: int
    seed: int
    violations: int
    worst_margin: float

    @property
    def ok(self) -> bool:
        return self.violations == 0

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "n": self.n,
            "seed": self.seed,
            "violations": self.violations,
            "worst_margin": self.worst_margin,
        }


def _value(f, y):
    return f(y)


def check_monotone(f, strictness: str, cone, n: int, seed: int, tol: float = DEFAULT_TOL,
                   scale: float = 3.0) -> HarnessReport:
    """Sampled check of ``f(y1) <= f(y2)`` (or ``<``) whenever ``y2 - y1`` is in ``cone``.

    ``cone`` is a :class:`HalfspaceCone` or :class:`UnionConeDK`; steps are drawn
    from its closure for ``plain`` and from its nonzero part (interior sample,
    unit norm) for ``strict``. The worst margin is ``min f(y2) - f(y1)``.
    """
    if strictness not in ("plain", "strict"):
        raise ValueError(f"strictness must be 'plain' or 'strict', got {strictness!r}")
    tol = check_tol(tol)
    ell = f.ell
    rng = np.random.default_rng(seed)
    y1 = scale * rng.standard_normal((n, ell))
    d = sample_cone(cone, n, rng.integers(2**63), closed=(strictness == "plain"), tol=tol)
    d *= rng.uniform(1e-3, scale, size=(n, 1))
    diff = _value(f, y1 + d) - _value(f, y1)
    if strictness == "strict":
        bad = diff <= 0.0
    else:
        bad = diff < -tol * (1.0 + np.abs(_value(f, y1)))
    return HarnessReport(f"monotone_{strictness}", n, seed, int(bad.sum()), float(diff.min()))


def check_sublinear(f, n: int, seed: int, tol: float = DEFAULT_TOL, rel: float = 1e-9,
                    scale: float = 3.0) -> HarnessReport:
    """Sampled positive homogeneity and subadditivity of a conic form or sum form."""
    if isinstance(f, GerstewitzForm) and not f.is_conic:
        raise ValueError("sublinearity needs a form with a = 0 and b = 0")
    if isinstance(f, SumForm) and np.any(f.anchor):
        raise ValueError("sublinearity needs a sum form anchored at 0")
    ell = f.ell
    rng = np.random.default_rng(seed)
    y = scale * rng.standard_normal((n, ell))
    z = scale * rng.standard_normal((n, ell))
    lam = rng.uniform(0.0, 10.0, size=n)
    fy, fz = f(y), f(z)
    hom = np.abs(f(lam[:, None] * y) - lam * fy) - rel * np.maximum(1.0, np.abs(lam * fy))
    sub = f(y + z) - (fy + fz) - rel * np.maximum(1.0, np.abs(fy) + np.abs(fz))
    worst = np.maximum(hom, sub)
    return HarnessReport("sublinear", n, seed, int((worst > 0).sum()), float(-worst.max()))
