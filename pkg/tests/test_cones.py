import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from propeff.cones import (
    DimensionError,
    HalfspaceCone,
    UnionConeDK,
    contains_closed,
    contains_interior,
    diK_contains,
    dK_contains,
    enclose_dK_in_cone,
    eps_for_dK,
    k_enclosing_cp,
    k_for_csm,
    k_for_cw,
    k_for_cw_comma,
    lambda_to_p,
    m_for_dK,
    make_cl_diK,
    make_cp,
    make_csm,
    make_cw_comma_eps,
    make_cw_eps,
    make_lambda,
    make_orthant,
    p_enclosed_in_dK,
    sample_cone,
)


def dk_by_definition(y, K):
    """Literal set-builder membership, one point at a time."""
    ell = len(y)
    for i in range(ell):
        if y[i] > 0 and all(y[i] + K * y[j] > 0 for j in range(ell) if j != i):
            return True
    return False


# --------------------------------------------------------------- membership


def test_closed_membership_examples():
    C2 = make_cp(2, 2)
    assert contains_closed(C2, (1, -0.4))
    assert contains_closed(C2, (0, 0))
    assert contains_closed(make_cp(3.5, 4), np.zeros(4))
    assert not contains_closed(make_orthant(2), (-1, 0))


def test_interior_membership_examples():
    C2 = make_cp(2, 2)
    assert contains_interior(C2, (1, 1))
    assert not contains_interior(C2, (1, -0.5))  # slack exactly 0
    assert contains_interior(make_cp(1, 2), (2, -1))


def test_tau_band_is_closed_not_open():
    H = make_orthant(2)
    y = (1.0, 5e-10)
    assert contains_closed(H, y) and not contains_interior(H, y)
    assert contains_closed(H, (1.0, -5e-10))
    assert not contains_closed(H, (1.0, -2e-9))


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        contains_closed(make_cp(2, 3), (1, 1))
    with pytest.raises(DimensionError):
        dK_contains(UnionConeDK(1, 3), (1, 1))


def test_batch_membership_matches_single():
    H = make_cp(1.5, 3)
    pts = np.random.default_rng(3).standard_normal((200, 3))
    batch = contains_interior(H, pts)
    assert batch.shape == (200,)
    assert all(bool(b) == contains_interior(H, p) for b, p in zip(batch, pts))


def test_dk_examples():
    D1 = UnionConeDK(1, 2)
    assert dK_contains(D1, (1, -0.4), "open")
    assert dK_contains(D1, (0, 1), "open")
    assert not dK_contains(D1, (0, 0), "open")
    assert not dK_contains(UnionConeDK(7.0, 4), np.zeros(4), "open")
    assert dK_contains(D1, (0, 0), "closure")


def test_dk_matches_definition():
    rng = np.random.default_rng(11)
    for ell in (2, 3, 4):
        for K in (0.2, 1.0, 3.0):
            pts = rng.standard_normal((300, ell))
            got = dK_contains(UnionConeDK(K, ell), pts, "open")
            want = [dk_by_definition(p, K) for p in pts]
            assert got.tolist() == want


def test_diK_is_one_component():
    assert diK_contains(0, 1.0, (1, -0.4))
    assert not diK_contains(1, 1.0, (1, -0.4))
    assert diK_contains(1, 1.0, (0, 1))


def test_convexity_flag():
    assert UnionConeDK(1, 2).is_convex
    assert UnionConeDK(2.5, 2).is_convex
    assert not UnionConeDK(0.5, 2).is_convex
    assert not UnionConeDK(5, 3).is_convex


@pytest.mark.parametrize("ell", [3, 4, 6])
@pytest.mark.parametrize("K", [0.3, 1.0, 4.0])
def test_nonconvexity_witness(ell, K):
    y = np.full(ell, -2.0)
    y[0] = 3 * K
    z = np.array([-4.0, 7 * K] + [-6.0] * (ell - 2))
    D = UnionConeDK(K, ell)
    assert dK_contains(D, y) and dK_contains(D, z)
    assert not dK_contains(D, y + z)


def test_planar_small_K_nonconvex():
    # ell = 2, K < 1: (1, -1/K + s) and its mirror both in D^K, sum is not
    K = 0.5
    D = UnionConeDK(K, 2)
    y, z = np.array([1.0, -1.9]), np.array([-1.9, 1.0])
    assert dK_contains(D, y) and dK_contains(D, z)
    assert not dK_contains(D, y + z)


# ------------------------------------------------------------- constructors


def test_family_rows():
    assert np.array_equal(make_cp(1, 2).rows, np.ones((2, 2)))
    assert np.array_equal(make_cp(2, 2).rows, [[2, 1], [1, 2]])
    assert sorted(map(tuple, make_cl_diK(0, 1, 2).rows.tolist())) == [(1, 0), (1, 1)]
    assert np.allclose(make_csm((1, 2), 4).rows, [[1.25, 0.5], [0.25, 1.5]])
    assert np.allclose(make_cw_eps((1, 2), 0.5).rows, [[1.5, 1.0], [0.5, 3.0]])
    assert np.allclose(make_cw_comma_eps((1, 2), 0.5).rows, [[1.5, 0.5], [0.5, 2.5]])


def test_lambda_is_scaled_cp():
    L = make_lambda(0.25, 2)
    assert np.allclose(L.rows / 0.25, make_cp(3, 2).rows)
    assert lambda_to_p(0.25, 2) == 3
    L3 = make_lambda(0.1, 3)
    assert np.allclose(L3.rows / 0.1, make_cp(lambda_to_p(0.1, 3), 3).rows)


def test_parameter_errors():
    with pytest.raises(ValueError, match="1/ell"):
        make_lambda(0.5, 2)
    with pytest.raises(ValueError):
        make_cp(0, 2)
    with pytest.raises(ValueError):
        make_cp(-1, 3)
    with pytest.raises(ValueError):
        make_csm((1, 0), 2)
    with pytest.raises(ValueError):
        make_cw_eps((1, 1), 0)
    with pytest.raises(ValueError):
        make_cl_diK(2, 1.0, 2)
    with pytest.raises(ValueError):
        HalfspaceCone(np.array([[1.0, 0.0], [0.0, 0.0]]))


def test_orthant_enclosing_families_have_nonnegative_rows():
    for H in (make_cp(0.4, 3), make_cp(5, 3), make_csm((1, 2, 3), 2), make_cw_eps((1, 2, 3), 0.1),
              make_cw_comma_eps((1, 2, 3), 0.1), make_lambda(0.2, 3)):
        assert np.all(H.rows >= 0)


def test_cone_equality_and_hash():
    assert make_cp(2, 2) == make_cp(2, 2)
    assert hash(make_cp(2, 2)) == hash(make_cp(2, 2))
    assert make_cp(2, 2) != make_cp(3, 2)


# ---------------------------------------------------------------- constants


def test_constant_examples():
    assert k_enclosing_cp(2, 3) == pytest.approx(3.000003, abs=1e-12)
    assert k_enclosing_cp(1, 2) == pytest.approx(1.000001, abs=1e-12)
    assert p_enclosed_in_dK(1, 2) == 2
    assert p_enclosed_in_dK(0.5, 4) == 2
    assert k_for_csm((1, 1), 3) == 1
    assert k_for_cw((1, 1), 0.25) == 1
    with pytest.raises(ValueError):
        k_for_csm((1, 1), 1)
    with pytest.raises(ValueError):
        k_enclosing_cp(0, 2)


def test_inverse_constants():
    s, w = np.array([1.0, 2.0, 0.5]), np.array([0.3, 1.0, 2.0])
    assert k_for_csm(s, m_for_dK(s, 2.5)) == pytest.approx(2.5)
    assert k_for_cw(w, eps_for_dK(w, 2.5)) == pytest.approx(2.5)
    assert k_for_cw_comma((2, 2), 0.25) == pytest.approx(2.0)


def test_enclose_halfspace():
    assert enclose_dK_in_cone(make_cp(1, 2)) == pytest.approx(1.000001, abs=1e-12)


def test_enclose_c2_planar():
    # Row (1, 2) stops e_1 - t e_2 at t = 1/2, so K must be about 2.
    K = enclose_dK_in_cone(make_cp(2, 2))
    assert K == pytest.approx(2.000002, abs=1e-12)
    # the smaller constant (1 + delta) / 2 would not be enough
    y = np.array([1.0, -1.9])
    assert dK_contains(UnionConeDK(0.5, 2), y)
    assert not contains_interior(make_cp(2, 2), y)


def test_enclose_rejects_non_enclosing():
    with pytest.raises(ValueError, match="cone does not strictly contain the orthant"):
        enclose_dK_in_cone(make_orthant(2))


@pytest.mark.parametrize("H", [make_cp(2, 2), make_cp(0.5, 3), make_csm((1, 2, 3), 2.0),
                               make_cw_eps((1, 1, 2, 1), 0.3)])
def test_enclose_sampled(H):
    K = enclose_dK_in_cone(H)
    pts = sample_cone(UnionConeDK(K, H.ell), 5000, seed=2)
    assert contains_interior(H, pts).all()


# ----------------------------------------------------------------- sampling


def test_sample_examples():
    pts = sample_cone(make_orthant(3), 3, seed=7)
    assert pts.shape == (3, 3) and np.all(pts > 0)
    pts = sample_cone(UnionConeDK(1, 2), 100, seed=1)
    assert dK_contains(UnionConeDK(1, 2), pts).all()
    v = sample_cone("sphere", 1, seed=0, ell=4)
    assert np.linalg.norm(v) == pytest.approx(1.0)


def test_sample_deterministic():
    a = sample_cone(make_cp(2, 3), 50, seed=9)
    b = sample_cone(make_cp(2, 3), 50, seed=9)
    assert np.array_equal(a, b)


def test_sample_budget():
    thin = make_cp(1e6, 6)  # nearly the orthant in R^6
    with pytest.raises(RuntimeError, match="budget"):
        sample_cone(thin, 1000, seed=0, max_draws=2000)


def test_nesting_sampled():
    for ell in (2, 3, 4):
        pts = sample_cone(UnionConeDK(3.0, ell), 10**4, seed=ell)
        assert dK_contains(UnionConeDK(1.2, ell), pts).all()


def test_orthant_is_intersection_of_cp():
    # every point outside the orthant leaves C^p at the explicit bound
    rng = np.random.default_rng(5)
    pts = rng.standard_normal((2000, 3))
    pts = pts[np.any(pts < -1e-3, axis=1)]
    for y in pts:
        i = int(np.argmin(y))
        rest = y.sum() - y[i]
        p = (1 + 1e-6) * max(1.0, -rest / y[i])
        assert not contains_closed(make_cp(p, 3), y)


def test_closure_plus_orthant_generic():
    rng = np.random.default_rng(4)
    for ell in (2, 3, 5):
        D = UnionConeDK(0.7, ell)
        y = sample_cone(D, 5000, seed=rng.integers(1 << 30), closed=True)
        d = np.abs(rng.standard_normal((5000, ell))) + 1e-3
        assert dK_contains(D, y + d).all()


def test_closure_plus_orthant_boundary_counterexample():
    # On the boundary of the closure the sum can fall outside D^K when ell >= 3.
    K = 0.1
    D = UnionConeDK(K, 3)
    y = np.array([1.0, -10.0, -10.0])
    assert dK_contains(D, y, "closure")
    assert not dK_contains(D, y + np.array([0.0, 0.0, 1.0]))


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 5), st.floats(0.1, 6), st.floats(1e-3, 1e3), st.integers(0, 2**31))
def test_members_scale(ell, p, lam, seed):
    H = make_cp(p, ell)
    y = sample_cone(H, 20, seed)
    y = y[H.slacks(y).min(axis=1) > 1e-6]
    assert contains_interior(H, lam * y).all()
    D = UnionConeDK(p, ell)
    z = sample_cone(D, 20, seed)
    assert dK_contains(D, lam * z).all()


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 5), st.floats(0.05, 20))
def test_cp_interior_contains_nonzero_orthant(ell, p):
    H = make_cp(p, ell)
    rng = np.random.default_rng(0)
    d = np.abs(rng.standard_normal((50, ell))) + 1e-3
    assert contains_interior(H, d).all()
