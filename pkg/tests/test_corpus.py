import math

import numpy as np
import pytest

from propeff.corpus import (
    InstanceSpec,
    boxes_expected_gmin,
    e522_g,
    e522_phi,
    gen_boxes_e521,
    gen_curved_e523,
    gen_hyperbola,
    gen_random,
    gen_staircase_e522,
    generate,
    hyperbola_center,
)
from propeff.efficiency import geoffrion_minimal_K, gmin_set, min_set


def index_of(F, y):
    hit = np.flatnonzero(np.all(np.abs(F.points - np.asarray(y)) < 1e-12, axis=1))
    assert hit.size == 1, y
    return int(hit[0])


def test_hyperbola_small_grid():
    F = gen_hyperbola(10, 3)
    assert np.allclose(sorted(F.points[:, 0]), [-10, -1, -0.1])
    c = hyperbola_center(F)
    assert geoffrion_minimal_K(F, c) == pytest.approx(10.0)


def test_hyperbola_points_on_curve():
    F = gen_hyperbola(100, 41)
    assert np.allclose(F.points[:, 0] * F.points[:, 1], 1.0)
    assert min_set(F) == list(range(41))
    assert len(F) == 41


def test_hyperbola_center_value_is_T():
    # the extreme samples fix K* at the center: (T - 1) / (1 - 1/T) = T
    for T in (10, 100, 1000):
        F = gen_hyperbola(T, 61)
        k = geoffrion_minimal_K(F, hyperbola_center(F))
        assert k == pytest.approx((T - 1) / (1 - 1 / T), rel=1e-9)


def test_hyperbola_errors():
    with pytest.raises(ValueError):
        gen_hyperbola(1, 5)
    with pytest.raises(ValueError):
        gen_hyperbola(10, 2)


def test_boxes_contents():
    F = gen_boxes_e521(0.05)
    index_of(F, (0, -1))
    for t in np.arange(-20, 1) / 20:
        index_of(F, (t, -t))
    # membership predicates
    x, y = F.points.T
    box1 = (x <= 0) & (x >= -1) & (y >= -x - 1e-12) & (y <= 1)
    box2 = (x >= 0) & (x <= 1) & (y >= -1) & (y <= 1)
    assert np.all(box1 | box2)


def test_boxes_pareto_set():
    F = gen_boxes_e521(0.05)
    got = {tuple(F.points[i]) for i in min_set(F)}
    assert got == boxes_expected_gmin(0.05)


@pytest.mark.parametrize("eps", [0.1, 0.01])
def test_boxes_segment_k_star(eps):
    F = gen_boxes_e521(0.01)
    k = geoffrion_minimal_K(F, index_of(F, (-eps, eps)))
    assert k == pytest.approx((1 + eps) / eps, rel=0.01)


def test_boxes_sup_grows_like_inverse_h():
    steps = (0.1, 0.05, 0.02, 0.01)
    sups = []
    for h in steps:
        F = gen_boxes_e521(h)
        N = round(1 / h)
        seg = [index_of(F, (i / N, -i / N)) for i in range(-N, 0)]
        sups.append(max(geoffrion_minimal_K(F, i) for i in seg))
    assert all(a < b for a, b in zip(sups, sups[1:]))
    for h, s in zip(steps, sups):
        assert s * h == pytest.approx(1 + h, rel=1e-9)


def test_boxes_errors():
    with pytest.raises(ValueError):
        gen_boxes_e521(0.2)
    with pytest.raises(ValueError):
        gen_boxes_e521(0.03)


def test_e522_functional():
    assert e522_g(0.0) == 0.0
    assert e522_g(-1.0) == pytest.approx(math.exp(-1) - 1)
    assert e522_g(2.0) == 8.0
    F = gen_staircase_e522(0.05, 3.0)
    vals = e522_phi(F.points)
    z = index_of(F, (0, 0))
    assert vals[z] == 0.0
    assert np.all(np.delete(vals, z) > 0)


def test_e522_tail_needs_growing_K():
    ks = []
    for tail in (1, 2, 4, 8):
        F = gen_staircase_e522(0.1, tail)
        ks.append(geoffrion_minimal_K(F, index_of(F, (0, 0))))
    assert all(a < b for a, b in zip(ks, ks[1:]))
    assert ks[-1] == pytest.approx(9.0)


def test_e523_fixture():
    F = gen_curved_e523(0.05)
    x, y = F.points.T
    right = x >= 0
    assert np.all(y[right] >= -0.5 * np.sqrt(x[right]) - 1e-12)
    assert np.all(y <= 1)
    index_of(F, (1, -0.5))
    assert set(min_set(F)) == {i for i, _ in gmin_set(F)}


def test_random_examples():
    assert len(gen_random(1, 3, 0)) == 1
    F = gen_random(50, 2, 4, "convex-frontier")
    assert min_set(F) == list(range(50))
    assert gen_random(30, 4, 7, "sphere-shell") == gen_random(30, 4, 7, "sphere-shell")
    with pytest.raises(ValueError):
        gen_random(5, 2, 0, "cauchy")
    with pytest.raises(ValueError):
        gen_random(5, 1, 0)


def test_instance_spec_round_trip():
    spec = InstanceSpec("random", {"n": 20, "ell": 3, "seed": 5, "distribution": "gaussian"})
    again = InstanceSpec.from_json(spec.to_json())
    assert again == spec
    assert generate(again) == generate(spec)
    assert generate(InstanceSpec("hyperbola", {"T": 10, "n": 3})) == gen_hyperbola(10, 3)
    with pytest.raises(ValueError):
        generate(InstanceSpec("spiral", {}))
