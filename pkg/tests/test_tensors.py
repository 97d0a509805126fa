import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hetplate.quadrature import composite_gauss, gauss_interval, gauss_polygon, gauss_triangle
from hetplate.tensors import (RigidMotion3, Sym2, Sym3, as_orthogonal, check, eig_sym2, hat,
                              polar_orthogonal, random_rot3, rot2, rot3_axis_angle)

finite = st.floats(-10, 10, allow_nan=False)


def test_hat_and_check_roundtrip():
    G = np.array([[1.0, 2.0], [3.0, 4.0]])
    H = hat(G)
    assert H.shape == (3, 3)
    assert np.all(H[2] == 0) and np.all(H[:, 2] == 0)
    assert np.array_equal(check(H), G)


def test_sym2_rejects_nonsymmetric():
    with pytest.raises(ValueError):
        Sym2.from_matrix([[1.0, 2.0], [0.0, 1.0]])
    S = Sym2.from_matrix([[1.0, 2.0], [2.0, 5.0]])
    assert S.det() == 1.0 and S.trace() == 6.0
    assert (S - S * 1.0) == Sym2(0.0, 0.0, 0.0)


def test_sym3_check_block():
    M = np.array([[1, 2, 3], [2, 4, 5], [3, 5, 6]], dtype=float)
    S = Sym3.from_matrix(M)
    assert np.array_equal(S.matrix(), M)
    assert S.check() == Sym2(1.0, 2.0, 4.0)


def test_as_orthogonal_repairs_and_rejects():
    R = rot3_axis_angle([1, 2, 3], 0.7)
    noisy = R + 1e-9
    fixed = as_orthogonal(noisy, proper=True)
    assert np.abs(fixed.T @ fixed - np.eye(3)).max() < 1e-14
    with pytest.raises(ValueError):
        as_orthogonal(R + 1e-3)
    with pytest.raises(ValueError):
        as_orthogonal(np.diag([1.0, 1.0, -1.0]), proper=True)


def test_random_rotation_is_proper():
    rng = np.random.default_rng(0)
    for _ in range(20):
        Q = random_rot3(rng)
        assert abs(np.linalg.det(Q) - 1) < 1e-12
        assert np.abs(Q.T @ Q - np.eye(3)).max() < 1e-12


def test_polar_factor_of_scaled_rotation():
    R = rot3_axis_angle([0, 1, 1], 1.1)
    assert np.allclose(polar_orthogonal(3.0 * R), R, atol=1e-14)


def test_rigid_motion_compose():
    a = RigidMotion3(rot3_axis_angle([0, 0, 1], 0.3), [1, 0, 0])
    b = RigidMotion3(rot3_axis_angle([1, 0, 0], -0.4), [0, 2, 0])
    x = np.array([[0.1, 0.2, 0.3], [1.0, -1.0, 2.0]])
    assert np.allclose(a.compose(b).apply(x), a.apply(b.apply(x)), atol=1e-14)
    assert np.allclose(RigidMotion3.identity().apply(x), x)


@settings(max_examples=200, deadline=None)
@given(finite, finite, finite)
def test_eig_sym2_reconstructs(p, q, s):
    A = np.array([[p, q], [q, s]])
    a, b, rho = eig_sym2(A)
    assert np.allclose(rho @ np.diag([a, b]) @ rho.T, A, atol=1e-12 * (1 + np.abs(A).max()))
    assert abs(np.linalg.det(rho) - 1) < 1e-12


def test_eig_sym2_diagonal_keeps_order():
    a, b, rho = eig_sym2(np.diag([0.2, 3.0]))
    assert (a, b) == (0.2, 3.0) and np.array_equal(rho, np.eye(2))


def test_rot2_composition():
    assert np.allclose(rot2(0.3) @ rot2(0.4), rot2(0.7))


def test_gauss_interval_exact_for_polynomials():
    x, w = gauss_interval(-0.5, 0.5, 8)
    for k in range(16):
        exact = 0.0 if k % 2 else 2 * 0.5 ** (k + 1) / (k + 1)
        assert abs(np.dot(w, x**k) - exact) < 1e-15


def test_composite_rule_skips_empty_intervals():
    x, w = composite_gauss([-0.5, 0.0, 0.0, 0.5], 4)
    assert len(x) == 8 and abs(w.sum() - 1) < 1e-15


def test_triangle_rule_degree():
    x, w = gauss_triangle([[0, 0], [1, 0], [0, 1]], 6)
    # int x^a y^b over the unit triangle = a! b! / (a + b + 2)!
    from math import factorial
    for a in range(5):
        for b in range(5 - a):
            exact = factorial(a) * factorial(b) / factorial(a + b + 2)
            assert abs(np.dot(w, x[:, 0] ** a * x[:, 1] ** b) - exact) < 1e-15


def test_polygon_rule_area_and_moment():
    from shapely.geometry import Polygon
    poly = Polygon([(0, 0), (2, 0), (2, 1), (1, 2), (0, 1)])
    x, w = gauss_polygon(poly, 6)
    assert abs(w.sum() - poly.area) < 1e-13
    assert abs(np.dot(w, x[:, 0]) / w.sum() - poly.centroid.x) < 1e-13
