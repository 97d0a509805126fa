import numpy as np
import pytest

from hetplate.classifier import classify, rank_one, unit
from hetplate.cylinders import (ConstructionError, Cylinder, Exists, Obstruction, Reason,
                                Violation, construct_patchwork, cyl_eval, cyl_gradient,
                                cylinder_for_element, glue, patch_check,
                                pointwise_minimizer_exists, second_fundamental_form,
                                translate_in_plane)
from hetplate.strain import PlateDomain
from hetplate.tensors import rot3_axis_angle

SQ = (0, 1, 0, 1)
THIRDS = [[(1 / 3, 0), (1 / 3, 1)], [(2 / 3, 0), (2 / 3, 1)]]


def sets_for(targets, beta):
    return [classify(np.asarray(A, dtype=float), beta) for A in targets]


@pytest.mark.parametrize("c,theta", [(2.0, 0.3), (-0.5, 1.2), (1.0, 0.0), (-3.0, np.pi / 2)])
def test_element_realization(c, theta):
    A = rank_one(c, unit(theta))
    cyl = cylinder_for_element(A)
    assert np.allclose(second_fundamental_form(cyl), A, atol=1e-14)
    x = np.random.default_rng(1).uniform(-1, 1, (20, 2))
    g = cyl_gradient(cyl, x)
    assert np.abs(np.einsum("kia,kib->kab", g, g) - np.eye(2)).max() < 1e-14


def test_second_fundamental_form_by_differences():
    cyl = cylinder_for_element(rank_one(1.7, unit(0.4))).with_motion(rot3_axis_angle([1, 1, 0], 0.3), [1, 2, 3])
    x0, h = np.array([0.2, 0.1]), 1e-4
    g = cyl_gradient(cyl, x0)[0]
    nu = np.cross(g[:, 0], g[:, 1])
    hess = np.empty((2, 2))
    for a in range(2):
        for b in range(2):
            ea, eb = np.eye(2)[a] * h, np.eye(2)[b] * h
            d2 = (cyl_eval(cyl, x0 + ea + eb) - cyl_eval(cyl, x0 + ea - eb)
                  - cyl_eval(cyl, x0 - ea + eb) + cyl_eval(cyl, x0 - ea - eb))[0] / (4 * h * h)
            hess[a, b] = -d2 @ nu
    # A_y = grad y^T grad nu = -nu . d2 y
    assert np.allclose(hess, second_fundamental_form(cyl), atol=1e-6)


def test_scaled_cylinder_metric():
    cyl = cylinder_for_element(rank_one(0.5, unit(0.2)), scale=2.5)
    g = cyl_gradient(cyl, [[0.3, -0.4]])[0]
    assert np.allclose(g.T @ g, 2.5**2 * np.eye(2), atol=1e-13)
    assert np.allclose(second_fundamental_form(cyl), rank_one(0.5, unit(0.2)), atol=1e-14)


def test_translate_in_plane():
    cyl = cylinder_for_element(rank_one(1.3, unit(0.7)))
    u = np.array([0.25, -0.1])
    moved = translate_in_plane(cyl, u)
    x = np.array([[0.1, 0.2], [0.5, -0.3]])
    assert np.allclose(moved(x), cyl(x + u), atol=1e-14)


def test_glue_produces_valid_patch():
    c1 = cylinder_for_element(np.diag([1.0, 0.0]))
    c2 = glue(c1, cylinder_for_element(np.diag([-2.0, 0.0])), np.array([0.5, 0.0]))
    res = patch_check(c1, c2, [(0.5, 0), (0.5, 1)])
    assert res.valid and res.position_jump < 1e-12 and res.gradient_jump < 1e-12


def test_patch_violations():
    c1 = cylinder_for_element(np.diag([1.0, 0.0]))
    c2 = glue(c1, cylinder_for_element(np.diag([0.0, 2.0])), np.array([0.5, 0.0]))
    assert patch_check(c1, c2, [(0.5, 0), (0.5, 1)]).kind is Violation.RULING_NOT_PARALLEL
    c3 = cylinder_for_element(np.diag([-2.0, 0.0]))
    assert patch_check(c1, c3, [(0.5, 0), (0.5, 1)]).kind in (Violation.ROTATION_MISMATCH,
                                                             Violation.POSITION_MISMATCH)
    assert patch_check(c1, c3, [(0.5, 0), (0.6, 0.5), (0.5, 1)]).kind is Violation.CUT_NOT_STRAIGHT
    assert patch_check(c1, c1, [(0.5, 0), (0.5, 1)]).kind is Violation.TRIVIAL_SAME_CURVATURE


def three_strip_sets(beta=0.3):
    return sets_for([np.diag([1, 0.2]), np.diag([-2, 0.5]), np.diag([0.5, 0.1])], beta)


def test_three_strips_exist_and_construct():
    dom = PlateDomain(SQ, THIRDS)
    verdict = pointwise_minimizer_exists(dom, three_strip_sets())
    assert isinstance(verdict, Exists)
    surf = construct_patchwork(dom, verdict.elements)
    assert surf.isometry_defect() < 1e-10
    assert surf.max_cut_jump() < 1e-8
    for A, E in zip(surf.piece_curvatures(), verdict.elements):
        assert np.abs(A - E).max() < 1e-10
    moved = surf.with_motion(rot3_axis_angle([1, 2, 3], 1.0), [4, 5, 6])
    assert moved.max_cut_jump() < 1e-8


def test_flat_piece_decouples_slanted_cut():
    dom = PlateDomain(SQ, [[(0.3, 0), (0.3, 1)], [(0.55, 0), (0.75, 1)]])
    sets = sets_for([np.diag([1.5, 0.3]), np.zeros((2, 2)), 0.8 * np.eye(2)], 0.3)
    verdict = pointwise_minimizer_exists(dom, sets)
    assert verdict
    surf = construct_patchwork(dom, verdict.elements)
    assert surf.max_cut_jump() < 1e-8
    # the ROUND piece bends about the direction of the slanted cut
    n = surf.piece_curvatures()[2]
    d = np.array([0.2, 1.0]) / np.hypot(0.2, 1.0)
    assert abs(d @ n @ d) < 1e-10


def test_conflicting_rulings():
    dom = PlateDomain(SQ, [[(0.5, 0), (0.5, 1)]])
    verdict = pointwise_minimizer_exists(dom, sets_for([np.diag([0.3, 1.2]), np.diag([1.0, 0.2])], 0.3))
    assert isinstance(verdict, Obstruction) and verdict.reason is Reason.CONFLICTING_RULINGS
    assert verdict.location == {"interface": [0, 1]}


def test_curved_cut_between_distinct_elements():
    dom = PlateDomain(SQ, [[(0.5, 0), (0.6, 0.5), (0.5, 1)]])
    verdict = pointwise_minimizer_exists(dom, sets_for([np.diag([1.0, 0.2]), np.diag([-1.0, 0.1])], 0.3))
    assert not verdict and verdict.reason is Reason.CUT_NOT_STRAIGHT


def test_same_curvature_on_both_sides_merges():
    dom = PlateDomain(SQ, [[(0.5, 0), (0.6, 0.5), (0.5, 1)]])
    verdict = pointwise_minimizer_exists(dom, sets_for([np.diag([1.0, 0.2]), np.diag([1.0, 0.2])], 0.3))
    assert verdict and verdict.unconstrained == [(0, 1)]
    surf = construct_patchwork(dom, verdict.elements)
    assert surf.max_cut_jump() < 1e-8


def test_equal_radius_without_common_element():
    dom = PlateDomain(SQ, [[(0.5, 0), (0.5, 1)]])
    verdict = pointwise_minimizer_exists(dom, sets_for([np.diag([0.2, 1.0]), np.diag([1.0, 0.2])], 0.0))
    assert not verdict and verdict.reason is Reason.UNSUPPORTED_EQUAL_CURVATURE


def test_construct_rejects_bad_assignment():
    dom = PlateDomain(SQ, [[(0.5, 0), (0.5, 1)]])
    with pytest.raises(ConstructionError):
        construct_patchwork(dom, [np.diag([0.0, 1.0]), np.diag([2.0, 0.0])])
    with pytest.raises(ValueError):
        construct_patchwork(dom, [np.diag([1.0, 0.0])])


def test_planar_cylinder():
    c = Cylinder(np.inf)
    assert c.planar
    assert np.allclose(c([[0.2, 0.3]]), [[0.0, 0.2, 0.3]])
