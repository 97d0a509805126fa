"""Small hand-checkable values across the library."""
import numpy as np
import pytest

from hetplate.classifier import Case, brute_force_minimizer_set, classify
from hetplate.cylinders import (Cylinder, Exists, Violation, construct_patchwork, cyl_map,
                                cylinder_for_element, patch_check, pointwise_minimizer_exists,
                                second_fundamental_form)
from hetplate.energy import (CallableDeformation, DensityFamily, DistanceDensity, energy_3d,
                             limit_energy)
from hetplate.gel import ChainDensityPerturbation, bilayer_minimizers, gel_target_curvature, GelParameters
from hetplate.quadforms import IsotropicModuli, q2_closed, q2_relaxed, q3, qbar2_decomposed
from hetplate.strain import PlateDomain, PolynomialProfile, ScaledProfile, StrainField
from hetplate.tensors import rot2, sym_part

SQ = PlateDomain((0, 1, 0, 1))


def test_forms():
    assert q3(IsotropicModuli(1, 0), np.eye(3)) == 6.0
    skew = np.array([[0, 1, -2], [-1, 0, 3], [2, -3, 0.0]])
    assert q3(IsotropicModuli(1.3, 0.4), skew) == 0.0
    assert q2_closed(IsotropicModuli(1, 0), np.eye(2)) == 4.0
    assert q2_relaxed(IsotropicModuli(1, 1), np.eye(2))[0] == pytest.approx(20 / 3, rel=1e-14)
    val, d = q2_relaxed(IsotropicModuli(1, 1), np.zeros((2, 2)))
    assert val == 0.0 and np.all(d == 0)
    assert np.array_equal(sym_part(np.array([[0, 2], [0, 0.0]])), [[0, 1], [1, 0]])


def test_odd_linear_decomposition():
    m = IsotropicModuli(1.0, 0.5)
    M = np.array([[1.0, 0.3], [0.3, -0.2]])
    parts = qbar2_decomposed(m, ScaledProfile([0, 1], M), M)
    q = q2_closed(m, M)
    assert parts == pytest.approx((0.0, q / 12, 0.0, -q / 12), abs=1e-15)


def test_value_continuous_across_ties():
    # the set jumps at |a| = |b| but the minimum value does not
    for beta in (0.0, 0.7):
        for sign in (1, -1):
            vals = [classify(np.diag([1.0, sign * (1.0 + e)]), beta).value() for e in (-1e-7, 0.0, 1e-7)]
            assert max(vals) - min(vals) < 1e-6


def test_oracle_round_circle():
    O = brute_force_minimizer_set(np.eye(2), 0.0)
    assert np.allclose(O.c, 1.0, atol=1e-8)
    assert len(O.theta) > 8
    assert O.minimum == pytest.approx(2.0, abs=1e-12)


def test_spot_values_of_the_classifier():
    S = classify(np.diag([1.0, -1.0]), 1.0)
    assert S.case is Case.SADDLE and S.r == 0.5
    assert classify(np.diag([2.0, 1.0]), 1.0).r == 2.5
    assert classify(np.diag([1.0, 0.0]), 0.3).value() == 0.0


def test_cylinder_spot_values():
    assert np.allclose(cyl_map(1.0, [[np.pi / 2, 1.0]]), [[-1.0, 1.0, 1.0]])
    assert np.allclose(cyl_map(1.0, [[0.0, 0.0]]), 0.0)
    assert np.allclose(second_fundamental_form(Cylinder(2.0)), np.diag([0.5, 0.0]))
    assert np.allclose(second_fundamental_form(Cylinder(1.0, rho=np.diag([1.0, -1.0]))), -np.diag([1.0, 0.0]))
    assert np.all(second_fundamental_form(Cylinder(np.inf)) == 0)


def test_cut_along_e1_with_e1_normal():
    c1 = Cylinder(1.0)
    c2 = Cylinder(np.inf)
    assert patch_check(c1, c2, [(0, 0.5), (1, 0.5)]).kind is Violation.RULING_NOT_PARALLEL


def test_single_piece_always_has_a_minimizer():
    rng = np.random.default_rng(4)
    for _ in range(20):
        A = rng.normal(size=(2, 2))
        A = A + A.T
        v = pointwise_minimizer_exists(SQ, [classify(A, 0.4)])
        assert isinstance(v, Exists)
        surf = construct_patchwork(SQ, v.elements)
        assert surf.isometry_defect() < 1e-12


def test_unit_cylinder_on_odd_linear_field_is_free():
    f = StrainField(SQ, [ScaledProfile([0, 1], np.diag([1.0, 0.0, 0.7]))])
    E = limit_energy(construct_patchwork(SQ, [np.diag([1.0, 0.0])]), f, IsotropicModuli(1, 0))
    assert abs(E.total) < 1e-15 and abs(E.additional) < 1e-15


def test_energy_3d_nonnegative_and_zero_for_identity():
    f = StrainField(SQ, [PolynomialProfile([np.zeros((3, 3))])])
    fam = DensityFamily(DistanceDensity(), f)

    def embed(x, x3, h, bend=0.0):
        out = np.zeros((len(x), len(x3), 3))
        out[..., :2] = x[:, None, :]
        out[..., 2] = h * x3[None, :] + bend * x[:, None, 0] ** 2
        return out

    assert energy_3d(0.1, CallableDeformation(embed), fam, n=4, tn=4) < 1e-18
    bent = CallableDeformation(lambda x, x3, h: embed(x, x3, h, 0.3))
    assert energy_3d(0.1, bent, fam, n=4, tn=4) > 0


def test_gel_target_curvature_of_linear_profile():
    dom = PlateDomain((0, 1, 0, 1))
    g = ChainDensityPerturbation(dom, [[0.0, 1.0]])
    assert np.allclose(gel_target_curvature(g, 1.0, (0.5, 0.5)), np.eye(2), atol=1e-15)
    assert np.allclose(gel_target_curvature(ChainDensityPerturbation(dom, [[-1 / 12, 0.0, 1.0]]),
                                            1.0, (0.5, 0.5)), 0.0, atol=1e-15)


def test_sigma0_branches():
    p = GelParameters(1.0, 1e-3, 0.45)
    same = bilayer_minimizers(p, [0.0, -1e-4], [0.0, -3e-4], 1.0, 2.0)
    opposite = bilayer_minimizers(p, [0.0, -1e-4], [0.0, 2e-4], 1.0, 2.0)
    assert all(a > 0 for a in same.a) and same.signs[1.0][0] == 1.0
    assert same.a[0] > 0 > opposite.a[1] and opposite.signs[1.0][0] == -1.0
