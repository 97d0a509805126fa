import numpy as np
import pytest

from hetplate.strain import (LocationError, PiecewiseConstantProfile, PlateDomain,
                             PolynomialProfile, ScaledProfile, StrainField,
                             compatibility_report, d_min, saint_venant_residual,
                             target_curvature)
from hetplate.tensors import Sym2

I2, Z2 = np.eye(2), np.zeros((2, 2))


def halves():
    return PlateDomain((0, 1, 0, 1), [[(0.5, 0), (0.5, 1)]])


def test_equal_means_different_curvature():
    # (t + 1) I and (t^3 + 1) I: same thickness mean, first moments 1/12 and 1/80
    field = StrainField(halves(), [PolynomialProfile([I2, I2]), PolynomialProfile([I2, Z2, Z2, I2])])
    assert d_min(field, (0.2, 0.5)) == d_min(field, (0.8, 0.5)) or np.allclose(
        d_min(field, (0.2, 0.5)).matrix(), d_min(field, (0.8, 0.5)).matrix(), atol=1e-15)
    assert np.allclose(target_curvature(field, (0.2, 0.5)).matrix(), I2, atol=1e-14)
    assert np.allclose(target_curvature(field, (0.8, 0.5)).matrix(), 0.15 * I2, atol=1e-14)
    assert isinstance(d_min(field, (0.2, 0.5)), Sym2)


def test_point_on_cut_raises():
    field = StrainField(halves(), [PolynomialProfile([I2]), PolynomialProfile([Z2])])
    with pytest.raises(LocationError):
        d_min(field, (0.5, 0.3))
    with pytest.raises(LocationError):
        d_min(field, (1.5, 0.3))


def test_piecewise_profile_integrates_exactly():
    prof = PiecewiseConstantProfile([-0.5, -0.2, 0.3, 0.5], [I2, 2 * I2, -I2])
    assert np.allclose(prof.d_min(), (0.3 + 1.0 - 0.2) * I2, atol=1e-15)
    m1 = 0.5 * ((-0.2) ** 2 - 0.25) + 2 * 0.5 * (0.09 - 0.04) - 0.5 * (0.25 - 0.09)
    assert np.allclose(prof.first_moment(), m1 * I2, atol=1e-15)


def test_profile_arithmetic():
    a = ScaledProfile([0, 1], np.diag([1.0, 0.0]))
    b = ScaledProfile(lambda t: t**2, I2)
    c = 2 * a + b
    assert np.allclose(c.target_curvature(), 2 * np.diag([1.0, 0.0]), atol=1e-14)
    assert np.allclose(c.d_min(), I2 / 12, atol=1e-14)


def test_bad_profile_inputs():
    with pytest.raises(ValueError):
        PiecewiseConstantProfile([-0.5, 0.4], [I2])
    with pytest.raises(ValueError):
        PolynomialProfile([[[1, 2], [0, 1]]])
    with pytest.raises(ValueError):
        StrainField(halves(), [PolynomialProfile([I2])])


def test_recursive_subdivision_and_adjacency():
    dom = PlateDomain((0, 1, 0, 1), [[(0.3, 0), (0.3, 1)], [(0.55, 0), (0.75, 1)]])
    assert dom.n_pieces == 3
    assert sum(dom.area(k) for k in range(3)) == pytest.approx(1.0)
    assert dom.area(0) == pytest.approx(0.3)
    assert dom.area(1) == pytest.approx(0.35)
    assert set(dom.adjacency()) == {(0, 1), (1, 2)}
    assert dom.locate([[0.1, 0.5], [0.5, 0.5], [0.9, 0.5]]).tolist() == [0, 1, 2]


def test_invalid_cuts():
    with pytest.raises(ValueError):
        PlateDomain((0, 1, 0, 1), [[(0.5, 0.2), (0.5, 1)]])  # starts inside
    with pytest.raises(ValueError):
        PlateDomain((0, 1, 0, 1), [[(0.5, 0), (0.5, 1), (0.5, 0.5)]])  # not injective


def test_keep_point_selects_carried_piece():
    dom = PlateDomain((0, 1, 0, 1), [[(0.5, 0), (0.5, 1)], [(0, 0.5), (0.5, 0.5)]],
                      keep=[(0.25, 0.5), None])
    assert dom.n_pieces == 3
    assert dom.area(0) == pytest.approx(0.5)


# ------------------------------------------------------------ Saint-Venant
def sym_grad_samples(n):
    s = 1.0 / n
    x = np.arange(n + 1) * s
    X, Y = np.meshgrid(x, x, indexing="ij")
    # w = (sin(2x) cos(y), exp(x y)), symmetrized gradient sampled exactly
    w1x, w1y = 2 * np.cos(2 * X) * np.cos(Y), -np.sin(2 * X) * np.sin(Y)
    w2x, w2y = Y * np.exp(X * Y), X * np.exp(X * Y)
    D = np.empty(X.shape + (2, 2))
    D[..., 0, 0], D[..., 1, 1] = w1x, w2y
    D[..., 0, 1] = D[..., 1, 0] = 0.5 * (w1y + w2x)
    return D, s


def common_node_residual(n, coarse=16):
    # the interior nodes of the coarsest grid are shared by all the finer ones
    D, s = sym_grad_samples(n)
    k = n // coarse
    return np.abs(saint_venant_residual(D, s).values[k - 1::k, k - 1::k]).max()


def test_residual_of_sym_grad_decays_quadratically():
    res = [common_node_residual(n) for n in (16, 32, 64)]
    slope = np.polyfit(np.log([1 / 16, 1 / 32, 1 / 64]), np.log(res), 1)[0]
    assert slope >= 1.9


def test_counterexample_residual_is_two():
    n = 64
    x = np.linspace(0, 1, n + 1)
    X, Y = np.meshgrid(x, x, indexing="ij")
    D = np.zeros(X.shape + (2, 2))
    D[..., 0, 0] = Y**2
    r = saint_venant_residual(D, 1 / n)
    assert np.allclose(r.values, 2.0, atol=1e-9)


def test_compatibility_report_for_constant_pieces():
    field = StrainField(halves(), [PolynomialProfile([I2, I2]), PolynomialProfile([I2, Z2, Z2, I2])])
    rep = compatibility_report(field, 16)
    assert rep.compatible
    assert rep.witness is not None and rep.witness.fit_error < 1e-10
    # D_min = I: w(x) = x + const
    g = rep.witness.gradient([[0.3, 0.4]])[0]
    assert np.allclose(g, I2, atol=1e-8)


def test_incompatible_jump_is_flagged():
    field = StrainField(halves(), [PolynomialProfile([np.diag([0.0, 1.0])]), PolynomialProfile([Z2])])
    rep = compatibility_report(field, 16)
    assert not rep.compatible
    assert "outside validated theory" in rep.note
