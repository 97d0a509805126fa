import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hetplate.classifier import (Case, ModuliError, brute_force_minimizer_set, classify,
                                 pointwise_lower_bound_density, q2_beta, rank_one, set_distance,
                                 unit)
from hetplate.tensors import rot2


def test_cases_on_diagonal_targets():
    beta = 0.5
    assert classify(np.zeros((2, 2)), beta).case is Case.FLAT
    S = classify(2 * np.eye(2), beta)
    assert S.case is Case.ROUND and S.r == pytest.approx(2 * 2 / 1.5)
    S = classify(np.diag([1.0, -1.0]), beta)
    assert S.case is Case.SADDLE and S.curvatures == pytest.approx((1 / 1.5, -1 / 1.5))
    S = classify(np.diag([3.0, 1.0]), beta)
    assert S.case is Case.DOMINANT_1 and S.r == pytest.approx(3 + 1 / 3)
    S = classify(np.diag([1.0, -3.0]), beta)
    assert S.case is Case.DOMINANT_2 and S.r == pytest.approx(-3 + 1 / 3)
    assert np.allclose(S.normals[0], (0, 1))


def test_beta_bound():
    with pytest.raises(ModuliError):
        classify(np.eye(2), -0.5)


def test_tie_threshold():
    assert classify(np.diag([1.0, 1.0 + 1e-14]), 0.2).case is Case.ROUND
    assert classify(np.diag([1.0, 1.0 + 1e-9]), 0.2).case is Case.DOMINANT_2


def test_round_set_contains_every_direction():
    S = classify(np.eye(2), 0.0)
    assert S.any_direction and S.ruling_directions() == []
    for th in np.linspace(0, np.pi, 7):
        F = rank_one(S.r, unit(th))
        assert q2_beta(F - np.eye(2), 0.0) == pytest.approx(S.value())


def test_rotation_covariance():
    A = np.array([[2.0, 0.5], [0.5, -0.3]])
    rho = rot2(0.4)
    S = classify(A, 0.7)
    T = classify(rho @ A @ rho.T, 0.7)
    Sr = S.rotated(rho)
    assert T.case == Sr.case and T.r == pytest.approx(Sr.r)
    assert abs(abs(np.dot(T.normals[0], Sr.normals[0])) - 1) < 1e-12


def test_lower_bound_density_matches_value():
    A = np.diag([1.0, 0.25])
    assert pointwise_lower_bound_density(A, 0.0) == pytest.approx(2 * 0.25**2)


def test_oracle_requires_resolution():
    with pytest.raises(ValueError):
        brute_force_minimizer_set(np.eye(2), 0.1, resolution=32)


entry = st.floats(-3, 3, allow_nan=False)


@settings(max_examples=40, deadline=None)
@given(entry, entry, entry, st.floats(-0.45, 5))
def test_closed_form_agrees_with_oracle(p, q, s, beta):
    A = np.array([[p, q], [q, s]])
    S = classify(A, beta)
    O = brute_force_minimizer_set(A, beta)
    assert abs(S.value() - O.minimum) < 1e-8
    if S.case is not Case.FLAT:
        assert set_distance(S, O) < 1e-5


@settings(max_examples=100, deadline=None)
@given(entry, entry, entry, st.floats(-0.45, 5), st.floats(0, np.pi), st.floats(-5, 5))
def test_no_rank_one_beats_the_minimum(p, q, s, beta, th, c):
    A = np.array([[p, q], [q, s]])
    S = classify(A, beta)
    assert q2_beta(rank_one(c, unit(th)) - A, beta) >= S.value() - 1e-10
