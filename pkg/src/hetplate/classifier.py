"""Pointwise minimizers of Q2(F - A) over rank-one symmetric F.

The admissible set is {c n (x) n : c real, |n| = 1}, the possible second
fundamental forms of an isometric immersion of a flat domain. For isotropic
Q2 the argmin has a closed form depending only on the eigenvalues of A.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .tensors import eig_sym2

TIE_RTOL = 1e-12


class ModuliError(ValueError):
    pass


class Case(str, Enum):
    ROUND = "ROUND"
    SADDLE = "SADDLE"
    DOMINANT_1 = "DOMINANT_1"
    DOMINANT_2 = "DOMINANT_2"
    FLAT = "FLAT"


def q2_beta(G, beta: float, mu: float = 1.0):
    """2 mu (|G_sym|^2 + beta tr^2 G), vectorised over leading axes."""
    G = np.asarray(G, dtype=float)
    S = 0.5 * (G + np.swapaxes(G, -1, -2))
    tr = S[..., 0, 0] + S[..., 1, 1]
    return 2.0 * mu * (np.einsum("...ij,...ij->...", S, S) + beta * tr**2)


def unit(theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    return np.stack([np.cos(theta), np.sin(theta)], axis=-1)


def perp(n) -> np.ndarray:
    n = np.asarray(n, dtype=float)
    return np.stack([-n[..., 1], n[..., 0]], axis=-1)


def rank_one(c, n) -> np.ndarray:
    n = np.asarray(n, dtype=float)
    return np.asarray(c, dtype=float)[..., None, None] * np.einsum("...i,...j->...ij", n, n)


def parallel(u, v, tol: float = 1e-9) -> bool:
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return abs(u[0] * v[1] - u[1] * v[0]) <= tol * np.linalg.norm(u) * np.linalg.norm(v)


@dataclass(frozen=True)
class MinimizerSet:
    """Symbolic description of argmin_F Q2(F - A).

    Elements are ``c n (x) n``. ``normals`` lists the admissible curvature
    directions n with their signed curvatures ``curvatures``; it is empty
    for ROUND (every n, curvature ``r``) and FLAT (the single element 0).
    The ruling of an element is the direction orthogonal to n.
    """

    case: Case
    r: float
    normals: tuple = ()
    curvatures: tuple = ()
    abar: tuple = (0.0, 0.0, 0.0)
    beta: float = 0.0

    @property
    def any_direction(self) -> bool:
        return self.case is Case.ROUND

    def elements(self, thetas=None) -> list[np.ndarray]:
        """Materialise elements; ROUND needs sample angles (default 8 equispaced)."""
        if self.case is Case.FLAT:
            return [np.zeros((2, 2))]
        if self.case is Case.ROUND:
            if thetas is None:
                thetas = np.arange(8) * np.pi / 8
            return list(rank_one(np.full(len(thetas), self.r), unit(thetas)))
        return [rank_one(c, np.array(n)) for n, c in zip(self.normals, self.curvatures)]

    def curvature_for_normal(self, n, tol: float = 1e-9):
        """Signed curvature c if c n (x) n belongs to the set, else None."""
        n = np.asarray(n, dtype=float)
        n = n / np.linalg.norm(n)
        if self.case is Case.FLAT:
            return 0.0
        if self.case is Case.ROUND:
            return self.r
        for m, c in zip(self.normals, self.curvatures):
            if parallel(m, n, tol):
                return c
        return None

    def admits_ruling(self, direction, tol: float = 1e-9) -> bool:
        d = np.asarray(direction, dtype=float)
        return self.curvature_for_normal(perp(d), tol) is not None

    def ruling_directions(self) -> list[np.ndarray]:
        """Finite list of admissible rulings (empty means unconstrained)."""
        if self.case in (Case.FLAT, Case.ROUND):
            return []
        return [perp(np.array(n)) for n in self.normals]

    def value(self, mu: float = 1.0) -> float:
        """min Q2(F - A) over the admissible set."""
        A = np.array([[self.abar[0], self.abar[1]], [self.abar[1], self.abar[2]]])
        return float(q2_beta(self.elements()[0] - A, self.beta, mu))

    def rotated(self, rho) -> "MinimizerSet":
        """The set for rho A rho^T (rho a rotation)."""
        rho = np.asarray(rho, dtype=float)
        A = np.array([[self.abar[0], self.abar[1]], [self.abar[1], self.abar[2]]])
        B = rho @ A @ rho.T
        normals = tuple(tuple(rho @ np.array(n)) for n in self.normals)
        return MinimizerSet(self.case, self.r, normals, self.curvatures,
                            (B[0, 0], 0.5 * (B[0, 1] + B[1, 0]), B[1, 1]), self.beta)


def classify(abar, beta: float) -> MinimizerSet:
    """Closed-form minimizer set for target curvature ``abar`` (2x2 symmetric)."""
    if not beta > -0.5:
        raise ModuliError(f"beta must exceed -1/2, got {beta}")
    A = np.asarray(abar, dtype=float)
    key = (float(A[0, 0]), float(0.5 * (A[0, 1] + A[1, 0])), float(A[1, 1]))
    if not np.any(A):
        return MinimizerSet(Case.FLAT, 0.0, abar=key, beta=beta)
    a, b, rho = eig_sym2(A)
    e1, e2 = tuple(rho[:, 0]), tuple(rho[:, 1])
    scale = max(abs(a), abs(b))
    k = beta / (1.0 + beta)
    if abs(abs(a) - abs(b)) <= TIE_RTOL * scale:
        if a * b > 0:
            return MinimizerSet(Case.ROUND, a * (1 + 2 * beta) / (1 + beta), abar=key, beta=beta)
        r = a / (1 + beta)
        return MinimizerSet(Case.SADDLE, r, (e1, e2), (r, -r), key, beta)
    if abs(a) > abs(b):
        r = a + b * k
        return MinimizerSet(Case.DOMINANT_1, r, (e1,), (r,), key, beta)
    r = b + a * k
    return MinimizerSet(Case.DOMINANT_2, r, (e2,), (r,), key, beta)


def pointwise_lower_bound_density(abar, beta: float, mu: float = 1.0) -> float:
    return classify(abar, beta).value(mu)


# ---------------------------------------------------------------- oracle
_GOLD = (np.sqrt(5.0) - 1.0) / 2.0


def _golden_min(f, lo, hi, iters: int):
    """Vectorised golden-section search on the intervals [lo, hi]."""
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    x1 = hi - _GOLD * (hi - lo)
    x2 = lo + _GOLD * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(iters):
        left = f1 <= f2
        hi = np.where(left, x2, hi)
        lo = np.where(left, lo, x1)
        xn = np.where(left, hi - _GOLD * (hi - lo), lo + _GOLD * (hi - lo))
        fn = f(xn)
        x1, x2 = np.where(left, xn, x2), np.where(left, x1, xn)
        f1, f2 = np.where(left, fn, f2), np.where(left, f1, fn)
    x = 0.5 * (lo + hi)
    return x, f(x)


@dataclass
class OracleSet:
    c: np.ndarray
    theta: np.ndarray
    values: np.ndarray
    minimum: float

    def elements(self) -> np.ndarray:
        return rank_one(self.c, unit(self.theta))


def brute_force_minimizer_set(abar, beta: float, resolution: int = 64,
                              mu: float = 1.0, band: float = 1e-9) -> OracleSet:
    """Grid search over (c, theta) with golden-section refinement.

    For each grid angle the best c is found by golden section on a bracket
    that provably contains it; every local minimum in theta is then refined
    by an outer golden section. All refined points within ``band`` of the
    global minimum are returned.
    """
    if resolution < 64:
        raise ValueError("resolution must be at least 64")
    A = np.asarray(abar, dtype=float)
    L = 4.0 * np.linalg.norm(A) + 1.0

    a11, a12, a22 = A[0, 0], 0.5 * (A[0, 1] + A[1, 0]), A[1, 1]

    def inner(theta):
        theta = np.atleast_1d(theta)
        p11, p12, p22 = np.cos(theta) ** 2, np.cos(theta) * np.sin(theta), np.sin(theta) ** 2

        def f(c):
            r11, r12, r22 = c * p11 - a11, c * p12 - a12, c * p22 - a22
            return 2.0 * mu * (r11**2 + 2 * r12**2 + r22**2 + beta * (r11 + r22) ** 2)

        lo = np.full(theta.shape, -L)
        return _golden_min(f, lo, -lo, 52)

    thetas = np.arange(resolution) * np.pi / resolution
    _, vals = inner(thetas)
    left, right = np.roll(vals, 1), np.roll(vals, -1)
    idx = np.nonzero((vals <= left) & (vals <= right))[0]
    step = np.pi / resolution
    th, _ = _golden_min(lambda t: inner(t)[1], thetas[idx] - step, thetas[idx] + step, 36)
    c, v = inner(th)
    th = np.mod(th, np.pi)
    vmin = float(v.min())
    keep = v <= vmin + band
    return OracleSet(c[keep], th[keep], v[keep], vmin)


def set_distance(closed: MinimizerSet, oracle: OracleSet) -> float:
    """Max over closed-form elements of the distance to the nearest oracle element.

    ROUND sets are materialised at the oracle's own angles.
    """
    E = oracle.elements()
    thetas = oracle.theta if closed.case is Case.ROUND else None
    worst = 0.0
    for F in closed.elements(thetas):
        d = np.sqrt(((E - F) ** 2).sum(axis=(1, 2))).min()
        worst = max(worst, float(d))
    return worst
