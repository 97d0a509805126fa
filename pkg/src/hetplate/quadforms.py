"""Isotropic quadratic forms: Q3, its plate relaxation Q2, and the
thickness-averaged form Qbar2."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tensors import frob2, hat, sym_part


@dataclass(frozen=True)
class IsotropicModuli:
    """Lame pair. Q3(F) = 2 mu |F_sym|^2 + lam tr(F)^2."""

    mu: float
    lam: float

    def __post_init__(self):
        if not self.mu > 0:
            raise ValueError(f"mu must be positive, got {self.mu}")
        if not 2 * self.mu + 3 * self.lam > 0:
            raise ValueError("2 mu + 3 lambda must be positive")

    @property
    def beta(self) -> float:
        return self.lam / (2 * self.mu + self.lam)

    @classmethod
    def from_plate(cls, G: float, Lambda: float) -> "IsotropicModuli":
        """Moduli whose Q2 reads 2 G |F_sym|^2 + Lambda tr(F)^2."""
        beta = Lambda / (2.0 * G)
        if not -0.5 < beta < 1.0:
            raise ValueError(f"plate moduli give beta={beta}, outside (-1/2, 1)")
        return cls(G, 2.0 * G * beta / (1.0 - beta))


def q3(m: IsotropicModuli, F):
    F = np.asarray(F, dtype=float)
    tr = np.trace(F, axis1=-2, axis2=-1)
    return 2 * m.mu * frob2(sym_part(F)) + m.lam * tr**2


def bilinear3(m: IsotropicModuli, X, Y):
    """Polar form of q3: B(X, X) = q3(X)."""
    Xs, Ys = sym_part(X), sym_part(Y)
    return 2 * m.mu * np.einsum("...ij,...ij->...", Xs, Ys) + m.lam * np.trace(
        X, axis1=-2, axis2=-1
    ) * np.trace(Y, axis1=-2, axis2=-1)


def q2_closed(m: IsotropicModuli, G):
    G = np.asarray(G, dtype=float)
    tr = np.trace(G, axis1=-2, axis2=-1)
    return 2 * m.mu * (frob2(sym_part(G)) + m.beta * tr**2)


def _f3_columns():
    cols = np.zeros((3, 3, 3))
    for i in range(3):
        cols[i, i, 2] = 1.0  # e_i (x) f_3
    return cols


_E_F3 = _f3_columns()


def relaxation_system(m: IsotropicModuli):
    """Hessian H of d -> q3(G^ + d (x) f3); the first-order system is H d = -b(G)."""
    H = np.empty((3, 3))
    for i in range(3):
        for j in range(3):
            H[i, j] = 2 * bilinear3(m, _E_F3[i], _E_F3[j])
    return H


def q2_relaxed(m: IsotropicModuli, G):
    """Minimize q3(G^ + d (x) f3) over d by solving the linear first-order system.

    Returns ``(value, d)``. The components of d that only feed the skew part
    of the argument are pinned to zero; here the system is nonsingular so
    that happens automatically.
    """
    Gh = hat(G)
    H = relaxation_system(m)
    b = np.array([2 * bilinear3(m, Gh, _E_F3[i]) for i in range(3)])
    try:
        d = np.linalg.solve(H, -b)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - excluded by moduli checks
        raise RuntimeError("singular relaxation system") from exc
    F = Gh + np.outer(d, [0.0, 0.0, 1.0])
    return float(q3(m, F)), d


def relaxation_vector(m: IsotropicModuli, F) -> np.ndarray:
    """The linear map F (Sym2) -> argmin_c q3(F^ + (c (x) f3)_sym).

    Vectorised over leading axes. For isotropic moduli only the normal
    component is active: c3 = -lam tr F / (2 mu + lam).
    """
    F = np.asarray(F, dtype=float)
    tr = np.trace(F, axis1=-2, axis2=-1)
    out = np.zeros(F.shape[:-2] + (3,))
    out[..., 2] = -m.lam * tr / (2 * m.mu + m.lam)
    return out


# ---------------------------------------------------------------- Qbar2
def _moments(profile, n):
    """(int B, int t B, int Q-ready nodes) of the in-plane block of a profile."""
    t, w = profile.quadrature(n)
    Bc = profile.in_plane(t)
    m0 = np.einsum("k,kij->ij", w, Bc)
    m1 = np.einsum("k,k,kij->ij", w, t, Bc)
    return t, w, Bc, m0, m1


def qbar2(m: IsotropicModuli, profile, G, n: int = 16) -> float:
    """Thickness-averaged form: int Q2(D_min + t G - B(t)) dt with D_min = int B."""
    G = np.asarray(G, dtype=float)
    t, w, Bc, m0, _ = _moments(profile, n)
    args = m0[None] + t[:, None, None] * G[None] - Bc
    return float(np.dot(w, q2_closed(m, args)))


def qbar2_decomposed(m: IsotropicModuli, profile, G, n: int = 16):
    """(bending, adt1, adt2, adt3) whose sum is qbar2.

    bending = Q2(G - 12 int t B) / 12, adt1 = int Q2(B), adt2 = -Q2(int B),
    adt3 = -12 Q2(int t B).
    """
    G = np.asarray(G, dtype=float)
    t, w, Bc, m0, m1 = _moments(profile, n)
    bending = q2_closed(m, G - 12.0 * m1) / 12.0
    adt1 = np.dot(w, q2_closed(m, Bc))
    adt2 = -q2_closed(m, m0)
    adt3 = -12.0 * q2_closed(m, m1)
    return float(bending), float(adt1), float(adt2), float(adt3)


def qbar2_direct(m: IsotropicModuli, profile, G, n: int = 16):
    """Minimize int Q2(D + t G - B(t)) dt over D in Sym(2) numerically.

    Independent of the closed-form minimizer: the objective is a quadratic in
    the three entries of D, minimized with a generic solver. Returns
    ``(value, D)``.
    """
    from scipy.optimize import minimize

    G = np.asarray(G, dtype=float)
    t, w = profile.quadrature(n)
    Bc = profile.in_plane(t)
    base = t[:, None, None] * G[None] - Bc

    def obj(x):
        D = np.array([[x[0], x[1]], [x[1], x[2]]])
        return float(np.dot(w, q2_closed(m, D[None] + base)))

    res = minimize(obj, np.zeros(3), method="BFGS", options={"gtol": 1e-12})
    D = np.array([[res.x[0], res.x[1]], [res.x[1], res.x[2]]])
    return obj(res.x), D
