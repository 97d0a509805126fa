"""Small fixed-size tensor algebra used throughout the package.

Plain ``numpy`` arrays are the working currency. The value types here exist
where an invariant has to be held: symmetric matrices that store only their
independent entries, and orthogonal/rotation matrices validated on
construction.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ORTHO_TOL = 1e-12
REPAIR_TOL = 1e-6


def check(F):
    """Upper-left 2x2 block of a 3x3 matrix (works on stacks ``(..., 3, 3)``)."""
    F = np.asarray(F, dtype=float)
    return F[..., :2, :2].copy()


def hat(G):
    """Embed a 2x2 matrix into the upper-left corner of a zero 3x3 matrix."""
    G = np.asarray(G, dtype=float)
    out = np.zeros(G.shape[:-2] + (3, 3))
    out[..., :2, :2] = G
    return out


def sym_part(F):
    F = np.asarray(F, dtype=float)
    return 0.5 * (F + np.swapaxes(F, -1, -2))


def frob2(F):
    """Squared Frobenius norm over the last two axes."""
    F = np.asarray(F, dtype=float)
    return np.einsum("...ij,...ij->...", F, F)


@dataclass(frozen=True)
class Sym2:
    """Symmetric 2x2 matrix [[xx, xy], [xy, yy]]."""

    xx: float
    xy: float
    yy: float

    @classmethod
    def from_matrix(cls, M, tol: float = 1e-12) -> "Sym2":
        M = np.asarray(M, dtype=float)
        if M.shape != (2, 2):
            raise ValueError(f"expected a 2x2 matrix, got shape {M.shape}")
        if abs(M[0, 1] - M[1, 0]) > tol * max(1.0, np.abs(M).max()):
            raise ValueError("matrix is not symmetric")
        return cls(float(M[0, 0]), float(0.5 * (M[0, 1] + M[1, 0])), float(M[1, 1]))

    @classmethod
    def diag(cls, a: float, b: float) -> "Sym2":
        return cls(float(a), 0.0, float(b))

    def matrix(self) -> np.ndarray:
        return np.array([[self.xx, self.xy], [self.xy, self.yy]])

    def __add__(self, other: "Sym2") -> "Sym2":
        return Sym2(self.xx + other.xx, self.xy + other.xy, self.yy + other.yy)

    def __sub__(self, other: "Sym2") -> "Sym2":
        return Sym2(self.xx - other.xx, self.xy - other.xy, self.yy - other.yy)

    def __mul__(self, c: float) -> "Sym2":
        return Sym2(c * self.xx, c * self.xy, c * self.yy)

    __rmul__ = __mul__

    def trace(self) -> float:
        return self.xx + self.yy

    def det(self) -> float:
        return self.xx * self.yy - self.xy * self.xy


@dataclass(frozen=True)
class Sym3:
    """Symmetric 3x3 matrix stored by its six independent entries."""

    xx: float
    yy: float
    zz: float
    yz: float
    xz: float
    xy: float

    @classmethod
    def from_matrix(cls, M, tol: float = 1e-12) -> "Sym3":
        M = np.asarray(M, dtype=float)
        if M.shape != (3, 3):
            raise ValueError(f"expected a 3x3 matrix, got shape {M.shape}")
        if np.abs(M - M.T).max() > tol * max(1.0, np.abs(M).max()):
            raise ValueError("matrix is not symmetric")
        S = sym_part(M)
        return cls(S[0, 0], S[1, 1], S[2, 2], S[1, 2], S[0, 2], S[0, 1])

    def matrix(self) -> np.ndarray:
        return np.array(
            [
                [self.xx, self.xy, self.xz],
                [self.xy, self.yy, self.yz],
                [self.xz, self.yz, self.zz],
            ]
        )

    def check(self) -> Sym2:
        return Sym2(self.xx, self.xy, self.yy)


def polar_orthogonal(M) -> np.ndarray:
    """Orthogonal polar factor of ``M`` (nearest orthogonal matrix in Frobenius norm)."""
    U, _, Vt = np.linalg.svd(np.asarray(M, dtype=float))
    return U @ Vt


def as_orthogonal(M, *, proper: bool = False) -> np.ndarray:
    """Validate ``M`` as orthogonal (a rotation when ``proper``).

    Matrices within ``REPAIR_TOL`` of orthogonality are projected back with
    the polar factor; anything further off is rejected.
    """
    M = np.array(M, dtype=float)
    n = M.shape[0]
    if M.shape != (n, n) or not np.all(np.isfinite(M)):
        raise ValueError("expected a finite square matrix")
    defect = np.abs(M.T @ M - np.eye(n)).max()
    if defect > REPAIR_TOL:
        raise ValueError(f"matrix is not orthogonal (defect {defect:.3e})")
    if defect > ORTHO_TOL:
        M = polar_orthogonal(M)
    if proper and np.linalg.det(M) < 0:
        raise ValueError("matrix is orthogonal but not a rotation (det = -1)")
    return M


def rot2(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def rot3_z(theta: float) -> np.ndarray:
    """Rotation by ``theta`` about the third axis (the in-plane roto-translation factor)."""
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def rot3_axis_angle(axis, angle: float) -> np.ndarray:
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    K = np.array(
        [[0.0, -axis[2], axis[1]], [axis[2], 0.0, -axis[0]], [-axis[1], axis[0], 0.0]]
    )
    return np.eye(3) + np.sin(angle) * K + (1.0 - np.cos(angle)) * K @ K


def random_rot3(rng: np.random.Generator) -> np.ndarray:
    Q, R = np.linalg.qr(rng.normal(size=(3, 3)))
    Q = Q * np.sign(np.diag(R))
    if np.linalg.det(Q) < 0:
        Q[:, 0] = -Q[:, 0]
    return Q


@dataclass(frozen=True)
class RigidMotion3:
    """x -> R x + v with R a rotation."""

    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "rotation", as_orthogonal(self.rotation, proper=True))
        v = np.asarray(self.translation, dtype=float).reshape(3)
        object.__setattr__(self, "translation", v)

    @classmethod
    def identity(cls) -> "RigidMotion3":
        return cls(np.eye(3), np.zeros(3))

    def apply(self, x):
        return np.asarray(x, dtype=float) @ self.rotation.T + self.translation

    def compose(self, other: "RigidMotion3") -> "RigidMotion3":
        """self after other."""
        return RigidMotion3(
            self.rotation @ other.rotation,
            self.rotation @ other.translation + self.translation,
        )


def eig_sym2(A):
    """Closed-form eigen-decomposition of a symmetric 2x2 matrix.

    Returns ``(a, b, rho)`` with ``A = rho @ diag(a, b) @ rho.T`` and ``rho``
    the rotation closest to the identity, i.e. angle in (-pi/4, pi/4]. For
    diagonal input ``rho`` is the identity and ``(a, b)`` are the diagonal
    entries in order; multiples of the identity also return ``rho = I``.
    """
    A = np.asarray(A, dtype=float)
    p, q, s = A[0, 0], 0.5 * (A[0, 1] + A[1, 0]), A[1, 1]
    if q == 0.0:
        return float(p), float(s), np.eye(2)
    theta = 0.5 * np.arctan2(2.0 * q, p - s)
    if theta > np.pi / 4:
        theta -= np.pi / 2
    elif theta <= -np.pi / 4:
        theta += np.pi / 2
    rho = rot2(theta)
    D = rho.T @ np.array([[p, q], [q, s]]) @ rho
    return float(D[0, 0]), float(D[1, 1]), rho
