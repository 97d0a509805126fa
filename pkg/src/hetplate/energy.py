"""Limit (Kirchhoff) energy, its pointwise lower bound, and the rescaled 3D
energy evaluated on recovery deformations."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .classifier import pointwise_lower_bound_density
from .quadforms import IsotropicModuli, q2_closed, qbar2_decomposed
from .quadrature import composite_gauss, gauss_polygon, pairwise_sum
from .strain import StrainField, Witness, compatibility_report

DEFAULT_LADDER = (1 / 10, 1 / 20, 1 / 40, 1 / 80, 1 / 160)
ISO_TOL = 1e-6


class NotAnIsometryError(ValueError):
    pass


class IncompatibleFieldError(ValueError):
    pass


def max_workers() -> int:
    try:
        return max(1, int(os.environ.get("HETPLATE_MAX_WORKERS", "1")))
    except ValueError:
        return 1


# ---------------------------------------------------------------- surfaces
class FDSurface:
    """Surface given only by a map x' -> y(x'); derivatives by central differences."""

    def __init__(self, func, step: float = 1e-3):
        self.func = func
        self.step = step

    def value(self, x, piece=None):
        return self.func(np.atleast_2d(x))

    def gradient(self, x, piece=None):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        s = self.step
        cols = []
        for e in np.eye(2):
            cols.append((self.func(x + s * e) - self.func(x - s * e)) / (2 * s))
        return np.stack(cols, axis=-1)

    def normal(self, x, piece=None):
        g = self.gradient(x)
        n = np.cross(g[:, :, 0], g[:, :, 1])
        return n / np.linalg.norm(n, axis=1, keepdims=True)

    def curvature(self, x, piece=None):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        s = self.step
        dn = [(self.normal(x + s * e) - self.normal(x - s * e)) / (2 * s) for e in np.eye(2)]
        return np.einsum("kia,kib->kab", self.gradient(x), np.stack(dn, axis=-1))


# ------------------------------------------------------------ limit energy
@dataclass
class EnergyReport:
    total: float
    bending: float
    additional: float
    nodes: int


def additional_terms(field: StrainField, m: IsotropicModuli, n: int = 16) -> float:
    """The deformation-independent part: 1/2 int (int Q2(B) - Q2(int B) - 12 Q2(int t B))."""
    parts = []
    for k, prof in enumerate(field.profiles):
        _, a1, a2, a3 = qbar2_decomposed(m, prof, np.zeros((2, 2)), n)
        parts.append(0.5 * field.domain.area(k) * (a1 + a2 + a3))
    return pairwise_sum(parts)


def limit_energy(surface, field: StrainField, m: IsotropicModuli, n: int = 16,
                 tn: int = 16, iso_tol: float = ISO_TOL) -> EnergyReport:
    """1/24 int Q2(A_y - Abar) + ad.t., with Gauss rules over each subdomain."""
    parts, count = [], 0
    for k, poly in enumerate(field.domain.pieces):
        pts, w = gauss_polygon(poly, n)
        g = surface.gradient(pts, piece=k)
        defect = np.abs(np.einsum("kia,kib->kab", g, g) - np.eye(2)).max()
        if defect > iso_tol:
            raise NotAnIsometryError(f"isometry defect {defect:.3e} on piece {k}")
        A = surface.curvature(pts, piece=k)
        Abar = field.profiles[k].target_curvature(tn)
        parts.append(np.dot(w, q2_closed(m, A - Abar)) / 24.0)
        count += len(w)
    bending = pairwise_sum(parts)
    adt = additional_terms(field, m, tn)
    return EnergyReport(bending + adt, bending, adt, count)


def lower_bound(field: StrainField, m: IsotropicModuli, include_adt: bool = True,
                n: int = 16) -> EnergyReport:
    """1/24 int min_F Q2(F - Abar) + ad.t. over the rank-one symmetric F."""
    parts = []
    for k, prof in enumerate(field.profiles):
        Abar = prof.target_curvature(n)
        dens = pointwise_lower_bound_density(Abar, m.beta, m.mu)
        parts.append(field.domain.area(k) * dens / 24.0)
    bending = pairwise_sum(parts)
    adt = additional_terms(field, m, n) if include_adt else 0.0
    return EnergyReport(bending + adt, bending, adt, len(parts))


# --------------------------------------------------------------- densities
class DistanceDensity:
    """W(F; U) = dist^2(F, SO(3) U). Quadratic limit: mu = 1, lam = 0."""

    name = "distance"
    moduli = IsotropicModuli(1.0, 0.0)

    def __call__(self, F, U):
        F = np.asarray(F, dtype=float)
        X = F @ U
        P, _, Qt = np.linalg.svd(X)
        s = np.sign(np.linalg.det(P @ Qt))
        P = P.copy()
        P[..., :, 2] *= s[..., None]
        R = P @ Qt
        D = F - R @ U
        return np.einsum("...ij,...ij->...", D, D)


class StVenantDensity:
    """W(F; U) = mu |E|^2 + lam/2 tr^2 E, E = (F^T F - U^2)/2; +inf if det F <= 0."""

    name = "stvenant"

    def __init__(self, moduli: IsotropicModuli):
        self.moduli = moduli

    def __call__(self, F, U):
        F = np.asarray(F, dtype=float)
        E = 0.5 * (np.swapaxes(F, -1, -2) @ F - U @ U)
        tr = np.trace(E, axis1=-2, axis2=-1)
        W = self.moduli.mu * np.einsum("...ij,...ij->...", E, E) + 0.5 * self.moduli.lam * tr**2
        return np.where(np.linalg.det(F) > 0, W, np.inf)


def make_density(name: str, moduli: IsotropicModuli | None = None):
    if name == "distance":
        return DistanceDensity()
    if name == "stvenant":
        if moduli is None:
            raise ValueError("the St. Venant density needs moduli")
        return StVenantDensity(moduli)
    raise ValueError(f"unknown density {name!r}")


@dataclass
class DensityFamily:
    """W^h(x, F) = W(F; I + h B(x))."""

    density: object
    field: StrainField

    @property
    def moduli(self) -> IsotropicModuli:
        return self.density.moduli


# ----------------------------------------------------------- deformations
def _antiderivative(profile, x3, n: int = 8) -> np.ndarray:
    """int_0^{x3} B(t) dt for each entry of x3, exact for piecewise polynomials."""
    out = np.zeros((len(x3), 3, 3))
    for i, s in enumerate(x3):
        lo, hi = (0.0, s) if s >= 0 else (s, 0.0)
        if hi == lo:
            continue
        br = profile.breaks
        br = np.unique(np.concatenate([[lo, hi], br[(br > lo) & (br < hi)]]))
        t, w = composite_gauss(br, n)
        out[i] = np.sign(s) * np.einsum("k,kij->ij", w, profile(t))
    return out


class RecoveryDeformation:
    """y + h (x3 nu + grad y g) + h^2 D on each piece.

    ``D = R int_0^{x3} d`` with R = (grad y | nu) and d chosen so that the
    order-h strain equals the relaxed form of x3 A + D_min - B.
    """

    def __init__(self, surface, field: StrainField, moduli: IsotropicModuli,
                 witness: Witness | None, fd_step: float | None = None):
        self.surface = surface
        self.field = field
        self.moduli = moduli
        self.witness = witness
        self.fd_step = fd_step or 1e-5 * field.domain.diameter
        self.kappa = moduli.lam / (2 * moduli.mu + moduli.lam)

    def _g(self, x):
        if self.witness is None:
            return np.zeros((len(x), 2)), np.zeros((len(x), 2, 2))
        return self.witness(x), self.witness.gradient(x)

    def _frame(self, x, piece):
        G = self.surface.gradient(x, piece=piece)
        nu = self.surface.normal(x, piece=piece)
        return G, nu, np.concatenate([G, nu[:, :, None]], axis=2)

    def _dint(self, x, piece, x3, Bint):
        """int_0^{x3} d dt, shape (k, q, 3)."""
        A = self.surface.curvature(x, piece=piece)
        g, _ = self._g(x)
        Ag = np.einsum("kab,kb->ka", A, g)
        Dmin = self.field.profiles[piece].d_min()
        trA = np.trace(A, axis1=1, axis2=2)
        out = np.empty((len(x), len(x3), 3))
        out[:, :, :2] = x3[None, :, None] * Ag[:, None, :] + 2.0 * Bint[None, :, :2, 2]
        trBint = Bint[:, 0, 0] + Bint[:, 1, 1]
        out[:, :, 2] = Bint[None, :, 2, 2] - self.kappa * (
            0.5 * x3[None, :] ** 2 * trA[:, None] + x3[None, :] * np.trace(Dmin) - trBint[None, :]
        )
        return out

    def _D(self, x, piece, x3, Bint):
        _, _, R = self._frame(x, piece)
        return np.einsum("kij,kqj->kqi", R, self._dint(x, piece, x3, Bint))

    def positions(self, x, piece: int, x3, h: float) -> np.ndarray:
        x3 = np.asarray(x3, dtype=float)
        Bint = _antiderivative(self.field.profiles[piece], x3)
        y = self.surface.value(x, piece=piece)
        G, nu, _ = self._frame(x, piece)
        g, _ = self._g(x)
        Gg = np.einsum("kia,ka->ki", G, g)
        first = x3[None, :, None] * nu[:, None, :] + Gg[:, None, :]
        return y[:, None, :] + h * first + h**2 * self._D(x, piece, x3, Bint)

    def rescaled_gradient(self, x, piece: int, x3, h: float) -> np.ndarray:
        """(grad' y^h | d3 y^h / h), shape (k, q, 3, 3)."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        x3 = np.asarray(x3, dtype=float)
        prof = self.field.profiles[piece]
        Bint = _antiderivative(prof, x3)
        B = prof(x3)  # (q, 3, 3)
        A = self.surface.curvature(x, piece=piece)
        g, dg = self._g(x)
        Ag = np.einsum("kab,kb->ka", A, g)
        _, _, R = self._frame(x, piece)
        Dmin = prof.d_min()

        K = np.zeros((len(x), len(x3), 3, 3))
        K[:, :, :2, :2] = x3[None, :, None, None] * A[:, None] + dg[:, None]
        K[:, :, :2, 2] = Ag[:, None, :] + 2.0 * B[None, :, :2, 2]
        K[:, :, 2, :2] = -Ag[:, None, :]
        trB = B[:, 0, 0] + B[:, 1, 1]
        K[:, :, 2, 2] = B[None, :, 2, 2] - self.kappa * (
            x3[None, :] * np.trace(A, axis1=1, axis2=2)[:, None] + np.trace(Dmin) - trB[None, :]
        )
        s = self.fd_step
        dD = np.zeros((len(x), len(x3), 3, 3))
        for a, e in enumerate(np.eye(2)):
            dD[:, :, :, a] = (self._D(x + s * e, piece, x3, Bint)
                              - self._D(x - s * e, piece, x3, Bint)) / (2 * s)
        RK = np.einsum("kij,kqjl->kqil", R, K)
        return R[:, None] + h * RK + h**2 * dD


class CallableDeformation:
    """A 3D map y(x', x3) given as a function; rescaled gradient by differences."""

    def __init__(self, func, step: float = 1e-5):
        self.func = func
        self.step = step

    def positions(self, x, piece, x3, h):
        return self.func(np.atleast_2d(x), np.asarray(x3, dtype=float), h)

    def rescaled_gradient(self, x, piece, x3, h):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        x3 = np.asarray(x3, dtype=float)
        s = self.step
        cols = []
        for e in np.eye(2):
            cols.append((self.func(x + s * e, x3, h) - self.func(x - s * e, x3, h)) / (2 * s))
        cols.append((self.func(x, x3 + s, h) - self.func(x, x3 - s, h)) / (2 * s * h))
        return np.stack(cols, axis=-1)


def energy_3d(h: float, deformation, family: DensityFamily, n: int = 16,
              tn: int = 8) -> float:
    """int_Omega W^h(x, grad_h y) dx over the unit-thickness reference plate."""
    if h <= 0:
        raise ValueError("thickness ratio must be positive")
    parts = []
    for k, poly in enumerate(family.field.domain.pieces):
        pts, w = gauss_polygon(poly, n)
        prof = family.field.profiles[k]
        t, wt = prof.quadrature(tn)
        F = deformation.rescaled_gradient(pts, k, t, h)
        U = np.eye(3)[None] + h * prof(t)
        W = family.density(F, U[None])
        if not np.all(np.isfinite(W)):
            raise ValueError("deformation leaves the domain of the density")
        parts.append(np.einsum("k,q,kq->", w, wt, W))
    return pairwise_sum(parts)


# --------------------------------------------------------------- Gamma run
@dataclass
class GammaRow:
    h: float
    scaled_energy: float
    limit_energy: float
    ratio: float
    gap: float


@dataclass
class GammaTable:
    rows: list[GammaRow]
    slope: float | None
    limit: EnergyReport
    settings: dict = field(default_factory=dict)

    def csv(self) -> str:
        lines = ["h,scaled_energy,limit_energy,ratio,gap"]
        for r in self.rows:
            lines.append(",".join("%.17g" % v for v in (r.h, r.scaled_energy, r.limit_energy,
                                                        r.ratio, r.gap)))
        return "\n".join(lines) + "\n"


def fitted_slope(hs, gaps, floor: float = 1e-14) -> float | None:
    hs, gaps = np.asarray(hs, dtype=float), np.abs(np.asarray(gaps, dtype=float))
    ok = gaps > floor
    if ok.sum() < 2:
        return None
    return float(np.polyfit(np.log(hs[ok]), np.log(gaps[ok]), 1)[0])


def gamma_experiment(surface, field: StrainField, density=None, hs=DEFAULT_LADDER,
                     n: int = 16, tn: int = 8, grid: int = 64,
                     workers: int | None = None) -> GammaTable:
    """Evaluate h^-2 E^h on the recovery sequence along a ladder of h."""
    density = density or DistanceDensity()
    family = DensityFamily(density, field)
    report = compatibility_report(field, grid)
    if not report.compatible:
        raise IncompatibleFieldError("D_min is not a symmetrized gradient; the recovery "
                                     "construction does not apply")
    witness = report.witness
    if all(np.abs(D).max() == 0.0 for D in field.piece_d_min()):
        witness = None
    rec = RecoveryDeformation(surface, field, family.moduli, witness)
    E0 = limit_energy(surface, field, family.moduli, n=n)

    def run(h):
        return energy_3d(h, rec, family, n, tn) / h**2

    hs = [float(h) for h in hs]
    with ThreadPoolExecutor(workers or max_workers()) as pool:
        scaled = list(pool.map(run, hs))
    rows = []
    for h, e in zip(hs, scaled):
        ratio = e / E0.total if E0.total != 0 else float("nan")
        rows.append(GammaRow(h, e, E0.total, ratio, e - E0.total))
    slope = fitted_slope(hs, [r.gap for r in rows])
    return GammaTable(rows, slope, E0, {"n": n, "tn": tn, "grid": grid,
                                        "density": density.name})
