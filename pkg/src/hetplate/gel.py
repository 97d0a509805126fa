"""Flory-Rehner gels: free swelling, linear response to chain-density
perturbations, the relaxed plate moduli, and the bilayer strip."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .classifier import q2_beta
from .cylinders import Cylinder, PiecewiseCylinder
from .quadforms import IsotropicModuli
from .quadrature import composite_gauss, gauss_polygon, pairwise_sum
from .strain import PlateDomain, ScaledProfile

MIN_SWELLING = 1e-4  # alpha - 1 below this counts as no appreciable swelling


class BoundaryMinimizerError(ValueError):
    """The swelling minimizer sits (numerically) at lambda = 1."""


class GelParameterError(ValueError):
    pass


# ------------------------------------------------------------ mixing term
def mixing_energy(J, chi: float):
    """W_vol(J) = (J-1) ln((J-1)/J) + chi (J-1)/J for J >= 1."""
    J = np.asarray(J, dtype=float)
    if np.any(J < 1):
        raise ValueError("mixing energy is defined for J >= 1")
    Jm1 = J - 1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        log_term = np.where(Jm1 > 0, Jm1 * np.log1p(-1.0 / np.where(J > 0, J, 1.0)), 0.0)
    out = log_term + chi * Jm1 / J
    return out if out.ndim else float(out)


def mixing_derivative(J, chi: float):
    J = np.asarray(J, dtype=float)
    return np.log1p(-1.0 / J) + 1.0 / J + chi / J**2


def mixing_second_derivative(J, chi: float):
    J = np.asarray(J, dtype=float)
    return 1.0 / (J**2 * (J - 1.0)) - 2.0 * chi / J**3


@dataclass(frozen=True)
class GelParameters:
    v: float
    Nbar: float
    chi: float
    delta: float = 0.0

    def __post_init__(self):
        if not 0 < self.chi <= 0.5:
            raise GelParameterError("chi must lie in (0, 1/2]")
        if self.delta < 0:
            raise GelParameterError("delta must be nonnegative")
        if not self.v * self.Nbar > 0:
            raise GelParameterError("v * Nbar must be positive")

    @property
    def vN(self) -> float:
        return self.v * self.Nbar

    def with_Nbar(self, Nbar: float) -> "GelParameters":
        return GelParameters(self.v, Nbar, self.chi, self.delta)

    # volumetric part Phi(J) = W_vol(J) + delta (J - 1)
    def phi1(self, J):
        return mixing_derivative(J, self.chi) + self.delta

    def phi2(self, J):
        return mixing_second_derivative(J, self.chi)

    def density(self, F) -> np.ndarray:
        """Flory-Rehner W(F); +inf where det F < 1."""
        F = np.asarray(F, dtype=float)
        J = np.linalg.det(F)
        ok = J >= 1
        Js = np.where(ok, J, 1.0)
        W = (0.5 * self.vN * (np.einsum("...ij,...ij->...", F, F) - 3.0)
             + mixing_energy(Js, self.chi) + self.delta * (Js - 1.0))
        return np.where(ok, W, np.inf)

    def stress(self, F) -> np.ndarray:
        """DW(F) = vN F + Phi'(det F) cof F."""
        F = np.asarray(F, dtype=float)
        J = np.linalg.det(F)
        cof = J[..., None, None] * np.swapaxes(np.linalg.inv(F), -1, -2)
        return self.vN * F + self.phi1(J)[..., None, None] * cof

    # free swelling
    def swelling_energy(self, lam):
        lam = np.asarray(lam, dtype=float)
        return (0.5 * self.vN * (3 * lam**2 - 3) + mixing_energy(lam**3, self.chi)
                + self.delta * (lam**3 - 1))

    def swelling_slope(self, lam):
        """f'(lam) / (3 lam) = vN + lam Phi'(lam^3)."""
        lam = np.asarray(lam, dtype=float)
        return self.vN + lam * self.phi1(lam**3)

    def swelling_curvature(self, lam):
        """f''(lam)."""
        lam = np.asarray(lam, dtype=float)
        J = lam**3
        return 3 * self.vN + 6 * lam * self.phi1(J) + 9 * lam**4 * self.phi2(J)


# ------------------------------------------------------------- swelling
def free_swelling_stretch(p: GelParameters, lam_max: float = 100.0) -> float:
    """Minimizer alpha > 1 of the homogeneous swelling energy.

    Coarse log-spaced bracketing, golden-section refinement of the bracket,
    then Newton on the first-order condition.
    """
    lo = 1.0 + MIN_SWELLING
    if p.swelling_slope(lo) >= 0:
        raise BoundaryMinimizerError(
            f"no appreciable swelling: f'(1 + {MIN_SWELLING:g}) = "
            f"{3 * lo * p.swelling_slope(lo):.3e} >= 0, the minimizer is at lambda -> 1"
        )
    grid = 1.0 + np.geomspace(MIN_SWELLING, lam_max - 1.0, 400)
    vals = p.swelling_energy(grid)
    i = int(np.argmin(vals))
    if i == len(grid) - 1:
        raise GelParameterError("swelling energy still decreasing at lam_max")
    a, b = grid[max(i - 1, 0)], grid[i + 1]
    res = minimize_scalar(p.swelling_energy, bracket=(a, grid[i], b), method="golden",
                          options={"xtol": 1e-12})
    lam = float(res.x)
    for _ in range(50):
        g = 3 * lam * p.swelling_slope(lam)
        step = g / p.swelling_curvature(lam)
        lam -= step
        if abs(step) < 1e-15 * lam:
            break
    if not lam > 1 + MIN_SWELLING or p.swelling_curvature(lam) <= 0:
        raise BoundaryMinimizerError(f"Newton polish left the interior (lambda = {lam})")
    return lam


def swelling_residual(p: GelParameters, alpha: float) -> float:
    return float(3 * alpha * p.swelling_slope(alpha))


# ----------------------------------------------------------------- Theta
@dataclass
class ThetaEstimate:
    implicit: float
    finite_difference: float

    @property
    def value(self) -> float:
        return self.implicit

    @property
    def rel_diff(self) -> float:
        return abs(self.implicit - self.finite_difference) / abs(self.implicit)


def theta_coefficient(p: GelParameters, alpha: float | None = None) -> ThetaEstimate:
    """d alpha / d Nbar, by the implicit function theorem and by differences."""
    alpha = free_swelling_stretch(p) if alpha is None else alpha
    implicit = -3 * p.v * alpha / p.swelling_curvature(alpha)
    eps = 1e-6 * p.Nbar
    ap = free_swelling_stretch(p.with_Nbar(p.Nbar + eps))
    am = free_swelling_stretch(p.with_Nbar(p.Nbar - eps))
    return ThetaEstimate(float(implicit), float((ap - am) / (2 * eps)))


# ---------------------------------------------------------------- moduli
def _sym_basis() -> np.ndarray:
    E = []
    for i, j in ((0, 0), (1, 1), (2, 2), (1, 2), (0, 2), (0, 1)):
        M = np.zeros((3, 3))
        M[i, j] = M[j, i] = 1.0
        E.append(M)
    return np.array(E)


SYM_BASIS = _sym_basis()


def hessian_sym(p: GelParameters, alpha: float, rel_step: float = 1e-5) -> np.ndarray:
    """6x6 Hessian of W at alpha I on Sym(3) coordinates.

    Central differences of the analytic stress, Richardson-extrapolated.
    """
    F0 = alpha * np.eye(3)

    def column(h):
        cols = []
        for E in SYM_BASIS:
            dS = (p.stress(F0 + h * E) - p.stress(F0 - h * E)) / (2 * h)
            cols.append([np.sum(dS * Ej) for Ej in SYM_BASIS])
        return np.array(cols).T

    h = rel_step * alpha
    H = (4 * column(h / 2) - column(h)) / 3
    return 0.5 * (H + H.T)


@dataclass
class GelModuli:
    G: float
    Lambda: float
    fit_residual: float

    @property
    def beta(self) -> float:
        return self.Lambda / (2 * self.G)

    def q2(self, F):
        return 2 * self.G * np.einsum("...ij,...ij->...", _sym(F), _sym(F)) + self.Lambda * np.trace(
            F, axis1=-2, axis2=-1) ** 2


def _sym(F):
    F = np.asarray(F, dtype=float)
    return 0.5 * (F + np.swapaxes(F, -1, -2))


def relaxed_form(H: np.ndarray) -> np.ndarray:
    """3x3 matrix of the relaxed plate form in coordinates (F11, F22, F12)."""
    # Sym(3) coordinates: in-plane (0, 1, 5), relaxed (2, 3, 4); the Hessian
    # acts on coefficients c with S = sum c_i E_i
    a, r = [0, 1, 5], [2, 3, 4]
    Haa, Har, Hrr = H[np.ix_(a, a)], H[np.ix_(a, r)], H[np.ix_(r, r)]
    return Haa - Har @ np.linalg.solve(Hrr, Har.T)


def gel_moduli(p: GelParameters, alpha: float) -> GelModuli:
    """Fit Q2(F) = 2 G |F_sym|^2 + Lambda tr^2 F to the relaxed Hessian."""
    H = hessian_sym(p, alpha)
    if np.linalg.eigvalsh(H).min() <= 0:
        raise GelParameterError("Hessian at alpha I is not positive definite")
    M = relaxed_form(H)
    # model: Q(F11, F22, F12) = 2G (F11^2 + F22^2 + 2 F12^2) + L (F11 + F22)^2,
    # linear in (G, L) entrywise
    basis_G = 2 * np.diag([1.0, 1.0, 2.0])
    basis_L = np.zeros((3, 3))
    basis_L[:2, :2] = 1.0
    X = np.column_stack([basis_G.ravel(), basis_L.ravel()])
    coef, *_ = np.linalg.lstsq(X, M.ravel(), rcond=None)
    resid = float(np.abs(X @ coef - M.ravel()).max() / np.abs(M).max())
    G, L = map(float, coef)
    if G <= 0:
        raise GelParameterError("fitted shear modulus is not positive")
    return GelModuli(G, L, resid)


def analytic_gel_moduli(p: GelParameters, alpha: float) -> GelModuli:
    """Closed-form (G, Lambda) from D^2 W(alpha I), used as a cross-check."""
    mu = p.vN
    lam = p.phi2(alpha**3) * alpha**4 - p.vN
    beta = lam / (2 * mu + lam)
    return GelModuli(mu, 2 * mu * beta, 0.0)


def curvature_factor(G: float, Lambda: float) -> float:
    """(2G + 2 Lambda) / (2G + Lambda)."""
    return (2 * G + 2 * Lambda) / (2 * G + Lambda)


# -------------------------------------------------------- perturbations
class MeanViolation(ValueError):
    pass


@dataclass
class ChainDensityPerturbation:
    """Per-subdomain thickness profiles g_k(t) of the chain density."""

    domain: PlateDomain
    profiles: list  # callables or polynomial coefficient lists
    breaks: list | None = None
    tol: float = 1e-12

    def __post_init__(self):
        if len(self.profiles) != self.domain.n_pieces:
            raise ValueError("need one profile per subdomain")
        self._scalar = [ScaledProfile(g, np.eye(3), None if self.breaks is None else self.breaks[k])
                        for k, g in enumerate(self.profiles)]
        for k, s in enumerate(self._scalar):
            m = self.moment(k, 0)
            if abs(m) > self.tol:
                raise MeanViolation(f"profile {k} has nonzero thickness mean {m:.3e}")

    def moment(self, k: int, order: int, n: int = 16) -> float:
        t, w = composite_gauss(self._scalar[k].breaks, n)
        return float(np.dot(w, t**order * self._scalar[k].g(t)))

    def strain_profile(self, k: int, factor: float) -> ScaledProfile:
        """b = factor * g, as an isotropic strain profile b I3."""
        s = self._scalar[k]
        return ScaledProfile(lambda t, g=s.g: factor * g(t), np.eye(3), s.breaks)


def gel_target_curvature(g: ChainDensityPerturbation, Theta: float, x) -> np.ndarray:
    """a I2 with a = 12 Theta int t g(x', t) dt."""
    k = int(g.domain.locate(np.reshape(x, (1, 2)))[0])
    if k < 0:
        raise ValueError("point on a cut or outside the plate")
    return 12.0 * Theta * g.moment(k, 1) * np.eye(2)


# ---------------------------------------------------------------- bilayer
@dataclass
class GelConstants:
    alpha: float
    Theta: ThetaEstimate
    moduli: GelModuli
    first_order_residual: float
    second_derivative: float


def derive_constants(p: GelParameters) -> GelConstants:
    alpha = free_swelling_stretch(p)
    return GelConstants(alpha, theta_coefficient(p, alpha), gel_moduli(p, alpha),
                        swelling_residual(p, alpha), float(p.swelling_curvature(alpha)))


@dataclass
class Bilayer:
    constants: GelConstants
    a: tuple[float, float]
    curvatures: tuple[float, float]
    surfaces: dict  # sigma1 -> PiecewiseCylinder
    signs: dict  # sigma1 -> (sigma0, sigma1, sigma2)
    perturbation: ChainDensityPerturbation


def bilayer_domain(d: float, ell: float) -> PlateDomain:
    return PlateDomain((-d, d, 0.0, ell), [[(0.0, 0.0), (0.0, ell)]])


def bilayer_minimizers(p: GelParameters, g1, g2, d: float, ell: float,
                       constants: GelConstants | None = None) -> Bilayer:
    """The two alpha-isometric pointwise minimizers of the bilayer strip.

    Left strip (-d, 0) carries g1, right strip (0, d) carries g2. For each
    sigma1 the signs sigma2 = sigma1 sign(r1) and sigma0 = sign(r1 r2) make
    the pulled-back curvatures equal r_k e1 (x) e1.
    """
    c = constants or derive_constants(p)
    dom = bilayer_domain(d, ell)
    pert = ChainDensityPerturbation(dom, [g1, g2])
    Th = c.Theta.value
    a = tuple(12.0 * Th * pert.moment(k, 1) for k in range(2))
    if a[0] == 0 or a[1] == 0:
        raise ValueError("both target curvatures must be nonzero")
    if abs(a[0] - a[1]) <= 1e-12 * max(abs(a[0]), abs(a[1])):
        raise ValueError("the two strips must have different target curvatures")
    f = curvature_factor(c.moduli.G, c.moduli.Lambda)
    r = (a[0] * f, a[1] * f)
    alpha = c.alpha
    surfaces, signs = {}, {}
    for s1 in (1.0, -1.0):
        s2 = s1 * np.sign(r[0])
        s0 = np.sign(r[0] * r[1])
        cyl = []
        for k, sk in enumerate((1.0, s0)):
            # alpha * diag(sk, s1, s2) C_{alpha r_k}(x) = alpha * R C(rho x)
            tau = sk * s1 * s2
            R = np.diag([sk, s1, sk * s1])
            rho = np.diag([1.0, tau])
            cyl.append(Cylinder(alpha / abs(r[k]), R, np.zeros(3), rho, alpha))
        surfaces[s1] = PiecewiseCylinder(dom, cyl)
        signs[s1] = (float(s0), float(s1), float(s2))
    return Bilayer(c, a, r, surfaces, signs, pert)


def gel_limit_energy(surface: PiecewiseCylinder, bil: Bilayer, n: int = 16) -> dict:
    """Gel limit energy of an alpha-isometry.

    1/24 int Q2(A_y - Abar) + 1/2 int Q2(b I2) - 1/24 int Q2(Abar), with
    Q2 = 2G|.|^2 + Lambda tr^2 and b = Theta g.
    """
    c = bil.constants
    Th = c.Theta.value
    dom = surface.domain
    bend, extra = [], []
    for k, poly in enumerate(dom.pieces):
        pts, w = gauss_polygon(poly, n)
        A = surface.curvature(pts, piece=k)
        Abar = bil.a[k] * np.eye(2)
        bend.append(np.dot(w, c.moduli.q2(A - Abar)) / 24.0)
        t, wt = composite_gauss(bil.perturbation._scalar[k].breaks, n)
        b = Th * bil.perturbation._scalar[k].g(t)
        qb = c.moduli.q2(b[:, None, None] * np.eye(2))
        extra.append(dom.area(k) * (0.5 * np.dot(wt, qb) - c.moduli.q2(Abar) / 24.0))
    return {"bending": pairwise_sum(bend), "additional": pairwise_sum(extra),
            "total": pairwise_sum(bend) + pairwise_sum(extra)}


def unit_isometry_equivalent(bil: Bilayer):
    """Field, moduli and rescaling turning the gel problem into the unit-isometry one.

    With y = alpha u, A_y = alpha A_u, so Q2(A_y - Abar) = alpha^2 Q2(A_u - Abar/alpha):
    strain b/alpha, moduli scaled by alpha^2.
    """
    from .strain import StrainField

    c = bil.constants
    alpha = c.alpha
    prof = [bil.perturbation.strain_profile(k, c.Theta.value / alpha) for k in range(2)]
    field = StrainField(bil.perturbation.domain, prof)
    beta = c.moduli.beta
    mu = alpha**2 * c.moduli.G
    moduli = IsotropicModuli(mu, 2 * mu * beta / (1 - beta))
    return field, moduli


def q2_gel_beta(F, G: float, beta: float):
    return q2_beta(F, beta, G)
