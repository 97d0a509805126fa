"""Spontaneous strain fields on a subdivided mid-plane.

A field assigns to every subdomain a thickness profile t -> B(t) in Sym(3),
t in (-1/2, 1/2). From it come the stretching average D_min = int B and the
target curvature 12 int t B (both on the in-plane 2x2 block), and the
Saint-Venant compatibility test for D_min.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import shapely
from shapely.geometry import LineString, Point, Polygon, box
from shapely.ops import split

from .quadrature import composite_gauss
from .tensors import Sym2, Sym3

HALF = 0.5


class LocationError(ValueError):
    """A point lies on a cut or outside the plate."""


def _as_sym3(M) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.shape == (2, 2):
        out = np.zeros((3, 3))
        out[:2, :2] = M
        M = out
    return Sym3.from_matrix(M).matrix()


# ----------------------------------------------------------------- profiles
class StrainProfile:
    """Thickness profile t -> B(t) (3x3 symmetric), bounded on (-1/2, 1/2)."""

    breaks: np.ndarray = np.array([-HALF, HALF])

    def __call__(self, t) -> np.ndarray:  # pragma: no cover - abstract
        raise NotImplementedError

    def in_plane(self, t) -> np.ndarray:
        return self(np.asarray(t, dtype=float))[..., :2, :2]

    def quadrature(self, n: int = 16):
        return composite_gauss(self.breaks, n)

    def integrate(self, weight: Callable | None = None, n: int = 16) -> np.ndarray:
        """int w(t) B(t) dt over the thickness (full 3x3)."""
        t, w = self.quadrature(n)
        if weight is not None:
            w = w * weight(t)
        return np.einsum("k,kij->ij", w, self(t))

    def d_min(self, n: int = 16) -> np.ndarray:
        return self.integrate(None, n)[:2, :2]

    def first_moment(self, n: int = 16) -> np.ndarray:
        return self.integrate(lambda t: t, n)[:2, :2]

    def target_curvature(self, n: int = 16) -> np.ndarray:
        return 12.0 * self.first_moment(n)

    def __add__(self, other: "StrainProfile") -> "StrainProfile":
        return LinearCombination([self, other], [1.0, 1.0])

    def __mul__(self, c: float) -> "StrainProfile":
        return LinearCombination([self], [float(c)])

    __rmul__ = __mul__


class PolynomialProfile(StrainProfile):
    """B(t) = sum_k C_k t^k with symmetric coefficient matrices."""

    def __init__(self, coeffs: Sequence):
        self.coeffs = np.array([_as_sym3(c) for c in coeffs])
        if len(self.coeffs) == 0:
            raise ValueError("need at least one coefficient")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        powers = t[..., None] ** np.arange(len(self.coeffs))
        return np.einsum("...k,kij->...ij", powers, self.coeffs)


class PiecewiseConstantProfile(StrainProfile):
    """B(t) = values[i] for breaks[i] <= t < breaks[i+1]."""

    def __init__(self, breaks: Sequence[float], values: Sequence):
        breaks = np.asarray(breaks, dtype=float)
        if breaks[0] != -HALF or breaks[-1] != HALF or np.any(np.diff(breaks) <= 0):
            raise ValueError("breaks must increase from -1/2 to 1/2")
        if len(values) != len(breaks) - 1:
            raise ValueError("need one value per thickness interval")
        self.breaks = breaks
        self.values = np.array([_as_sym3(v) for v in values])

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        idx = np.clip(np.searchsorted(self.breaks, t, side="right") - 1, 0, len(self.values) - 1)
        return self.values[idx]


class ScaledProfile(StrainProfile):
    """B(t) = g(t) M for a scalar thickness function g.

    ``g`` is a callable, or a sequence of polynomial coefficients in t
    (lowest order first).
    """

    def __init__(self, g, M, breaks: Sequence[float] | None = None):
        if callable(g):
            self.g = g
            self.g_coeffs = None
        else:
            self.g_coeffs = np.asarray(g, dtype=float)
            self.g = lambda t: np.polynomial.polynomial.polyval(t, self.g_coeffs)
        self.M = _as_sym3(M)
        if breaks is not None:
            self.breaks = np.asarray(breaks, dtype=float)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return np.asarray(self.g(t), dtype=float)[..., None, None] * self.M


class LinearCombination(StrainProfile):
    def __init__(self, profiles, coefs):
        self.profiles = list(profiles)
        self.coefs = list(coefs)
        self.breaks = np.unique(np.concatenate([p.breaks for p in self.profiles]))

    def __call__(self, t):
        return sum(c * p(t) for c, p in zip(self.coefs, self.profiles))


# ------------------------------------------------------------------ domain
def _extend(line: np.ndarray, eps: float) -> np.ndarray:
    out = line.copy()
    d0 = out[0] - out[1]
    d1 = out[-1] - out[-2]
    out[0] = out[0] + eps * d0 / np.linalg.norm(d0)
    out[-1] = out[-1] + eps * d1 / np.linalg.norm(d1)
    return out


def _centroid_key(poly: Polygon):
    c = poly.centroid
    return (round(c.x, 12), round(c.y, 12))


@dataclass
class PlateDomain:
    """Rectangle (x0, x1) x (y0, y1) cut recursively by polylines.

    Cut k must run between two points of the boundary of the current
    remaining region w'_k and split it in two. The piece that carries on is
    the one containing ``keep[k]`` if given, else the one containing the
    midpoint of the next cut, else (for the last cut) the piece whose
    centroid is lexicographically larger. The piece left behind is w_k.
    """

    rect: tuple[float, float, float, float]
    cuts: list = field(default_factory=list)
    keep: list | None = None
    tol: float = 1e-9

    def __post_init__(self):
        x0, x1, y0, y1 = map(float, self.rect)
        if not (x1 > x0 and y1 > y0):
            raise ValueError("degenerate rectangle")
        self.rect = (x0, x1, y0, y1)
        self.cuts = [np.asarray(c, dtype=float).reshape(-1, 2) for c in self.cuts]
        self.outer = box(x0, y0, x1, y1)
        self.diameter = float(np.hypot(x1 - x0, y1 - y0))
        self.pieces = self._subdivide()
        self._adjacency = None

    # -- construction
    def _subdivide(self) -> list[Polygon]:
        current = self.outer
        pieces = []
        for k, cut in enumerate(self.cuts):
            if len(cut) < 2 or not np.all(np.isfinite(cut)):
                raise ValueError(f"cut {k} is malformed")
            line = LineString(cut)
            if line.length == 0 or not line.is_simple:
                raise ValueError(f"cut {k} is not an injective curve")
            tol = self.tol * self.diameter
            for end in (cut[0], cut[-1]):
                if current.exterior.distance(Point(end)) > tol:
                    raise ValueError(f"cut {k} endpoint {end} is not on the current boundary")
            inner = line.difference(current.exterior.buffer(tol))
            if not inner.is_empty and not current.buffer(tol).contains(line):
                raise ValueError(f"cut {k} leaves the current region")
            parts = split(current, LineString(_extend(cut, 1e-7 * self.diameter)))
            polys = [g for g in parts.geoms if g.area > tol * self.diameter]
            if len(polys) != 2:
                raise ValueError(f"cut {k} does not split the region into two pieces")
            carry = self._carry_index(k, polys)
            pieces.append(polys[1 - carry])
            current = polys[carry]
        pieces.append(current)
        return [shapely.normalize(p) for p in pieces]

    def _carry_index(self, k: int, polys) -> int:
        if self.keep is not None and self.keep[k] is not None:
            p = Point(self.keep[k])
            hits = [i for i, g in enumerate(polys) if g.contains(p)]
            if len(hits) != 1:
                raise ValueError(f"keep point for cut {k} does not pick a piece")
            return hits[0]
        if k + 1 < len(self.cuts):
            nxt = LineString(self.cuts[k + 1]).interpolate(0.5, normalized=True)
            dists = [g.distance(nxt) for g in polys]
            return int(np.argmin(dists))
        keys = [_centroid_key(g) for g in polys]
        return int(keys[1] > keys[0])

    # -- queries
    @property
    def n_pieces(self) -> int:
        return len(self.pieces)

    def locate(self, points) -> np.ndarray:
        """Index of the open subdomain containing each point, -1 if none."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        idx = np.full(len(pts), -1)
        for k, poly in enumerate(self.pieces):
            inside = shapely.contains_xy(poly, pts[:, 0], pts[:, 1])
            idx[inside & (idx < 0)] = k
        return idx

    def adjacency(self):
        """{(i, j): shared boundary geometry} for neighbors with shared length > 0."""
        if self._adjacency is None:
            adj = {}
            tol = self.tol * self.diameter
            for i in range(self.n_pieces):
                for j in range(i + 1, self.n_pieces):
                    shared = self.pieces[i].boundary.intersection(self.pieces[j].boundary)
                    if shared.length > tol:
                        adj[(i, j)] = shapely.line_merge(shared) if shared.geom_type == "MultiLineString" else shared
            self._adjacency = adj
        return self._adjacency

    def cuts_along(self, shared) -> list[int]:
        """Indices of cuts that carry (part of) a shared boundary."""
        mid = shared.interpolate(0.5, normalized=True) if hasattr(shared, "interpolate") else shared.centroid
        tol = 1e-7 * self.diameter
        return [k for k, c in enumerate(self.cuts) if LineString(c).distance(mid) < tol]

    def on_outer_boundary(self, point) -> bool:
        return self.outer.exterior.distance(Point(point)) <= self.tol * self.diameter

    def area(self, k: int) -> float:
        return float(self.pieces[k].area)


# ------------------------------------------------------------------- field
@dataclass
class StrainField:
    domain: PlateDomain
    profiles: list

    def __post_init__(self):
        if len(self.profiles) != self.domain.n_pieces:
            raise ValueError(
                f"{self.domain.n_pieces} subdomains but {len(self.profiles)} profiles"
            )

    def piece_at(self, x) -> int:
        k = int(self.domain.locate(np.asarray(x, dtype=float).reshape(1, 2))[0])
        if k < 0:
            raise LocationError(f"point {tuple(np.ravel(x))} is on a cut or outside the plate")
        return k

    def piece_d_min(self, n: int = 16) -> list[np.ndarray]:
        return [p.d_min(n) for p in self.profiles]

    def piece_target_curvature(self, n: int = 16) -> list[np.ndarray]:
        return [p.target_curvature(n) for p in self.profiles]

    def d_min_at(self, points, n: int = 16) -> np.ndarray:
        """Vectorised D_min at points; raises LocationError if any is off the pieces."""
        pts = np.atleast_2d(points)
        idx = self.domain.locate(pts)
        if np.any(idx < 0):
            raise LocationError("some sample points lie on a cut or outside the plate")
        table = np.array(self.piece_d_min(n))
        return table[idx]


def d_min(field: StrainField, x, n: int = 16) -> Sym2:
    return Sym2.from_matrix(field.profiles[field.piece_at(x)].d_min(n))


def target_curvature(field: StrainField, x, n: int = 16) -> Sym2:
    return Sym2.from_matrix(field.profiles[field.piece_at(x)].target_curvature(n))


# ------------------------------------------------------------ Saint-Venant
@dataclass
class ResidualField:
    values: np.ndarray  # interior nodes, shape (nx - 2, ny - 2)
    max_norm: float


def saint_venant_residual(D, spacing) -> ResidualField:
    """Discrete curl(curl D) on a uniform grid.

    ``D`` has shape (nx, ny, 2, 2), axis 0 along x1 and axis 1 along x2.
    ``spacing`` is a scalar or a pair (s1, s2). Centered second differences;
    the residual d11 D22 - d12 D12 - d12 D21 + d22 D11 is returned at the
    interior nodes.
    """
    D = np.asarray(D, dtype=float)
    if D.ndim != 4 or D.shape[2:] != (2, 2):
        raise ValueError("expected samples of shape (nx, ny, 2, 2)")
    if min(D.shape[:2]) < 4:
        raise ValueError("grid too small: need at least 4 points per direction")
    s1, s2 = (spacing, spacing) if np.isscalar(spacing) else spacing
    c = np.s_[1:-1, 1:-1]

    def d11(f):
        return (f[2:, 1:-1] - 2 * f[c] + f[:-2, 1:-1]) / s1**2

    def d22(f):
        return (f[1:-1, 2:] - 2 * f[c] + f[1:-1, :-2]) / s2**2

    def d12(f):
        return (f[2:, 2:] - f[2:, :-2] - f[:-2, 2:] + f[:-2, :-2]) / (4 * s1 * s2)

    r = d11(D[..., 1, 1]) - d12(D[..., 0, 1]) - d12(D[..., 1, 0]) + d22(D[..., 0, 0])
    return ResidualField(r, float(np.abs(r).max()))


@dataclass
class Witness:
    """Displacement w with sym grad w ~ D_min, sampled on a cell-centred grid."""

    x1: np.ndarray
    x2: np.ndarray
    w: np.ndarray  # (nx, ny, 2)
    fit_error: float

    def __post_init__(self):
        from scipy.interpolate import RegularGridInterpolator

        g1 = np.gradient(self.w, self.x1, axis=0)
        g2 = np.gradient(self.w, self.x2, axis=1)
        grad = np.stack([g1, g2], axis=-1)  # (nx, ny, 2 comps, 2 derivs)
        opts = dict(bounds_error=False, fill_value=None)
        self._w = RegularGridInterpolator((self.x1, self.x2), self.w, **opts)
        self._g = RegularGridInterpolator((self.x1, self.x2), grad, **opts)

    def __call__(self, pts) -> np.ndarray:
        return self._w(np.atleast_2d(pts))

    def gradient(self, pts) -> np.ndarray:
        return self._g(np.atleast_2d(pts))

    def affine_defect(self) -> float:
        """Max deviation of w from its best affine fit."""
        X1, X2 = np.meshgrid(self.x1, self.x2, indexing="ij")
        A = np.column_stack([np.ones(X1.size), X1.ravel(), X2.ravel()])
        out = 0.0
        for c in range(2):
            y = self.w[..., c].ravel()
            coef, *_ = np.linalg.lstsq(A, y, rcond=None)
            out = max(out, float(np.abs(A @ coef - y).max()))
        return out


@dataclass
class CompatibilityReport:
    compatible: bool
    max_residual: float
    tolerance: float
    grid: tuple[int, int]
    witness: Witness | None = None
    note: str = ""


def cell_centres(rect, n: int | tuple[int, int]):
    nx, ny = (n, n) if np.isscalar(n) else n
    x0, x1, y0, y1 = rect
    s1, s2 = (x1 - x0) / nx, (y1 - y0) / ny
    return x0 + s1 * (np.arange(nx) + 0.5), y0 + s2 * (np.arange(ny) + 0.5), (s1, s2)


def reconstruct_displacement(D, x1, x2) -> Witness:
    """Least-squares w on the grid with forward-difference sym grad w = D."""
    from scipy.sparse import coo_matrix
    from scipy.sparse.linalg import lsqr

    nx, ny = len(x1), len(x2)
    s1, s2 = x1[1] - x1[0], x2[1] - x2[0]

    def idx(i, j, c):
        return 2 * (i * ny + j) + c

    rows, cols, vals, rhs = [], [], [], []

    def eq(entries, b):
        r = len(rhs)
        for col, v in entries:
            rows.append(r)
            cols.append(col)
            vals.append(v)
        rhs.append(b)

    for i in range(nx - 1):
        for j in range(ny):
            eq([(idx(i + 1, j, 0), 1 / s1), (idx(i, j, 0), -1 / s1)],
               0.5 * (D[i, j, 0, 0] + D[i + 1, j, 0, 0]))
    for i in range(nx):
        for j in range(ny - 1):
            eq([(idx(i, j + 1, 1), 1 / s2), (idx(i, j, 1), -1 / s2)],
               0.5 * (D[i, j, 1, 1] + D[i, j + 1, 1, 1]))
    for i in range(nx - 1):
        for j in range(ny - 1):
            # d2 w1 + d1 w2 = 2 D12 at the cell centre (averaged edge differences)
            e = [
                (idx(i, j + 1, 0), 0.5 / s2), (idx(i + 1, j + 1, 0), 0.5 / s2),
                (idx(i, j, 0), -0.5 / s2), (idx(i + 1, j, 0), -0.5 / s2),
                (idx(i + 1, j, 1), 0.5 / s1), (idx(i + 1, j + 1, 1), 0.5 / s1),
                (idx(i, j, 1), -0.5 / s1), (idx(i, j + 1, 1), -0.5 / s1),
            ]
            eq(e, 0.5 * (D[i, j, 0, 1] + D[i + 1, j, 0, 1] + D[i, j + 1, 0, 1] + D[i + 1, j + 1, 0, 1]))
    A = coo_matrix((vals, (rows, cols)), shape=(len(rhs), 2 * nx * ny)).tocsr()
    b = np.asarray(rhs)
    sol = lsqr(A, b, atol=1e-15, btol=1e-15, iter_lim=20 * A.shape[1])[0]
    fit = float(np.abs(A @ sol - b).max())
    return Witness(np.asarray(x1), np.asarray(x2), sol.reshape(nx, ny, 2), fit)


def compatibility_report(field: StrainField, grid: int | tuple[int, int] = 64,
                         rel_tol: float = 1e-6, n: int = 16) -> CompatibilityReport:
    """Saint-Venant test of D_min sampled at cell centres of a uniform grid."""
    x1, x2, spacing = cell_centres(field.domain.rect, grid)
    X1, X2 = np.meshgrid(x1, x2, indexing="ij")
    pts = np.column_stack([X1.ravel(), X2.ravel()])
    idx = field.domain.locate(pts)
    if np.any(idx < 0):
        # grid node exactly on a cut: nudge by a tiny fraction of the spacing
        bad = idx < 0
        pts[bad] += 1e-9 * np.array(spacing)
        idx = field.domain.locate(pts)
        if np.any(idx < 0):
            raise LocationError("grid nodes on cuts could not be resolved")
    table = np.array(field.piece_d_min(n))
    D = table[idx].reshape(len(x1), len(x2), 2, 2)
    res = saint_venant_residual(D, spacing)
    scale = max(1.0, float(np.abs(D).max()))
    tol = rel_tol * scale
    compatible = res.max_norm < tol
    report = CompatibilityReport(compatible, res.max_norm, tol, (len(x1), len(x2)))
    if compatible:
        report.witness = reconstruct_displacement(D, x1, x2)
    else:
        report.note = "outside validated theory: D_min fails the compatibility condition"
    return report
