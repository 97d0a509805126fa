"""Cylinders, their patching across straight cuts, and piecewise-cylindrical
isometries of a subdivided plate."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from itertools import product

import numpy as np
from shapely.geometry import LineString

from .classifier import Case, MinimizerSet, parallel, perp
from .strain import PlateDomain
from .tensors import as_orthogonal, rot3_z

# d/dx C_r at the origin: (a, b) -> (0, a, b)
P0 = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
JUMP_TOL = 1e-8
N_CUT_SAMPLES = 32


def cyl_map(r: float, z) -> np.ndarray:
    """C_r applied to points z (k, 2)."""
    z = np.atleast_2d(np.asarray(z, dtype=float))
    out = np.empty((len(z), 3))
    if np.isinf(r):
        out[:, 0] = 0.0
        out[:, 1] = z[:, 0]
    else:
        out[:, 0] = r * (np.cos(z[:, 0] / r) - 1.0)
        out[:, 1] = r * np.sin(z[:, 0] / r)
    out[:, 2] = z[:, 1]
    return out


def cyl_jacobian(r: float, z) -> np.ndarray:
    z = np.atleast_2d(np.asarray(z, dtype=float))
    J = np.zeros((len(z), 3, 2))
    if np.isinf(r):
        J[:, 1, 0] = 1.0
    else:
        J[:, 0, 0] = -np.sin(z[:, 0] / r)
        J[:, 1, 0] = np.cos(z[:, 0] / r)
    J[:, 2, 1] = 1.0
    return J


@dataclass(frozen=True)
class Cylinder:
    """x -> v + s R C_r(rho x).

    ``r = inf`` is the planar branch. ``scale`` s = 1 gives an isometry;
    other values give s-isometries (first fundamental form s^2 I).
    """

    r: float
    R: np.ndarray = field(default_factory=lambda: np.eye(3))
    v: np.ndarray = field(default_factory=lambda: np.zeros(3))
    rho: np.ndarray = field(default_factory=lambda: np.eye(2))
    scale: float = 1.0

    def __post_init__(self):
        if not (self.r > 0):
            raise ValueError("radius must be positive (inf for a plane)")
        object.__setattr__(self, "r", float(self.r))
        object.__setattr__(self, "R", as_orthogonal(self.R, proper=True))
        object.__setattr__(self, "rho", as_orthogonal(self.rho))
        object.__setattr__(self, "v", np.asarray(self.v, dtype=float).reshape(3))

    @property
    def planar(self) -> bool:
        return np.isinf(self.r)

    def __call__(self, x) -> np.ndarray:
        return cyl_eval(self, x)

    def with_motion(self, R, v) -> "Cylinder":
        """Superpose the rigid motion z -> R z + v."""
        R = np.asarray(R, dtype=float)
        return Cylinder(self.r, R @ self.R, R @ self.v + np.asarray(v, dtype=float),
                        self.rho, self.scale)

    def ruling(self) -> np.ndarray:
        """Reference direction of the straight lines on the surface."""
        return self.rho.T @ np.array([0.0, 1.0])


def cyl_eval(c: Cylinder, x) -> np.ndarray:
    x = np.atleast_2d(np.asarray(x, dtype=float))
    return c.v + c.scale * cyl_map(c.r, x @ c.rho.T) @ c.R.T


def cyl_gradient(c: Cylinder, x) -> np.ndarray:
    """Gradient s R grad C_r(rho x) rho, shape (k, 3, 2)."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    J = cyl_jacobian(c.r, x @ c.rho.T)
    return c.scale * np.einsum("ij,kjl,lm->kim", c.R, J, c.rho)


def cyl_normal(c: Cylinder, x) -> np.ndarray:
    g = cyl_gradient(c, x)
    n = np.cross(g[:, :, 0], g[:, :, 1])
    return n / np.linalg.norm(n, axis=1, keepdims=True)


def second_fundamental_form(c: Cylinder) -> np.ndarray:
    """(grad y)^T grad nu, constant on a cylinder."""
    if c.planar:
        return np.zeros((2, 2))
    D = np.diag([1.0 / c.r, 0.0])
    return c.scale * np.linalg.det(c.rho) * c.rho.T @ D @ c.rho


def cylinder_for_element(A, scale: float = 1.0) -> Cylinder:
    """Unmoved cylinder whose second fundamental form is the rank-one ``A``.

    For A = k n (x) n take rho = [[n1, n2], [-s n2, s n1]] with s = sign k,
    so det rho = s and rho^T e1 = n.
    """
    A = np.asarray(A, dtype=float)
    w, V = np.linalg.eigh(0.5 * (A + A.T))
    i = int(np.argmax(np.abs(w)))
    k = w[i]
    if abs(k) == 0.0:
        return Cylinder(np.inf, scale=scale)
    if abs(w[1 - i]) > 1e-10 * abs(k):
        raise ValueError("element is not rank one")
    n = V[:, i]
    s = 1.0 if k > 0 else -1.0
    rho = np.array([[n[0], n[1]], [-s * n[1], s * n[0]]])
    return Cylinder(scale / abs(k), rho=rho, scale=scale)


def translate_in_plane(c: Cylinder, u) -> Cylinder:
    """Representative of x -> y(x + u) in normal form.

    Uses C_r(w + z) = C_r(w) + Rhat_{w1/r} C_r(z) with w = rho u.
    """
    if c.planar:
        raise ValueError("planar cylinder: in-plane shifts are plain translations")
    w = c.rho @ np.asarray(u, dtype=float)
    v = c.v + c.scale * c.R @ cyl_map(c.r, w)[0]
    return Cylinder(c.r, c.R @ rot3_z(w[0] / c.r), v, c.rho, c.scale)


# ---------------------------------------------------------------- patching
class Violation(str, Enum):
    CUT_NOT_STRAIGHT = "CutNotStraight"
    RULING_NOT_PARALLEL = "RulingNotParallel"
    ROTATION_MISMATCH = "RotationMismatch"
    POSITION_MISMATCH = "PositionMismatch"
    NUMERIC_JUMP = "NumericJump"
    TRIVIAL_SAME_CURVATURE = "TrivialSameCurvature"


@dataclass
class PatchResult:
    valid: bool
    kind: Violation | None = None
    position_jump: float = 0.0
    gradient_jump: float = 0.0
    detail: str = ""

    def __bool__(self) -> bool:
        return self.valid


def as_polyline(cut) -> np.ndarray:
    if hasattr(cut, "coords"):
        cut = np.asarray(cut.coords)
    cut = np.asarray(cut, dtype=float)
    if cut.ndim != 2 or cut.shape[1] != 2 or len(cut) < 2 or not np.all(np.isfinite(cut)):
        raise ValueError("malformed cut")
    return cut


def straightness_defect(cut) -> float:
    """Max distance of polyline vertices from the chord, relative to its length."""
    cut = as_polyline(cut)
    a, b = cut[0], cut[-1]
    d = b - a
    L = np.linalg.norm(d)
    if L == 0:
        raise ValueError("degenerate cut")
    rel = cut - a
    dist = np.abs(rel[:, 0] * d[1] - rel[:, 1] * d[0]) / L
    return float(dist.max() / L)


def start_point(cut) -> np.ndarray:
    """The endpoint with lexicographically smaller coordinates."""
    cut = as_polyline(cut)
    a, b = cut[0], cut[-1]
    return a if tuple(a) <= tuple(b) else b


def sample_polyline(cut, n: int = N_CUT_SAMPLES) -> np.ndarray:
    line = LineString(as_polyline(cut))
    s = np.linspace(0.0, 1.0, n)
    return np.array([line.interpolate(t, normalized=True).coords[0] for t in s])


def cut_jumps(c1: Cylinder, c2: Cylinder, cut, n: int = N_CUT_SAMPLES):
    """Max position and gradient mismatch of two cylinders along a cut."""
    pts = sample_polyline(cut, n)
    dy = np.abs(cyl_eval(c1, pts) - cyl_eval(c2, pts)).max()
    dg = np.abs(cyl_gradient(c1, pts) - cyl_gradient(c2, pts)).max()
    return float(dy), float(dg)


def interface_rotation(c1: Cylinder, c2: Cylinder, p) -> tuple[np.ndarray, np.ndarray]:
    """(Q1^T Q2... ) pieces of the matching condition at p.

    Returns (B, M) where B = (R2 Rhat2)^T (R1 Rhat1) and M = rho2 rho1^T;
    C1 continuity at p holds iff B = blockdiag(det M, M).
    """
    p = np.asarray(p, dtype=float)
    Q = []
    for c in (c1, c2):
        th = 0.0 if c.planar else (c.rho @ p)[0] / c.r
        Q.append(c.R @ rot3_z(th))
    return Q[1].T @ Q[0], c2.rho @ c1.rho.T


def block(M) -> np.ndarray:
    out = np.zeros((3, 3))
    out[0, 0] = np.linalg.det(M)
    out[1:, 1:] = M
    return out


def patch_check(c1: Cylinder, c2: Cylinder, cut, *, numeric: bool = True,
                tol: float = JUMP_TOL) -> PatchResult:
    """Can y1 on one side and y2 on the other be glued C1 along ``cut``?"""
    cut = as_polyline(cut)
    if (not c1.planar and not c2.planar and abs(c1.r - c2.r) <= 1e-12 * c1.r
            and np.sign(np.linalg.det(c1.rho)) == np.sign(np.linalg.det(c2.rho))
            and c1.scale == c2.scale):
        return PatchResult(False, Violation.TRIVIAL_SAME_CURVATURE,
                           detail="equal signed radii: not covered by the two-cylinder test")
    if straightness_defect(cut) > 1e-9:
        return PatchResult(False, Violation.CUT_NOT_STRAIGHT)
    e = cut[-1] - cut[0]
    for c in (c1, c2):
        if not c.planar and not parallel(c.ruling(), e, 1e-9):
            return PatchResult(False, Violation.RULING_NOT_PARALLEL)
    p = start_point(cut)
    B, M = interface_rotation(c1, c2, p)
    if np.abs(B - block(M)).max() > 1e-9:
        return PatchResult(False, Violation.ROTATION_MISMATCH)
    gap = np.abs(cyl_eval(c1, p) - cyl_eval(c2, p)).max()
    if gap > tol:
        return PatchResult(False, Violation.POSITION_MISMATCH, gap)
    res = PatchResult(True)
    if numeric:
        res.position_jump, res.gradient_jump = cut_jumps(c1, c2, cut)
        if max(res.position_jump, res.gradient_jump) > tol:
            res.valid, res.kind = False, Violation.NUMERIC_JUMP
    return res


def glue(c1: Cylinder, c2_shape: Cylinder, p) -> Cylinder:
    """Rigidly move ``c2_shape`` so that it matches c1 to first order at p."""
    p = np.asarray(p, dtype=float)
    _, M = interface_rotation(c1, c2_shape, p)
    th = []
    for c in (c1, c2_shape):
        th.append(0.0 if c.planar else (c.rho @ p)[0] / c.r)
    R2 = c1.R @ rot3_z(th[0]) @ block(M).T @ rot3_z(th[1]).T
    moved = Cylinder(c2_shape.r, R2, np.zeros(3), c2_shape.rho, c2_shape.scale)
    v2 = cyl_eval(c1, p)[0] - cyl_eval(moved, p)[0]
    return Cylinder(c2_shape.r, R2, v2, c2_shape.rho, c2_shape.scale)


# ------------------------------------------------------ existence decision
class Reason(str, Enum):
    CONFLICTING_RULINGS = "ConflictingRulings"
    RULING_NOT_PARALLEL = "RulingNotParallel"
    CUT_NOT_STRAIGHT = "CutNotStraight"
    CUT_NOT_BOUNDARY_TO_BOUNDARY = "CutNotBoundaryToBoundary"
    CUTS_INTERSECT = "CutsIntersect"
    UNSUPPORTED_EQUAL_CURVATURE = "UnsupportedEqualCurvature"


@dataclass
class Interface:
    pair: tuple[int, int]
    segment: np.ndarray  # (2, 2) endpoints of the shared boundary
    cuts: list[int]
    straight: bool


@dataclass
class Exists:
    elements: list[np.ndarray]
    constrained: list[tuple[int, int]]
    unconstrained: list[tuple[int, int]]
    log: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return True


@dataclass
class Obstruction:
    reason: Reason
    location: dict
    detail: str = ""

    def __bool__(self) -> bool:
        return False


def interfaces(domain: PlateDomain) -> list[Interface]:
    out = []
    for (i, j), shared in sorted(domain.adjacency().items()):
        coords = _coords(shared)
        ends = _far_ends(coords)
        straight = straightness_defect(np.vstack([ends[0], coords, ends[1]])) <= 1e-9
        out.append(Interface((i, j), ends, domain.cuts_along(shared), straight))
    return out


def _coords(geom) -> np.ndarray:
    if hasattr(geom, "geoms"):
        return np.vstack([np.asarray(g.coords) for g in geom.geoms])
    return np.asarray(geom.coords)


def _far_ends(pts: np.ndarray) -> np.ndarray:
    d = ((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1)
    i, j = np.unravel_index(np.argmax(d), d.shape)
    a, b = pts[i], pts[j]
    return np.array([a, b]) if tuple(a) <= tuple(b) else np.array([b, a])


def _candidates(S: MinimizerSet, normals_hint) -> list[np.ndarray]:
    if S.case is Case.FLAT:
        return [np.zeros((2, 2))]
    if S.case is Case.ROUND:
        out = []
        for n in list(normals_hint) + [np.array([1.0, 0.0])]:
            n = np.asarray(n, dtype=float) / np.linalg.norm(n)
            E = S.r * np.outer(n, n)
            if not any(np.abs(E - F).max() < 1e-12 for F in out):
                out.append(E)
        return out
    return S.elements()


def _normal_of(E) -> np.ndarray | None:
    w, V = np.linalg.eigh(E)
    i = int(np.argmax(np.abs(w)))
    return None if w[i] == 0 else V[:, i]


def pointwise_minimizer_exists(domain: PlateDomain, sets: list[MinimizerSet],
                               tol: float = 1e-9):
    """Decide whether piecewise-cylindrical pointwise minimizers exist.

    Every interface between pieces with different chosen elements must lie on
    a straight cut running boundary to boundary, cuts carrying such
    interfaces must not meet, and each curved side must have its ruling along
    the cut. Pieces with equal chosen elements are glued into one cylinder.
    The search enumerates the finitely many relevant element choices.
    """
    if len(sets) != domain.n_pieces or any(s is None for s in sets):
        raise ValueError("every subdomain must be classified")
    ifaces = interfaces(domain)
    nbrs = {k: [] for k in range(domain.n_pieces)}
    for f in ifaces:
        nbrs[f.pair[0]].append(f)
        nbrs[f.pair[1]].append(f)

    # ROUND pieces: useful normals are those orthogonal to adjacent cuts, and
    # neighbours' normals (for gluing)
    hints = []
    for k, S in enumerate(sets):
        h = []
        for f in nbrs[k]:
            d = f.segment[1] - f.segment[0]
            h.append(perp(d / np.linalg.norm(d)))
            other = f.pair[1] if f.pair[0] == k else f.pair[0]
            h.extend(np.asarray(n) for n in sets[other].normals)
        hints.append(h)
    cands = [_candidates(S, hints[k]) for k, S in enumerate(sets)]

    def iface_ok(f: Interface, Ei, Ej):
        """None if fine, else (reason, detail)."""
        if np.abs(Ei - Ej).max() <= tol * max(1.0, np.abs(Ei).max()):
            return None
        if not f.straight:
            return Reason.CUT_NOT_STRAIGHT
        for k in f.cuts:
            cut = domain.cuts[k]
            if straightness_defect(cut) > 1e-9:
                return Reason.CUT_NOT_STRAIGHT
            if not (domain.on_outer_boundary(cut[0]) and domain.on_outer_boundary(cut[-1])):
                return Reason.CUT_NOT_BOUNDARY_TO_BOUNDARY
        d = f.segment[1] - f.segment[0]
        for E in (Ei, Ej):
            n = _normal_of(E)
            if n is not None and not parallel(perp(n), d, 1e-9):
                return Reason.RULING_NOT_PARALLEL
        return None

    def cuts_clash(active_cuts) -> tuple[int, int] | None:
        act = sorted(active_cuts)
        for a_i, a in enumerate(act):
            for b in act[a_i + 1:]:
                la, lb = LineString(domain.cuts[a]), LineString(domain.cuts[b])
                inter = la.intersection(lb)
                if inter.is_empty:
                    continue
                pts = _coords(inter) if inter.geom_type != "Point" else np.array([inter.coords[0]])
                if hasattr(inter, "geoms") and inter.geom_type != "MultiPoint":
                    return a, b
                if any(not domain.on_outer_boundary(p) for p in pts):
                    return a, b
        return None

    best_failure = None
    order = sorted(range(domain.n_pieces))
    for choice in product(*[range(len(c)) for c in cands]):
        E = [cands[k][i] for k, i in zip(order, choice)]
        fail = None
        constrained, free = [], []
        for f in ifaces:
            i, j = f.pair
            reason = iface_ok(f, E[i], E[j])
            if reason is not None:
                fail = (reason, f)
                break
            if np.abs(E[i] - E[j]).max() <= tol * max(1.0, np.abs(E[i]).max()):
                free.append(f.pair)
            else:
                constrained.append(f)
        if fail is None:
            clash = cuts_clash({k for f in constrained for k in f.cuts})
            if clash is not None:
                fail = (Reason.CUTS_INTERSECT, clash)
        if fail is None:
            log = []
            for k, S in enumerate(sets):
                if S.case is Case.ROUND and not any(f.pair[0] == k or f.pair[1] == k
                                                    for f in constrained):
                    log.append(f"piece {k}: ROUND with no constraining cut, normal chosen freely")
            return Exists(E, [f.pair for f in constrained], free, log)
        if best_failure is None:
            best_failure = fail
    return _diagnose(domain, sets, ifaces, best_failure)


def _diagnose(domain, sets, ifaces, fail) -> Obstruction:
    reason, where = fail
    if reason is Reason.CUTS_INTERSECT:
        return Obstruction(reason, {"cuts": list(where)})
    f = where
    i, j = f.pair
    d = f.segment[1] - f.segment[0]
    if reason is Reason.RULING_NOT_PARALLEL:
        Si, Sj = sets[i], sets[j]
        # equal curvature values with no common element
        if (Si.case is not Case.FLAT and Sj.case is not Case.FLAT
                and _common_curvature(Si, Sj) and not _common_element(Si, Sj)
                and (Si.admits_ruling(d) or Sj.admits_ruling(d))):
            return Obstruction(Reason.UNSUPPORTED_EQUAL_CURVATURE, {"interface": [i, j]})
        ri, rj = Si.ruling_directions(), Sj.ruling_directions()
        if ri and rj and not any(parallel(a, b) for a in ri for b in rj):
            return Obstruction(Reason.CONFLICTING_RULINGS, {"interface": [i, j]},
                               "the neighbours admit no common ruling direction")
        if all(S.admits_ruling(d) for S in (Si, Sj)):
            # each interface is fine on its own; some piece is pulled two ways
            return Obstruction(Reason.CONFLICTING_RULINGS, {"interface": [i, j]},
                               "a piece would need rulings along two different cuts")
        return Obstruction(Reason.RULING_NOT_PARALLEL, {"interface": [i, j]})
    return Obstruction(reason, {"interface": [i, j], "cuts": f.cuts})


def _common_curvature(Si, Sj) -> bool:
    ci = {round(c, 12) for c in (Si.curvatures or (Si.r,))}
    cj = {round(c, 12) for c in (Sj.curvatures or (Sj.r,))}
    return bool(ci & cj)


def _common_element(Si, Sj) -> bool:
    if Si.case is Case.ROUND and Sj.case is Case.ROUND:
        return abs(Si.r - Sj.r) < 1e-12
    for A, B in ((Si, Sj), (Sj, Si)):
        if A.case is Case.ROUND:
            return any(abs(c - A.r) < 1e-12 for c in B.curvatures)
    return any(np.abs(E - F).max() < 1e-12 for E in Si.elements() for F in Sj.elements())


# ----------------------------------------------------------- patchworks
@dataclass
class InterfaceRecord:
    pair: tuple[int, int]
    point: np.ndarray
    rotation_block: np.ndarray
    signs: tuple[float, float] | None


@dataclass
class PiecewiseCylinder:
    domain: PlateDomain
    cylinders: list[Cylinder]
    interfaces: list[InterfaceRecord] = field(default_factory=list)

    @property
    def scale(self) -> float:
        return self.cylinders[0].scale

    def piece_of(self, x) -> np.ndarray:
        idx = self.domain.locate(x)
        if np.any(idx < 0):
            raise ValueError("points on a cut or outside the plate")
        return idx

    def _dispatch(self, fn, x, piece):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        idx = np.full(len(x), piece) if piece is not None else self.piece_of(x)
        out = None
        for k in np.unique(idx):
            m = idx == k
            val = fn(self.cylinders[k], x[m])
            if out is None:
                out = np.empty((len(x),) + val.shape[1:])
            out[m] = val
        return out

    def value(self, x, piece: int | None = None) -> np.ndarray:
        return self._dispatch(cyl_eval, x, piece)

    def gradient(self, x, piece: int | None = None) -> np.ndarray:
        return self._dispatch(cyl_gradient, x, piece)

    def normal(self, x, piece: int | None = None) -> np.ndarray:
        return self._dispatch(cyl_normal, x, piece)

    def curvature(self, x, piece: int | None = None) -> np.ndarray:
        def f(c, pts):
            return np.broadcast_to(second_fundamental_form(c), (len(pts), 2, 2)).copy()
        return self._dispatch(f, x, piece)

    def piece_curvatures(self) -> list[np.ndarray]:
        return [second_fundamental_form(c) for c in self.cylinders]

    def with_motion(self, R, v) -> "PiecewiseCylinder":
        return PiecewiseCylinder(self.domain, [c.with_motion(R, v) for c in self.cylinders],
                                 self.interfaces)

    def rescaled(self, factor: float) -> "PiecewiseCylinder":
        """The surface factor * y (radii and translations scale, shapes kept)."""
        cyl = [Cylinder(c.r, c.R, factor * c.v, c.rho, factor * c.scale) for c in self.cylinders]
        return PiecewiseCylinder(self.domain, cyl, self.interfaces)

    def max_cut_jump(self, n: int = N_CUT_SAMPLES) -> float:
        worst = 0.0
        for f in interfaces(self.domain):
            i, j = f.pair
            dy, dg = cut_jumps(self.cylinders[i], self.cylinders[j], f.segment, n)
            worst = max(worst, dy, dg)
        return worst

    def isometry_defect(self, n: int = 16) -> float:
        from .quadrature import gauss_polygon

        worst = 0.0
        for k, poly in enumerate(self.domain.pieces):
            pts, _ = gauss_polygon(poly, min(n, 6))
            g = cyl_gradient(self.cylinders[k], pts)
            metric = np.einsum("kia,kib->kab", g, g)
            worst = max(worst, float(np.abs(metric - self.scale**2 * np.eye(2)).max()))
        return worst


class ConstructionError(RuntimeError):
    pass


def construct_patchwork(domain: PlateDomain, elements, scale: float = 1.0) -> PiecewiseCylinder:
    """Assemble cylinders piece by piece across the adjacency graph.

    Piece 0 keeps the identity motion; each further piece is glued to an
    already placed neighbour at the lexicographically smaller end of their
    shared boundary. Every interface (including those closing cycles) is
    verified afterwards.
    """
    shapes = [cylinder_for_element(E, scale) for E in elements]
    if len(shapes) != domain.n_pieces:
        raise ValueError("need one element per subdomain")
    ifaces = interfaces(domain)
    placed: dict[int, Cylinder] = {0: shapes[0]}
    records = []
    frontier = [0]
    while frontier:
        i = frontier.pop(0)
        for f in ifaces:
            if i not in f.pair:
                continue
            j = f.pair[1] if f.pair[0] == i else f.pair[0]
            if j in placed:
                continue
            p = f.segment[0]
            placed[j] = glue(placed[i], shapes[j], p)
            _, M = interface_rotation(placed[i], placed[j], p)
            signs = (float(M[0, 0]), float(M[1, 1])) if abs(M[0, 1]) < 1e-12 else None
            records.append(InterfaceRecord((i, j), p, block(M), signs))
            frontier.append(j)
    if len(placed) != domain.n_pieces:
        raise ConstructionError("subdivision graph is disconnected")
    surf = PiecewiseCylinder(domain, [placed[k] for k in range(domain.n_pieces)], records)
    for f in ifaces:
        i, j = f.pair
        dy, dg = cut_jumps(surf.cylinders[i], surf.cylinders[j], f.segment)
        if max(dy, dg) > JUMP_TOL * max(1.0, domain.diameter):
            raise ConstructionError(f"interface {f.pair} fails to match (jump {max(dy, dg):.3e})")
    return surf
