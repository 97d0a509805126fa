"""Scenario files, deterministic reports and OBJ meshes."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema
import numpy as np

from .quadforms import IsotropicModuli
from .quadrature import triangulate
from .strain import (PiecewiseConstantProfile, PlateDomain, PolynomialProfile,
                     ScaledProfile, StrainField)

SCHEMA_VERSION = 1

_num = {"type": "number"}
_point = {"type": "array", "items": _num, "minItems": 2, "maxItems": 2}
_row2 = {"type": "array", "items": _num, "minItems": 2, "maxItems": 2}
_row3 = {"type": "array", "items": _num, "minItems": 3, "maxItems": 3}
_matrix = {"oneOf": [
    {"type": "array", "items": _row2, "minItems": 2, "maxItems": 2},
    {"type": "array", "items": _row3, "minItems": 3, "maxItems": 3},
]}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["version", "name"],
    "additionalProperties": False,
    "properties": {
        "version": {"const": SCHEMA_VERSION},
        "name": {"type": "string"},
        "description": {"type": "string"},
        "thickness_ratio": {"type": "number", "exclusiveMinimum": 0},
        "domain": {
            "type": "object",
            "required": ["rect"],
            "additionalProperties": False,
            "properties": {
                "rect": {"type": "array", "items": _num, "minItems": 4, "maxItems": 4},
                "cuts": {"type": "array", "items": {"type": "array", "items": _point, "minItems": 2}},
                "keep": {"type": "array", "items": {"oneOf": [_point, {"type": "null"}]}},
            },
        },
        "profiles": {
            "type": "array",
            "minItems": 1,
            "items": {"oneOf": [
                {"type": "object", "additionalProperties": False,
                 "required": ["type", "coeffs"],
                 "properties": {"type": {"const": "polynomial"},
                                "coeffs": {"type": "array", "items": _matrix, "minItems": 1}}},
                {"type": "object", "additionalProperties": False,
                 "required": ["type", "breaks", "values"],
                 "properties": {"type": {"const": "piecewise"},
                                "breaks": {"type": "array", "items": _num, "minItems": 2},
                                "values": {"type": "array", "items": _matrix, "minItems": 1}}},
                {"type": "object", "additionalProperties": False,
                 "required": ["type", "g", "matrix"],
                 "properties": {"type": {"const": "scaled"},
                                "g": {"type": "array", "items": _num, "minItems": 1},
                                "matrix": _matrix,
                                "breaks": {"type": "array", "items": _num, "minItems": 2}}},
            ]},
        },
        "moduli": {
            "type": "object",
            "required": ["mu", "lambda"],
            "additionalProperties": False,
            "properties": {"mu": {"type": "number", "exclusiveMinimum": 0}, "lambda": _num},
        },
        "analysis": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "grid": {"type": "integer", "minimum": 4},
                "quad_order": {"type": "integer", "minimum": 1, "maximum": 64},
                "thickness_order": {"type": "integer", "minimum": 1, "maximum": 64},
                "h_ladder": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0},
                             "minItems": 1},
                "density": {"enum": ["distance", "stvenant"]},
                "obj_resolution": {"type": "integer", "minimum": 1},
                "surface": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["kind"],
                    "properties": {"kind": {"enum": ["minimizer", "elements"]},
                                   "elements": {"type": "array", "items": _matrix}},
                },
            },
        },
        "gel": {
            "type": "object",
            "additionalProperties": False,
            "required": ["v", "Nbar", "chi", "delta", "d", "ell", "g1", "g2"],
            "properties": {
                "v": {"type": "number", "exclusiveMinimum": 0},
                "Nbar": {"type": "number", "exclusiveMinimum": 0},
                "chi": {"type": "number", "exclusiveMinimum": 0, "maximum": 0.5},
                "delta": {"type": "number", "minimum": 0},
                "d": {"type": "number", "exclusiveMinimum": 0},
                "ell": {"type": "number", "exclusiveMinimum": 0},
                "g1": {"type": "array", "items": _num, "minItems": 1},
                "g2": {"type": "array", "items": _num, "minItems": 1},
            },
        },
    },
}

DEFAULT_ANALYSIS = {
    "grid": 64,
    "quad_order": 16,
    "thickness_order": 8,
    "h_ladder": [1 / 10, 1 / 20, 1 / 40, 1 / 80, 1 / 160],
    "density": "distance",
    "obj_resolution": 128,
    "surface": {"kind": "minimizer"},
}


class ScenarioError(ValueError):
    pass


@dataclass
class Scenario:
    name: str
    raw: dict
    domain: PlateDomain | None
    field: StrainField | None
    moduli: IsotropicModuli | None
    analysis: dict = field(default_factory=dict)
    gel: dict | None = None


def _line_of(text: str, path) -> int | None:
    """Best-effort line number of the last key in a JSON path."""
    keys = [p for p in path if isinstance(p, str)]
    if not keys:
        return None
    needle = json.dumps(keys[-1]) + ":"
    pos = text.find(needle)
    if pos < 0:
        needle = json.dumps(keys[-1])
        pos = text.find(needle)
    return text.count("\n", 0, pos) + 1 if pos >= 0 else None


def profile_from_entry(entry: dict):
    kind = entry["type"]
    if kind == "polynomial":
        return PolynomialProfile(entry["coeffs"])
    if kind == "piecewise":
        return PiecewiseConstantProfile(entry["breaks"], entry["values"])
    return ScaledProfile(entry["g"], entry["matrix"], entry.get("breaks"))


def parse_scenario(text: str, source: str = "<config>") -> Scenario:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{source}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from exc
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(raw), key=lambda e: list(map(str, e.path)))
    if errors:
        e = errors[0]
        where = "/".join(map(str, e.path)) or "<root>"
        line = _line_of(text, list(e.path))
        loc = f"{source}:{line}" if line else source
        raise ScenarioError(f"{loc}: schema error at {where}: {e.message}")
    analysis = dict(DEFAULT_ANALYSIS)
    analysis.update(raw.get("analysis", {}))
    try:
        domain = None
        if "domain" in raw:
            dom = raw["domain"]
            domain = PlateDomain(tuple(dom["rect"]), dom.get("cuts", []), dom.get("keep"))
        field_ = None
        if "profiles" in raw:
            if domain is None:
                raise ValueError("'profiles' need a 'domain'")
            field_ = StrainField(domain, [profile_from_entry(p) for p in raw["profiles"]])
        moduli = None
        if "moduli" in raw:
            moduli = IsotropicModuli(raw["moduli"]["mu"], raw["moduli"]["lambda"])
    except ValueError as exc:
        raise ScenarioError(f"{source}: {exc}") from exc
    if field_ is None and "gel" not in raw:
        raise ScenarioError(f"{source}: scenario needs either 'profiles' or 'gel'")
    return Scenario(raw["name"], raw, domain, field_, moduli, analysis, raw.get("gel"))


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(f"{path}: cannot read: {exc.strerror}") from exc
    return parse_scenario(text, str(path))


# ---------------------------------------------------------------- reports
def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    s = "%.17g" % x
    if s == "-0":
        s = "0"
    return s


def to_plain(obj):
    """Convert numpy values, tuples and dataclass-like objects to JSON types."""
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_plain(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if obj is None or isinstance(obj, str):
        return obj
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """JSON with sorted keys and 17-significant-digit floats."""

    def enc(o, level):
        pad = " " * (indent * (level + 1))
        end = " " * (indent * level)
        if isinstance(o, dict):
            if not o:
                return "{}"
            items = [f"{pad}{json.dumps(k)}: {enc(o[k], level + 1)}" for k in sorted(o)]
            return "{\n" + ",\n".join(items) + "\n" + end + "}"
        if isinstance(o, list):
            if not o:
                return "[]"
            if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in o):
                return "[" + ", ".join(enc(v, level + 1) for v in o) + "]"
            return "[\n" + ",\n".join(pad + enc(v, level + 1) for v in o) + "\n" + end + "]"
        if isinstance(o, bool) or o is None:
            return json.dumps(o)
        if isinstance(o, float):
            return _fmt_float(o)
        return json.dumps(o)

    return enc(to_plain(obj), 0) + "\n"


def write_report(obj, path) -> None:
    Path(path).write_text(dumps(obj))


# -------------------------------------------------------------------- OBJ
def _subdivide(tri: np.ndarray, m: int):
    """Uniform split of a triangle into m^2 triangles: (points, faces)."""
    pts, index = [], {}
    for i in range(m + 1):
        for j in range(m + 1 - i):
            index[(i, j)] = len(pts)
            pts.append(tri[0] + (tri[1] - tri[0]) * i / m + (tri[2] - tri[0]) * j / m)
    faces = []
    for i in range(m):
        for j in range(m - i):
            faces.append((index[(i, j)], index[(i + 1, j)], index[(i, j + 1)]))
            if i + j < m - 1:
                faces.append((index[(i + 1, j)], index[(i + 1, j + 1)], index[(i, j + 1)]))
    return np.array(pts), np.array(faces)


def tessellate(polygon, resolution: int):
    """Reference-plane mesh of a polygon with shared vertices."""
    bbox = np.ptp(np.asarray(polygon.exterior.coords), axis=0).max()
    pts_all, faces_all, lookup = [], [], {}
    for tri in triangulate(polygon):
        edge = max(np.linalg.norm(tri[1] - tri[0]), np.linalg.norm(tri[2] - tri[0]),
                   np.linalg.norm(tri[2] - tri[1]))
        m = max(1, int(math.ceil(resolution * edge / bbox)))
        pts, faces = _subdivide(tri, m)
        ids = []
        for p in pts:
            key = (round(p[0], 12), round(p[1], 12))
            if key not in lookup:
                lookup[key] = len(pts_all)
                pts_all.append(p)
            ids.append(lookup[key])
        ids = np.array(ids)
        for f in faces:
            a, b, c = ids[f]
            # keep counter-clockwise orientation in the reference plane
            pa, pb, pc = pts_all[a], pts_all[b], pts_all[c]
            u, w = pb - pa, pc - pa
            if u[0] * w[1] - u[1] * w[0] < 0:
                b, c = c, b
            faces_all.append((a, b, c))
    return np.array(pts_all), np.array(faces_all)


def export_obj(surface, path, resolution: int = 128, header: str = "") -> dict:
    """Write a piecewise surface as OBJ with one group/material per piece.

    ``vt`` records reference coordinates so the mesh can be re-measured.
    """
    lines = []
    if header:
        lines += [f"# {h}" for h in header.splitlines()]
    offset = 0
    counts = {}
    for k, poly in enumerate(surface.domain.pieces):
        ref, faces = tessellate(poly, resolution)
        # evaluate with the piece's own formula (boundary points included)
        xyz = surface.value(ref, piece=k)
        lines.append(f"g piece_{k}")
        lines.append(f"usemtl piece_{k}")
        lines += ["v %s %s %s" % tuple(_fmt_float(float(c)) for c in p) for p in xyz]
        lines += ["vt %s %s" % tuple(_fmt_float(float(c)) for c in p) for p in ref]
        for a, b, c in faces + offset + 1:
            lines.append(f"f {a}/{a} {b}/{b} {c}/{c}")
        offset += len(ref)
        counts[f"piece_{k}"] = {"vertices": len(ref), "faces": len(faces)}
    Path(path).write_text("\n".join(lines) + "\n")
    return counts


@dataclass
class MeshGroup:
    xyz: np.ndarray
    uv: np.ndarray
    faces: np.ndarray


def import_obj(path) -> dict[str, MeshGroup]:
    groups, v, vt = {}, [], []
    current = None
    for line in Path(path).read_text().splitlines():
        if not line or line.startswith("#"):
            continue
        tag, *rest = line.split()
        if tag == "g":
            current = rest[0]
            groups[current] = []
        elif tag == "v":
            v.append([float(s) for s in rest])
        elif tag == "vt":
            vt.append([float(s) for s in rest])
        elif tag == "f":
            groups[current].append([int(s.split("/")[0]) - 1 for s in rest])
    v, vt = np.array(v), np.array(vt)
    out = {}
    for name, faces in groups.items():
        faces = np.array(faces)
        used = np.unique(faces)
        remap = np.full(len(v), -1)
        remap[used] = np.arange(len(used))
        out[name] = MeshGroup(v[used], vt[used], remap[faces])
    return out


def measure_curvature(mesh: MeshGroup) -> np.ndarray:
    """Least-squares curvature tensor of a mesh piece.

    At every vertex p with two neighbours at reference offsets +d and -d,
    nu_p . (y(p + d) + y(p - d) - 2 y(p)) = -d^T A d + O(|d|^4). The vertex
    normal nu_p (mean of adjacent face normals) only enters through the
    second difference, so its own O(|d|) error does not pollute A.
    """
    P, U, F = mesh.xyz, mesh.uv, mesh.faces
    n = np.cross(P[F[:, 1]] - P[F[:, 0]], P[F[:, 2]] - P[F[:, 0]])
    n /= np.linalg.norm(n, axis=1, keepdims=True)
    vn = np.zeros_like(P)
    for c in range(3):
        np.add.at(vn, F[:, c], n)
    vn /= np.linalg.norm(vn, axis=1, keepdims=True)

    scale = np.ptp(U, axis=0).max()
    key = {(round(u[0] / scale, 9), round(u[1] / scale, 9)): i for i, u in enumerate(U)}
    E = np.concatenate([F[:, [0, 1]], F[:, [1, 2]], F[:, [2, 0]]])
    E = np.unique(np.sort(E, axis=1), axis=0)
    rows, rhs = [], []
    for a, b in np.concatenate([E, E[:, ::-1]]):
        d = U[b] - U[a]
        q = U[a] - d
        c = key.get((round(q[0] / scale, 9), round(q[1] / scale, 9)))
        if c is None or c < b:  # missing, or pair already counted from the other side
            continue
        s = P[b] + P[c] - 2 * P[a]
        rows.append((d[0] ** 2, 2 * d[0] * d[1], d[1] ** 2))
        rhs.append(-np.dot(vn[a], s))
    if len(rows) < 3:
        raise ValueError("mesh too coarse to measure curvature")
    sol, *_ = np.linalg.lstsq(np.array(rows), np.array(rhs), rcond=None)
    return np.array([[sol[0], sol[1]], [sol[1], sol[2]]])
