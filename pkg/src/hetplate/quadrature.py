"""Gauss-Legendre rules on intervals, triangles and polygons."""
from __future__ import annotations

from functools import lru_cache

import numpy as np
import shapely


@lru_cache(maxsize=64)
def _leggauss(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_interval(a: float, b: float, n: int = 16):
    """Nodes and weights of the n-point rule on [a, b]."""
    x, w = _leggauss(n)
    half = 0.5 * (b - a)
    return 0.5 * (a + b) + half * x, half * w


def composite_gauss(breaks, n: int = 16):
    """Concatenated n-point rules over consecutive breakpoint intervals."""
    breaks = np.asarray(breaks, dtype=float)
    nodes, weights = [], []
    for a, b in zip(breaks[:-1], breaks[1:]):
        if b <= a:
            continue
        x, w = gauss_interval(a, b, n)
        nodes.append(x)
        weights.append(w)
    return np.concatenate(nodes), np.concatenate(weights)


def gauss_triangle(vertices, n: int = 16):
    """Collapsed (Duffy) tensor-product rule on a triangle.

    Exact for polynomials of total degree <= 2n - 2.
    """
    P = np.asarray(vertices, dtype=float)
    u, wu = gauss_interval(0.0, 1.0, n)
    U, V = np.meshgrid(u, u, indexing="ij")
    W = np.outer(wu, wu) * (1.0 - U)
    # (u, v) in the unit square -> (s, t) = (u, v (1 - u)) in the reference triangle
    s, t = U.ravel(), (V * (1.0 - U)).ravel()
    pts = P[0] + np.outer(s, P[1] - P[0]) + np.outer(t, P[2] - P[0])
    e1, e2 = P[1] - P[0], P[2] - P[0]
    jac = abs(e1[0] * e2[1] - e1[1] * e2[0])
    return pts, W.ravel() * jac


def triangulate(polygon):
    """Constrained triangulation of a shapely polygon, as an array (k, 3, 2)."""
    tris = shapely.constrained_delaunay_triangles(polygon)
    out = [np.asarray(t.exterior.coords)[:3] for t in tris.geoms]
    return np.array(out)


def gauss_polygon(polygon, n: int = 16):
    """Tensor-product Gauss nodes over a polygon, one collapsed rule per triangle."""
    pts, wts = [], []
    for tri in triangulate(polygon):
        p, w = gauss_triangle(tri, n)
        pts.append(p)
        wts.append(w)
    return np.concatenate(pts), np.concatenate(wts)


def pairwise_sum(values) -> float:
    """Partition-independent sum (math.fsum is exactly rounded)."""
    import math

    return math.fsum(np.asarray(values, dtype=float).ravel())
