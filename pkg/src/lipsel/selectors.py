"""Point-valued selectors on convex bodies.

The rectangle selector, the parallel-body centroid and the regularity
coefficient are exact; the Steiner point of a polygon is evaluated in binary64
by angular quadrature, the one floating-point routine in the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .geometry.norms import PolyhedralNorm
from .geometry.ops import add_ball, centroid, diameter, intersect, kolmogorov_width, relative_volume
from .geometry.polytope import DimensionError, GeometryError, Polytope, from_halfspaces, is_empty
from .geometry.ops import ball as norm_ball
from .lp import linprog
from .rational import dot, sub, to_fraction

MIN_NODES = 64
DEFAULT_NODES = 4096


@dataclass(frozen=True)
class SelectorReport:
    point: tuple
    inside: bool
    method: str


def rect_selector_linf2(P: Polytope) -> tuple:
    """Center of the axis-parallel bounding rectangle of a planar polytope."""
    if P.dim != 2:
        raise DimensionError("the rectangle selector lives in the plane")
    xs = [v[0] for v in P.vertices]
    ys = [v[1] for v in P.vertices]
    return ((min(xs) + max(xs)) / 2, (min(ys) + max(ys)) / 2)


def parallel_body_centroid(P: Polytope, norm: PolyhedralNorm) -> SelectorReport:
    """Barycenter of P + diam(P) B, with diam taken in the norm."""
    if P.dim != norm.dim:
        raise DimensionError("body and norm live in different spaces")
    if P.affine_dim > 2:
        raise DimensionError("parallel-body centroid supports affine dimension <= 2")
    t = diameter(P, norm)
    if t == 0:
        p = P.vertices[0]
        return SelectorReport(p, True, "parallel_body_centroid")
    body = add_ball(P, norm, t)
    c = centroid(body)
    return SelectorReport(c, P.contains(c), "parallel_body_centroid")


def steiner_point_polygon(P: Polytope, n: int = DEFAULT_NODES) -> tuple:
    """Steiner point 2 * mean_k h(u_k) u_k over n equally spaced unit directions.

    Quadrature error is O(1/n^2) for polygons.
    """
    if P.dim != 2:
        raise DimensionError("Steiner point is implemented for planar bodies")
    if n < MIN_NODES:
        raise ValueError(f"need at least {MIN_NODES} quadrature nodes")
    if P.affine_dim == 0:
        return tuple(float(c) for c in P.vertices[0])
    verts = [(float(v[0]), float(v[1])) for v in P.vertices]
    sx = sy = 0.0
    for k in range(n):
        ang = 2.0 * math.pi * k / n
        ux, uy = math.cos(ang), math.sin(ang)
        h = max(x * ux + y * uy for x, y in verts)
        sx += h * ux
        sy += h * uy
    return (2.0 * sx / n, 2.0 * sy / n)


def steiner_point_exact_weights(P: Polytope) -> tuple:
    """Closed form for polygons: vertices weighted by exterior angle / 2 pi (binary64)."""
    if P.affine_dim == 0:
        return tuple(float(c) for c in P.vertices[0])
    from .geometry.ops import _ring

    pts = [(float(v[0]), float(v[1])) for v in P.vertices]
    if P.affine_dim == 1:
        a, b = pts[0], pts[-1]
        return ((a[0] + b[0]) / 2, (a[1] + b[1]) / 2)
    ring = [pts[i] for i in _ring(P.vertices)]
    m = len(ring)
    sx = sy = 0.0
    for i in range(m):
        p0, p1, p2 = ring[i - 1], ring[i], ring[(i + 1) % m]
        a1 = math.atan2(p1[1] - p0[1], p1[0] - p0[0])
        a2 = math.atan2(p2[1] - p1[1], p2[0] - p1[0])
        turn = (a2 - a1) % (2 * math.pi)
        sx += p1[0] * turn
        sy += p1[1] * turn
    return (sx / (2 * math.pi), sy / (2 * math.pi))


def _flat_chebyshev(P: Polytope, norm: PolyhedralNorm):
    # min t over centers c = v0 + sum s_j w_j in the affine span of P
    v0 = P.vertices[0]
    spans = [sub(v, v0) for v in P.vertices[1:]]
    basis = _span_basis(spans, P.dim)
    k = len(basis)
    A, b = [], []
    for v in P.vertices:
        for g in norm.rows:
            # g.(v - v0 - sum s_j w_j) <= t
            A.append([-dot(g, w) for w in basis] + [-1])
            b.append(-dot(g, sub(v, v0)))
    res = linprog([0] * k + [1], A, b, lower=[None] * k + [0])
    if not res.ok:
        raise GeometryError("center LP failed")
    c = tuple(v0[i] + sum((res.x[j] * basis[j][i] for j in range(k)), Fraction(0)) for i in range(P.dim))
    return res.value, c


def _span_basis(vectors, d):
    from .geometry.linalg import rref

    rows, _ = rref([list(v) for v in vectors])
    return [tuple(r) for r in rows if any(r)]


def regularity_coefficient(P: Polytope, norm: PolyhedralNorm) -> Optional[Fraction]:
    """Measure of (smallest centered ball) within the affine span of P, over the measure of P.

    Returns ``None`` for a single point, where the ratio is undefined.
    """
    k = P.affine_dim
    if k == 0:
        return None
    if k > 2:
        raise DimensionError("regularity coefficient supports affine dimension 1 or 2")
    t, c = _flat_chebyshev(P, norm)
    B = norm_ball(c, t, norm)
    hs = list(B.halfspaces)
    for a, off in P.equalities:
        hs.append((a, off))
        hs.append((tuple(-x for x in a), -off))
    S = from_halfspaces(hs, P.dim)
    return relative_volume(S, P) / relative_volume(P)


def truncate(P: Polytope, center: Sequence, gamma, m: int, norm: PolyhedralNorm):
    """P intersected with the ball B(center, gamma * w) where w is the best known m-width bound."""
    _, w = kolmogorov_width(P, m, norm)
    out = intersect(P, norm_ball(center, to_fraction(gamma) * w, norm))
    return None if is_empty(out) else out
