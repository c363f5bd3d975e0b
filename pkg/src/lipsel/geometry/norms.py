"""Polyhedral norms given by a centrally symmetric unit-ball polytope."""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from typing import Optional, Sequence

from .polytope import GeometryError, Polytope, hull


class PolyhedralNorm:
    """Norm whose unit ball is ``ball``.

    ``rows`` holds the facet normals divided by their offsets, so that
    ``gauge(v) = max(row . v)``. ``kind`` records how the norm was named
    (``linf``, ``l1`` or ``ball_vrep``) for serialization.
    """

    __slots__ = ("ball", "rows", "kind", "dim")

    def __init__(self, ball: Polytope, kind: str = "ball_vrep"):
        if ball.affine_dim != ball.dim:
            raise GeometryError("unit ball must be full-dimensional")
        verts = set(ball.vertices)
        if any(tuple(-c for c in v) not in verts for v in verts):
            raise GeometryError("unit ball must be centrally symmetric")
        # symmetric and full-dimensional => origin is interior, every offset > 0
        self.ball = ball
        self.rows = tuple(tuple(c / b for c in a) for a, b in ball.facets)
        self.kind = kind
        self.dim = ball.dim

    def gauge(self, v: Sequence) -> Fraction:
        best = Fraction(0)
        for r in self.rows:
            s = sum((x * y for x, y in zip(r, v)), Fraction(0))
            if s > best:
                best = s
        return best

    __call__ = gauge

    def dual(self, e: Sequence) -> Fraction:
        """Dual norm: the support function of the ball at ``e``."""
        return self.ball.support(e)

    def __eq__(self, other) -> bool:
        return isinstance(other, PolyhedralNorm) and self.ball == other.ball

    def __hash__(self) -> int:
        return hash(self.ball)

    def __repr__(self) -> str:
        return f"PolyhedralNorm({self.kind}, d={self.dim})"


def linf(d: int) -> PolyhedralNorm:
    return PolyhedralNorm(hull(product((-1, 1), repeat=d)), "linf")


def l1(d: int) -> PolyhedralNorm:
    pts = []
    for i in range(d):
        for s in (-1, 1):
            e = [0] * d
            e[i] = s
            pts.append(e)
    return PolyhedralNorm(hull(pts), "l1")


def ball_vrep(vertices: Sequence[Sequence]) -> PolyhedralNorm:
    """Norm from unit-ball vertices; the list must be closed under negation."""
    return PolyhedralNorm(hull(vertices), "ball_vrep")


def named_norm(kind: str, d: int, vertices: Optional[Sequence] = None) -> PolyhedralNorm:
    if kind == "linf":
        return linf(d)
    if kind == "l1":
        return l1(d)
    if kind == "ball_vrep":
        if vertices is None:
            raise GeometryError("ball_vrep needs vertices")
        norm = ball_vrep(vertices)
        if norm.dim != d:
            raise GeometryError("ball dimension does not match")
        return norm
    raise GeometryError(f"unknown norm kind {kind!r}")
