"""Bounded convex polytopes in Q^d (d <= 4) with both representations.

A :class:`Polytope` stores its vertex list and its halfspace list in a
canonical form: vertices sorted lexicographically, facet normals scaled to
primitive integer vectors. Lower-dimensional polytopes additionally carry the
equations of their affine hull; facet normals are written in the coordinates
that parameterize that hull (the pivot columns of the reduced direction
space), so the representation is unique and equality is structural.

The empty set is the sentinel :data:`EMPTY`, never a ``Polytope``.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import gcd
from typing import Iterable, List, Optional, Sequence, Tuple

from ..lp import INFEASIBLE, UNBOUNDED, linprog
from ..rational import dot, primitive, sub, to_fraction
from .linalg import det, nullspace, rref

MAX_DIM = 4


class GeometryError(ValueError):
    pass


class UnboundedError(GeometryError):
    pass


class DimensionError(GeometryError):
    pass


class _Empty:
    __slots__ = ()

    def __repr__(self) -> str:
        return "EMPTY"

    def __bool__(self) -> bool:
        return False

    def __reduce__(self):
        return "EMPTY"


EMPTY = _Empty()


def is_empty(p) -> bool:
    return p is EMPTY


Halfspace = Tuple[tuple, Fraction]


class Polytope:
    """Nonempty bounded convex polytope with canonical vertex/halfspace data."""

    __slots__ = ("vertices", "facets", "equalities", "dim", "_pivots", "_frame")

    def __init__(self, vertices, facets, equalities, dim, pivots, frame):
        self.vertices: Tuple[tuple, ...] = vertices
        self.facets: Tuple[Halfspace, ...] = facets
        self.equalities: Tuple[Halfspace, ...] = equalities
        self.dim: int = dim
        self._pivots: Tuple[int, ...] = pivots
        self._frame = frame

    # representation -------------------------------------------------
    @property
    def halfspaces(self) -> Tuple[Halfspace, ...]:
        """All inequalities ``a.x <= b``; each affine-hull equation appears as a +/- pair."""
        hs = list(self.facets)
        for a, b in self.equalities:
            hs.append((a, b))
            hs.append((tuple(-v for v in a), -b))
        return tuple(sorted(hs))

    @property
    def affine_dim(self) -> int:
        return len(self._pivots)

    @property
    def pivots(self) -> Tuple[int, ...]:
        """Coordinates that parameterize the affine hull."""
        return self._pivots

    def lift(self, local: Sequence) -> tuple:
        """Map pivot coordinates back to the point of the affine hull."""
        x0, rows = self._frame
        out = list(x0)
        for i, p in enumerate(self._pivots):
            t = Fraction(local[i]) - x0[p]
            if t:
                for j, v in enumerate(rows[i]):
                    if v:
                        out[j] += t * v
        return tuple(out)

    def local(self, x: Sequence) -> tuple:
        return tuple(Fraction(x[p]) for p in self._pivots)

    # queries --------------------------------------------------------
    def contains(self, x: Sequence) -> bool:
        x = tuple(to_fraction(v) for v in x)
        for a, b in self.equalities:
            if dot(a, x) != b:
                return False
        return all(dot(a, x) <= b for a, b in self.facets)

    def support(self, a: Sequence) -> Fraction:
        return max(dot(a, v) for v in self.vertices)

    def is_point(self) -> bool:
        return len(self.vertices) == 1

    def translate(self, t: Sequence) -> "Polytope":
        t = tuple(to_fraction(v) for v in t)
        return hull(tuple(a + b for a, b in zip(v, t)) for v in self.vertices)

    def dilate(self, s) -> "Polytope":
        s = to_fraction(s)
        return hull(tuple(s * a for a in v) for v in self.vertices)

    # identity -------------------------------------------------------
    def __eq__(self, other) -> bool:
        return isinstance(other, Polytope) and self.vertices == other.vertices

    def __hash__(self) -> int:
        return hash(self.vertices)

    def __repr__(self) -> str:
        vs = ", ".join("(" + ", ".join(str(c) for c in v) + ")" for v in self.vertices)
        return f"Polytope[{vs}]"


# ---------------------------------------------------------------------------
# hull


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def _prim_int(v: Sequence[int]) -> tuple:
    g = 0
    for c in v:
        g = gcd(g, c)
    if g <= 1:
        return tuple(v)
    return tuple(c // g for c in v)


def _idot(a, b) -> int:
    s = 0
    for x, y in zip(a, b):
        s += x * y
    return s


def _normal(rows: List[tuple], k: int) -> tuple:
    # generalized cross product of k-1 vectors in Z^k
    out = []
    for i in range(k):
        minor = [r[:i] + r[i + 1:] for r in rows]
        d = det(minor)
        out.append(d if i % 2 == 0 else -d)
    return tuple(out)


def _hull_1d(ip):
    vals = [p[0] for p in ip]
    lo, hi = min(vals), max(vals)
    verts = sorted({vals.index(lo), vals.index(hi)})
    return verts, [((1,), hi), ((-1,), -lo)]


def _hull_2d(ip):
    idx = sorted(range(len(ip)), key=lambda i: ip[i])

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: List[int] = []
    for i in idx:
        while len(lower) >= 2 and cross(ip[lower[-2]], ip[lower[-1]], ip[i]) <= 0:
            lower.pop()
        lower.append(i)
    upper: List[int] = []
    for i in reversed(idx):
        while len(upper) >= 2 and cross(ip[upper[-2]], ip[upper[-1]], ip[i]) <= 0:
            upper.pop()
        upper.append(i)
    ring = lower[:-1] + upper[:-1]
    facets = []
    for a, b in zip(ring, ring[1:] + ring[:1]):
        p, q = ip[a], ip[b]
        nrm = _prim_int((q[1] - p[1], p[0] - q[0]))
        facets.append((nrm, _idot(nrm, p)))
    return sorted(ring), facets


def _hull_brute(ip, k):
    n = len(ip)
    found = {}
    for combo in combinations(range(n), k):
        base = ip[combo[0]]
        rows = [tuple(c - b for c, b in zip(ip[j], base)) for j in combo[1:]]
        nrm = _normal(rows, k)
        if not any(nrm):
            continue
        nrm = _prim_int(nrm)
        b = _idot(nrm, base)
        neg = tuple(-c for c in nrm)
        if (nrm, b) in found or (neg, -b) in found:
            continue
        vals = [_idot(nrm, p) for p in ip]
        if max(vals) == b:
            found[(nrm, b)] = True
        elif min(vals) == b:
            found[(neg, -b)] = True
    facets = list(found)
    verts = []
    for i, p in enumerate(ip):
        active = [a for a, b in facets if _idot(a, p) == b]
        if len(active) >= k and len(rref(active)[1]) == k:
            verts.append(i)
    return verts, facets


def hull(points: Iterable[Sequence]) -> Polytope:
    """Convex hull of a finite nonempty point set."""
    pts = sorted({tuple(to_fraction(c) for c in p) for p in points})
    if not pts:
        raise GeometryError("hull of an empty point set")
    d = len(pts[0])
    if any(len(p) != d for p in pts):
        raise GeometryError("points of mixed dimension")
    if d > MAX_DIM:
        raise DimensionError(f"ambient dimension {d} exceeds {MAX_DIM}")
    x0 = pts[0]
    rows, piv = rref([sub(p, x0) for p in pts[1:]]) if len(pts) > 1 else ([], [])
    k = len(piv)
    frame = (x0, tuple(tuple(r) for r in rows))

    equalities = []
    for j in range(d):
        if j in piv:
            continue
        a = [Fraction(0)] * d
        a[j] = Fraction(1)
        for i, p in enumerate(piv):
            a[p] -= rows[i][j]
        a = primitive(a)
        equalities.append((a, dot(a, x0)))
    equalities.sort()

    if k == 0:
        return Polytope((x0,), (), tuple(equalities), d, (), frame)

    proj = [tuple(p[j] for j in piv) for p in pts]
    den = 1
    for p in proj:
        for c in p:
            den = _lcm(den, c.denominator)
    ip = [tuple(int(c * den) for c in p) for p in proj]
    if k == 1:
        vidx, ifacets = _hull_1d(ip)
    elif k == 2:
        vidx, ifacets = _hull_2d(ip)
    else:
        vidx, ifacets = _hull_brute(ip, k)

    facets = []
    for nrm, b in ifacets:
        a = [Fraction(0)] * d
        for i, p in enumerate(piv):
            a[p] = Fraction(nrm[i])
        facets.append((tuple(a), Fraction(b, den)))
    facets.sort()
    verts = tuple(sorted(pts[i] for i in vidx))
    return Polytope(verts, tuple(facets), tuple(equalities), d, tuple(piv), frame)


def point(p: Sequence) -> Polytope:
    return hull([p])


def box(lo: Sequence, hi: Sequence) -> Polytope:
    lo = [to_fraction(v) for v in lo]
    hi = [to_fraction(v) for v in hi]
    corners = [[]]
    for a, b in zip(lo, hi):
        corners = [c + [a] for c in corners] + [c + [b] for c in corners]
    return hull(corners)


# ---------------------------------------------------------------------------
# halfspace input and LP shadows


def lp_shadow(
    A_ub: Sequence[Sequence],
    b_ub: Sequence,
    n: int,
    keep: Sequence[int],
    A_eq: Sequence[Sequence] = (),
    b_eq: Sequence = (),
    lower: Optional[Sequence] = None,
):
    """Image of ``{x in Q^n : A_ub x <= b_ub, A_eq x = b_eq}`` under ``x -> x[keep]``.

    The image is built from an LP oracle: a point set is grown until every
    facet of its hull is confirmed as a supporting hyperplane of the image.
    Returns :data:`EMPTY` when the system is infeasible.
    """
    if lower is None:
        lower = [None] * n
    k = len(keep)
    if k > MAX_DIM:
        raise DimensionError(f"ambient dimension {k} exceeds {MAX_DIM}")

    def argmax(direction) -> tuple:
        c = [Fraction(0)] * n
        for i, j in enumerate(keep):
            c[j] = -Fraction(direction[i])
        res = linprog(c, A_ub, b_ub, A_eq, b_eq, lower)
        if res.status == UNBOUNDED:
            raise UnboundedError("region is unbounded")
        if res.status == INFEASIBLE:
            return None
        return tuple(res.x[j] for j in keep)

    pts: List[tuple] = []
    for i in range(k):
        for s in (1, -1):
            e = [0] * k
            e[i] = s
            q = argmax(e)
            if q is None:
                return EMPTY
            pts.append(q)
    if k == 0:
        res = linprog([0] * n, A_ub, b_ub, A_eq, b_eq, lower)
        if not res.ok:
            return EMPTY
        raise DimensionError("projection onto zero coordinates")

    # complete the affine hull: every direction orthogonal to the points found
    # so far is either an implicit equation or yields a new direction
    x0 = pts[0]
    dirs = [sub(p, x0) for p in pts[1:] if p != x0]
    eqs: List[tuple] = []
    while True:
        basis, _ = rref(dirs) if dirs else ([], [])
        ns = nullspace(list(basis) + eqs, k)
        if not ns:
            break
        c = ns[0]
        base = dot(c, x0)
        q = argmax(c)
        if dot(c, q) != base:
            pts.append(q)
            dirs.append(sub(q, x0))
            continue
        q = argmax([-v for v in c])
        if dot(c, q) != base:
            pts.append(q)
            dirs.append(sub(q, x0))
            continue
        eqs.append(c)

    confirmed = set()
    while True:
        P = hull(pts)
        grew = False
        for a, b in P.facets:
            if (a, b) in confirmed:
                continue
            q = argmax(a)
            if dot(a, q) > b:
                pts.append(q)
                grew = True
                break
            confirmed.add((a, b))
        if not grew:
            return P


def from_halfspaces(halfspaces: Iterable[Tuple[Sequence, object]], dim: Optional[int] = None):
    """Polytope ``{x : a.x <= b}``; :data:`EMPTY` if infeasible, error if unbounded."""
    hs = [(tuple(to_fraction(v) for v in a), to_fraction(b)) for a, b in halfspaces]
    if dim is None:
        if not hs:
            raise GeometryError("dimension required for an empty constraint list")
        dim = len(hs[0][0])
    if dim > MAX_DIM:
        raise DimensionError(f"ambient dimension {dim} exceeds {MAX_DIM}")
    A = [a for a, _ in hs]
    b = [c for _, c in hs]
    return lp_shadow(A, b, dim, list(range(dim)))
