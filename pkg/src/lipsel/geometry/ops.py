"""Operations on polytopes: intersections, norm balls, distances, centroids,
widths, projections and the Helly checker."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import gcd as _gcd
from typing import List, Optional, Sequence, Tuple

from ..lp import UNBOUNDED, linprog
from ..rational import dot, primitive, sub, to_fraction
from .linalg import rank, rref
from .norms import PolyhedralNorm
from .polytope import (
    EMPTY,
    DimensionError,
    GeometryError,
    Polytope,
    from_halfspaces,
    hull,
)

DEFAULT_HALFSPACE_CAP = 10_000


class ResourceCapError(GeometryError):
    pass


def intersect(P: Polytope, Q: Polytope):
    if P is EMPTY or Q is EMPTY:
        return EMPTY
    if P.dim != Q.dim:
        raise GeometryError("ambient dimensions differ")
    if P == Q:
        return P
    return from_halfspaces(list(P.halfspaces) + list(Q.halfspaces), P.dim)


def intersect_all(sets: Sequence[Polytope]):
    if not sets:
        raise GeometryError("empty family")
    hs = []
    for S in sets:
        if S is EMPTY:
            return EMPTY
        hs.extend(S.halfspaces)
    return from_halfspaces(hs, sets[0].dim)


def add_ball(P: Polytope, norm: PolyhedralNorm, r) -> Polytope:
    """Minkowski sum ``P + r * ball``."""
    r = to_fraction(r)
    if r < 0:
        raise GeometryError("negative radius")
    if r == 0:
        return P
    pts = [
        tuple(a + r * b for a, b in zip(v, w)) for v in P.vertices for w in norm.ball.vertices
    ]
    return hull(pts)


def ball(center: Sequence, r, norm: PolyhedralNorm) -> Polytope:
    c = tuple(to_fraction(v) for v in center)
    return add_ball(hull([c]), norm, r)


def gauge(norm: PolyhedralNorm, v: Sequence) -> Fraction:
    return norm.gauge(v)


def support(P: Polytope, a: Sequence) -> Fraction:
    return P.support(a)


def affine_dim(P: Polytope) -> int:
    return P.affine_dim


def diameter(P: Polytope, norm: PolyhedralNorm) -> Fraction:
    vs = P.vertices
    return max(
        (norm.gauge(sub(a, b)) for a, b in combinations(vs, 2)), default=Fraction(0)
    )


# ---------------------------------------------------------------------------
# distances


def _box_lower(P: Polytope) -> List[Fraction]:
    return [min(v[i] for v in P.vertices) for i in range(P.dim)]


def distance(x: Sequence, Q: Polytope, norm: PolyhedralNorm) -> Tuple[Fraction, tuple]:
    """Gauge distance from ``x`` to ``Q`` and a nearest point (exact LP)."""
    x = tuple(to_fraction(v) for v in x)
    if Q.contains(x):
        return Fraction(0), x
    d = Q.dim
    A, b = [], []
    for a, off in Q.halfspaces:
        A.append(list(a) + [0])
        b.append(off)
    for g in norm.rows:
        # g.(x - q) <= t
        A.append([-c for c in g] + [-1])
        b.append(-dot(g, x))
    c = [0] * d + [1]
    res = linprog(c, A, b, lower=_box_lower(Q) + [0])
    if not res.ok:
        raise GeometryError(f"distance LP ended with status {res.status}")
    return res.value, tuple(res.x[:d])


def hausdorff(P: Polytope, Q: Polytope, norm: PolyhedralNorm) -> Fraction:
    if P == Q:
        return Fraction(0)
    best = Fraction(0)
    for A, B in ((P, Q), (Q, P)):
        for v in A.vertices:
            t, _ = distance(v, B, norm)
            if t > best:
                best = t
    return best


# ---------------------------------------------------------------------------
# centroid and measure


def _ring(points2d: Sequence[tuple]) -> List[int]:
    """Indices of the strictly convex ring of 2D points in counterclockwise order."""
    den = 1
    for p in points2d:
        for c in p:
            den = den * c.denominator // _gcd(den, c.denominator)
    ip = [tuple(int(c * den) for c in p) for p in points2d]
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
    return lower[:-1] + upper[:-1]


def _moments(P: Polytope) -> Tuple[Fraction, tuple]:
    """(volume, centroid) in the pivot coordinates of ``P``."""
    k = P.affine_dim
    loc = [P.local(v) for v in P.vertices]
    if k == 0:
        return Fraction(1), ()
    if k == 1:
        a, b = loc[0][0], loc[-1][0]
        return abs(b - a), ((a + b) / 2,)
    if k == 2:
        ring = [loc[i] for i in _ring(loc)]
        o = ring[0]
        vol = Fraction(0)
        cx = cy = Fraction(0)
        for p, q in zip(ring[1:], ring[2:]):
            area = ((p[0] - o[0]) * (q[1] - o[1]) - (p[1] - o[1]) * (q[0] - o[0])) / 2
            vol += area
            cx += area * (o[0] + p[0] + q[0]) / 3
            cy += area * (o[1] + p[1] + q[1]) / 3
        return vol, (cx / vol, cy / vol)
    if k == 3:
        H = hull(loc)
        apex = H.vertices[0]
        vol = Fraction(0)
        acc = [Fraction(0)] * 3
        for a, b in H.facets:
            face = [v for v in H.vertices if dot(a, v) == b]
            if apex in face:
                continue
            drop = max(range(3), key=lambda i: abs(a[i]))
            flat = [tuple(c for i, c in enumerate(v) if i != drop) for v in face]
            ring = [face[i] for i in _ring(flat)]
            f0 = ring[0]
            for p, q in zip(ring[1:], ring[2:]):
                u, v, w = sub(f0, apex), sub(p, apex), sub(q, apex)
                t = abs(
                    u[0] * (v[1] * w[2] - v[2] * w[1])
                    - u[1] * (v[0] * w[2] - v[2] * w[0])
                    + u[2] * (v[0] * w[1] - v[1] * w[0])
                ) / 6
                vol += t
                for i in range(3):
                    acc[i] += t * (apex[i] + f0[i] + p[i] + q[i]) / 4
        return vol, tuple(c / vol for c in acc)
    raise DimensionError("centroid supports affine dimension <= 3")


def centroid(P: Polytope) -> tuple:
    """Exact barycenter of ``P`` within its affine hull."""
    if P.affine_dim == 0:
        return P.vertices[0]
    _, c = _moments(P)
    return P.lift(c)


def relative_volume(P: Polytope, frame: Optional[Polytope] = None) -> Fraction:
    """Volume of ``P`` measured in the pivot coordinates of ``frame`` (default ``P``).

    Ratios of such volumes inside one affine hull do not depend on the frame.
    """
    if frame is None or frame.pivots == P.pivots:
        return _moments(P)[0]
    raise GeometryError("frames with different pivot coordinates")


# ---------------------------------------------------------------------------
# widths


def chebyshev(P: Polytope, norm: PolyhedralNorm) -> Tuple[Fraction, tuple]:
    """Smallest ``t`` and a center ``c`` with ``P`` inside ``c + t * ball``."""
    d = P.dim
    A, b = [], []
    for v in P.vertices:
        for g in norm.rows:
            # g.(v - c) <= t
            A.append([-x for x in g] + [-1])
            b.append(-dot(g, v))
    lower = _box_lower(P) + [0]
    res = linprog([0] * d + [1], A, b, lower=lower)
    if not res.ok:
        raise GeometryError("Chebyshev LP failed")
    return res.value, tuple(res.x[:d])


def _flat_distance(v, base, spans, norm) -> Fraction:
    d = len(v)
    k = len(spans)
    # minimize t with g.(v - base - sum s_j spans_j) <= t, s free
    A, b = [], []
    for g in norm.rows:
        A.append([dot(g, s) for s in spans] + [-1])
        b.append(dot(g, base) - dot(g, v))
    res = linprog([0] * k + [1], A, b, lower=[None] * k + [0])
    return res.value


def kolmogorov_width(P: Polytope, m: int, norm: PolyhedralNorm):
    """(lower, upper) bounds on the Kolmogorov m-width; lower is None when unknown."""
    if not (0 <= m <= P.dim):
        raise GeometryError(f"invalid width index {m}")
    if m >= P.affine_dim:
        return Fraction(0), Fraction(0)
    if m == 0:
        t, _ = chebyshev(P, norm)
        return t, t
    best = None
    for combo in combinations(P.vertices, m + 1):
        base = combo[0]
        spans = [sub(p, base) for p in combo[1:]]
        if rank(spans) < m:
            continue
        worst = max(_flat_distance(v, base, spans, norm) for v in P.vertices)
        if best is None or worst < best:
            best = worst
    return None, best


# ---------------------------------------------------------------------------
# Helly


@dataclass(frozen=True)
class HellyReport:
    m: int
    subfamilies_intersect: bool
    failing_subfamily: Optional[tuple]
    common_point: Optional[tuple]
    violation: bool


def common_affine_dim(family: Sequence[Polytope]) -> int:
    pts = [v for P in family for v in P.vertices]
    return rank([sub(p, pts[0]) for p in pts[1:]]) if len(pts) > 1 else 0


def all_intersect(family: Sequence[Polytope]):
    """The full intersection (or EMPTY)."""
    return intersect_all(list(family))


def helly_check(family: Sequence[Polytope], m: int) -> HellyReport:
    """Check Helly's theorem on a family lying in a common m-dimensional flat."""
    family = list(family)
    if not family:
        raise GeometryError("empty family")
    dim = common_affine_dim(family)
    if dim > m:
        raise GeometryError(
            f"sets span an affine subspace of dimension {dim} > {m}"
        )
    size = min(m + 1, len(family))
    for combo in combinations(range(len(family)), size):
        if intersect_all([family[i] for i in combo]) is EMPTY:
            return HellyReport(m, False, combo, None, False)
    full = intersect_all(family)
    if full is EMPTY:
        return HellyReport(m, True, None, None, True)
    return HellyReport(m, True, None, full.vertices[0], False)


# ---------------------------------------------------------------------------
# Fourier-Motzkin projection


def _normalize(a: Sequence[Fraction], b: Fraction):
    den = 1
    for c in list(a) + [b]:
        den = den * c.denominator // _gcd(den, c.denominator)
    ints = [int(c * den) for c in a]
    ib = int(b * den)
    g = 0
    for c in ints + [ib]:
        g = _gcd(g, c)
    if g > 1:
        ints = [c // g for c in ints]
        ib //= g
    return tuple(Fraction(c) for c in ints), Fraction(ib)


def _drop_redundant(rows: List[tuple], n: int) -> List[tuple]:
    kept = list(rows)
    i = 0
    while i < len(kept):
        a, b = kept[i]
        others = kept[:i] + kept[i + 1:]
        res = linprog(
            [-c for c in a], [r[0] for r in others], [r[1] for r in others], lower=[None] * n
        )
        if res.status != UNBOUNDED and res.ok and -res.value <= b:
            kept.pop(i)
        else:
            i += 1
    return kept


def fourier_motzkin(
    halfspaces: Sequence[Tuple[Sequence, object]],
    n: int,
    keep: int,
    cap: int = DEFAULT_HALFSPACE_CAP,
):
    """Eliminate coordinates ``keep..n-1``; returns a halfspace list or EMPTY."""
    rows = []
    for a, b in halfspaces:
        a = tuple(to_fraction(c) for c in a)
        rows.append(_normalize(a, to_fraction(b)))
    rows = sorted(set(rows))
    for j in range(n - 1, keep - 1, -1):
        width = j + 1
        # substitute an equation involving x_j if one is present
        present = set(rows)
        eq = next(
            (
                (a, b)
                for a, b in rows
                if a[j] != 0 and (tuple(-c for c in a), -b) in present
            ),
            None,
        )
        new = []
        if eq is not None:
            ea, eb = eq
            neg = (tuple(-c for c in ea), -eb)
            for a, b in rows:
                if (a, b) == eq or (a, b) == neg:
                    continue
                f = a[j] / ea[j]
                new.append((tuple(x - f * y for x, y in zip(a, ea)), b - f * eb))
        else:
            pos = [r for r in rows if r[0][j] > 0]
            negs = [r for r in rows if r[0][j] < 0]
            new = [r for r in rows if r[0][j] == 0]
            if len(pos) * len(negs) + len(new) > cap:
                raise ResourceCapError(
                    f"elimination would create {len(pos) * len(negs) + len(new)} halfspaces (cap {cap})"
                )
            for ap, bp in pos:
                for an, bn in negs:
                    s, t = -an[j], ap[j]
                    new.append(
                        (tuple(s * x + t * y for x, y in zip(ap, an)), s * bp + t * bn)
                    )
        out = set()
        for a, b in new:
            a = a[:j]
            if not any(a):
                if b < 0:
                    return EMPTY
                continue
            out.add(_normalize(a, b))
        if len(out) > cap:
            raise ResourceCapError(f"{len(out)} halfspaces exceed the cap {cap}")
        rows = sorted(out)
        if rows:
            if not linprog([0] * j, [r[0] for r in rows], [r[1] for r in rows], lower=[None] * j).ok:
                return EMPTY
            rows = _drop_redundant(rows, j)
    return rows


def project(P, keep: int, cap: int = DEFAULT_HALFSPACE_CAP, dim: Optional[int] = None):
    """Shadow of ``P`` on its first ``keep`` coordinates (Fourier-Motzkin).

    ``P`` is a Polytope or a list of halfspaces (then ``dim`` is required).
    """
    if keep < 1:
        raise GeometryError("must keep at least one coordinate")
    if isinstance(P, Polytope):
        hs, n = P.halfspaces, P.dim
    else:
        hs = list(P)
        n = dim if dim is not None else len(hs[0][0])
    if keep > n:
        raise GeometryError("cannot keep more coordinates than the ambient dimension")
    rows = fourier_motzkin(hs, n, keep, cap)
    if rows is EMPTY:
        return EMPTY
    return from_halfspaces(rows, keep)


# ---------------------------------------------------------------------------
# inclusion stability


@dataclass(frozen=True)
class StabilityReport:
    lhs: Fraction
    rhs: Fraction
    holds: bool


def inclusion_stability_check(G1, G2, a1, a2, r1, r2, norm: PolyhedralNorm) -> StabilityReport:
    r1, r2 = to_fraction(r1), to_fraction(r2)
    a1 = tuple(to_fraction(c) for c in a1)
    a2 = tuple(to_fraction(c) for c in a2)
    for G, a, r in ((G1, a1, r1), (G2, a2, r2)):
        if intersect(G, ball(a, r, norm)) is EMPTY:
            raise GeometryError("precondition violated: set misses its ball")
    H1 = intersect(G1, ball(a1, 2 * r1, norm))
    H2 = intersect(G2, ball(a2, 2 * r2, norm))
    lhs = hausdorff(H1, H2, norm)
    rhs = 18 * (hausdorff(G1, G2, norm) + norm.gauge(sub(a1, a2)) + abs(r1 - r2))
    return StabilityReport(lhs, rhs, lhs <= rhs)


# ---------------------------------------------------------------------------
# Minkowski-type inclusion measurement


def slice_support(norm: PolyhedralNorm, a: Sequence, directions: Sequence[Sequence]) -> Fraction:
    """max a.u over u in the unit ball intersected with span(directions)."""
    k = len(directions)
    A, b = [], []
    for g in norm.rows:
        A.append([dot(g, v) for v in directions])
        b.append(1)
    res = linprog([-dot(a, v) for v in directions], A, b, lower=[None] * k)
    return -res.value


def minkowski_ratio(G: Polytope, norm: PolyhedralNorm) -> Fraction:
    """Observed ratio d_0(G) / t where ``t`` is the largest radius with
    ``B(b(G), t)`` intersected with the affine hull of ``G`` inside ``G``."""
    if G.affine_dim == 0:
        raise GeometryError("ratio undefined for a point")
    b = centroid(G)
    dirs, _ = rref([sub(v, G.vertices[0]) for v in G.vertices[1:]])
    t = None
    for a, beta in G.facets:
        h = slice_support(norm, a, dirs)
        cand = (beta - dot(a, b)) / h
        if t is None or cand < t:
            t = cand
    d0, _ = chebyshev(G, norm)
    return d0 / t
