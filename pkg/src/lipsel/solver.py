"""Lipschitz selections by exact linear programming.

Every problem here is a linear system in the unknown values ``f(x)``: each
value lies in its image polytope, and for every linked pair
``g.(f(x) - f(y)) <= lam * rho(x, y)`` for each normalized facet row ``g`` of
the unit ball. Zero-distance pairs share one block of variables, and pairs at
infinite distance impose nothing.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

from .geometry.linalg import inverse
from .geometry.norms import PolyhedralNorm
from .geometry.ops import add_ball, distance, intersect, intersect_all, project
from .geometry.polytope import EMPTY, GeometryError, Polytope, lp_shadow
from .instance import SetValuedInstance, Selection
from .lp import linprog
from .metric import WeightedTree
from .rational import INF, add, dot, scale, sub, to_fraction

DEFAULT_SUBSET_CAP = 20_000


class SubsetCapError(RuntimeError):
    def __init__(self, required: int, cap: int):
        super().__init__(f"{required} subsets required, cap is {cap}")
        self.required = required
        self.cap = cap


class _System:
    """Linear constraints of a lam-Lipschitz selection on a node list."""

    def __init__(self, nodes, image, pairs, norm: PolyhedralNorm):
        self.nodes = list(nodes)
        self.norm = norm
        d = self.d = norm.dim
        parent = {v: v for v in self.nodes}

        def find(v):
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        for u, v, r in pairs:
            if r == 0:
                a, b = find(u), find(v)
                if a != b:
                    parent[b] = a
        order: List[Hashable] = []
        cls: Dict[Hashable, int] = {}
        for v in self.nodes:
            root = find(v)
            if root not in cls:
                cls[root] = len(order)
                order.append(root)
        self.block = {v: cls[find(v)] for v in self.nodes}
        self.nblocks = len(order)
        self.n = self.nblocks * d

        lower = [None] * self.n
        ub = {}
        eq = {}
        for v in self.nodes:
            P = image[v]
            base = self.block[v] * d
            for i in range(d):
                lo = min(p[i] for p in P.vertices)
                if lower[base + i] is None or lo > lower[base + i]:
                    lower[base + i] = lo
            for a, b in P.facets:
                row = [Fraction(0)] * self.n
                row[base:base + d] = a
                ub[(tuple(row), b)] = None
            for a, b in P.equalities:
                row = [Fraction(0)] * self.n
                row[base:base + d] = a
                eq[(tuple(row), b)] = None
        self.lower = lower
        self.ub = list(ub)
        self.eq = list(eq)

        links: Dict[Tuple[int, int], Fraction] = {}
        for u, v, r in pairs:
            if r is INF or r == 0:
                continue
            i, j = sorted((self.block[u], self.block[v]))
            if i == j:
                continue
            if (i, j) not in links or r < links[(i, j)]:
                links[(i, j)] = r
        self.links = sorted(links.items())

    def keep(self, node) -> List[int]:
        base = self.block[node] * self.d
        return list(range(base, base + self.d))

    def rows(self, lam=None):
        """(A_ub, b_ub, A_eq, b_eq, lower); with ``lam=None`` a last variable holds lam."""
        d = self.d
        extra = 1 if lam is None else 0
        width = self.n + extra
        A_ub = [list(a) + [0] * extra for a, _ in self.ub]
        b_ub = [b for _, b in self.ub]
        A_eq = [list(a) + [0] * extra for a, _ in self.eq]
        b_eq = [b for _, b in self.eq]
        signed = [(g, [-c for c in g]) for g in self.norm.rows]
        for (i, j), r in self.links:
            for g, neg in signed:
                row = [0] * width
                row[i * d:(i + 1) * d] = g
                row[j * d:(j + 1) * d] = neg
                if lam is None:
                    row[-1] = -r
                    A_ub.append(row)
                    b_ub.append(0)
                else:
                    A_ub.append(row)
                    b_ub.append(lam * r)
        lower = list(self.lower) + ([Fraction(0)] * extra)
        return A_ub, b_ub, A_eq, b_eq, lower

    def values(self, x) -> Dict[Hashable, tuple]:
        d = self.d
        return {v: tuple(x[self.block[v] * d:(self.block[v] + 1) * d]) for v in self.nodes}


def _pairs(instance: SetValuedInstance, nodes):
    sp = instance.space
    return [(u, v, sp.d(u, v)) for u, v in combinations(nodes, 2)]


def _system(instance: SetValuedInstance, nodes) -> _System:
    return _System(nodes, instance.images, _pairs(instance, nodes), instance.norm)


def min_lipschitz(instance: SetValuedInstance) -> Optional[Tuple[Fraction, Selection]]:
    """Optimal Lipschitz constant and an optimal selection, or None if none exists."""
    sysm = _system(instance, instance.points)
    A_ub, b_ub, A_eq, b_eq, lower = sysm.rows()
    c = [0] * sysm.n + [1]
    res = linprog(c, A_ub, b_ub, A_eq, b_eq, lower)
    if not res.ok:
        return None
    vals = sysm.values(res.x)
    lip = Selection.measure(instance.space, instance.norm, vals)
    return res.value, Selection(vals, lip)


def feasible_at(instance: SetValuedInstance, lam) -> Optional[Selection]:
    lam = to_fraction(lam)
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    sysm = _system(instance, instance.points)
    A_ub, b_ub, A_eq, b_eq, lower = sysm.rows(lam)
    res = linprog([0] * sysm.n, A_ub, b_ub, A_eq, b_eq, lower)
    if not res.ok:
        return None
    vals = sysm.values(res.x)
    return Selection(vals, Selection.measure(instance.space, instance.norm, vals))


def _shadow(sysm: _System, lam, node, method: str):
    A_ub, b_ub, A_eq, b_eq, lower = sysm.rows(lam)
    keep = sysm.keep(node)
    if method == "oracle":
        return lp_shadow(A_ub, b_ub, sysm.n, keep, A_eq, b_eq, lower)
    if method == "fm":
        if keep != list(range(sysm.d)):
            raise GeometryError("projected node must come first")
        hs = list(zip(A_ub, b_ub))
        for a, b in zip(A_eq, b_eq):
            hs.append((a, b))
            hs.append(([-v for v in a], -b))
        return project(hs, sysm.d, dim=sysm.n)
    raise ValueError(f"unknown projection method {method!r}")


def gamma_set(instance: SetValuedInstance, lam, x, S: Sequence, method: str = "oracle"):
    """Values at ``x`` of lam-Lipschitz selections on ``S`` plus ``x``."""
    lam = to_fraction(lam)
    nodes = [x] + [s for s in dict.fromkeys(S) if s != x]
    if len(nodes) == 1:
        return instance.images[x]
    return _shadow(_system(instance, nodes), lam, x, method)


def gamma_pair(instance: SetValuedInstance, lam, x, z):
    """Closed form of the one-point set: F(x) intersected with F(z) + lam rho(x,z) B."""
    r = instance.space.d(x, z)
    Fx = instance.images[x]
    if r is INF or x == z:
        return Fx
    return intersect(Fx, add_ball(instance.images[z], instance.norm, to_fraction(lam) * r))


def k_ell(m: int, ell: int) -> int:
    return (m + 2) ** ell


def gamma_ell(
    instance: SetValuedInstance,
    lam,
    x,
    ell: int,
    cap: int = DEFAULT_SUBSET_CAP,
    method: str = "oracle",
):
    """Intersection of gamma_set(x, S) over all S with #S <= (m+2)^ell."""
    if ell < 0:
        raise ValueError("ell must be nonnegative")
    others = [p for p in instance.points if p != x]
    size = min(k_ell(instance.m, ell), len(others))
    if size == 0:
        return instance.images[x]
    need = comb(len(others), size)
    if need > cap:
        raise SubsetCapError(need, cap)
    parts = []
    for S in combinations(others, size):
        G = gamma_set(instance, lam, x, S, method)
        if G is EMPTY:
            return EMPTY
        parts.append(G)
    if len(parts) == 1:
        return parts[0]
    return intersect_all(parts)


def orbit(instance: SetValuedInstance, lam, x, method: str = "oracle"):
    """Values at ``x`` of all lam-Lipschitz selections of the whole instance."""
    return gamma_set(instance, lam, x, [p for p in instance.points if p != x], method)


class AdmissibilityError(ValueError):
    pass


def tree_orbit(instance: SetValuedInstance, tree: WeightedTree, W: Dict, a, lam, method: str = "oracle"):
    """Orbit at node ``a`` of the pulled-back instance on the tree metric.

    Tree edges carry ``rho(W(u), W(v))``; Lipschitz bounds along edges imply
    them along all tree paths, so only edge constraints are imposed.
    """
    for v in tree.nodes:
        if v not in W or W[v] not in instance.space.index:
            raise AdmissibilityError(f"node {v!r} is not mapped to a point")
    pairs = []
    for u, v, _ in tree.edges:
        if W[u] == W[v]:
            raise AdmissibilityError(f"adjacent nodes {u!r}, {v!r} share the point {W[u]!r}")
        pairs.append((u, v, instance.space.d(W[u], W[v])))
    image = {v: instance.images[W[v]] for v in tree.nodes}
    if len(tree.nodes) == 1:
        return image[a]
    nodes = [a] + [v for v in tree.nodes if v != a]
    sysm = _System(nodes, image, pairs, instance.norm)
    return _shadow(sysm, to_fraction(lam), a, method)


# ---------------------------------------------------------------------------
# bases


@dataclass(frozen=True)
class LabelBasis:
    e: Tuple[tuple, ...]
    v: Tuple[tuple, ...]
    center: tuple
    r: Fraction
    C_B: Fraction

    @property
    def s(self) -> int:
        return len(self.e)


@dataclass(frozen=True)
class BasisReport:
    center_inside: bool
    kronecker: bool
    bounded: bool
    probes_inside: bool

    @property
    def ok(self) -> bool:
        return self.center_inside and self.kronecker and self.bounded and self.probes_inside


def verify_basis(G: Polytope, basis: LabelBasis, norm: PolyhedralNorm) -> BasisReport:
    d = G.dim
    if any(len(x) != d for x in basis.e + basis.v) or len(basis.center) != d:
        raise GeometryError("basis and set live in different dimensions")
    if len(basis.e) != len(basis.v):
        raise GeometryError("functionals and vectors differ in number")
    zeta = basis.center
    b0 = G.contains(zeta)
    b1 = all(
        dot(ea, vb) == (1 if a == b else 0)
        for a, ea in enumerate(basis.e)
        for b, vb in enumerate(basis.v)
    )
    b2 = all(norm.gauge(v) <= basis.C_B for v in basis.v) and all(
        norm.dual(e) <= basis.C_B for e in basis.e
    )
    step = basis.r / basis.C_B
    b3 = all(
        G.contains(add(zeta, scale(sgn * step, v))) for v in basis.v for sgn in (1, -1)
    )
    return BasisReport(b0, b1, b2, b3)


def ray_length(G: Polytope, p: Sequence, v: Sequence):
    """Largest t >= 0 with p + t v in G (p must lie in G)."""
    for a, _ in G.equalities:
        if dot(a, v) != 0:
            return Fraction(0)
    best = INF
    for a, b in G.facets:
        av = dot(a, v)
        if av > 0:
            t = (b - dot(a, p)) / av
            if best is INF or t < best:
                best = t
    return best


def fit_constant(G: Polytope, center, e, v, r, norm: PolyhedralNorm, floor=Fraction(1)):
    """Smallest C >= floor making (e, v, center, r, C) satisfy the norm and probe bounds."""
    C = Fraction(floor)
    for vec in v:
        C = max(C, norm.gauge(vec))
        for sgn in (1, -1):
            t = ray_length(G, center, scale(sgn, vec))
            if t == 0:
                return None
            if t is not INF:
                C = max(C, r / t)
    for f in e:
        C = max(C, norm.dual(f))
    return C


class BasisError(ValueError):
    pass


def add_vector(G: Polytope, basis: LabelBasis, eta, norm: PolyhedralNorm, m: Optional[int] = None):
    """Extend a basis at xi by the direction towards eta (returns (zeta, new basis))."""
    xi = tuple(to_fraction(c) for c in basis.center)
    eta = tuple(to_fraction(c) for c in eta)
    r = basis.r
    if m is None:
        m = G.dim
    if not verify_basis(G, basis, norm).ok:
        raise BasisError("input basis is not valid")
    if basis.s > m - 1:
        raise BasisError(f"basis already has {basis.s} vectors (m={m})")
    if not G.contains(eta):
        raise BasisError("eta is not in the set")
    dist = norm.gauge(sub(eta, xi))
    if dist < r:
        raise BasisError("eta is closer than r to the basis center")
    if any(dot(e, sub(eta, xi)) != 0 for e in basis.e):
        raise BasisError("eta - xi is not annihilated by the functionals")
    tau = r / (2 * dist)
    zeta = add(scale(tau, eta), scale(1 - tau, xi))
    step = sub(zeta, xi)
    new_v = scale(1 / norm.gauge(step), step)
    vs = basis.v + (new_v,)
    d = G.dim
    # minimal dual-norm functional with <e, v_a> = delta
    A_eq = [list(v) + [0] for v in vs]
    b_eq = [0] * basis.s + [1]
    A_ub = [list(w) + [-1] for w in norm.ball.vertices]
    b_ub = [0] * len(A_ub)
    res = linprog([0] * d + [1], A_ub, b_ub, A_eq, b_eq, lower=[None] * d + [0])
    if not res.ok:
        raise BasisError("no functional satisfies the Kronecker conditions")
    new_e = tuple(res.x[:d])
    es = basis.e + (new_e,)
    C = fit_constant(G, zeta, es, vs, r, norm, floor=max(Fraction(1), basis.C_B))
    if C is None:
        raise BasisError("zeta has no room along a basis vector")
    out = LabelBasis(es, vs, zeta, r, C)
    return zeta, out


@dataclass(frozen=True)
class TransportDiagnostics:
    probe_distances: Tuple[Fraction, ...]
    matrix: Tuple[tuple, ...]
    shift: Fraction


class TransportError(ValueError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics


def transport_basis(
    G: Polytope,
    G2: Polytope,
    basis: LabelBasis,
    norm: PolyhedralNorm,
    eps0=Fraction(1, 4),
    c1=None,
):
    """Move a basis for ``G`` at xi0 to a nearby set ``G2``.

    Returns (eta0, basis for G2 at eta0, diagnostics).
    """
    eps0 = to_fraction(eps0)
    xi0 = tuple(to_fraction(c) for c in basis.center)
    r = basis.r
    c1 = Fraction(1) / basis.C_B if c1 is None else to_fraction(c1)
    if not verify_basis(G, basis, norm).ok:
        raise TransportError("input basis is not valid")
    s = basis.s
    if s == 0:
        dist, eta0 = distance(xi0, G2, norm)
        if dist > eps0 * r:
            raise TransportError(f"nearest point at distance {dist} > eps0*r")
        out = LabelBasis((), (), eta0, r, max(Fraction(1), basis.C_B))
        return eta0, out, TransportDiagnostics((dist,), (), dist)
    nearest = {}
    dists = []
    for a, v in enumerate(basis.v):
        for sgn in (1, -1):
            probe = add(xi0, scale(sgn * c1 * r, v))
            dist, q = distance(probe, G2, norm)
            dists.append(dist)
            if dist > eps0 * r:
                raise TransportError(
                    f"probe {a}{'+' if sgn > 0 else '-'} is {dist} from the target (> eps0*r)",
                    TransportDiagnostics(tuple(dists), (), Fraction(0)),
                )
            nearest[(a, sgn)] = (probe, q)
    d = G.dim
    total = [Fraction(0)] * d
    for probe, q in nearest.values():
        total = list(add(total, q))
    eta00 = tuple(c / (2 * s) for c in total)
    tv = []
    for a, v in enumerate(basis.v):
        p_plus, q_plus = nearest[(a, 1)]
        p_minus, q_minus = nearest[(a, -1)]
        z_plus, z_minus = sub(q_plus, p_plus), sub(q_minus, p_minus)
        tv.append(add(v, scale(1 / (2 * c1 * r), sub(z_plus, z_minus))))
    A = [[dot(ea, tb) for tb in tv] for ea in basis.e]
    At = [[A[j][i] for j in range(s)] for i in range(s)]
    M = inverse(At)
    diag = TransportDiagnostics(tuple(dists), tuple(tuple(r_) for r_ in A), norm.gauge(sub(eta00, xi0)))
    if M is None:
        raise TransportError("correction matrix is singular", diag)
    hv = []
    for g in range(s):
        vec = [Fraction(0)] * d
        for b in range(s):
            vec = [x + M[g][b] * y for x, y in zip(vec, tv[b])]
        hv.append(tuple(vec))
    eta0 = eta00
    for g in range(s):
        coef = dot(basis.e[g], sub(eta00, xi0))
        eta0 = sub(eta0, scale(coef, hv[g]))
    if not G2.contains(eta0):
        raise TransportError("corrected center left the target set", diag)
    C = fit_constant(G2, eta0, basis.e, hv, r, norm)
    if C is None:
        raise TransportError("corrected center has no room along a basis vector", diag)
    out = LabelBasis(basis.e, tuple(hv), eta0, r, C)
    return eta0, out, diag


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Constants:
    m: int
    dimY: int
    N: int
    ell_sharp: int
    k_sharp: int

    def k(self, ell: int) -> int:
        return k_ell(self.m, ell)

    def ell_of(self, label_size: int) -> int:
        return 2 + 3 * (self.m - label_size)


def constants(m: int, dimY: int) -> Constants:
    ell_sharp = 2 + 3 * m
    return Constants(m, dimY, 2 ** min(m + 1, dimY), ell_sharp, (m + 2) ** (ell_sharp + 1))
