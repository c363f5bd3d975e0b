"""Finiteness experiments: restriction scans, sharpness counterexamples,
the quasimetric blow-up and the bounded-anchor reduction."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import partial
from itertools import combinations
from math import comb
from typing import Hashable, List, Optional, Sequence, Tuple

from .geometry.norms import PolyhedralNorm, l1, linf
from .geometry.ops import add_ball, intersect
from .geometry.polytope import EMPTY, hull
from .instance import SetValuedInstance
from .metric import DISSIMILARITY, PSEUDOMETRIC, WeightedTree, tree_metric, validate_space
from .parallel import pmap
from .rational import INF, sub, to_fraction
from .solver import min_lipschitz

DEFAULT_SCAN_CAP = 100_000


class ScanCapError(RuntimeError):
    def __init__(self, required: int, cap: int):
        super().__init__(f"{required} subsets required, cap is {cap}")
        self.required = required
        self.cap = cap


@dataclass(frozen=True)
class ScanReport:
    N: int
    local: object
    global_: object
    ratio: object
    witness: Tuple[Hashable, ...]
    subsets: int


def _lam(instance: SetValuedInstance):
    out = min_lipschitz(instance)
    return INF if out is None else out[0]


def _subset_lam(instance: SetValuedInstance, subset):
    return _lam(instance.restrict(subset))


def _twins(instance: SetValuedInstance) -> List[List[Hashable]]:
    """Groups of interchangeable points: zero distance apart and equal images."""
    groups: List[List[Hashable]] = []
    sp = instance.space
    for x in instance.points:
        for g in groups:
            y = g[0]
            if sp.d(x, y) == 0 and instance.images[x] == instance.images[y] and all(
                sp.d(x, z) == sp.d(y, z) for z in instance.points
            ):
                g.append(x)
                break
        else:
            groups.append([x])
    return groups


def _canonical_subsets(instance: SetValuedInstance, size: int):
    """Subsets of the given size, one per class under swapping twins."""
    groups = _twins(instance)
    rank = {}
    for g in groups:
        for i, x in enumerate(g):
            rank[x] = (id(g), i)
    for S in combinations(instance.points, size):
        used = {}
        ok = True
        for x in S:
            gid, i = rank[x]
            used.setdefault(gid, []).append(i)
        for idx in used.values():
            if sorted(idx) != list(range(len(idx))):
                ok = False
                break
        if ok:
            yield S


def ratio(local, glob):
    if glob is INF:
        return INF if local is not INF else Fraction(1)
    if local == 0:
        return Fraction(1) if glob == 0 else INF
    return glob / local


def restriction_scan(instance: SetValuedInstance, N: int, cap: int = DEFAULT_SCAN_CAP) -> ScanReport:
    """Largest optimal constant over restrictions to at most N points, next to the global one.

    Restricting can only lower the optimal constant, so only subsets of size
    exactly min(N, #M) are solved.
    """
    if N < 1:
        raise ValueError("N must be positive")
    size = min(N, len(instance.points))
    need = comb(len(instance.points), size)
    if need > cap:
        raise ScanCapError(need, cap)
    subsets = list(_canonical_subsets(instance, size))
    values = pmap(partial(_subset_lam, instance), subsets)
    local, witness = Fraction(0), subsets[0]
    for S, v in zip(subsets, values):
        if v > local:
            local, witness = v, S
    glob = _lam(instance) if size < len(instance.points) else local
    return ScanReport(N, local, glob, ratio(local, glob), tuple(witness), len(subsets))


# ---------------------------------------------------------------------------
# sharpness examples


def _check_lambda(lam) -> Fraction:
    lam = to_fraction(lam)
    if lam < 1:
        raise ValueError("lambda must be at least 1")
    return lam


def _line_positions(lam: Fraction):
    L = 2 * lam
    eps = 1 / L
    return L, eps, [1 + eps, Fraction(1), Fraction(-1), -1 - eps]


def counterexample_m1(lam) -> SetValuedInstance:
    """Four points on a line with segment images in the l-infinity plane."""
    lam = _check_lambda(lam)
    L, _, u = _line_positions(lam)
    labels = ["u1", "u2", "u3", "u4"]
    table = [[abs(a - b) for b in u] for a in u]
    A, B, C, D = (L, 1), (-L, 1), (-L, -1), (L, -1)
    images = {
        "u1": hull([A, B]),
        "u2": hull([A, C]),
        "u3": hull([B, D]),
        "u4": hull([A, B]),
    }
    return SetValuedInstance(validate_space(labels, table), linf(2), images, 1)


def counterexample_m2(lam) -> SetValuedInstance:
    """Eight points (four zero-distance pairs) with planar quadrilateral images in l-infinity 3-space."""
    lam = _check_lambda(lam)
    L, eps, u = _line_positions(lam)
    labels = [f"u{i}{k}" for i in range(1, 5) for k in (0, 1)]
    pos = [u[i - 1] for i in range(1, 5) for _ in (0, 1)]
    table = [[abs(a - b) for b in pos] for a in pos]
    A, Am = (L, 1, 0), (L, 1, -eps)
    B, Bm = (-L, 1, 0), (-L, 1, -eps)
    C, Cp = (-L, -1, 0), (-L, -1, eps)
    D, Dp = (L, -1, 0), (L, -1, eps)
    base = hull([A, B, C, D])
    images = {f"u{i}0": base for i in range(1, 5)}
    images["u11"] = hull([A, B, Cp, Dp])
    images["u21"] = hull([A, Bm, C, Dp])
    images["u31"] = hull([Am, B, Cp, D])
    images["u41"] = hull([A, B, Cp, Dp])
    return SetValuedInstance(validate_space(labels, table), linf(3), images, 2)


def quasimetric_grid(N: int, n: int) -> SetValuedInstance:
    """Grid i/n on [0,1] under |x-y|^2 with the endpoint images {0} and {1/N^2}."""
    if N <= 1 or n < 1:
        raise ValueError("need N > 1 and n >= 1")
    xs = [Fraction(i, n) for i in range(n + 1)]
    labels = [f"x{i}" for i in range(n + 1)]
    table = [[(a - b) ** 2 for b in xs] for a in xs]
    images = {}
    for i, lab in enumerate(labels):
        if i == 0:
            images[lab] = hull([(0,)])
        elif i == n:
            images[lab] = hull([(Fraction(1, N * N),)])
        else:
            images[lab] = hull([(0,), (1,)])
    return SetValuedInstance(validate_space(labels, table, DISSIMILARITY), linf(1), images, 1)


class ReductionError(ValueError):
    def __init__(self, witness):
        super().__init__(f"reduced image at {witness!r} is empty")
        self.witness = witness


def stkl_reduce(instance: SetValuedInstance, x0, alpha) -> SetValuedInstance:
    """Cut every image down to the part within alpha*rho(x0, x) of F(x0)."""
    alpha = to_fraction(alpha)
    if alpha < 1:
        raise ValueError("alpha must be at least 1")
    anchor = instance.images[x0]
    out = {}
    for x in instance.points:
        r = instance.space.d(x0, x)
        if x == x0 or r is INF:
            out[x] = instance.images[x]
            continue
        P = intersect(instance.images[x], add_ball(anchor, instance.norm, alpha * r))
        if P is EMPTY:
            raise ReductionError(x)
        out[x] = P
    return instance.with_images(out)


# ---------------------------------------------------------------------------
# random instances


def _rand_frac(rng: random.Random, lo: int, hi: int, den: int = 1) -> Fraction:
    return Fraction(rng.randint(lo * den, hi * den), den)


def random_polytope(rng: random.Random, d: int, k: int, box: int = 4, npts: Optional[int] = None):
    """Random polytope of affine dimension at most k in Q^d with small rational coordinates."""
    base = [_rand_frac(rng, -box, box) for _ in range(d)]
    if k == 0:
        return hull([base])
    dirs = [[rng.randint(-2, 2) for _ in range(d)] for _ in range(k)]
    npts = npts if npts is not None else rng.randint(k + 1, k + 3)
    pts = []
    for _ in range(npts):
        t = [_rand_frac(rng, -2, 2, 2) for _ in range(k)]
        pts.append([base[i] + sum(t[j] * dirs[j][i] for j in range(k)) for i in range(d)])
    return hull(pts)


def random_tree(rng: random.Random, n: int, max_len: int = 4, den: int = 1, labels=None) -> WeightedTree:
    labels = labels or [f"p{i}" for i in range(n)]
    edges = []
    for i in range(1, n):
        j = rng.randrange(i)
        edges.append((labels[j], labels[i], Fraction(rng.randint(1, max_len * den), den)))
    return WeightedTree(labels, edges)


def random_instance(
    seed: int,
    n_points: int,
    d: int,
    m: int,
    box: int = 4,
    metric: str = "points",
    norm: str = "linf",
) -> SetValuedInstance:
    """Reproducible random instance.

    ``metric="points"`` measures distances between random lattice points in
    the instance norm; ``metric="tree"`` uses a random weighted tree.
    """
    if n_points < 1 or d < 1 or m < 0:
        raise ValueError("invalid parameters")
    rng = random.Random(seed)
    nrm: PolyhedralNorm = linf(d) if norm == "linf" else l1(d)
    labels = [f"p{i}" for i in range(n_points)]
    if metric == "points":
        locs = [[rng.randint(-box, box) for _ in range(d)] for _ in range(n_points)]
        table = [[nrm.gauge(sub(a, b)) for b in locs] for a in locs]
        space = validate_space(labels, table, PSEUDOMETRIC)
    elif metric == "tree":
        space = tree_metric(random_tree(rng, n_points, labels=labels))
    else:
        raise ValueError(f"unknown metric kind {metric!r}")
    images = {x: random_polytope(rng, d, min(m, d), box) for x in labels}
    return SetValuedInstance(space, nrm, images, m)
