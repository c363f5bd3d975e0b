"""Nagata coverings, Whitney partitions of unity and patching of local selections.

Everything is exact: partition values are rationals that sum to one at every
point, and the constants the construction promises only qualitatively are
measured on the finite space and reported.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import floor
from typing import Callable, Dict, Hashable, List, Mapping, Optional, Sequence, Tuple

from .geometry.norms import PolyhedralNorm
from .instance import Selection, SetValuedInstance
from .metric import FinitePseudometricSpace, WeightedTree, tree_metric
from .rational import INF, to_fraction
from .solver import min_lipschitz

# theta_{i,s} falls from 1 to 0 over a collar of width c*s/256 around a part
COLLAR = 256
DEFAULT_A = 64
MAX_A = 2 ** 16


class CoverError(ValueError):
    pass


class WhitneyError(RuntimeError):
    pass


class PatchError(ValueError):
    pass


def _first(points):
    try:
        return min(points)
    except TypeError:
        return min(points, key=str)


# ---------------------------------------------------------------------------
# coverings


@dataclass(frozen=True)
class Covering:
    """Parts of a finite space at scale ``scale``; ``labels`` tags each part (optional)."""

    scale: Fraction
    parts: Tuple[Tuple[Hashable, ...], ...]
    labels: Optional[Tuple[Hashable, ...]] = None

    def __post_init__(self):
        if self.scale <= 0:
            raise CoverError("scale must be positive")
        if any(len(p) == 0 for p in self.parts):
            raise CoverError("empty part")
        if self.labels is not None and len(self.labels) != len(self.parts):
            raise CoverError("one label per part")


def nagata_cover_metric_tree(tree: WeightedTree, s) -> Covering:
    """Cover a metric tree by parts of diameter <= s; radius s/16 balls meet at most two parts.

    Distances are rescaled by 4/s. Each node goes to the part tagged
    ``(q, z)`` where ``z`` is its first ancestor (from the root down) lying
    deeper than floor(depth) - 1 and ``q`` is the parity of floor(depth).
    """
    s = to_fraction(s)
    if s <= 0:
        raise CoverError("scale must be positive")
    root = tree.root if tree.root is not None else tree.nodes[0]
    depth = {x: 4 * d / s for x, d in tree.distances_from(root).items()}
    par = tree.parents(root)
    groups: Dict[Tuple[int, Hashable], List[Hashable]] = {}
    for x in tree.nodes:
        level = floor(depth[x])
        chain = [x]
        while par[chain[-1]] is not None:
            chain.append(par[chain[-1]])
        anc = next(y for y in reversed(chain) if depth[y] > level - 1)
        groups.setdefault((level % 2, anc), []).append(x)
    pos = {x: i for i, x in enumerate(tree.nodes)}
    keys = sorted(groups, key=lambda k: (pos[k[1]], k[0]))
    return Covering(s, tuple(tuple(groups[k]) for k in keys), tuple(keys))


def greedy_cover(space: FinitePseudometricSpace, s) -> Covering:
    """Parts of diameter <= s grown around the first unassigned point (no Nagata guarantee)."""
    s = to_fraction(s)
    if s <= 0:
        raise CoverError("scale must be positive")
    left = list(space.points)
    parts = []
    while left:
        c = left[0]
        part = [p for p in left if space.d(c, p) <= s / 2]
        parts.append(tuple(part))
        taken = set(part)
        left = [p for p in left if p not in taken]
    return Covering(s, tuple(parts))


@dataclass(frozen=True)
class NagataReport:
    ok: bool
    violation: Optional[str] = None
    witness: tuple = ()
    max_parts_met: int = 0


def _set_distance(space, x, part):
    return min(space.d(x, p) for p in part)


def verify_nagata_cover(space: FinitePseudometricSpace, covering: Covering, c, C) -> NagataReport:
    """Check part diameters and that every closed ball of radius c*s meets at most C+1 parts."""
    c = to_fraction(c)
    members = {p for part in covering.parts for p in part}
    if not members <= set(space.points):
        raise CoverError("covering mentions points outside the space")
    missing = [p for p in space.points if p not in members]
    if missing:
        return NagataReport(False, "uncovered", (missing[0],))
    s = covering.scale
    for k, part in enumerate(covering.parts):
        for x, y in combinations(part, 2):
            if space.d(x, y) > s:
                return NagataReport(False, "diameter", (k, x, y))
    radius = c * s
    worst = 0
    for x in space.points:
        met = [k for k, part in enumerate(covering.parts) if _set_distance(space, x, part) <= radius]
        worst = max(worst, len(met))
        if len(met) > C + 1:
            return NagataReport(False, "multiplicity", (x, tuple(met)), worst)
    return NagataReport(True, None, (), worst)


def tree_cover_supplier(tree: WeightedTree) -> Callable[[FinitePseudometricSpace, Fraction], Covering]:
    return lambda space, s: nagata_cover_metric_tree(tree, s)


# ---------------------------------------------------------------------------
# Whitney partitions


@dataclass(frozen=True)
class WhitneyEntry:
    """One weight function; ``scales`` and ``parts`` list the covering parts merged into it."""

    center: Hashable
    r: Fraction
    scales: Tuple[Fraction, ...]
    parts: Tuple[Tuple[Hashable, ...], ...]
    values: Mapping[Hashable, Fraction]


@dataclass(frozen=True)
class WhitneyPartition:
    space: FinitePseudometricSpace
    entries: Tuple[WhitneyEntry, ...]
    c_ng: Fraction
    C_ng: int
    C_ls: Fraction
    a: Fraction
    A: int
    multiplicity: int
    lipschitz: object
    escalations: int = 0
    notes: Tuple[str, ...] = field(default=())

    def total(self, x) -> Fraction:
        return sum((e.values[x] for e in self.entries), Fraction(0))


def lengthscale_constant(space: FinitePseudometricSpace, r: Mapping) -> Fraction:
    """Smallest C >= 1 with r(y)/r(x) in [1/C, C] whenever d(x,y) <= r(x) + r(y)."""
    r = {x: to_fraction(r[x]) for x in space.points}
    best = Fraction(1)
    for x, y in combinations(space.points, 2):
        if space.d(x, y) <= r[x] + r[y]:
            q = r[x] / r[y]
            best = max(best, q, 1 / q)
    return best


def _scales(A: int, rmin: Fraction, rmax: Fraction) -> List[Fraction]:
    lo = rmin / Fraction(A) ** 3
    hi = rmax / A
    k = floor(_log2(lo))
    out = []
    while True:
        s = Fraction(2) ** k
        if s > hi:
            break
        if s >= lo:
            out.append(s)
        k += 1
    return out


def _log2(q: Fraction) -> int:
    # floor(log2 q) for q > 0
    k = q.numerator.bit_length() - q.denominator.bit_length()
    if Fraction(2) ** k > q:
        k -= 1
    elif Fraction(2) ** (k + 1) <= q:
        k += 1
    return k


def partition_lipschitz(space: FinitePseudometricSpace, entries: Sequence[WhitneyEntry]):
    """max over entries and point pairs of |phi(x) - phi(y)| * r / d(x, y)."""
    best = Fraction(0)
    for e in entries:
        for x, y in combinations(space.points, 2):
            diff = abs(e.values[x] - e.values[y])
            if not diff:
                continue
            d = space.d(x, y)
            if d is INF:
                continue
            if d == 0:
                return INF
            best = max(best, diff * e.r / d)
    return best


def _attempt(space, r, c_ng, C_ng, a, A, cover):
    pts = space.points
    rel = []
    for s in _scales(A, min(r.values()), max(r.values())):
        cov = cover(space, s)
        rep = verify_nagata_cover(space, cov, c_ng, C_ng)
        if not rep.ok:
            raise WhitneyError(f"cover supplier failed at scale {s}: {rep.violation} {rep.witness}")
        for part in cov.parts:
            x0 = _first(part)
            if r[x0] / Fraction(A) ** 3 <= s <= r[x0] / A:
                rel.append((s, x0, part))
    thetas = []
    for s, x0, part in rel:
        width = c_ng * s / COLLAR
        th = {}
        for x in pts:
            d = _set_distance(space, x, part)
            th[x] = Fraction(0) if d is INF or d >= width else 1 - d / width
        thetas.append(th)
    total = {x: sum((th[x] for th in thetas), Fraction(0)) for x in pts}
    bare = [x for x in pts if not any(th[x] == 1 for th in thetas)]
    if bare:
        return None, f"no relevant part contains {bare[0]!r}"
    # parts sharing a representative share the ball B(x0, a r(x0)); their
    # weights are summed so each center carries one entry
    merged: Dict[Hashable, list] = {}
    for (s, x0, part), th in zip(rel, thetas):
        for x in pts:
            if th[x] and not space.d(x, x0) < a * r[x0]:
                return None, f"support of the part at {x0!r}, scale {s}, reaches {x!r}"
        slot = merged.setdefault(x0, [[], [], {x: Fraction(0) for x in pts}])
        slot[0].append(s)
        slot[1].append(tuple(part))
        for x in pts:
            slot[2][x] += th[x]
    entries = [
        WhitneyEntry(x0, r[x0], tuple(ss), tuple(ps), {x: w[x] / total[x] for x in pts})
        for x0, (ss, ps, w) in merged.items()
    ]
    return entries, None


def whitney_partition(
    space: FinitePseudometricSpace,
    r: Mapping[Hashable, object],
    c_ng=Fraction(1, 16),
    C_ng: int = 1,
    a=None,
    A: int = DEFAULT_A,
    cover: Optional[Callable] = None,
    max_A: int = MAX_A,
) -> WhitneyPartition:
    """Partition of unity subordinate to balls B(x_nu, a r_nu).

    Scales are powers of two, a part at scale s is used when
    A^-3 r(x0) <= s <= A^-1 r(x0) for its first member x0, and the weights
    are normalized collar functions. ``A`` doubles (up to ``max_A``) until
    every point lies in a used part and every support fits its ball.
    Parts with the same first member are merged into one entry.
    ``a`` defaults to 1/(4 C_ls).
    """
    r = {x: to_fraction(r[x]) for x in space.points}
    if any(v <= 0 for v in r.values()):
        raise ValueError("lengthscales must be positive")
    c_ng = to_fraction(c_ng)
    C_ls = lengthscale_constant(space, r)
    a = 1 / (4 * C_ls) if a is None else to_fraction(a)
    if cover is None:
        cover = greedy_cover
    notes = []
    steps = 0
    while True:
        entries, why = _attempt(space, r, c_ng, C_ng, a, A, cover)
        if entries is not None:
            break
        notes.append(f"A={A}: {why}")
        if 2 * A > max_A:
            raise WhitneyError(f"no admissible A up to {max_A}: {why}")
        A *= 2
        steps += 1
    mult = max(sum(1 for e in entries if e.values[x]) for x in space.points)
    lip = partition_lipschitz(space, entries)
    return WhitneyPartition(space, tuple(entries), c_ng, C_ng, C_ls, a, A, mult, lip, steps, tuple(notes))


# ---------------------------------------------------------------------------
# patching


@dataclass(frozen=True)
class PatchResult:
    values: Dict[Hashable, tuple]
    seminorm: object
    C_wh: object
    C_eta: object
    C_agr: object
    C_lip: object
    D_star: int
    C_ls: Fraction


def _ball(space, x0, r):
    return [x for x in space.points if space.d(x0, x) < r]


def _ratio(num, den):
    if den is INF:
        return Fraction(0)
    if den == 0:
        return INF if num else Fraction(0)
    return num / den


def patch_selections(
    partition: WhitneyPartition,
    locals_: Mapping[int, Tuple[Mapping[Hashable, Sequence], Sequence]],
    norm: PolyhedralNorm,
    space: Optional[FinitePseudometricSpace] = None,
) -> PatchResult:
    """F(x) = sum_nu phi_nu(x) F_nu(x) with its exact seminorm and the measured hypothesis constants.

    ``locals_[nu]`` is ``(table, anchor)``; the table must cover the open
    ball B(x_nu, r_nu).
    """
    if space is not None and space != partition.space:
        raise PatchError("partition was built on a different space")
    sp = partition.space
    entries = partition.entries
    if set(locals_) != set(range(len(entries))):
        raise PatchError("need one local function per partition entry")
    balls = []
    for nu, e in enumerate(entries):
        table, _ = locals_[nu]
        ball = _ball(sp, e.center, e.r)
        for x in ball:
            if x not in table:
                raise PatchError(f"local {nu} is missing point {x!r}")
        balls.append(ball)
    d = norm.dim
    values = {}
    for x in sp.points:
        acc = [Fraction(0)] * d
        for nu, e in enumerate(entries):
            w = e.values[x]
            if w:
                fx = locals_[nu][0][x]
                for i in range(d):
                    acc[i] += w * to_fraction(fx[i])
        values[x] = tuple(acc)
    seminorm = Selection.measure(sp, norm, values)

    def gap(u, v):
        return norm.gauge([to_fraction(p) - to_fraction(q) for p, q in zip(u, v)])

    C_eta = Fraction(0)
    for (m, em), (n, en) in combinations(enumerate(entries), 2):
        C_eta = max(C_eta, _ratio(gap(locals_[m][1], locals_[n][1]), em.r + en.r + sp.d(em.center, en.center)))
    C_agr = Fraction(0)
    C_lip = Fraction(0)
    for nu, e in enumerate(entries):
        table, eta = locals_[nu]
        for x in balls[nu]:
            C_agr = max(C_agr, gap(table[x], eta) / e.r)
        for x, y in combinations(balls[nu], 2):
            C_lip = max(C_lip, _ratio(gap(table[x], table[y]), sp.d(x, y)))
    return PatchResult(
        values, seminorm, partition.lipschitz, C_eta, C_agr, C_lip, partition.multiplicity, partition.C_ls
    )


def solver_locals(instance: SetValuedInstance, partition: WhitneyPartition, lam=None):
    """Local selections on each ball B(x_nu, r_nu) from the exact solver, anchored at the center value.

    With ``lam=None`` each ball gets its optimal constant.
    """
    from .solver import feasible_at

    out = {}
    for nu, e in enumerate(partition.entries):
        ball = _ball(partition.space, e.center, e.r)
        sub = instance.restrict(ball)
        if lam is None:
            res = min_lipschitz(sub)
            sel = None if res is None else res[1]
        else:
            sel = feasible_at(sub, lam)
        if sel is None:
            raise PatchError(f"no local selection on the ball around {e.center!r}")
        table = dict(sel.values)
        out[nu] = (table, table[e.center])
    return out


def path_space(n: int, length=1) -> Tuple[WeightedTree, FinitePseudometricSpace]:
    """Path on n nodes 0..n-1 with equal edge lengths, rooted at 0."""
    tree = WeightedTree(list(range(n)), [(i, i + 1, length) for i in range(n - 1)], root=0)
    return tree, tree_metric(tree)
