"""Finite pseudometric spaces, weighted trees and tree metrics."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

from .rational import INF, parse_scalar

PSEUDOMETRIC = "pseudometric"
DISSIMILARITY = "dissimilarity"


class MetricError(ValueError):
    """Invalid distance data; ``witness`` names the offending points."""

    def __init__(self, kind: str, witness: tuple, message: str):
        super().__init__(message)
        self.kind = kind
        self.witness = witness


class FinitePseudometricSpace:
    """Labeled points with a symmetric table of distances in Q>=0 and INF."""

    __slots__ = ("points", "table", "mode", "index")

    def __init__(self, points: Sequence[Hashable], table: Sequence[Sequence], mode: str):
        self.points = tuple(points)
        self.table = tuple(tuple(r) for r in table)
        self.mode = mode
        self.index = {p: i for i, p in enumerate(self.points)}

    def d(self, x, y):
        return self.table[self.index[x]][self.index[y]]

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def restrict(self, subset: Sequence[Hashable]) -> "FinitePseudometricSpace":
        idx = [self.index[p] for p in subset]
        return FinitePseudometricSpace(
            [self.points[i] for i in idx], [[self.table[i][j] for j in idx] for i in idx], self.mode
        )

    def diameter(self):
        best = Fraction(0)
        for i, j in combinations(range(len(self.points)), 2):
            if self.table[i][j] > best:
                best = self.table[i][j]
        return best

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FinitePseudometricSpace)
            and self.points == other.points
            and self.table == other.table
            and self.mode == other.mode
        )

    def __repr__(self) -> str:
        return f"FinitePseudometricSpace({len(self.points)} points, {self.mode})"


def validate_space(
    points: Sequence[Hashable], table: Sequence[Sequence], mode: str = PSEUDOMETRIC
) -> FinitePseudometricSpace:
    points = list(points)
    n = len(points)
    if mode not in (PSEUDOMETRIC, DISSIMILARITY):
        raise MetricError("mode", (), f"unknown mode {mode!r}")
    if len(set(points)) != n:
        raise MetricError("labels", (), "duplicate point labels")
    if len(table) != n or any(len(r) != n for r in table):
        raise MetricError("shape", (), "distance table must be square over the points")
    t = [[parse_scalar(v) if isinstance(v, str) else (v if v is INF else Fraction(v)) for v in r] for r in table]
    for i in range(n):
        if t[i][i] != 0:
            raise MetricError("diagonal", (points[i],), f"d({points[i]},{points[i]}) != 0")
        for j in range(n):
            if t[i][j] is not INF and t[i][j] < 0:
                raise MetricError("negative", (points[i], points[j]), f"negative distance d({points[i]},{points[j]})")
            if t[i][j] != t[j][i]:
                raise MetricError("asymmetry", (points[i], points[j]), f"d({points[i]},{points[j]}) != d({points[j]},{points[i]})")
    if mode == PSEUDOMETRIC:
        for i in range(n):
            for j in range(i + 1, n):
                dij = t[i][j]
                for k in range(n):
                    if k in (i, j):
                        continue
                    if dij > t[i][k] + t[k][j]:
                        w = (points[i], points[j], points[k])
                        raise MetricError(
                            "triangle", w, f"d({w[0]},{w[1]}) > d({w[0]},{w[2]}) + d({w[2]},{w[1]})"
                        )
    return FinitePseudometricSpace(points, t, mode)


@dataclass(frozen=True)
class QuotientMap:
    classes: Tuple[Tuple[Hashable, ...], ...]
    representative: Tuple[Hashable, ...]

    def class_of(self, x) -> int:
        for i, c in enumerate(self.classes):
            if x in c:
                return i
        raise KeyError(x)


def _components(space: FinitePseudometricSpace, linked) -> List[List[int]]:
    n = len(space.points)
    seen = [False] * n
    comps = []
    for s in range(n):
        if seen[s]:
            continue
        comp = []
        queue = deque([s])
        seen[s] = True
        while queue:
            i = queue.popleft()
            comp.append(i)
            for j in range(n):
                if not seen[j] and linked(space.table[i][j]):
                    seen[j] = True
                    queue.append(j)
        comps.append(sorted(comp))
    return comps


def quotient_by_zero(space: FinitePseudometricSpace):
    """Collapse zero-distance classes; representatives are first members."""
    comps = _components(space, lambda v: v == 0)
    classes = tuple(tuple(space.points[i] for i in c) for c in comps)
    reps = tuple(c[0] for c in classes)
    return space.restrict(reps), QuotientMap(classes, reps)


def finiteness_components(space: FinitePseudometricSpace) -> List[Tuple[Hashable, ...]]:
    comps = _components(space, lambda v: v is not INF)
    return [tuple(space.points[i] for i in c) for c in comps]


# ---------------------------------------------------------------------------
# trees


class WeightedTree:
    """Tree on labeled nodes with rational edge lengths.

    ``allow_zero`` admits zero-length edges (used when spanning pseudometrics).
    """

    __slots__ = ("nodes", "edges", "root", "adj")

    def __init__(
        self,
        nodes: Sequence[Hashable],
        edges: Sequence[Tuple[Hashable, Hashable, object]],
        root: Optional[Hashable] = None,
        allow_zero: bool = False,
    ):
        self.nodes = tuple(nodes)
        if len(set(self.nodes)) != len(self.nodes):
            raise MetricError("labels", (), "duplicate node labels")
        if not self.nodes:
            raise MetricError("empty", (), "tree without nodes")
        es = []
        adj: Dict[Hashable, List[Tuple[Hashable, Fraction]]] = {v: [] for v in self.nodes}
        for u, v, w in edges:
            w = parse_scalar(w) if isinstance(w, str) else Fraction(w)
            if u not in adj or v not in adj or u == v:
                raise MetricError("edge", (u, v), f"bad edge ({u},{v})")
            if w < 0 or (w == 0 and not allow_zero):
                raise MetricError("edge", (u, v), f"edge ({u},{v}) needs a positive length")
            es.append((u, v, w))
            adj[u].append((v, w))
            adj[v].append((u, w))
        if len(es) != len(self.nodes) - 1:
            raise MetricError("tree", (), "a tree on n nodes has n-1 edges")
        seen = {self.nodes[0]}
        queue = deque([self.nodes[0]])
        while queue:
            u = queue.popleft()
            for v, _ in adj[u]:
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
        if len(seen) != len(self.nodes):
            raise MetricError("tree", (), "edges do not connect the nodes")
        if root is not None and root not in adj:
            raise MetricError("root", (root,), "root is not a node")
        self.edges = tuple(es)
        self.root = root
        self.adj = adj

    def degree(self, x) -> int:
        return len(self.adj[x])

    def neighbors(self, x) -> List[Hashable]:
        return [v for v, _ in self.adj[x]]

    def distances_from(self, s) -> Dict[Hashable, Fraction]:
        dist = {s: Fraction(0)}
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for v, w in self.adj[u]:
                if v not in dist:
                    dist[v] = dist[u] + w
                    queue.append(v)
        return dist

    def parents(self, root) -> Dict[Hashable, Optional[Hashable]]:
        par: Dict[Hashable, Optional[Hashable]] = {root: None}
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for v, _ in self.adj[u]:
                if v not in par:
                    par[v] = u
                    queue.append(v)
        return par

    def path(self, x, y) -> List[Hashable]:
        par = self.parents(x)
        out = [y]
        while out[-1] != x:
            out.append(par[out[-1]])
        return out[::-1]

    def __repr__(self) -> str:
        return f"WeightedTree({len(self.nodes)} nodes)"


def tree_metric(tree: WeightedTree) -> FinitePseudometricSpace:
    rows = []
    for x in tree.nodes:
        dist = tree.distances_from(x)
        rows.append([dist[y] for y in tree.nodes])
    return FinitePseudometricSpace(tree.nodes, rows, PSEUDOMETRIC)


def theta(k: int) -> int:
    """Distortion bound of the low-degree tree on k points: theta(1)=1, theta(k+1)=k(2 theta(k)+1)."""
    t = 1
    for j in range(1, k):
        t = j * (2 * t + 1)
    return t


def ceil_log2(n: int) -> int:
    return (n - 1).bit_length() if n > 0 else 0


def build_low_degree_tree(space: FinitePseudometricSpace) -> Tuple[WeightedTree, Hashable]:
    """Spanning tree with distortion at most theta(#M) and a hub of degree >= ceil(log2 #M).

    Edges carry the distance between their endpoints. The split at each level
    separates the chain component of one end of a diameter pair.
    """
    if len(space.points) == 0:
        raise MetricError("empty", (), "empty space")
    for i, j in combinations(range(len(space)), 2):
        if space.table[i][j] is INF:
            raise MetricError("infinite", (space.points[i], space.points[j]), "distances must be finite")
    edges: List[tuple] = []

    def build(idx: List[int]) -> int:
        if len(idx) == 1:
            return idx[0]
        k = len(idx) - 1
        t = space.table
        diam, x0, y0 = Fraction(-1), idx[0], idx[0]
        for a, b in combinations(idx, 2):
            if t[a][b] > diam:
                diam, x0, y0 = t[a][b], a, b
        if diam == 0:
            near = [i for i in idx if i != idx[-1]]
        else:
            bound = diam / k
            near = [x0]
            seen = {x0}
            queue = deque([x0])
            while queue:
                u = queue.popleft()
                for v in idx:
                    if v not in seen and t[u][v] < bound:
                        seen.add(v)
                        near.append(v)
                        queue.append(v)
            near = sorted(near)
        far = [i for i in idx if i not in set(near)]
        if len(near) < len(far):
            near, far = far, near
        hub = build(near)
        a0 = build(far)
        edges.append((space.points[hub], space.points[a0], t[hub][a0]))
        return hub

    root = space.points[build(list(range(len(space))))]
    tree = WeightedTree(space.points, edges, allow_zero=True)
    # the construction's hub already meets the degree bound; report a node of
    # maximum degree, keeping the construction's hub on ties
    top = max(tree.degree(v) for v in tree.nodes)
    hub = root if tree.degree(root) == top else next(v for v in tree.nodes if tree.degree(v) == top)
    return tree, hub


def branches(tree: WeightedTree, x0) -> Dict[Hashable, frozenset]:
    if x0 not in tree.adj:
        raise MetricError("node", (x0,), f"{x0!r} is not a node")
    out = {}
    for u in tree.neighbors(x0):
        seen = {x0, u}
        queue = deque([u])
        while queue:
            w = queue.popleft()
            for v in tree.neighbors(w):
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
        out[u] = frozenset(seen)
    return out


def glue_trees(parts: Sequence[Tuple[WeightedTree, Hashable]], hub_label: Hashable = "a+"):
    """Identify the marked nodes a_i of several trees into one node ``hub_label``."""
    if not parts:
        raise MetricError("empty", (), "nothing to glue")
    nodes: List[Hashable] = [hub_label]
    seen = {hub_label}
    edges = []
    for tree, a in parts:
        if a not in tree.adj:
            raise MetricError("node", (a,), f"{a!r} is not a node")
        for v in tree.nodes:
            if v == a:
                continue
            if v in seen:
                raise MetricError("labels", (v,), f"node label {v!r} is shared between trees")
            seen.add(v)
            nodes.append(v)
        for u, v, w in tree.edges:
            edges.append((hub_label if u == a else u, hub_label if v == a else v, w))
    allow_zero = any(w == 0 for _, _, w in edges)
    return WeightedTree(nodes, edges, allow_zero=allow_zero), hub_label
