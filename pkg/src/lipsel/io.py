"""JSON documents for instances, polytopes, partitions and reports.

Scalars are strings: ``"3"``, ``"-7/2"``, and ``"inf"`` (distance matrices
only). JSON numbers are accepted for integers on input but never emitted, so
no binary float ever reaches the exact core. Canonical output sorts keys and
uses the polytope's canonical vertex order, which makes
``dumps(parse(dumps(x))) == dumps(x)``.

Instance layout::

    {"dimension": 2, "m": 1,
     "norm": {"kind": "linf"} | {"kind": "l1"} | {"kind": "ball_vrep", "vertices": [[...], ...]},
     "points": ["a", "b", ...],
     "metric": {"matrix": [[...]]} | {"dissimilarity": [[...]]}
             | {"tree": [["a", "b", "1/2"], ...]},
     "sets": {"a": [["0", "1"], ...], ...}}
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Dict, List

from .geometry.norms import PolyhedralNorm, named_norm
from .geometry.polytope import EMPTY, GeometryError, Polytope, hull
from .instance import InstanceError, SetValuedInstance
from .metric import DISSIMILARITY, PSEUDOMETRIC, MetricError, WeightedTree, tree_metric, validate_space
from .rational import INF, RationalParseError, fmt, parse_rational


class SchemaError(ValueError):
    """Malformed document; ``path`` locates the offending value (``$.sets.a[0]``)."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def _key(path: str, k) -> str:
    return f"{path}[{k}]" if isinstance(k, int) else f"{path}.{k}"


def _obj(doc, path) -> dict:
    if not isinstance(doc, dict):
        raise SchemaError(path, "expected an object")
    return doc


def _list(doc, path) -> list:
    if not isinstance(doc, list):
        raise SchemaError(path, "expected an array")
    return doc


def _field(doc: dict, name: str, path: str):
    if name not in doc:
        raise SchemaError(_key(path, name), "missing field")
    return doc[name]


def _int(v, path) -> int:
    if isinstance(v, bool) or not isinstance(v, (int, str)):
        raise SchemaError(path, "expected an integer")
    try:
        q = parse_rational(v) if isinstance(v, str) else Fraction(v)
    except RationalParseError as exc:
        raise SchemaError(path, str(exc)) from None
    if q.denominator != 1:
        raise SchemaError(path, "expected an integer")
    return int(q)


def _rat(v, path) -> Fraction:
    if isinstance(v, bool) or not isinstance(v, (int, str)):
        raise SchemaError(path, "expected a rational string such as \"3/4\"")
    if isinstance(v, int):
        return Fraction(v)
    if v.strip().lower() == "inf":
        raise SchemaError(path, "\"inf\" is only allowed in distance matrices")
    try:
        return parse_rational(v)
    except RationalParseError as exc:
        raise SchemaError(path, str(exc)) from None


def _dist(v, path):
    if isinstance(v, str) and v.strip().lower() == "inf":
        return INF
    q = _rat(v, path)
    return q


def _vector(v, d, path) -> tuple:
    v = _list(v, path)
    if len(v) != d:
        raise SchemaError(path, f"expected {d} coordinates")
    return tuple(_rat(c, _key(path, i)) for i, c in enumerate(v))


def _matrix(rows, n, path, entry=_dist):
    rows = _list(rows, path)
    if len(rows) != n:
        raise SchemaError(path, f"expected {n} rows")
    out = []
    for i, r in enumerate(rows):
        rp = _key(path, i)
        r = _list(r, rp)
        if len(r) != n:
            raise SchemaError(rp, f"expected {n} entries")
        out.append([entry(v, _key(rp, j)) for j, v in enumerate(r)])
    return out


def parse_polytope_doc(doc, d: int, path: str = "$") -> Polytope:
    """A polytope is a nonempty array of vertices (extra points are allowed)."""
    pts = _list(doc, path)
    if not pts:
        raise SchemaError(path, "a set needs at least one vertex")
    vs = [_vector(p, d, _key(path, i)) for i, p in enumerate(pts)]
    try:
        return hull(vs)
    except GeometryError as exc:
        raise SchemaError(path, str(exc)) from None


def parse_norm(doc, d: int, path: str = "$.norm") -> PolyhedralNorm:
    doc = _obj(doc, path)
    kind = _field(doc, "kind", path)
    if kind not in ("linf", "l1", "ball_vrep"):
        raise SchemaError(_key(path, "kind"), f"unknown norm kind {kind!r}")
    verts = None
    if kind == "ball_vrep":
        vp = _key(path, "vertices")
        verts = [_vector(v, d, _key(vp, i)) for i, v in enumerate(_list(_field(doc, "vertices", path), vp))]
    try:
        return named_norm(kind, d, verts)
    except GeometryError as exc:
        raise SchemaError(path, str(exc)) from None


def instance_from_doc(doc: Any) -> SetValuedInstance:
    doc = _obj(doc, "$")
    d = _int(_field(doc, "dimension", "$"), "$.dimension")
    if d < 1:
        raise SchemaError("$.dimension", "dimension must be positive")
    m = _int(_field(doc, "m", "$"), "$.m")
    norm = parse_norm(_field(doc, "norm", "$"), d)
    points = _list(_field(doc, "points", "$"), "$.points")
    for i, p in enumerate(points):
        if not isinstance(p, str):
            raise SchemaError(f"$.points[{i}]", "labels are strings")
    metric = _obj(_field(doc, "metric", "$"), "$.metric")
    if len(metric) != 1:
        raise SchemaError("$.metric", "exactly one of matrix, dissimilarity, tree")
    (kind, payload), = metric.items()
    n = len(points)
    if kind in ("matrix", "dissimilarity"):
        table = _matrix(payload, n, f"$.metric.{kind}")
        space = validate_space(points, table, PSEUDOMETRIC if kind == "matrix" else DISSIMILARITY)
    elif kind == "tree":
        edges = []
        for i, e in enumerate(_list(payload, "$.metric.tree")):
            ep = f"$.metric.tree[{i}]"
            e = _list(e, ep)
            if len(e) != 3 or not isinstance(e[0], str) or not isinstance(e[1], str):
                raise SchemaError(ep, "an edge is [label, label, length]")
            edges.append((e[0], e[1], _rat(e[2], _key(ep, 2))))
        space = tree_metric(WeightedTree(points, edges, allow_zero=True))
    else:
        raise SchemaError(f"$.metric.{kind}", "unknown metric payload")
    sets = _obj(_field(doc, "sets", "$"), "$.sets")
    for k in sets:
        if k not in space.index:
            raise SchemaError(f"$.sets.{k}", "set for an unknown point")
    images = {x: parse_polytope_doc(_field(sets, x, "$.sets"), d, f"$.sets.{x}") for x in points}
    try:
        return SetValuedInstance(space, norm, images, m)
    except InstanceError as exc:
        raise SchemaError("$.sets", str(exc)) from None


def parse_instance(data) -> SetValuedInstance:
    """Parse UTF-8 JSON bytes (or text) into a validated instance.

    Raises SchemaError, or MetricError for invalid distance data.
    """
    return instance_from_doc(load_json(data))


def load_json(data) -> Any:
    if isinstance(data, (bytes, bytearray)):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise SchemaError("$", f"not UTF-8: {exc}") from None
    try:
        return json.loads(data, parse_float=_no_float)
    except json.JSONDecodeError as exc:
        raise SchemaError("$", f"invalid JSON: {exc}") from None


def tree_from_doc(doc: Any):
    """The weighted tree of an instance document with a tree metric (rooted at the first point), else None."""
    doc = _obj(doc, "$")
    metric = _obj(_field(doc, "metric", "$"), "$.metric")
    if "tree" not in metric:
        return None
    points = _list(_field(doc, "points", "$"), "$.points")
    edges = []
    for i, e in enumerate(_list(metric["tree"], "$.metric.tree")):
        ep = f"$.metric.tree[{i}]"
        e = _list(e, ep)
        if len(e) != 3:
            raise SchemaError(ep, "an edge is [label, label, length]")
        edges.append((e[0], e[1], _rat(e[2], _key(ep, 2))))
    return WeightedTree(points, edges, root=points[0] if points else None, allow_zero=True)


def tree_doc(tree: WeightedTree) -> list:
    return [[str(u), str(v), fmt(w)] for u, v, w in tree.edges]


def _no_float(text):
    raise SchemaError("$", f"floating-point literal {text} is not allowed; use \"p/q\"")


# ---------------------------------------------------------------------------
# emission


def polytope_doc(P) -> Any:
    if P is EMPTY:
        return None
    return [[fmt(c) for c in v] for v in P.vertices]


def norm_doc(norm: PolyhedralNorm) -> dict:
    if norm.kind in ("linf", "l1"):
        return {"kind": norm.kind}
    return {"kind": "ball_vrep", "vertices": polytope_doc(norm.ball)}


def instance_doc(inst: SetValuedInstance) -> dict:
    sp = inst.space
    labels = [str(p) for p in sp.points]
    kind = "matrix" if sp.mode == PSEUDOMETRIC else "dissimilarity"
    return {
        "dimension": inst.dim,
        "m": inst.m,
        "norm": norm_doc(inst.norm),
        "points": labels,
        "metric": {kind: [[fmt(v) for v in row] for row in sp.table]},
        "sets": {str(x): polytope_doc(inst.images[x]) for x in sp.points},
    }


def dumps(doc: Any) -> str:
    """Canonical text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def serialize_instance(inst: SetValuedInstance) -> str:
    return dumps(instance_doc(inst))


def scalar(v) -> str:
    return fmt(v)


def vector(v) -> List[str]:
    return [fmt(c) for c in v]


def selection_doc(values: Dict) -> dict:
    return {str(x): vector(v) for x, v in values.items()}


def partition_doc(partition) -> dict:
    pts = partition.space.points
    return {
        "parameters": {
            "A": partition.A,
            "C_ls": fmt(partition.C_ls),
            "C_ng": partition.C_ng,
            "a": fmt(partition.a),
            "c_ng": fmt(partition.c_ng),
        },
        "multiplicity": partition.multiplicity,
        "lipschitz": fmt(partition.lipschitz),
        "escalations": partition.escalations,
        "points": [str(p) for p in pts],
        "entries": [
            {
                "center": str(e.center),
                "r": fmt(e.r),
                "scales": [fmt(v) for v in e.scales],
                "values": [fmt(e.values[x]) for x in pts],
            }
            for e in partition.entries
        ],
    }


__all__ = [
    "SchemaError",
    "MetricError",
    "parse_instance",
    "instance_from_doc",
    "parse_polytope_doc",
    "parse_norm",
    "serialize_instance",
    "instance_doc",
    "polytope_doc",
    "partition_doc",
    "selection_doc",
    "dumps",
    "load_json",
    "tree_from_doc",
    "tree_doc",
]
