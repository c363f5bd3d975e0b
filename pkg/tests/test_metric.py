import random
from fractions import Fraction
from itertools import combinations

import networkx as nx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lipsel.lab import counterexample_m2, random_tree
from lipsel.metric import (
    DISSIMILARITY,
    INF,
    MetricError,
    WeightedTree,
    branches,
    build_low_degree_tree,
    ceil_log2,
    finiteness_components,
    glue_trees,
    quotient_by_zero,
    theta,
    tree_metric,
    validate_space,
)


def test_single_point():
    assert len(validate_space(["a"], [[0]])) == 1


def test_triangle_violation_names_witness():
    with pytest.raises(MetricError) as exc:
        validate_space("abc", [[0, 1, 3], [1, 0, 1], [3, 1, 0]])
    assert exc.value.kind == "triangle"
    assert exc.value.witness == ("a", "c", "b")


@pytest.mark.parametrize(
    "table, kind",
    [
        ([[0, 1], [2, 0]], "asymmetry"),
        ([[0, -1], [-1, 0]], "negative"),
        ([[1, 1], [1, 0]], "diagonal"),
    ],
)
def test_rejections(table, kind):
    with pytest.raises(MetricError) as exc:
        validate_space("ab", table)
    assert exc.value.kind == kind


def test_squared_grid_is_only_a_dissimilarity():
    xs = [Fraction(0), Fraction(1, 2), Fraction(1)]
    table = [[(x - y) ** 2 for y in xs] for x in xs]
    validate_space("abc", table, DISSIMILARITY)
    with pytest.raises(MetricError):
        validate_space("abc", table)


def test_quotient_examples():
    sp, q = quotient_by_zero(validate_space("abc", [[0] * 3] * 3))
    assert len(sp) == 1 and q.classes == (("a", "b", "c"),)
    sp, q = quotient_by_zero(validate_space("ab", [[0, 1], [1, 0]]))
    assert q.classes == (("a",), ("b",))
    sp, q = quotient_by_zero(counterexample_m2(1).space)
    assert len(q.classes) == 4 and all(len(c) == 2 for c in q.classes)


def _oracle_components(space):
    g = nx.Graph()
    g.add_nodes_from(space.points)
    g.add_edges_from((x, y) for x, y in combinations(space.points, 2) if space.d(x, y) is not INF)
    return sorted(sorted(c) for c in nx.connected_components(g))


def test_finiteness_components():
    table = [[0, 1, 2, INF, INF], [1, 0, 1, INF, INF], [2, 1, 0, INF, INF], [INF] * 3 + [0, 5], [INF] * 3 + [5, 0]]
    sp = validate_space("abcde", table)
    comps = finiteness_components(sp)
    assert sorted(map(len, comps)) == [2, 3]
    assert sorted(sorted(c) for c in comps) == _oracle_components(sp)


def test_tree_metric_small():
    t = WeightedTree("abc", [("a", "b", 1), ("b", "c", 1)])
    assert tree_metric(t).d("a", "c") == 2
    assert tree_metric(WeightedTree("ab", [("a", "b", Fraction(3, 2))])).d("a", "b") == Fraction(3, 2)


def test_tree_validation():
    with pytest.raises(MetricError):
        WeightedTree("abc", [("a", "b", 1), ("b", "a", 1)])
    with pytest.raises(MetricError):
        WeightedTree("ab", [("a", "b", 0)])


@given(st.integers(0, 10**6))
def test_tree_metric_matches_shortest_paths(seed):
    rng = random.Random(seed)
    t = random_tree(rng, 10, den=3)
    g = nx.Graph()
    g.add_weighted_edges_from(t.edges)
    ref = dict(nx.all_pairs_dijkstra_path_length(g))
    sp = tree_metric(t)
    assert all(sp.d(x, y) == ref[x][y] for x in t.nodes for y in t.nodes)


def test_theta_values():
    assert [theta(k) for k in (1, 2, 3, 4)] == [1, 3, 14, 87]
    assert [ceil_log2(k) for k in (1, 2, 3, 4, 5, 8, 9)] == [0, 1, 2, 2, 3, 3, 4]


def test_two_point_tree():
    sp = validate_space("ab", [[0, 3], [3, 0]])
    t, hub = build_low_degree_tree(sp)
    assert t.edges and tree_metric(t).d("a", "b") == 3
    assert t.degree(hub) == 1


def test_uniform_four_points():
    sp = validate_space("abcd", [[int(i != j) for j in range(4)] for i in range(4)])
    t, hub = build_low_degree_tree(sp)
    dT = tree_metric(t)
    assert t.degree(hub) >= 2
    worst = max(dT.d(x, y) / sp.d(x, y) for x, y in combinations(sp.points, 2))
    assert 1 <= worst <= 87


points = st.lists(st.tuples(st.integers(-4, 4), st.integers(-4, 4)), min_size=1, max_size=8)


@given(points)
def test_low_degree_tree_distortion(locs):
    labels = [f"x{i}" for i in range(len(locs))]
    table = [[abs(a[0] - b[0]) + abs(a[1] - b[1]) for b in locs] for a in locs]
    sp = validate_space(labels, table)
    t, hub = build_low_degree_tree(sp)
    dT = tree_metric(t)
    k = len(locs)
    for x, y in combinations(labels, 2):
        assert sp.d(x, y) <= dT.d(x, y) <= theta(k) * sp.d(x, y)
    assert t.degree(hub) >= ceil_log2(k)
    assert t.degree(hub) == max(t.degree(v) for v in t.nodes)


def test_branches_examples():
    star = WeightedTree(["x0", "l1", "l2", "l3"], [("x0", f"l{i}", 1) for i in (1, 2, 3)])
    assert branches(star, "x0") == {f"l{i}": frozenset({"x0", f"l{i}"}) for i in (1, 2, 3)}
    path = WeightedTree(["a", "x0", "b", "c"], [("a", "x0", 1), ("x0", "b", 1), ("b", "c", 1)])
    assert branches(path, "x0") == {"a": frozenset({"x0", "a"}), "b": frozenset({"x0", "b", "c"})}


@given(st.integers(0, 10**6))
def test_branches_partition_and_additivity(seed):
    rng = random.Random(seed)
    t = random_tree(rng, rng.randint(2, 12))
    x0 = rng.choice(t.nodes)
    br = branches(t, x0)
    rest = [set(b) - {x0} for b in br.values()]
    assert set().union(*rest) == set(t.nodes) - {x0}
    assert sum(map(len, rest)) == len(t.nodes) - 1
    dT = tree_metric(t)
    for (u, A), (v, B) in combinations(br.items(), 2):
        for a in A - {x0}:
            for b in B - {x0}:
                assert dT.d(a, b) == dT.d(a, x0) + dT.d(x0, b)


def test_glue_examples():
    t1 = WeightedTree(["a1", "b"], [("a1", "b", 1)])
    t2 = WeightedTree(["a2", "c"], [("a2", "c", 2)])
    g, hub = glue_trees([(t1, "a1"), (t2, "a2")])
    assert sorted(g.neighbors(hub)) == ["b", "c"]
    assert tree_metric(g).d("b", "c") == 3
    stars = [
        (WeightedTree([f"h{i}"] + [f"s{i}_{j}" for j in range(k)], [(f"h{i}", f"s{i}_{j}", 1) for j in range(k)]), f"h{i}")
        for i, k in enumerate((2, 3, 4))
    ]
    g, _ = glue_trees(stars)
    assert len(g.nodes) == (3 + 4 + 5) - 3 + 1


@given(st.integers(0, 10**6))
def test_glue_is_isometric(seed):
    rng = random.Random(seed)
    parts = []
    for i in range(rng.randint(1, 4)):
        n = rng.randint(1, 6)
        t = random_tree(rng, n, labels=[f"t{i}_{j}" for j in range(n)])
        parts.append((t, rng.choice(t.nodes)))
    g, hub = glue_trees(parts)
    dg = tree_metric(g)
    for t, a in parts:
        dt = tree_metric(t)
        ren = lambda v: hub if v == a else v  # noqa: E731
        assert all(dg.d(ren(x), ren(y)) == dt.d(x, y) for x in t.nodes for y in t.nodes)


@given(st.lists(st.integers(0, 3), min_size=1, max_size=7))
def test_quotient_lifts_back(cls):
    # points in the same class sit at the same location on a line
    labels = [f"q{i}" for i in range(len(cls))]
    sp = validate_space(labels, [[abs(a - b) for b in cls] for a in cls])
    qs, q = quotient_by_zero(sp)
    assert sorted(v for c in q.classes for v in c) == sorted(labels)
    for c, r in zip(q.classes, q.representative):
        assert r in c
    for x in labels:
        for y in labels:
            rx = q.representative[q.class_of(x)]
            ry = q.representative[q.class_of(y)]
            assert qs.d(rx, ry) == sp.d(x, y)
