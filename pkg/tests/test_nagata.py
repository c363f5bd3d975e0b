import random
from fractions import Fraction
from itertools import combinations

import networkx as nx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lipsel.geometry.norms import linf
from lipsel.geometry.polytope import hull
from lipsel.instance import SetValuedInstance
from lipsel.lab import random_tree
from lipsel.metric import WeightedTree, tree_metric, validate_space
from lipsel.nagata import (
    CoverError,
    Covering,
    PatchError,
    greedy_cover,
    lengthscale_constant,
    nagata_cover_metric_tree,
    patch_selections,
    path_space,
    solver_locals,
    tree_cover_supplier,
    verify_nagata_cover,
    whitney_partition,
)

seeds = st.integers(0, 10**6)
scales = st.sampled_from([Fraction(1, 2), 1, 2, 3, 4, 8])


def brute_force_nagata(tree, cov, c, C):
    """Independent check with networkx path lengths."""
    g = nx.Graph()
    g.add_nodes_from(tree.nodes)
    g.add_weighted_edges_from(tree.edges)
    dist = dict(nx.all_pairs_dijkstra_path_length(g))
    s = cov.scale
    if sorted(p for part in cov.parts for p in part) != sorted(tree.nodes):
        return False
    for part in cov.parts:
        if any(dist[x][y] > s for x in part for y in part):
            return False
    for x in tree.nodes:
        met = sum(1 for part in cov.parts if min(dist[x][p] for p in part) <= c * s)
        if met > C + 1:
            return False
    return True


def test_single_node_cover():
    t = WeightedTree(["a"], [])
    cov = nagata_cover_metric_tree(t, 1)
    assert cov.parts == (("a",),)


def test_nine_node_path():
    tree, sp = path_space(9)
    cov = nagata_cover_metric_tree(tree, 4)
    rep = verify_nagata_cover(sp, cov, Fraction(1, 16), 1)
    assert rep.ok and rep.max_parts_met <= 2


def test_nonpositive_scale():
    with pytest.raises(CoverError):
        nagata_cover_metric_tree(WeightedTree(["a"], []), 0)


@given(seeds, scales)
def test_tree_cover_passes_both_checks(seed, s):
    rng = random.Random(seed)
    tree = random_tree(rng, rng.randint(1, 15), den=2)
    cov = nagata_cover_metric_tree(tree, s)
    assert verify_nagata_cover(tree_metric(tree), cov, Fraction(1, 16), 1).ok
    assert brute_force_nagata(tree, cov, Fraction(1, 16), 1)


def test_singletons_on_uniform_space():
    sp = validate_space("abcd", [[int(i != j) for j in range(4)] for i in range(4)])
    cov = Covering(Fraction(1), tuple((p,) for p in sp.points))
    # radius c*s below the minimum distance: every ball meets one part
    assert verify_nagata_cover(sp, cov, Fraction(1, 2), 0).ok
    # radius reaching every point: four parts met, fine only when C + 1 >= 4
    assert not verify_nagata_cover(sp, cov, 1, 2).ok
    assert verify_nagata_cover(sp, cov, 1, 3).ok


def test_merged_parts_violate_diameter():
    tree, sp = path_space(6)
    cov = Covering(Fraction(2), (tuple(range(6)),))
    rep = verify_nagata_cover(sp, cov, Fraction(1, 16), 1)
    assert not rep.ok and rep.violation == "diameter"


def test_uncovered_and_foreign_points():
    _, sp = path_space(3)
    assert verify_nagata_cover(sp, Covering(Fraction(1), ((0,), (1,))), Fraction(1, 16), 1).violation == "uncovered"
    with pytest.raises(CoverError):
        verify_nagata_cover(sp, Covering(Fraction(1), ((0,), (1,), (2,), (7,))), Fraction(1, 16), 1)


@given(seeds, scales)
def test_greedy_cover_diameter(seed, s):
    rng = random.Random(seed)
    sp = tree_metric(random_tree(rng, rng.randint(1, 12)))
    cov = greedy_cover(sp, s)
    assert sorted(p for part in cov.parts for p in part) == sorted(sp.points)
    assert all(sp.d(x, y) <= s for part in cov.parts for x, y in combinations(part, 2))


def check_partition(W, space):
    for x in space.points:
        assert W.total(x) == 1
        assert sum(1 for e in W.entries if e.values[x]) <= W.multiplicity
        for e in W.entries:
            assert e.values[x] >= 0
            if space.d(x, e.center) >= W.a * e.r:
                assert e.values[x] == 0
    for e in W.entries:
        for x, y in combinations(space.points, 2):
            assert abs(e.values[x] - e.values[y]) * e.r <= W.lipschitz * space.d(x, y)


def test_one_point_partition():
    sp = validate_space(["a"], [[0]])
    W = whitney_partition(sp, {"a": 1})
    assert len(W.entries) == 1 and W.entries[0].values == {"a": 1}


def test_path_of_eight():
    tree, sp = path_space(8)
    W = whitney_partition(sp, {x: 1 for x in sp.points}, A=32, cover=tree_cover_supplier(tree))
    check_partition(W, sp)
    assert W.A >= 32


@given(seeds)
def test_partition_invariants_on_trees(seed):
    rng = random.Random(seed)
    tree = random_tree(rng, rng.randint(1, 10), den=2)
    sp = tree_metric(tree)
    r = {x: Fraction(rng.choice([1, 2, 4])) for x in sp.points}
    W = whitney_partition(sp, r, cover=tree_cover_supplier(tree))
    assert W.C_ls == lengthscale_constant(sp, r)
    check_partition(W, sp)


def test_lengthscale_constant():
    _, sp = path_space(3)
    assert lengthscale_constant(sp, {0: 1, 1: 2, 2: 8}) == 8
    assert lengthscale_constant(sp, {0: 1, 1: 1, 2: 1}) == 1


def test_patch_constant_local():
    tree, sp = path_space(4)
    W = whitney_partition(sp, {x: 1 for x in sp.points}, cover=tree_cover_supplier(tree))
    locals_ = {nu: ({x: (3, 1) for x in sp.points}, (3, 1)) for nu in range(len(W.entries))}
    res = patch_selections(W, locals_, linf(2))
    assert res.seminorm == 0
    assert all(v == (3, 1) for v in res.values.values())


def test_patch_missing_point():
    tree, sp = path_space(4)
    W = whitney_partition(sp, {x: 4 for x in sp.points}, cover=tree_cover_supplier(tree))
    with pytest.raises(PatchError):
        patch_selections(W, {nu: ({}, (0, 0)) for nu in range(len(W.entries))}, linf(2))


def test_patch_agreeing_locals():
    tree, sp = path_space(6)
    W = whitney_partition(sp, {x: 2 for x in sp.points}, cover=tree_cover_supplier(tree))
    f = {x: (Fraction(x), Fraction(x, 2)) for x in sp.points}
    res = patch_selections(W, {nu: (f, f[e.center]) for nu, e in enumerate(W.entries)}, linf(2))
    # every local is the same map, so the convex combination reproduces it
    assert res.values == f


@given(seeds)
def test_patched_solver_locals_stay_in_images(seed):
    rng = random.Random(seed)
    tree, sp = path_space(rng.randint(2, 7))
    images = {}
    for x in sp.points:
        a, b = sorted(Fraction(rng.randint(-6, 6), 2) for _ in range(2))
        images[x] = hull([(a,), (b,)])
    inst = SetValuedInstance(sp, linf(1), images, 1)
    W = whitney_partition(sp, {x: 2 for x in sp.points}, cover=tree_cover_supplier(tree))
    res = patch_selections(W, solver_locals(inst, W), linf(1))
    assert all(images[x].contains(v) for x, v in res.values.items())
    assert res.seminorm is not None and res.D_star == W.multiplicity
    for x, y in combinations(sp.points, 2):
        assert linf(1).gauge((res.values[x][0] - res.values[y][0],)) <= res.seminorm * sp.d(x, y)
