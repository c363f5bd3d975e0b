"""Exact simplex against a floating-point oracle and a brute-force vertex enumerator."""

import random
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import linprog as scipy_linprog

from lipsel import lp
from lipsel.geometry.linalg import solve
from lipsel.lp import INFEASIBLE, OPTIMAL, UNBOUNDED, feasible_point, linprog

small = st.integers(-5, 5)


def brute_force_min(c, A, b):
    """Minimum of c.x over {Ax <= b, x >= 0} by enumerating basic solutions."""
    n = len(c)
    rows = [list(map(Fraction, r)) for r in A] + [[-int(i == j) for j in range(n)] for i in range(n)]
    rhs = list(map(Fraction, b)) + [0] * n
    best = None
    for idx in combinations(range(len(rows)), n):
        x = solve([rows[i] for i in idx], [rhs[i] for i in idx])
        if x is None:
            continue
        if all(sum(r[j] * x[j] for j in range(n)) <= h for r, h in zip(rows, rhs)):
            v = sum(c[j] * x[j] for j in range(n))
            best = v if best is None or v < best else best
    return best


@pytest.fixture(params=["python", "compiled"])
def kernel(request):
    if request.param == "compiled" and not lp.compiled_available():
        pytest.skip("compiled kernel not built")
    old = lp.KERNEL
    lp.use_kernel(request.param)
    yield request.param
    lp.use_kernel(old)


def test_textbook(kernel):
    # max 3x + 5y  s.t. x <= 4, 2y <= 12, 3x + 2y <= 18
    res = linprog([-3, -5], [[1, 0], [0, 2], [3, 2]], [4, 12, 18])
    assert res.status == OPTIMAL
    assert res.value == -36
    assert res.x == (2, 6)


def test_statuses(kernel):
    assert linprog([1], [[1]], [-1]).status == INFEASIBLE
    assert linprog([-1], [[-1]], [0]).status == UNBOUNDED
    res = linprog([1, 1], A_eq=[[1, 1]], b_eq=[Fraction(7, 3)])
    assert res.ok and res.value == Fraction(7, 3)


def test_free_and_shifted_bounds(kernel):
    res = linprog([1], [[-1]], [5], lower=[None])
    assert res.value == -5
    res = linprog([1, 0], [[1, 1]], [10], lower=[Fraction(3, 2), -2])
    assert res.value == Fraction(3, 2)


@given(
    st.integers(1, 3).flatmap(
        lambda n: st.tuples(
            st.lists(small, min_size=n, max_size=n),
            st.lists(st.lists(small, min_size=n, max_size=n), min_size=1, max_size=4),
            st.lists(st.integers(-3, 8), min_size=4, max_size=4),
        )
    )
)
def test_matches_vertex_enumeration(data):
    c, A, b = data
    b = b[: len(A)]
    # bound the region so that the optimum sits at a basic solution
    A = A + [[1] * len(c)]
    b = b + [10]
    res = linprog(c, A, b)
    best = brute_force_min(c, A, b)
    if best is None:
        assert res.status == INFEASIBLE
    else:
        assert res.ok and res.value == best


def test_matches_scipy_on_random_problems():
    rng = random.Random(7)
    for _ in range(60):
        n, k = rng.randint(2, 5), rng.randint(2, 7)
        c = [rng.randint(-5, 5) for _ in range(n)]
        A = [[rng.randint(-4, 6) for _ in range(n)] for _ in range(k)]
        b = [rng.randint(-2, 12) for _ in range(k)]
        ours = linprog(c, A, b, lower=[-3] * n)
        ref = scipy_linprog(c, A_ub=A, b_ub=b, bounds=[(-3, None)] * n, method="highs")
        if ref.status == 2:
            assert ours.status == INFEASIBLE
        elif ref.status == 3:
            assert ours.status == UNBOUNDED
        else:
            assert ours.ok
            assert abs(float(ours.value) - ref.fun) < 1e-7


def test_kernels_agree_exactly():
    if not lp.compiled_available():
        pytest.skip("compiled kernel not built")
    rng = random.Random(11)
    old = lp.KERNEL
    try:
        for _ in range(40):
            n, k = rng.randint(2, 6), rng.randint(2, 8)
            c = [Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(n)]
            A = [[Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(n)] for _ in range(k)]
            b = [Fraction(rng.randint(-3, 20), rng.randint(1, 3)) for _ in range(k)]
            out = []
            for name in ("python", "compiled"):
                lp.use_kernel(name)
                out.append(linprog(c, A, b, lower=[-5] * n))
            assert out[0] == out[1]
    finally:
        lp.use_kernel(old)


def test_compiled_falls_back_on_huge_entries():
    if not lp.compiled_available():
        pytest.skip("compiled kernel not built")
    big = 10**30
    old = lp.KERNEL
    try:
        lp.use_kernel("compiled")
        res = linprog([-1, -1], [[big, 1], [1, big + 1]], [big + 1, big + 2])
        lp.use_kernel("python")
        assert res == linprog([-1, -1], [[big, 1], [1, big + 1]], [big + 1, big + 2])
    finally:
        lp.use_kernel(old)


def test_feasible_point():
    p = feasible_point([[1, 1], [-1, 0], [0, -1]], [1, 0, 0], lower=[None, None])
    assert p is not None and sum(p) <= 1 and min(p) >= 0
    assert feasible_point([[1], [-1]], [0, -1], lower=[None]) is None


def test_switching_really_changes_the_kernel():
    if not lp.compiled_available():
        pytest.skip("compiled kernel not built")
    old = lp.KERNEL
    try:
        lp.use_kernel("python")
        assert lp._active is lp._kernel_py
        lp.use_kernel("compiled")
        assert lp._active is not lp._kernel_py
        assert lp._active.__file__.endswith((".so", ".pyd"))
    finally:
        lp.use_kernel(old)


def test_mid_run_overflow_matches_python():
    # entries start below 2**62 but pivoting products exceed it
    if not lp.compiled_available():
        pytest.skip("compiled kernel not built")
    rng = random.Random(5)
    old = lp.KERNEL
    try:
        for _ in range(10):
            n = 5
            c = [-rng.randint(1, 2**40) for _ in range(n)]
            A = [[rng.randint(1, 2**40) for _ in range(n)] for _ in range(6)]
            b = [rng.randint(2**40, 2**41) for _ in range(6)]
            out = []
            for name in ("python", "compiled"):
                lp.use_kernel(name)
                out.append(linprog(c, A, b))
            assert out[0] == out[1] and out[0].ok
    finally:
        lp.use_kernel(old)
