"""Pure-Python simplex kernel.

Tableau layout shared with the compiled twin (``_kernel.pyx``):

* ``rows[0]`` is the reduced-cost row, ``rows[1:]`` the constraint rows;
  every row is a list of Python ints whose last entry is the right-hand side.
* ``dens[i] > 0`` is the denominator of row ``i``; the represented value of
  entry ``j`` is ``rows[i][j] / dens[i]``.
* ``basis[i]`` is the basic column of row ``i`` (``basis[0]`` is unused).

A pivot touches only rows with a nonzero entry in the pivot column and then
divides each touched row by its content (gcd), which keeps integers short.
"""

from math import gcd

OPTIMAL = 0
UNBOUNDED = 1
ITERATION_LIMIT = 2


def pivot(rows, dens, r, c):
    prow = rows[r]
    p = prow[c]
    if p < 0:
        prow = [-v for v in prow]
        p = -p
    g = gcd(p, *prow)
    if g > 1:
        prow = [v // g for v in prow]
        p //= g
    rows[r] = prow
    dens[r] = p
    nz = [j for j, v in enumerate(prow) if v]
    for i in range(len(rows)):
        if i == r:
            continue
        row = rows[i]
        f = row[c]
        if not f:
            continue
        new = [v * p for v in row]
        for j in nz:
            new[j] -= f * prow[j]
        d = dens[i] * p
        g = gcd(d, *new)
        if g > 1:
            new = [v // g for v in new]
            d //= g
        rows[i] = new
        dens[i] = d


def choose_entering(obj, n_enter):
    # Bland: lowest-index column with negative reduced cost.
    for j in range(n_enter):
        if obj[j] < 0:
            return j
    return -1


def choose_leaving(rows, basis, c):
    best = -1
    bn = 0
    bd = 1
    for i in range(1, len(rows)):
        row = rows[i]
        a = row[c]
        if a <= 0:
            continue
        rhs = row[-1]
        if best < 0:
            best, bn, bd = i, rhs, a
            continue
        lhs = rhs * bd
        rhs_cmp = bn * a
        if lhs < rhs_cmp or (lhs == rhs_cmp and basis[i] < basis[best]):
            best, bn, bd = i, rhs, a
    return best


def run_simplex(rows, dens, basis, n_enter, max_iter):
    """Iterate Bland pivots until optimal/unbounded. Returns (status, pivots)."""
    count = 0
    while count < max_iter:
        c = choose_entering(rows[0], n_enter)
        if c < 0:
            return OPTIMAL, count
        r = choose_leaving(rows, basis, c)
        if r < 0:
            return UNBOUNDED, count
        pivot(rows, dens, r, c)
        basis[r] = c
        count += 1
    return ITERATION_LIMIT, count
