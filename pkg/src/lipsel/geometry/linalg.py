"""Small exact linear algebra over the rationals."""

from __future__ import annotations

from fractions import Fraction
from typing import List, Sequence, Tuple


def rref(rows: Sequence[Sequence]) -> Tuple[List[list], List[int]]:
    """Reduced row echelon form. Returns (nonzero rows, pivot columns)."""
    m = [[Fraction(v) for v in r] for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        if r == len(m):
            break
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        piv = m[r][c]
        if piv != 1:
            m[r] = [v / piv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return m[:r], pivots


def rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[1])


def nullspace(rows: Sequence[Sequence], n: int) -> List[tuple]:
    """Basis of {x in Q^n : r.x = 0 for every row r}, one vector per free column."""
    if not rows:
        return [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]
    red, piv = rref(rows)
    free = [j for j in range(n) if j not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for row, p in zip(red, piv):
            v[p] = -row[f]
        basis.append(tuple(v))
    return basis


def solve(a: Sequence[Sequence], b: Sequence) -> tuple | None:
    """Unique solution of the square system a x = b, or None if singular."""
    n = len(a)
    aug = [list(row) + [bi] for row, bi in zip(a, b)]
    red, piv = rref(aug)
    if piv != list(range(n)):
        return None
    return tuple(red[i][n] for i in range(n))


def inverse(a: Sequence[Sequence]) -> List[list] | None:
    n = len(a)
    aug = [[Fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    red, piv = rref(aug)
    if piv[:n] != list(range(n)) or len(red) < n:
        return None
    return [row[n:] for row in red]


def det(a: Sequence[Sequence]):
    """Determinant by Bareiss elimination (exact for ints and Fractions)."""
    m = [list(r) for r in a]
    n = len(m)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            sw = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if sw is None:
                return 0
            m[k], m[sw] = m[sw], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = m[i][j] * m[k][k] - m[i][k] * m[k][j]
                m[i][j] = num / prev if isinstance(num, Fraction) else num // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def transpose(a: Sequence[Sequence]) -> List[list]:
    return [list(col) for col in zip(*a)]
