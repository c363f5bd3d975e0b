"""Exact rational linear programming.

``linprog`` minimizes ``c.x`` subject to ``A_ub x <= b_ub``, ``A_eq x == b_eq``
and per-variable lower bounds (``None`` means free). All data are exact
rationals; the optimum and the optimal vertex are returned as ``Fraction``.

The pivot loop runs in a compiled kernel when the extension is built and in
``_kernel_py`` otherwise. Set ``LIPSEL_PURE_PYTHON=1`` to force the fallback.
Both kernels follow the same pivoting rule, so results are identical.
"""

from __future__ import annotations

import importlib
import os
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Optional, Sequence

from . import _kernel_py


def _compiled():
    # the submodule is imported by full name: a package attribute of the same
    # name would otherwise shadow it
    return importlib.import_module(__name__ + "._kernel")


if os.environ.get("LIPSEL_PURE_PYTHON", "") not in ("", "0"):
    _active = _kernel_py
    KERNEL = "python"
else:
    try:
        _active = _compiled()
        KERNEL = "compiled"
    except ImportError:  # extension not built
        _active = _kernel_py
        KERNEL = "python"

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

MAX_ITER = 200_000


class LPError(RuntimeError):
    pass


@dataclass(frozen=True)
class LPResult:
    status: str
    x: Optional[tuple] = None
    value: Optional[Fraction] = None
    pivots: int = 0

    @property
    def ok(self) -> bool:
        return self.status == OPTIMAL


def use_kernel(name: str) -> None:
    """Switch the active pivot kernel ("python" or "compiled")."""
    global _active, KERNEL
    if name == "python":
        _active, KERNEL = _kernel_py, "python"
    elif name == "compiled":
        _active, KERNEL = _compiled(), "compiled"
    else:
        raise ValueError(name)


def compiled_available() -> bool:
    try:
        _compiled()
    except ImportError:
        return False
    return True


def _int_row(values) -> list:
    """Smallest integer row with the same direction (values are int or Fraction)."""
    den = 1
    for v in values:
        q = v.denominator
        if q != 1:
            den = den * q // gcd(den, q)
    row = [v.numerator * (den // v.denominator) for v in values]
    g = gcd(*row) if row else 0
    if g > 1:
        row = [v // g for v in row]
    return row


def linprog(
    c: Sequence,
    A_ub: Sequence[Sequence] = (),
    b_ub: Sequence = (),
    A_eq: Sequence[Sequence] = (),
    b_eq: Sequence = (),
    lower: Optional[Sequence] = None,
) -> LPResult:
    """Minimize ``c.x``. ``lower[j]`` is a rational lower bound or ``None`` (free);
    the default is ``x >= 0`` for every variable."""
    n = len(c)
    c = [Fraction(v) for v in c]
    if lower is None:
        lower = [0] * n
    else:
        lower = [None if v is None else Fraction(v) for v in lower]
    shifted = [j for j in range(n) if lower[j] is not None and lower[j] != 0]

    # column map: structural j -> (col, sign) pairs; free vars are split
    cols: list = []
    ncol = 0
    for j in range(n):
        if lower[j] is None:
            cols.append(((ncol, 1), (ncol + 1, -1)))
            ncol += 2
        else:
            cols.append(((ncol, 1),))
            ncol += 1
    n_struct = ncol
    plain = ncol == n

    def prepare(a, b):
        # integer row over the structural columns plus the shifted rhs
        if shifted:
            b = Fraction(b)
            for j in shifted:
                if a[j]:
                    b -= a[j] * lower[j]
        irow = _int_row(list(a) + [b])
        if plain:
            return irow[:-1], irow[-1]
        out = [0] * n_struct
        for j in range(n):
            v = irow[j]
            if v:
                for col, sgn in cols[j]:
                    out[col] = v * sgn
        return out, irow[-1]

    ub_rows = []
    for a, b in zip(A_ub, b_ub):
        coeffs, rhs = prepare(a, b)
        if not any(coeffs):
            if rhs < 0:
                return LPResult(INFEASIBLE)
            continue
        ub_rows.append((coeffs, rhs))
    eq_rows = []
    for a, b in zip(A_eq, b_eq):
        coeffs, rhs = prepare(a, b)
        if not any(coeffs):
            if rhs != 0:
                return LPResult(INFEASIBLE)
            continue
        eq_rows.append((coeffs, rhs))

    n_slack = len(ub_rows)
    n_art = sum(1 for _, b in ub_rows if b < 0) + len(eq_rows)
    width = n_struct + n_slack + n_art
    rows = [None]
    basis = [-1]
    art = n_struct + n_slack
    art_rows = []
    for k, (coeffs, rhs) in enumerate(ub_rows):
        sign = -1 if rhs < 0 else 1
        if sign < 0:
            coeffs = [-v for v in coeffs]
            rhs = -rhs
        full = coeffs + [0] * (n_slack + n_art) + [rhs]
        full[n_struct + k] = sign
        if sign < 0:
            full[art] = 1
            basis.append(art)
            art_rows.append(len(rows))
            art += 1
        else:
            basis.append(n_struct + k)
        rows.append(full)
    for coeffs, rhs in eq_rows:
        if rhs < 0:
            coeffs = [-v for v in coeffs]
            rhs = -rhs
        full = coeffs + [0] * (n_slack + n_art) + [rhs]
        full[art] = 1
        basis.append(art)
        art_rows.append(len(rows))
        art += 1
        rows.append(full)

    dens = [1] * len(rows)
    total_pivots = 0
    n_nonart = n_struct + n_slack

    if art_rows:
        obj = [0] * (width + 1)
        for i in art_rows:
            r = rows[i]
            for j in range(n_nonart):
                obj[j] -= r[j]
            obj[-1] -= r[-1]
        rows[0] = obj
        dens[0] = 1
        status, piv = _active.run_simplex(rows, dens, basis, n_nonart, MAX_ITER)
        total_pivots += piv
        if status != _kernel_py.OPTIMAL:
            raise LPError(f"phase 1 ended with status {status}")
        if rows[0][-1] != 0:
            return LPResult(INFEASIBLE, pivots=total_pivots)
        # drive remaining artificials out of the basis (their level is zero)
        i = 1
        while i < len(rows):
            if basis[i] >= n_nonart:
                row = rows[i]
                j = next((j for j in range(n_nonart) if row[j]), -1)
                if j < 0:
                    del rows[i]
                    del dens[i]
                    del basis[i]
                    continue
                _active.pivot(rows, dens, i, j)
                basis[i] = j
                total_pivots += 1
            i += 1

    # phase 2 reduced costs d_j = c_j - sum_i c_B(i) * a_ij, scaled to integers;
    # any positive multiple of the cost row drives the same pivots
    cden = 1
    for v in c:
        q = v.denominator
        if q != 1:
            cden = cden * q // gcd(cden, q)
    cost = [0] * width
    for j in range(n):
        if c[j]:
            cj = c[j].numerator * (cden // c[j].denominator)
            for col, sgn in cols[j]:
                cost[col] = cj * sgn
    used = [i for i in range(1, len(rows)) if cost[basis[i]]]
    L = 1
    for i in used:
        q = dens[i]
        L = L * q // gcd(L, q)
    red = [v * L for v in cost] + [0]
    for i in used:
        factor = cost[basis[i]] * (L // dens[i])
        for j, v in enumerate(rows[i]):
            if v:
                red[j] -= factor * v
    for j in range(n_nonart, width):
        red[j] = 0
    g = gcd(*red)
    rows[0] = [v // g for v in red] if g > 1 else red
    dens[0] = 1
    status, piv = _active.run_simplex(rows, dens, basis, n_nonart, MAX_ITER)
    total_pivots += piv
    if status == _kernel_py.UNBOUNDED:
        return LPResult(UNBOUNDED, pivots=total_pivots)
    if status != _kernel_py.OPTIMAL:
        raise LPError("iteration limit reached")

    values = [Fraction(0)] * width
    for i in range(1, len(rows)):
        values[basis[i]] = Fraction(rows[i][-1], dens[i])
    x = []
    for j in range(n):
        v = sum((values[col] * sgn for col, sgn in cols[j]), Fraction(0))
        if lower[j]:
            v += lower[j]
        x.append(v)
    value = sum((cj * xj for cj, xj in zip(c, x)), Fraction(0))
    return LPResult(OPTIMAL, tuple(x), value, total_pivots)


def feasible_point(A_ub, b_ub, A_eq=(), b_eq=(), lower=None, n=None) -> Optional[tuple]:
    """Any feasible point (the vertex reached by phase 1) or ``None``."""
    if n is None:
        n = len(A_ub[0]) if A_ub else len(A_eq[0])
    res = linprog([0] * n, A_ub, b_ub, A_eq, b_eq, lower)
    return res.x if res.ok else None


def maximize(c, A_ub, b_ub, A_eq=(), b_eq=(), lower=None) -> LPResult:
    res = linprog([-Fraction(v) for v in c], A_ub, b_ub, A_eq, b_eq, lower)
    if res.ok:
        return LPResult(res.status, res.x, -res.value, res.pivots)
    return res
