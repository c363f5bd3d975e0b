# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled simplex kernel; same contract and pivoting rule as ``_kernel_py``.

``run_simplex`` first runs on a machine-integer copy of the tableau, with
128-bit intermediates and range checks on every stored entry. If any entry
would leave the 62-bit range the copy is discarded and the run repeats on
Python integers, so both paths produce the same pivots and the same result.
"""

from libc.stdlib cimport malloc, free
from math import gcd

cdef extern from *:
    ctypedef long long i128 "__int128"

ctypedef long long i64

cdef int OPTIMAL = 0
cdef int UNBOUNDED = 1
cdef int ITERATION_LIMIT = 2
cdef int OVERFLOW = 3

cdef i64 LIMIT = (<i64>1) << 62


cdef inline i64 _gcd(i64 a, i64 b) nogil:
    if a < 0:
        a = -a
    if b < 0:
        b = -b
    while b:
        a, b = b, a % b
    return a


cdef int _pivot_fast(i64* T, i64* D, Py_ssize_t nrows, Py_ssize_t width,
                     Py_ssize_t r, Py_ssize_t c, i128* buf, Py_ssize_t* nz) nogil:
    cdef i64* prow = T + r * width
    cdef i64* row
    cdef i64 p = prow[c]
    cdef i64 f, g, d
    cdef i128 x, dd
    cdef Py_ssize_t i, j, k, nnz
    if p < 0:
        for j in range(width):
            prow[j] = -prow[j]
        p = -p
    g = p
    for j in range(width):
        if prow[j]:
            g = _gcd(g, prow[j])
            if g == 1:
                break
    if g > 1:
        for j in range(width):
            prow[j] = prow[j] // g
        p = p // g
    D[r] = p
    nnz = 0
    for j in range(width):
        if prow[j]:
            nz[nnz] = j
            nnz += 1
    for i in range(nrows):
        if i == r:
            continue
        row = T + i * width
        f = row[c]
        if f == 0:
            continue
        for j in range(width):
            buf[j] = (<i128>row[j]) * p
        for k in range(nnz):
            j = nz[k]
            buf[j] = buf[j] - (<i128>f) * prow[j]
        dd = (<i128>D[i]) * p
        # reduce by the content before the range check
        g = 0
        for j in range(width):
            x = buf[j]
            if x:
                if x >= LIMIT or x <= -LIMIT:
                    g = 0
                    break
                g = _gcd(g, <i64>x) if g else (<i64>(x if x > 0 else -x))
        if g == 0:
            # some entry is large: reduce with an exact 128-bit gcd
            g = -1
        if g == -1:
            return OVERFLOW
        if dd >= LIMIT:
            if dd % g:
                return OVERFLOW
        g = _gcd(g, <i64>(dd % g)) if g > 1 else g
        if g > 1:
            for j in range(width):
                buf[j] = buf[j] // g
            dd = dd // g
        if dd >= LIMIT:
            return OVERFLOW
        for j in range(width):
            row[j] = <i64>buf[j]
        D[i] = <i64>dd
    return OPTIMAL


cdef int _run_fast(i64* T, i64* D, Py_ssize_t* B, Py_ssize_t nrows, Py_ssize_t width,
                   Py_ssize_t n_enter, Py_ssize_t max_iter, Py_ssize_t* count,
                   i128* buf, Py_ssize_t* nz) nogil:
    cdef Py_ssize_t c, r, i, j
    cdef i64 a, rhs, bn, bd
    cdef i128 lhs, rc
    cdef int st
    count[0] = 0
    while count[0] < max_iter:
        c = -1
        for j in range(n_enter):
            if T[j] < 0:
                c = j
                break
        if c < 0:
            return OPTIMAL
        r = -1
        bn = 0
        bd = 1
        for i in range(1, nrows):
            a = T[i * width + c]
            if a <= 0:
                continue
            rhs = T[i * width + width - 1]
            if r < 0:
                r = i
                bn = rhs
                bd = a
                continue
            lhs = (<i128>rhs) * bd
            rc = (<i128>bn) * a
            if lhs < rc or (lhs == rc and B[i] < B[r]):
                r = i
                bn = rhs
                bd = a
        if r < 0:
            return UNBOUNDED
        st = _pivot_fast(T, D, nrows, width, r, c, buf, nz)
        if st != OPTIMAL:
            return st
        B[r] = c
        count[0] += 1
    return ITERATION_LIMIT


cpdef void pivot(list rows, list dens, Py_ssize_t r, Py_ssize_t c):
    cdef list prow = rows[r]
    cdef list row, new, nz
    cdef Py_ssize_t i, j, k, n, nrows
    cdef object p, f, g, d, v
    p = prow[c]
    n = len(prow)
    if p < 0:
        prow = [-v for v in prow]
        p = -p
    g = gcd(p, *prow)
    if g > 1:
        prow = [v // g for v in prow]
        p = p // g
    rows[r] = prow
    dens[r] = p
    nz = []
    for j in range(n):
        if prow[j]:
            nz.append(j)
    nrows = len(rows)
    for i in range(nrows):
        if i == r:
            continue
        row = <list>rows[i]
        f = row[c]
        if not f:
            continue
        new = [v * p for v in row]
        for k in range(len(nz)):
            j = nz[k]
            new[j] = new[j] - f * prow[j]
        d = dens[i] * p
        g = gcd(d, *new)
        if g > 1:
            new = [v // g for v in new]
            d = d // g
        rows[i] = new
        dens[i] = d


cpdef Py_ssize_t choose_entering(list obj, Py_ssize_t n_enter):
    cdef Py_ssize_t j
    for j in range(n_enter):
        if obj[j] < 0:
            return j
    return -1


cpdef Py_ssize_t choose_leaving(list rows, list basis, Py_ssize_t c):
    cdef Py_ssize_t best = -1
    cdef Py_ssize_t i, nrows = len(rows)
    cdef list row
    cdef object a, rhs, bn = 0, bd = 1, lhs, rc
    for i in range(1, nrows):
        row = <list>rows[i]
        a = row[c]
        if a <= 0:
            continue
        rhs = row[len(row) - 1]
        if best < 0:
            best = i
            bn = rhs
            bd = a
            continue
        lhs = rhs * bd
        rc = bn * a
        if lhs < rc or (lhs == rc and basis[i] < basis[best]):
            best = i
            bn = rhs
            bd = a
    return best


def run_simplex_objects(list rows, list dens, list basis, Py_ssize_t n_enter, Py_ssize_t max_iter):
    cdef Py_ssize_t count = 0
    cdef Py_ssize_t c, r
    while count < max_iter:
        c = choose_entering(<list>rows[0], n_enter)
        if c < 0:
            return OPTIMAL, count
        r = choose_leaving(rows, basis, c)
        if r < 0:
            return UNBOUNDED, count
        pivot(rows, dens, r, c)
        basis[r] = c
        count += 1
    return ITERATION_LIMIT, count


def run_simplex(list rows, list dens, list basis, Py_ssize_t n_enter, Py_ssize_t max_iter):
    cdef Py_ssize_t nrows = len(rows)
    cdef Py_ssize_t width = len(<list>rows[0])
    cdef Py_ssize_t i, j, count = 0
    cdef int st = OVERFLOW
    cdef list row
    cdef object v
    cdef i64* T = <i64*>malloc(nrows * width * sizeof(i64))
    cdef i64* D = <i64*>malloc(nrows * sizeof(i64))
    cdef Py_ssize_t* B = <Py_ssize_t*>malloc(nrows * sizeof(Py_ssize_t))
    cdef i128* buf = <i128*>malloc(width * sizeof(i128))
    cdef Py_ssize_t* nz = <Py_ssize_t*>malloc(width * sizeof(Py_ssize_t))
    try:
        if T == NULL or D == NULL or B == NULL or buf == NULL or nz == NULL:
            raise MemoryError()
        for i in range(nrows):
            row = <list>rows[i]
            for j in range(width):
                v = row[j]
                if not (-LIMIT < v < LIMIT):
                    break
                T[i * width + j] = v
            else:
                v = dens[i]
                if v < LIMIT:
                    D[i] = v
                    B[i] = basis[i]
                    continue
            break
        else:
            with nogil:
                st = _run_fast(T, D, B, nrows, width, n_enter, max_iter, &count, buf, nz)
        if st == OVERFLOW:
            return run_simplex_objects(rows, dens, basis, n_enter, max_iter)
        for i in range(nrows):
            rows[i] = [T[i * width + j] for j in range(width)]
            dens[i] = D[i]
            if i:
                basis[i] = B[i]
        return st, count
    finally:
        free(T)
        free(D)
        free(B)
        free(buf)
        free(nz)
