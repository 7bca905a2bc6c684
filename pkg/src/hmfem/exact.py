"""Exact rational scalars and small dense linear algebra.

gmpy2.mpq is the scalar for every certification path: determinants of
degree-of-freedom matrices are reported as exact rationals, and the bubble
and nodal-duality identities are asserted with zero tolerance.  Floating
point enters only after an exact object is converted for mesh-level work.

Matrices are plain lists of lists.  The sizes that occur (at most a few
hundred rows) do not justify anything fancier; what matters is that the
determinant path is fraction-free so intermediate growth stays polynomial.
"""

from __future__ import annotations

import math

from gmpy2 import lcm, mpq, mpz

QQ = mpq


class SingularMatrixError(ValueError):
    """Raised when an exact solve or inversion meets a singular matrix."""


def rational_str(x) -> str:
    """Format a rational as 'p/q', keeping the denominator even when 1."""
    q = mpq(x)
    return f"{q.numerator}/{q.denominator}"


def factorial(k: int):
    return mpz(math.factorial(k))


def binomial(k: int, j: int) -> int:
    if j < 0 or j > k:
        return 0
    return math.comb(k, j)


def mat_vec(a, v):
    return [sum((row[j] * v[j] for j in range(len(v))), mpq(0)) for row in a]


def _pivot_row(a, col, start):
    for i in range(start, len(a)):
        if a[i][col]:
            return i
    return None


def solve_dense(a, b):
    """Solve a x = b exactly by Gaussian elimination with exact pivoting."""
    n = len(a)
    m = [[mpq(x) for x in row] + [mpq(b[i])] for i, row in enumerate(a)]
    for k in range(n):
        p = _pivot_row(m, k, k)
        if p is None:
            raise SingularMatrixError("exact solve met a singular matrix")
        m[k], m[p] = m[p], m[k]
        inv = 1 / m[k][k]
        m[k] = [x * inv for x in m[k]]
        for i in range(n):
            if i != k and m[i][k]:
                f = m[i][k]
                m[i] = [x - f * y for x, y in zip(m[i], m[k])]
    return [m[i][n] for i in range(n)]


def invert_dense(a):
    """Exact inverse by Gauss-Jordan elimination."""
    n = len(a)
    m = [[mpq(x) for x in row] + [mpq(1 if i == j else 0) for j in range(n)]
         for i, row in enumerate(a)]
    for k in range(n):
        p = _pivot_row(m, k, k)
        if p is None:
            raise SingularMatrixError("exact inverse of a singular matrix")
        m[k], m[p] = m[p], m[k]
        inv = 1 / m[k][k]
        m[k] = [x * inv for x in m[k]]
        for i in range(n):
            if i != k and m[i][k]:
                f = m[i][k]
                m[i] = [x - f * y for x, y in zip(m[i], m[k])]
    return [row[n:] for row in m]


def rank_dense(a) -> int:
    """Exact rank by row echelon reduction."""
    if not a:
        return 0
    m = [[mpq(x) for x in row] for row in a]
    rows, cols = len(m), len(m[0])
    rank = 0
    for col in range(cols):
        p = _pivot_row(m, col, rank)
        if p is None:
            continue
        m[rank], m[p] = m[p], m[rank]
        inv = 1 / m[rank][col]
        m[rank] = [x * inv for x in m[rank]]
        for i in range(rows):
            if i != rank and m[i][col]:
                f = m[i][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[rank])]
        rank += 1
        if rank == rows:
            break
    return rank


def _bareiss_det(m) -> "mpz":
    """Fraction-free determinant of an integer matrix (destroys m)."""
    n = len(m)
    if n == 0:
        return mpz(1)
    sign = 1
    prev = mpz(1)
    for k in range(n - 1):
        if not m[k][k]:
            p = _pivot_row(m, k, k + 1)
            if p is None:
                return mpz(0)
            m[k], m[p] = m[p], m[k]
            sign = -sign
        pk = m[k][k]
        rk = m[k]
        for i in range(k + 1, n):
            ri = m[i]
            mik = ri[k]
            for j in range(k + 1, n):
                ri[j] = (pk * ri[j] - mik * rk[j]) // prev
            ri[k] = mpz(0)
        prev = pk
    return sign * m[n - 1][n - 1]


def determinant(a):
    """Exact determinant of a rational matrix.

    Each row is scaled to integers first so that the elimination itself runs
    on mpz with the Bareiss scheme (exact divisions, no rational blowup).
    """
    n = len(a)
    if n == 0:
        return mpq(1)
    scale = mpq(1)
    m = []
    for row in a:
        row = [mpq(x) for x in row]
        d = mpz(1)
        for x in row:
            d = lcm(d, x.denominator)
        scale *= d
        m.append([mpz(x * d) for x in row])
    return mpq(_bareiss_det(m)) / scale
