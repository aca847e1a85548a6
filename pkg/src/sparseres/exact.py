"""Small exact linear algebra over integers and rationals.

These routines work on lists of rows and keep entries as ``int`` or
``Fraction``; they are meant for matrices of size at most a few dozen.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

Row = Sequence


def _to_fracs(M) -> list[list[Fraction]]:
    return [[Fraction(x) for x in row] for row in M]


def rref(M) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form and the pivot columns."""
    A = _to_fracs(M)
    if not A:
        return A, []
    rows, cols = len(A), len(A[0])
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = next((i for i in range(r, rows) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        inv = 1 / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(rows):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
    return A, pivots


def rank(M) -> int:
    return len(rref(M)[1])


def independent_rows(M, order: Sequence[int] | None = None) -> list[int]:
    """Greedy maximal set of linearly independent rows, scanned in ``order``."""
    order = range(len(M)) if order is None else order
    basis: list[list[Fraction]] = []   # echelon rows
    lead: list[int] = []
    chosen: list[int] = []
    for idx in order:
        v = [Fraction(x) for x in M[idx]]
        for b, c in zip(basis, lead):
            if v[c] != 0:
                f = v[c]
                v = [x - f * y for x, y in zip(v, b)]
        c = next((j for j, x in enumerate(v) if x != 0), None)
        if c is None:
            continue
        inv = 1 / v[c]
        basis.append([x * inv for x in v])
        lead.append(c)
        chosen.append(idx)
    return chosen


def independent_columns(M, order: Sequence[int] | None = None) -> list[int]:
    if not M:
        return []
    T = [list(col) for col in zip(*M)]
    return independent_rows(T, order)


def solve(A, b) -> list[Fraction]:
    """Solve the square system ``A x = b`` exactly; raises on singular A."""
    n = len(A)
    aug = [list(row) + [rhs] for row, rhs in zip(A, b)]
    R, piv = rref(aug)
    if len(piv) < n or (piv and piv[-1] == n):
        raise ZeroDivisionError("singular system")
    return [R[i][n] for i in range(n)]


def nullspace_int(M, ncols: int) -> list[list[int]]:
    """Integer basis (primitive rows) of ``{x : M x = 0}``."""
    if not M:
        return [[int(i == j) for j in range(ncols)] for i in range(ncols)]
    R, piv = rref(M)
    free = [j for j in range(ncols) if j not in piv]
    out = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for i, p in enumerate(piv):
            v[p] = -R[i][f]
        out.append(primitive(v))
    return out


def primitive(v) -> list[int]:
    """Scale a rational vector to the primitive integer vector it spans."""
    v = [Fraction(x) for x in v]
    den = 1
    for x in v:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    return [x // g for x in ints] if g else ints


def det_int(M) -> int:
    """Bareiss fraction-free determinant of an integer matrix."""
    A = [list(map(int, row)) for row in M]
    n = len(A)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            p = next((i for i in range(k + 1, n) if A[i][k] != 0), None)
            if p is None:
                return 0
            A[k], A[p] = A[p], A[k]
            sign = -sign
        akk = A[k][k]
        for i in range(k + 1, n):
            aik = A[i][k]
            row_i, row_k = A[i], A[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
        prev = akk
    return sign * A[n - 1][n - 1]


def det_frac(M) -> Fraction:
    """Exact determinant of a rational matrix (row-scaled to integers)."""
    scale = Fraction(1)
    rows = []
    for row in M:
        row = [Fraction(x) for x in row]
        den = 1
        for x in row:
            den = den * x.denominator // gcd(den, x.denominator)
        rows.append([int(x * den) for x in row])
        scale /= den
    return det_int(rows) * scale
