"""Numeric hot loops, each with a numba version and a numpy fallback.

The public names at the bottom of the module are bound to one of the two
implementations according to :data:`sparseres._accel.USE_NUMBA`.  Both
variants implement the same algorithm step for step, so their results agree
up to floating point reassociation.

Kernels:

* ``simplex``: dense two-phase simplex for ``min c.x, A x = b, x >= 0``.
* ``max_slack``: the dual of the cell-feasibility LP used by the mixed cell
  search; returns the largest uniform slack ``t`` of a lower-face system.
* ``classify_box``: exact integer point-in-shifted-polytope test.
* ``monomial_values``: complex Laurent monomials at many points.
* ``det_mod_p``: determinant of an integer matrix modulo a prime.
* ``lu_complete``: Gaussian elimination with complete pivoting that stops
  at the first pivot below a threshold; rows can be released in stages.
"""
from __future__ import annotations

import numpy as np

from ._accel import USE_NUMBA, njit

OPTIMAL = 0
INFEASIBLE = 1
UNBOUNDED = 2
ITERATION_LIMIT = 3

# after this many consecutive degenerate pivots the entering rule switches
# from Dantzig to Bland, which cannot cycle
_BLAND_AFTER = 30


# ---------------------------------------------------------------------------
# simplex, loop version


@njit
def _pivot_loops(T, basis, r, j):
    rows, width = T.shape
    piv = T[r, j]
    for k in range(width):
        T[r, k] /= piv
    for i in range(rows):
        if i != r:
            f = T[i, j]
            if f != 0.0:
                for k in range(width):
                    T[i, k] -= f * T[r, k]
            T[i, j] = 0.0
    T[r, j] = 1.0
    basis[r] = j


@njit
def _iterate_loops(T, basis, ncols, dtol, ptol, max_iter):
    m = T.shape[0] - 1
    last = T.shape[1] - 1
    degenerate = 0
    for _ in range(max_iter):
        bland = degenerate > _BLAND_AFTER
        j = -1
        best = -dtol
        for k in range(ncols):
            d = T[m, k]
            if d < -dtol:
                if bland:
                    j = k
                    break
                if d < best:
                    best = d
                    j = k
        if j < 0:
            return OPTIMAL
        r = -1
        ratio = 0.0
        for i in range(m):
            a = T[i, j]
            if a > ptol:
                q = T[i, last] / a
                if r < 0:
                    r = i
                    ratio = q
                    continue
                slack = 1e-12 * (1.0 + abs(ratio))
                if q < ratio - slack:
                    r = i
                    ratio = q
                elif q <= ratio + slack:
                    if bland:
                        if basis[i] < basis[r]:
                            r = i
                            ratio = q
                    elif a > T[r, j]:
                        r = i
                        ratio = q
        if r < 0:
            return UNBOUNDED
        if ratio <= ptol:
            degenerate += 1
        else:
            degenerate = 0
        _pivot_loops(T, basis, r, j)
    return ITERATION_LIMIT


@njit
def _simplex_loops(A, b, c, tol, max_iter):
    m, n = A.shape
    width = n + m + 1
    last = width - 1
    T = np.zeros((m + 1, width))
    basis = np.empty(m, np.int64)
    bscale = 1.0
    for i in range(m):
        sgn = 1.0 if b[i] >= 0.0 else -1.0
        for j in range(n):
            T[i, j] = sgn * A[i, j]
        T[i, n + i] = 1.0
        T[i, last] = sgn * b[i]
        bscale = max(bscale, abs(b[i]))
        basis[i] = n + i
    for j in range(n):
        s = 0.0
        for i in range(m):
            s += T[i, j]
        T[m, j] = -s
    s = 0.0
    for i in range(m):
        s += T[i, last]
    T[m, last] = -s

    x = np.zeros(n)
    status = _iterate_loops(T, basis, n, tol, tol, max_iter)
    if status == ITERATION_LIMIT:
        return status, x, np.nan, basis
    if -T[m, last] > 1e-8 * bscale:
        return INFEASIBLE, x, np.nan, basis
    # drive artificial variables out of the basis; rows where no original
    # column can enter are redundant and keep a zero artificial
    for i in range(m):
        if basis[i] >= n:
            best = -1
            bestval = tol
            for j in range(n):
                if abs(T[i, j]) > bestval:
                    bestval = abs(T[i, j])
                    best = j
            if best >= 0:
                _pivot_loops(T, basis, i, best)

    cscale = 1.0
    for j in range(n):
        cscale = max(cscale, abs(c[j]))
    for k in range(width):
        T[m, k] = 0.0
    for j in range(n):
        T[m, j] = c[j]
    for i in range(m):
        bj = basis[i]
        if bj < n and c[bj] != 0.0:
            f = c[bj]
            for k in range(width):
                T[m, k] -= f * T[i, k]
    status = _iterate_loops(T, basis, n, tol * cscale, tol, max_iter)
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = T[i, last]
    return status, x, -T[m, last], basis


@njit
def _max_slack_loops(G, h, E, w, tol, max_iter):
    # dual of: max t s.t. G a - t >= h, E a = w, t <= 1
    m, n = G.shape
    k = E.shape[0]
    cols = m + 2 * k + 1
    A = np.zeros((n + 1, cols))
    b = np.zeros(n + 1)
    c = np.zeros(cols)
    for i in range(m):
        for j in range(n):
            A[j, i] = -G[i, j]
        A[n, i] = 1.0
        c[i] = -h[i]
    for i in range(k):
        for j in range(n):
            A[j, m + i] = E[i, j]
            A[j, m + k + i] = -E[i, j]
        c[m + i] = w[i]
        c[m + k + i] = -w[i]
    A[n, cols - 1] = 1.0
    c[cols - 1] = 1.0
    b[n] = 1.0
    status, x, obj, basis = _simplex_loops(A, b, c, tol, max_iter)
    if status == OPTIMAL:
        return obj
    if status == UNBOUNDED:
        return -np.inf
    return np.nan


# ---------------------------------------------------------------------------
# simplex, numpy version


def _pivot_np(T, basis, r, j):
    T[r] /= T[r, j]
    col = T[:, j].copy()
    col[r] = 0.0
    T -= np.outer(col, T[r])
    T[:, j] = 0.0
    T[r, j] = 1.0
    basis[r] = j


def _iterate_np(T, basis, ncols, dtol, ptol, max_iter):
    m = T.shape[0] - 1
    degenerate = 0
    for _ in range(max_iter):
        bland = degenerate > _BLAND_AFTER
        d = T[m, :ncols]
        neg = np.flatnonzero(d < -dtol)
        if neg.size == 0:
            return OPTIMAL
        j = int(neg[0]) if bland else int(neg[np.argmin(d[neg])])
        a = T[:m, j]
        rows = np.flatnonzero(a > ptol)
        if rows.size == 0:
            return UNBOUNDED
        q = T[rows, -1] / a[rows]
        # same sequential tie rule as the loop version
        r = int(rows[0])
        ratio = q[0]
        for idx in range(1, rows.size):
            i = int(rows[idx])
            slack = 1e-12 * (1.0 + abs(ratio))
            if q[idx] < ratio - slack:
                r, ratio = i, q[idx]
            elif q[idx] <= ratio + slack:
                if bland:
                    if basis[i] < basis[r]:
                        r, ratio = i, q[idx]
                elif a[i] > a[r]:
                    r, ratio = i, q[idx]
        degenerate = degenerate + 1 if ratio <= ptol else 0
        _pivot_np(T, basis, r, j)
    return ITERATION_LIMIT


def _simplex_np(A, b, c, tol, max_iter):
    m, n = A.shape
    sgn = np.where(b >= 0.0, 1.0, -1.0)
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = sgn[:, None] * A
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = sgn * b
    T[m, :n] = -T[:m, :n].sum(axis=0)
    T[m, -1] = -T[:m, -1].sum()
    basis = np.arange(n, n + m, dtype=np.int64)
    bscale = max(1.0, float(np.abs(b).max())) if m else 1.0

    x = np.zeros(n)
    status = _iterate_np(T, basis, n, tol, tol, max_iter)
    if status == ITERATION_LIMIT:
        return status, x, np.nan, basis
    if -T[m, -1] > 1e-8 * bscale:
        return INFEASIBLE, x, np.nan, basis
    for i in range(m):
        if basis[i] >= n:
            row = np.abs(T[i, :n])
            best = int(np.argmax(row)) if n else -1
            if best >= 0 and row[best] > tol:
                _pivot_np(T, basis, i, best)

    cscale = max(1.0, float(np.abs(c).max())) if n else 1.0
    T[m] = 0.0
    T[m, :n] = c
    real = basis < n
    T[m] -= c[basis[real]] @ T[:m][real]
    status = _iterate_np(T, basis, n, tol * cscale, tol, max_iter)
    x[basis[real]] = T[:m, -1][real]
    return status, x, -T[m, -1], basis


def _max_slack_np(G, h, E, w, tol, max_iter):
    m, n = G.shape
    k = E.shape[0]
    A = np.zeros((n + 1, m + 2 * k + 1))
    A[:n, :m] = -G.T
    A[:n, m:m + k] = E.T
    A[:n, m + k:m + 2 * k] = -E.T
    A[n, :m] = 1.0
    A[n, -1] = 1.0
    b = np.zeros(n + 1)
    b[n] = 1.0
    c = np.concatenate([-h, w, -w, [1.0]])
    status, x, obj, basis = _simplex_np(A, b, c, tol, max_iter)
    if status == OPTIMAL:
        return obj
    if status == UNBOUNDED:
        return -np.inf
    return np.nan


# ---------------------------------------------------------------------------
# lattice box classification


@njit
def _classify_box_loops(P, A, b, dnum, D):
    # 1: strictly inside Q + delta, 0: outside, -1: on the boundary
    N, n = P.shape
    F = A.shape[0]
    shift = np.zeros(F, np.int64)
    for f in range(F):
        s = 0
        for j in range(n):
            s += A[f, j] * dnum[j]
        shift[f] = s
    out = np.empty(N, np.int8)
    for p in range(N):
        status = 1
        for f in range(F):
            s = b[f]
            for j in range(n):
                s += A[f, j] * P[p, j]
            v = D * s - shift[f]
            if v < 0:
                status = 0
                break
            if v == 0:
                status = -1
        out[p] = status
    return out


def _classify_box_np(P, A, b, dnum, D):
    vals = D * (P @ A.T + b[None, :]) - (A @ dnum)[None, :]
    out = np.where((vals > 0).all(axis=1), 1, 0).astype(np.int8)
    boundary = (vals >= 0).all(axis=1) & (vals == 0).any(axis=1)
    out[boundary] = -1
    return out


# ---------------------------------------------------------------------------
# monomial values


@njit
def _monomial_values_loops(X, E):
    N, n = X.shape
    m = E.shape[0]
    out = np.empty((N, m), np.complex128)
    for p in range(N):
        for q in range(m):
            v = 1.0 + 0.0j
            for j in range(n):
                e = E[q, j]
                if e > 0:
                    for _ in range(e):
                        v *= X[p, j]
                elif e < 0:
                    for _ in range(-e):
                        v /= X[p, j]
            out[p, q] = v
    return out


def _monomial_values_np(X, E):
    return np.prod(X[:, None, :] ** E[None, :, :], axis=2)


# ---------------------------------------------------------------------------
# determinant modulo a prime below 2**31


@njit
def _inv_mod(a, p):
    result = 1
    e = p - 2
    base = a % p
    while e > 0:
        if e & 1:
            result = (result * base) % p
        base = (base * base) % p
        e >>= 1
    return result


@njit
def _det_mod_p_loops(M, p):
    A = M.copy() % p
    n = A.shape[0]
    det = 1
    for k in range(n):
        r = -1
        for i in range(k, n):
            if A[i, k] != 0:
                r = i
                break
        if r < 0:
            return 0
        if r != k:
            for j in range(n):
                tmp = A[k, j]
                A[k, j] = A[r, j]
                A[r, j] = tmp
            det = (p - det) % p
        det = (det * A[k, k]) % p
        inv = _inv_mod(A[k, k], p)
        for i in range(k + 1, n):
            if A[i, k] != 0:
                f = (A[i, k] * inv) % p
                for j in range(k, n):
                    A[i, j] = (A[i, j] - f * A[k, j]) % p
    return det


def _det_mod_p_np(M, p):
    p = int(p)
    A = M.copy() % p
    n = A.shape[0]
    det = 1
    for k in range(n):
        nz = np.flatnonzero(A[k:, k])
        if nz.size == 0:
            return 0
        r = k + int(nz[0])
        if r != k:
            A[[k, r]] = A[[r, k]]
            det = (p - det) % p
        det = (det * int(A[k, k])) % p
        inv = pow(int(A[k, k]), p - 2, p)
        f = (A[k + 1:, k] * inv) % p
        A[k + 1:, k:] = (A[k + 1:, k:] - (f[:, None] * A[k, k:][None, :]) % p) % p
    return det


# ---------------------------------------------------------------------------
# complete-pivoting LU with a stopping threshold


@njit
def _lu_complete_loops(A, row_stage, n_stages, thr):
    m, c = A.shape
    pr = np.arange(m)
    pc = np.arange(c)
    k = 0
    stage = 0
    while k < min(m, c) and stage < n_stages:
        best = -1.0
        bi = -1
        bj = -1
        for i in range(k, m):
            if row_stage[pr[i]] > stage:
                continue
            for j in range(k, c):
                v = abs(A[i, j])
                if v > best:
                    best = v
                    bi = i
                    bj = j
        if bi < 0 or best <= thr:
            stage += 1
            continue
        if bi != k:
            for j in range(c):
                tmp = A[k, j]
                A[k, j] = A[bi, j]
                A[bi, j] = tmp
            t = pr[k]
            pr[k] = pr[bi]
            pr[bi] = t
        if bj != k:
            for i in range(m):
                tmp = A[i, k]
                A[i, k] = A[i, bj]
                A[i, bj] = tmp
            t = pc[k]
            pc[k] = pc[bj]
            pc[bj] = t
        piv = A[k, k]
        for i in range(k + 1, m):
            f = A[i, k] / piv
            A[i, k] = f
            if f != 0.0:
                for j in range(k + 1, c):
                    A[i, j] -= f * A[k, j]
        k += 1
    return pr, pc, k


def _lu_complete_np(A, row_stage, n_stages, thr):
    m, c = A.shape
    pr = np.arange(m)
    pc = np.arange(c)
    k = 0
    stage = 0
    while k < min(m, c) and stage < n_stages:
        live = np.flatnonzero(row_stage[pr[k:]] <= stage) + k
        if live.size == 0:
            stage += 1
            continue
        block = np.abs(A[live, k:])
        flat = int(np.argmax(block))
        bi, bj = live[flat // block.shape[1]], k + flat % block.shape[1]
        if block.flat[flat] <= thr:
            stage += 1
            continue
        A[[k, bi]] = A[[bi, k]]
        pr[[k, bi]] = pr[[bi, k]]
        A[:, [k, bj]] = A[:, [bj, k]]
        pc[[k, bj]] = pc[[bj, k]]
        A[k + 1:, k] /= A[k, k]
        A[k + 1:, k + 1:] -= np.outer(A[k + 1:, k], A[k, k + 1:])
        k += 1
    return pr, pc, k


if USE_NUMBA:
    simplex_impl = _simplex_loops
    max_slack_impl = _max_slack_loops
    classify_box_impl = _classify_box_loops
    monomial_values_impl = _monomial_values_loops
    det_mod_p_impl = _det_mod_p_loops
    lu_complete_impl = _lu_complete_loops
else:
    simplex_impl = _simplex_np
    max_slack_impl = _max_slack_np
    classify_box_impl = _classify_box_np
    monomial_values_impl = _monomial_values_np
    det_mod_p_impl = _det_mod_p_np
    lu_complete_impl = _lu_complete_np


def simplex(A, b, c, tol: float = 1e-9, max_iter: int = 10000):
    """Solve ``min c.x`` subject to ``A x = b, x >= 0``.

    Returns ``(status, x, objective, basis)`` where ``status`` is one of
    OPTIMAL, INFEASIBLE, UNBOUNDED or ITERATION_LIMIT and ``basis`` lists
    the basic column of each row (indices ``>= A.shape[1]`` are artificial
    columns left on redundant rows).
    """
    A = np.ascontiguousarray(A, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    c = np.ascontiguousarray(c, dtype=np.float64)
    status, x, obj, basis = simplex_impl(A, b, c, tol, max_iter)
    return int(status), x, float(obj), basis


def max_slack(G, h, E, w, tol: float = 1e-9, max_iter: int = 10000) -> float:
    """Largest ``t`` with ``G a - t >= h`` and ``E a = w`` (capped at 1).

    ``-inf`` means the equality system is inconsistent and ``nan`` that the
    LP iteration cap was hit.
    """
    return float(max_slack_impl(
        np.ascontiguousarray(G, dtype=np.float64),
        np.ascontiguousarray(h, dtype=np.float64),
        np.ascontiguousarray(E, dtype=np.float64),
        np.ascontiguousarray(w, dtype=np.float64),
        tol, max_iter))


def classify_box(P, A, b, dnum, D: int):
    """Classify integer points against ``A (x - dnum/D) + b >= 0``."""
    return classify_box_impl(
        np.ascontiguousarray(P, dtype=np.int64),
        np.ascontiguousarray(A, dtype=np.int64),
        np.ascontiguousarray(b, dtype=np.int64),
        np.ascontiguousarray(dnum, dtype=np.int64),
        np.int64(D))


def monomial_values(X, E):
    """Values ``X[p] ** E[q]`` for every point ``p`` and exponent row ``q``."""
    X = np.ascontiguousarray(np.atleast_2d(X), dtype=np.complex128)
    E = np.ascontiguousarray(np.atleast_2d(E), dtype=np.int64)
    return monomial_values_impl(X, E)


def det_mod_p(M, p: int = 2147483629) -> int:
    """Determinant of the integer matrix ``M`` reduced modulo prime ``p``."""
    if p >= 2 ** 31:
        raise ValueError("prime must be below 2**31 to avoid int64 overflow")
    M = np.ascontiguousarray(M, dtype=np.int64)
    if M.shape[0] == 0:
        return 1
    return int(det_mod_p_impl(M, np.int64(p)))


def lu_complete(A, threshold: float, row_stage=None):
    """Complete-pivoting elimination on a copy of ``A`` (``m x c``).

    At every step the largest remaining entry among the released rows is
    taken as pivot; when it does not exceed ``threshold`` the next stage of
    rows is released, and elimination stops once every stage is exhausted.
    Returns ``(LU, row_perm, col_perm, k)``: ``A[row_perm][:, col_perm]``
    has the leading ``k x k`` block ``L U`` with unit lower ``L`` below the
    diagonal of ``LU`` and ``U`` on and above it.
    """
    A = np.array(A, dtype=np.float64, order="C")
    m = A.shape[0]
    if row_stage is None:
        row_stage = np.zeros(m, dtype=np.int64)
    row_stage = np.ascontiguousarray(row_stage, dtype=np.int64)
    n_stages = int(row_stage.max()) + 1 if m else 1
    pr, pc, k = lu_complete_impl(A, row_stage, n_stages, float(threshold))
    return A, pr, pc, int(k)
