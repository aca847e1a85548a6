"""Exact facet enumeration by the double description method.

Facets of ``conv(P)`` for integer points ``P`` are the extreme rays of the
cone ``{(b, a) : b + a.p >= 0 for p in P}``.  Rays are kept as primitive
integer vectors, so every predicate is exact.  Adjacency of rays is decided
combinatorially from their zero sets.
"""
from __future__ import annotations

from math import gcd

import numpy as np

from . import exact

_SAFE = 2 ** 62


def _normalize(R: np.ndarray) -> np.ndarray:
    if R.dtype == object:
        out = []
        for row in R:
            g = 0
            for x in row:
                g = gcd(g, int(x))
            out.append([int(x) // g for x in row] if g > 1 else [int(x) for x in row])
        return np.array(out, dtype=object).reshape(R.shape)
    g = np.gcd.reduce(R, axis=1)
    g[g == 0] = 1
    return R // g[:, None]


def _promote(R: np.ndarray, s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Switch to Python ints if the next combination might overflow int64."""
    if R.dtype == object:
        return R, s
    big = int(np.abs(R).max(initial=0)) * int(np.abs(s).max(initial=0))
    if 2 * big >= _SAFE:
        return R.astype(object), s.astype(object)
    return R, s


def facet_cone(points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Facets of a full-dimensional lattice polytope.

    Returns ``(R, incidence)``: rows of ``R`` are primitive ``(b, a)`` with
    ``a.p + b >= 0`` on all points, one row per facet, and ``incidence[f, i]``
    tells whether point ``i`` is on facet ``f``.
    """
    P = np.asarray(points)
    m, n = P.shape
    d = n + 1
    H = np.concatenate([np.ones((m, 1), dtype=P.dtype), P], axis=1)
    if P.dtype != object:
        H = H.astype(np.int64)
    rows = [list(map(int, r)) for r in H]
    init = exact.independent_rows(rows)
    if len(init) < d:
        raise ValueError("points are not full dimensional")

    # rays of the initial simplicial cone: columns of adj(H0), oriented
    H0 = [rows[i] for i in init]
    det0 = exact.det_frac(H0)
    inv = _inverse(H0)
    R = []
    for j in range(d):
        col = [inv[i][j] * det0 for i in range(d)]
        if det0 < 0:
            col = [-x for x in col]
        R.append(exact.primitive(col))
    R = np.array(R, dtype=np.int64)

    processed = np.zeros(m, dtype=bool)
    Z = np.zeros((d, m), dtype=bool)
    for j, i in enumerate(init):
        processed[i] = True
    for k in range(d):
        for j, i in enumerate(init):
            Z[k, i] = j != k
    order = [i for i in range(m) if not processed[i]]

    for i in order:
        h = H[i]
        s = R @ h if R.dtype != object else np.array([sum(int(a) * int(b) for a, b in zip(r, h)) for r in R], dtype=object)
        pos = np.flatnonzero(s > 0)
        neg = np.flatnonzero(s < 0)
        zero = s == 0
        if neg.size == 0:
            Z[:, i] = zero
            processed[i] = True
            continue
        R, s = _promote(R, s)
        new_rays = []
        new_z = []
        if pos.size:
            Zi = Z[:, processed]
            cnt = Zi[pos].astype(np.int32) @ Zi[neg].astype(np.int32).T
            cand = np.argwhere(cnt >= d - 2)
            if cand.size:
                packed = np.packbits(Zi, axis=1)
                for a, b in cand:
                    p, q = pos[a], neg[b]
                    common = packed[p] & packed[q]
                    covers = np.all((packed & common) == common, axis=1)
                    if np.count_nonzero(covers) != 2:
                        continue
                    new_rays.append(s[p] * R[q] - s[q] * R[p])
                    z = Z[p] & Z[q]
                    z[i] = True
                    new_z.append(z)
        keep = np.flatnonzero(s >= 0)
        Zk = Z[keep]
        Zk[:, i] = zero[keep]
        if new_rays:
            NR = np.array(new_rays, dtype=R.dtype).reshape(len(new_rays), d)
            R = np.concatenate([R[keep], _normalize(NR)], axis=0)
            Z = np.concatenate([Zk, np.array(new_z)], axis=0)
        else:
            R = R[keep]
            Z = Zk
        processed[i] = True
    return R, Z


def _inverse(M) -> list[list]:
    n = len(M)
    aug = [list(row) + [int(i == j) for j in range(n)] for i, row in enumerate(M)]
    Rr, piv = exact.rref(aug)
    return [r[n:] for r in Rr]


def affine_frame(points, prefer: list[int] | None = None):
    """Affine hull data of integer points.

    Returns ``(base, dim, coords, equations)``: projecting onto ``coords`` is
    injective on the affine hull, and ``equations`` is an integer matrix
    ``E`` with ``E (x - base) = 0`` exactly on the hull.
    """
    P = [list(map(int, p)) for p in points]
    n = len(P[0])
    base = P[0]
    diffs = [[a - b for a, b in zip(p, base)] for p in P[1:]]
    diffs = [v for v in diffs if any(v)]
    rows = exact.independent_rows(diffs) if diffs else []
    basis = [diffs[i] for i in rows]
    k = len(basis)
    order = prefer if prefer is not None else list(range(n))
    coords = sorted(exact.independent_columns(basis, order)) if k else []
    equations = exact.nullspace_int(basis, n) if k else [[int(i == j) for j in range(n)] for i in range(n)]
    if k == n:
        equations = []
    return base, k, coords, equations
