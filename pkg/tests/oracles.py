"""Reference computations that share no code with the package."""
from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np
import sympy
from scipy.spatial import ConvexHull, QhullError


def qhull_volume(points) -> float:
    pts = np.asarray(points, dtype=float)
    if len(pts) <= pts.shape[1]:
        return 0.0
    try:
        return float(ConvexHull(pts).volume)
    except QhullError:
        return 0.0


def minkowski_points(supports) -> np.ndarray:
    acc = np.zeros((1, len(supports[0][0])))
    for A in supports:
        A = np.asarray(A, dtype=float)
        acc = (acc[:, None, :] + A[None, :, :]).reshape(-1, A.shape[1])
        acc = np.unique(acc, axis=0)
    return acc


def qhull_mixed_volume(supports) -> int:
    """MV normalized so that MV(P, ..., P) = n! Vol(P), by inclusion-exclusion over qhull volumes."""
    n = len(supports)
    if n == 1:
        xs = [p[0] for p in supports[0]]
        return int(max(xs) - min(xs))
    total = 0.0
    for k in range(1, n + 1):
        for S in itertools.combinations(range(n), k):
            total += (-1) ** (n - k) * qhull_volume(minkowski_points([supports[i] for i in S]))
    return int(round(total))


def brute_lattice_points(points, delta) -> set[tuple[int, ...]]:
    """Integer points of conv(points) + delta, by exact tests against qhull facets.

    Facet normals come from qhull in floats; a candidate is accepted when
    every facet inequality holds with exact rational arithmetic after the
    normal has been rounded to the integer direction of the facet.
    """
    pts = np.asarray(points)
    n = pts.shape[1]
    lo = np.floor(pts.min(axis=0) + np.array([float(d) for d in delta])).astype(int)
    hi = np.ceil(pts.max(axis=0) + np.array([float(d) for d in delta])).astype(int)
    if n == 1:
        a, b = Fraction(int(pts.min())) + delta[0], Fraction(int(pts.max())) + delta[0]
        return {(x,) for x in range(lo[0], hi[0] + 1) if a <= x <= b}
    hull = ConvexHull(pts)
    facets = []
    for simplex in hull.simplices:
        V = [tuple(int(v) for v in pts[i]) for i in simplex]
        M = sympy.Matrix([[V[j][c] - V[0][c] for c in range(n)] for j in range(1, n)])
        normal = M.nullspace()[0]
        normal = normal * sympy.ilcm(*[sympy.fraction(x)[1] for x in normal])
        normal = [int(x) for x in normal]
        off = sum(a * b for a, b in zip(normal, V[0]))
        # orient inward: some vertex must satisfy normal.x >= off
        vals = [sum(a * b for a, b in zip(normal, p)) for p in pts.tolist()]
        if min(vals) < off:
            normal = [-a for a in normal]
            off = -off
        facets.append((normal, off))
    out = set()
    for x in itertools.product(*[range(l, h + 1) for l, h in zip(lo, hi)]):
        y = [Fraction(xi) - d for xi, d in zip(x, delta)]
        if all(sum(a * yi for a, yi in zip(nrm, y)) >= off for nrm, off in facets):
            out.add(tuple(x))
    return out


# --------------------------------------------------------------------------
# molecule roots by elimination

_PAIRS = ((2, 3), (3, 1), (1, 2))


def _molecule_sympy(beta):
    t = sympy.symbols("t1 t2 t3")
    fs = []
    for row, (j, k) in zip(beta, _PAIRS):
        tj, tk = t[j - 1], t[k - 1]
        b = [sympy.Rational(x) for x in row]
        fs.append(b[0] + b[1] * tj ** 2 + b[2] * tk ** 2 + b[3] * tj ** 2 * tk ** 2 + b[4] * tj * tk)
    return t, fs


@lru_cache(maxsize=None)
def molecule_roots(beta: tuple, dps: int = 40) -> tuple[tuple[complex, ...], ...]:
    """All complex roots of the half-angle molecule system.

    ``t3`` is the root of an exact univariate resultant; ``t1`` and ``t2``
    follow from the quadratics ``f2(t3, t1)`` and ``f1(t2, t3)`` and the
    pair is kept when ``f3`` vanishes at high precision.
    """
    t, (f1, f2, f3) = _molecule_sympy(beta)
    t1, t2, t3 = t
    g = sympy.resultant(f2, f3, t1)
    R = sympy.Poly(sympy.resultant(f1, g, t2), t3)
    mpmath.mp.dps = dps
    roots3 = []
    for fac, _ in sympy.factor_list(R.as_expr())[1]:
        P = sympy.Poly(fac, t3)
        if P.degree() > 0:
            roots3.extend(mpmath.polyroots([int(c) for c in P.all_coeffs()], maxsteps=500, extraprec=500))
    fl = [sympy.lambdify(t, f, "mpmath") for f in (f1, f2, f3)]
    c2 = [sympy.lambdify(t3, c, "mpmath") for c in sympy.Poly(f1, t2).all_coeffs()]
    c1 = [sympy.lambdify(t3, c, "mpmath") for c in sympy.Poly(f2, t1).all_coeffs()]
    out = []
    for r3 in roots3:
        for r2 in _poly_roots([c(r3) for c in c2]):
            for r1 in _poly_roots([c(r3) for c in c1]):
                vals = [abs(f(r1, r2, r3)) for f in fl]
                scale = 1 + max(abs(r1), abs(r2), abs(r3)) ** 4
                if max(vals) < mpmath.mpf(10) ** (-(dps // 2)) * scale:
                    out.append((complex(r1), complex(r2), complex(r3)))
    uniq: list[tuple[complex, ...]] = []
    for r in out:
        if not any(max(abs(a - b) for a, b in zip(r, u)) < 1e-12 * (1 + max(abs(x) for x in u)) for u in uniq):
            uniq.append(r)
    return tuple(uniq)


def _poly_roots(coeffs):
    coeffs = list(coeffs)
    while coeffs and abs(coeffs[0]) == 0:
        coeffs.pop(0)
    if len(coeffs) <= 1:
        return []
    return mpmath.polyroots(coeffs, maxsteps=300, extraprec=300)


def match_roots(found, reference, tol: float) -> bool:
    """Every found root is within ``tol`` (per coordinate, relative to
    ``1 + |x|``) of some reference root."""
    ref = [np.asarray(r, dtype=complex) for r in reference]
    for x in found:
        x = np.asarray(x, dtype=complex)
        if not any(np.max(np.abs(x - r) / (1 + np.abs(r))) <= tol for r in ref):
            return False
    return True


def nearest_error(x, reference) -> float:
    x = np.asarray(x, dtype=complex)
    return min(float(np.max(np.abs(x - np.asarray(r)) / (1 + np.abs(np.asarray(r))))) for r in reference)


def bivariate_roots(polys, dps: int = 30) -> list[tuple[complex, complex]]:
    """Common roots of two polynomials given as ``{(i, j): coeff}`` dicts.

    ``x`` runs over roots of the resultant in ``y``; for each, ``y`` is a
    root of the first polynomial kept when the second vanishes too.
    """
    x, y = sympy.symbols("x y")
    f, g = (sum(sympy.Rational(c) * x ** i * y ** j for (i, j), c in p.items()) for p in polys)
    R = sympy.Poly(sympy.resultant(f, g, y), x)
    mpmath.mp.dps = dps
    out = []
    for fac, _ in sympy.factor_list(R.as_expr())[1]:
        P = sympy.Poly(fac, x)
        if P.degree() == 0:
            continue
        for rx in mpmath.polyroots([int(c) for c in P.all_coeffs()], maxsteps=500, extraprec=300):
            cy = [sympy.lambdify(x, c, "mpmath")(rx) for c in sympy.Poly(f, y).all_coeffs()]
            gl = sympy.lambdify((x, y), g, "mpmath")
            for ry in _poly_roots(cy):
                if abs(gl(rx, ry)) < mpmath.mpf(10) ** (-(dps // 2)) * (1 + abs(rx) + abs(ry)) ** 4:
                    out.append((complex(rx), complex(ry)))
    uniq: list[tuple[complex, complex]] = []
    for r in out:
        if not any(abs(r[0] - u[0]) + abs(r[1] - u[1]) < 1e-12 * (1 + abs(u[0]) + abs(u[1])) for u in uniq):
            uniq.append(r)
    return uniq
