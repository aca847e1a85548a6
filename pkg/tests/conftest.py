from __future__ import annotations

import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from sparseres.poly import LaurentPolynomial, PolySystem  # noqa: E402

DATA = Path(__file__).resolve().parents[1] / "src" / "sparseres" / "data"

# acceptance lines collected while the suite runs, printed at the end
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_support(rng, n: int, npts: int, box: int = 2) -> list[tuple[int, ...]]:
    pts = {tuple(int(v) for v in rng.integers(0, box + 1, size=n)) for _ in range(npts)}
    return sorted(pts)


def spanning_supports(rng, n: int, m: int, npts: int, box: int = 2):
    """``m`` random supports whose Minkowski sum is full dimensional."""
    while True:
        sups = [random_support(rng, n, npts, box) for _ in range(m)]
        diffs = [np.subtract(p, A[0]) for A in sups for p in A]
        if n == 0 or np.linalg.matrix_rank(np.array(diffs, dtype=float)) == n:
            if all(len(A) >= 2 for A in sups):
                return sups


def random_polynomial(rng, support, nvars: int) -> LaurentPolynomial:
    terms = {}
    for e in support:
        c = 0
        while c == 0:
            c = int(rng.integers(-9, 10))
        terms[tuple(e)] = Fraction(c)
    return LaurentPolynomial(terms, nvars)


def random_system(rng, n: int, m: int, npts: int, box: int = 2) -> PolySystem:
    sups = spanning_supports(rng, n, m, npts, box)
    return PolySystem.from_polys([random_polynomial(rng, A, n) for A in sups])


def planted_system(rng, n: int, m: int, npts: int, box: int = 2):
    """Random system vanishing at a random rational toric point.

    The first coefficient of each polynomial is solved for so that the
    polynomial vanishes exactly at the point.
    """
    point = []
    for _ in range(n):
        num = 0
        while num == 0:
            num = int(rng.integers(-5, 6))
        point.append(Fraction(num, int(rng.integers(1, 5))))
    sups = spanning_supports(rng, n, m, npts, box)
    polys = []
    for A in sups:
        f = random_polynomial(rng, A, n)
        terms = dict(f.terms)
        e0 = A[0]
        rest = sum(c * _mono(point, e) for e, c in terms.items() if e != e0)
        terms[e0] = -rest / _mono(point, e0)
        if terms[e0] == 0:
            # the solved coefficient vanished and would change the support; redraw
            return planted_system(rng, n, m, npts, box)
        polys.append(LaurentPolynomial(terms, n))
    return PolySystem.from_polys(polys), point


def _mono(point, e) -> Fraction:
    out = Fraction(1)
    for x, k in zip(point, e):
        out *= x ** k
    return out


def dense_quadratic_system(seed: int) -> PolySystem:
    """Two dense quadrics in ``x, y`` with small integer coefficients."""
    rng = np.random.default_rng(seed)
    polys = []
    for _ in range(2):
        terms = {}
        for i in range(3):
            for j in range(3 - i):
                c = int(rng.integers(-9, 10))
                if c:
                    terms[(i, j)] = Fraction(c)
        terms[(0, 0)] = Fraction(int(rng.integers(1, 10)))
        polys.append(LaurentPolynomial(terms, 2))
    return PolySystem(tuple(polys), ("x", "y"))


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA


def structural_checks(M, sys, planted=None, value=None) -> dict[str, bool]:
    """The resultant-matrix structural properties of one built matrix.

    ``value`` specializes the hidden variable for the exact determinant.
    """
    from sparseres.resultant import degree_report

    pts = set(M.columns.points)
    inside = True
    for r in M.rows:
        for e in sys.polys[r.poly_index].support():
            if tuple(a + b for a, b in zip(r.shift, e)) not in pts:
                inside = False
    rep = degree_report(M, check=False)
    out = {
        "square": M.shape[0] == M.shape[1] == len(M.entries),
        "rows_in_E": inside,
        "rows_ge_mv": rep.ok,
    }
    if planted is None:
        det = M.det_mod_p(value)
        out["nonzero_det"] = det is None or det != 0
    else:
        A = M.dense()
        s = np.linalg.svd(A, compute_uv=False)
        out["planted_singular"] = bool(s[-1] <= 1e-8 * s[0])
    return out
