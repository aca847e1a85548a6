from fractions import Fraction

import numpy as np
import pytest

from conftest import planted_system, random_system, structural_checks
from sparseres.fixtures import CYCLOHEXANE, MOLECULE_90, molecule_system
from sparseres.poly import LaurentPolynomial, PolySystem, UniPoly, add_u_polynomial, hide_variable
from sparseres.resultant import (MatrixConstructionError, RowLabel, build_matrix, check_generic_nonsingularity,
                                 degree_report, export_dense, export_matrix, import_matrix, mixed_volumes_minus,
                                 row_content)
from sparseres.subdivision import mixed_subdivision


def linear_system(coeffs):
    polys = [LaurentPolynomial({(1, 0): a, (0, 1): b, (0, 0): c}, 2) for a, b, c in coeffs]
    return PolySystem.from_polys(polys)


def test_linear_system_is_3x3():
    # three generic lines: the classical 3 x 3 determinant
    M = build_matrix(linear_system([(1, 2, 3), (4, 5, 7), (2, 9, 1)]))
    assert M.size == 3
    assert M.row_counts() == [1, 1, 1]
    assert M.exact_determinant() != 0


def test_concurrent_lines_are_singular():
    # all three pass through (1, 1)
    M = build_matrix(linear_system([(1, 2, -3), (4, 5, -9), (2, -7, 5)]))
    assert M.exact_determinant() == 0


def test_zero_variables():
    sys = PolySystem.from_polys([LaurentPolynomial({(): Fraction(5)}, 0)], ())
    M = build_matrix(sys)
    assert M.shape == (1, 1) and M.exact_determinant() == 5


def test_rejects_square_input():
    with pytest.raises(ValueError):
        build_matrix(linear_system([(1, 2, 3), (4, 5, 6)]))


@pytest.mark.parametrize("seed", range(12))
def test_structure_random(seed):
    rng = np.random.default_rng(seed)
    n = 1 + seed % 3
    sys = random_system(rng, n, n + 1, 3 if n == 3 else 4, box=2)
    M = build_matrix(sys, seed=seed)
    assert all(structural_checks(M, sys).values())


@pytest.mark.parametrize("seed", range(8))
def test_planted_root_is_singular(seed):
    rng = np.random.default_rng(1000 + seed)
    n = 1 + seed % 2
    sys, point = planted_system(rng, n, n + 1, 4, box=2)
    for f in sys.polys:
        assert f.evaluate(point) == 0
    M = build_matrix(sys, seed=seed)
    checks = structural_checks(M, sys, planted=point)
    assert all(checks.values()), checks
    assert M.exact_determinant() == 0


def test_row_shifts_match_labels():
    sys = molecule_system(MOLECULE_90)
    h = hide_variable(sys, 2)
    M = build_matrix(h, seed=0)
    for r, row in zip(M.rows, M.entries):
        assert isinstance(r, RowLabel)
        assert len(row) == len(h.polys[r.poly_index])


def test_row_content_prefers_largest_index():
    sups = [[(0, 0), (1, 0), (0, 1)], [(0, 0), (1, 0), (0, 1)], [(0, 0), (2, 0), (0, 2)]]
    sub = mixed_subdivision(sups, seed=3)
    delta = (Fraction(1, 997), Fraction(2, 1009))
    for p in [(1, 1), (2, 1), (1, 2)]:
        i, a = row_content(p, sub, delta)
        cell = sub.locate([Fraction(x) - d for x, d in zip(p, delta)])
        assert i == max(j for j, _ in cell.vertex_summands())
        assert a in sups[i]


def test_determinism():
    sys = add_u_polynomial(molecule_system(MOLECULE_90), seed=0)
    a, b = build_matrix(sys, seed=4), build_matrix(sys, seed=4)
    assert a.rows == b.rows and a.entries == b.entries and a.columns == b.columns
    for A, B in zip(a.coefficient_matrices(), b.coefficient_matrices()):
        assert np.array_equal(A, B)


def test_molecule_u_matrix():
    sys = add_u_polynomial(molecule_system(MOLECULE_90), seed=0)
    M = build_matrix(sys, seed=0)
    rep = degree_report(M)
    assert rep.mv_minus == (16, 12, 12, 12)
    assert rep.resultant_degree == 52
    assert M.row_counts()[0] >= 16
    # the golden dimension is near the optimum: within 3x of the resultant degree
    assert M.size <= 3 * rep.resultant_degree
    assert M.degree == 1


def test_molecule_hidden_matrix():
    h = hide_variable(molecule_system(CYCLOHEXANE), 2)
    M = build_matrix(h, seed=0)
    assert mixed_volumes_minus(h.supports()) == (4, 4, 4)
    assert check_generic_nonsingularity(M)
    assert len(M.hidden_columns()) >= 12 or M.size == 16
    assert M.degree == 2


def test_identical_polynomials_are_singular():
    f = LaurentPolynomial({(1,): 1, (0,): -1}, 1)
    M = build_matrix(PolySystem.from_polys([f, f]))
    assert not check_generic_nonsingularity(M)


def test_degree_report_shortfall_raises():
    M = build_matrix(linear_system([(1, 2, 3), (4, 5, 7), (2, 9, 1)]))
    bigger = [M.supports[0], M.supports[1], [(0, 0), (2, 0), (0, 2)]]
    with pytest.raises(MatrixConstructionError):
        degree_report(M, bigger)


def test_export_round_trip(tmp_path):
    h = hide_variable(molecule_system(CYCLOHEXANE), 2)
    M = build_matrix(h, seed=2)
    path = tmp_path / "m.txt"
    export_matrix(M, path)
    back = import_matrix(path)
    assert back.rows == M.rows and back.columns.points == M.columns.points
    assert back.delta == M.delta
    for a, b in zip(back.entries, M.entries):
        assert {j: (c if isinstance(c, UniPoly) else UniPoly.const(c)) for j, c in a.items()} == \
               {j: (c if isinstance(c, UniPoly) else UniPoly.const(c)) for j, c in b.items()}
    export_dense(M, tmp_path / "d.txt", value=0.5)
    D = np.loadtxt(tmp_path / "d.txt")
    assert np.allclose(D, M.dense(0.5))
