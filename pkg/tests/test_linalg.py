from fractions import Fraction

import numpy as np
import pytest
import scipy.linalg
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from sparseres import linalg


def test_identity_full_block():
    F = linalg.lu_threshold(np.eye(5), 1e-10)
    assert F.k == 5


def test_tiny_pivot_stops():
    F = linalg.lu_threshold(np.diag([1.0, 1e-20]), 1e-12)
    assert F.k == 1


def test_rectangular_and_empty():
    F = linalg.lu_threshold(np.ones((3, 2)), 1e-10)
    assert F.k == 1
    assert linalg.lu_threshold(np.zeros((0, 0))).k == 0


def test_reconstruction_40():
    A = np.random.default_rng(0).normal(size=(40, 40))
    F = linalg.lu_threshold(A, 1e-10)
    assert F.k == 40
    assert np.abs(F.block(A) - F.L @ F.U).sum(axis=1).max() <= 1e-10 * np.abs(A).sum(axis=1).max()


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        linalg.lu_threshold(np.array([[np.nan]]))
    with pytest.raises(ValueError):
        linalg.lu_threshold(np.eye(2), 0.0)
    with pytest.raises(ValueError):
        linalg.eig(np.array([[1.0, np.inf], [0.0, 1.0]]))


def test_solve_identity():
    F = linalg.lu_threshold(np.eye(3))
    B = np.arange(6.0).reshape(3, 2)
    X, bound = linalg.solve(F, B[F.row_perm[:3]])
    assert np.allclose(X[np.argsort(F.col_perm)], B)
    assert bound == pytest.approx(20 * 2e-16 * 3)


def test_solve_singular_factor():
    F = linalg.lu_threshold(np.zeros((2, 2)))
    with pytest.raises(linalg.SingularMatrixError):
        linalg.solve(F, np.ones(2))


def test_hilbert_bound_exceeds_error():
    n = 8
    H = np.array([[1.0 / (i + j + 1) for j in range(n)] for i in range(n)])
    b = np.ones(n)
    F = linalg.lu_threshold(H, 1e-14)
    assert F.k == n
    X, bound = linalg.solve(F, b[F.row_perm])
    x = np.empty(n)
    x[F.col_perm] = X
    exact = sympy.Matrix(n, n, lambda i, j: sympy.Rational(1, i + j + 1)).solve(sympy.ones(n, 1))
    xe = np.array([float(v) for v in exact])
    err = np.abs(x - xe).max() / np.abs(xe).max()
    assert err <= bound
    assert err > 0


def test_condition_examples():
    Q = scipy.linalg.qr(np.random.default_rng(1).normal(size=(6, 6)))[0]
    assert linalg.condition(Q).kappa_2 == pytest.approx(1.0)
    assert linalg.condition(np.diag([10.0, 1e-3])).kappa_2 == pytest.approx(1e4)
    rep = linalg.condition(np.array([[1.0, 2.0], [2.0, 4.0]]))
    assert rep.kappa_1 == np.inf or rep.kappa_1 > 1e15
    assert linalg.condition(np.eye(200)).kappa_2 is None


def test_eig_examples():
    vals = sorted(p.value.real for p in linalg.eig(np.diag([1.0, 2.0, 3.0])))
    assert vals == pytest.approx([1, 2, 3])
    C = np.array([[0.0, 1.0], [-2.0, 3.0]])  # companion of x^2 - 3x + 2
    assert sorted(p.value.real for p in linalg.eig(C)) == pytest.approx([1, 2])
    A = np.random.default_rng(3).normal(size=(20, 20))
    assert sum(p.value for p in linalg.eig(A)).real == pytest.approx(np.trace(A), rel=1e-8, abs=1e-8)


def test_generalized_examples():
    A = np.random.default_rng(4).normal(size=(5, 5))
    g = sorted((p.value for p in linalg.generalized_eig(np.eye(5), A)), key=lambda z: (z.real, z.imag))
    e = sorted((p.value for p in linalg.eig(-A)), key=lambda z: (z.real, z.imag))
    assert np.allclose(g, e)
    pairs = linalg.generalized_eig(np.diag([1.0, 0.0]), np.diag([-2.0, 1.0]))
    finite = [p.value for p in pairs if not p.infinite]
    assert finite == [pytest.approx(2.0)]
    assert sum(p.infinite for p in pairs) == 1


def test_identically_singular_pencil():
    with pytest.raises(linalg.SingularPencilError):
        linalg.generalized_eig(np.zeros((3, 3)), np.zeros((3, 3)))


def test_schur_examples():
    a, b, c, d = 2.0, 3.0, 5.0, 7.0
    S = linalg.schur_complement(np.array([[a]]), np.array([[b]]), np.array([[c]]), np.array([[d]]))
    assert S[0, 0] == pytest.approx(d - c * b / a)
    M22 = np.ones((2, 2))
    assert np.array_equal(linalg.schur_complement(np.eye(3), np.zeros((3, 2)), np.ones((2, 3)), M22), M22)
    with pytest.raises(linalg.SingularMatrixError):
        linalg.schur_complement(np.zeros((2, 2)), np.ones((2, 1)), np.ones((1, 2)), np.ones((1, 1)))


def test_schur_per_power():
    rng = np.random.default_rng(5)
    M11 = rng.normal(size=(3, 3))
    M12 = [rng.normal(size=(3, 2)), rng.normal(size=(3, 2))]
    M21 = rng.normal(size=(2, 3))
    M22 = [rng.normal(size=(2, 2)), rng.normal(size=(2, 2))]
    out = linalg.schur_complement(M11, M12, M21, M22)
    for j in range(2):
        assert np.allclose(out[j], M22[j] - M21 @ np.linalg.solve(M11, M12[j]))


@given(st.integers(0, 2 ** 31), st.integers(2, 12))
@settings(max_examples=40, deadline=None)
def test_lu_exact_singular_rank(seed, n):
    # integer matrices of known rank; the factored block never exceeds the rank
    rng = np.random.default_rng(seed)
    r = int(rng.integers(1, n + 1))
    A = rng.integers(-3, 4, size=(n, r)) @ rng.integers(-3, 4, size=(r, n))
    rank = sympy.Matrix(A.tolist()).rank()
    F = linalg.lu_threshold(A.astype(float), 1e-10)
    assert F.k <= rank
    if F.k:
        assert np.all(np.abs(np.diag(F.U)) > 1e-10 * F.norm_inf)


def test_exact_fraction_input_is_accepted():
    A = np.array([[Fraction(1, 3), Fraction(1, 2)], [Fraction(1, 5), Fraction(1, 7)]], dtype=object)
    F = linalg.lu_threshold(A.astype(float))
    assert F.k == 2
