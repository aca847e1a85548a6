from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import dense_quadratic_system
from sparseres import linalg
from sparseres.fixtures import CYCLOHEXANE, MOLECULE_90, molecule_system
from sparseres.poly import LaurentPolynomial, PolySystem, hide_variable
from sparseres.resultant import build_matrix
from sparseres.solver import (ACCEPTED, AMBIGUOUS, DEGENERATE, REJECTED, MatrixPolynomial, MoebiusTransform,
                              RecoveryError, RootCandidate, SingularSystemError, SolverConfig, _clusters,
                              apply_moebius, classify, companion, distinct_roots, filter_candidates,
                              form_matrix_polynomial, linearize, partition, rank_balance, recover_coordinates,
                              residuals, solve_hidden, solve_u, subvector_index)
from sparseres.subdivision import mixed_volume


def random_matrix_polynomial(rng, r, d):
    return MatrixPolynomial([rng.normal(size=(r, r)) for _ in range(d + 1)])


def pencil_values(A):
    C1, C0 = linearize(A)
    return np.array([p.value for p in linalg.generalized_eig(C1, C0) if not p.infinite])


def match(a, b, tol):
    return all(np.min(np.abs(np.asarray(b) - x) / (1 + abs(x))) <= tol for x in a)


@pytest.fixture(scope="module")
def molecule_u():
    return solve_u(molecule_system(MOLECULE_90), seed=0)


@pytest.fixture(scope="module")
def cyclohexane_hidden():
    return solve_hidden(molecule_system(CYCLOHEXANE), "t3", seed=0)


# --------------------------------------------------------------------------
# matrix polynomial machinery

@given(st.integers(0, 2 ** 31), st.integers(1, 5), st.integers(1, 3))
@settings(max_examples=30, deadline=None)
def test_moebius_coherence(seed, r, d):
    rng = np.random.default_rng(seed)
    A = random_matrix_polynomial(rng, r, d)
    T = MoebiusTransform(2, -1, 3, 4)
    B = apply_moebius(A, T)
    # det B(y) = (t3 y + t4)^(r d) det A(x(y))
    y = complex(*rng.normal(size=2))
    lhs = np.linalg.det(B(y))
    rhs = (T.t3 * y + T.t4) ** (r * d) * np.linalg.det(A(T.pullback(y)))
    assert abs(lhs - rhs) <= 1e-8 * max(1.0, abs(rhs))
    xs = pencil_values(A)
    ys = [T.pullback(v) for v in pencil_values(B)]
    assert match(xs, ys, 1e-6)


@given(st.integers(0, 2 ** 31), st.integers(1, 5), st.integers(1, 3))
@settings(max_examples=30, deadline=None)
def test_companion_matches_pencil(seed, r, d):
    rng = np.random.default_rng(seed)
    A = random_matrix_polynomial(rng, r, d)
    comp = [p.value for p in linalg.eig(companion(A))]
    assert match(comp, pencil_values(A), 1e-6)
    # the chosen block of the eigenvector is a kernel vector of A(x)
    for p in linalg.eig(companion(A)):
        blk = subvector_index(p.value, d)
        v = p.vector[blk * r:(blk + 1) * r]
        scale = sum(np.linalg.norm(C, 2) * abs(p.value) ** j for j, C in enumerate(A.coeffs))
        assert np.linalg.norm(A(p.value) @ v) <= 1e-6 * scale * np.linalg.norm(v)


def test_rank_balance_fixes_singular_leading():
    rng = np.random.default_rng(9)
    A = random_matrix_polynomial(rng, 4, 2)
    A.coeffs[-1][:, 0] = 0.0
    B, T, kap = rank_balance(A, trials=4, seed=0)
    assert not T.is_identity and np.isfinite(kap)
    xs = [T.pullback(v) for v in np.linalg.eigvals(companion(B))]
    # the singular leading coefficient of A shows up as one infinite eigenvalue
    assert sum(np.isinf(x) for x in xs) == 1
    assert match([x for x in xs if np.isfinite(x)], pencil_values(A), 1e-6)


def test_moebius_inverse_and_validation():
    T = MoebiusTransform(2, 1, 1, 3)
    assert T.inverse(T.pullback(0.7)) == pytest.approx(0.7)
    assert T.pullback(np.inf) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        MoebiusTransform(1, 2, 2, 4)


def test_subvector_index():
    assert subvector_index(0.5, 3) == 0
    assert subvector_index(5.0, 3) == 2
    assert subvector_index(5.0, 4) == 2
    assert subvector_index(5.0, 2) == 1
    assert subvector_index(5.0, 1) == 0


def test_schur_determinant_identity():
    M = build_matrix(hide_variable(molecule_system(CYCLOHEXANE), 2), seed=0)
    P = partition(M)
    A = form_matrix_polynomial(P)
    for x in (0.37, -1.9, 0.2 + 0.5j):
        full = sum(x ** j * C for j, C in enumerate(P.coeffs))
        s1, l1 = np.linalg.slogdet(full)
        s2, l2 = np.linalg.slogdet(P.M11) if P.k else (1.0, 0.0)
        s3, l3 = np.linalg.slogdet(A(x))
        assert abs(l1 - (l2 + l3)) <= 1e-8 * max(1.0, abs(l1))
        assert abs(s1 - s2 * s3) <= 1e-6


# --------------------------------------------------------------------------
# coordinates and residuals

def test_recover_from_exact_monomials():
    x = np.array([1.5 - 0.5j, -2.0, 0.25j])
    basis = [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1)]
    v = np.array([np.prod(x ** np.array(e)) for e in basis]) * (3 - 1j)
    got, how = recover_coordinates(v, basis)
    assert how == "eigenvector" and np.allclose(got, x)


def test_recover_through_extension_and_logarithm():
    x = np.array([1.5, 0.75])
    basis = [(1, 1), (2, 3)]
    ext_exps = [(1, 1), (2, 3), (0, 1), (0, 0)]
    mono = lambda exps: np.array([np.prod(x ** np.array(e)) for e in exps])
    got, how = recover_coordinates(mono(basis), basis, mono(ext_exps), ext_exps)
    assert how == "extended" and np.allclose(got, x)
    got, how = recover_coordinates(mono([(0, 0), (2, 1), (1, 3)]), [(0, 0), (2, 1), (1, 3)])
    assert how == "logarithm" and np.allclose(got, x)
    with pytest.raises(RecoveryError):
        recover_coordinates(np.zeros(2), [(0, 0), (1, 0)])


def test_residual_normalization():
    f = LaurentPolynomial({(1,): Fraction(2), (0,): Fraction(-4)}, 1)
    sys = PolySystem.from_polys([f])
    assert residuals(sys, [2.0])[0] == 0.0
    # |2*3 - 4| / (1 + 4 * 3)
    assert residuals(sys, [3.0])[0] == pytest.approx(2 / 13)


def test_classify_and_filter():
    assert classify(1e-9, 1e-6, 1e-2) == ACCEPTED
    assert classify(1e-4, 1e-6, 1e-2) == AMBIGUOUS
    assert classify(1.0, 1e-6, 1e-2) == REJECTED
    f = LaurentPolynomial({(1,): 1, (0,): -1}, 1)
    sys = PolySystem.from_polys([f])
    cands = [RootCandidate(np.array([1.0 + 0j]), 1.0), RootCandidate(np.array([3.0 + 0j]), 3.0),
             RootCandidate(np.array([1.0 + 0j]), 1.0, 2, 2, status=DEGENERATE)]
    groups = filter_candidates(cands, sys)
    assert len(groups[ACCEPTED]) == 1 and len(groups[REJECTED]) == 1 and len(groups[DEGENERATE]) == 1


def test_clusters():
    vals = [1.0, 1.0 + 1e-9, 2.0, 3.0, 3.0 + 5e-8, np.inf]
    groups = sorted(sorted(g) for g in _clusters([complex(v) for v in vals], 1e-7))
    assert groups == [[0, 1], [2], [3, 4]]


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(accept_tol=-1)
    with pytest.raises(ValueError):
        SolverConfig(accept_tol=1e-1, reject_tol=1e-3)


# --------------------------------------------------------------------------
# pipelines

def test_u_eigenvalue_identity(molecule_u):
    acc = molecule_u.accepted
    assert acc
    for c in acc:
        assert c.u_mismatch <= 1e-8


def test_eigenvectors_are_monomial_vectors(molecule_u):
    basis = molecule_u.basis_exponents
    for c in molecule_u.accepted:
        mono = np.array([np.prod(c.coordinates ** np.array(e)) for e in basis])
        v = c.eigenvector
        scale = (np.vdot(mono, v) / np.vdot(mono, mono))
        assert np.linalg.norm(v - scale * mono) <= 1e-6 * np.linalg.norm(v)


def test_counts_bounded_by_mixed_volume(molecule_u, cyclohexane_hidden):
    mv = mixed_volume(molecule_system(MOLECULE_90).supports())
    assert len(distinct_roots(molecule_u.accepted)) <= mv
    assert len(distinct_roots(cyclohexane_hidden.accepted)) <= mv


def test_diagnostics_recorded(cyclohexane_hidden):
    d = cyclohexane_hidden.diagnostics
    assert d["pipeline"] == "hide" and d["hidden"] == "t3"
    assert d["matrix_size"] == d["m11_size"] + d["pencil_size"]
    assert d["route"] in ("companion", "pencil")
    assert set(cyclohexane_hidden.timings) == {"offline", "online"}


@pytest.mark.parametrize("seed", range(4))
def test_pipelines_agree_on_quadrics(seed):
    sys = dense_quadratic_system(seed)
    a = distinct_roots(solve_u(sys, seed=seed).accepted)
    b = distinct_roots(solve_hidden(sys, 1, seed=seed).accepted)
    assert len(a) == len(b) == mixed_volume(sys.supports())
    for x in a:
        assert min(np.max(np.abs(x - y) / (1 + np.abs(y))) for y in b) <= 1e-5


def test_forced_pencil_route():
    sys = dense_quadratic_system(2)
    res = solve_u(sys, seed=0, config=SolverConfig(cond_route=1.0))
    assert res.diagnostics["route"] == "pencil"
    assert len(distinct_roots(res.accepted)) == 4


def test_identically_singular_system():
    f = LaurentPolynomial({(1, 0): 1, (0, 1): 1, (0, 0): -1}, 2)
    sys = PolySystem.from_polys([f, f * LaurentPolynomial({(0, 0): 2}, 2)])
    with pytest.raises(SingularSystemError):
        solve_hidden(sys, 0)


def test_square_input_required():
    f = LaurentPolynomial({(1, 0): 1, (0, 0): -1}, 2)
    with pytest.raises(ValueError):
        solve_u(PolySystem.from_polys([f]))
