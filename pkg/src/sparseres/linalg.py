"""Dense linear algebra used by the eigen solvers.

Eigenvalue problems go to LAPACK through scipy; the thresholded
complete-pivoting LU lives in :mod:`sparseres.kernels`.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

from . import kernels

DEFAULT_PIVOT_TOL = 1e-10
DEFAULT_COND_ROUTE = 1e7
MACHINE_EPS = 2e-16
EIG_RESIDUAL_TOL = 1e-8


class SingularMatrixError(np.linalg.LinAlgError):
    pass


class EigenConvergenceError(np.linalg.LinAlgError):
    pass


class SingularPencilError(np.linalg.LinAlgError):
    """Every generalized eigenpair is (0, 0): the pencil is identically singular."""


def _check_finite(*arrays) -> None:
    for A in arrays:
        if not np.all(np.isfinite(A)):
            raise ValueError("matrix has NaN or infinite entries")


@dataclass
class LUFactorization:
    """``A[row_perm][:, col_perm][:k, :k] = L @ U``."""

    LU: np.ndarray
    row_perm: np.ndarray
    col_perm: np.ndarray
    k: int
    norm_inf: float

    @property
    def L(self) -> np.ndarray:
        return np.tril(self.LU[:self.k, :self.k], -1) + np.eye(self.k)

    @property
    def U(self) -> np.ndarray:
        return np.triu(self.LU[:self.k, :self.k])

    def block(self, A) -> np.ndarray:
        """The factored ``k x k`` block of ``A``."""
        A = np.asarray(A)
        return A[np.ix_(self.row_perm[:self.k], self.col_perm[:self.k])]

    def condition(self) -> float:
        """``kappa_inf`` of the factored block (LAPACK estimate)."""
        if self.k == 0:
            return 1.0
        U = self.U
        if np.any(np.diag(U) == 0):
            return np.inf
        inv_norm = _inverse_norm_estimate(self, "I")
        anorm = np.abs(self.L @ U).sum(axis=1).max()
        return float(anorm * inv_norm)


def _inverse_norm_estimate(F: LUFactorization, norm: str) -> float:
    # gecon wants the LAPACK getrf layout, which is exactly our LU block
    # (the permutations sit outside the block).
    lu = np.asfortranarray(F.LU[:F.k, :F.k])
    rcond, info = scipy.linalg.lapack.dgecon(lu, 1.0, norm=norm)
    if info != 0 or rcond == 0:
        return np.inf
    return 1.0 / rcond


def lu_threshold(A, pivot_threshold: float = DEFAULT_PIVOT_TOL, row_stage=None) -> LUFactorization:
    """Complete-pivoting LU of the largest leading block whose pivots all
    exceed ``pivot_threshold * ||A||_inf``.

    ``A`` may be rectangular; ``row_stage`` orders rows into stages that
    become eligible as pivots one after the other.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2:
        raise ValueError("expected a matrix")
    if pivot_threshold <= 0:
        raise ValueError("pivot threshold must be positive")
    _check_finite(A)
    norm = float(np.abs(A).sum(axis=1).max()) if A.size else 0.0
    LU, pr, pc, k = kernels.lu_complete(A, pivot_threshold * norm, row_stage)
    return LUFactorization(LU, pr, pc, k, norm)


def solve(F: LUFactorization, B) -> tuple[np.ndarray, float]:
    """Solve ``block(A) X = B`` with the factored block.

    ``B`` is indexed like the rows of the block (already permuted).  The
    second value is the forward error bound ``4e-15 * k * kappa_inf``.
    """
    if F.k == 0:
        raise SingularMatrixError("empty factorization")
    U = F.U
    if np.any(np.abs(np.diag(U)) == 0):
        raise SingularMatrixError("singular factor")
    B = np.asarray(B)
    Y = scipy.linalg.solve_triangular(F.L, B, lower=True, unit_diagonal=True)
    X = scipy.linalg.solve_triangular(U, Y, lower=False)
    # The official bound uses 2e-16 machine precision: 4e-15 = 20 * eps.
    bound = 20 * MACHINE_EPS * F.k * F.condition()
    return X, bound


@dataclass(frozen=True)
class ConditionReport:
    kappa_1: float
    kappa_inf: float
    kappa_2: float | None = None


def condition(A, exact_2_max: int = 100) -> ConditionReport:
    """Condition numbers via LAPACK's 1- and inf-norm estimators; ``kappa_2``
    from singular values when the dimension is at most ``exact_2_max``."""
    A = np.asarray(A)
    _check_finite(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("condition numbers need a square matrix")
    n = A.shape[0]
    if n == 0:
        return ConditionReport(1.0, 1.0, 1.0)
    lu, piv, info = scipy.linalg.lapack.get_lapack_funcs("getrf", (A,))(A)
    gecon = scipy.linalg.lapack.get_lapack_funcs("gecon", (lu,))
    kap = []
    for norm, ord_ in (("1", 1), ("I", np.inf)):
        if info > 0:
            kap.append(np.inf)
            continue
        rcond, _ = gecon(lu, np.linalg.norm(A, ord_), norm=norm)
        kap.append(np.inf if rcond == 0 else max(1.0, 1.0 / rcond))
    k2 = None
    if n <= exact_2_max:
        s = np.linalg.svd(A, compute_uv=False)
        k2 = np.inf if s[-1] == 0 else float(s[0] / s[-1])
    return ConditionReport(float(kap[0]), float(kap[1]), k2)


def kappa(A) -> float:
    """Cheap ``kappa_1`` estimate (``inf`` when singular)."""
    return condition(A, exact_2_max=0).kappa_1


@dataclass(frozen=True)
class EigenPair:
    value: complex
    vector: np.ndarray
    residual: float


@dataclass(frozen=True)
class GeneralizedEigenPair:
    """``(alpha C1 + beta C0) v = 0``, normalized to ``|alpha|^2 + |beta|^2 = 1``."""

    alpha: complex
    beta: complex
    vector: np.ndarray
    residual: float
    infinite: bool

    @property
    def value(self) -> complex:
        return complex(np.inf) if self.infinite else self.alpha / self.beta


def eig(A) -> list[EigenPair]:
    """All eigenpairs of a square matrix with unit eigenvectors.

    ``residual`` is ``||A v - lambda v||_2 / ||A||_2``.
    """
    A = np.asarray(A)
    _check_finite(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("eig needs a square matrix")
    if A.shape[0] == 0:
        return []
    try:
        w, V = scipy.linalg.eig(A)
    except np.linalg.LinAlgError as exc:
        raise EigenConvergenceError(str(exc)) from exc
    norm = np.linalg.norm(A, 2) or 1.0
    V = V / np.linalg.norm(V, axis=0)
    R = np.linalg.norm(A @ V - V * w, axis=0) / norm
    return [EigenPair(complex(w[i]), V[:, i], float(R[i])) for i in range(len(w))]


def generalized_eig(C1, C0, infinite_tol: float = 1e-10) -> list[GeneralizedEigenPair]:
    """Eigenpairs of the pencil ``C1 x + C0`` by QZ.

    A pair with ``|beta| <= infinite_tol * |alpha|`` is reported infinite.
    ``residual`` is ``||(alpha C1 + beta C0) v|| / (||C1|| + ||C0||)``.
    """
    C1 = np.asarray(C1)
    C0 = np.asarray(C0)
    _check_finite(C1, C0)
    if C1.shape != C0.shape or C1.ndim != 2 or C1.shape[0] != C1.shape[1]:
        raise ValueError("pencil matrices must be square and of the same size")
    if C1.shape[0] == 0:
        return []
    try:
        ab, V = scipy.linalg.eig(-C0, C1, homogeneous_eigvals=True)
    except np.linalg.LinAlgError as exc:
        raise EigenConvergenceError(str(exc)) from exc
    alpha, beta = ab
    scale = np.sqrt(np.abs(alpha) ** 2 + np.abs(beta) ** 2)
    norm = (np.linalg.norm(C1, 2) + np.linalg.norm(C0, 2)) or 1.0
    zero = scale <= 1e-13 * norm
    if np.all(zero):
        raise SingularPencilError("pencil is identically singular")
    out = []
    for i in range(len(alpha)):
        if zero[i]:
            continue
        a, b = alpha[i] / scale[i], beta[i] / scale[i]
        v = V[:, i] / (np.linalg.norm(V[:, i]) or 1.0)
        res = np.linalg.norm(a * (C1 @ v) + b * (C0 @ v)) / norm
        out.append(GeneralizedEigenPair(complex(a), complex(b), v, float(res),
                                        bool(abs(b) <= infinite_tol * abs(a))))
    return out


def schur_complement(M11, M12, M21, M22):
    """``M22 - M21 M11^{-1} M12`` through an LU solve.

    ``M12`` and ``M22`` may be sequences of per-power coefficient blocks,
    in which case a list of per-power complements is returned.
    """
    M11 = np.asarray(M11)
    per_power = not isinstance(M12, np.ndarray) and isinstance(M12, Sequence)
    M12s = list(M12) if per_power else [M12]
    M22s = list(M22) if per_power else [M22]
    if M11.shape[0] == 0:
        out = [np.asarray(B, dtype=float) for B in M22s]
        return out if per_power else out[0]
    try:
        with warnings.catch_warnings():
            # a zero pivot is reported below as SingularMatrixError
            warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
            lu = scipy.linalg.lu_factor(M11, check_finite=True)
    except (ValueError, np.linalg.LinAlgError) as exc:
        raise SingularMatrixError(str(exc)) from exc
    if np.any(np.diag(lu[0]) == 0):
        raise SingularMatrixError("M11 is singular")
    out = []
    for k in range(max(len(M12s), len(M22s))):
        B = M12s[k] if k < len(M12s) else np.zeros((M11.shape[0], M22s[0].shape[1]))
        C = M22s[k] if k < len(M22s) else np.zeros((M21.shape[0], B.shape[1]))
        out.append(np.asarray(C) - np.asarray(M21) @ scipy.linalg.lu_solve(lu, B))
    return out if per_power else out[0]
