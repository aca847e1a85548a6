"""Root finding through resultant matrices.

Two pipelines share one numeric back end:

* :func:`solve_u` adds ``f_0 = u + c.x`` to a square system; the
  resultant matrix is linear in ``u`` and its eigenvectors hold monomial
  values at the roots.
* :func:`solve_hidden` moves one variable into the coefficient field; the
  matrix is a polynomial in that variable and its eigenvalues are the
  hidden coordinates of the roots.

In both cases the constant columns are eliminated first (a Schur
complement), leaving a small matrix polynomial ``A(x)`` that is either
linearized as a companion matrix, after a Moebius change of variable that
makes the leading coefficient well conditioned, or handed to QZ.
"""
from __future__ import annotations

import logging
import math
import time
from fractions import Fraction
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly

from . import kernels, linalg
from .poly import PolySystem, add_u_polynomial, hide_variable, to_float
from .resultant import MatrixConstructionError, ResultantMatrix, build_matrix

log = logging.getLogger(__name__)

ACCEPTED = "accepted"
REJECTED = "rejected"
AMBIGUOUS = "ambiguous"
DEGENERATE = "multiplicity-degenerate"


class SolverError(RuntimeError):
    pass


class SingularSystemError(SolverError):
    """The matrix polynomial is singular for every value of the hidden variable."""


class NumericFailure(SolverError):
    pass


@dataclass(frozen=True)
class SolverConfig:
    pivot_tol: float = linalg.DEFAULT_PIVOT_TOL
    cond_route: float = linalg.DEFAULT_COND_ROUTE
    accept_tol: float = 1e-6
    reject_tol: float = 1e-2
    moebius_trials: int = 4
    cluster_tol: float = 1e-7
    # relative singular value below which clustered eigenvectors count as dependent
    rank_tol: float = 1e-6
    S: int = 2 ** 10
    u_coeffs: tuple | None = None
    max_attempts: int = 10

    def __post_init__(self):
        for name in ("pivot_tol", "cond_route", "accept_tol", "reject_tol", "cluster_tol", "rank_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.accept_tol > self.reject_tol:
            raise ValueError("accept_tol must not exceed reject_tol")


# --------------------------------------------------------------------------
# partition and matrix polynomial

@dataclass
class PartitionedMatrix:
    """``M`` with rows and columns reordered so that ``M[:k, :k]`` is the
    factored constant block ``M11``.  ``coeffs[j]`` is the permuted
    coefficient of ``x^j``."""

    matrix: ResultantMatrix
    row_order: np.ndarray
    col_order: np.ndarray
    k: int
    coeffs: list[np.ndarray]
    kappa: float
    lu: linalg.LUFactorization | None
    whole: bool = False

    @property
    def r(self) -> int:
        return self.matrix.size - self.k

    @property
    def M11(self) -> np.ndarray:
        return self.coeffs[0][:self.k, :self.k]

    @property
    def M12(self) -> list[np.ndarray]:
        return [A[:self.k, self.k:] for A in self.coeffs]

    @property
    def M21(self) -> np.ndarray:
        return self.coeffs[0][self.k:, :self.k]

    @property
    def M22(self) -> list[np.ndarray]:
        return [A[self.k:, self.k:] for A in self.coeffs]

    def exponents(self):
        pts = self.matrix.columns.points
        return [pts[j] for j in self.col_order]


def partition(M: ResultantMatrix, pivot_tol: float = linalg.DEFAULT_PIVOT_TOL,
              cond_route: float = linalg.DEFAULT_COND_ROUTE) -> PartitionedMatrix:
    """Move a maximal well-conditioned constant block to the upper left.

    Pivots are taken from the constant columns by complete pivoting, rows
    free of the hidden variable first so that ``M12`` stays constant when
    possible.  If the block is worse conditioned than ``cond_route`` it is
    dropped and the whole matrix becomes the pencil.
    """
    Ms = M.coefficient_matrices()
    if np.iscomplexobj(Ms[0]):
        raise NumericFailure("complex coefficients are not supported by the partition")
    N = M.size
    if len(Ms) > 1:
        upper = np.zeros((N, N), dtype=bool)
        for A in Ms[1:]:
            upper |= A != 0
        const_cols = np.flatnonzero(~upper.any(axis=0))
        hidden_rows = upper.any(axis=1)
    else:
        const_cols = np.arange(N)
        hidden_rows = np.zeros(N, dtype=bool)
    k = 0
    F = None
    kappa = 1.0
    if const_cols.size:
        F = linalg.lu_threshold(Ms[0][:, const_cols], pivot_tol, hidden_rows.astype(np.int64))
        k = F.k
        kappa = F.condition() if k else 1.0
    whole = False
    if k and kappa > cond_route:
        log.info("M11 of size %d has condition %.3g; using the whole matrix", k, kappa)
        k, F, whole = 0, None, True
    if k:
        rows11 = F.row_perm[:k]
        cols11 = const_cols[F.col_perm[:k]]
    else:
        rows11 = cols11 = np.array([], dtype=np.int64)
    rest_rows = np.setdiff1d(np.arange(N), rows11)
    rest_cols = np.setdiff1d(np.arange(N), cols11)
    row_order = np.concatenate([rows11, rest_rows]).astype(np.int64)
    col_order = np.concatenate([cols11, rest_cols]).astype(np.int64)
    coeffs = [A[np.ix_(row_order, col_order)] for A in Ms]
    return PartitionedMatrix(M, row_order, col_order, k, coeffs, kappa, F, whole)


@dataclass
class MatrixPolynomial:
    """``A(x) = sum_j x^j A_j``; ``X[j] = M11^{-1} M12_j`` extends eigenvectors."""

    coeffs: list[np.ndarray]
    X: list[np.ndarray] = field(default_factory=list)
    solve_bound: float = 0.0

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def size(self) -> int:
        return self.coeffs[0].shape[0]

    def __call__(self, x) -> np.ndarray:
        out = self.coeffs[-1].astype(np.result_type(self.coeffs[-1], np.asarray(x)))
        for A in reversed(self.coeffs[:-1]):
            out = out * x + A
        return out

    def extension(self, x, v) -> np.ndarray:
        """``-M11^{-1} M12(x) v``: the eigenvector entries on the ``M11`` columns."""
        if not self.X:
            return np.zeros(0, dtype=complex)
        out = np.zeros(self.X[0].shape[0], dtype=complex)
        for Xj in reversed(self.X):
            out = out * x + Xj @ v
        return -out


def form_matrix_polynomial(P: PartitionedMatrix) -> MatrixPolynomial:
    """Schur complement ``M22(x) - M21 M11^{-1} M12(x)`` power by power."""
    k = P.k
    if k == 0:
        coeffs = [A.copy() for A in P.M22]
        X: list[np.ndarray] = []
        bound = 0.0
    else:
        M21 = P.M21
        # the LU rows/columns are the first k of the permuted matrix already
        X = []
        bound = 0.0
        for B in P.M12:
            if not np.any(B):
                X.append(np.zeros_like(B))
                continue
            Xj, bound = linalg.solve(P.lu, B)
            X.append(Xj)
        coeffs = [C - M21 @ Xj for C, Xj in zip(P.M22, X)]
    while len(coeffs) > 1 and not np.any(coeffs[-1]):
        coeffs.pop()
        if X:
            X.pop()
    return MatrixPolynomial(coeffs, X, bound)


def is_regular(A: MatrixPolynomial, trials: int = 3, seed: int = 0, rel_tol: float = 1e-12) -> bool:
    """Random-substitution test that ``det A(x)`` is not identically zero."""
    if A.size == 0:
        return True
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        x = complex(*rng.normal(size=2))
        s = np.linalg.svd(A(x), compute_uv=False)
        if s[0] > 0 and s[-1] > rel_tol * s[0]:
            return True
    return False


def matrix_is_regular(M: ResultantMatrix, trials: int = 2, seed: int = 0) -> bool | None:
    """Exact test that ``det M(x)`` is not identically zero.

    ``M`` is evaluated at random rationals and its determinant reduced
    modulo a prime; one nonzero residue proves regularity.  Returns
    ``None`` when the entries are not exact.
    """
    rng = np.random.default_rng(seed)
    primes = (2147483629, 2147483587)
    for t in range(trials):
        value = Fraction(int(rng.integers(1, 10 ** 6)), int(rng.integers(1, 10 ** 6)))
        try:
            det = M.det_mod_p(value, primes[t % 2])
        except (TypeError, ValueError):
            return None
        if det is None or det != 0:
            return True
    return False


# --------------------------------------------------------------------------
# Moebius balancing and linearization

@dataclass(frozen=True)
class MoebiusTransform:
    """``x = (t1 y + t2) / (t3 y + t4)``."""

    t1: int = 1
    t2: int = 0
    t3: int = 0
    t4: int = 1

    def __post_init__(self):
        if self.t1 * self.t4 - self.t2 * self.t3 == 0:
            raise ValueError("degenerate Moebius transform")

    @property
    def is_identity(self) -> bool:
        return (self.t1, self.t2, self.t3, self.t4) == (1, 0, 0, 1)

    def pullback(self, y: complex) -> complex:
        """The ``x`` eigenvalue for eigenvalue ``y`` of the transformed polynomial."""
        if np.isinf(y):
            return complex(np.inf) if self.t3 == 0 else complex(self.t1 / self.t3)
        den = self.t3 * y + self.t4
        if abs(den) <= 1e-14 * max(1.0, abs(self.t3 * y)):
            return complex(np.inf)
        return complex((self.t1 * y + self.t2) / den)

    def inverse(self, x: complex) -> complex:
        return complex((self.t4 * x - self.t2) / (self.t1 - self.t3 * x))


def apply_moebius(A: MatrixPolynomial, T: MoebiusTransform) -> MatrixPolynomial:
    """``B(y) = (t3 y + t4)^d A((t1 y + t2) / (t3 y + t4))``."""
    d = A.degree
    B = [np.zeros_like(A.coeffs[0], dtype=float) for _ in range(d + 1)]
    for j, Aj in enumerate(A.coeffs):
        c = npoly.polymul(npoly.polypow([T.t2, T.t1], j), npoly.polypow([T.t4, T.t3], d - j))
        for i, ci in enumerate(c[:d + 1]):
            if ci:
                B[i] = B[i] + ci * Aj
    return MatrixPolynomial(B, A.X, A.solve_bound)


def _leading(A: MatrixPolynomial, T: MoebiusTransform) -> np.ndarray:
    d = A.degree
    return sum(Aj * (T.t1 ** j * T.t3 ** (d - j)) for j, Aj in enumerate(A.coeffs))


def random_moebius(rng: np.random.Generator) -> MoebiusTransform:
    while True:
        t1, t2, t3, t4 = (int(v) for v in rng.integers(-10, 11, size=4))
        # t3 = 0 only rescales the old leading coefficient
        if t3 != 0 and t1 * t4 - t2 * t3 != 0:
            return MoebiusTransform(t1, t2, t3, t4)


def rank_balance(A: MatrixPolynomial, trials: int = 4, seed: int = 0
                 ) -> tuple[MatrixPolynomial, MoebiusTransform, float]:
    """Among the identity and ``trials`` random transforms, the one whose
    transformed leading coefficient has the smallest condition number.

    Returns the transformed polynomial, the transform and that condition
    number (``inf`` if every candidate leading coefficient is singular).
    """
    rng = np.random.default_rng(seed)
    options = [MoebiusTransform()] + [random_moebius(rng) for _ in range(trials)]
    best = None
    for T in options:
        try:
            kap = linalg.kappa(_leading(A, T))
        except ValueError:
            kap = np.inf
        log.debug("Moebius %s: kappa %.3g", T, kap)
        if best is None or kap < best[1]:
            best = (T, kap)
    T, kap = best
    return (A if T.is_identity else apply_moebius(A, T)), T, kap


def companion(B: MatrixPolynomial) -> np.ndarray:
    """Block companion matrix of ``B_d^{-1} B(y)``.

    An eigenvector has the form ``[v, y v, ..., y^(d-1) v]``.
    """
    d, r = B.degree, B.size
    if d == 0:
        raise ValueError("a constant matrix polynomial has no companion")
    try:
        monic = np.linalg.solve(B.coeffs[-1], np.hstack(B.coeffs[:-1])) if r else np.zeros((0, 0))
    except np.linalg.LinAlgError as exc:
        raise linalg.SingularMatrixError("singular leading coefficient") from exc
    C = np.zeros((r * d, r * d))
    for i in range(d - 1):
        C[i * r:(i + 1) * r, (i + 1) * r:(i + 2) * r] = np.eye(r)
    C[(d - 1) * r:, :] = -monic
    return C


def linearize(A: MatrixPolynomial) -> tuple[np.ndarray, np.ndarray]:
    """Pencil ``x C1 + C0`` with the eigenvalues of ``A(x)``."""
    d, r = A.degree, A.size
    C1 = np.eye(r * d)
    C1[(d - 1) * r:, (d - 1) * r:] = A.coeffs[-1]
    C0 = np.zeros((r * d, r * d))
    for i in range(d - 1):
        C0[i * r:(i + 1) * r, (i + 1) * r:(i + 2) * r] = -np.eye(r)
    for j in range(d):
        C0[(d - 1) * r:, j * r:(j + 1) * r] = A.coeffs[j]
    return C1, C0


def subvector_index(y: complex, d: int) -> int:
    """Block of a linearized eigenvector to read: the top one for small
    eigenvalues, otherwise block ``ceil(d/2)`` (capped at the last)."""
    if d <= 1 or abs(y) < 1:
        return 0
    return min(math.ceil(d / 2), d - 1)


# --------------------------------------------------------------------------
# candidates

@dataclass
class RootCandidate:
    coordinates: np.ndarray
    eigenvalue: complex
    multiplicity: int = 1
    geometric_multiplicity: int = 1
    residuals: np.ndarray = field(default_factory=lambda: np.zeros(0))
    status: str = REJECTED
    recovery: str = "eigenvector"
    eigenvector: np.ndarray | None = None
    eig_residual: float = 0.0
    # u pipeline: |(-c.x) - eigenvalue| relative to the eigenvalue
    u_mismatch: float | None = None

    @property
    def residual(self) -> float:
        if self.residuals.size == 0:
            return 0.0
        r = np.nan_to_num(self.residuals, nan=np.inf)
        return float(r.max())

    @property
    def is_real(self) -> bool:
        x = np.asarray(self.coordinates)
        return bool(np.all(np.isfinite(x)) and
                    np.abs(x.imag).max(initial=0) <= 1e-6 * max(1.0, np.abs(x).max(initial=0)))

    @property
    def real_coordinates(self) -> np.ndarray:
        return np.real(self.coordinates)


@dataclass
class SolveResult:
    names: tuple[str, ...]
    candidates: list[RootCandidate]
    discarded: list[dict]
    diagnostics: dict
    timings: dict
    basis_exponents: list = field(default_factory=list)

    @property
    def accepted(self) -> list[RootCandidate]:
        return [c for c in self.candidates if c.status == ACCEPTED]

    def with_status(self, status: str) -> list[RootCandidate]:
        return [c for c in self.candidates if c.status == status]

    def roots(self, real_only: bool = False) -> np.ndarray:
        rows = [c.coordinates for c in self.accepted if c.is_real or not real_only]
        n = len(self.names)
        return np.array(rows, dtype=complex).reshape(-1, n)


class _Evaluator:
    """Vectorized normalized residuals of a system at complex points."""

    def __init__(self, sys: PolySystem):
        self.parts = []
        for f in sys.polys:
            E = np.array([e for e, _ in f.items()], dtype=np.int64).reshape(-1, sys.n_vars)
            c = np.array([complex(to_float(cf)) for _, cf in f.items()])
            self.parts.append((E, c, float(np.abs(c).max(initial=0.0))))

    def residuals(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        out = np.empty(len(self.parts))
        with np.errstate(all="ignore"):
            for i, (E, c, cn) in enumerate(self.parts):
                if E.shape[0] == 0:
                    out[i] = 0.0
                    continue
                mono = kernels.monomial_values(x[None, :], E)[0]
                val = abs(np.sum(c * mono))
                out[i] = val / (1.0 + cn * np.abs(mono).max())
        out[~np.isfinite(out)] = np.inf
        return out


def residuals(sys: PolySystem, point) -> np.ndarray:
    """``|f_i(x)| / (1 + ||c_i||_inf ||monomials of f_i at x||_inf)``."""
    return _Evaluator(sys).residuals(point)


def classify(residual: float, accept_tol: float, reject_tol: float) -> str:
    if residual <= accept_tol:
        return ACCEPTED
    if residual > reject_tol:
        return REJECTED
    return AMBIGUOUS


def filter_candidates(cands: Sequence[RootCandidate], sys: PolySystem, accept_tol: float = 1e-6,
                      reject_tol: float = 1e-2) -> dict[str, list[RootCandidate]]:
    """Evaluate residuals and sort candidates by status.

    Candidates already flagged multiplicity-degenerate keep that status.
    """
    ev = _Evaluator(sys)
    out: dict[str, list[RootCandidate]] = {ACCEPTED: [], AMBIGUOUS: [], REJECTED: [], DEGENERATE: []}
    for c in cands:
        c.residuals = ev.residuals(c.coordinates)
        if c.status != DEGENERATE:
            c.status = classify(c.residual, accept_tol, reject_tol)
        out[c.status].append(c)
    return out


# --------------------------------------------------------------------------
# coordinates from eigenvectors

class RecoveryError(SolverError):
    pass


def _ratio_pairs(vec, index: dict, n: int, need):
    coords = {}
    for i in need:
        best = None
        for p, j in index.items():
            q = p[:i] + (p[i] - 1,) + p[i + 1:]
            jq = index.get(q)
            if jq is None:
                continue
            mag = abs(vec[jq])
            if mag > 0 and (best is None or mag > best[0]):
                best = (mag, j, jq)
        if best is not None:
            coords[i] = vec[best[1]] / vec[best[2]]
    return coords


def _affine_log(vec, exps: Sequence, n: int):
    """Solve ``log v_q = log c + q . log x`` on ``n+1`` affinely
    independent exponents (principal branch)."""
    order = np.argsort(-np.abs(vec))
    chosen = []
    for j in order:
        if abs(vec[j]) == 0:
            break
        trial = chosen + [j]
        D = np.array([np.subtract(exps[t], exps[trial[0]]) for t in trial[1:]], dtype=float)
        if len(trial) == 1 or np.linalg.matrix_rank(D) == len(trial) - 1:
            chosen = trial
        if len(chosen) == n + 1:
            break
    if len(chosen) < n + 1:
        raise RecoveryError("monomials do not span an affine basis")
    base = chosen[0]
    D = np.array([np.subtract(exps[t], exps[base]) for t in chosen[1:]], dtype=float)
    rhs = np.array([np.log(vec[t] / vec[base]) for t in chosen[1:]])
    return np.exp(np.linalg.solve(D, rhs))


def recover_coordinates(eigvec, basis: Sequence, extended=None, extended_exps: Sequence | None = None
                        ) -> tuple[np.ndarray, str]:
    """Root coordinates from a vector of monomial values.

    ``eigvec[j]`` approximates ``x^basis[j]`` up to a common factor.
    Coordinate ``i`` is the ratio of two entries whose exponents differ by
    the ``i``-th unit vector, choosing the pair with the largest
    denominator.  Coordinates not reachable inside ``basis`` are looked up
    in ``extended`` (values on ``extended_exps``), and as a last resort a
    logarithmic affine solve is used.  The second value names the method
    (``eigenvector``, ``extended`` or ``logarithm``).
    """
    eigvec = np.asarray(eigvec, dtype=complex)
    basis = [tuple(int(v) for v in p) for p in basis]
    if not basis:
        raise RecoveryError("empty monomial set")
    n = len(basis[0])
    if not np.any(eigvec):
        raise RecoveryError("zero eigenvector")
    index = {p: j for j, p in enumerate(basis)}
    coords = _ratio_pairs(eigvec, index, n, range(n))
    method = "eigenvector"
    if len(coords) < n and extended is not None:
        exps = [tuple(int(v) for v in p) for p in extended_exps]
        ext = np.asarray(extended, dtype=complex)
        coords.update(_ratio_pairs(ext, {p: j for j, p in enumerate(exps)}, n,
                                   [i for i in range(n) if i not in coords]))
        method = "extended"
    if len(coords) < n:
        if extended is not None:
            vec, exps = np.asarray(extended, dtype=complex), [tuple(p) for p in extended_exps]
        else:
            vec, exps = eigvec, basis
        logc = _affine_log(vec, exps, n)
        log.warning("coordinates recovered through logarithms; non-principal branches are possible")
        for i in range(n):
            coords.setdefault(i, logc[i])
        method = "logarithm"
    return np.array([coords[i] for i in range(n)], dtype=complex), method


# --------------------------------------------------------------------------
# shared numeric phase

def _clusters(values: Sequence[complex], tol: float) -> list[list[int]]:
    """Single-linkage groups of values within ``tol (1 + |v|)``."""
    idx = [i for i, v in enumerate(values) if np.isfinite(v)]
    idx.sort(key=lambda i: (values[i].real, values[i].imag))
    parent = {i: i for i in idx}

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for a_pos, a in enumerate(idx):
        for b in idx[a_pos + 1:]:
            if values[b].real - values[a].real > tol * (1 + abs(values[a])) + tol * (1 + abs(values[b])):
                break
            if abs(values[a] - values[b]) <= tol * (1 + max(abs(values[a]), abs(values[b]))):
                parent[find(b)] = find(a)
    groups: dict[int, list[int]] = {}
    for i in idx:
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _numeric_rank(vectors: np.ndarray, rel_tol: float) -> int:
    if vectors.shape[1] == 0:
        return 0
    V = vectors / np.maximum(np.linalg.norm(vectors, axis=0), 1e-300)
    s = np.linalg.svd(V, compute_uv=False)
    return int(np.sum(s > rel_tol * s[0]))


@dataclass
class _Eigen:
    x: complex
    y: complex
    vector: np.ndarray
    residual: float


def _eigenpairs(A: MatrixPolynomial, config: SolverConfig, seed: int, diag: dict,
                discarded: list) -> list[_Eigen]:
    if A.degree == 0:
        raise SingularSystemError("matrix does not depend on the hidden variable")
    if diag.get("regular_exact") is None and not is_regular(A, seed=seed):
        raise SingularSystemError("matrix polynomial is singular for every value of the hidden variable")
    B, T, kap = rank_balance(A, config.moebius_trials, seed)
    diag["moebius"] = [T.t1, T.t2, T.t3, T.t4]
    diag["kappa_leading"] = float(kap)
    d, r = A.degree, A.size
    out = []
    try:
        if kap < config.cond_route:
            diag["route"] = "companion"
            C = companion(B)
            diag["eigen_dim"] = C.shape[0]
            for p in linalg.eig(C):
                blk = subvector_index(p.value, d)
                v = p.vector[blk * r:(blk + 1) * r]
                out.append(_Eigen(T.pullback(p.value), p.value, v, p.residual))
        else:
            diag["route"] = "pencil"
            C1, C0 = linearize(A)
            diag["eigen_dim"] = C1.shape[0]
            pairs = linalg.generalized_eig(C1, C0)
            if len(pairs) < C1.shape[0]:
                discarded.append({"reason": "singular pair (0, 0)", "count": C1.shape[0] - len(pairs)})
            for p in pairs:
                y = p.value
                blk = subvector_index(y, d) if not p.infinite else d - 1
                v = p.vector[blk * r:(blk + 1) * r]
                out.append(_Eigen(complex(np.inf) if p.infinite else y, y, v, p.residual))
    except linalg.EigenConvergenceError as exc:
        raise NumericFailure(str(exc)) from exc
    except linalg.SingularPencilError as exc:
        raise SingularSystemError(str(exc)) from exc
    return out


def _numeric_phase(M: ResultantMatrix, eval_sys: PolySystem, names, assemble, config: SolverConfig,
                   seed: int, diag: dict) -> tuple[list[RootCandidate], list[dict], list]:
    """Partition, linearize, solve and turn eigenpairs into candidates.

    ``assemble(x, coords)`` maps a hidden value and recovered coordinates
    to a point of ``eval_sys``.
    """
    regular = matrix_is_regular(M, seed=seed)
    if regular is False:
        raise SingularSystemError("resultant matrix is singular for every value of the hidden variable")
    diag["regular_exact"] = regular
    P = partition(M, config.pivot_tol, config.cond_route)
    diag.update(matrix_size=M.size, m11_size=P.k, pencil_size=P.r, kappa_m11=float(P.kappa),
                whole_matrix=P.whole)
    A = form_matrix_polynomial(P)
    diag["degree"] = A.degree
    diag["solve_bound"] = float(A.solve_bound)
    discarded: list[dict] = []
    pairs = _eigenpairs(A, config, seed, diag, discarded)
    exps = P.exponents()
    basis = exps[P.k:]
    finite = []
    for e in pairs:
        if not np.isfinite(e.x):
            discarded.append({"reason": "infinite eigenvalue", "eigenvalue": None})
            log.info("dropping an infinite eigenvalue")
        else:
            finite.append(e)
    values = [e.x for e in finite]
    groups = _clusters(values, config.cluster_tol)
    mult = {}
    for g in groups:
        geo = _numeric_rank(np.column_stack([finite[i].vector for i in g]), config.rank_tol) if len(g) > 1 else 1
        for i in g:
            mult[i] = (len(g), geo)
    cands = []
    for i, e in enumerate(finite):
        m, geo = mult[i]
        status = DEGENERATE if geo > 1 else REJECTED
        try:
            if P.k:
                ext = np.concatenate([A.extension(e.x, e.vector), e.vector])
                coords, how = recover_coordinates(e.vector, basis, ext, exps)
            else:
                coords, how = recover_coordinates(e.vector, basis)
        except RecoveryError as exc:
            discarded.append({"reason": f"no coordinates: {exc}", "eigenvalue": [float(e.x.real), float(e.x.imag)]})
            continue
        point = assemble(e.x, coords)
        cands.append(RootCandidate(np.asarray(point, dtype=complex), e.x, m, geo, status=status,
                                   recovery=how, eigenvector=e.vector, eig_residual=e.residual))
    if any(c.status == DEGENERATE for c in cands):
        log.warning("eigenvalues of geometric multiplicity above one: their candidates are unreliable")
    filter_candidates(cands, eval_sys, config.accept_tol, config.reject_tol)
    return cands, discarded, basis


def _summary(cands: Sequence[RootCandidate], diag: dict) -> None:
    diag["counts"] = {s: sum(c.status == s for c in cands) for s in (ACCEPTED, AMBIGUOUS, REJECTED, DEGENERATE)}
    acc = [c.residual for c in cands if c.status == ACCEPTED]
    rej = [c.residual for c in cands if c.status == REJECTED]
    diag["max_accepted_residual"] = max(acc) if acc else None
    diag["min_rejected_residual"] = min(rej) if rej else None


# --------------------------------------------------------------------------
# pipelines

def solve_u(sys: PolySystem, seed: int = 0, config: SolverConfig = SolverConfig()) -> SolveResult:
    """All toric roots of a square system through the u-resultant."""
    if not sys.is_well_constrained():
        raise ValueError("solve_u needs as many polynomials as variables")
    t0 = time.perf_counter()
    usys = add_u_polynomial(sys, seed=seed, S=config.S, coeffs=config.u_coeffs)
    M = build_matrix(usys, seed=seed, max_attempts=config.max_attempts)
    t1 = time.perf_counter()
    c = np.array([float(x) for x in usys.c])
    diag: dict = {"pipeline": "u", "u_coefficients": [str(x) for x in usys.c],
                  "row_counts": M.row_counts(), "failure_bound": None}

    def assemble(x, coords):
        return coords

    cands, discarded, basis = _numeric_phase(M, sys, sys.names, assemble, config, seed, diag)
    for cnd in cands:
        cnd_u = -complex(c @ cnd.coordinates)
        cnd.u_mismatch = abs(cnd_u - cnd.eigenvalue) / max(1.0, abs(cnd.eigenvalue))
    _summary(cands, diag)
    diag["failure_bound"] = float(usys.failure_bound(max(1, diag["pencil_size"])))
    t2 = time.perf_counter()
    return SolveResult(tuple(sys.names), cands, discarded, diag,
                       {"offline": t1 - t0, "online": t2 - t1}, basis)


def solve_hidden(sys: PolySystem, k: int | str, seed: int = 0,
                 config: SolverConfig = SolverConfig()) -> SolveResult:
    """All toric roots of a square system, hiding variable ``k``."""
    if not sys.is_well_constrained():
        raise ValueError("solve_hidden needs as many polynomials as variables")
    if isinstance(k, str):
        k = sys.var_index(k)
    t0 = time.perf_counter()
    hsys = hide_variable(sys, k)
    M = build_matrix(hsys, seed=seed, max_attempts=config.max_attempts)
    t1 = time.perf_counter()
    diag: dict = {"pipeline": "hide", "hidden": sys.names[k], "row_counts": M.row_counts()}

    def assemble(x, coords):
        return hsys.original_point(list(coords), x)

    cands, discarded, basis = _numeric_phase(M, sys, sys.names, assemble, config, seed, diag)
    _summary(cands, diag)
    t2 = time.perf_counter()
    return SolveResult(tuple(sys.names), cands, discarded, diag,
                       {"offline": t1 - t0, "online": t2 - t1}, basis)


def distinct_roots(cands: Sequence[RootCandidate], tol: float = 1e-6) -> list[np.ndarray]:
    """Coordinates of the candidates with near-duplicates merged."""
    out: list[np.ndarray] = []
    for c in cands:
        x = np.asarray(c.coordinates)
        if not any(np.abs(x - y).max() <= tol * (1 + np.abs(y).max()) for y in out):
            out.append(x)
    return out


__all__ = [
    "SolverConfig", "PartitionedMatrix", "MatrixPolynomial", "MoebiusTransform", "RootCandidate",
    "SolveResult", "SolverError", "SingularSystemError", "NumericFailure", "RecoveryError",
    "MatrixConstructionError", "partition", "form_matrix_polynomial", "rank_balance", "apply_moebius",
    "companion", "linearize", "recover_coordinates", "filter_candidates", "residuals", "solve_u",
    "solve_hidden", "is_regular", "subvector_index", "distinct_roots",
]
