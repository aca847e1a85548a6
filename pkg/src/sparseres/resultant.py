"""Subdivision-based sparse resultant matrices.

Columns are the lattice points ``E = (Q + delta) ∩ Z^n`` of the perturbed
Minkowski sum.  Each ``p`` in ``E`` is located in the mixed subdivision
induced by a random lifting; if the containing cell has vertex summand
``a`` of support ``i`` (largest such ``i``), row ``p`` holds the
coefficients of ``x^(p - a) f_i``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Sequence

import numpy as np
import scipy.linalg

from . import exact, kernels
from .poly import PolySystem, UniPoly
from .polytope import DegenerateDeltaError, LatticePointSet, lattice_points, random_delta
from .subdivision import (MAX_ATTEMPTS, MixedSubdivision, NonGenericLiftingError, PointLocator,
                          as_support, minkowski_sum_of, mixed_volume, random_lifting)

log = logging.getLogger(__name__)

Point = tuple[int, ...]


class MatrixConstructionError(RuntimeError):
    """No generic lifting/perturbation pair was found."""


@dataclass(frozen=True)
class RowLabel:
    """Row ``x^(point - vertex) f_poly``."""

    point: Point
    poly_index: int
    vertex: Point

    @property
    def shift(self) -> Point:
        return tuple(p - a for p, a in zip(self.point, self.vertex))


@dataclass
class ResultantMatrix:
    """Square matrix with rows labelled by (point, polynomial, vertex).

    ``entries[r]`` maps column index to coefficient: an exact ``Fraction``
    (or float) for plain systems, a :class:`UniPoly` when the system carries
    a hidden variable or ``u``.
    """

    columns: LatticePointSet
    rows: tuple[RowLabel, ...]
    entries: list[dict[int, object]]
    supports: tuple[tuple[Point, ...], ...]
    seed: int | None
    lifting: tuple = ()
    attempts: int = 1
    hidden_name: str | None = None
    algorithm: str = "subdivision"
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def size(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), len(self.columns))

    @property
    def n(self) -> int:
        return len(self.supports[0][0]) if self.supports and self.supports[0] else 0

    @property
    def delta(self) -> tuple[Fraction, ...]:
        return self.columns.delta

    def is_polynomial(self) -> bool:
        return any(isinstance(c, UniPoly) for row in self.entries for c in row.values())

    @property
    def degree(self) -> int:
        """Largest degree of an entry in the hidden variable."""
        return max((c.degree for row in self.entries for c in row.values() if isinstance(c, UniPoly)),
                   default=0)

    def hidden_columns(self) -> list[int]:
        """Columns with at least one non-constant entry."""
        cols = set()
        for row in self.entries:
            for j, c in row.items():
                if isinstance(c, UniPoly) and not c.is_constant():
                    cols.add(j)
        return sorted(cols)

    def hidden_rows(self) -> list[int]:
        return [r for r, row in enumerate(self.entries)
                if any(isinstance(c, UniPoly) and not c.is_constant() for c in row.values())]

    def row_counts(self) -> list[int]:
        counts = [0] * len(self.supports)
        for r in self.rows:
            counts[r.poly_index] += 1
        return counts

    def coefficient_matrices(self) -> list[np.ndarray]:
        """Dense float ``M_k`` with ``M(x) = sum_k x^k M_k``."""
        if "coeffs" not in self._cache:
            N = self.size
            d = self.degree
            out = [np.zeros((N, N), dtype=_float_dtype(self)) for _ in range(d + 1)]
            for r, row in enumerate(self.entries):
                for j, c in row.items():
                    if isinstance(c, UniPoly):
                        for k, ck in enumerate(c.coeffs):
                            out[k][r, j] = _to_num(ck)
                    else:
                        out[0][r, j] = _to_num(c)
            self._cache["coeffs"] = out
        return [A.copy() for A in self._cache["coeffs"]]

    def dense(self, value=None) -> np.ndarray:
        """Numeric matrix, with the hidden variable set to ``value``."""
        Ms = self.coefficient_matrices()
        if len(Ms) == 1:
            return Ms[0]
        if value is None:
            raise ValueError("a value for the hidden variable is required")
        out = Ms[-1].astype(np.result_type(Ms[-1], np.asarray(value)))
        for A in reversed(Ms[:-1]):
            out = out * value + A
        return out

    def exact_rows(self, value=None) -> list[list[Fraction]]:
        """Dense rows with exact entries (hidden variable set to ``value``)."""
        N = self.size
        rows = []
        for row in self.entries:
            dense = [Fraction(0)] * N
            for j, c in row.items():
                if isinstance(c, UniPoly):
                    if value is None and not c.is_constant():
                        raise ValueError("a value for the hidden variable is required")
                    c = c(Fraction(value)) if value is not None else c.coeff(0)
                dense[j] = Fraction(c)
            rows.append(dense)
        return rows

    def exact_determinant(self, value=None) -> Fraction:
        return exact.det_frac(self.exact_rows(value))

    def det_mod_p(self, value=None, p: int = 2147483629) -> int | None:
        """Determinant of the row-scaled integer matrix modulo ``p``.

        Rows are scaled by the lcm of their denominators, which changes the
        determinant by a nonzero factor, so a nonzero result proves the
        exact determinant is nonzero.  Returns ``None`` when ``p`` divides a
        denominator.
        """
        rows = self.exact_rows(value)
        ints = []
        for row in rows:
            den = 1
            for x in row:
                den = lcm(den, x.denominator)
            if den % p == 0:
                return None
            ints.append([int(x * den) % p for x in row])
        return kernels.det_mod_p(np.array(ints, dtype=np.int64), p)


def _float_dtype(M: ResultantMatrix):
    for row in M.entries:
        for c in row.values():
            vals = c.coeffs if isinstance(c, UniPoly) else (c,)
            if any(isinstance(v, complex) for v in vals):
                return np.complex128
    return np.float64


def _to_num(c):
    return c if isinstance(c, complex) else float(c)


# ---------------------------------------------------------------------------
# construction


def row_content(p: Point, subdivision: MixedSubdivision, delta: Sequence) -> tuple[int, Point]:
    """(polynomial index, vertex) of the cell containing ``p - delta``."""
    x = [Fraction(a) - Fraction(d) for a, d in zip(p, delta)]
    cell = subdivision.locate(x)
    vs = cell.vertex_summands()
    if not vs:
        raise AssertionError("cell of a fine subdivision without a vertex summand")
    i, a = max(vs, key=lambda t: t[0])
    return i, a


def build_matrix(sys: PolySystem, seed: int = 0, max_attempts: int = MAX_ATTEMPTS) -> ResultantMatrix:
    """Sparse resultant matrix of ``n + 1`` polynomials in ``n`` variables."""
    if not sys.is_overconstrained():
        raise ValueError("build_matrix needs n + 1 polynomials in n variables")
    if any(f.is_zero() for f in sys.polys):
        raise ValueError("zero polynomial in the system")
    supports = tuple(f.support() for f in sys.polys)
    n = sys.n_vars
    hidden = getattr(sys, "hidden_name", None)
    if n == 0:
        (c,) = sys.polys[0].coefficients()
        cols = LatticePointSet(((),), ())
        return ResultantMatrix(cols, (RowLabel((), 0, ()),), [{0: c}], supports, seed, (), 1, hidden)
    Q = minkowski_sum_of(supports)
    if Q.dim < n:
        raise ValueError("supports do not jointly span the ambient space")
    rng = np.random.default_rng(seed)
    last_error: Exception | None = None
    for attempt in range(1, max_attempts + 1):
        delta = random_delta(n, rng)
        lifting = random_lifting(supports, rng)
        try:
            E = lattice_points(Q, delta)
            rows = _assign_rows(E, delta, lifting, supports)
            entries = _fill(E, rows, sys)
        except (DegenerateDeltaError, NonGenericLiftingError, KeyError) as exc:
            log.info("matrix attempt %d rejected: %s", attempt, exc)
            last_error = exc
            continue
        return ResultantMatrix(E, rows, entries, supports, seed, tuple(lifting), attempt, hidden)
    raise MatrixConstructionError(f"no generic lifting after {max_attempts} attempts: {last_error}")


def _assign_rows(E: LatticePointSet, delta, lifting, supports) -> tuple[RowLabel, ...]:
    locator = PointLocator(lifting)
    # lifting keeps supports sorted exactly as LaurentPolynomial.support()
    out = []
    for p in E.points:
        loc = locator.locate([Fraction(a) - d for a, d in zip(p, delta)])
        vs = loc.vertex_summands()
        if not vs:
            raise NonGenericLiftingError("cell without a vertex summand")
        i, j = max(vs)
        out.append(RowLabel(p, i, lifting[i].points[j]))
    return tuple(out)


def _fill(E: LatticePointSet, rows: Sequence[RowLabel], sys: PolySystem) -> list[dict[int, object]]:
    index = E.index()
    entries = []
    for r in rows:
        s = r.shift
        row = {}
        for e, c in sys.polys[r.poly_index].items():
            q = tuple(a + b for a, b in zip(s, e))
            row[index[q]] = c  # KeyError means the row leaves E
        entries.append(row)
    return entries


# ---------------------------------------------------------------------------
# checks and reports


def numeric_rank(A: np.ndarray, rel_tol: float = 1e-10) -> int:
    """Rank from column-pivoted QR: diagonal entries above ``rel_tol |R_00|``."""
    if A.size == 0:
        return 0
    R = scipy.linalg.qr(A, mode="r", pivoting=True)[0]
    d = np.abs(np.diag(R))
    if d.size == 0 or d[0] == 0:
        return 0
    return int(np.count_nonzero(d > rel_tol * d[0]))


def check_generic_nonsingularity(M: ResultantMatrix, trials: int = 3, seed: int = 0,
                                 rel_tol: float = 1e-10) -> bool:
    """True when some random specialization of the hidden variable has full rank."""
    rng = np.random.default_rng(seed)
    for _ in range(max(1, trials)):
        value = complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) if M.is_polynomial() else None
        A = M.dense(value)
        if numeric_rank(A, rel_tol) == M.size:
            return True
    return False


@dataclass(frozen=True)
class DegreeReport:
    """Rows per polynomial against the mixed volumes ``MV_{-i}``."""

    row_counts: tuple[int, ...]
    mv_minus: tuple[int, ...]

    @property
    def resultant_degree(self) -> int:
        return sum(self.mv_minus)

    @property
    def ok(self) -> bool:
        return all(c >= m for c, m in zip(self.row_counts, self.mv_minus))


def mixed_volumes_minus(supports: Sequence[Sequence[Point]], seed: int = 0) -> tuple[int, ...]:
    """``MV_{-i}``: mixed volume of all supports but the ``i``-th."""
    sups = [as_support(A) for A in supports]
    return tuple(mixed_volume(sups[:i] + sups[i + 1:], seed=seed) for i in range(len(sups)))


def degree_report(M: ResultantMatrix, supports: Sequence[Sequence[Point]] | None = None,
                  seed: int = 0, check: bool = True) -> DegreeReport:
    """Compare rows per polynomial with ``MV_{-i}``; with ``check`` a
    shortfall raises :class:`MatrixConstructionError`."""
    sups = M.supports if supports is None else supports
    rep = DegreeReport(tuple(M.row_counts()), mixed_volumes_minus(sups, seed))
    if check and not rep.ok:
        raise MatrixConstructionError(f"row counts {rep.row_counts} below MV_-i {rep.mv_minus}")
    return rep


# ---------------------------------------------------------------------------
# text export


def _fmt(c) -> str:
    if isinstance(c, UniPoly):
        return "[" + ",".join(_fmt(x) for x in c.coeffs) + "]"
    if isinstance(c, Fraction):
        return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
    if isinstance(c, complex):
        return f"({c.real!r}{c.imag:+}j)"
    return repr(float(c))


def _parse_coeff(s: str):
    s = s.strip()
    if s.startswith("["):
        body = s[1:-1]
        return UniPoly([_parse_coeff(x) for x in body.split(",")] if body else [])
    if s.startswith("("):
        return complex(s[1:-1])
    if "." in s or "e" in s or "inf" in s or "nan" in s:
        return float(s)
    return Fraction(s)


def export_matrix(M: ResultantMatrix, path) -> None:
    """Write the sparse text format (header, columns, rows, entries)."""
    def pt(p):
        return " ".join(str(x) for x in p)

    lines = [
        "# sparse resultant matrix",
        f"n {M.n}",
        f"size {M.size}",
        "delta " + " ".join(_fmt(d) for d in M.delta),
        f"seed {M.seed}",
        f"hidden {M.hidden_name or '-'}",
        f"algorithm {M.algorithm}",
        f"columns {len(M.columns)}",
    ]
    lines += [pt(p) for p in M.columns.points]
    lines.append(f"rows {M.size}")
    lines += [f"{pt(r.point)} | {r.poly_index} | {pt(r.vertex)}" for r in M.rows]
    nnz = sum(len(r) for r in M.entries)
    lines.append(f"entries {nnz}")
    for i, row in enumerate(M.entries):
        for j in sorted(row):
            lines.append(f"{i} {j} {_fmt(row[j])}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def import_matrix(path) -> ResultantMatrix:
    with open(path, encoding="utf-8") as fh:
        lines = [l.rstrip("\n") for l in fh if not l.startswith("#")]
    it = iter(lines)
    header = {}
    line = next(it)
    while not line.startswith("columns "):
        key, _, val = line.partition(" ")
        header[key] = val
        line = next(it)
    ncols = int(line.split()[1])
    n = int(header["n"])
    cols = [tuple(int(x) for x in next(it).split()) for _ in range(ncols)]
    nrows = int(next(it).split()[1])
    rows = []
    for _ in range(nrows):
        p, i, a = next(it).split("|")
        rows.append(RowLabel(tuple(int(x) for x in p.split()), int(i), tuple(int(x) for x in a.split())))
    nnz = int(next(it).split()[1])
    entries: list[dict[int, object]] = [dict() for _ in range(nrows)]
    for _ in range(nnz):
        i, j, c = next(it).split(" ", 2)
        entries[int(i)][int(j)] = _parse_coeff(c)
    delta = tuple(Fraction(x) for x in header["delta"].split())
    seed = None if header["seed"] == "None" else int(header["seed"])
    hidden = None if header["hidden"] == "-" else header["hidden"]
    if n == 0:
        cols = [()]
    supports = _supports_from(rows, entries, cols)
    return ResultantMatrix(LatticePointSet(tuple(cols), delta), tuple(rows), entries, supports, seed,
                           (), 1, hidden, header["algorithm"])


def _supports_from(rows, entries, cols) -> tuple[tuple[Point, ...], ...]:
    found: dict[int, tuple[Point, ...]] = {}
    for r, row in zip(rows, entries):
        if r.poly_index in found:
            continue
        s = r.shift
        found[r.poly_index] = tuple(sorted(tuple(q - a for q, a in zip(cols[j], s)) for j in row))
    return tuple(found[i] for i in sorted(found))


def export_dense(M: ResultantMatrix, path, value=None) -> None:
    """Dense float dump for debugging (``numpy.savetxt`` layout)."""
    if M.is_polynomial() and value is None:
        stack = np.concatenate(M.coefficient_matrices(), axis=0)
        np.savetxt(path, stack.real if not np.iscomplexobj(stack) else stack,
                   header=f"coefficient matrices M_0..M_{M.degree} stacked, size {M.size}")
    else:
        np.savetxt(path, M.dense(value), header=f"size {M.size}")
