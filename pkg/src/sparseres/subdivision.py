"""Regular fine mixed subdivisions and mixed volumes.

A random integer lifting turns each support into a regular triangulation
(the lower hull of the lifted points, computed exactly).  Cells of the
induced mixed subdivision are tuples of triangulation faces ``F_i`` that
are simultaneously lower faces for one direction ``(alpha, 1)``.  They are
found by a depth-first search over supports; every node is pruned with the
LP kernel ``max_slack`` and every leaf is re-verified in exact arithmetic.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Sequence

import numpy as np

from . import exact, kernels
from .hull import facet_cone
from .polytope import Polytope, convex_hull, minkowski_sum, volume

log = logging.getLogger(__name__)

LIFT_MAX = 2 ** 16
MAX_ATTEMPTS = 10
# optimal slacks of feasible nodes are rationals with small denominators,
# far above this threshold; float noise is far below it
_SLACK_TOL = 1e-6

Point = tuple[int, ...]


class NonGenericLiftingError(RuntimeError):
    """The lifting does not induce a fine subdivision; draw another one."""


def as_support(points) -> tuple[Point, ...]:
    """Sorted, duplicate free tuple of integer exponent vectors."""
    return tuple(sorted({tuple(int(x) for x in p) for p in points}))


@dataclass(frozen=True)
class LiftedSupport:
    points: tuple[Point, ...]
    lifts: tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.points[0])

    def lifted(self) -> np.ndarray:
        return np.array([p + (w,) for p, w in zip(self.points, self.lifts)], dtype=np.int64)


def random_lifting(supports: Sequence[Sequence[Point]], rng: np.random.Generator) -> list[LiftedSupport]:
    out = []
    for A in supports:
        A = as_support(A)
        lifts = tuple(int(x) for x in rng.integers(0, LIFT_MAX + 1, size=len(A)))
        out.append(LiftedSupport(A, lifts))
    return out


# ---------------------------------------------------------------------------
# regular triangulations from lower hulls


def lower_simplices(L: LiftedSupport) -> list[tuple[int, ...]]:
    """Maximal cells of the triangulation induced by the lifting.

    Raises :class:`NonGenericLiftingError` when a lower facet is not a
    simplex, i.e. the induced subdivision is not a triangulation.
    """
    pts = L.points
    m = len(pts)
    if m == 1:
        return [(0,)]
    P = [list(p) for p in pts]
    base = P[0]
    diffs = [[a - b for a, b in zip(p, base)] for p in P[1:]]
    k = exact.rank(diffs)
    if m == k + 1:
        return [tuple(range(m))]
    lifted = L.lifted()
    ldiffs = (lifted[1:] - lifted[0]).tolist()
    n = L.dim
    # projection coordinates for the lifted cloud, lifting coordinate first
    cols = sorted(exact.independent_columns(ldiffs, [n] + list(range(n))))
    if n not in cols or len(cols) != k + 1:
        raise NonGenericLiftingError("lifting is affine on the support")
    R, Z = facet_cone(lifted[:, cols])
    R = np.asarray(R)
    cells = []
    for f in range(R.shape[0]):
        if int(R[f, -1]) <= 0:
            continue
        idx = tuple(int(i) for i in np.flatnonzero(Z[f]))
        if len(idx) != k + 1:
            raise NonGenericLiftingError("lower facet is not a simplex")
        cells.append(idx)
    return cells


def triangulation_faces(cells: list[tuple[int, ...]], dims: set[int] | None = None) -> list[tuple[int, ...]]:
    """All faces (subsets) of the given simplices, optionally by dimension."""
    faces = set()
    for cell in cells:
        for r in range(1, len(cell) + 1):
            if dims is not None and r - 1 not in dims:
                continue
            for sub in itertools.combinations(cell, r):
                faces.add(sub)
    return sorted(faces, key=lambda f: (len(f), f))


# ---------------------------------------------------------------------------
# mixed cells


@dataclass(frozen=True)
class MixedCell:
    """One cell ``F_1 + ... + F_m`` of a fine mixed subdivision.

    ``faces[i]`` holds indices into support ``i``; ``alpha`` is the exact
    inner direction for which every ``F_i`` is the lower face.
    """

    faces: tuple[tuple[int, ...], ...]
    points: tuple[tuple[Point, ...], ...]
    alpha: tuple[Fraction, ...]
    volume: Fraction

    @property
    def type(self) -> tuple[int, ...]:
        return tuple(len(f) - 1 for f in self.faces)

    def is_fully_mixed(self) -> bool:
        return all(len(f) == 2 for f in self.faces)

    def vertex_summands(self) -> list[tuple[int, Point]]:
        """``(support index, point)`` for every summand that is a vertex."""
        return [(i, pts[0]) for i, pts in enumerate(self.points) if len(pts) == 1]

    def contains(self, x, strict: bool = False) -> bool:
        """Exact membership of a rational point in the closed cell."""
        x = [Fraction(v) for v in x]
        n = len(x)
        base = [sum(Fraction(p[0][j]) for p in self.points) for j in range(n)]
        cols = []
        owners = []
        for i, pts in enumerate(self.points):
            for a in pts[1:]:
                cols.append([a[j] - pts[0][j] for j in range(n)])
                owners.append(i)
        if not cols:
            return x == base
        A = [[cols[c][j] for c in range(len(cols))] for j in range(n)]
        lam = exact.solve(A, [x[j] - base[j] for j in range(n)])
        sums: dict[int, Fraction] = {}
        for l, i in zip(lam, owners):
            if l < 0 or (strict and l == 0):
                return False
            sums[i] = sums.get(i, Fraction(0)) + l
        return all(s < 1 if strict else s <= 1 for s in sums.values())


class _FaceData:
    """Float constraint blocks of one candidate face, for the LP kernel."""

    __slots__ = ("idx", "dim", "dirs", "E", "w", "G", "h")

    def __init__(self, L: LiftedSupport, idx: tuple[int, ...], pts: np.ndarray, lifts: np.ndarray):
        self.idx = idx
        self.dim = len(idx) - 1
        a0 = pts[idx[0]]
        w0 = lifts[idx[0]]
        inside = np.zeros(len(pts), bool)
        inside[list(idx)] = True
        rest = ~inside
        self.dirs = (pts[list(idx[1:])] - a0).astype(np.float64)
        self.E = self.dirs
        self.w = (w0 - lifts[list(idx[1:])]).astype(np.float64)
        self.G = (pts[rest] - a0).astype(np.float64)
        self.h = (w0 - lifts[rest]).astype(np.float64)


def _exact_alpha(lifted: Sequence[LiftedSupport], faces: Sequence[tuple[int, ...]]) -> tuple[Fraction, ...] | None:
    rows, rhs = [], []
    for L, F in zip(lifted, faces):
        a0, w0 = L.points[F[0]], L.lifts[F[0]]
        for j in F[1:]:
            rows.append([x - y for x, y in zip(L.points[j], a0)])
            rhs.append(w0 - L.lifts[j])
    n = lifted[0].dim
    if len(rows) != n:
        return None
    try:
        alpha = exact.solve(rows, rhs)
    except ZeroDivisionError:
        return None
    return tuple(alpha)


def _verify_cell(lifted, faces, alpha) -> bool:
    for L, F in zip(lifted, faces):
        a0, w0 = L.points[F[0]], L.lifts[F[0]]
        ref = sum(x * y for x, y in zip(alpha, a0)) + w0
        fs = set(F)
        for j, (p, w) in enumerate(zip(L.points, L.lifts)):
            v = sum(x * y for x, y in zip(alpha, p)) + w - ref
            if j in fs:
                if v != 0:
                    return False
            elif v <= 0:
                return False
    return True


def enumerate_cells(lifted: Sequence[LiftedSupport], fully_mixed: bool) -> list[MixedCell]:
    """Depth-first search for the cells of the lifted mixed subdivision.

    With ``fully_mixed`` only cells whose summands are all edges are
    returned (the mixed cells that define the mixed volume of ``n``
    supports); otherwise all cells of the subdivision of an arbitrary
    number of supports are returned.
    """
    n = lifted[0].dim
    m = len(lifted)
    cands: list[list[_FaceData]] = []
    for L in lifted:
        cells = lower_simplices(L)
        faces = triangulation_faces(cells, {1} if fully_mixed else None)
        pts = np.array(L.points, dtype=np.int64)
        lifts = np.array(L.lifts, dtype=np.int64)
        cands.append([_FaceData(L, f, pts, lifts) for f in faces])
    if fully_mixed and m != n:
        raise ValueError("fully mixed cells need exactly n supports")
    order = sorted(range(m), key=lambda i: len(cands[i]))

    found: list[MixedCell] = []
    chosen: list[_FaceData] = [None] * m  # type: ignore[list-item]

    def dfs(depth: int, used: int, basis: np.ndarray):
        if depth == m:
            if used != n:
                return
            faces = tuple(chosen[i].idx for i in range(m))
            alpha = _exact_alpha(lifted, faces)
            if alpha is None or not _verify_cell(lifted, faces, alpha):
                raise NonGenericLiftingError("float cell failed exact verification")
            dirs = []
            denom = 1
            for L, F in zip(lifted, faces):
                a0 = L.points[F[0]]
                dirs.extend([x - y for x, y in zip(L.points[j], a0)] for j in F[1:])
                denom *= factorial(len(F) - 1)
            vol = Fraction(abs(exact.det_int(dirs)), denom)
            pts = tuple(tuple(L.points[j] for j in F) for L, F in zip(lifted, faces))
            found.append(MixedCell(faces, pts, alpha, vol))
            return
        i = order[depth]
        for fd in cands[i]:
            if used + fd.dim > n:
                continue
            if fully_mixed and fd.dim != 1:
                continue
            if not fully_mixed and depth == m - 1 and used + fd.dim != n:
                continue
            if fd.dim:
                res = fd.dirs.copy()
                if basis.shape[0]:
                    res = res - (res @ basis.T) @ basis
                q, r = np.linalg.qr(res.T)
                if np.min(np.abs(np.diag(r))) < 1e-9 * max(1.0, np.abs(fd.dirs).max()):
                    continue
                new_basis = np.concatenate([basis, q.T], axis=0)
            else:
                new_basis = basis
            chosen[i] = fd
            picked = [chosen[order[k]] for k in range(depth + 1)]
            G = np.concatenate([p.G for p in picked], axis=0)
            h = np.concatenate([p.h for p in picked])
            E = np.concatenate([p.E for p in picked], axis=0)
            w = np.concatenate([p.w for p in picked])
            t = kernels.max_slack(G, h, E, w)
            if np.isnan(t):
                raise NonGenericLiftingError("LP iteration limit in cell search")
            if t > _SLACK_TOL:
                dfs(depth + 1, used + fd.dim, new_basis)
            chosen[i] = None  # type: ignore[call-overload]

    dfs(0, 0, np.zeros((0, n)))
    return found


# ---------------------------------------------------------------------------
# public API


@dataclass
class MixedSubdivision:
    """Cells of the regular fine mixed subdivision of ``Q_1 + ... + Q_m``."""

    supports: tuple[tuple[Point, ...], ...]
    lifting: tuple[LiftedSupport, ...]
    cells: list[MixedCell]
    seed: int | None = None

    def total_volume(self) -> Fraction:
        return sum((c.volume for c in self.cells), Fraction(0))

    def mixed_cells(self, vertex: int) -> list[MixedCell]:
        """Cells whose summand ``vertex`` is a point and all others edges.

        Their volumes add up to the mixed volume of the other supports.
        """
        return [c for c in self.cells
                if len(c.faces[vertex]) == 1
                and all(len(f) == 2 for k, f in enumerate(c.faces) if k != vertex)]

    def locate(self, point) -> MixedCell:
        """The cell whose interior contains ``point`` (exact scan)."""
        for c in self.cells:
            if c.contains(point, strict=True):
                return c
        raise ValueError("point is not in the interior of any cell")


def mixed_subdivision(supports: Sequence[Sequence[Point]], seed: int = 0,
                      lifting: Sequence[LiftedSupport] | None = None,
                      check_volume: bool = True) -> MixedSubdivision:
    """Regular fine mixed subdivision induced by a random lifting.

    With an explicit ``lifting`` no retry happens and a non-generic lifting
    raises :class:`NonGenericLiftingError`.
    """
    sups = tuple(as_support(A) for A in supports)
    if lifting is not None:
        lifted = tuple(LiftedSupport(as_support(L.points), tuple(L.lifts)) for L in lifting)
        cells = enumerate_cells(lifted, fully_mixed=False)
        sub = MixedSubdivision(sups, lifted, cells, None)
        if check_volume:
            _check_volume(sub)
        return sub
    rng = np.random.default_rng(seed)
    for attempt in range(MAX_ATTEMPTS):
        lifted = tuple(random_lifting(sups, rng))
        try:
            cells = enumerate_cells(lifted, fully_mixed=False)
            sub = MixedSubdivision(sups, lifted, cells, seed)
            if check_volume:
                _check_volume(sub)
            return sub
        except NonGenericLiftingError as exc:
            log.info("mixed subdivision attempt %d rejected: %s", attempt, exc)
    raise NonGenericLiftingError(f"no generic lifting in {MAX_ATTEMPTS} attempts")


def _check_volume(sub: MixedSubdivision) -> None:
    Q = minkowski_sum_of(sub.supports)
    if Q.dim == len(sub.supports[0][0]) and sub.total_volume() != volume(Q):
        raise NonGenericLiftingError("cell volumes do not add up to Vol(Q)")


def minkowski_sum_of(supports: Sequence[Sequence[Point]]) -> Polytope:
    acc = convex_hull(supports[0])
    for A in supports[1:]:
        acc = minkowski_sum(acc, convex_hull(A))
    return acc


def mixed_volume(supports: Sequence[Sequence[Point]], seed: int = 0, verify: bool = False) -> int:
    """Lattice mixed volume ``MV(Q_1, ..., Q_n)`` from fully mixed cells.

    ``verify=True`` recomputes with a second independent lifting and raises
    if the two values differ.
    """
    sups = [as_support(A) for A in supports]
    n = len(sups)
    if n == 0:
        return 1
    if any(len(A) == 0 for A in sups):
        raise ValueError("empty support")
    if any(len(A[0]) != n for A in sups):
        raise ValueError("mixed_volume needs n supports in n variables")
    if any(len(A) == 1 for A in sups):
        return 0
    rng = np.random.default_rng(seed)
    values = []
    attempts = 0
    while len(values) < (2 if verify else 1):
        if attempts == MAX_ATTEMPTS:
            raise NonGenericLiftingError(f"no generic lifting in {MAX_ATTEMPTS} attempts")
        attempts += 1
        lifted = random_lifting(sups, rng)
        try:
            cells = enumerate_cells(lifted, fully_mixed=True)
        except NonGenericLiftingError as exc:
            log.info("mixed volume attempt %d rejected: %s", attempts, exc)
            continue
        values.append(int(sum(c.volume for c in cells)))
    if len(set(values)) != 1:
        raise NonGenericLiftingError(f"liftings disagree on the mixed volume: {values}")
    return values[0]


def mixed_volume_ie(supports: Sequence[Sequence[Point]]) -> int:
    """Mixed volume by inclusion-exclusion over Minkowski sums of subsets.

    ``MV = sum over nonempty S of (-1)^(n - |S|) Vol(sum_{i in S} Q_i)``.
    """
    sups = [as_support(A) for A in supports]
    n = len(sups)
    if n == 0:
        return 1
    polys = [convex_hull(A) for A in sups]
    sums: dict[int, Polytope] = {}
    total = Fraction(0)
    for mask in range(1, 1 << n):
        low = mask & -mask
        rest = mask ^ low
        i = low.bit_length() - 1
        P = polys[i] if rest == 0 else minkowski_sum(sums[rest], polys[i])
        sums[mask] = P
        sign = -1 if (n - bin(mask).count("1")) % 2 else 1
        total += sign * volume(P)
    if total.denominator != 1:
        raise ArithmeticError(f"inclusion-exclusion gave a non-integer {total}")
    return int(total)


def stable_mixed_volume(supports: Sequence[Sequence[Point]], seed: int = 0) -> int:
    """``MV(A_1 + {0}, ..., A_n + {0})``: the bound on roots in affine space."""
    sups = [as_support(A) for A in supports]
    n = len(sups)
    zero = (0,) * n
    return mixed_volume([as_support(list(A) + [zero]) for A in sups], seed=seed)


# ---------------------------------------------------------------------------
# point location by linear programming


@dataclass(frozen=True)
class Location:
    """Cell of the lifted subdivision that contains a (shifted) point."""

    faces: tuple[tuple[int, ...], ...]
    alpha: tuple[Fraction, ...]

    def vertex_summands(self) -> list[tuple[int, int]]:
        return [(i, F[0]) for i, F in enumerate(self.faces) if len(F) == 1]


class PointLocator:
    """Locate points in the mixed subdivision of lifted supports.

    The containing cell of ``x`` is the optimal basis of

        min sum l_ij w_ij  s.t.  sum l_ij a_ij = x, sum_j l_ij = 1, l >= 0.

    The float optimum from the simplex kernel is certified exactly:
    the basic solution must be strictly positive and every nonbasic
    reduced cost strictly positive, which proves the point lies in the
    interior of a unique fine cell.
    """

    def __init__(self, lifted: Sequence[LiftedSupport]):
        self.lifted = tuple(lifted)
        n = self.lifted[0].dim
        m = len(self.lifted)
        cols = []
        owner = []
        local = []
        cost = []
        for i, L in enumerate(self.lifted):
            for j, (p, w) in enumerate(zip(L.points, L.lifts)):
                col = list(p) + [int(k == i) for k in range(m)]
                cols.append(col)
                owner.append(i)
                local.append(j)
                cost.append(w)
        self.n, self.m = n, m
        self.cols = cols
        self.owner = owner
        self.local = local
        self.cost = cost
        self.A = np.array(cols, dtype=np.float64).T.copy()
        self.c = np.array(cost, dtype=np.float64)

    def locate(self, x) -> Location:
        x = [Fraction(v) for v in x]
        b = np.array([float(v) for v in x] + [1.0] * self.m)
        status, lam, obj, basis = kernels.simplex(self.A, b, self.c)
        if status != kernels.OPTIMAL:
            raise NonGenericLiftingError(f"point location LP failed with status {status}")
        basis = [int(j) for j in basis]
        if any(j >= len(self.cols) for j in basis):
            raise NonGenericLiftingError("point location LP kept an artificial column")
        return self._certify(x, basis)

    def _certify(self, x, basis: list[int]) -> Location:
        rows = len(basis)
        AB = [[self.cols[j][r] for j in basis] for r in range(rows)]
        rhs = list(x) + [1] * self.m
        try:
            lamB = exact.solve(AB, rhs)
        except ZeroDivisionError:
            raise NonGenericLiftingError("singular basis in point location") from None
        if any(l <= 0 for l in lamB):
            raise NonGenericLiftingError("point lies on a cell boundary")
        ABt = [[AB[r][k] for r in range(rows)] for k in range(rows)]
        y = exact.solve(ABt, [self.cost[j] for j in basis])
        inb = set(basis)
        for j, col in enumerate(self.cols):
            if j in inb:
                continue
            red = self.cost[j] - sum(yi * ci for yi, ci in zip(y, col) if ci)
            if red <= 0:
                raise NonGenericLiftingError("non-unique optimal cell in point location")
        faces: list[list[int]] = [[] for _ in range(self.m)]
        for j in basis:
            faces[self.owner[j]].append(self.local[j])
        alpha = tuple(-v for v in y[: self.n])
        return Location(tuple(tuple(sorted(f)) for f in faces), alpha)
