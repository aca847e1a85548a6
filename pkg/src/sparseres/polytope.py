"""Lattice polytopes: hulls, exact volumes, Minkowski sums, lattice points."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial, lcm
from typing import Iterable, Sequence

import numpy as np

from . import exact, kernels
from .hull import affine_frame, facet_cone


class DegenerateDeltaError(ValueError):
    """A lattice point lies exactly on the boundary of ``Q + delta``."""


@dataclass(frozen=True, eq=False)
class Polytope:
    """Convex hull of finitely many rational points.

    ``vertices`` is irredundant and sorted lexicographically.  Facets are
    ``A x + b >= 0`` (integer rows, valid on the polytope) and the affine
    hull is ``{x : C x = c}``.  ``incidence[f, v]`` marks vertex ``v`` on
    facet ``f``.  For lower dimensional polytopes the facets are those of
    the polytope inside its affine hull.  ``scale`` is the common
    denominator used to make rational input integral.
    """

    vertices: tuple[tuple, ...]
    dim: int
    A: np.ndarray
    b: np.ndarray
    C: np.ndarray
    c: np.ndarray
    incidence: np.ndarray
    scale: int = 1
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def ambient_dim(self) -> int:
        return len(self.vertices[0])

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    def int_vertices(self) -> np.ndarray:
        """Vertices multiplied by ``scale``, as an integer array."""
        key = "intv"
        if key not in self._cache:
            self._cache[key] = np.array(
                [[int(x * self.scale) for x in v] for v in self.vertices], dtype=object
            ).astype(np.int64)
        return self._cache[key]

    def contains(self, point, strict: bool = False) -> bool:
        p = [Fraction(x) * self.scale for x in point]
        for row, rhs in zip(self.C, self.c):
            if sum(int(a) * x for a, x in zip(row, p)) != int(rhs):
                return False
        for row, off in zip(self.A, self.b):
            v = sum(int(a) * x for a, x in zip(row, p)) + int(off)
            if v < 0 or (strict and v == 0):
                return False
        return True

    def __eq__(self, other) -> bool:
        return isinstance(other, Polytope) and self.vertices == other.vertices

    def __hash__(self) -> int:
        return hash(self.vertices)

    def __repr__(self) -> str:
        return f"Polytope(dim={self.dim}, n_vertices={self.n_vertices})"


def _as_rational_rows(points) -> tuple[list[list[Fraction]], int]:
    rows = [[Fraction(x) for x in p] for p in points]
    den = 1
    for r in rows:
        for x in r:
            den = lcm(den, x.denominator)
    return rows, den


def convex_hull(points: Iterable[Sequence]) -> Polytope:
    """Exact convex hull of rational points in any dimension."""
    rows, den = _as_rational_rows(points)
    if not rows:
        raise ValueError("convex_hull needs at least one point")
    ints = sorted({tuple(int(x * den) for x in r) for r in rows})
    n = len(ints[0])
    hull = _int_hull(ints, n)
    verts = tuple(tuple(Fraction(x, den) if den != 1 else int(x) for x in v) for v in hull["vertices"])
    return Polytope(
        vertices=verts,
        dim=hull["dim"],
        A=hull["A"],
        b=hull["b"],
        C=hull["C"],
        c=hull["c"],
        incidence=hull["incidence"],
        scale=den,
    )


def _int_hull(ints: list[tuple[int, ...]], n: int, prefer: list[int] | None = None) -> dict:
    base, k, coords, equations = affine_frame(ints, prefer)
    C = np.array(equations, dtype=np.int64).reshape(len(equations), n)
    c = C @ np.array(base, dtype=np.int64) if len(equations) else np.zeros(0, dtype=np.int64)
    P = np.array(ints, dtype=np.int64).reshape(len(ints), n)
    if k == 0:
        return dict(vertices=[ints[0]], dim=0, A=np.zeros((0, n), np.int64), b=np.zeros(0, np.int64),
                    C=C, c=c, incidence=np.zeros((0, 1), bool), coords=coords)
    Y = P[:, coords]
    if k == 1:
        y = Y[:, 0]
        lo, hi = int(np.argmin(y)), int(np.argmax(y))
        R = np.array([[-int(y[lo]), 1], [int(y[hi]), -1]], dtype=np.int64)
        Z = np.zeros((2, len(ints)), bool)
        Z[0] = y == y[lo]
        Z[1] = y == y[hi]
    else:
        R, Z = facet_cone(Y)
    R = np.asarray(R)
    # a point is a vertex iff no other point lies on all of its facets
    Zi = Z.astype(np.int32)
    on = Zi.T @ Zi                       # on[i, j] = #facets containing both
    deg = np.diag(on)
    covered = (on == deg[:, None]).sum(axis=1)
    is_vertex = covered == 1
    idx = np.flatnonzero(is_vertex)
    A = np.zeros((R.shape[0], n), dtype=R.dtype)
    A[:, coords] = R[:, 1:]
    b = R[:, 0]
    if A.dtype == object:
        A, b = A.astype(np.int64), b.astype(np.int64)
    return dict(vertices=[ints[i] for i in idx], dim=k, A=A, b=b, C=C, c=c,
                incidence=Z[:, idx], coords=coords)


# ---------------------------------------------------------------------------
# volume by recursive pyramids over the face lattice


def volume(P: Polytope) -> Fraction:
    """Exact Lebesgue volume; zero unless ``P`` is full dimensional."""
    n = P.ambient_dim
    if P.dim < n:
        return Fraction(0)
    if "volume" in P._cache:
        return P._cache["volume"]
    V = [tuple(int(x) for x in v) for v in P.int_vertices()]
    inc = [sum(1 << int(v) for v in np.flatnonzero(row)) for row in P.incidence]
    full = (1 << len(V)) - 1
    measure = _FaceMeasure(V, inc)
    mu = measure.mu(full)
    basis = measure.basis(full)
    vol = mu * abs(exact.det_int(basis)) / Fraction(P.scale) ** n
    P._cache["volume"] = vol
    return vol


class _FaceMeasure:
    """Face volumes relative to a fixed lattice basis of each face.

    For a face ``S`` with basis ``B_S`` (difference vectors of its vertices)
    ``mu(S)`` is its volume measured in ``B_S`` coordinates.  Coning from a
    fixed vertex ``v`` over the facets ``G`` of ``S`` gives

        mu(S) = sum_G |det [B_G; v - g0]_C| mu(G) / (k |det (B_S)_C|)

    where ``C`` is any coordinate set on which ``S`` projects injectively.
    """

    def __init__(self, V: list[tuple[int, ...]], facet_masks: list[int]):
        self.V = V
        self.facets = facet_masks
        self._mu: dict[int, Fraction] = {}
        self._basis: dict[int, list[list[int]]] = {}

    @staticmethod
    def _members(S: int) -> list[int]:
        out = []
        i = 0
        while S:
            if S & 1:
                out.append(i)
            S >>= 1
            i += 1
        return out

    def basis(self, S: int) -> list[list[int]]:
        if S not in self._basis:
            idx = self._members(S)
            v0 = self.V[idx[0]]
            diffs = [[a - b for a, b in zip(self.V[i], v0)] for i in idx[1:]]
            rows = exact.independent_rows(diffs) if diffs else []
            self._basis[S] = [diffs[i] for i in rows]
        return self._basis[S]

    def subfacets(self, S: int) -> list[int]:
        cands = set()
        for F in self.facets:
            G = S & F
            if G and G != S:
                cands.add(G)
        cands = sorted(cands, key=lambda x: -bin(x).count("1"))
        maximal: list[int] = []
        for G in cands:
            if not any(G & H == G for H in maximal):
                maximal.append(G)
        return maximal

    def mu(self, S: int) -> Fraction:
        if S in self._mu:
            return self._mu[S]
        B = self.basis(S)
        k = len(B)
        if k == 0:
            self._mu[S] = Fraction(1)
            return self._mu[S]
        C = exact.independent_columns(B)
        detS = abs(exact.det_int([[row[j] for j in C] for row in B]))
        idx = self._members(S)
        apex = idx[0]
        v = self.V[apex]
        total = Fraction(0)
        for G in self.subfacets(S):
            if (G >> apex) & 1:
                continue
            gidx = self._members(G)
            g0 = self.V[gidx[0]]
            M = [list(r) for r in self.basis(G)] + [[a - b for a, b in zip(v, g0)]]
            d = exact.det_int([[row[j] for j in C] for row in M])
            if d:
                total += abs(d) * self.mu(G)
        val = total / (k * detS)
        self._mu[S] = val
        return val


def normalized_volume(P: Polytope) -> int:
    """``n! Vol(P)`` as an integer (lattice polytopes only)."""
    v = volume(P) * factorial(P.ambient_dim)
    if v.denominator != 1:
        raise ValueError("normalized volume of a non-lattice polytope")
    return int(v)


# ---------------------------------------------------------------------------
# Minkowski sums


def minkowski_sum(A: Polytope, B: Polytope) -> Polytope:
    """Convex hull of pairwise vertex sums."""
    if A.ambient_dim != B.ambient_dim:
        raise ValueError("Minkowski sum of polytopes in different dimensions")
    pts = {tuple(a + b for a, b in zip(u, v)) for u in A.vertices for v in B.vertices}
    return convex_hull(sorted(pts))


def minkowski_sum_all(polys: Sequence[Polytope]) -> Polytope:
    if not polys:
        raise ValueError("empty Minkowski sum")
    acc = polys[0]
    for P in polys[1:]:
        acc = minkowski_sum(acc, P)
    return acc


# ---------------------------------------------------------------------------
# lattice points of Q + delta


@dataclass(frozen=True)
class LatticePointSet:
    """Integer points of ``Q + delta`` in lexicographic order."""

    points: tuple[tuple[int, ...], ...]
    delta: tuple[Fraction, ...]

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def index(self) -> dict[tuple[int, ...], int]:
        return {p: i for i, p in enumerate(self.points)}


# denominators 2^10 * 10007; numerators up to 10^4 give |delta_j| < 1e-3
DELTA_DENOMINATOR = 2 ** 10 * 10007
DELTA_NUMERATOR_MAX = 10 ** 4


def random_delta(n: int, rng: np.random.Generator) -> tuple[Fraction, ...]:
    nums = []
    for _ in range(n):
        x = 0
        while x == 0:
            x = int(rng.integers(-DELTA_NUMERATOR_MAX, DELTA_NUMERATOR_MAX + 1))
        nums.append(Fraction(x, DELTA_DENOMINATOR))
    return tuple(nums)


def lattice_points(Q: Polytope, delta: Sequence) -> LatticePointSet:
    """All integer points strictly inside ``Q + delta``.

    Raises :class:`DegenerateDeltaError` when some integer point lies on the
    boundary of ``Q + delta``; the membership test is exact.
    """
    n = Q.ambient_dim
    delta = tuple(Fraction(x) for x in delta)
    if len(delta) != n:
        raise ValueError("delta has the wrong length")
    if Q.dim < n:
        # a lower dimensional polytope moved by a generic delta holds no
        # lattice point in its relative interior
        return LatticePointSet((), delta)
    D = 1
    for x in delta:
        D = lcm(D, x.denominator)
    dnum = np.array([int(x * D) for x in delta], dtype=np.int64)
    verts = [[Fraction(x) for x in v] for v in Q.vertices]
    lo = [int(np.floor(min(v[j] for v in verts) + delta[j])) for j in range(n)]
    hi = [int(np.ceil(max(v[j] for v in verts) + delta[j])) for j in range(n)]
    grids = np.meshgrid(*[np.arange(a, b + 1) for a, b in zip(lo, hi)], indexing="ij")
    box = np.stack([g.ravel() for g in grids], axis=1).astype(np.int64)
    # facets read A y + b >= 0 in y = scale * x; with x = p - dnum / D this
    # becomes D (scale A p + b) - scale A dnum >= 0
    cls = kernels.classify_box(box, Q.A.astype(np.int64) * Q.scale, Q.b.astype(np.int64), dnum, D)
    if np.any(cls == -1):
        raise DegenerateDeltaError("a lattice point lies on the boundary of Q + delta")
    inside = box[cls == 1]
    pts = tuple(sorted(tuple(int(x) for x in p) for p in inside))
    return LatticePointSet(pts, delta)
