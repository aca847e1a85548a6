"""Sparse multivariate Laurent polynomials with exact coefficients.

Coefficients are ``Fraction`` (exact), ``float``/``complex`` (numeric), or
:class:`UniPoly` when one variable has been moved into the coefficient
ring.  Terms are kept in lexicographic order of their exponent vectors.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Number
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

Exponent = tuple[int, ...]


class ZeroCoordinateError(ZeroDivisionError):
    """A negative exponent met a zero coordinate."""


def _coerce(c):
    if isinstance(c, UniPoly):
        return c
    if isinstance(c, bool):
        return Fraction(int(c))
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (float, complex, np.floating, np.complexfloating)):
        return complex(c) if isinstance(c, (complex, np.complexfloating)) else float(c)
    if isinstance(c, Number):
        return c
    raise TypeError(f"unsupported coefficient {c!r}")


def _is_zero(c) -> bool:
    if isinstance(c, UniPoly):
        return c.is_zero()
    return c == 0


def to_float(c):
    """Round an exact coefficient to float (complex if needed)."""
    if isinstance(c, complex):
        return c
    return float(c)


class UniPoly:
    """Polynomial in one (hidden) variable, coefficients low to high."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [_coerce(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def const(cls, c) -> "UniPoly":
        return cls([c])

    @classmethod
    def var(cls) -> "UniPoly":
        return cls([0, 1])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def coeff(self, k: int):
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def _lift(self, other) -> "UniPoly":
        return other if isinstance(other, UniPoly) else UniPoly([other])

    def __add__(self, other):
        o = self._lift(other)
        n = max(len(self.coeffs), len(o.coeffs))
        return UniPoly(self.coeff(k) + o.coeff(k) for k in range(n))

    __radd__ = __add__

    def __neg__(self):
        return UniPoly(-c for c in self.coeffs)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        if self.is_zero() or o.is_zero():
            return UniPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(o.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(o.coeffs):
                out[i + j] = out[i + j] + a * b
        return UniPoly(out)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if isinstance(other, UniPoly):
            return self.coeffs == other.coeffs
        if isinstance(other, Number):
            return self.coeffs == UniPoly([other]).coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(("UniPoly", self.coeffs))

    def __repr__(self) -> str:
        return f"UniPoly({list(self.coeffs)!r})"


class LaurentPolynomial:
    """Map from exponent vectors in Z^n to nonzero coefficients."""

    __slots__ = ("_terms", "nvars")

    def __init__(self, terms: Mapping[Sequence[int], object] | Iterable[tuple[Sequence[int], object]] = (),
                 nvars: int | None = None):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Exponent, object] = {}
        for e, c in items:
            e = tuple(int(x) for x in e)
            if nvars is None:
                nvars = len(e)
            elif len(e) != nvars:
                raise ValueError(f"exponent {e} does not have {nvars} entries")
            c = _coerce(c)
            acc[e] = acc[e] + c if e in acc else c
        if nvars is None:
            raise ValueError("nvars is required for the zero polynomial")
        self.nvars = nvars
        self._terms = {e: acc[e] for e in sorted(acc) if not _is_zero(acc[e])}

    # constructors ---------------------------------------------------------

    @classmethod
    def constant(cls, c, nvars: int) -> "LaurentPolynomial":
        return cls({(0,) * nvars: c}, nvars)

    @classmethod
    def variable(cls, i: int, nvars: int) -> "LaurentPolynomial":
        e = [0] * nvars
        e[i] = 1
        return cls({tuple(e): 1}, nvars)

    @classmethod
    def monomial(cls, e: Sequence[int], c=1) -> "LaurentPolynomial":
        return cls({tuple(e): c}, len(e))

    # basic access ---------------------------------------------------------

    @property
    def terms(self) -> Mapping[Exponent, object]:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[Exponent, object]]:
        return iter(self._terms.items())

    def __len__(self) -> int:
        return len(self._terms)

    def support(self) -> tuple[Exponent, ...]:
        return tuple(self._terms)

    def coefficient(self, e: Sequence[int]):
        return self._terms.get(tuple(e), Fraction(0))

    def coefficients(self) -> list:
        return list(self._terms.values())

    def is_zero(self) -> bool:
        return not self._terms

    def is_exact(self) -> bool:
        return all(isinstance(c, (Fraction, UniPoly)) for c in self._terms.values())

    def total_degree(self) -> int:
        return max((sum(e) for e in self._terms), default=0)

    def degree(self, var: int) -> int:
        return max((e[var] for e in self._terms), default=0)

    def min_degree(self, var: int) -> int:
        return min((e[var] for e in self._terms), default=0)

    # arithmetic -----------------------------------------------------------

    def _check(self, other: "LaurentPolynomial") -> None:
        if other.nvars != self.nvars:
            raise ValueError("polynomials live in different numbers of variables")

    def __add__(self, other):
        if not isinstance(other, LaurentPolynomial):
            other = LaurentPolynomial.constant(other, self.nvars)
        self._check(other)
        return LaurentPolynomial(list(self._terms.items()) + list(other._terms.items()), self.nvars)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPolynomial({e: -c for e, c in self._terms.items()}, self.nvars)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, LaurentPolynomial):
            c = _coerce(other)
            return LaurentPolynomial({e: v * c for e, v in self._terms.items()}, self.nvars)
        self._check(other)
        out = []
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                out.append((tuple(a + b for a, b in zip(e1, e2)), c1 * c2))
        return LaurentPolynomial(out, self.nvars)

    __rmul__ = __mul__

    def shift(self, e: Sequence[int]) -> "LaurentPolynomial":
        """Multiply by the monomial ``x^e``."""
        return LaurentPolynomial({tuple(a + b for a, b in zip(k, e)): c for k, c in self._terms.items()},
                                 self.nvars)

    def map_coefficients(self, fn) -> "LaurentPolynomial":
        return LaurentPolynomial({e: fn(c) for e, c in self._terms.items()}, self.nvars)

    def specialize(self, value) -> "LaurentPolynomial":
        """Evaluate :class:`UniPoly` coefficients at ``value``."""
        return self.map_coefficients(lambda c: c(value) if isinstance(c, UniPoly) else c)

    # evaluation -----------------------------------------------------------

    def evaluate(self, point: Sequence):
        """``sum c_e point^e``; exact when both sides are rational."""
        if len(point) != self.nvars:
            raise ValueError(f"point has {len(point)} coordinates, expected {self.nvars}")
        total = 0
        for e, c in self._terms.items():
            if isinstance(c, UniPoly):
                raise TypeError("specialize hidden-variable coefficients before evaluating")
            m = 1
            for x, k in zip(point, e):
                if k < 0 and x == 0:
                    raise ZeroCoordinateError("negative exponent at a zero coordinate")
                if k:
                    m = m * x ** k
            total = total + c * m
        return total

    __call__ = evaluate

    def coeff_norm(self) -> float:
        """Largest coefficient magnitude (the infinity norm)."""
        return max((abs(complex(c)) for c in self._terms.values()), default=0.0)

    # comparison -----------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, LaurentPolynomial):
            return NotImplemented
        return self.nvars == other.nvars and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.nvars, tuple(self._terms.items())))

    def __repr__(self) -> str:
        return f"LaurentPolynomial({self._terms!r}, nvars={self.nvars})"


def default_names(n: int) -> tuple[str, ...]:
    return tuple(f"x{i + 1}" for i in range(n))


@dataclass(frozen=True)
class PolySystem:
    """A list of Laurent polynomials in a common set of variables."""

    polys: tuple[LaurentPolynomial, ...]
    names: tuple[str, ...]
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "polys", tuple(self.polys))
        object.__setattr__(self, "names", tuple(self.names))
        for f in self.polys:
            if f.nvars != len(self.names):
                raise ValueError("polynomial arity does not match the variable list")
        labels = tuple(self.labels) if self.labels else tuple(f"f{i + 1}" for i in range(len(self.polys)))
        if len(labels) != len(self.polys):
            raise ValueError("one label per polynomial is required")
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_polys(cls, polys: Sequence[LaurentPolynomial], names: Sequence[str] | None = None,
                   labels: Sequence[str] = ()) -> "PolySystem":
        n = polys[0].nvars if polys else len(names or ())
        return cls(tuple(polys), tuple(names) if names is not None else default_names(n), tuple(labels))

    @property
    def n_vars(self) -> int:
        return len(self.names)

    def __len__(self) -> int:
        return len(self.polys)

    def __iter__(self):
        return iter(self.polys)

    def __getitem__(self, i: int) -> LaurentPolynomial:
        return self.polys[i]

    def is_well_constrained(self) -> bool:
        return len(self.polys) == self.n_vars

    def is_overconstrained(self) -> bool:
        return len(self.polys) == self.n_vars + 1

    def supports(self) -> list[tuple[Exponent, ...]]:
        return [f.support() for f in self.polys]

    def evaluate(self, point: Sequence) -> list:
        return [f.evaluate(point) for f in self.polys]

    def specialize(self, value) -> "PolySystem":
        return PolySystem(tuple(f.specialize(value) for f in self.polys), self.names, self.labels)

    def bezout_bound(self) -> int:
        """Product of total degrees after clearing negative exponents."""
        out = 1
        for f in self.polys:
            lows = [min((e[j] for e in f.support()), default=0) for j in range(self.n_vars)]
            shift = [-min(0, x) for x in lows]
            out *= max((sum(a + s for a, s in zip(e, shift)) for e in f.support()), default=0)
        return out

    def var_index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown variable {name!r}") from None


@dataclass(frozen=True)
class HiddenSystem(PolySystem):
    """Polynomials in the remaining variables with coefficients in ``x_k``.

    ``shifts[i]`` is the power of the hidden variable that was multiplied
    into polynomial ``i`` to clear negative hidden exponents.
    """

    hidden_index: int = 0
    hidden_name: str = "x"
    shifts: tuple[int, ...] = ()

    def original_point(self, point: Sequence, hidden_value) -> list:
        """Insert the hidden coordinate back into a point of this system."""
        p = list(point)
        p.insert(self.hidden_index, hidden_value)
        return p

    def evaluate_at(self, point: Sequence, hidden_value) -> list:
        return [f.specialize(hidden_value).evaluate(point) for f in self.polys]


def hide_variable(sys: PolySystem, k: int) -> HiddenSystem:
    """Move variable ``k`` into the coefficient ring.

    Each polynomial is first multiplied by the smallest power of ``x_k``
    that clears its negative ``x_k`` exponents, so coefficients become
    ordinary polynomials in ``x_k``.
    """
    n = sys.n_vars
    if not 0 <= k < n:
        raise IndexError(f"variable index {k} out of range")
    polys = []
    shifts = []
    for f in sys.polys:
        s = max(0, -f.min_degree(k)) if not f.is_zero() else 0
        acc: dict[Exponent, list] = {}
        for e, c in f.items():
            rest = e[:k] + e[k + 1:]
            power = e[k] + s
            row = acc.setdefault(rest, [])
            row.append((power, c))
        terms = {}
        for rest, pcs in acc.items():
            coeffs = [Fraction(0)] * (max(p for p, _ in pcs) + 1)
            for p, c in pcs:
                coeffs[p] = coeffs[p] + c
            terms[rest] = UniPoly(coeffs)
        polys.append(LaurentPolynomial(terms, n - 1))
        shifts.append(s)
    names = sys.names[:k] + sys.names[k + 1:]
    return HiddenSystem(tuple(polys), names, sys.labels, hidden_index=k, hidden_name=sys.names[k],
                        shifts=tuple(shifts))


@dataclass(frozen=True)
class UAugmentedSystem(PolySystem):
    """``f_0 = u + sum c_j x_j`` followed by the input polynomials.

    All coefficients are :class:`UniPoly` in ``u``; ``f_0`` is polynomial 0.
    """

    c: tuple[Fraction, ...] = ()
    S: int = 0
    hidden_name: str = "u"

    def failure_bound(self, m: int) -> Fraction:
        """Probability bound ``m (m - 1) / (2 S)`` for ``m`` roots."""
        return Fraction(m * (m - 1), 2 * self.S)

    @property
    def base(self) -> PolySystem:
        polys = tuple(f.specialize(0) for f in self.polys[1:])
        return PolySystem(polys, self.names, self.labels[1:])


def add_u_polynomial(sys: PolySystem, seed: int = 0, S: int = 2 ** 10,
                     coeffs: Sequence | None = None) -> UAugmentedSystem:
    """Prepend ``f_0 = u + c_1 x_1 + ... + c_n x_n`` to a square system.

    The ``c_j`` are drawn uniformly from ``{1, ..., S}`` with a seeded
    generator unless ``coeffs`` fixes them.
    """
    n = sys.n_vars
    if not sys.is_well_constrained():
        raise ValueError("the u-polynomial is added to a well-constrained system")
    if S <= 1:
        raise ValueError("S must exceed 1")
    if coeffs is None:
        rng = np.random.default_rng(seed)
        cs = tuple(Fraction(int(x)) for x in rng.integers(1, S + 1, size=n))
    else:
        cs = tuple(Fraction(x) for x in coeffs)
        if len(cs) != n:
            raise ValueError("need one u-polynomial coefficient per variable")
    terms = {(0,) * n: UniPoly.var()}
    for j, c in enumerate(cs):
        e = [0] * n
        e[j] = 1
        terms[tuple(e)] = UniPoly.const(c)
    f0 = LaurentPolynomial(terms, n)
    rest = [f.map_coefficients(UniPoly.const) for f in sys.polys]
    return UAugmentedSystem((f0, *rest), sys.names, ("f0",) + sys.labels, c=cs, S=S)
