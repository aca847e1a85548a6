"""Text format for polynomial systems.

One polynomial per line::

    # comment
    vars: t1, t2, t3
    f1: -9 - t2^2 - t3^2 + 3*t2^2*t3^2 + 8*t2*t3

A term is a product of numbers and powers joined by ``*``; numbers may be
integers, decimals or rationals ``p/q``; exponents may be negative.  The
``vars:`` line is optional.  Without it the variables are ``x1..xn`` (``n``
the largest index used) when every name has that form, and otherwise the
names in order of first appearance.
"""
from __future__ import annotations

import re
from fractions import Fraction

from .poly import LaurentPolynomial, PolySystem


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.line, self.col = line, col
        where = f"line {line}, column {col}: " if line else ""
        super().__init__(where + message)


class DimensionError(ParseError):
    """A monomial refers to a variable outside the declared set."""


_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<pow>\*\*|\^)
  | (?P<op>[*/+-])
""", re.VERBOSE)

_XVAR = re.compile(r"x(\d+)$")


def _tokens(text: str, lineno: int, offset: int):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", lineno, offset + pos + 1)
        kind = m.lastgroup
        if kind != "ws":
            out.append((kind, m.group(), offset + pos + 1))
        pos = m.end()
    return out


def _parse_terms(toks, lineno: int):
    """Return a list of (coefficient, [(name, exp, col)]) terms."""
    terms = []
    i = 0
    n = len(toks)
    if n == 0:
        raise ParseError("empty polynomial", lineno, 1)
    while i < n:
        sign = 1
        start = i
        while i < n and toks[i][0] == "op" and toks[i][1] in "+-":
            if toks[i][1] == "-":
                sign = -sign
            i += 1
        if i == start and terms:
            raise ParseError("expected '+' or '-' between terms", lineno, toks[i][2])
        coeff = Fraction(sign)
        powers = []
        expect_factor = True
        while i < n:
            kind, val, col = toks[i]
            if not expect_factor:
                if kind == "op" and val == "*":
                    expect_factor = True
                    i += 1
                    continue
                break
            if kind == "num":
                num = Fraction(val)
                i += 1
                if i < n and toks[i][0] == "op" and toks[i][1] == "/":
                    if i + 1 >= n or toks[i + 1][0] != "num":
                        raise ParseError("expected a denominator", lineno, toks[i][2])
                    den = Fraction(toks[i + 1][1])
                    if den == 0:
                        raise ParseError("zero denominator", lineno, toks[i + 1][2])
                    num /= den
                    i += 2
                coeff *= num
            elif kind == "name":
                i += 1
                exp = 1
                if i < n and toks[i][0] == "pow":
                    i += 1
                    esign = 1
                    while i < n and toks[i][0] == "op" and toks[i][1] in "+-":
                        if toks[i][1] == "-":
                            esign = -esign
                        i += 1
                    if i >= n or toks[i][0] != "num" or not toks[i][1].isdigit():
                        col2 = toks[i][2] if i < n else col
                        raise ParseError("exponent must be an integer", lineno, col2)
                    exp = esign * int(toks[i][1])
                    i += 1
                powers.append((val, exp, col))
            else:
                raise ParseError(f"unexpected {val!r}", lineno, col)
            expect_factor = False
        if expect_factor:
            col = toks[i][2] if i < n else (toks[-1][2] + len(toks[-1][1]))
            raise ParseError("incomplete term", lineno, col)
        terms.append((coeff, powers))
    return terms


def parse_system(text: str, names: list[str] | None = None) -> PolySystem:
    """Parse the text format into a :class:`PolySystem`."""
    declared = list(names) if names else None
    raw = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0]
        if not body.strip():
            continue
        if ":" not in body:
            raise ParseError("expected 'name: polynomial'", lineno, 1)
        label, expr = body.split(":", 1)
        label = label.strip()
        offset = len(body) - len(expr)
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", label):
            raise ParseError(f"bad polynomial name {label!r}", lineno, 1)
        if label == "vars":
            vs = [v.strip() for v in expr.split(",") if v.strip()]
            for v in vs:
                if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", v):
                    raise ParseError(f"bad variable name {v!r}", lineno, offset + 1)
            if len(set(vs)) != len(vs):
                raise ParseError("repeated variable name", lineno, offset + 1)
            declared = vs
            continue
        raw.append((lineno, label, _parse_terms(_tokens(expr, lineno, offset), lineno)))
    if not raw:
        raise ParseError("no polynomials in input")

    if declared is None:
        seen: list[str] = []
        for _, _, terms in raw:
            for _, powers in terms:
                for name, _, _ in powers:
                    if name not in seen:
                        seen.append(name)
        if seen and all(_XVAR.match(v) and int(_XVAR.match(v).group(1)) >= 1 for v in seen):
            top = max(int(_XVAR.match(v).group(1)) for v in seen)
            declared = [f"x{i}" for i in range(1, top + 1)]
        else:
            declared = seen
    index = {v: i for i, v in enumerate(declared)}
    n = len(declared)

    polys = []
    labels = []
    for lineno, label, terms in raw:
        items = []
        for coeff, powers in terms:
            e = [0] * n
            for name, exp, col in powers:
                if name not in index:
                    raise DimensionError(f"variable {name!r} is not among {declared}", lineno, col)
                e[index[name]] += exp
            items.append((tuple(e), coeff))
        polys.append(LaurentPolynomial(items, n))
        labels.append(label)
    if len(set(labels)) != len(labels):
        raise ParseError("repeated polynomial name")
    return PolySystem(tuple(polys), tuple(declared), tuple(labels))


def format_coefficient(c) -> str:
    if isinstance(c, Fraction):
        return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
    if isinstance(c, float):
        return repr(c)
    raise TypeError(f"cannot write coefficient {c!r} in the text format")


def format_polynomial(f: LaurentPolynomial, names) -> str:
    if f.is_zero():
        return "0"
    parts = []
    for e, c in f.items():
        neg = c < 0
        mag = -c if neg else c
        mono = []
        for name, k in zip(names, e):
            if k == 1:
                mono.append(name)
            elif k:
                mono.append(f"{name}^{k}")
        cs = format_coefficient(mag)
        body = "*".join(([] if (cs == "1" and mono) else [cs]) + mono)
        parts.append(("- " if neg else "+ ") + body)
    text = " ".join(parts)
    return text[2:] if text.startswith("+ ") else "-" + text[2:]


def serialize_system(sys: PolySystem) -> str:
    lines = ["vars: " + ", ".join(sys.names)]
    for label, f in zip(sys.labels, sys.polys):
        lines.append(f"{label}: {format_polynomial(f, sys.names)}")
    return "\n".join(lines) + "\n"


def read_system(path) -> PolySystem:
    with open(path, encoding="utf-8") as fh:
        return parse_system(fh.read())
