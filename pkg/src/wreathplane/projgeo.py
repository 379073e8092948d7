"""Projective plane P^2(K) (and P^1(K)), lines, PGL maps and the chordal metric."""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from . import linalg
from .scalar import (
    CertifiedReal, FFElem, FiniteField, Place, QuadExt, abs_value, format_scalar,
    parse_scalar, scalar_key,
)

__all__ = [
    "ProjPoint", "ProjLine", "ProjMap", "ChordalContext", "DegenerateInput",
    "apply", "chordal_distance", "distance_to_line", "span_line",
    "line_point_incidence", "intersect_lines", "enumerate_points",
    "lines_through", "points_on_line", "parse_point", "parse_line",
    "parse_matrix", "format_point", "format_line", "format_matrix",
]


class DegenerateInput(ValueError):
    """Equal points passed to span, equal lines passed to intersect, etc."""


def _lift(x):
    if isinstance(x, int):
        return Fraction(x)
    return x


def canonical(coords: Sequence) -> tuple:
    """Scale so that the first nonzero coordinate equals 1."""
    coords = tuple(_lift(c) for c in coords)
    for c in coords:
        if c != 0:
            if c == 1:
                return coords
            inv = 1 / c
            return tuple(x * inv for x in coords)
    raise DegenerateInput("the zero vector has no projective class")


class ProjPoint:
    """A point [v] of P^n, n in {1, 2}, stored in canonical form."""

    __slots__ = ("coords", "_hash")

    def __init__(self, coords: Sequence):
        self.coords = canonical(coords)
        self._hash = hash(("pt", self.coords))

    @property
    def dim(self) -> int:
        return len(self.coords) - 1

    def __eq__(self, other):
        return isinstance(other, ProjPoint) and self.coords == other.coords

    def __hash__(self):
        return self._hash

    def __lt__(self, other: "ProjPoint"):
        return self.sort_key() < other.sort_key()

    def sort_key(self) -> tuple:
        return tuple(scalar_key(c) for c in self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __repr__(self):
        return format_point(self)


class ProjLine:
    """The line {x : n . x = 0} of P^2, dual vector canonicalized."""

    __slots__ = ("dual", "_hash")

    def __init__(self, dual: Sequence):
        if len(dual) != 3:
            raise ValueError("lines live in P^2")
        self.dual = canonical(dual)
        self._hash = hash(("line", self.dual))

    def __eq__(self, other):
        return isinstance(other, ProjLine) and self.dual == other.dual

    def __hash__(self):
        return self._hash

    def __lt__(self, other: "ProjLine"):
        return self.sort_key() < other.sort_key()

    def sort_key(self) -> tuple:
        return tuple(scalar_key(c) for c in self.dual)

    def contains(self, x: ProjPoint) -> bool:
        return linalg.dot(self.dual, x.coords) == 0

    def __repr__(self):
        return format_line(self)


class ProjMap:
    """Element of PGL_{n+1}: an invertible matrix up to scalars, normalized so
    the first nonzero entry in row-major order is 1."""

    __slots__ = ("matrix", "_hash", "__dict__")

    def __init__(self, matrix: Sequence[Sequence]):
        rows = tuple(tuple(_lift(x) for x in row) for row in matrix)
        n = len(rows)
        if n not in (2, 3) or any(len(r) != n for r in rows):
            raise ValueError("ProjMap needs a 2x2 or 3x3 matrix")
        flat = canonical([x for r in rows for x in r])
        self.matrix = tuple(flat[i * n:(i + 1) * n] for i in range(n))
        if linalg.det(self.matrix) == 0:
            raise ValueError("matrix is singular")
        self._hash = hash(("map", self.matrix))

    @classmethod
    def identity(cls, n: int = 3, one=Fraction(1)) -> "ProjMap":
        return cls(linalg.identity(n, one))

    @classmethod
    def diag(cls, *entries) -> "ProjMap":
        entries = [_lift(e) for e in entries]
        zero = entries[0] * 0
        n = len(entries)
        return cls([[entries[i] if i == j else zero for j in range(n)] for i in range(n)])

    @property
    def n(self) -> int:
        return len(self.matrix)

    @cached_property
    def det(self):
        return linalg.det(self.matrix)

    @cached_property
    def inverse_map(self) -> "ProjMap":
        return ProjMap(linalg.adjugate(self.matrix))

    def inverse(self) -> "ProjMap":
        return self.inverse_map

    def __matmul__(self, other: "ProjMap") -> "ProjMap":
        return ProjMap(linalg.matmul(self.matrix, other.matrix))

    def __pow__(self, k: int) -> "ProjMap":
        if k < 0:
            return ProjMap(linalg.power(linalg.adjugate(self.matrix), -k))
        return ProjMap(linalg.power(self.matrix, k))

    def __call__(self, x: ProjPoint) -> ProjPoint:
        return ProjPoint(linalg.matvec(self.matrix, x.coords))

    def apply_line(self, l: ProjLine) -> ProjLine:
        """Image of a line: n -> n . M^{-1} (adjugate suffices projectively)."""
        adj = linalg.adjugate(self.matrix)
        return ProjLine(linalg.matvec(linalg.transpose(adj), l.dual))

    def is_identity(self) -> bool:
        return linalg.is_scalar_matrix(self.matrix)

    def __eq__(self, other):
        return isinstance(other, ProjMap) and self.matrix == other.matrix

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"ProjMap({format_matrix(self)})"


def apply(m: ProjMap, x: ProjPoint) -> ProjPoint:
    if m.n != len(x.coords):
        raise ValueError("dimension mismatch")
    return m(x)


# ---------------------------------------------------------------------------
# chordal metric
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChordalContext:
    place: Place

    @property
    def norm_kind(self) -> str:
        return "l2" if self.place.archimedean else "linf"


def _sq_norm(v):
    acc = v[0] * v[0]
    for x in v[1:]:
        acc = acc + x * x
    return acc


def _max_abs(v, place: Place) -> Fraction:
    return max(abs_value(x, place) for x in v)


def _wedge_minors(v, w):
    n = len(v)
    return [v[i] * w[j] - v[j] * w[i] for i in range(n) for j in range(i + 1, n)]


def chordal_distance(x: ProjPoint, y: ProjPoint, ctx: ChordalContext):
    """|v ^ w| / (|v| |w|): CertifiedReal at real places, Fraction at p-adic."""
    v, w = x.coords, y.coords
    place = ctx.place
    if place.archimedean:
        nv, nw = _sq_norm(v), _sq_norm(w)
        ip = linalg.dot(v, w)
        prod = nv * nw
        return CertifiedReal((prod - ip * ip) / prod, place.sign)
    num = max(abs_value(m, place) for m in _wedge_minors(v, w))
    return num / (_max_abs(v, place) * _max_abs(w, place))


def distance_to_line(x: ProjPoint, l: ProjLine, ctx: ChordalContext):
    """|v . n| / (|v| |n|) with n the dual vector of ``l``."""
    v, n = x.coords, l.dual
    pairing = linalg.dot(v, n)
    place = ctx.place
    if place.archimedean:
        return CertifiedReal(pairing * pairing / (_sq_norm(v) * _sq_norm(n)), place.sign)
    return abs_value(pairing, place) / (_max_abs(v, place) * _max_abs(n, place))


# ---------------------------------------------------------------------------
# incidence
# ---------------------------------------------------------------------------

def span_line(x: ProjPoint, y: ProjPoint) -> ProjLine:
    if x == y:
        raise DegenerateInput("span of a point with itself")
    return ProjLine(linalg.cross(x.coords, y.coords))


def line_point_incidence(l: ProjLine, x: ProjPoint) -> bool:
    return l.contains(x)


def intersect_lines(l1: ProjLine, l2: ProjLine) -> ProjPoint:
    if l1 == l2:
        raise DegenerateInput("intersection of a line with itself")
    return ProjPoint(linalg.cross(l1.dual, l2.dual))


def enumerate_points(field: FiniteField, dim: int = 2) -> list[ProjPoint]:
    """All points of P^dim(GF(q)), each once, sorted canonically."""
    if not isinstance(field, FiniteField):
        raise ValueError("enumeration needs a finite field")
    elems = field.elements()
    zero, one = field.zero(), field.one()
    pts = []
    for lead in range(dim + 1):
        for tail in itertools.product(elems, repeat=dim - lead):
            pts.append(ProjPoint((zero,) * lead + (one,) + tail))
    return sorted(pts)


def lines_through(u: ProjPoint, field: FiniteField) -> list[ProjLine]:
    if not isinstance(field, FiniteField):
        raise ValueError("enumeration needs a finite field")
    return sorted(ProjLine(n.coords) for n in enumerate_points(field)
                  if linalg.dot(n.coords, u.coords) == 0)


def points_on_line(l: ProjLine, field: FiniteField) -> list[ProjPoint]:
    return [p for p in enumerate_points(field) if l.contains(p)]


# ---------------------------------------------------------------------------
# literals
# ---------------------------------------------------------------------------

def coerce_literal(v, field):
    """Coerce a parsed literal; bare integers name GF(p^k) elements by encoding."""
    if isinstance(field, FiniteField) and field.k > 1 and isinstance(v, Fraction) \
            and v.denominator == 1 and 0 <= v.numerator < field.order:
        return field(v.numerator)
    return field.coerce(v)


def _coerce_all(values, field):
    if field is None:
        return [_lift(v) for v in values]
    return [coerce_literal(v, field) for v in values]


def _parse_seq(body: str, sep: str, field) -> list:
    parts = [p for p in body.split(sep)]
    if any(not p.strip() for p in parts):
        raise ValueError(f"empty entry in {body!r}")
    return _coerce_all([parse_scalar(p) for p in parts], field)


def parse_point(text: str, field=None) -> ProjPoint:
    m = re.fullmatch(r"\s*\[([^\[\]]*)\]\s*", text)
    if not m:
        raise ValueError(f"bad point literal {text!r}")
    coords = _parse_seq(m.group(1), ":", field)
    if len(coords) not in (2, 3):
        raise ValueError(f"point literal needs 2 or 3 coordinates: {text!r}")
    return ProjPoint(coords)


def parse_line(text: str, field=None) -> ProjLine:
    m = re.fullmatch(r"\s*line\[([^\[\]]*)\]\s*", text)
    if not m:
        raise ValueError(f"bad line literal {text!r}")
    coords = _parse_seq(m.group(1), ":", field)
    if len(coords) != 3:
        raise ValueError(f"line literal needs 3 coordinates: {text!r}")
    return ProjLine(coords)


def parse_matrix(text: str, field=None) -> ProjMap:
    s = text.strip()
    m = re.fullmatch(r"\[\s*(\[[^\[\]]*\](?:\s*,\s*\[[^\[\]]*\])*)\s*\]", s)
    if not m:
        raise ValueError(f"bad matrix literal {text!r}")
    rows = re.findall(r"\[([^\[\]]*)\]", m.group(1))
    matrix = [_parse_seq(r, ",", field) for r in rows]
    if len(matrix) not in (2, 3) or any(len(r) != len(matrix) for r in matrix):
        raise ValueError(f"matrix literal must be square of size 2 or 3: {text!r}")
    return ProjMap(matrix)


def _fmt(x, bare_ff: bool) -> str:
    if bare_ff and isinstance(x, FFElem):
        return str(x.value)
    return format_scalar(x)


def format_point(x: ProjPoint, bare_ff: bool = False) -> str:
    return "[" + ":".join(_fmt(c, bare_ff) for c in x.coords) + "]"


def format_line(l: ProjLine, bare_ff: bool = False) -> str:
    return "line[" + ":".join(_fmt(c, bare_ff) for c in l.dual) + "]"


def format_matrix(m, bare_ff: bool = False) -> str:
    rows = m.matrix if isinstance(m, ProjMap) else m
    return "[" + ",".join("[" + ",".join(_fmt(x, bare_ff) for x in r) + "]" for r in rows) + "]"


def coordinate_field(points: Iterable[ProjPoint]):
    from .scalar import field_of
    return field_of(c for p in points for c in p.coords)


def has_irrational(values) -> bool:
    return any(isinstance(v, QuadExt) for v in values)
