"""Restricted products over a projective plane and the wreath group G^⊕.

A configuration equals the basepoint x0 off a finite support; a wreath element
(g, h) carries a cofactor g that is the identity of G0 off a finite support
and a projective part h.  Nothing here enumerates the plane.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Optional, Sequence

from .projgeo import ProjMap, ProjPoint, coerce_literal, enumerate_points, format_point
from .scalar import FFElem, FiniteField, QQ, QuadExt, QuadraticField

__all__ = [
    "Perm", "BasedSpace", "Ambient", "Config", "WreathElement",
    "act", "multiply", "invert", "projection_to_H", "point_stabilizer_projection",
    "extend_config", "extend_element",
]


# ---------------------------------------------------------------------------
# permutations of X0
# ---------------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class Perm:
    """Permutation of {0..n-1}; ``images[i]`` is the image of i."""

    images: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.images) != list(range(len(self.images))):
            raise ValueError(f"not a bijection: {self.images}")

    @staticmethod
    def identity(n: int) -> "Perm":
        return Perm(tuple(range(n)))

    def __call__(self, i: int) -> int:
        return self.images[i]

    def __mul__(self, other: "Perm") -> "Perm":
        """Composition: (self * other)(i) = self(other(i))."""
        return Perm(tuple(self.images[j] for j in other.images))

    def inverse(self) -> "Perm":
        inv = [0] * len(self.images)
        for i, j in enumerate(self.images):
            inv[j] = i
        return Perm(tuple(inv))

    def __pow__(self, k: int) -> "Perm":
        base = self if k >= 0 else self.inverse()
        out = Perm.identity(len(self.images))
        for _ in range(abs(k)):
            out = out * base
        return out

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.images))

    def fixed_points(self) -> list[int]:
        return [i for i, j in enumerate(self.images) if i == j]

    def cycles(self) -> list[tuple[int, ...]]:
        seen, out = set(), []
        for i in range(len(self.images)):
            if i in seen or self.images[i] == i:
                continue
            cyc, j = [], i
            while j not in seen:
                seen.add(j)
                cyc.append(j)
                j = self.images[j]
            out.append(tuple(cyc))
        return out


# ---------------------------------------------------------------------------
# based space (X0, x0) with G0
# ---------------------------------------------------------------------------

CLOSURE_CAP = 20000


class ClosureCapExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class BasedSpace:
    elements: tuple[str, ...]
    basepoint: str
    generators: tuple[Perm, ...] = ()

    def __post_init__(self):
        if len(set(self.elements)) != len(self.elements):
            raise ValueError("duplicate elements in X0")
        if self.basepoint not in self.elements:
            raise ValueError(f"basepoint {self.basepoint!r} not in X0")
        for g in self.generators:
            if len(g.images) != len(self.elements):
                raise ValueError("generator has the wrong degree")

    @property
    def size(self) -> int:
        return len(self.elements)

    @property
    def x0(self) -> int:
        return self.elements.index(self.basepoint)

    def index(self, label: str) -> int:
        try:
            return self.elements.index(label)
        except ValueError:
            raise ValueError(f"{label!r} is not an element of X0") from None

    def label(self, i: int) -> str:
        return self.elements[i]

    def identity(self) -> Perm:
        return Perm.identity(self.size)

    @cached_property
    def group(self) -> frozenset:
        """G0 as a set of permutations, by closure under the generators."""
        ident = self.identity()
        seen = {ident}
        frontier = [ident]
        while frontier:
            nxt = []
            for g in frontier:
                for s in self.generators:
                    h = s * g
                    if h not in seen:
                        seen.add(h)
                        nxt.append(h)
                        if len(seen) > CLOSURE_CAP:
                            raise ClosureCapExceeded("G0 exceeds the closure cap")
            frontier = nxt
        return frozenset(seen)

    @cached_property
    def stabilizer(self) -> frozenset:
        x0 = self.x0
        return frozenset(g for g in self.group if g(x0) == x0)

    def contains(self, g: Perm) -> bool:
        return g in self.group

    def is_decent(self) -> bool:
        """For finite X0 every subgroup has finite orbits, so decency
        amounts to G0 having a global fixed point."""
        return self.global_fixed_points() != []

    def global_fixed_points(self) -> list[int]:
        return [i for i in range(self.size) if all(g(i) == i for g in self.generators)]

    # cycle notation ---------------------------------------------------------

    def parse_perm(self, text: str) -> Perm:
        text = text.strip()
        images = list(range(self.size))
        if text in ("()", "id", "1"):
            return Perm(tuple(images))
        if not re.fullmatch(r"(\([^()]+\))+", text):
            raise ValueError(f"bad cycle notation {text!r}")
        seen = set()
        for body in re.findall(r"\(([^()]+)\)", text):
            labels = body.split()
            idx = [self.index(s) for s in labels]
            if seen & set(idx) or len(set(idx)) != len(idx):
                raise ValueError(f"cycles in {text!r} are not disjoint")
            seen |= set(idx)
            for a, b in zip(idx, idx[1:] + idx[:1]):
                images[a] = b
        return Perm(tuple(images))

    def format_perm(self, g: Perm) -> str:
        cyc = g.cycles()
        if not cyc:
            return "()"
        return "".join("(" + " ".join(self.elements[i] for i in c) + ")" for c in cyc)


# ---------------------------------------------------------------------------
# ambient plane descriptor
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Ambient:
    """The plane P^2(K): ``gf`` (finite field of order q), ``rational`` or
    ``quadratic`` (Q(sqrt d))."""

    kind: str
    q: int = 0
    d: int = 0

    def __post_init__(self):
        if self.kind not in ("gf", "rational", "quadratic"):
            raise ValueError(f"unknown ambient {self.kind!r}")

    @staticmethod
    def gf(q: int) -> "Ambient":
        from .scalar import _prime_power
        _prime_power(q)
        return Ambient("gf", q=q)

    @staticmethod
    def rational() -> "Ambient":
        return Ambient("rational")

    @staticmethod
    def quadratic(d: int) -> "Ambient":
        QuadraticField(d)
        return Ambient("quadratic", d=d)

    @cached_property
    def field(self):
        if self.kind == "gf":
            from .scalar import _prime_power
            p, k = _prime_power(self.q)
            return FiniteField(p, k)
        if self.kind == "quadratic":
            return QuadraticField(self.d)
        return QQ

    @property
    def is_finite(self) -> bool:
        return self.kind == "gf"

    def points(self) -> list[ProjPoint]:
        if not self.is_finite:
            raise ValueError("the plane over an infinite field cannot be enumerated")
        return enumerate_points(self.field)

    def embeds_in(self, other: "Ambient") -> bool:
        if self == other:
            return True
        if self.kind == "gf" and other.kind == "gf":
            p1, k1 = self.field.p, self.field.k
            p2, k2 = other.field.p, other.field.k
            # prime field into any extension (element encoding agrees there)
            return p1 == p2 and k1 == 1
        return self.kind == "rational" and other.kind == "quadratic"

    def coerce_scalar(self, x):
        return coerce_literal(x, self.field)

    def coerce_point(self, p: ProjPoint) -> ProjPoint:
        return ProjPoint([self.coerce_scalar(c) for c in p.coords])

    def coerce_map(self, m: ProjMap) -> ProjMap:
        return ProjMap([[self.coerce_scalar(x) for x in row] for row in m.matrix])

    def __str__(self):
        if self.kind == "gf":
            return f"gf {self.q}"
        if self.kind == "quadratic":
            return f"quadratic {self.d}"
        return "rational"


# ---------------------------------------------------------------------------
# configurations
# ---------------------------------------------------------------------------

class Config:
    """Element of the restricted product: x0 off the (tight) support."""

    __slots__ = ("space", "ambient", "_map", "_items", "_hash")

    def __init__(self, space: BasedSpace, ambient: Ambient,
                 values: Mapping[ProjPoint, int] | Iterable = ()):
        x0 = space.x0
        items = values.items() if isinstance(values, Mapping) else values
        m = {}
        for p, v in items:
            if not 0 <= v < space.size:
                raise ValueError(f"value {v} outside X0")
            if v != x0:
                m[p] = v
        self.space = space
        self.ambient = ambient
        self._map = m
        self._items = tuple(sorted(m.items(), key=lambda kv: kv[0].sort_key()))
        self._hash = hash(self._items)

    @classmethod
    def basepoint(cls, space: BasedSpace, ambient: Ambient) -> "Config":
        return cls(space, ambient, {})

    def __getitem__(self, p: ProjPoint) -> int:
        return self._map.get(p, self.space.x0)

    value = __getitem__

    @property
    def support(self) -> frozenset:
        return frozenset(self._map)

    def items(self) -> tuple:
        return self._items

    def with_values(self, updates: Mapping[ProjPoint, int]) -> "Config":
        m = dict(self._map)
        m.update(updates)
        return Config(self.space, self.ambient, m)

    def __eq__(self, other):
        return isinstance(other, Config) and self._items == other._items \
            and self.space == other.space and self.ambient == other.ambient

    def __hash__(self):
        return self._hash

    def __repr__(self):
        body = ", ".join(f"{format_point(p)}->{self.space.label(v)}" for p, v in self._items)
        return f"Config({{{body}}})"


# ---------------------------------------------------------------------------
# wreath elements
# ---------------------------------------------------------------------------

class WreathElement:
    """(g, h) in G^⊕ with g the identity of G0 off a finite support."""

    __slots__ = ("space", "ambient", "h", "_cof", "_items", "_hash", "__dict__")

    def __init__(self, space: BasedSpace, ambient: Ambient, h: ProjMap,
                 cofactor: Mapping[ProjPoint, Perm] | Iterable = (), check: bool = True):
        items = cofactor.items() if isinstance(cofactor, Mapping) else cofactor
        cof = {}
        for p, g in items:
            if check and not space.contains(g):
                raise ValueError(f"cofactor {space.format_perm(g)} is not in G0")
            if not g.is_identity():
                cof[p] = g
        self.space = space
        self.ambient = ambient
        self.h = h
        self._cof = cof
        self._items = tuple(sorted(cof.items(), key=lambda kv: kv[0].sort_key()))
        self._hash = hash((self._items, h))

    @classmethod
    def identity(cls, space: BasedSpace, ambient: Ambient) -> "WreathElement":
        one = ambient.field.one() if ambient.is_finite else 1
        return cls(space, ambient, ProjMap.identity(3, ambient.coerce_scalar(one)), {})

    @classmethod
    def pure(cls, space: BasedSpace, ambient: Ambient, h: ProjMap) -> "WreathElement":
        return cls(space, ambient, h, {})

    def g(self, p: ProjPoint) -> Perm:
        return self._cof.get(p) or self.space.identity()

    cofactor = g

    @property
    def support(self) -> frozenset:
        return frozenset(self._cof)

    def items(self) -> tuple:
        return self._items

    def __mul__(self, other: "WreathElement") -> "WreathElement":
        return multiply(self, other)

    def __pow__(self, n: int) -> "WreathElement":
        base = self if n >= 0 else invert(self)
        out = WreathElement.identity(self.space, self.ambient)
        k = abs(n)
        while k:
            if k & 1:
                out = multiply(out, base)
            k >>= 1
            if k:
                base = multiply(base, base)
        return out

    def inverse(self) -> "WreathElement":
        return invert(self)

    def __call__(self, x: Config) -> Config:
        return act(self, x)

    def is_identity(self) -> bool:
        return not self._cof and self.h.is_identity()

    def __eq__(self, other):
        return isinstance(other, WreathElement) and self._items == other._items \
            and self.h == other.h

    def __hash__(self):
        return self._hash

    def __repr__(self):
        body = ", ".join(f"{format_point(p)}->{self.space.format_perm(g)}" for p, g in self._items)
        return f"WreathElement({{{body}}}, {self.h!r})"


def act(w: WreathElement, x: Config) -> Config:
    """(g h x)_p = g_p . x_{h^-1 p}."""
    h = w.h
    hinv = h.inverse()
    candidates = set(w.support) | {h(q) for q in x.support}
    out = {}
    for p in candidates:
        out[p] = w.g(p)(x[hinv(p)])
    return Config(x.space, x.ambient, out)


def multiply(w1: WreathElement, w2: WreathElement) -> WreathElement:
    """(g, h)(g', h') = (p -> g_p g'_{h^-1 p}, h h')."""
    h = w1.h
    hinv = h.inverse()
    candidates = set(w1.support) | {h(q) for q in w2.support}
    cof = {p: w1.g(p) * w2.g(hinv(p)) for p in candidates}
    return WreathElement(w1.space, w1.ambient, h @ w2.h, cof, check=False)


def invert(w: WreathElement) -> WreathElement:
    """(g, h)^-1 = (p -> g_{h p}^-1, h^-1); support is h^-1(supp g)."""
    hinv = w.h.inverse()
    cof = {hinv(p): g.inverse() for p, g in w.items()}
    return WreathElement(w.space, w.ambient, hinv, cof, check=False)


def projection_to_H(w: WreathElement) -> ProjMap:
    return w.h


def point_stabilizer_projection(ws: Sequence[WreathElement], p: ProjPoint) -> list[Perm]:
    """Stab(p) -> G0, (g, h) -> g_p."""
    out = []
    for w in ws:
        if w.h(p) != p:
            raise ValueError(f"{w!r} does not fix {format_point(p)}")
        out.append(w.g(p))
    return out


def extend_config(x: Config, larger: Ambient) -> Config:
    """Same support, basepoint on the new points."""
    if not x.ambient.embeds_in(larger):
        raise ValueError(f"{x.ambient} does not embed in {larger}")
    return Config(x.space, larger, {larger.coerce_point(p): v for p, v in x.items()})


def extend_element(w: WreathElement, larger: Ambient) -> WreathElement:
    """Identity cofactor on the new points."""
    if not w.ambient.embeds_in(larger):
        raise ValueError(f"{w.ambient} does not embed in {larger}")
    return WreathElement(w.space, larger, larger.coerce_map(w.h),
                         {larger.coerce_point(p): g for p, g in w.items()}, check=False)
