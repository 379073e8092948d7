"""Line fibration of P^2 minus a fixed point u over a finite field.

Each line l through u gets the basis (u, b_l), giving B_l : l -> P^1 with
B_l(u) = e0 = [1:0].  A point x != u goes to iota(x) = (l, B_l(x)), a
configuration to the family of its restrictions, and a wreath element
(g, h) fixing u to ((g_l, h_l)_l, h) with h_l = B_l f_l B_{h^-1(l)}^-1.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import linalg
from .finite import FiniteGen, solve_fixed_point
from .projgeo import (
    ProjLine, ProjMap, ProjPoint, enumerate_points, format_point, lines_through, span_line,
)
from .resprod import Config, Perm, WreathElement, act, multiply


class FibrationError(ValueError):
    pass


@dataclass(frozen=True)
class FibredElement:
    """psi(gamma): line map h on L, per-line P^1 maps h_l and cofactors
    indexed by (l, r) with r in P^1 minus e0."""

    h: ProjMap
    line_maps: dict  # ProjLine -> ProjMap (2x2)
    cofactor: dict   # (ProjLine, ProjPoint) -> Perm, identity omitted

    def g(self, l, r, identity: Perm) -> Perm:
        return self.cofactor.get((l, r), identity)

    def same_as(self, other: "FibredElement") -> bool:
        return self.h == other.h and self.line_maps == other.line_maps \
            and self.cofactor == other.cofactor


@dataclass
class Fibration:
    u: ProjPoint
    lines: list           # L, canonical order
    base: dict            # l -> b_l
    iota: dict            # x -> (l, r)
    iota_inv: dict        # (l, r) -> x
    e0: ProjPoint
    identity: Perm
    space: object
    ambient: object
    psi_images: dict = field(default_factory=dict)  # generator name -> FibredElement

    # -- coordinates on a line ------------------------------------------------

    def line_of(self, x: ProjPoint) -> ProjLine:
        return span_line(self.u, x)

    def B(self, l: ProjLine, x: ProjPoint) -> ProjPoint:
        """Coordinates of x in the basis (u, b_l)."""
        return ProjPoint(_solve2(self.u.coords, self.base[l].coords, x.coords))

    def line_map(self, w: WreathElement, l: ProjLine) -> ProjMap:
        """h_l = B_l f_l B_{h^-1(l)}^-1 as a 2x2 matrix in the bases."""
        m = w.h.matrix
        src = w.h.inverse().apply_line(l)
        cols = []
        for v in (self.u.coords, self.base[src].coords):
            cols.append(_solve2(self.u.coords, self.base[l].coords, linalg.matvec(m, v)))
        return ProjMap(linalg.transpose(tuple(cols)))

    # -- phi and psi ------------------------------------------------------------

    def phi(self, x: Config) -> dict:
        """Fibred configuration (only non-basepoint entries) of x on P \\ u."""
        return {self.iota[p]: v for p, v in x.items() if p != self.u}

    def phi_inv(self, y: dict, z_u: Optional[int] = None) -> Config:
        vals = {self.iota_inv[k]: v for k, v in y.items()}
        if z_u is not None:
            vals[self.u] = z_u
        return Config(self.space, self.ambient, vals)

    def psi(self, w: WreathElement) -> FibredElement:
        if w.h(self.u) != self.u:
            raise FibrationError(f"projective part does not fix {format_point(self.u)}")
        lm = {l: self.line_map(w, l) for l in self.lines}
        cof = {self.iota[p]: g for p, g in w.items() if p != self.u}
        return FibredElement(w.h, lm, cof)

    # -- fibred group law and action -------------------------------------------

    def act_fibred(self, e: FibredElement, y: dict) -> dict:
        """((psi gamma) y)_{l, r} = g_{l, r} . y_{h^-1 l, h_l^-1 r}."""
        x0 = self.space.x0
        hinv = e.h.inverse()
        out = {}
        for l in self.lines:
            src = hinv.apply_line(l)
            hl_inv = e.line_maps[l].inverse()
            for r in self._fibre_points:
                val = e.g(l, r, self.identity)(y.get((src, hl_inv(r)), x0))
                if val != x0:
                    out[(l, r)] = val
        return out

    def multiply_fibred(self, a: FibredElement, b: FibredElement) -> FibredElement:
        """(a b)_l = (g_l . h_l g'_{h^-1 l}, h_l h'_{h^-1 l})."""
        ainv = a.h.inverse()
        lm, cof = {}, {}
        for l in self.lines:
            src = ainv.apply_line(l)
            lm[l] = a.line_maps[l] @ b.line_maps[src]
            hl_inv = a.line_maps[l].inverse()
            for r in self._fibre_points:
                g = a.g(l, r, self.identity) * b.g(src, hl_inv(r), self.identity)
                if not g.is_identity():
                    cof[(l, r)] = g
        return FibredElement(a.h @ b.h, lm, cof)

    @property
    def _fibre_points(self) -> list:
        pts = getattr(self, "_fp_cache", None)
        if pts is None:
            field_ = self.ambient.field
            pts = [p for p in enumerate_points(field_, dim=1) if p != self.e0]
            self._fp_cache = pts
        return pts

    def fibred_indices(self) -> list:
        return [(l, r) for l in self.lines for r in self._fibre_points]

    def to_finite(self, e: FibredElement) -> FiniteGen:
        sigma = {}
        for l in self.lines:
            tgt = e.h.apply_line(l)
            hl = e.line_maps[tgt]
            for r in self._fibre_points:
                sigma[(l, r)] = (tgt, hl(r))
        return FiniteGen(sigma, dict(e.cofactor))

    def solve(self, elements: Sequence[FibredElement]) -> Optional[dict]:
        idx = self.fibred_indices()
        sol = solve_fixed_point(idx, [self.to_finite(e) for e in elements],
                                self.space.x0, self.space.size, self.identity)
        if sol is None:
            return None
        return {k: v for k, v in sol.items() if v != self.space.x0}


def _solve2(u, b, x):
    """(alpha, beta) with x = alpha u + beta b (x assumed in span(u, b))."""
    rows = [[u[i], b[i], x[i]] for i in range(3)]
    m, piv = linalg.rref(rows)
    if piv != [0, 1]:
        raise FibrationError("point not on the line spanned by the basis")
    return (m[0][2], m[1][2])


def line_fibration(gens: Sequence[tuple], u: ProjPoint, space, ambient,
                   sample_configs: int = 50, seed: int = 0, validate: bool = True) -> Fibration:
    """Build the fibration for named generators [(name, WreathElement)] and
    validate phi (bijection), psi (homomorphism on ordered generator pairs)
    and equivariance on generators and a configuration sample."""
    if not ambient.is_finite:
        raise FibrationError("line fibration needs a finite-field ambient")
    field_ = ambient.field
    u = ambient.coerce_point(u)
    for name, w in gens:
        if w.h(u) != u:
            raise FibrationError(f"generator {name} does not fix {format_point(u)}")
    pts = enumerate_points(field_)
    lines = lines_through(u, field_)
    base = {}
    for l in lines:
        base[l] = min(p for p in pts if l.contains(p) and p != u)
    one, zero = field_.one(), field_.zero()
    e0 = ProjPoint((one, zero))
    fib = Fibration(u, lines, base, {}, {}, e0, space.identity(), space, ambient)
    for p in pts:
        if p == u:
            continue
        l = fib.line_of(p)
        key = (l, fib.B(l, p))
        fib.iota[p] = key
        fib.iota_inv[key] = p
    fib.psi_images = {name: fib.psi(w) for name, w in gens}
    if validate:
        validate_fibration(fib, gens, sample_configs, seed)
    return fib


def validate_fibration(fib: Fibration, gens: Sequence[tuple], sample_configs: int = 50,
                       seed: int = 0, words: Optional[list] = None) -> None:
    pts = [p for p in enumerate_points(fib.ambient.field) if p != fib.u]
    # phi is a bijection onto L x (P^1 minus e0)
    keys = set(fib.iota.values())
    if len(keys) != len(pts) or keys != set(fib.fibred_indices()):
        raise FibrationError("iota is not a bijection onto L x (P^1 minus e0)")
    for name, e in fib.psi_images.items():
        for l in fib.lines:
            if e.line_maps[l](fib.e0) != fib.e0:
                raise FibrationError(f"h_l of {name} moves e0")
    elems = list(gens) if words is None else list(words)
    for na, a in elems:
        for nb, b in elems:
            lhs = fib.psi(multiply(a, b))
            rhs = fib.multiply_fibred(fib.psi(a), fib.psi(b))
            if not lhs.same_as(rhs):
                raise FibrationError(f"psi is not multiplicative on ({na}, {nb})")
    rng = random.Random(seed)
    space = fib.space
    samples = [Config.basepoint(space, fib.ambient)]
    for _ in range(sample_configs):
        k = rng.randint(1, min(4, len(pts)))
        samples.append(Config(space, fib.ambient,
                              {rng.choice(pts): rng.randrange(space.size) for _ in range(k)}))
    for name, w in elems:
        e = fib.psi(w)
        for x in samples:
            if fib.phi(act(w, x)) != fib.act_fibred(e, fib.phi(x)):
                raise FibrationError(f"phi is not psi-equivariant for {name}")
