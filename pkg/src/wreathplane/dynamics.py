"""Dynamics of a very proximal element: north-south constants, the
persistent-fibre word templates, and the correction of a t-fixed point on
the exceptional set E = P_+ ∪ P_-.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .bireg import Certified, persistent_fibre, candidate_points
from .projgeo import (
    ChordalContext, ProjMap, ProjPoint, chordal_distance, distance_to_line, format_point,
)
from .resprod import Config, WreathElement, act, invert
from .scalar import Place
from .spectral import AttractorData, Proximality, classify_proximality
from .words import Word

NSD_SAMPLES = 10000
N_CAP = 500
STAY_WINDOW = 5


class NSDError(ValueError):
    pass


@dataclass(frozen=True)
class NSDResult:
    """N with t^n(x) in B_eps(p_+) for x outside N_eps(P_-) and
    t^-n(y) in B_eps(p_-) for y outside N_eps(P_+), for all checked n >= N."""

    N: Optional[int]
    epsilon: Fraction
    place: Place
    forward_samples: int
    backward_samples: int
    window: int
    failure: Optional[ProjPoint] = None
    failure_direction: str = ""

    @property
    def ok(self) -> bool:
        return self.N is not None


def _real_samples(att: AttractorData, count: int, seed: int) -> list[ProjPoint]:
    """Seeded base set independent of epsilon: a rational grid plus points
    close to P_- and P_+ at geometric distance levels."""
    rng = random.Random(seed)
    out = []
    n_grid = count - 2 * (count // 5)
    while len(out) < n_grid:
        v = [Fraction(rng.randint(-50, 50)) for _ in range(3)]
        if any(v):
            out.append(ProjPoint(v))
    # near P_-: y on span(p_-, p_mid) plus a small multiple of p_+ (and dually)
    for near, far_pts, push in ((0, (att.p_minus, att.p_mid), att.p_plus),
                                (1, (att.p_plus, att.p_mid), att.p_minus)):
        for k in range(count // 5):
            a, b = rng.randint(-9, 9), rng.randint(-9, 9)
            if a == 0 and b == 0:
                a = 1
            y = [a * x + b * w for x, w in zip(far_pts[0].coords, far_pts[1].coords)]
            level = Fraction(1, 2 ** (1 + k % 12)) * Fraction(rng.randint(50, 200), 100)
            scale = max(abs(Fraction(c)) for c in y)
            v = [c + level * scale * pc for c, pc in zip(y, push.coords)]
            if any(v):
                out.append(ProjPoint(v))
    return out


def _padic_samples(att: AttractorData) -> list[ProjPoint]:
    """Canonical valuation patterns: x = sum c_i e_i over the eigenbasis with
    v(c_i) in [-3, 3] or c_i = 0, units 1 (and -1 for odd q)."""
    q = att.place.prime
    units = [1] if q == 2 else [1, -1]
    coeffs = [Fraction(0)] + [u * Fraction(q) ** v for v in range(-3, 4) for u in units]
    basis = (att.p_plus.coords, att.p_mid.coords, att.p_minus.coords)
    out = []
    for c in itertools.product(coeffs, repeat=3):
        if not any(c):
            continue
        v = [sum(ci * bi[j] for ci, bi in zip(c, basis)) for j in range(3)]
        out.append(ProjPoint(v))
    return out


class _Stepper:
    """Iteration and the exact test d(y, target) < eps.  Over Q at a real
    place this runs on primitive integer vectors (same exact comparison as
    chordal_distance, without the rational overhead)."""

    def __init__(self, m: ProjMap, target: ProjPoint, eps: Fraction, ctx: ChordalContext):
        self.ctx, self.eps, self.target, self.m = ctx, eps, target, m
        self.fast = ctx.place.archimedean and ctx.place.sign == 1 and all(
            isinstance(x, (int, Fraction)) for row in m.matrix for x in row) and all(
            isinstance(x, (int, Fraction)) for x in target.coords)
        if self.fast:
            self.mi = _integral(m.matrix)
            self.w = _primitive(target.coords)
            self.w2 = sum(c * c for c in self.w)
            self.e2n, self.e2d = eps.numerator ** 2, eps.denominator ** 2

    def start(self, x: ProjPoint):
        return _primitive(x.coords) if self.fast else x

    def step(self, y):
        if not self.fast:
            return self.m(y)
        v = [sum(a * b for a, b in zip(row, y)) for row in self.mi]
        return _primitive(v)

    def inside(self, y) -> bool:
        if not self.fast:
            return chordal_distance(y, self.target, self.ctx) < self.eps
        v2 = sum(c * c for c in y)
        ip = sum(a * b for a, b in zip(y, self.w))
        prod = v2 * self.w2
        return (prod - ip * ip) * self.e2d < self.e2n * prod


def _integral(rows):
    import math
    den = 1
    for row in rows:
        for x in row:
            den = den * Fraction(x).denominator // math.gcd(den, Fraction(x).denominator)
    return [[int(Fraction(x) * den) for x in row] for row in rows]


def _primitive(v):
    import math
    den = 1
    for x in v:
        d = Fraction(x).denominator
        den = den * d // math.gcd(den, d)
    ints = [int(Fraction(x) * den) for x in v]
    g = 0
    for c in ints:
        g = math.gcd(g, c)
    return tuple(c // g for c in ints) if g > 1 else tuple(ints)


def _last_exit(st: "_Stepper", x: ProjPoint, limit: int):
    """1 + the last n <= limit with m^n x outside B_eps(target), once the orbit
    has stayed inside for STAY_WINDOW consecutive steps; None if it never does."""
    inside_run = 0
    last_out = 0
    y = st.start(x)
    for n in range(1, limit + STAY_WINDOW + 1):
        y = st.step(y)
        if st.inside(y):
            inside_run += 1
            if inside_run >= STAY_WINDOW:
                return last_out + 1
        else:
            inside_run = 0
            last_out = n
    return None


def nsd_constant(t: ProjMap, place: Place, epsilon, samples: int = NSD_SAMPLES,
                 seed: int = 0, cap: int = N_CAP) -> NSDResult:
    """North-south constant of a very proximal t at ``place`` on a
    deterministic sample set (exact epsilon comparisons).

    N is the largest settling time over the samples, then re-checked on the
    window N .. N+STAY_WINDOW-1 for every sample; failures push N up."""
    eps = Fraction(epsilon)
    if not 0 < eps < 1:
        raise NSDError("epsilon must lie in (0, 1)")
    res = classify_proximality(t, place)
    if res.kind is not Proximality.VERY_PROXIMAL:
        raise NSDError(f"element is not very proximal at {place} ({res.kind.value})")
    att = res.attractor
    ctx = ChordalContext(place)
    base = _padic_samples(att) if not place.archimedean else _real_samples(att, samples, seed)
    fwd = [x for x in base if distance_to_line(x, att.P_minus, ctx) >= eps]
    bwd = [x for x in base if distance_to_line(x, att.P_plus, ctx) >= eps]
    tinv = t.inverse()
    runs = ((_Stepper(t, att.p_plus, eps, ctx), fwd, "forward"),
            (_Stepper(tinv, att.p_minus, eps, ctx), bwd, "backward"))
    N = 1
    for st, pts, direction in runs:
        for x in pts:
            k = _last_exit(st, x, cap)
            if k is None:
                return NSDResult(None, eps, place, len(fwd), len(bwd), STAY_WINDOW, x, direction)
            N = max(N, k)
    while N <= cap:
        bad = _window_failure(runs, N)
        if bad is None:
            return NSDResult(N, eps, place, len(fwd), len(bwd), STAY_WINDOW)
        N = bad[0] + 1
    return NSDResult(None, eps, place, len(fwd), len(bwd), STAY_WINDOW, bad[1], bad[2])


def _window_failure(runs, N):
    for st, pts, direction in runs:
        mN = _Stepper(st.m ** N, st.target, st.eps, st.ctx)
        for x in pts:
            y = mN.step(mN.start(x))
            for n in range(N, N + STAY_WINDOW):
                if n > N:
                    y = st.step(y)
                if not st.inside(y):
                    return n, x, direction
    return None


# ---------------------------------------------------------------------------
# persistent-fibre word templates
# ---------------------------------------------------------------------------

TEMPLATES = ("t^n f", "t^N f t^n f", "t^-n f t^n f", "t^-m f^2 t^n f")


@dataclass(frozen=True)
class Witness:
    """An element with persistent fibre over ``point``: it fixes no point."""

    template: str
    exponents: tuple
    element: WreathElement
    point: ProjPoint
    l: int
    word: Optional[Word]
    case: str
    used_symmetry: bool
    certificate: str


def _proof_case(f: WreathElement, att: AttractorData) -> tuple[str, bool]:
    """Case label of the regularity argument and whether it is reached
    through the substitution t -> t^-1, f -> f^-1, r -> f(r)."""
    h, hinv = f.h, f.h.inverse()
    pp, pm, p = att.p_plus, att.p_minus, att.p_mid
    a = att.P_minus.contains(h(pp))
    b = att.P_plus.contains(hinv(pm))
    if not a and not b:
        return "1", False
    if a != b:
        return "2", b  # the written argument has f(p_+) in P_-
    fpm, fpp = h(pm), h(pp)
    if fpp != pm and fpm != pp:
        return "3a", False
    if (fpm == pp) == (fpp == pm):
        return "3-degenerate", False
    swapped = fpp == pm
    if fpp == p:
        return "3b-ii", swapped
    if hinv(pm) == p:
        return "3b-omitted", True
    return "3b-i", swapped


def _template_words(k: int, max_exp: int):
    if k == 0:
        for n in range(1, max_exp + 1):
            yield (n,), [("t", n), ("f", 1)]
    elif k == 1:
        for N in range(1, max_exp + 1):
            for n in range(1, max_exp + 1):
                yield (N, n), [("t", N), ("f", 1), ("t", n), ("f", 1)]
    elif k == 2:
        for n in range(1, max_exp + 1):
            yield (n,), [("t", -n), ("f", 1), ("t", n), ("f", 1)]
    else:
        for m in range(1, max_exp + 1):
            for n in range(1, max_exp + 1):
                yield (m, n), [("t", -m), ("f", 2), ("t", n), ("f", 1)]


def search_persistent_fibre_word(t: WreathElement, f: WreathElement, r: ProjPoint, z: Config,
                                 attractor: AttractorData, max_exp: int = 6,
                                 t_word: Optional[Word] = None, f_word: Optional[Word] = None,
                                 ) -> Optional[Witness]:
    """First template instance (template order, lexicographic exponents)
    with an exactly certified persistent fibre over r, or None."""
    if attractor.in_E(r):
        raise ValueError(f"{format_point(r)} lies in E = P_+ ∪ P_-")
    case, needs_sym = _proof_case(f, attractor)
    attempts = [(t, f, r, t_word, f_word, False)]
    if needs_sym:
        tw = t_word.inverse() if t_word is not None else None
        fw = f_word.inverse() if f_word is not None else None
        attempts.append((invert(t), invert(f), f.h(r), tw, fw, True))
    for tt, ff, rr, tw, fw, sym in attempts:
        elems = {"t": tt, "f": ff}
        words = {"t": tw, "f": fw}
        for k, name in enumerate(TEMPLATES):
            for exps, parts in _template_words(k, max_exp):
                w = None
                word = Word() if tw is not None and fw is not None else None
                for sym_name, e in parts:
                    piece = elems[sym_name] ** e
                    w = piece if w is None else w * piece
                    if word is not None:
                        word = word * words[sym_name] ** e
                verdict = persistent_fibre(w, rr, z)
                if isinstance(verdict, Certified):
                    cert = (f"case {case}; r outside E; f(r) {'in' if attractor.in_E(f.h(r)) else 'outside'} E; "
                            f"persistent fibre l = {verdict.l} ({verdict.certificate})")
                    return Witness(name, exps, w, rr, verdict.l, word, case, sym, cert)
    return None


# ---------------------------------------------------------------------------
# correcting the fixed point on E
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AdjustInconclusive:
    reason: str
    conflict: tuple = ()


def adjust_fixed_point(gens: Sequence[WreathElement], t: WreathElement, attractor: AttractorData,
                       z: Config, word_bound: int = 3, words: Optional[Sequence] = None):
    """Replace z_q by f(z)_q for q in E reachable as q = f(r) with r outside E.

    ``words`` is an optional list of (label, element) to search; by default
    all reduced words up to ``word_bound`` in ``gens``.  The result is
    returned only after exact verification against every generator."""
    if act(t, z) != z:
        raise ValueError("z is not fixed by t")
    if words is None:
        from .words import enumerate_words, evaluate
        ident = WreathElement.identity(t.space, t.ambient)
        words = [(w, evaluate(w, list(gens), lambda a, b: a * b, invert, ident))
                 for w in enumerate_words(len(gens), word_bound)]
    relevant = set(z.support)
    for g in gens:
        relevant |= candidate_points(g, z)
    relevant = sorted((q for q in relevant if attractor.in_E(q)), key=lambda x: x.sort_key())
    updates: dict = {}
    sources: dict = {}
    for q in relevant:
        for label, f in words:
            r = f.h.inverse()(q)
            if attractor.in_E(r):
                continue
            val = f.g(q)(z[r])
            if q in updates and updates[q] != val:
                return AdjustInconclusive(
                    f"value at {format_point(q)} depends on the word",
                    (sources[q], (label, r, val)))
            if q not in updates:
                updates[q] = val
                sources[q] = (label, r, val)
    z2 = z.with_values(updates)
    if act(t, z2) != z2:
        return AdjustInconclusive("adjusted point is not fixed by t")
    for i, g in enumerate(gens):
        if act(g, z2) != z2:
            return AdjustInconclusive(f"adjusted point is not fixed by generator {i + 1}")
    return z2
