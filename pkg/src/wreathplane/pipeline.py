"""Decision pipeline: classify the projection G of Gamma to PGL_3, then look
for a common fixed point of Gamma on the restricted product (or an element
fixing none).

Every positive answer is re-verified with ``act`` before it is reported;
negative answers carry an exact certificate for one element, and anything
else is Inconclusive with the bounds that were searched.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence, Union

from .bireg import BuildInconclusive, NoFixedPoint, build_fixed_point, singular_set
from .dynamics import AdjustInconclusive, Witness, adjust_fixed_point, search_persistent_fibre_word
from .fibration import line_fibration
from .finite import brute_force_fixed_point_elements, code_has_fixed_point, iter_closure_codes
from .projgeo import ProjLine, ProjMap, ProjPoint, format_point
from .resprod import (
    CLOSURE_CAP, Ambient, BasedSpace, ClosureCapExceeded, Config, WreathElement, act, invert,
)
from .scalar import Place
from .spectral import (
    AffineMap, Answer, AttractorData, Proximality, SL2Witness, affine_chart_reduction,
    all_eigenvalues_roots_of_unity, classify_proximality, common_eigenvector,
    common_invariant_line, relevant_places, sl2_hyperbolic_witness,
)
from .words import Word, enumerate_words, evaluate, generator

WORD_BOUND = 6
CONFIG_WORD_BOUND = 2      # words whose fixed points are tried as candidates
COUNTER_WORD_BOUND = 4     # words tested for fixed-point-freeness (infinite planes)
ADJUST_WORD_BOUND = 3
TEMPLATE_EXPONENT = 6


class InvariantViolation(AssertionError):
    """A verified result contradicts an invariant that must hold."""


# ---------------------------------------------------------------------------
# scenarios
# ---------------------------------------------------------------------------

@dataclass
class Scenario:
    space: BasedSpace
    ambient: Ambient
    generators: list  # [(name, WreathElement)]
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        names = [n for n, _ in self.generators]
        if len(set(names)) != len(names):
            raise ValueError("duplicate generator names")
        for name, w in self.generators:
            if w.space != self.space or w.ambient != self.ambient:
                raise ValueError(f"generator {name} lives over a different space or plane")

    @property
    def names(self) -> list[str]:
        return [n for n, _ in self.generators]

    @property
    def elements(self) -> list[WreathElement]:
        return [w for _, w in self.generators]

    @property
    def matrices(self) -> list[ProjMap]:
        return [w.h for _, w in self.generators]

    @property
    def quad_d(self) -> Optional[int]:
        return self.ambient.d if self.ambient.kind == "quadratic" else None

    @cached_property
    def _cache(self) -> dict:
        return {}

    def identity(self) -> WreathElement:
        return WreathElement.identity(self.space, self.ambient)

    def element(self, word: Word) -> WreathElement:
        hit = self._cache.get(word)
        if hit is None:
            hit = evaluate(word, self.elements, lambda a, b: a * b, invert, self.identity())
            self._cache[word] = hit
        return hit

    def matrix(self, word: Word) -> ProjMap:
        ident = ProjMap.identity(3, self.ambient.coerce_scalar(1))
        return evaluate(word, self.matrices, lambda a, b: a @ b, lambda a: a.inverse(), ident)

    def fmt(self, word: Word) -> str:
        return word.format(self.names)

    def is_fixed(self, z: Config) -> bool:
        return all(act(w, z) == z for w in self.elements)


# ---------------------------------------------------------------------------
# classification of the projection
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VeryProximalWitness:
    word: Word
    place: Place
    attractor: AttractorData
    kind = "VeryProximalWitness"


@dataclass(frozen=True)
class CommonFixedPoint:
    point: ProjPoint
    kind = "CommonFixedPoint"


@dataclass(frozen=True)
class SolvablePath:
    line: ProjLine
    affine: tuple  # AffineMap per generator
    witness: SL2Witness
    kind = "SolvablePath"


@dataclass(frozen=True)
class NilpotentCertificate:
    word_bound: int
    certificates: tuple  # (Word, certificate string)
    kind = "NilpotentCertificate"


@dataclass(frozen=True)
class ClassInconclusive:
    reason: str
    kind = "Inconclusive"


@dataclass(frozen=True)
class ClassificationReport:
    outcome: object
    word_bound: int
    places: tuple


def _places_for(s: Scenario, places: Optional[Sequence[Place]]) -> list[Place]:
    if s.ambient.is_finite:
        return []
    found = relevant_places(s.matrices)
    return list(places) if places is not None else found


def classify_projection(s: Scenario, word_bound: int = WORD_BOUND,
                        places: Optional[Sequence[Place]] = None) -> ClassificationReport:
    """Very proximal search first, then common fixed point, invariant line
    with a hyperbolic affine part, roots-of-unity spectra; else Inconclusive."""
    if word_bound < 1:
        raise ValueError("word_bound must be >= 1")
    pl = _places_for(s, places)
    done = lambda out: ClassificationReport(out, word_bound, tuple(pl))
    if not s.generators:
        one = s.ambient.coerce_scalar(1)
        zero = s.ambient.coerce_scalar(0)
        return done(CommonFixedPoint(ProjPoint((one, zero, zero))))
    ngens = len(s.generators)
    if pl:
        for w in enumerate_words(ngens, word_bound):
            m = s.matrix(w)
            for place in pl:
                res = classify_proximality(m, place)
                if res.kind is Proximality.VERY_PROXIMAL:
                    return done(VeryProximalWitness(w, place, res.attractor))
    cev = common_eigenvector(s.matrices, s.quad_d)
    if cev.point is not None:
        return done(CommonFixedPoint(cev.point))
    if not s.ambient.is_finite:
        line = common_invariant_line(s.matrices, s.quad_d)
        if line is not None:
            aff = affine_chart_reduction(s.matrices, line)
            wit = sl2_hyperbolic_witness([a.linear for a in aff], word_bound)
            if wit is not None:
                return done(SolvablePath(line, tuple(aff), wit))
    certs = []
    for w in enumerate_words(ngens, word_bound):
        r = all_eigenvalues_roots_of_unity(s.matrix(w))
        if r.answer is not Answer.YES:
            return done(ClassInconclusive(
                f"{s.fmt(w)} has an eigenvalue that is not a root of unity "
                f"({r.certificate}) but no very proximal word of length <= {word_bound}"))
        if len(w) == 1:
            certs.append((w, r.certificate))
    return done(NilpotentCertificate(word_bound, tuple(certs)))


# ---------------------------------------------------------------------------
# oracles
# ---------------------------------------------------------------------------

def brute_force_fixed_point(s: Scenario) -> Optional[Config]:
    """Exhaustive common fixed point over a finite plane (values at each
    orbit of the generated permutation group pinned by one coordinate)."""
    if not s.ambient.is_finite:
        raise ValueError("brute force needs a finite-field ambient")
    if not s.generators:
        return Config.basepoint(s.space, s.ambient)
    return brute_force_fixed_point_elements(s.elements, s.ambient.points())


@dataclass(frozen=True)
class PurelyElliptic:
    detail: str
    exhaustive: bool
    verdict = "Yes"


@dataclass(frozen=True)
class CounterexampleWord:
    word: Word
    reason: str
    verdict = "CounterexampleWord"


@dataclass(frozen=True)
class CheckAborted:
    reason: str
    verdict = "Aborted"


def purely_elliptic_check(s: Scenario, word_bound: int = WORD_BOUND, cap: int = CLOSURE_CAP):
    """Finite plane: every element of the generated group (closure) fixes a
    point.  Infinite plane: every word up to ``word_bound`` does."""
    if not s.generators:
        return PurelyElliptic("trivial group", True)
    if s.ambient.is_finite:
        count = 0
        try:
            for e, w in iter_closure_codes(s.elements, s.ambient.points(), cap):
                if not code_has_fixed_point(e):
                    return CounterexampleWord(w, "fixes no configuration (exhaustive over the plane)")
                count += 1
        except ClosureCapExceeded as exc:
            return CheckAborted(f"{exc}; no counterexample among the first {count}")
        return PurelyElliptic(f"all {count} elements of the closure fix a point", True)
    unresolved = 0
    for w in enumerate_words(len(s.generators), word_bound):
        res = build_fixed_point(s.element(w))
        if isinstance(res, NoFixedPoint):
            return CounterexampleWord(w, res.reason)
        if isinstance(res, BuildInconclusive):
            unresolved += 1
    note = f"; {unresolved} words unresolved" if unresolved else ""
    return PurelyElliptic(f"every word of length <= {word_bound} fixes a point{note}", False)


# ---------------------------------------------------------------------------
# decision
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FixedPointFound:
    config: Config
    method: str
    verified: bool = True
    verdict = "FixedPointFound"


@dataclass(frozen=True)
class NotPurelyElliptic:
    """``word`` fixes no point.  With ``point`` set, the certificate is a
    persistent fibre over it relative to ``reference``."""

    word: Word
    certificate: str
    used_symmetry: bool = False
    point: Optional[ProjPoint] = None
    reference: Optional[Config] = None
    verdict = "NotPurelyElliptic"


@dataclass(frozen=True)
class DecideInconclusive:
    reason: str
    bounds: str
    verdict = "Inconclusive"


@dataclass(frozen=True)
class FinalReport:
    outcome: Union[FixedPointFound, NotPurelyElliptic, DecideInconclusive]
    classification: ClassificationReport
    notes: tuple = ()


def _found(s: Scenario, z: Config, method: str) -> FixedPointFound:
    if not s.is_fixed(z):
        raise InvariantViolation(f"{method} produced a configuration that is not fixed")
    return FixedPointFound(z, method)


def _common_value_fixed(s: Scenario, u: ProjPoint) -> Optional[int]:
    """A value of X0 fixed by every cofactor at u, preferring x0."""
    x0 = s.space.x0
    for v in [x0] + [i for i in range(s.space.size) if i != x0]:
        if all(w.g(u)(v) == v for w in s.elements):
            return v
    return None


def _finite_fixed_point(s: Scenario, cls: ClassificationReport, notes: list):
    out = cls.outcome
    if isinstance(out, CommonFixedPoint):
        u = out.point
        fib = line_fibration(s.generators, u, s.space, s.ambient)
        notes.append(f"line fibration at {format_point(u)}: {len(fib.lines)} lines, validated")
        y = fib.solve(list(fib.psi_images.values()))
        zu = _common_value_fixed(s, u)
        if y is None or zu is None:
            return None, "line fibration"
        return fib.phi_inv(y, zu), "line fibration"
    return brute_force_fixed_point(s), "exhaustive solve"


def _decide_finite(s: Scenario, cls, word_bound: int, notes: list) -> object:
    z, method = _finite_fixed_point(s, cls, notes)
    if z is not None:
        return _found(s, z, method)
    pe = purely_elliptic_check(s, word_bound, s.options.get("closure_cap", CLOSURE_CAP))
    if isinstance(pe, CounterexampleWord):
        return NotPurelyElliptic(pe.word, pe.reason)
    if isinstance(pe, CheckAborted):
        return DecideInconclusive(f"no common fixed point exists; {pe.reason}",
                                  f"closure cap {s.options.get('closure_cap', CLOSURE_CAP)}")
    if s.space.is_decent():
        raise InvariantViolation(
            "purely elliptic action with decent G0 but no common fixed point")
    return DecideInconclusive("purely elliptic without a common fixed point (G0 is not decent)",
                              "exhaustive")


def _candidate_configs(s: Scenario) -> list:
    """Basepoint, fixed points of short words, and their merge."""
    cands = [Config.basepoint(s.space, s.ambient)]
    merged: dict = {}
    clash = False
    for w in enumerate_words(len(s.generators), CONFIG_WORD_BOUND):
        z = build_fixed_point(s.element(w))
        if isinstance(z, Config):
            cands.append(z)
            if len(w) == 1:
                for p, v in z.items():
                    clash |= merged.setdefault(p, v) != v
    if merged and not clash:
        cands.append(Config(s.space, s.ambient, merged))
    return cands


def _counterexample(s: Scenario, bound: int) -> Optional[NotPurelyElliptic]:
    for w in enumerate_words(len(s.generators), bound):
        res = build_fixed_point(s.element(w))
        if isinstance(res, NoFixedPoint):
            return NotPurelyElliptic(w, f"{s.fmt(w)}: {res.reason}")
    return None


def _fibre_witness(s: Scenario, t_word: Word, att: AttractorData, z: Config,
                   max_exp: int) -> Optional[NotPurelyElliptic]:
    t = s.element(t_word)
    for i, (name, f) in enumerate(s.generators):
        fw = generator(i)
        for r in sorted(singular_set(f, z).singular_points, key=lambda p: p.sort_key()):
            if att.in_E(r):
                continue
            wit = search_persistent_fibre_word(t, f, r, z, att, max_exp, t_word, fw)
            if wit is not None:
                return NotPurelyElliptic(wit.word, f"template {wit.template} {wit.exponents} over "
                                         f"{format_point(wit.point)}: {wit.certificate}",
                                         wit.used_symmetry, wit.point, z)
    return None


def _decide_infinite(s: Scenario, cls, word_bound: int, notes: list) -> object:
    out = cls.outcome
    if isinstance(out, VeryProximalWitness):
        t = s.element(out.word)
        z = build_fixed_point(t)
        if isinstance(z, NoFixedPoint):
            return NotPurelyElliptic(out.word, f"{s.fmt(out.word)}: {z.reason}")
        if isinstance(z, Config):
            adj = adjust_fixed_point(s.elements, t, out.attractor, z,
                                     s.options.get("adjust_word_bound", ADJUST_WORD_BOUND))
            if isinstance(adj, Config):
                return _found(s, adj, "very proximal witness, adjusted on E")
            notes.append(f"adjustment inconclusive: {adj.reason}")
            wit = _fibre_witness(s, out.word, out.attractor, z,
                                 s.options.get("template_exponent", TEMPLATE_EXPONENT))
            if wit is not None:
                return wit
        else:
            notes.append(f"fixed point of the witness: {z.reason}")
    for z in _candidate_configs(s):
        if s.is_fixed(z):
            return _found(s, z, "verified candidate")
    bound = min(word_bound, s.options.get("counter_word_bound", COUNTER_WORD_BOUND))
    ce = _counterexample(s, bound)
    if ce is not None:
        return ce
    return DecideInconclusive("no verified fixed point and no certified counterexample",
                              f"word bound {word_bound}, counterexample words <= {bound}")


def decide_scenario(s: Scenario, word_bound: Optional[int] = None) -> FinalReport:
    word_bound = word_bound or s.options.get("word_bound", WORD_BOUND)
    cls = classify_projection(s, word_bound)
    notes: list = []
    if not s.generators:
        return FinalReport(_found(s, Config.basepoint(s.space, s.ambient), "trivial group"), cls)
    if s.ambient.is_finite:
        out = _decide_finite(s, cls, word_bound, notes)
    else:
        out = _decide_infinite(s, cls, word_bound, notes)
    return FinalReport(out, cls, tuple(notes))
