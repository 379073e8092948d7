"""Property suites behind ``wreathplane check``: each returns a SuiteResult
with a pass flag and a one-line summary (no timings, so output is stable)."""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

from .bireg import Certified, NoFixedPoint, build_fixed_point, persistent_fibre
from .dynamics import nsd_constant
from .fibration import line_fibration, validate_fibration
from .orbits import locate_on_orbit, orbit_walk
from .pipeline import (
    FixedPointFound, NotPurelyElliptic, PurelyElliptic, CounterexampleWord, Scenario,
    brute_force_fixed_point, decide_scenario, purely_elliptic_check, InvariantViolation,
)
from .projgeo import ChordalContext, ProjMap, ProjPoint, chordal_distance, distance_to_line
from .resprod import Ambient, BasedSpace, Config, Perm, WreathElement, act, invert
from .scalar import CertifiedReal, Place
from .spectral import Proximality, classify_proximality
from .words import enumerate_words


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    checks: int
    detail: str

    def line(self) -> str:
        return f"{self.name}: {'PASS' if self.passed else 'FAIL'} ({self.checks} checks) {self.detail}"


# ---------------------------------------------------------------------------
# random objects
# ---------------------------------------------------------------------------

def random_rational_point(rng: random.Random, bound: int = 9) -> ProjPoint:
    while True:
        v = [Fraction(rng.randint(-bound, bound), rng.randint(1, 4)) for _ in range(3)]
        if any(v):
            return ProjPoint(v)


def random_matrix(rng: random.Random, ambient: Ambient, fix_u: Optional[ProjPoint] = None):
    """A random invertible 3x3 matrix over the ambient field, optionally
    fixing [1:0:0] (first column a multiple of e1)."""
    field = ambient.field
    while True:
        if ambient.is_finite:
            m = [[field(rng.randrange(field.order)) for _ in range(3)] for _ in range(3)]
        else:
            m = [[Fraction(rng.randint(-3, 3)) for _ in range(3)] for _ in range(3)]
            if ambient.kind == "quadratic" and rng.random() < 0.5:
                from .scalar import QuadExt
                i, j = rng.randrange(3), rng.randrange(3)
                m[i][j] = QuadExt.make(m[i][j], rng.choice([-1, 1]), ambient.d)
        if fix_u is not None:
            zero = field.zero() if ambient.is_finite else Fraction(0)
            m[1][0] = zero
            m[2][0] = zero
        try:
            return ProjMap(m)
        except ValueError:
            continue


def random_space(rng: random.Random, max_size: int = 4, decent: Optional[bool] = None) -> BasedSpace:
    n = rng.randint(2, max_size)
    labels = tuple("abcdefgh"[:n])
    gens = []
    for _ in range(rng.randint(1, 2)):
        imgs = list(range(n))
        if decent:
            # keep the last element fixed
            head = imgs[:-1]
            rng.shuffle(head)
            imgs = head + [n - 1]
        else:
            rng.shuffle(imgs)
        gens.append(Perm(tuple(imgs)))
    if decent is False:
        gens.append(Perm(tuple(list(range(1, n)) + [0])))  # an n-cycle: no global fixed point
    return BasedSpace(labels, labels[0], tuple(gens))


def random_element(rng: random.Random, space: BasedSpace, ambient: Ambient, pts,
                   n_cof: int, h: Optional[ProjMap] = None) -> WreathElement:
    group = sorted(space.group, key=lambda g: g.images)
    if h is None:
        h = random_matrix(rng, ambient)
    cof = {rng.choice(pts): rng.choice(group) for _ in range(n_cof)}
    return WreathElement(space, ambient, h, cof)


def random_config(rng: random.Random, space: BasedSpace, ambient: Ambient, pts, k: int = 3) -> Config:
    return Config(space, ambient, {rng.choice(pts): rng.randrange(space.size) for _ in range(k)})


# ---------------------------------------------------------------------------
# 1. metric
# ---------------------------------------------------------------------------

def metric_suite(seed: int = 0, triples: int = 500) -> SuiteResult:
    rng = random.Random(seed)
    checks, failures = 0, []
    for place in (Place.real(), Place.padic(2), Place.padic(5)):
        ctx = ChordalContext(place)
        for _ in range(triples):
            x, y, z = (random_rational_point(rng) for _ in range(3))
            dxy, dyx = chordal_distance(x, y, ctx), chordal_distance(y, x, ctx)
            dxz, dyz = chordal_distance(x, z, ctx), chordal_distance(y, z, ctx)
            ok_sym = dxy == dyx
            ok_id = (chordal_distance(x, x, ctx) == 0) and ((dxy == 0) == (x == y))
            if place.archimedean:
                ok_tri = dxz.le_sum(dxy, dyz)
            else:
                ok_tri = dxz <= max(dxy, dyz)  # ultrametric, hence triangle
            ok_bound = all(d <= 1 for d in (dxy, dxz, dyz))
            checks += 4
            for label, ok in (("symmetry", ok_sym), ("identity", ok_id),
                              ("triangle", ok_tri), ("bound", ok_bound)):
                if not ok:
                    failures.append(f"{label} at {place}")
    return SuiteResult("metric", not failures, checks,
                       failures[0] if failures else "places real, padic(2), padic(5)")


# ---------------------------------------------------------------------------
# 2. algebra
# ---------------------------------------------------------------------------

def _families():
    s2 = BasedSpace(("a", "b"), "a", (Perm((1, 0)),))
    s3 = BasedSpace(("a", "b", "c"), "a", (Perm((1, 2, 0)), Perm((1, 0, 2))))
    return [("gf2", s3, Ambient.gf(2)), ("gf3", s2, Ambient.gf(3)), ("gf4", s2, Ambient.gf(4)),
            ("rational", s3, Ambient.rational()), ("quadratic2", s2, Ambient.quadratic(2))]


def algebra_suite(seed: int = 0, samples: int = 200) -> SuiteResult:
    rng = random.Random(seed)
    checks, failures = 0, []
    for name, space, ambient in _families():
        pts = ambient.points() if ambient.is_finite else [random_rational_point(rng, 3)
                                                          for _ in range(12)]
        ident = WreathElement.identity(space, ambient)
        for _ in range(samples):
            w1, w2, w3 = (random_element(rng, space, ambient, pts, rng.randint(0, 3))
                          for _ in range(3))
            x = random_config(rng, space, ambient, pts)
            conds = {
                "associativity": (w1 * w2) * w3 == w1 * (w2 * w3),
                "identity": ident * w1 == w1 == w1 * ident,
                "inverse": (w1 * invert(w1)).is_identity() and (invert(w1) * w1).is_identity(),
                "compatibility": act(w1 * w2, x) == act(w1, act(w2, x)),
                "unit action": act(ident, x) == x,
            }
            checks += len(conds)
            failures += [f"{k} in {name}" for k, ok in conds.items() if not ok]
    return SuiteResult("algebra", not failures, checks,
                       failures[0] if failures else "families gf2, gf3, gf4, rational, quadratic2")


# ---------------------------------------------------------------------------
# 3. fixed-point formula
# ---------------------------------------------------------------------------

def _recurrence_oracle(t: WreathElement, start: ProjPoint, lo: int, hi: int) -> Optional[dict]:
    """Solve g_n z_{n-1} = z_n on the window lo-2 .. hi+2 of the orbit of
    ``start`` by trying every value at the left end and keeping those that
    start and end at x0 (restricted product)."""
    space = t.space
    hinv = t.h.inverse()
    p = start
    for _ in range(lo - 2):
        p = t.h(p)
    for _ in range(2 - lo if lo < 2 else 0):
        p = hinv(p)
    window = [p]
    for _ in range(hi - lo + 4):
        window.append(t.h(window[-1]))
    sols = []
    for v in range(space.size):
        vals = [v]
        for q in window[1:]:
            vals.append(t.g(q)(vals[-1]))
        if vals[0] == space.x0 and vals[-1] == space.x0:
            sols.append({q: x for q, x in zip(window, vals)})
    return sols[0] if len(sols) == 1 else None


def fixed_point_suite(seed: int = 0, scenarios: int = 50) -> SuiteResult:
    rng = random.Random(seed)
    space = BasedSpace(("a", "b", "c"), "a", (Perm((1, 2, 0)), Perm((1, 0, 2))))
    amb = Ambient.rational()
    group = sorted(space.group, key=lambda g: g.images)
    checks, failures, n_fixed, n_none = 0, [], 0, 0
    for k in range(scenarios):
        a, b = rng.choice([(4, 2), (3, 1), (5, 2), (9, 3), (2, 3)])
        h = ProjMap.diag(a, b, 1)
        base = ProjPoint((1, 1, 1)) if k % 2 else random_rational_point(rng, 5)
        while any(c == 0 for c in base.coords):
            base = random_rational_point(rng, 5)
        idx = sorted(rng.sample(range(-4, 5), rng.randint(1, 3)))
        pts = [(h ** i)(base) for i in idx]
        cof = {p: rng.choice(group) for p in pts}
        t = WreathElement(space, amb, h, cof)
        walk = orbit_walk(h, base)
        if walk.period is not None:
            failures.append("orbit not certified infinite")
            continue
        res = build_fixed_point(t)
        pos = locate_on_orbit(h, base, t.support, walk)
        lo, hi = (min(pos.values()), max(pos.values())) if pos else (0, 0)
        oracle = _recurrence_oracle(t, base, lo, hi)
        checks += 1
        if isinstance(res, Config):
            n_fixed += 1
            checks += 2
            if act(t, res) != res:
                failures.append("act(t, z) != z")
            if oracle is None or any(res[q] != v for q, v in oracle.items()):
                failures.append("coordinates disagree with the recurrence")
        elif isinstance(res, NoFixedPoint):
            n_none += 1
            checks += 2
            if oracle is not None:
                failures.append("oracle finds a fixed point the formula rejects")
            before = (h ** (lo - 1))(base)
            z0 = Config.basepoint(space, amb)
            if not isinstance(persistent_fibre(t, before, z0), Certified):
                failures.append("no persistent fibre for a NoFixedPoint element")
        else:
            failures.append(f"unexpected result {res}")
    return SuiteResult("fixed-point", not failures, checks,
                       failures[0] if failures else f"{n_fixed} fixed, {n_none} without fixed point")


# ---------------------------------------------------------------------------
# 4. proximality
# ---------------------------------------------------------------------------

def _companion(c0, c1, c2):
    """Companion matrix of x^3 + c2 x^2 + c1 x + c0."""
    return [[0, 0, -c0], [1, 0, -c1], [0, 1, -c2]]


# (matrix rows, place, expected label) with hand-derived labels
PROXIMALITY_FIXTURES = [
    ([[4, 0, 0], [0, 2, 0], [0, 0, 1]], Place.real(), Proximality.VERY_PROXIMAL),
    ([[4, 0, 0], [0, 2, 0], [0, 0, 1]], Place.padic(2), Proximality.VERY_PROXIMAL),
    ([[4, 0, 0], [0, 2, 0], [0, 0, 1]], Place.padic(3), Proximality.NOT_PROXIMAL),
    ([[2, 0, 0], [0, 1, 0], [0, 0, 1]], Place.real(), Proximality.PROXIMAL),
    ([[2, 0, 0], [0, 2, 0], [0, 0, 1]], Place.real(), Proximality.NOT_PROXIMAL),
    ([[1, 0, 0], [0, 1, 0], [0, 0, 1]], Place.real(), Proximality.NOT_PROXIMAL),
    ([[1, 1, 0], [0, 1, 1], [0, 0, 1]], Place.real(), Proximality.NOT_PROXIMAL),
    ([[0, 0, 1], [1, 0, 0], [0, 1, 0]], Place.real(), Proximality.NOT_PROXIMAL),
    ([[9, 0, 0], [0, 3, 0], [0, 0, 1]], Place.padic(3), Proximality.VERY_PROXIMAL),
    ([[9, 0, 0], [0, 3, 0], [0, 0, 1]], Place.real(), Proximality.VERY_PROXIMAL),
    ([[-3, 0, 0], [0, 1, 0], [0, 0, 1]], Place.real(), Proximality.PROXIMAL),
    ([[5, 1, 0], [0, 2, 0], [0, 0, 1]], Place.real(), Proximality.VERY_PROXIMAL),
    ([[5, 1, 0], [0, 2, 0], [0, 0, 1]], Place.padic(5), Proximality.NOT_PROXIMAL),
    ([[1, 0, 0], [0, 2, 0], [0, 0, 6]], Place.padic(3), Proximality.NOT_PROXIMAL),
    ([[2, 1, 0], [1, 1, 0], [0, 0, 1]], Place.real(), Proximality.VERY_PROXIMAL),
    ([[2, 0, 0], [0, 1, 0], [0, 0, 1]], Place.padic(2), Proximality.NOT_PROXIMAL),
    ([[3, 0, 0], [0, -3, 0], [0, 0, 1]], Place.real(), Proximality.NOT_PROXIMAL),
    ([[8, 0, 0], [0, 4, 0], [0, 0, -1]], Place.real(), Proximality.VERY_PROXIMAL),
    ([[6, 0, 0], [0, 3, 0], [0, 0, 2]], Place.padic(2), Proximality.PROXIMAL),
    ([[6, 0, 0], [0, 3, 0], [0, 0, 2]], Place.real(), Proximality.VERY_PROXIMAL),
]


def _iterate_to(m: ProjMap, x: ProjPoint, target: ProjPoint, ctx, tol, steps: int) -> bool:
    y = x
    for _ in range(steps):
        y = m(y)
        if chordal_distance(y, target, ctx) < tol:
            return True
    return False


def proximality_suite(seed: int = 0, starts: int = 100) -> SuiteResult:
    rng = random.Random(seed)
    tol = Fraction(1, 10 ** 6)
    checks, failures, n_vp = 0, [], 0
    for rows, place, label in PROXIMALITY_FIXTURES:
        m = ProjMap([[Fraction(x) for x in r] for r in rows])
        res = classify_proximality(m, place)
        checks += 1
        if res.kind is not label:
            failures.append(f"{rows} at {place}: {res.kind.value} != {label.value}")
            continue
        if res.kind is not Proximality.VERY_PROXIMAL or not place.archimedean:
            continue
        n_vp += 1
        ctx = ChordalContext(place)
        p_plus, P_minus = res.attractor.p_plus, res.attractor.P_minus
        for _ in range(starts):
            x = random_rational_point(rng, 20)
            while P_minus.contains(x):
                x = random_rational_point(rng, 20)
            checks += 1
            if not _iterate_to(m, x, p_plus, ctx, tol, 200):
                failures.append(f"{rows}: no convergence from {x}")
                break
    return SuiteResult("proximality", not failures, checks,
                       failures[0] if failures else f"{len(PROXIMALITY_FIXTURES)} fixtures, "
                                                    f"{n_vp} iterated")


# ---------------------------------------------------------------------------
# 5. fibration
# ---------------------------------------------------------------------------

def fibration_suite(seed: int = 0, configs: int = 50, trials: int = 3) -> SuiteResult:
    rng = random.Random(seed)
    checks, failures = 0, []
    space = BasedSpace(("a", "b", "c"), "a", (Perm((1, 2, 0)), Perm((1, 0, 2))))
    for q in (2, 3):
        amb = Ambient.gf(q)
        F = amb.field
        u = ProjPoint((F.one(), F.zero(), F.zero()))
        pts = amb.points()
        for _ in range(trials):
            gens = [(f"g{i + 1}", random_element(rng, space, amb, pts, 2, random_matrix(rng, amb, u)))
                    for i in range(2)]
            ws = [(name, w) for name, w in gens]
            names = [n for n, _ in gens]
            elems = [w for _, w in gens]
            words = []
            for wd in enumerate_words(2, 2):
                e = WreathElement.identity(space, amb)
                for a in wd.letters:
                    e = e * (elems[a - 1] if a > 0 else invert(elems[-a - 1]))
                words.append((wd.format(names), e))
            try:
                fib = line_fibration(ws, u, space, amb, configs, rng.randrange(10 ** 6))
                validate_fibration(fib, ws, configs, rng.randrange(10 ** 6), words=words)
            except ValueError as exc:
                failures.append(f"GF({q}): {exc}")
            checks += 1 + len(words) ** 2 + len(words) * (configs + 1)
            if len(fib.lines) != q + 1 or len(fib.iota) != q * q + q:
                failures.append(f"GF({q}): wrong fibration size")
    return SuiteResult("fibration", not failures, checks,
                       failures[0] if failures else "GF(2), GF(3); words of length <= 2")


# ---------------------------------------------------------------------------
# 6. decency oracle
# ---------------------------------------------------------------------------

def random_finite_scenario(rng: random.Random, q: int) -> Scenario:
    amb = Ambient.gf(q)
    F = amb.field
    decent = rng.random() < 0.6
    space = random_space(rng, 4, decent)
    pts = amb.points()
    u = ProjPoint((F.one(), F.zero(), F.zero()))
    fix = rng.random() < 0.5
    gens = []
    for i in range(rng.randint(1, 2)):
        h = random_matrix(rng, amb, u if fix else None)
        gens.append((f"g{i + 1}", random_element(rng, space, amb, pts, rng.randint(0, 2), h)))
    return Scenario(space, amb, gens, {"closure_cap": 20000})


def decency_suite(seed: int = 0, scenarios: int = 32) -> SuiteResult:
    rng = random.Random(seed)
    checks, failures = 0, []
    tally = {"FixedPointFound": 0, "NotPurelyElliptic": 0, "Inconclusive": 0}
    for k in range(scenarios):
        s = random_finite_scenario(rng, 2 if k % 2 == 0 else 3)
        bf = brute_force_fixed_point(s)
        try:
            rep = decide_scenario(s, 3)
        except InvariantViolation as exc:
            failures.append(f"scenario {k}: {exc}")
            continue
        out = rep.outcome
        tally[out.verdict] += 1
        pe = purely_elliptic_check(s, 3)
        checks += 3
        if (bf is not None) != isinstance(out, FixedPointFound):
            failures.append(f"scenario {k}: decide disagrees with brute force")
        if isinstance(out, FixedPointFound) and isinstance(pe, CounterexampleWord):
            failures.append(f"scenario {k}: fixed point but an element fixes nothing")
        if isinstance(out, NotPurelyElliptic) and isinstance(pe, PurelyElliptic):
            failures.append(f"scenario {k}: counterexample contradicts the closure check")
        if isinstance(pe, PurelyElliptic) and s.space.is_decent() and bf is None:
            failures.append(f"scenario {k}: decent but purely elliptic without a fixed point")
    detail = ", ".join(f"{k} {v}" for k, v in tally.items())
    return SuiteResult("decency", not failures, checks, failures[0] if failures else detail)


# ---------------------------------------------------------------------------
# 7. north-south dynamics
# ---------------------------------------------------------------------------

def nsd_suite(seed: int = 0, samples: int = 10000) -> SuiteResult:
    checks, failures, found = 0, [], []
    t = ProjMap.diag(4, 2, 1)
    for eps in (Fraction(1, 8), Fraction(1, 4), Fraction(1, 2)):
        res = nsd_constant(t, Place.real(), eps, samples, seed)
        checks += 1
        if res.N is None or res.N > 500:
            failures.append(f"eps {eps}: no constant found")
        found.append(res.N)
    checks += 1
    if None not in found and any(a < b for a, b in zip(found, found[1:])):
        failures.append(f"N not non-increasing in eps: {found}")
    for q in (2, 3):
        res = nsd_constant(ProjMap.diag(q * q, q, 1), Place.padic(q), Fraction(1, q), samples, seed)
        checks += 1
        if res.N is None:
            failures.append(f"padic({q}): no constant found")
        found.append(res.N)
    return SuiteResult("nsd", not failures, checks,
                       failures[0] if failures else "N = " + ", ".join(map(str, found)))


SUITES: dict[str, Callable[..., SuiteResult]] = {
    "metric": metric_suite,
    "algebra": algebra_suite,
    "fixed-point": fixed_point_suite,
    "proximality": proximality_suite,
    "fibration": fibration_suite,
    "decency": decency_suite,
    "nsd": nsd_suite,
}
