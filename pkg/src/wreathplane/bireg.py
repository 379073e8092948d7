"""Biregularity calculus: singular sets, persistent fibres and fixed-point
coordinates along orbits of a single wreath element.

Convention: f = (g, h) is biregular over p w.r.t. z when f(z)_{f(p)} = z_{f(p)},
i.e. g_{h(p)}(z_p) = z_{h(p)}.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

from .orbits import OrbitUnresolved, OrbitWalk, iterate, locate_on_orbit, orbit_walk
from .projgeo import ProjPoint, format_point
from .resprod import Config, Perm, WreathElement, act, invert

__all__ = [
    "is_biregular", "singular_set", "SingularSet", "Evidence", "compose_biregularity",
    "persistent_fibre", "Certified", "RefutedUpTo", "Inconclusive",
    "infinite_orbit_fixed_coords", "finite_orbit_fixed_coords", "build_fixed_point",
    "Coords", "NoFixedPoint", "default_horizon",
]


def is_biregular(f: WreathElement, p: ProjPoint, z: Config) -> bool:
    hp = f.h(p)
    return f.g(hp)(z[p]) == z[hp]


@dataclass(frozen=True)
class SingularSet:
    base_config: Config
    element: WreathElement
    singular_points: frozenset

    def __contains__(self, p):
        return p in self.singular_points

    def __len__(self):
        return len(self.singular_points)


def candidate_points(f: WreathElement, z: Config) -> set:
    """Points outside which f and f^-1 are biregular w.r.t. z identically."""
    h, hinv = f.h, f.h.inverse()
    base = set(f.support) | set(z.support)
    return base | {hinv(p) for p in base} | {h(p) for p in base}


def singular_set(f: WreathElement, z: Config) -> SingularSet:
    finv = invert(f)
    pts = frozenset(p for p in candidate_points(f, z)
                    if not is_biregular(f, p, z) or not is_biregular(finv, p, z))
    return SingularSet(z, f, pts)


@dataclass(frozen=True)
class Evidence:
    """Record that ``element`` is (or is not) biregular over ``point``."""

    element: WreathElement
    point: ProjPoint
    config: Config
    biregular: Optional[bool]

    @staticmethod
    def of(f: WreathElement, p: ProjPoint, z: Config) -> "Evidence":
        return Evidence(f, p, z, is_biregular(f, p, z))


def compose_biregularity(first: Evidence, second: Evidence) -> Evidence:
    """Evidence for second∘first over first.point.  Only biregular∘biregular
    has a determined outcome (biregular); otherwise ``biregular`` is None."""
    if second.point != first.element.h(first.point) or second.config != first.config:
        raise ValueError("chain mismatch: second must be evaluated at the image point")
    comp = second.element * first.element
    verdict = True if first.biregular and second.biregular else None
    return Evidence(comp, first.point, first.config, verdict)


# ---------------------------------------------------------------------------
# persistent fibre
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Certified:
    l: int
    certificate: str

    verdict = "Certified"


@dataclass(frozen=True)
class RefutedUpTo:
    horizon: int
    violating_n: int
    definitive: bool
    certificate: str = ""

    verdict = "RefutedUpTo"


@dataclass(frozen=True)
class Inconclusive:
    reason: str

    verdict = "Inconclusive"


FibreVerdict = Union[Certified, RefutedUpTo, Inconclusive]


def default_horizon(f: WreathElement, z: Config) -> int:
    return 4 * (len(f.support) + len(z.support)) + 16


def _statuses_periodic(f, p, z, period):
    """Exact status sequences on a finite orbit: the pair (n mod period,
    current value) determines the future, so both sequences are eventually
    periodic and it suffices to simulate until a state repeats."""
    h, hinv = f.h, f.h.inverse()
    orbit = [p]
    for _ in range(period - 1):
        orbit.append(h(orbit[-1]))

    def fwd(n_pt):  # point h^n p
        return orbit[n_pt % period]

    # forward: a_n = g_{h^n p}(a_{n-1}); singular iff a_n != z_{h^n p}
    def run(step_value, point_at):
        seen = {}
        statuses = []
        val = z[p]
        n = 0
        while True:
            n += 1
            val = step_value(n, val)
            ok = val == z[point_at(n)]
            statuses.append(ok)
            state = (n % period, val)
            if state in seen:
                return statuses, seen[state], n
            seen[state] = n

    fstat, f_start, f_end = run(lambda n, v: f.g(fwd(n))(v), fwd)
    back = lambda n: orbit[(-n) % period]
    bstat, b_start, b_end = run(lambda n, v: f.g(orbit[(-n + 1) % period]).inverse()(v), back)
    return fstat, (f_start, f_end), bstat, (b_start, b_end)


def _eventually(stat, cycle, want: bool):
    """For a sequence repeating on [start+1, end] forever, the least l >= 1
    with stat[n] == want for all n >= l, or None."""
    start, end = cycle
    # indices are 1-based n; stat[n-1]
    if not all(stat[n - 1] == want for n in range(start + 1, end + 1)):
        return None
    l = end
    while l > 1 and stat[l - 2] == want:
        l -= 1
    return l


def persistent_fibre(f: WreathElement, p: ProjPoint, z: Config,
                     horizon: Optional[int] = None) -> FibreVerdict:
    """Decide whether f^n is singular and f^-n biregular over p for all n >= l."""
    if horizon is None:
        horizon = default_horizon(f, z)
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    walk = orbit_walk(f.h, p)
    if walk.period is not None:
        fstat, fcyc, bstat, bcyc = _statuses_periodic(f, p, z, walk.period)
        lf = _eventually(fstat, fcyc, False)
        lb = _eventually(bstat, bcyc, True)
        cert = f"periodic orbit, period {walk.period}"
        if lf is not None and lb is not None:
            l = max(lf, lb)
            if l > horizon:
                return Inconclusive(f"l = {l} exceeds horizon {horizon}")
            return Certified(l, cert)
        bad = fcyc[1] if lf is None else bcyc[1]
        return RefutedUpTo(horizon, bad, True, cert)
    # infinite orbit: locate every support point on the orbit
    try:
        idx = locate_on_orbit(f.h, p, set(f.support) | set(z.support), walk)
    except OrbitUnresolved as exc:
        return Inconclusive(str(exc))
    hi = max([0] + list(idx.values()))
    lo = min([0] + list(idx.values()))
    span = max(hi, -lo) + 2
    pts_f = {0: p}
    fwd_pts = [p]
    for _ in range(span):
        fwd_pts.append(f.h(fwd_pts[-1]))
    hinv = f.h.inverse()
    back_pts = [p]
    for _ in range(span):
        back_pts.append(hinv(back_pts[-1]))
    x0 = z.space.x0
    a = z[p]
    b = z[p]
    fstat, bstat = [], []
    for n in range(1, span + 1):
        a = f.g(fwd_pts[n])(a)
        fstat.append(a == z[fwd_pts[n]])
        b = f.g(back_pts[n - 1]).inverse()(b)
        bstat.append(b == z[back_pts[n]])
    # beyond ``span`` no support is met again: statuses are constant
    cert = f"infinite orbit, supports at indices {lo}..{hi}; stable from n = {span}"
    tail_sing = not fstat[-1]
    tail_bireg = bstat[-1]
    if tail_sing and tail_bireg:
        l = span
        while l > 1 and not fstat[l - 2] and bstat[l - 2]:
            l -= 1
        if l > horizon:
            return Inconclusive(f"l = {l} exceeds horizon {horizon}")
        return Certified(l, cert)
    return RefutedUpTo(horizon, span, True, cert)


# ---------------------------------------------------------------------------
# fixed-point coordinates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Coords:
    values: dict  # ProjPoint -> X0 index (non-basepoint entries only)


@dataclass(frozen=True)
class NoFixedPoint:
    reason: str
    witness: Optional[ProjPoint] = None


def infinite_orbit_fixed_coords(t: WreathElement, start: ProjPoint, walk: OrbitWalk):
    """Unique coordinates of a t-fixed point on the infinite orbit of start:
    z_n = x0 before the first cofactor and z_n = g_n ... g_a x0 after it."""
    if walk.period is not None:
        raise ValueError("walk is not certified infinite")
    try:
        idx = locate_on_orbit(t.h, start, t.support, walk)
    except OrbitUnresolved as exc:
        return NoFixedPoint(f"inconclusive: {exc}", start)
    x0 = t.space.x0
    if not idx:
        return Coords({})
    lo, hi = min(idx.values()), max(idx.values())
    p = iterate(t.h, start, lo)
    val = x0
    out = {}
    for n in range(lo, hi + 1):
        if n > lo:
            p = t.h(p)
        val = t.g(p)(val)
        if val != x0:
            out[p] = val
    if val != x0:
        return NoFixedPoint("tail of g_n...g_a x0 is not the basepoint", start)
    return Coords(out)


def finite_orbit_fixed_coords(t: WreathElement, orbit: Sequence[ProjPoint]):
    """Fixed coordinates on a finite h-cycle via the first-return element."""
    k = len(orbit)
    for i in range(k):
        if t.h(orbit[i]) != orbit[(i + 1) % k]:
            raise ValueError("orbit is not a cycle of the projective part")
    r = t.space.identity()
    for i in range(1, k + 1):
        r = t.g(orbit[i % k]) * r
    fixed = r.fixed_points()
    if not fixed:
        return NoFixedPoint("first-return element has no fixed point on X0", orbit[0])
    x0 = t.space.x0
    y = x0 if x0 in fixed else fixed[0]
    out = {}
    if y != x0:
        out[orbit[0]] = y
    for i in range(1, k):
        y = t.g(orbit[i])(y)
        if y != x0:
            out[orbit[i]] = y
    return Coords(out)


@dataclass(frozen=True)
class BuildInconclusive:
    reason: str


def build_fixed_point(t: WreathElement):
    """A configuration fixed by t (verified), NoFixedPoint, or
    BuildInconclusive when some orbit cannot be analysed exactly."""
    remaining = set(t.support)
    values: dict = {}
    while remaining:
        q = min(remaining, key=lambda x: x.sort_key())
        walk = orbit_walk(t.h, q)
        if walk.period is not None:
            orbit = list(walk.points)
            res = finite_orbit_fixed_coords(t, orbit)
            remaining -= set(orbit)
        else:
            try:
                idx = locate_on_orbit(t.h, q, remaining, walk)
            except OrbitUnresolved as exc:
                return BuildInconclusive(str(exc))
            res = infinite_orbit_fixed_coords(t, q, walk)
            remaining -= set(idx)
        if isinstance(res, NoFixedPoint):
            if res.reason.startswith("inconclusive"):
                return BuildInconclusive(res.reason)
            return res
        values.update(res.values)
    z = Config(t.space, t.ambient, values)
    if act(t, z) != z:
        raise AssertionError("constructed configuration is not fixed")
    return z
