"""Orbits of a single projective map: periodicity certificates and exact
orbit membership (the discrete logarithm q = h^n p).

Over Q (resp. Q(sqrt d)) the period of a periodic point divides the lcm of
the orders of two eigenvalue ratios, which are roots of unity of degree at
most 6 (resp. 12).  Walking that many steps without returning therefore
certifies an infinite orbit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from . import linalg
from .projgeo import ProjMap, ProjPoint
from .scalar import FFElem, QuadExt, padic_valuation, iter_primes_of
from .spectral import UNRESOLVED, spectrum

PERIOD_BOUND_RATIONAL = 126
PERIOD_BOUND_QUADRATIC = 546


class OrbitUnresolved(Exception):
    """Orbit membership cannot be decided exactly (spectrum not resolved)."""


def period_bound(h: ProjMap) -> Optional[int]:
    """Upper bound for the period of any periodic point, or None over a
    finite field (where plain iteration terminates)."""
    a = h.matrix
    if isinstance(a[0][0], FFElem):
        return None
    if any(isinstance(x, QuadExt) for row in a for x in row):
        return PERIOD_BOUND_QUADRATIC
    return PERIOD_BOUND_RATIONAL


@dataclass(frozen=True)
class OrbitWalk:
    """Window of the <h>-orbit of ``start``; ``period`` is set for finite orbits."""

    h: ProjMap
    start: ProjPoint
    points: tuple  # forward window h^0 p, h^1 p, ...
    period: Optional[int]
    certified_steps: int = 0  # steps walked without revisit (infinite orbits)

    @property
    def is_infinite(self) -> bool:
        return self.period is None

    @property
    def status(self) -> str:
        if self.period is not None:
            return f"Periodic({self.period})"
        return f"InfiniteCertified(0..{self.certified_steps})"


def orbit_walk(h: ProjMap, p: ProjPoint, max_steps: Optional[int] = None) -> OrbitWalk:
    """Walk forward until the start recurs or the period bound is passed."""
    bound = period_bound(h)
    limit = bound if bound is not None else 10 ** 7
    pts = [p]
    x = p
    for k in range(1, limit + 1):
        x = h(x)
        if x == p:
            return OrbitWalk(h, p, tuple(pts), k)
        pts.append(x)
    if bound is None:
        raise AssertionError("finite-field orbit did not close")
    if max_steps is not None and max_steps < len(pts):
        pts = pts[:max_steps + 1]
    return OrbitWalk(h, p, tuple(pts), None, bound)


def iterate(h: ProjMap, p: ProjPoint, n: int) -> ProjPoint:
    """h^n p for any integer n."""
    if n == 0:
        return p
    return (h ** n)(p) if abs(n) > 8 else _step(h, p, n)


def _step(h, p, n):
    m = h if n > 0 else h.inverse()
    for _ in range(abs(n)):
        p = m(p)
    return p


# ---------------------------------------------------------------------------
# Jordan data and discrete logarithm
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class JordanData:
    """Basis columns grouped into chains: M e_1 = l e_1, M e_j = l e_j + e_{j-1}."""

    blocks: tuple  # (eigenvalue, (vectors...))
    basis_inv: tuple


def _shift(a, lam):
    n = len(a)
    return tuple(tuple(a[i][j] - (lam if i == j else 0) for j in range(n)) for i in range(n))


def _kernel(a, one):
    return linalg.nullspace([list(r) for r in a], one)


def _outside(space_basis, candidates, one):
    """First candidate not in the span of ``space_basis``."""
    r0 = linalg.rank(space_basis) if space_basis else 0
    for c in candidates:
        if linalg.rank(list(space_basis) + [c]) > r0:
            return c
    return None


@lru_cache(maxsize=2048)
def jordan_data(h: ProjMap) -> Optional[JordanData]:
    rep = spectrum(h)
    if not rep.resolved_fully:
        return None
    a = h.matrix
    blocks = []
    for lam, mult in rep.eigenvalues:
        one = lam * 0 + 1
        nmat = _shift(a, lam)
        k1 = _kernel(nmat, one)
        if mult == 1 or len(k1) == mult:
            blocks += [(lam, (v,)) for v in k1]
            continue
        n2 = linalg.matmul(nmat, nmat)
        k2 = _kernel(n2, one)
        if mult == 2 or len(k2) == 3 and len(k1) == 2:
            top = _outside(k1, k2, one)
            chain = (linalg.matvec(nmat, top), top)
            blocks.append((lam, chain))
            if mult == 3:
                extra = _outside([chain[0]], k1, one)
                blocks.append((lam, (extra,)))
            continue
        # one block of size 3
        k3 = _kernel(linalg.matmul(n2, nmat), one)
        top = _outside(k2, k3, one)
        mid = linalg.matvec(nmat, top)
        blocks.append((lam, (linalg.matvec(nmat, mid), mid, top)))
    cols = [v for _, chain in blocks for v in chain]
    basis = linalg.transpose(tuple(cols))
    return JordanData(tuple(blocks), linalg.inverse(basis))


def _coords(jd: JordanData, v):
    flat = linalg.matvec(jd.basis_inv, v)
    out, i = [], 0
    for lam, chain in jd.blocks:
        out.append((lam, tuple(flat[i:i + len(chain)])))
        i += len(chain)
    return out


def _top(vec):
    """Index of the highest nonzero coordinate within a block, or None."""
    for j in range(len(vec) - 1, -1, -1):
        if vec[j] != 0:
            return j
    return None


def _as_integer(x) -> Optional[int]:
    if isinstance(x, QuadExt):
        return None
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else None


def _is_root_of_unity(alpha) -> bool:
    power = alpha
    for _ in range(12):
        if power == 1:
            return True
        power = power * alpha
    return False


def _norm(x):
    return x.norm() if isinstance(x, QuadExt) else Fraction(x)


def _solve_power(alpha, beta) -> list[int]:
    """Candidate integers n with alpha^n = beta (alpha not a root of unity).
    Exact via valuations of norms when possible, else from the real log."""
    na, nb = _norm(alpha), _norm(beta)
    for q in sorted(set(iter_primes_of(na))):
        va = padic_valuation(na, q)
        if va != 0:
            vb = padic_valuation(nb, q)
            if vb % va:
                return []
            return [vb // va]
    # |N(alpha)| = 1: alpha is a unit of Q(sqrt d) (or +-1, excluded)
    a = alpha.embed(1) if isinstance(alpha, QuadExt) else float(alpha)
    b = beta.embed(1) if isinstance(beta, QuadExt) else float(beta)
    if b == 0 or abs(a) in (0.0, 1.0):
        return []
    est = math.log(abs(b)) / math.log(abs(a))
    c = round(est)
    return [c + k for k in (0, -1, 1, -2, 2)]


def orbit_index(h: ProjMap, p: ProjPoint, q: ProjPoint) -> Optional[int]:
    """The unique n with h^n p = q for p on an infinite orbit, or None when q
    is not on the orbit.  Raises OrbitUnresolved when the spectrum of h is
    not resolved over the supported fields."""
    if p == q:
        return 0
    jd = jordan_data(h)
    if jd is None:
        raise OrbitUnresolved("spectrum of the projective part is not resolved")
    cp = _coords(jd, p.coords)
    cq = _coords(jd, q.coords)
    tops_p = [_top(v) for _, v in cp]
    tops_q = [_top(v) for _, v in cq]
    if tops_p != tops_q:
        return None  # the M-invariant filtration pattern must agree
    candidates: list[int] = []
    # linear information inside a Jordan block
    for (lam, vp), (_, vq), t in zip(cp, cq, tops_p):
        if t is not None and t >= 1:
            n = lam * (vq[t - 1] / vq[t] - vp[t - 1] / vp[t])
            ni = _as_integer(n)
            if ni is None:
                return None
            candidates = [ni]
            break
    if not candidates:
        live = [(lam, vp[t], vq[t]) for (lam, vp), (_, vq), t in zip(cp, cq, tops_p)
                if t is not None]
        pairs = [(x, y) for i, x in enumerate(live) for y in live[i + 1:]
                 if not _is_root_of_unity(x[0] / y[0])]
        if not pairs:
            return None
        (l1, a1, b1), (l2, a2, b2) = pairs[0]
        candidates = _solve_power(l1 / l2, (b1 * a2) / (b2 * a1))
    for n in candidates:
        if iterate(h, p, n) == q:
            return n
    return None


def locate_on_orbit(h: ProjMap, p: ProjPoint, points, walk: Optional[OrbitWalk] = None
                    ) -> dict:
    """Map each of ``points`` lying on the <h>-orbit of p to its orbit index
    (indices modulo the period for finite orbits)."""
    walk = walk or orbit_walk(h, p)
    out = {}
    if walk.period is not None:
        pos = {x: i for i, x in enumerate(walk.points)}
        for q in points:
            if q in pos:
                out[q] = pos[q]
        return out
    for q in points:
        n = orbit_index(h, p, q)
        if n is not None:
            out[q] = n
    return out
