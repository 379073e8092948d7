"""Eigen-analysis of projective maps: spectra, proximality and attractor
data, root-of-unity tests, common eigenvectors, the affine-chart reduction
and the SL2 hyperbolic-element search."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

import sympy

from . import linalg
from .projgeo import ProjLine, ProjMap, ProjPoint
from .scalar import (
    CertifiedReal, FFElem, IncompatiblePlace, Place, QuadExt, abs_value,
    is_prime, iter_primes_of, padic_valuation, real_sign, scalar_key,
)
from .words import Word, commutator, enumerate_words, evaluate, generator

UNRESOLVED = "UNRESOLVED"
_X = sympy.Symbol("x")


# ---------------------------------------------------------------------------
# polynomials (coefficient lists, low degree first)
# ---------------------------------------------------------------------------

def poly_eval(coeffs: Sequence, x):
    acc = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        acc = acc * x + c
    return acc


def poly_deflate(coeffs: Sequence, r) -> list:
    """Quotient of a monic polynomial by (x - r); assumes r is a root."""
    n = len(coeffs) - 1
    out = [None] * n
    acc = coeffs[n]
    for i in range(n - 1, -1, -1):
        out[i] = acc
        acc = coeffs[i] + acc * r
    return out


def _to_sympy_poly(coeffs):
    return sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in reversed(coeffs)],
                      _X, domain="QQ")


def _from_sympy(c) -> Fraction:
    c = sympy.Rational(c)
    return Fraction(int(c.p), int(c.q))


def _rational_factors(coeffs) -> list[tuple[list[Fraction], int]]:
    """Monic irreducible factors over Q with multiplicities."""
    _, facs = _to_sympy_poly([Fraction(c) for c in coeffs]).factor_list()
    out = []
    for f, mult in facs:
        cs = [_from_sympy(c) for c in reversed(f.all_coeffs())]
        lc = cs[-1]
        out.append(([c / lc for c in cs], mult))
    return out


def _squarefree_split(n: int) -> tuple[int, int]:
    """n = s^2 * e with e square-free; returns (s, e) for n > 0."""
    s, e = 1, 1
    for p, k in sympy.factorint(n).items():
        s *= p ** (k // 2)
        if k % 2:
            e *= p
    return s, e


def _sqrt_rational(x: Fraction):
    """sqrt(x) in Q or Q(sqrt e) for positive rational x."""
    num = x.numerator * x.denominator
    s, e = _squarefree_split(num)
    coef = Fraction(s, x.denominator)
    if e == 1:
        return coef
    return QuadExt.make(Fraction(0), coef, e)


def _quadratic_roots(b, c):
    """Roots of x^2 + b x + c (rational b, c) lying in Q or a real Q(sqrt e)."""
    disc = b * b - 4 * c
    if disc < 0:
        return None
    if disc == 0:
        return [-b / 2, -b / 2]
    r = _sqrt_rational(Fraction(disc))
    return [(-b + r) / 2, (-b - r) / 2]


def newton_valuations(coeffs: Sequence[Fraction], q: int) -> list[Fraction]:
    """Valuations of all roots (with multiplicity) of a rational polynomial
    at the prime q, read off the lower Newton polygon."""
    pts = [(i, Fraction(padic_valuation(c, q))) for i, c in enumerate(coeffs) if c != 0]
    hull = []
    for p in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (y2 - y1) * (p[0] - x1) >= (p[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(p)
    vals = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        slope = (y2 - y1) / (x2 - x1)
        vals += [-slope] * (x2 - x1)
    # roots at zero (x1 = 0 missing) never occur for invertible matrices
    return sorted(vals)


# ---------------------------------------------------------------------------
# spectrum
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpectrumReport:
    char_poly: tuple
    eigenvalues: tuple  # (value or UNRESOLVED, multiplicity)
    resolved_fully: bool
    leftover: Optional[tuple] = None  # monic factor carrying the UNRESOLVED roots

    def resolved(self) -> list:
        return [(v, k) for v, k in self.eigenvalues if v is not UNRESOLVED]


def _is_rational_matrix(a) -> bool:
    return all(isinstance(x, (int, Fraction)) for row in a for x in row)


def _is_quad_matrix(a) -> bool:
    return any(isinstance(x, QuadExt) for row in a for x in row)


def _is_ff_matrix(a) -> bool:
    return isinstance(a[0][0], FFElem)


def _strip_roots(poly: list, candidates) -> tuple[list, list]:
    """Deflate ``poly`` by every candidate root, recording multiplicities."""
    found = []
    for r in candidates:
        if len(poly) <= 1:
            break
        mult = 0
        while len(poly) > 1 and poly_eval(poly, r) == 0:
            poly = poly_deflate(poly, r)
            mult += 1
        if mult:
            found.append((r, mult))
    return poly, found


def _roots_rational(cp) -> tuple[list, Optional[list]]:
    found, leftover = [], []
    for f, mult in _rational_factors(cp):
        if len(f) == 2:
            found.append((-f[0], mult))
        elif len(f) == 3:
            roots = _quadratic_roots(f[1], f[0])
            if roots is None:
                leftover.append(f)
            else:
                found += [(r, mult) for r in roots]
        else:
            leftover.append(f)
    return found, (leftover[0] if leftover else None)


def _roots_quadratic_field(cp, d: int) -> tuple[list, Optional[list]]:
    conj = [c.conjugate() if isinstance(c, QuadExt) else c for c in cp]
    norm = [Fraction(0)] * (2 * len(cp) - 1)
    for i, a in enumerate(cp):
        for j, b in enumerate(conj):
            norm[i + j] = norm[i + j] + a * b
    norm = [Fraction(c) if not isinstance(c, QuadExt) else Fraction(c.a) for c in norm]
    cands = []
    for f, _ in _rational_factors(norm):
        if len(f) == 2:
            cands.append(-f[0])
        elif len(f) == 3:
            disc = f[1] * f[1] - 4 * f[0]
            if disc > 0:
                s, e = _squarefree_split(disc.numerator * disc.denominator)
                if e == d:
                    r = QuadExt.make(Fraction(0), Fraction(s, disc.denominator), d)
                    cands += [(-f[1] + r) / 2, (-f[1] - r) / 2]
    seen, uniq = set(), []
    for c in cands:
        if c not in seen:
            seen.add(c)
            uniq.append(c)
    rest, found = _strip_roots(list(cp), sorted(uniq, key=scalar_key))
    return found, (rest if len(rest) > 1 else None)


def _roots_finite(cp) -> tuple[list, Optional[list]]:
    field_ = cp[0].field
    rest, found = _strip_roots(list(cp), field_.elements())
    return found, (rest if len(rest) > 1 else None)


@lru_cache(maxsize=4096)
def spectrum(m: ProjMap) -> SpectrumReport:
    cp = linalg.char_poly(m.matrix)
    if _is_ff_matrix(m.matrix):
        found, left = _roots_finite(cp)
    elif _is_quad_matrix(m.matrix):
        d = next(x.d for row in m.matrix for x in row if isinstance(x, QuadExt))
        found, left = _roots_quadratic_field(cp, d)
    else:
        found, left = _roots_rational([Fraction(c) for c in cp])
    found.sort(key=lambda vm: scalar_key(vm[0]))
    eig = list(found)
    if left is not None:
        eig.append((UNRESOLVED, len(left) - 1))
    return SpectrumReport(tuple(cp), tuple(eig), left is None,
                          tuple(left) if left is not None else None)


def eigenvector(a, lam) -> Optional[tuple]:
    """One eigenvector for ``lam`` (first nullspace basis vector)."""
    one = lam * 0 + 1
    n = len(a)
    shifted = [[a[i][j] - (lam if i == j else 0) for j in range(n)] for i in range(n)]
    basis = linalg.nullspace(shifted, one)
    return basis[0] if basis else None


def eigenspace(a, lam) -> list:
    one = lam * 0 + 1
    n = len(a)
    shifted = [[a[i][j] - (lam if i == j else 0) for j in range(n)] for i in range(n)]
    return linalg.nullspace(shifted, one)


# ---------------------------------------------------------------------------
# proximality
# ---------------------------------------------------------------------------

class Proximality(enum.Enum):
    NOT_PROXIMAL = "NotProximal"
    PROXIMAL = "Proximal"
    VERY_PROXIMAL = "VeryProximal"
    UNRESOLVED = "Unresolved"


@dataclass(frozen=True)
class AttractorData:
    lambda_plus: object
    lambda_minus: object
    lambda_mid: object
    p_plus: ProjPoint
    p_minus: ProjPoint
    p_mid: ProjPoint
    P_plus: ProjLine
    P_minus: ProjLine
    place: Place

    @property
    def exceptional(self) -> tuple[ProjLine, ProjLine]:
        return (self.P_plus, self.P_minus)

    def in_E(self, x: ProjPoint) -> bool:
        """Membership in E = P_+ ∪ P_-."""
        return self.P_plus.contains(x) or self.P_minus.contains(x)


@dataclass(frozen=True)
class ProximalityResult:
    kind: Proximality
    p_plus: Optional[ProjPoint] = None
    P_minus: Optional[ProjLine] = None
    attractor: Optional[AttractorData] = None
    reason: str = ""


def _size_profile(m: ProjMap, place: Place):
    """List of (size key, multiplicity, value or None) for all eigenvalues, or
    None when the sizes cannot be decided exactly.  Size keys are comparable
    within one place: CertifiedReal at real places, -valuation at p-adic."""
    rep = spectrum(m)
    if place.archimedean:
        prof = []
        for v, k in rep.resolved():
            prof.append((abs_value(v, place), k, v))
        if rep.leftover is not None:
            left = rep.leftover
            if len(left) != 3:
                return None
            c, b = left[0], left[1]
            if real_sign(b * b - 4 * c, place.sign) >= 0:
                return None  # real roots outside the supported fields
            size = CertifiedReal(c, place.sign)
            prof += [(size, 1, None), (size, 1, None)]
        return prof
    if not _is_rational_matrix(m.matrix):
        raise IncompatiblePlace("p-adic places are supported on rational matrices only")
    vals = newton_valuations([Fraction(c) for c in rep.char_poly], place.prime)
    prof = []
    for v, k in rep.resolved():
        if isinstance(v, Fraction):
            val = Fraction(padic_valuation(v, place.prime))
            prof.append((-val, k, v))
            for _ in range(k):
                vals.remove(val)
    prof += [(-val, 1, None) for val in vals]
    return prof


def _extreme(prof, top: bool):
    key = max(p[0] for p in prof) if top else min(p[0] for p in prof)
    hits = [p for p in prof if p[0] == key]
    if len(hits) == 1 and hits[0][1] == 1:
        return hits[0]
    return None


def _left_eigvec(a, lam):
    return eigenvector(linalg.transpose(a), lam)


def classify_proximality(m: ProjMap, place: Place) -> ProximalityResult:
    try:
        prof = _size_profile(m, place)
    except IncompatiblePlace as exc:
        return ProximalityResult(Proximality.UNRESOLVED, reason=str(exc))
    if prof is None:
        return ProximalityResult(Proximality.UNRESOLVED, reason="spectrum not resolved")
    top = _extreme(prof, True)
    if top is None:
        return ProximalityResult(Proximality.NOT_PROXIMAL, reason="no simple dominant eigenvalue")
    if top[2] is None:
        return ProximalityResult(Proximality.UNRESOLVED, reason="dominant eigenvalue not resolved")
    a = m.matrix
    lp = top[2]
    p_plus = ProjPoint(eigenvector(a, lp))
    P_minus = ProjLine(_left_eigvec(a, lp))
    bot = _extreme(prof, False)
    if bot is None or bot[2] is None:
        return ProximalityResult(Proximality.PROXIMAL, p_plus, P_minus,
                                 reason="inverse not proximal" if bot is None else "")
    lm = bot[2]
    mids = [p for p in prof if p is not top and p is not bot]
    if len(mids) != 1 or mids[0][2] is None:
        return ProximalityResult(Proximality.PROXIMAL, p_plus, P_minus)
    lmid = mids[0][2]
    p_minus = ProjPoint(eigenvector(a, lm))
    p_mid = ProjPoint(eigenvector(a, lmid))
    P_plus = ProjLine(_left_eigvec(a, lm))
    att = AttractorData(lp, lm, lmid, p_plus, p_minus, p_mid, P_plus, P_minus, place)
    return ProximalityResult(Proximality.VERY_PROXIMAL, p_plus, P_minus, att)


def relevant_places(ms: Sequence[ProjMap]) -> list[Place]:
    """Real embedding(s) plus p-adic places for primes in entries,
    determinants and rational eigenvalues."""
    if not ms or _is_ff_matrix(ms[0].matrix):
        return []
    if any(_is_quad_matrix(m.matrix) for m in ms):
        return [Place.real(1), Place.real(-1)]
    primes = set()
    for m in ms:
        for row in m.matrix:
            for x in row:
                if x != 0:
                    primes.update(iter_primes_of(x))
        primes.update(iter_primes_of(m.det))
        for v, _ in spectrum(m).resolved():
            if isinstance(v, Fraction) and v != 0:
                primes.update(iter_primes_of(v))
    return [Place.real(1)] + [Place.padic(q) for q in sorted(primes) if is_prime(q)]


# ---------------------------------------------------------------------------
# roots of unity
# ---------------------------------------------------------------------------

class Answer(enum.Enum):
    YES = "Yes"
    NO = "No"
    UNRESOLVED = "Unresolved"


@dataclass(frozen=True)
class RootsOfUnityResult:
    answer: Answer
    certificate: str
    order: Optional[int] = None

    def __bool__(self):
        return self.answer is Answer.YES


FINITE_ORDER_BOUND = 12


def _cyclotomic_index(f: sympy.Poly) -> Optional[int]:
    deg = f.degree()
    for n in range(1, 64):
        if sympy.totient(n) == deg and \
                sympy.Poly(sympy.cyclotomic_poly(n, _X), _X).all_coeffs() == f.all_coeffs():
            return n
    return None


def all_eigenvalues_roots_of_unity(m: ProjMap, finite_order_bound: int = FINITE_ORDER_BOUND
                                   ) -> RootsOfUnityResult:
    """Decide whether every eigenvalue of (a scalar multiple of) m is a root
    of unity.  The det-1 representative m^3/det(m) has this property iff its
    characteristic polynomial (or, over Q(sqrt d), its norm) is a product of
    cyclotomic polynomials."""
    a = m.matrix
    n = len(a)
    if _is_ff_matrix(a):
        p = a[0][0].field.order
        k = 1
        power = a
        while not linalg.is_scalar_matrix(power):
            power = linalg.matmul(power, a)
            k += 1
            if k > p ** n:
                raise AssertionError("element of PGL over a finite field without finite order")
        return RootsOfUnityResult(Answer.YES, f"FiniteOrder({k})", k)
    power = a
    for k in range(1, finite_order_bound + 1):
        if linalg.is_scalar_matrix(power):
            return RootsOfUnityResult(Answer.YES, f"FiniteOrder({k})", k)
        power = linalg.matmul(power, a)
    det = linalg.det(a)
    rep = linalg.scale(linalg.power(a, n), 1 / det) if n == 3 else \
        linalg.scale(linalg.power(a, 2), 1 / det)
    cp = linalg.char_poly(rep)
    if any(isinstance(c, QuadExt) for c in cp):
        conj = [c.conjugate() if isinstance(c, QuadExt) else c for c in cp]
        prod = [Fraction(0)] * (2 * len(cp) - 1)
        for i, x in enumerate(cp):
            for j, y in enumerate(conj):
                prod[i + j] = prod[i + j] + x * y
        cp = [Fraction(c.a) if isinstance(c, QuadExt) else Fraction(c) for c in prod]
    poly = _to_sympy_poly([Fraction(c) for c in cp])
    _, facs = poly.factor_list()
    labels = []
    for f, mult in facs:
        f = f.monic()
        idx = _cyclotomic_index(f) if all(c.is_integer for c in f.all_coeffs()) else None
        if idx is None:
            return RootsOfUnityResult(Answer.NO, f"NonCyclotomicFactor({f.as_expr()})")
        labels += [f"Phi{idx}"] * mult
    labels.sort(key=lambda s: int(s[3:]))
    return RootsOfUnityResult(Answer.YES, "CyclotomicFactorization(" + "*".join(labels) + ")")


# ---------------------------------------------------------------------------
# common eigenvectors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CommonEigenvectorResult:
    point: Optional[ProjPoint]
    conclusive: bool = True

    def __bool__(self):
        return self.point is not None


def field_eigenvalues(a, quad_d: Optional[int] = None) -> list:
    """Eigenvalues lying in the field of the entries, in descending order
    (descending real value over Q and Q(sqrt d), descending residue over GF)."""
    m = ProjMap(a)
    vals = [v for v, _ in spectrum(m).resolved()]
    if _is_ff_matrix(a):
        field_ = a[0][0].field
        vals = [v for v in vals if field_.contains(v)]
        return sorted(vals, key=scalar_key, reverse=True)
    quad_d = next((x.d for row in a for x in row if isinstance(x, QuadExt)), quad_d)
    vals = [v for v in vals if not isinstance(v, QuadExt) or v.d == quad_d]
    return sorted(vals, key=lambda v: v.embed(1) if isinstance(v, QuadExt) else float(v),
                  reverse=True)


def _common_search(ms, basis, i, quad_d):
    if not basis:
        return None
    if i == len(ms):
        return basis[0]
    a = ms[i]
    # eigenvalues are those of the normalized matrix; eigenspaces are scale-free
    for lam in field_eigenvalues(a, quad_d):
        inter = linalg.span_intersection(basis, eigenspace(a, lam), lam * 0 + 1)
        found = _common_search(ms, inter, i + 1, quad_d)
        if found is not None:
            return found
    return None


def common_eigenvector(ms: Sequence[ProjMap], quad_d: Optional[int] = None
                       ) -> CommonEigenvectorResult:
    """A point fixed by every map, searched over eigenspace intersections.

    A common eigenvector over the base field always has eigenvalues in that
    field, so enumerating field roots is complete and the answer conclusive."""
    if not ms:
        raise ValueError("need at least one map")
    mats = [m.matrix for m in ms]
    one = mats[0][0][0] * 0 + 1
    start = list(linalg.identity(len(mats[0]), one))
    v = _common_search(mats, start, 0, quad_d)
    return CommonEigenvectorResult(ProjPoint(v) if v is not None else None, True)


def common_invariant_line(ms: Sequence[ProjMap], quad_d: Optional[int] = None
                          ) -> Optional[ProjLine]:
    """A line preserved by every map (common eigenvector of the transposes)."""
    res = common_eigenvector([ProjMap(linalg.transpose(m.matrix)) for m in ms], quad_d)
    return ProjLine(res.point.coords) if res.point is not None else None


# ---------------------------------------------------------------------------
# affine chart reduction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AffineMap:
    linear: tuple  # 2x2
    translation: tuple  # 2-vector

    def __matmul__(self, other: "AffineMap") -> "AffineMap":
        lin = linalg.matmul(self.linear, other.linear)
        tr = tuple(x + y for x, y in zip(linalg.matvec(self.linear, other.translation),
                                         self.translation))
        return AffineMap(lin, tr)


def chart_basis(line: ProjLine) -> tuple:
    """Columns u1, u2 spanning ``line`` and u3 off it, as a matrix."""
    one = line.dual[0] * 0 + 1
    u1, u2 = linalg.nullspace([list(line.dual)], one)
    k = next(i for i, c in enumerate(line.dual) if c != 0)
    u3 = tuple(one if i == k else one * 0 for i in range(3))
    return linalg.transpose((u1, u2, u3))


def affine_chart_reduction(ms: Sequence[ProjMap], invariant_line: ProjLine) -> list[AffineMap]:
    for m in ms:
        if m.apply_line(invariant_line) != invariant_line:
            raise ValueError(f"{m!r} does not preserve {invariant_line!r}")
    c = chart_basis(invariant_line)
    c_inv = linalg.inverse(c)
    out = []
    for m in ms:
        g = linalg.matmul(c_inv, linalg.matmul(m.matrix, c))
        s = g[2][2]
        out.append(AffineMap(((g[0][0] / s, g[0][1] / s), (g[1][0] / s, g[1][1] / s)),
                             (g[0][2] / s, g[1][2] / s)))
    return out


# ---------------------------------------------------------------------------
# SL2 hyperbolic witness
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SL2Witness:
    word: Word
    eigenvalue: object
    place: Place
    squared: bool  # eigenvalue of the det-normalized square W^2/det W


def _sl2_words(ngens: int, word_bound: int):
    seen = set()
    for i in range(ngens):
        w = generator(i)
        seen.add(w)
        yield w
    for i in range(ngens):
        for j in range(i + 1, ngens):
            w = commutator(generator(i), generator(j))
            if len(w) <= max(word_bound, 4) and w not in seen:
                seen.add(w)
                yield w
    for w in enumerate_words(ngens, word_bound):
        if w not in seen:
            seen.add(w)
            yield w


def _mat2_places(mats) -> list[Place]:
    primes = set()
    quad = False
    for a in mats:
        for row in a:
            for x in row:
                if isinstance(x, QuadExt):
                    quad = True
                elif x != 0:
                    primes.update(iter_primes_of(x))
    if quad:
        return [Place.real(1), Place.real(-1)]
    return [Place.real(1)] + [Place.padic(q) for q in sorted(primes)]


def _normalized_eigenvalue(a, place: Place):
    """For a 2x2 matrix return (mu, squared) with mu an eigenvalue of a/sqrt(det)
    (or of a^2/det when det is not a square), if |mu| != 1 at ``place``."""
    tr = a[0][0] + a[1][1]
    det = linalg.det(a)
    t2 = tr * tr / det  # invariant of the projective class
    if isinstance(t2, QuadExt) and not place.archimedean:
        return None
    # eigenvalues of a^2/det have trace t2 - 2 and determinant 1
    T = t2 - 2
    if place.archimedean:
        if real_sign(T * T - 4, place.sign) <= 0:
            return None  # elliptic or parabolic
    else:
        if padic_valuation(T, place.prime) >= 0:
            return None
    squared = True
    # prefer an eigenvalue of a/sqrt(det) when det is a rational square
    if isinstance(det, Fraction) and det > 0 and not isinstance(tr, QuadExt):
        s = _sqrt_rational(det)
        if isinstance(s, Fraction):
            T, squared = tr / s, False
    if isinstance(T, QuadExt):
        return None
    roots = _quadratic_roots(-Fraction(T), Fraction(1))
    if roots is None:
        return None
    mu = max(roots, key=lambda r: abs_value(r, place) if place.archimedean
             else -Fraction(padic_valuation(r, place.prime)) if isinstance(r, Fraction)
             else Fraction(0))
    return mu, squared


def sl2_hyperbolic_witness(ms: Sequence, word_bound: int) -> Optional[SL2Witness]:
    """Bounded search for a word whose det-normalized eigenvalues
    {lambda, 1/lambda} have |lambda| != 1 at a supported place.

    Order: generators, commutators of generator pairs, then all reduced
    words by length and lexicographic order."""
    if word_bound < 1:
        raise ValueError("word_bound must be >= 1")
    mats = [tuple(tuple(x for x in row) for row in m) for m in ms]
    one = mats[0][0][0] * 0 + 1
    ident = linalg.identity(2, one)
    places = _mat2_places(mats)
    for w in _sl2_words(len(mats), word_bound):
        a = evaluate(w, mats, linalg.matmul, linalg.inverse, ident)
        for place in places:
            res = _normalized_eigenvalue(a, place)
            if res is not None:
                return SL2Witness(w, res[0], place, res[1])
    return None
