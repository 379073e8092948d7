"""Exact scalars and absolute values.

Three kinds of field elements are used throughout the package:

* ``fractions.Fraction`` for the rationals,
* :class:`QuadExt` for real quadratic fields Q(sqrt(d)),
* :class:`FFElem` for finite fields GF(p^k) (prime fields in practice).

Arithmetic on :class:`QuadExt` demotes to ``Fraction`` whenever the
irrational part vanishes, so a rational value has exactly one
representation and canonical forms stay unique.

Absolute values come from a :class:`Place`.  p-adic places return exact
rationals; real places return :class:`CertifiedReal`, the non-negative
square root of an exact field element, which is compared exactly by sign
computations in the field.
"""
from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Union

import mpmath
import sympy

__all__ = [
    "QuadExt", "FiniteField", "FFElem", "Place", "CertifiedReal", "Cmp",
    "RationalField", "QuadraticField", "QQ",
    "padic_valuation", "abs_value", "compare_abs", "real_sign",
    "parse_scalar", "format_scalar", "scalar_key", "is_prime",
    "IncompatiblePlace",
]


class IncompatiblePlace(ValueError):
    """Raised when a scalar is paired with a place that cannot measure it."""


@lru_cache(maxsize=4096)
def is_prime(n: int) -> bool:
    return n >= 2 and bool(sympy.isprime(n))


def _squarefree(d: int) -> bool:
    return d > 1 and all(e == 1 for e in sympy.factorint(d).values())


# ---------------------------------------------------------------------------
# Q(sqrt d)
# ---------------------------------------------------------------------------

def _quad(a: Fraction, b: Fraction, d: int):
    if b == 0:
        return a
    return QuadExt(a, b, d)


class QuadExt:
    """Element a + b*sqrt(d) of a real quadratic field, with b != 0.

    Construct through arithmetic or :meth:`make`; the constructor itself
    does not demote and is meant for values already known to be irrational.
    """

    __slots__ = ("a", "b", "d")

    def __init__(self, a, b, d: int):
        self.a = Fraction(a)
        self.b = Fraction(b)
        self.d = int(d)

    @staticmethod
    def make(a, b, d: int):
        if not _squarefree(d):
            raise ValueError(f"d={d} must be a square-free integer > 1")
        return _quad(Fraction(a), Fraction(b), d)

    @staticmethod
    def sqrt(d: int):
        return QuadExt.make(0, 1, d)

    def _split(self, other):
        if isinstance(other, QuadExt):
            if other.d != self.d:
                raise ValueError(f"mixing Q(sqrt {self.d}) with Q(sqrt {other.d})")
            return other.a, other.b
        if isinstance(other, (int, Fraction)):
            return Fraction(other), Fraction(0)
        return None

    def __add__(self, other):
        s = self._split(other)
        if s is None:
            return NotImplemented
        return _quad(self.a + s[0], self.b + s[1], self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadExt(-self.a, -self.b, self.d)

    def __sub__(self, other):
        s = self._split(other)
        if s is None:
            return NotImplemented
        return _quad(self.a - s[0], self.b - s[1], self.d)

    def __rsub__(self, other):
        s = self._split(other)
        if s is None:
            return NotImplemented
        return _quad(s[0] - self.a, s[1] - self.b, self.d)

    def __mul__(self, other):
        s = self._split(other)
        if s is None:
            return NotImplemented
        c, e = s
        return _quad(self.a * c + self.d * self.b * e, self.a * e + self.b * c, self.d)

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        return self.a * self.a - self.d * self.b * self.b

    def conjugate(self):
        return QuadExt(self.a, -self.b, self.d)

    def inverse(self):
        n = self.norm()
        return QuadExt(self.a / n, -self.b / n, self.d)

    def __truediv__(self, other):
        if isinstance(other, QuadExt):
            return self * other.inverse()
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero in Q(sqrt d)")
            return QuadExt(self.a / other, self.b / other, self.d)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.inverse() * other
        return NotImplemented

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result, base = Fraction(1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, QuadExt):
            return (self.a, self.b, self.d) == (other.a, other.b, other.d)
        if isinstance(other, (int, Fraction)):
            return False
        return NotImplemented

    def __hash__(self):
        return hash(("quad", self.a, self.b, self.d))

    def __bool__(self):
        return True

    def embed(self, sign: int = 1) -> float:
        return float(self.a) + sign * float(self.b) * math.sqrt(self.d)

    def __repr__(self):
        return f"QuadExt({format_scalar(self)})"


# ---------------------------------------------------------------------------
# GF(p^k)
# ---------------------------------------------------------------------------

def _poly_irreducible(coeffs: tuple[int, ...], p: int) -> bool:
    """Monic polynomial (low-to-high coeffs) has no factor of degree <= deg/2."""
    x = sympy.Symbol("x")
    poly = sympy.Poly(list(reversed(coeffs)), x, modulus=p)
    return poly.is_irreducible


@dataclass(frozen=True)
class FiniteField:
    """GF(p^k); elements are encoded as integers whose base-p digits are
    the coefficients of a polynomial in the generator of ``modulus``."""

    p: int
    k: int = 1

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if self.k < 1:
            raise ValueError("extension degree must be >= 1")
        if self.k > 1 and self.order > 1 << 16:
            raise ValueError("extension fields are supported only up to order 65536")

    @property
    def order(self) -> int:
        return self.p ** self.k

    @property
    def is_finite(self) -> bool:
        return True

    def __call__(self, value: int) -> "FFElem":
        if self.k == 1:
            return FFElem(self, value % self.p)
        return FFElem(self, value)

    def zero(self) -> "FFElem":
        return FFElem(self, 0)

    def one(self) -> "FFElem":
        return FFElem(self, 1)

    def coerce(self, x) -> "FFElem":
        if isinstance(x, FFElem):
            if x.field != self:
                if x.field.p == self.p and self.k % x.field.k == 0 and x.value < self.p:
                    return FFElem(self, x.value)
                raise ValueError(f"cannot coerce {x!r} into {self}")
            return x
        if isinstance(x, int):
            return FFElem(self, x % self.p)
        if isinstance(x, Fraction):
            return FFElem(self, x.numerator % self.p) / FFElem(self, x.denominator % self.p)
        raise TypeError(f"cannot coerce {x!r} into {self}")

    def elements(self) -> list["FFElem"]:
        return [FFElem(self, v) for v in range(self.order)]

    def contains(self, x) -> bool:
        return isinstance(x, FFElem) and x.field == self

    def __str__(self):
        return f"GF({self.order})"


@lru_cache(maxsize=None)
def _ext_tables(p: int, k: int):
    """Modulus, exp and log tables for GF(p^k), k > 1."""
    q = p ** k
    modulus = None
    for tail in range(p ** k):
        coeffs = tuple((tail // p ** i) % p for i in range(k)) + (1,)
        if coeffs[0] != 0 and _poly_irreducible(coeffs, p):
            modulus = coeffs
            break
    assert modulus is not None

    def mul_raw(u: int, v: int) -> int:
        a = [(u // p ** i) % p for i in range(k)]
        b = [(v // p ** i) % p for i in range(k)]
        prod = [0] * (2 * k - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    prod[i + j] = (prod[i + j] + ai * bj) % p
        for deg in range(2 * k - 2, k - 1, -1):
            c = prod[deg]
            if c:
                for i in range(k + 1):
                    prod[deg - k + i] = (prod[deg - k + i] - c * modulus[i]) % p
        return sum(prod[i] * p ** i for i in range(k))

    for g in range(2, q):
        exp = [1]
        cur = 1
        for _ in range(q - 2):
            cur = mul_raw(cur, g)
            if cur == 1:
                break
            exp.append(cur)
        if len(exp) == q - 1:
            log = {v: i for i, v in enumerate(exp)}
            return modulus, tuple(exp), log
    raise AssertionError("no primitive element found")


class FFElem:
    """Element of a finite field, stored as its integer encoding."""

    __slots__ = ("field", "value")

    def __init__(self, field: FiniteField, value: int):
        if not 0 <= value < field.order:
            raise ValueError(f"encoding {value} out of range for {field}")
        self.field = field
        self.value = value

    def _other(self, other) -> "FFElem | None":
        if isinstance(other, FFElem):
            if other.field != self.field:
                raise ValueError(f"mixing {self.field} with {other.field}")
            return other
        if isinstance(other, int):
            return FFElem(self.field, other % self.field.p)
        return None

    def _digits_op(self, u: int, v: int, sign: int) -> int:
        p, k = self.field.p, self.field.k
        if k == 1:
            return (u + sign * v) % p
        out = 0
        for i in range(k):
            du = (u // p ** i) % p
            dv = (v // p ** i) % p
            out += ((du + sign * dv) % p) * p ** i
        return out

    def __add__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return FFElem(self.field, self._digits_op(self.value, o.value, 1))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return FFElem(self.field, self._digits_op(self.value, o.value, -1))

    def __rsub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return o - self

    def __neg__(self):
        return FFElem(self.field, self._digits_op(0, self.value, -1))

    def __mul__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        f = self.field
        if f.k == 1:
            return FFElem(f, self.value * o.value % f.p)
        if self.value == 0 or o.value == 0:
            return FFElem(f, 0)
        _, exp, log = _ext_tables(f.p, f.k)
        return FFElem(f, exp[(log[self.value] + log[o.value]) % (f.order - 1)])

    __rmul__ = __mul__

    def inverse(self) -> "FFElem":
        f = self.field
        if self.value == 0:
            raise ZeroDivisionError(f"zero has no inverse in {f}")
        if f.k == 1:
            return FFElem(f, pow(self.value, -1, f.p))
        _, exp, log = _ext_tables(f.p, f.k)
        return FFElem(f, exp[(-log[self.value]) % (f.order - 1)])

    def __truediv__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result, base = FFElem(self.field, 1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, FFElem):
            return self.field == other.field and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.field.p and (self.field.k == 1 or self.value < self.field.p)
        return NotImplemented

    def __hash__(self):
        return hash(("ff", self.field.p, self.field.k, self.value))

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"FFElem({self.value} mod {self.field.order})"


# ---------------------------------------------------------------------------
# field descriptors for infinite fields
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RationalField:
    @property
    def is_finite(self) -> bool:
        return False

    def zero(self):
        return Fraction(0)

    def one(self):
        return Fraction(1)

    def coerce(self, x):
        if isinstance(x, (int, Fraction)):
            return Fraction(x)
        raise TypeError(f"{x!r} is not rational")

    def contains(self, x) -> bool:
        return isinstance(x, (int, Fraction))

    def __str__(self):
        return "QQ"


@dataclass(frozen=True)
class QuadraticField:
    d: int

    def __post_init__(self):
        if not _squarefree(self.d):
            raise ValueError(f"d={self.d} must be a square-free integer > 1")

    @property
    def is_finite(self) -> bool:
        return False

    def zero(self):
        return Fraction(0)

    def one(self):
        return Fraction(1)

    def coerce(self, x):
        if isinstance(x, (int, Fraction)):
            return Fraction(x)
        if isinstance(x, QuadExt) and x.d == self.d:
            return x
        raise TypeError(f"{x!r} is not in Q(sqrt {self.d})")

    def contains(self, x) -> bool:
        return isinstance(x, (int, Fraction)) or (isinstance(x, QuadExt) and x.d == self.d)

    def __str__(self):
        return f"QQ(sqrt {self.d})"


QQ = RationalField()


# ---------------------------------------------------------------------------
# places and absolute values
# ---------------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class Place:
    """An absolute value: a real embedding (sqrt d -> sign*sqrt d) or |.|_q."""

    kind: str
    sign: int = 1
    prime: int = 0

    def __post_init__(self):
        if self.kind == "real":
            if self.sign not in (1, -1) or self.prime:
                raise ValueError("real place takes sign +1 or -1")
        elif self.kind == "padic":
            if not is_prime(self.prime):
                raise ValueError(f"{self.prime} is not prime")
        else:
            raise ValueError(f"unknown place kind {self.kind!r}")

    @staticmethod
    def real(sign: int = 1) -> "Place":
        return Place("real", sign)

    @staticmethod
    def padic(q: int) -> "Place":
        return Place("padic", 1, q)

    @property
    def archimedean(self) -> bool:
        return self.kind == "real"

    def __str__(self):
        if self.kind == "real":
            return "real" if self.sign == 1 else "real-"
        return f"padic({self.prime})"

    @staticmethod
    def parse(text: str) -> "Place":
        text = text.strip()
        if text in ("real", "real+"):
            return Place.real(1)
        if text == "real-":
            return Place.real(-1)
        m = re.fullmatch(r"padic\((\d+)\)", text)
        if m:
            return Place.padic(int(m.group(1)))
        raise ValueError(f"bad place literal {text!r}")


INFINITY = math.inf


def padic_valuation(x, q: int):
    """v_q(x) for rational x; ``math.inf`` for zero."""
    if not is_prime(q):
        raise ValueError(f"{q} is not prime")
    if isinstance(x, (QuadExt, FFElem)):
        raise IncompatiblePlace("p-adic valuations are defined on rationals only")
    x = Fraction(x)
    if x == 0:
        return INFINITY
    v = 0
    n, dd = abs(x.numerator), x.denominator
    while n % q == 0:
        n //= q
        v += 1
    while dd % q == 0:
        dd //= q
        v -= 1
    return v


def real_sign(x, sign: int = 1) -> int:
    """Exact sign of x under the real embedding sqrt d -> sign*sqrt d."""
    if isinstance(x, (int, Fraction)):
        return (x > 0) - (x < 0)
    if isinstance(x, QuadExt):
        a, b = x.a, x.b * sign
        sa, sb = (a > 0) - (a < 0), (b > 0) - (b < 0)
        if sa == 0:
            return sb
        if sa == sb:
            return sa
        # opposite signs: |a| vs |b| sqrt d
        return sa if a * a > x.d * b * b else sb
    raise IncompatiblePlace(f"{x!r} has no real embedding")


class CertifiedReal:
    """Non-negative real number sqrt(square), with ``square`` exact in
    Q or Q(sqrt d) under a fixed embedding.

    Equality and ordering are decided exactly; ``float`` and
    :meth:`interval` exist for reporting only.
    """

    __slots__ = ("square", "sign")

    def __init__(self, square, sign: int = 1):
        if real_sign(square, sign) < 0:
            raise ValueError("square of a real absolute value must be >= 0")
        self.square = square
        self.sign = sign

    @staticmethod
    def of(value) -> "CertifiedReal":
        """Lift a non-negative rational."""
        v = Fraction(value)
        if v < 0:
            raise ValueError("negative value")
        return CertifiedReal(v * v)

    def _sq(self, other):
        if isinstance(other, CertifiedReal):
            return other.square
        if isinstance(other, (int, Fraction)):
            if other < 0:
                raise ValueError("comparison with a negative number")
            return Fraction(other) ** 2
        return None

    def _cmp(self, other) -> int:
        sq = self._sq(other)
        if sq is None:
            raise TypeError(f"cannot compare with {other!r}")
        return real_sign(self.square - sq, self.sign)

    def __eq__(self, other):
        if self._sq(other) is None:
            return NotImplemented
        return self._cmp(other) == 0

    def __hash__(self):
        return hash(("creal", self.square))

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __mul__(self, other):
        if isinstance(other, CertifiedReal):
            return CertifiedReal(self.square * other.square, self.sign)
        if isinstance(other, (int, Fraction)) and other >= 0:
            return CertifiedReal(self.square * Fraction(other) ** 2, self.sign)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, CertifiedReal):
            return CertifiedReal(self.square / other.square, self.sign)
        if isinstance(other, (int, Fraction)) and other > 0:
            return CertifiedReal(self.square / Fraction(other) ** 2, self.sign)
        return NotImplemented

    def le_sum(self, *terms: "CertifiedReal") -> bool:
        """Exact test self <= sum(terms) for one or two terms."""
        if len(terms) == 1:
            return self <= terms[0]
        if len(terms) != 2:
            raise ValueError("le_sum supports one or two terms")
        a, b, c = self.square, terms[0].square, terms[1].square
        lhs = a - b - c
        if real_sign(lhs, self.sign) <= 0:
            return True
        # sqrt a <= sqrt b + sqrt c  <=>  (a - b - c)^2 <= 4bc  when a - b - c > 0
        return real_sign(lhs * lhs - 4 * b * c, self.sign) <= 0

    def __float__(self):
        s = self.square
        val = s.embed(self.sign) if isinstance(s, QuadExt) else float(s)
        return math.sqrt(max(val, 0.0))

    def interval(self, dps: int = 30) -> mpmath.iv.mpf:
        """Enclosing interval at ``dps`` decimal digits."""
        iv = mpmath.iv
        saved = iv.dps
        iv.dps = dps
        try:
            s = self.square
            if isinstance(s, QuadExt):
                val = (iv.mpf(s.a.numerator) / s.a.denominator
                       + self.sign * iv.mpf(s.b.numerator) / s.b.denominator * iv.sqrt(s.d))
            else:
                s = Fraction(s)
                val = iv.mpf(s.numerator) / s.denominator
            return iv.sqrt(val)
        finally:
            iv.dps = saved

    def __repr__(self):
        return f"CertifiedReal(sqrt({format_scalar(self.square)})~{float(self):.6g})"


AbsValue = Union[Fraction, CertifiedReal]


def _check_place(x, place: Place):
    if isinstance(x, FFElem):
        raise IncompatiblePlace("finite-field elements carry only the trivial absolute value")
    if place.kind == "padic" and isinstance(x, QuadExt):
        raise IncompatiblePlace("p-adic places are supported on Q only")
    if not isinstance(x, (int, Fraction, QuadExt)):
        raise IncompatiblePlace(f"unsupported scalar {x!r}")


def abs_value(x, place: Place) -> AbsValue:
    """|x| at ``place``: exact Fraction for p-adic, CertifiedReal for real."""
    _check_place(x, place)
    if place.kind == "padic":
        v = padic_valuation(x, place.prime)
        if v == INFINITY:
            return Fraction(0)
        return Fraction(place.prime) ** (-v)
    return CertifiedReal(x * x, place.sign)


class Cmp(enum.Enum):
    LT = -1
    EQ = 0
    GT = 1


def compare_abs(x, y, place: Place) -> Cmp:
    _check_place(x, place)
    _check_place(y, place)
    if place.kind == "padic":
        vx, vy = padic_valuation(x, place.prime), padic_valuation(y, place.prime)
        if vx == vy:
            return Cmp.EQ
        return Cmp.LT if vx > vy else Cmp.GT
    return Cmp(real_sign(x * x - y * y, place.sign))


# ---------------------------------------------------------------------------
# literals
# ---------------------------------------------------------------------------

_RAT = r"-?\d+(?:/\d+)?"
_QUAD_RE = re.compile(
    rf"^(?:(?P<a>{_RAT})(?P<op>[+-]))?(?:(?P<b>\d+(?:/\d+)?)\*)?sqrt\((?P<d>\d+)\)$")
_NEG_QUAD_RE = re.compile(rf"^-(?:(?P<b>\d+(?:/\d+)?)\*)?sqrt\((?P<d>\d+)\)$")
_MOD_RE = re.compile(r"^(?P<x>-?\d+)\s+mod\s+(?P<q>\d+)$")


def _prime_power(q: int) -> tuple[int, int]:
    f = sympy.factorint(q)
    if len(f) != 1:
        raise ValueError(f"{q} is not a prime power")
    (p, k), = f.items()
    return int(p), int(k)


def parse_scalar(text: str):
    """Parse an integer, ``a/b``, ``a+b*sqrt(d)`` or ``x mod q`` literal."""
    s = text.strip()
    m = _MOD_RE.match(s)
    if m:
        p, k = _prime_power(int(m.group("q")))
        field = FiniteField(p, k)
        x = int(m.group("x"))
        if k > 1 and not 0 <= x < field.order:
            raise ValueError(f"encoding {x} out of range for {field}")
        return field(x)
    compact = s.replace(" ", "")
    if re.fullmatch(_RAT, compact):
        num, _, den = compact.partition("/")
        if den and int(den) == 0:
            raise ValueError("zero denominator")
        return Fraction(int(num), int(den) if den else 1)
    m = _NEG_QUAD_RE.match(compact)
    if m:
        b = Fraction(m.group("b")) if m.group("b") else Fraction(1)
        return QuadExt.make(0, -b, int(m.group("d")))
    m = _QUAD_RE.match(compact)
    if m:
        a = Fraction(m.group("a")) if m.group("a") else Fraction(0)
        b = Fraction(m.group("b")) if m.group("b") else Fraction(1)
        if m.group("op") == "-":
            b = -b
        return QuadExt.make(a, b, int(m.group("d")))
    raise ValueError(f"bad scalar literal {text!r}")


def _fmt_rat(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def format_scalar(x) -> str:
    """Canonical literal; ``parse_scalar(format_scalar(x)) == x``."""
    if isinstance(x, FFElem):
        return f"{x.value} mod {x.field.order}"
    if isinstance(x, QuadExt):
        mag = abs(x.b)
        coef = "" if mag == 1 else f"{_fmt_rat(mag)}*"
        root = f"{coef}sqrt({x.d})"
        if x.a == 0:
            return root if x.b > 0 else f"-{root}"
        return f"{_fmt_rat(x.a)}{'+' if x.b > 0 else '-'}{root}"
    return _fmt_rat(x)


def scalar_key(x) -> tuple:
    """Deterministic total order on scalars of one field."""
    if isinstance(x, FFElem):
        return (0, x.value)
    if isinstance(x, QuadExt):
        return (1, x.a, x.b)
    return (1, Fraction(x), Fraction(0))


def field_of(values) -> object:
    """Smallest supported field descriptor containing all ``values``."""
    field = QQ
    for v in values:
        if isinstance(v, FFElem):
            return v.field
        if isinstance(v, QuadExt):
            if isinstance(field, QuadraticField) and field.d != v.d:
                raise ValueError("values from two different quadratic fields")
            field = QuadraticField(v.d)
    return field


def iter_primes_of(x) -> Iterator[int]:
    """Primes dividing numerator or denominator of a rational (small ones only)."""
    x = Fraction(x)
    for n in (abs(x.numerator), x.denominator):
        if n > 1:
            yield from sympy.primefactors(n, limit=10 ** 5)
