"""Exact arithmetic in Q(sqrt d) for knife-edge trajectories."""

from __future__ import annotations

import math
import re
from fractions import Fraction
from numbers import Rational

K_EXACT_MAX = 200


class MixedDiscriminant(ValueError):
    pass


class ExactModeUnsupported(ValueError):
    pass


def squarefree_decompose(n: int, limit: int = 10**7) -> tuple[int, int]:
    """Write ``n = s**2 * d`` with ``d`` square-free; returns ``(s, d)``."""
    if n <= 0:
        raise ValueError("need a positive integer")
    s, d = 1, 1
    p = 2
    while p * p <= n:
        if p > limit:
            raise ExactModeUnsupported(f"cannot factor {n} within trial-division limit")
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        s *= p ** (e // 2)
        if e % 2:
            d *= p
        p += 1 if p == 2 else 2
    return s, d * n


def _frac(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, float):
        # shortest repr recovers the decimal literal the user typed
        return Fraction(repr(v))
    if isinstance(v, (int, Rational)):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v.strip())
    raise TypeError(f"cannot convert {type(v).__name__} to an exact rational")


class QuadRat:
    """``a + b*sqrt(d)`` with rational ``a, b`` and square-free ``d >= 1``."""

    __slots__ = ("a", "b", "d")

    def __init__(self, a=0, b=0, d: int = 1):
        d = int(d)
        if d < 1 or squarefree_decompose(d)[0] != 1:
            raise ValueError(f"d = {d} is not a square-free positive integer")
        a, b = _frac(a), _frac(b)
        if d == 1:
            a, b = a + b, Fraction(0)
        self.a, self.b, self.d = a, b, d

    def _coerce(self, other) -> "QuadRat":
        if isinstance(other, QuadRat):
            if other.d != self.d and other.b != 0 and self.b != 0:
                raise MixedDiscriminant(f"sqrt({self.d}) mixed with sqrt({other.d})")
            if other.d != self.d:
                if other.b == 0:
                    return QuadRat(other.a, 0, self.d)
                return other
            return other
        return QuadRat(_frac(other), 0, self.d)

    def _pair(self, other):
        o = self._coerce(other)
        if o.d != self.d:
            # self is rational: lift into the other field
            return QuadRat(self.a, 0, o.d), o
        return self, o

    def __add__(self, other):
        x, y = self._pair(other)
        return QuadRat(x.a + y.a, x.b + y.b, x.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadRat(-self.a, -self.b, self.d)

    def __sub__(self, other):
        x, y = self._pair(other)
        return QuadRat(x.a - y.a, x.b - y.b, x.d)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        x, y = self._pair(other)
        return QuadRat(x.a * y.a + x.d * x.b * y.b, x.a * y.b + x.b * y.a, x.d)

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        return self.a * self.a - self.d * self.b * self.b

    def conjugate(self) -> "QuadRat":
        return QuadRat(self.a, -self.b, self.d)

    def inverse(self) -> "QuadRat":
        if self.is_zero():
            raise ZeroDivisionError("division by zero in Q(sqrt d)")
        nrm = self.norm()
        return QuadRat(self.a / nrm, -self.b / nrm, self.d)

    def __truediv__(self, other):
        x, y = self._pair(other)
        return x * y.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def __eq__(self, other):
        try:
            return (self - other).is_zero()
        except (TypeError, MixedDiscriminant):
            return NotImplemented

    def __hash__(self):
        return hash((self.a, self.b, self.d))

    def sign(self) -> int:
        return sign(self)

    def __lt__(self, other):
        return sign(self - other) < 0

    def __le__(self, other):
        return sign(self - other) <= 0

    def __gt__(self, other):
        return sign(self - other) > 0

    def __ge__(self, other):
        return sign(self - other) >= 0

    def __abs__(self):
        return -self if sign(self) < 0 else self

    def __float__(self):
        return to_float(self)

    def __repr__(self):
        return f"QuadRat({self.a}, {self.b}, {self.d})"

    def __str__(self):
        return format_quadrat(self)


def sign(x: QuadRat) -> int:
    """Exact sign of ``a + b sqrt(d)`` via rational comparison of a**2 and d b**2."""
    sa = (x.a > 0) - (x.a < 0)
    sb = (x.b > 0) - (x.b < 0)
    if sb == 0:
        return sa
    if sa == 0 or sa == sb:
        return sb
    # opposite signs: the larger of |a| and |b| sqrt(d) wins
    diff = x.a * x.a - x.d * x.b * x.b
    if diff == 0:
        return 0
    return sa if diff > 0 else sb


def compare_to_one(x: QuadRat) -> int:
    """Ordering of ``x`` against +1: -1, 0 or +1."""
    return sign(x - 1)


def compare_to_minus_one(x: QuadRat) -> int:
    return sign(x + 1)


def _approx_same_sign(a: Fraction, b: Fraction, d: int, bits: int) -> Fraction:
    # a and b*sqrt(d) share a sign, so the relative error stays near 2**-bits
    scale = 1 << bits
    root = math.isqrt(d * scale * scale)
    return a + b * Fraction(root, scale)


def to_float(x: QuadRat) -> float:
    """Double nearest to ``a + b sqrt(d)``, immune to cancellation between the parts."""
    if x.b == 0:
        return float(x.a)
    bits = 160 + max(0, -_exponent(x.a), -_exponent(x.b))
    if x.a == 0 or (x.a > 0) == (x.b > 0):
        return float(_approx_same_sign(x.a, x.b, x.d, bits))
    # opposite signs: divide the exact norm by the cancellation-free conjugate
    nrm = x.norm()
    if nrm == 0:
        return 0.0
    return float(nrm / _approx_same_sign(x.a, -x.b, x.d, bits))


def _exponent(q: Fraction) -> int:
    if q == 0:
        return 0
    return q.numerator.bit_length() - q.denominator.bit_length()


def _fmt_rat(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_quadrat(x: QuadRat) -> str:
    """``"a/b + c/e√d"``; the radical term is omitted when zero."""
    if x.b == 0:
        return _fmt_rat(x.a)
    b = x.b
    op = "+" if b > 0 else "-"
    return f"{_fmt_rat(x.a)} {op} {_fmt_rat(abs(b))}√{x.d}"


_TERM = re.compile(
    r"""\s*(?P<sign>[+-])?\s*
        (?P<coef>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?(?:/\d+)?)?\s*
        (?:\*?\s*(?:√|sqrt)\s*\(?\s*(?P<rad>\d+)\s*\)?)?\s*""",
    re.VERBOSE,
)


def parse_quadrat(text, d: int | None = None) -> QuadRat:
    """Parse strings such as ``"-5.5 - 6.5*sqrt(41)"`` or ``"1/2 + 3/82√41"``.

    Plain numbers are accepted too; floats go through their shortest repr.
    """
    if isinstance(text, QuadRat):
        return text
    if not isinstance(text, str):
        return QuadRat(_frac(text), 0, d or 1)
    s = text.strip()
    if not s:
        raise ValueError("empty exact value")
    a = Fraction(0)
    b = Fraction(0)
    rad = None
    pos = 0
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m or m.end() == pos or (m.group("coef") is None and m.group("rad") is None):
            raise ValueError(f"cannot parse exact value {text!r}")
        if pos > 0 and m.group("sign") is None:
            raise ValueError(f"missing operator in {text!r}")
        coef = Fraction(m.group("coef")) if m.group("coef") else Fraction(1)
        if m.group("sign") == "-":
            coef = -coef
        if m.group("rad") is None:
            a += coef
        else:
            sq, sf = squarefree_decompose(int(m.group("rad")))
            if sf == 1:
                a += coef * sq
            else:
                if rad is not None and sf != rad:
                    raise MixedDiscriminant(f"{text!r} mixes radicals")
                rad = sf
                b += coef * sq
        pos = m.end()
    if rad is None:
        return QuadRat(a, 0, d or 1)
    if d is not None and d != rad:
        raise MixedDiscriminant(f"{text!r} uses sqrt({rad}) but the field is Q(sqrt {d})")
    return QuadRat(a, b, rad)


def sat_exact(x: QuadRat) -> QuadRat:
    """Unit saturation kept inside the field: the clamp values are exact ±1."""
    if compare_to_one(x) >= 0:
        return QuadRat(1, 0, x.d)
    if compare_to_minus_one(x) <= 0:
        return QuadRat(-1, 0, x.d)
    return x


def infer_discriminant(Acl) -> int:
    """Square-free ``d`` such that the eigenvalues of a rational 2x2 matrix lie in Q(sqrt d)."""
    if len(Acl) != 2:
        raise ExactModeUnsupported("exact mode supports second-order systems only")
    a11, a12 = (_frac(v) for v in Acl[0])
    a21, a22 = (_frac(v) for v in Acl[1])
    tr = a11 + a22
    det = a11 * a22 - a12 * a21
    disc = tr * tr - 4 * det
    if disc < 0:
        raise ExactModeUnsupported("complex eigenvalues are outside any real quadratic field")
    if disc == 0:
        return 1
    pq = disc.numerator * disc.denominator
    _, d = squarefree_decompose(pq)
    return d
