"""Double-double ("hi/lo") arithmetic.

A value is represented as an unevaluated sum hi + lo of two binary64 numbers
with |lo| <= ulp(hi)/2, giving roughly 32 significant decimal digits.  This is
the working precision for root refinement and partial-fraction coefficients;
everything downstream consumes the binary64 roundings.

The building blocks are the classic error-free transformations: TwoSum,
QuickTwoSum and TwoProd with a Dekker split (no fused multiply-add is assumed).
TwoProd is exact only while products stay in the normal binary64 range, so
full accuracy requires magnitudes roughly within [1e-290, 2^970]; the root
pipeline stays within [1e-200, 1e130].
"""

from __future__ import annotations

import math
from fractions import Fraction

_SPLITTER = 134217729.0  # 2^27 + 1


def two_sum(a: float, b: float) -> tuple[float, float]:
    """s, err with s = fl(a+b) and s + err = a + b exactly."""
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


def quick_two_sum(a: float, b: float) -> tuple[float, float]:
    """TwoSum specialization requiring |a| >= |b| (or a == 0)."""
    s = a + b
    err = b - (s - a)
    return s, err


def split(a: float) -> tuple[float, float]:
    t = _SPLITTER * a
    hi = t - (t - a)
    return hi, a - hi


def two_prod(a: float, b: float) -> tuple[float, float]:
    """p, err with p = fl(a*b) and p + err = a * b exactly."""
    p = a * b
    ah, al = split(a)
    bh, bl = split(b)
    err = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, err


class DoubleDouble:
    """Immutable double-double scalar.

    Normalization invariant: lo = err of quick_two_sum(hi, lo), i.e.
    |lo| <= ulp(hi)/2.  All constructors and operations maintain it.
    """

    __slots__ = ("hi", "lo")

    def __init__(self, hi: float, lo: float = 0.0):
        hi, lo = quick_two_sum(float(hi), float(lo))
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "lo", lo)

    def __setattr__(self, *_):
        raise AttributeError("DoubleDouble is immutable")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def from_int(x: int) -> "DoubleDouble":
        """Nearest double-double to an arbitrary integer (exact up to 106 bits)."""
        hi = float(x)
        lo = float(x - int(hi))
        return DoubleDouble(hi, lo)

    @staticmethod
    def from_fraction(x: Fraction) -> "DoubleDouble":
        hi = float(x)
        lo = float(x - Fraction(hi))
        return DoubleDouble(hi, lo)

    def to_fraction(self) -> Fraction:
        return Fraction(self.hi) + Fraction(self.lo)

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, DoubleDouble):
            s1, s2 = two_sum(self.hi, other.hi)
            t1, t2 = two_sum(self.lo, other.lo)
            s2 += t1
            s1, s2 = quick_two_sum(s1, s2)
            s2 += t2
            return DoubleDouble(s1, s2)
        s1, s2 = two_sum(self.hi, float(other))
        s2 += self.lo
        return DoubleDouble(s1, s2)

    __radd__ = __add__

    def __neg__(self):
        return DoubleDouble(-self.hi, -self.lo)

    def __sub__(self, other):
        if isinstance(other, DoubleDouble):
            return self + (-other)
        return self + (-float(other))

    def __rsub__(self, other):
        return (-self) + float(other)

    def __mul__(self, other):
        if isinstance(other, DoubleDouble):
            p1, p2 = two_prod(self.hi, other.hi)
            p2 += self.hi * other.lo + self.lo * other.hi
            return DoubleDouble(p1, p2)
        b = float(other)
        p1, p2 = two_prod(self.hi, b)
        p2 += self.lo * b
        return DoubleDouble(p1, p2)

    __rmul__ = __mul__

    def __truediv__(self, other):
        b = other if isinstance(other, DoubleDouble) else DoubleDouble(float(other))
        q1 = self.hi / b.hi
        r = self - b * q1
        q2 = r.hi / b.hi
        r = r - b * q2
        q3 = r.hi / b.hi
        s1, s2 = quick_two_sum(q1, q2)
        return DoubleDouble(s1, s2) + q3

    def __rtruediv__(self, other):
        return DoubleDouble(float(other)) / self

    def abs(self) -> "DoubleDouble":
        return -self if self.hi < 0.0 else self

    # -- comparisons (normalization makes lexicographic order correct) -----

    def _key(self):
        return (self.hi, self.lo)

    def __eq__(self, other):
        if isinstance(other, DoubleDouble):
            return self._key() == other._key()
        return self._key() == (float(other), 0.0)

    def __lt__(self, other):
        o = other if isinstance(other, DoubleDouble) else DoubleDouble(float(other))
        return self._key() < o._key()

    def __le__(self, other):
        return self == other or self < other

    def __gt__(self, other):
        return not self <= other

    def __ge__(self, other):
        return not self < other

    def __hash__(self):
        return hash(self._key())

    def __float__(self):
        return self.hi

    def __repr__(self):
        return f"DoubleDouble({self.hi!r}, {self.lo!r})"


class DoubleDoubleComplex:
    """Complex number with double-double real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re, im=0.0):
        object.__setattr__(
            self, "re", re if isinstance(re, DoubleDouble) else DoubleDouble(float(re))
        )
        object.__setattr__(
            self, "im", im if isinstance(im, DoubleDouble) else DoubleDouble(float(im))
        )

    def __setattr__(self, *_):
        raise AttributeError("DoubleDoubleComplex is immutable")

    @staticmethod
    def from_complex(z: complex) -> "DoubleDoubleComplex":
        return DoubleDoubleComplex(DoubleDouble(z.real), DoubleDouble(z.imag))

    def to_complex(self) -> complex:
        return complex(self.re.hi, self.im.hi)

    def conj(self) -> "DoubleDoubleComplex":
        return DoubleDoubleComplex(self.re, -self.im)

    def __add__(self, other):
        o = _coerce(other)
        return DoubleDoubleComplex(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return DoubleDoubleComplex(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return (-self) + _coerce(other)

    def __mul__(self, other):
        o = _coerce(other)
        return DoubleDoubleComplex(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _coerce(other)
        d = o.re * o.re + o.im * o.im
        num = self * o.conj()
        return DoubleDoubleComplex(num.re / d, num.im / d)

    def __rtruediv__(self, other):
        return _coerce(other) / self

    def abs2(self) -> DoubleDouble:
        return self.re * self.re + self.im * self.im

    def __eq__(self, other):
        o = _coerce(other)
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __repr__(self):
        return f"DoubleDoubleComplex({self.re!r}, {self.im!r})"


def _coerce(x) -> DoubleDoubleComplex:
    if isinstance(x, DoubleDoubleComplex):
        return x
    if isinstance(x, DoubleDouble):
        return DoubleDoubleComplex(x, DoubleDouble(0.0))
    if isinstance(x, complex):
        return DoubleDoubleComplex.from_complex(x)
    return DoubleDoubleComplex(DoubleDouble(float(x)), DoubleDouble(0.0))


def format_limb(x: float) -> str:
    """Decimal scientific form with 36 significant digits.

    36 digits is far beyond the 17 needed for binary64 round-trip, so
    float(format_limb(x)) == x bit-for-bit for any finite x.
    """
    return f"{x:.35e}"


def parse_limb(s: str) -> float:
    return float(s)


def is_normalized(x: DoubleDouble) -> bool:
    if x.lo == 0.0:
        return True
    return abs(x.lo) <= 0.5 * math.ulp(x.hi)
