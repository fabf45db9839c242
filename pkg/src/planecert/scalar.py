"""Exact scalars: rationals and elements of real quadratic fields.

Rationals are plain :class:`fractions.Fraction`. Irrational fixed-point
coordinates live in ``Q(sqrt(d))`` and are represented by :class:`Quad`.
Two numbers from the same field compare exactly by sign analysis; numbers
from different fields are first separated with outward-rounded rational
intervals whose precision doubles up to a cap, and only then (if the policy
allows) decided exactly by squaring.
"""

from __future__ import annotations

import contextlib
import contextvars
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple, Union

from .errors import FieldMismatch, IndeterminateAtPrecisionCap, ParseError

__all__ = [
    "Quad",
    "Scalar",
    "PrecisionPolicy",
    "precision",
    "current_policy",
    "to_rational",
    "qsqrt",
    "sqrt_lower",
    "sqrt_upper",
    "enclose",
    "lower",
    "upper",
    "sign",
    "compare",
    "rational_between",
    "simplest_between",
    "to_float",
    "field_of",
    "Interval",
]


def to_rational(value) -> Fraction:
    """Parse an exact rational from int, Fraction or a ``"p/q"`` string.

    Floats and bools are rejected; certificates never carry binary floats.
    """
    if isinstance(value, bool):
        raise ParseError(f"not a rational: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"malformed rational {value!r}") from exc
    raise ParseError(f"not a rational: {value!r} ({type(value).__name__})")


_SMALL_PRIMES = [p for p in range(2, 1000) if all(p % q for q in range(2, int(p**0.5) + 1))]


def _square_split(n: int) -> Tuple[int, int]:
    """Return ``(k, m)`` with ``n == k*k*m``; m is squarefree up to large primes."""
    k = 1
    for p in _SMALL_PRIMES:
        pp = p * p
        if pp > n:
            break
        while n % pp == 0:
            n //= pp
            k *= p
    r = math.isqrt(n)
    if r * r == n:
        return k * r, 1
    return k, n


class Quad:
    """``a + b*sqrt(d)`` with rational a, b and integer radicand d > 1.

    Construct through :func:`Quad.make`, which collapses to a Fraction when
    the value is rational. Instances are immutable.
    """

    __slots__ = ("a", "b", "d")

    def __init__(self, a: Fraction, b: Fraction, d: int):
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "d", d)

    def __setattr__(self, name, value):
        raise AttributeError("Quad is immutable")

    @staticmethod
    def make(a, b, d) -> "Scalar":
        a, b, d = Fraction(a), Fraction(b), Fraction(d)
        if d < 0:
            raise ValueError("negative radicand")
        if b == 0 or d == 0:
            return a
        # sqrt(p/q) = sqrt(p*q)/q
        k, m = _square_split(d.numerator * d.denominator)
        b = b * k / d.denominator
        if m == 1:
            return a + b
        return Quad(a, b, m)

    # arithmetic ---------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Quad):
            if other.d != self.d:
                raise FieldMismatch(f"Q(sqrt({self.d})) vs Q(sqrt({other.d}))")
            return other.a, other.b
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return Fraction(other), Fraction(0)
        return None

    def __add__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return Quad.make(self.a + c[0], self.b + c[1], self.d)

    __radd__ = __add__

    def __neg__(self):
        return Quad(-self.a, -self.b, self.d)

    def __pos__(self):
        return self

    def __sub__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return Quad.make(self.a - c[0], self.b - c[1], self.d)

    def __rsub__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return Quad.make(c[0] - self.a, c[1] - self.b, self.d)

    def __mul__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        x, y = c
        return Quad.make(self.a * x + self.b * y * self.d, self.a * y + self.b * x, self.d)

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        return self.a * self.a - self.b * self.b * self.d

    def conjugate(self) -> "Quad":
        return Quad(self.a, -self.b, self.d)

    def inverse(self):
        n = self.norm()
        return Quad.make(self.a / n, -self.b / n, self.d)

    def __truediv__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        if isinstance(other, Quad):
            return self * other.inverse()
        return Quad.make(self.a / c[0], self.b / c[0], self.d)

    def __rtruediv__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return self.inverse() * c[0]

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result: Scalar = Fraction(1)
        base: Scalar = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __abs__(self):
        return -self if _quad_sign(self) < 0 else self

    # comparison ---------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, Quad):
            return self.d == other.d and self.a == other.a and self.b == other.b
        if isinstance(other, (int, Fraction)):
            return False
        return NotImplemented

    def __hash__(self):
        return hash((self.a, self.b, self.d))

    def __lt__(self, other):
        return compare(self, other) < 0

    def __le__(self, other):
        return compare(self, other) <= 0

    def __gt__(self, other):
        return compare(self, other) > 0

    def __ge__(self, other):
        return compare(self, other) >= 0

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.d)

    def __repr__(self):
        return f"Quad({self.a}, {self.b}, {self.d})"

    def __str__(self):
        sign_ = "+" if self.b >= 0 else "-"
        return f"{self.a} {sign_} {abs(self.b)}*sqrt({self.d})"


Scalar = Union[Fraction, Quad]


def field_of(x) -> int:
    """Radicand of the field hosting x (1 for rationals)."""
    return x.d if isinstance(x, Quad) else 1


def _rsign(x: Fraction) -> int:
    return (x > 0) - (x < 0)


def _quad_sign(q: Quad) -> int:
    sa, sb = _rsign(q.a), _rsign(q.b)
    if sa == sb or sb == 0:
        return sa
    if sa == 0:
        return sb
    # opposite signs: the larger magnitude wins; a^2 == b^2 d is impossible
    return sa if q.a * q.a > q.b * q.b * q.d else sb


def sign(x) -> int:
    if isinstance(x, Quad):
        return _quad_sign(x)
    return _rsign(Fraction(x))


# -- precision policy ------------------------------------------------------


@dataclass(frozen=True)
class PrecisionPolicy:
    """How cross-field comparisons are refined.

    ``start_bits`` doubles until ``cap_bits``; when the interval test is still
    inconclusive, ``exact_fallback`` decides by squaring, otherwise
    :class:`IndeterminateAtPrecisionCap` is raised.
    """

    start_bits: int = 256
    cap_bits: int = 4096
    exact_fallback: bool = True


_POLICY: contextvars.ContextVar[PrecisionPolicy] = contextvars.ContextVar(
    "planecert_precision", default=PrecisionPolicy()
)


def current_policy() -> PrecisionPolicy:
    return _POLICY.get()


@contextlib.contextmanager
def precision(**changes):
    """Temporarily override fields of the active :class:`PrecisionPolicy`."""
    old = _POLICY.get()
    token = _POLICY.set(PrecisionPolicy(**{**old.__dict__, **changes}))
    try:
        yield _POLICY.get()
    finally:
        _POLICY.reset(token)


# -- square roots and enclosures --------------------------------------------


def qsqrt(q) -> Scalar:
    """Exact square root of a nonnegative rational."""
    q = Fraction(q)
    if q < 0:
        raise ValueError("square root of a negative rational")
    return Quad.make(0, 1, q)


def _sqrt_floor_scaled(q: Fraction, bits: int) -> Tuple[int, int, bool]:
    # sqrt(n/m) = sqrt(n*m)/m ; scale by 2**bits
    n, m = q.numerator, q.denominator
    radicand = (n * m) << (2 * bits)
    r = math.isqrt(radicand)
    return r, m << bits, r * r == radicand


def sqrt_lower(q, bits: int = 64) -> Fraction:
    """Largest dyadic-scaled rational <= sqrt(q); exact for perfect squares."""
    q = Fraction(q)
    if q < 0:
        raise ValueError("square root of a negative rational")
    r, den, _ = _sqrt_floor_scaled(q, bits)
    return Fraction(r, den)


def sqrt_upper(q, bits: int = 64) -> Fraction:
    """Rational >= sqrt(q), within 2**-bits/denominator; exact for squares."""
    q = Fraction(q)
    if q < 0:
        raise ValueError("square root of a negative rational")
    r, den, exact = _sqrt_floor_scaled(q, bits)
    return Fraction(r if exact else r + 1, den)


def enclose(x, bits: int = 64) -> Tuple[Fraction, Fraction]:
    """Rational interval ``(lo, hi)`` containing x."""
    if not isinstance(x, Quad):
        x = Fraction(x)
        return x, x
    r, den, _ = _sqrt_floor_scaled(Fraction(x.d), bits)
    lo_root, hi_root = Fraction(r, den), Fraction(r + 1, den)
    if x.b > 0:
        return x.a + x.b * lo_root, x.a + x.b * hi_root
    return x.a + x.b * hi_root, x.a + x.b * lo_root


def lower(x, bits: int = 64) -> Fraction:
    return enclose(x, bits)[0]


def upper(x, bits: int = 64) -> Fraction:
    return enclose(x, bits)[1]


def to_float(x) -> float:
    return float(x)


# -- comparison ------------------------------------------------------------


def _exact_cross_sign(A: Fraction, B: Fraction, d1: int, C: Fraction, d2: int) -> int:
    """Sign of ``A + B*sqrt(d1) + C*sqrt(d2)``."""
    u = Quad.make(A, B, d1)
    su, sv = sign(u), _rsign(C)
    if su == sv or sv == 0:
        return su
    if su == 0:
        return sv
    diff = u * u - C * C * d2
    s = sign(diff)
    if s > 0:
        return su
    if s < 0:
        return sv
    return 0


def compare(x, y) -> int:
    """Exact three-way comparison of two scalars; returns -1, 0 or 1."""
    dx, dy = field_of(x), field_of(y)
    if dx == 1 or dy == 1 or dx == dy:
        if dx == 1 and dy == 1:
            x, y = Fraction(x), Fraction(y)
            return (x > y) - (x < y)
        return sign(x - y)
    policy = _POLICY.get()
    bits = policy.start_bits
    while bits <= policy.cap_bits:
        xlo, xhi = enclose(x, bits)
        ylo, yhi = enclose(y, bits)
        if xhi < ylo:
            return -1
        if yhi < xlo:
            return 1
        bits *= 2
    if not policy.exact_fallback:
        raise IndeterminateAtPrecisionCap(
            f"cannot separate {x} and {y} within {policy.cap_bits} bits"
        )
    return _exact_cross_sign(x.a - y.a, x.b, dx, -y.b, dy)


def simplest_between(lo: Fraction, hi: Optional[Fraction]) -> Fraction:
    """Simplest rational in the open interval ``(lo, hi)``; ``hi=None`` is +inf."""
    lo = Fraction(lo)
    if hi is not None:
        hi = Fraction(hi)
        if not lo < hi:
            raise ValueError("empty interval")
        if lo < 0 < hi:
            return Fraction(0)
        if hi <= 0:
            return -simplest_between(-hi, -lo)
    elif lo < 0:
        return Fraction(0)
    candidate = math.floor(lo) + 1
    if hi is None or candidate < hi:
        return Fraction(candidate)
    whole = math.floor(lo)
    r1, r2 = lo - whole, hi - whole
    inner = simplest_between(1 / r2, None if r1 == 0 else 1 / r1)
    return whole + 1 / inner


def rational_between(x, y) -> Fraction:
    """A simple rational q with ``x < q < y`` (requires ``x < y``)."""
    if compare(x, y) >= 0:
        raise ValueError("rational_between needs x < y")
    bits = 16
    while True:
        xhi = upper(x, bits)
        ylo = lower(y, bits)
        if xhi < ylo:
            return simplest_between(xhi, ylo)
        bits *= 2


@dataclass(frozen=True)
class Interval:
    """Closed rational interval with outward-rounded arithmetic."""

    lo: Fraction
    hi: Fraction

    @classmethod
    def of(cls, x, bits: int = 64) -> "Interval":
        lo, hi = enclose(x, bits)
        return cls(lo, hi)

    def __add__(self, other):
        other = other if isinstance(other, Interval) else Interval.of(other)
        return Interval(self.lo + other.lo, self.hi + other.hi)

    def __sub__(self, other):
        other = other if isinstance(other, Interval) else Interval.of(other)
        return Interval(self.lo - other.hi, self.hi - other.lo)

    def __mul__(self, other):
        other = other if isinstance(other, Interval) else Interval.of(other)
        prods = (self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi)
        return Interval(min(prods), max(prods))

    def __truediv__(self, other):
        other = other if isinstance(other, Interval) else Interval.of(other)
        if other.lo <= 0 <= other.hi:
            raise ZeroDivisionError("interval divisor straddles zero")
        return self * Interval(1 / other.hi, 1 / other.lo)

    def square(self) -> "Interval":
        if self.lo >= 0:
            return Interval(self.lo**2, self.hi**2)
        if self.hi <= 0:
            return Interval(self.hi**2, self.lo**2)
        return Interval(Fraction(0), max(self.lo**2, self.hi**2))

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi
