"""Exact SL(2,R) arithmetic and the induced action on the projective line.

Matrices carry rational entries as supplied by users; diagonalizing frames
and fixed points may live in a real quadratic field ``Q(sqrt(tr^2 - 4))``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Tuple

from .errors import NonHyperbolic, NotUnimodular
from .scalar import Interval, Quad, Scalar, compare, qsqrt, sign, to_rational

__all__ = [
    "Mat2",
    "IDENTITY",
    "MoebiusClass",
    "ProjPoint",
    "FixedPair",
    "INFINITY",
    "ZERO_SLOPE",
    "group_arith",
    "classify",
    "act_proj",
    "fixed_points",
    "diagonalize",
    "same_axis",
    "same_point",
    "proj_sin2",
    "proj_sin2_interval",
    "diag",
]


def _num(x) -> Scalar:
    return x if isinstance(x, Quad) else to_rational(x)


@dataclass(frozen=True)
class Mat2:
    """A 2x2 matrix of determinant exactly one."""

    a: Scalar
    b: Scalar
    c: Scalar
    d: Scalar

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, _num(getattr(self, name)))
        if self.a * self.d - self.b * self.c != 1:
            raise NotUnimodular(f"determinant of {self.rows()} is not 1")

    @classmethod
    def of(cls, rows: Sequence[Sequence]) -> "Mat2":
        """Build from ``[[a, b], [c, d]]`` with ints, Fractions or ``"p/q"`` strings."""
        (a, b), (c, d) = rows
        return cls(a, b, c, d)

    def rows(self) -> Tuple[Tuple[Scalar, Scalar], Tuple[Scalar, Scalar]]:
        return ((self.a, self.b), (self.c, self.d))

    @property
    def trace(self) -> Scalar:
        return self.a + self.d

    def __matmul__(self, other: "Mat2") -> "Mat2":
        return Mat2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "Mat2":
        return Mat2(self.d, -self.b, -self.c, self.a)

    def __neg__(self) -> "Mat2":
        return Mat2(-self.a, -self.b, -self.c, -self.d)

    def __pow__(self, k: int) -> "Mat2":
        if k < 0:
            return self.inverse() ** (-k)
        result, base = IDENTITY, self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def apply(self, v: Tuple[Scalar, Scalar]) -> Tuple[Scalar, Scalar]:
        x, y = v
        return (self.a * x + self.b * y, self.c * x + self.d * y)

    def is_rational(self) -> bool:
        return not any(isinstance(e, Quad) for e in (self.a, self.b, self.c, self.d))

    def is_scalar(self) -> bool:
        return self.b == 0 and self.c == 0 and self.a == self.d

    def __repr__(self):
        return f"Mat2([[{self.a}, {self.b}], [{self.c}, {self.d}]])"


IDENTITY = Mat2(1, 0, 0, 1)


def diag(lam) -> Mat2:
    return Mat2(lam, 0, 0, 1 / _num(lam))


class MoebiusClass(enum.Enum):
    IDENTITY = "Identity"
    MINUS_IDENTITY = "MinusIdentity"
    ELLIPTIC = "Elliptic"
    PARABOLIC = "Parabolic"
    HYPERBOLIC = "Hyperbolic"


def group_arith(op: str, g: Mat2, h: Optional[Mat2] = None, k: int = 1) -> Mat2:
    """``compose`` (g @ h), ``inverse`` or ``power`` (g ** k), exactly."""
    if op == "compose":
        if h is None:
            raise ValueError("compose needs two matrices")
        return g @ h
    if op == "inverse":
        return g.inverse()
    if op == "power":
        return g**k
    raise ValueError(f"unknown group operation {op!r}")


def classify(g: Mat2) -> MoebiusClass:
    if g.is_scalar():
        return MoebiusClass.IDENTITY if g.a == 1 else MoebiusClass.MINUS_IDENTITY
    t = abs(g.trace)
    c = compare(t, 2)
    if c > 0:
        return MoebiusClass.HYPERBOLIC
    if c == 0:
        return MoebiusClass.PARABOLIC
    return MoebiusClass.ELLIPTIC


@dataclass(frozen=True)
class ProjPoint:
    """A point ``[x : y]`` of RP^1 in canonical form.

    The coordinate of largest absolute value is scaled to +-1 and the first
    nonzero coordinate is made positive, so equal points in the same field
    have identical coordinates.
    """

    x: Scalar
    y: Scalar

    def __post_init__(self):
        x, y = _num(self.x), _num(self.y)
        if x == 0 and y == 0:
            raise ValueError("[0 : 0] is not a projective point")
        pivot = x if compare(abs(x), abs(y)) >= 0 else y
        x, y = x / pivot, y / pivot
        if sign(x) < 0 or (x == 0 and sign(y) < 0):
            x, y = -x, -y
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def slope(self) -> Optional[Scalar]:
        """``y/x``; ``None`` stands for the point at infinity ``[0:1]``."""
        if self.x == 0:
            return None
        return self.y / self.x

    @classmethod
    def from_slope(cls, s) -> "ProjPoint":
        if s is None:
            return INFINITY
        return cls(1, s)

    def is_rational(self) -> bool:
        return not isinstance(self.x, Quad) and not isinstance(self.y, Quad)

    def __repr__(self):
        return f"[{self.x} : {self.y}]"


INFINITY = ProjPoint(0, 1)
ZERO_SLOPE = ProjPoint(1, 0)


def same_point(p: ProjPoint, q: ProjPoint) -> bool:
    """Exact equality on RP^1, valid across quadratic fields."""
    sp, sq = p.slope, q.slope
    if sp is None or sq is None:
        return sp is None and sq is None
    return compare(sp, sq) == 0


def act_proj(g: Mat2, p: ProjPoint) -> ProjPoint:
    return ProjPoint(*g.apply((p.x, p.y)))


def proj_sin2(p: ProjPoint, q: ProjPoint) -> Scalar:
    """Squared sine of the angle between the lines p and q (same field)."""
    cross = p.x * q.y - p.y * q.x
    return cross * cross / ((p.x * p.x + p.y * p.y) * (q.x * q.x + q.y * q.y))


def proj_sin2_interval(p: ProjPoint, q: ProjPoint, bits: int = 64) -> Interval:
    """Outward enclosure of :func:`proj_sin2`, usable across fields."""
    px, py, qx, qy = (Interval.of(v, bits) for v in (p.x, p.y, q.x, q.y))
    cross = (px * qy - py * qx).square()
    den = (px.square() + py.square()) * (qx.square() + qy.square())
    return cross / den


@dataclass(frozen=True)
class FixedPair:
    attracting: ProjPoint
    repelling: ProjPoint
    eigenvalue: Scalar


def _eigenvector(g: Mat2, lam: Scalar) -> ProjPoint:
    if g.c != 0:
        return ProjPoint(lam - g.d, g.c)
    if g.b != 0:
        return ProjPoint(g.b, lam - g.a)
    return ProjPoint(1, 0) if g.a == lam else ProjPoint(0, 1)


def _require_hyperbolic(g: Mat2) -> None:
    if classify(g) is not MoebiusClass.HYPERBOLIC:
        raise NonHyperbolic(f"{g!r} has |trace| <= 2")


def fixed_points(g: Mat2) -> FixedPair:
    """Attracting/repelling fixed points and the eigenvalue of modulus > 1."""
    _require_hyperbolic(g)
    tr = g.trace
    root = qsqrt(tr * tr - 4) if not isinstance(tr, Quad) else None
    if root is None:
        # tr itself irrational: eigenvalues lie in a biquadratic field
        raise NonHyperbolic("fixed points of matrices with irrational trace are not supported")
    lam = (tr + root) / 2 if sign(tr) > 0 else (tr - root) / 2
    mu = 1 / lam
    return FixedPair(_eigenvector(g, lam), _eigenvector(g, mu), lam)


def diagonalize(h: Mat2) -> Tuple[Mat2, Scalar]:
    """Return ``(u, lam)`` with ``h == u^-1 diag(lam, 1/lam) u`` and ``|lam| > 1``.

    ``u`` sends the attracting direction to ``[1:0]`` and the repelling one
    to ``[0:1]``.
    """
    fp = fixed_points(h)
    (px, py), (qx, qy) = (fp.attracting.x, fp.attracting.y), (fp.repelling.x, fp.repelling.y)
    det = px * qy - qx * py
    u_inv = Mat2(px, qx / det, py, qy / det)
    return u_inv.inverse(), fp.eigenvalue


def same_axis(g: Mat2, h: Mat2) -> bool:
    """True iff g and h have the same (unordered) pair of fixed points."""
    fg, fh = fixed_points(g), fixed_points(h)
    if same_point(fg.attracting, fh.attracting):
        return same_point(fg.repelling, fh.repelling)
    return same_point(fg.attracting, fh.repelling) and same_point(fg.repelling, fh.attracting)


def product(mats: Iterable[Mat2]) -> Mat2:
    result = IDENTITY
    for m in mats:
        result = result @ m
    return result
