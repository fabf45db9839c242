"""Finite unions of points and open arcs on the projective line.

The circular order on RP^1 is read off the pseudo-angle
``psi([1:s]) = s / (1 + |s|)`` with ``psi([0:1]) = 1``; psi is a monotone
bijection from RP^1 onto ``(-1, 1]`` and stays inside the field of the slope,
so no angles or transcendental functions are ever needed.

A :class:`CircleSet` is stored on a sorted list of breakpoints together with
membership flags for every breakpoint and for every open gap between
consecutive breakpoints. The stored form is canonical, so equal sets compare
equal.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

from .projective import INFINITY, Mat2, ProjPoint, act_proj
from .scalar import Interval, Scalar, compare, enclose, rational_between

__all__ = ["psi", "point_at_psi", "CircleSet", "Arc", "psi_interval"]


def psi(p: ProjPoint) -> Scalar:
    s = p.slope
    if s is None:
        return Fraction(1)
    return s / (1 + abs(s))


def psi_interval(p: ProjPoint, bits: int = 64) -> Interval:
    return Interval(*enclose(psi(p), bits))


def point_at_psi(value) -> ProjPoint:
    """Inverse of :func:`psi` for a value in ``(-1, 1]``; taken mod 2."""
    v = Fraction(value)
    v = (v + 1) % 2 - 1  # into [-1, 1)
    if v == -1:
        return INFINITY
    return ProjPoint(1, v / (1 - abs(v)))


def _cmp_points(p: ProjPoint, q: ProjPoint) -> int:
    return compare(psi(p), psi(q))


def _sorted_unique(points: Sequence[ProjPoint]) -> List[ProjPoint]:
    import functools

    ordered = sorted(points, key=functools.cmp_to_key(_cmp_points))
    out: List[ProjPoint] = []
    for p in ordered:
        if not out or _cmp_points(out[-1], p) != 0:
            out.append(p)
    return out


def _gap_witness(p: ProjPoint, q: ProjPoint, wraps: bool) -> ProjPoint:
    """A rational point strictly inside the ccw gap from p to q."""
    if wraps:
        pp = psi(p)
        if compare(pp, 1) < 0:
            return INFINITY
        return point_at_psi(rational_between(Fraction(-1), psi(q)))
    return point_at_psi(rational_between(psi(p), psi(q)))


@dataclass(frozen=True)
class CircleSet:
    points: Tuple[ProjPoint, ...] = ()
    point_in: Tuple[bool, ...] = ()
    gap_in: Tuple[bool, ...] = ()
    full: bool = False

    # construction -----------------------------------------------------

    @classmethod
    def empty(cls) -> "CircleSet":
        return cls()

    @classmethod
    def whole(cls) -> "CircleSet":
        return cls(full=True)

    @classmethod
    def _build(cls, points, point_in, gap_in) -> "CircleSet":
        pts, pin, gin = list(points), list(point_in), list(gap_in)
        changed = True
        while changed and pts:
            changed = False
            k = len(pts)
            for i in range(k):
                if pin[i] == gin[i - 1] == gin[i]:
                    # drop a breakpoint that separates nothing; merge its gaps
                    del pts[i], pin[i]
                    if k > 1:
                        del gin[i]
                    changed = True
                    break
        if not pts:
            return cls(full=bool(gin[0]) if gin else False)
        return cls(tuple(pts), tuple(pin), tuple(gin))

    @classmethod
    def open_arc(cls, start: ProjPoint, end: ProjPoint) -> "CircleSet":
        """Points strictly between start and end, moving in increasing psi."""
        return cls._arc(start, end, False)

    @classmethod
    def closed_arc(cls, start: ProjPoint, end: ProjPoint) -> "CircleSet":
        return cls._arc(start, end, True)

    @classmethod
    def _arc(cls, start, end, closed) -> "CircleSet":
        c = _cmp_points(start, end)
        if c == 0:
            raise ValueError("arc endpoints coincide")
        if c < 0:
            return cls._build((start, end), (closed, closed), (True, False))
        return cls._build((end, start), (closed, closed), (False, True))

    @classmethod
    def singleton(cls, p: ProjPoint) -> "CircleSet":
        return cls((p,), (True,), (False,))

    # queries ----------------------------------------------------------

    def _locate(self, p: ProjPoint) -> Tuple[str, int]:
        for i, q in enumerate(self.points):
            c = _cmp_points(p, q)
            if c == 0:
                return "point", i
            if c < 0:
                return "gap", (i - 1) % len(self.points)
        return "gap", len(self.points) - 1

    def contains(self, p: ProjPoint) -> bool:
        if not self.points:
            return self.full
        kind, i = self._locate(p)
        return self.point_in[i] if kind == "point" else self.gap_in[i]

    __contains__ = contains

    def is_empty(self) -> bool:
        return not self.points and not self.full

    def is_full(self) -> bool:
        return not self.points and self.full

    def has_interior(self) -> bool:
        return self.full or any(self.gap_in)

    def gap_witness(self, i: int) -> ProjPoint:
        k = len(self.points)
        if k == 1:
            p = self.points[0]
            return INFINITY if p != INFINITY else ProjPoint(1, 0)
        return _gap_witness(self.points[i], self.points[(i + 1) % k], i == k - 1)

    def witness(self, prefer_interior: bool = True) -> Optional[ProjPoint]:
        """Some point of the set, or None when empty."""
        if not self.points:
            return ProjPoint(1, 0) if self.full else None
        if prefer_interior:
            for i, flag in enumerate(self.gap_in):
                if flag:
                    return self.gap_witness(i)
        for i, flag in enumerate(self.point_in):
            if flag:
                return self.points[i]
        for i, flag in enumerate(self.gap_in):
            if flag:
                return self.gap_witness(i)
        return None

    def isolated_points(self) -> List[ProjPoint]:
        return [
            p
            for i, p in enumerate(self.points)
            if self.point_in[i] and not self.gap_in[i - 1] and not self.gap_in[i]
        ]

    # boolean algebra --------------------------------------------------

    def _combine(self, other: "CircleSet", op: Callable[[bool, bool], bool]) -> "CircleSet":
        merged = _sorted_unique(list(self.points) + list(other.points))
        if not merged:
            return CircleSet(full=op(self.full, other.full))
        pin = [op(self.contains(p), other.contains(p)) for p in merged]
        k = len(merged)
        gin = []
        for i in range(k):
            if k == 1:
                w = INFINITY if merged[0] != INFINITY else ProjPoint(1, 0)
            else:
                w = _gap_witness(merged[i], merged[(i + 1) % k], i == k - 1)
            gin.append(op(self.contains(w), other.contains(w)))
        return CircleSet._build(merged, pin, gin)

    def union(self, other: "CircleSet") -> "CircleSet":
        return self._combine(other, lambda x, y: x or y)

    def intersect(self, other: "CircleSet") -> "CircleSet":
        return self._combine(other, lambda x, y: x and y)

    def difference(self, other: "CircleSet") -> "CircleSet":
        return self._combine(other, lambda x, y: x and not y)

    __or__ = union
    __and__ = intersect
    __sub__ = difference

    def complement(self) -> "CircleSet":
        if not self.points:
            return CircleSet(full=not self.full)
        return CircleSet(
            self.points,
            tuple(not f for f in self.point_in),
            tuple(not f for f in self.gap_in),
        )

    def closure(self) -> "CircleSet":
        if not self.points:
            return self
        k = len(self.points)
        pin = [self.point_in[i] or self.gap_in[i - 1] or self.gap_in[i] for i in range(k)]
        return CircleSet._build(self.points, pin, self.gap_in)

    def interior(self) -> "CircleSet":
        return self.complement().closure().complement()

    def issubset(self, other: "CircleSet") -> bool:
        return self.difference(other).is_empty()

    def __le__(self, other: "CircleSet") -> bool:
        return self.issubset(other)

    def image(self, g: Mat2) -> "CircleSet":
        """Image under the projective action of g (orientation preserving)."""
        if not self.points:
            return self
        mapped = [act_proj(g, p) for p in self.points]
        k = len(mapped)
        start = 0
        for i in range(1, k):
            if _cmp_points(mapped[i], mapped[start]) < 0:
                start = i
        rot = lambda seq: tuple(seq[start:]) + tuple(seq[:start])  # noqa: E731
        return CircleSet(rot(mapped), rot(self.point_in), rot(self.gap_in))

    # measurements -----------------------------------------------------

    def psi_length(self, bits: int = 64) -> Interval:
        """Enclosure of the total psi-length (the whole circle has length 2)."""
        if not self.points:
            return Interval(Fraction(2 if self.full else 0), Fraction(2 if self.full else 0))
        total = Interval(Fraction(0), Fraction(0))
        k = len(self.points)
        for i, flag in enumerate(self.gap_in):
            if not flag:
                continue
            lo = psi_interval(self.points[i], bits)
            hi = psi_interval(self.points[(i + 1) % k], bits)
            if i == k - 1:
                hi = hi + Fraction(2)
            if k == 1:
                hi = lo + Fraction(2)
            total = total + (hi - lo)
        return total

    def components(self) -> List[Tuple[Optional[ProjPoint], Optional[ProjPoint]]]:
        """Maximal runs of covered gaps as ``(start, end)`` pairs, for display."""
        if not self.points:
            return [(None, None)] if self.full else []
        k = len(self.points)
        out = []
        for i in range(k):
            if self.gap_in[i] and not (self.gap_in[i - 1] and self.point_in[i]):
                j = i
                while self.gap_in[(j + 1) % k] and self.point_in[(j + 1) % k] and (j + 1) % k != i:
                    j = (j + 1) % k
                out.append((self.points[i], self.points[(j + 1) % k]))
        return out


@dataclass(frozen=True)
class Arc:
    """Open arc from ``start`` to ``end`` in increasing psi, with an interior witness."""

    start: ProjPoint
    end: ProjPoint
    witness: Optional[ProjPoint] = None

    def __post_init__(self):
        if _cmp_points(self.start, self.end) == 0:
            raise ValueError("arc endpoints coincide")
        s = CircleSet.open_arc(self.start, self.end)
        if self.witness is None:
            object.__setattr__(self, "witness", s.witness())
        elif not s.contains(self.witness):
            raise ValueError("witness is not inside the arc")

    @classmethod
    def through(cls, p: ProjPoint, q: ProjPoint, w: ProjPoint) -> "Arc":
        """The arc with endpoints p, q that contains w."""
        if CircleSet.open_arc(p, q).contains(w):
            return cls(p, q, w)
        if CircleSet.open_arc(q, p).contains(w):
            return cls(q, p, w)
        raise ValueError("witness coincides with an endpoint")

    @classmethod
    def slopes(cls, lo, hi) -> "Arc":
        """``{[1:s] : lo < s < hi}`` for finite rational lo < hi."""
        return cls(ProjPoint(1, lo), ProjPoint(1, hi))

    def to_set(self) -> CircleSet:
        return CircleSet.open_arc(self.start, self.end)

    def closure(self) -> CircleSet:
        return CircleSet.closed_arc(self.start, self.end)

    def complement_arc(self) -> "Arc":
        """Interior of the complement: the open arc from end back to start."""
        return Arc(self.end, self.start)

    def contains(self, p: ProjPoint) -> bool:
        return self.to_set().contains(p)

    __contains__ = contains

    def image(self, g: Mat2) -> "Arc":
        return Arc(act_proj(g, self.start), act_proj(g, self.end), act_proj(g, self.witness))
