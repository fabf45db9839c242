"""Exact region algebra in the punctured plane.

Supports are over-approximated by finite unions of closed convex polygons
with exact coordinates. Intersections are computed by half-plane clipping,
so emptiness of an over-approximation is decided exactly and implies
emptiness of whatever it encloses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from .circle import Arc, CircleSet
from .errors import DegenerateCrown, OriginInRegion
from .projective import IDENTITY, Mat2, ProjPoint
from .scalar import Scalar, compare, lower, sqrt_lower, sqrt_upper, upper

__all__ = [
    "Point",
    "HalfPlane",
    "ConvexPolygon",
    "RegionSet",
    "Crown",
    "Cone",
    "linear_image",
    "intersect",
    "is_empty",
    "crown_hull",
    "arc_checks",
    "enclosing_crown",
    "rect",
    "unit_directions",
]

Point = Tuple[Scalar, Scalar]


def _cross(o: Point, a: Point, b: Point) -> Scalar:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


@dataclass(frozen=True)
class HalfPlane:
    """``{p : nx*px + ny*py <= c}``."""

    nx: Scalar
    ny: Scalar
    c: Scalar

    def value(self, p: Point) -> Scalar:
        return self.nx * p[0] + self.ny * p[1] - self.c

    def flipped(self) -> "HalfPlane":
        return HalfPlane(-self.nx, -self.ny, -self.c)


def _clip(vertices: List[Point], h: HalfPlane) -> List[Point]:
    if not vertices:
        return vertices
    vals = [h.value(p) for p in vertices]
    if all(v <= 0 for v in vals):
        return vertices
    if all(v > 0 for v in vals):
        return []
    out: List[Point] = []
    k = len(vertices)
    for i in range(k):
        p, vp = vertices[i], vals[i]
        q, vq = vertices[(i + 1) % k], vals[(i + 1) % k]
        if vp <= 0:
            out.append(p)
        if (vp < 0 < vq) or (vq < 0 < vp):
            t = vp / (vp - vq)
            out.append((p[0] + (q[0] - p[0]) * t, p[1] + (q[1] - p[1]) * t))
    return out


def _lexkey_cmp(p: Point, q: Point) -> int:
    c = compare(p[0], q[0])
    return c if c else compare(p[1], q[1])


def _normalize(vertices: Sequence[Point]) -> Tuple[Point, ...]:
    pts: List[Point] = []
    for p in vertices:
        if not pts or _lexkey_cmp(pts[-1], p) != 0:
            pts.append(p)
    while len(pts) > 1 and _lexkey_cmp(pts[0], pts[-1]) == 0:
        pts.pop()
    if len(pts) >= 3:
        area2 = sum(_cross(pts[0], pts[i], pts[i + 1]) for i in range(1, len(pts) - 1))
        if area2 == 0:
            lo = min(pts, key=_key_for_sort)
            hi = max(pts, key=_key_for_sort)
            pts = [lo, hi]
        else:
            if area2 < 0:
                pts.reverse()
            changed = True
            while changed and len(pts) > 3:
                changed = False
                for i in range(len(pts)):
                    if _cross(pts[i - 1], pts[i], pts[(i + 1) % len(pts)]) == 0:
                        del pts[i]
                        changed = True
                        break
    if len(pts) == 2 and _lexkey_cmp(pts[0], pts[1]) == 0:
        pts = pts[:1]
    if pts:
        start = min(range(len(pts)), key=lambda i: _key_for_sort(pts[i]))
        pts = pts[start:] + pts[:start]
    return tuple(pts)


class _SortKey:
    __slots__ = ("p",)

    def __init__(self, p):
        self.p = p

    def __lt__(self, other):
        return _lexkey_cmp(self.p, other.p) < 0

    def __eq__(self, other):
        return _lexkey_cmp(self.p, other.p) == 0


def _key_for_sort(p: Point) -> _SortKey:
    return _SortKey(p)


@dataclass(frozen=True)
class ConvexPolygon:
    """Closed convex polygon, counter-clockwise, lexicographically rotated.

    One or two vertices denote a degenerate polygon (a point or a segment).
    The origin must not belong to the polygon.
    """

    vertices: Tuple[Point, ...]

    def __post_init__(self):
        verts = tuple(
            tuple(v if not isinstance(v, (int, str)) else Fraction(v) for v in p) for p in self.vertices
        )
        object.__setattr__(self, "vertices", _normalize(verts))
        if len(self.vertices) >= 3:
            k = len(self.vertices)
            for i in range(k):
                if _cross(self.vertices[i - 1], self.vertices[i], self.vertices[(i + 1) % k]) < 0:
                    raise ValueError("polygon is not convex")
        if self.vertices and self.contains_point((Fraction(0), Fraction(0))):
            raise OriginInRegion(f"polygon {self.vertices} contains the origin")

    @classmethod
    def _trusted(cls, vertices: Sequence[Point]) -> "ConvexPolygon":
        obj = object.__new__(cls)
        object.__setattr__(obj, "vertices", _normalize(vertices))
        return obj

    @property
    def is_degenerate(self) -> bool:
        return len(self.vertices) < 3

    @property
    def is_void(self) -> bool:
        return not self.vertices

    def area2(self) -> Scalar:
        v = self.vertices
        if len(v) < 3:
            return Fraction(0)
        return sum(_cross(v[0], v[i], v[i + 1]) for i in range(1, len(v) - 1))

    def halfplanes(self) -> List[HalfPlane]:
        v = self.vertices
        if len(v) >= 3:
            out = []
            for i in range(len(v)):
                a, b = v[i], v[(i + 1) % len(v)]
                nx, ny = b[1] - a[1], a[0] - b[0]
                out.append(HalfPlane(nx, ny, nx * a[0] + ny * a[1]))
            return out
        if len(v) == 2:
            a, b = v
            dx, dy = b[0] - a[0], b[1] - a[1]
            line = HalfPlane(dy, -dx, dy * a[0] - dx * a[1])
            return [
                line,
                line.flipped(),
                HalfPlane(-dx, -dy, -(dx * a[0] + dy * a[1])),
                HalfPlane(dx, dy, dx * b[0] + dy * b[1]),
            ]
        (x, y), = v
        one, zero = Fraction(1), Fraction(0)
        return [
            HalfPlane(one, zero, x),
            HalfPlane(-one, zero, -x),
            HalfPlane(zero, one, y),
            HalfPlane(zero, -one, -y),
        ]

    def contains_point(self, p: Point) -> bool:
        return bool(self.vertices) and all(h.value(p) <= 0 for h in self.halfplanes())

    def bbox(self) -> Tuple[Scalar, Scalar, Scalar, Scalar]:
        xs = [p[0] for p in self.vertices]
        ys = [p[1] for p in self.vertices]
        return min(xs), min(ys), max(xs), max(ys)

    def clip(self, h: HalfPlane) -> "ConvexPolygon":
        return ConvexPolygon._trusted(_clip(list(self.vertices), h))

    def intersect(self, other: "ConvexPolygon") -> "ConvexPolygon":
        if self.is_void or other.is_void or _bbox_disjoint(self.bbox(), other.bbox()):
            return ConvexPolygon._trusted(())
        subject, clipper = (self, other) if not other.is_degenerate or self.is_degenerate else (other, self)
        verts = list(subject.vertices)
        for h in clipper.halfplanes():
            verts = _clip(verts, h)
            if not verts:
                break
        return ConvexPolygon._trusted(verts)

    def subtract(self, other: "ConvexPolygon") -> List["ConvexPolygon"]:
        """Convex pieces covering the closure of ``self - other``."""
        if self.is_void:
            return []
        if other.is_void or _bbox_disjoint(self.bbox(), other.bbox()):
            return [self]
        pieces = []
        verts = list(self.vertices)
        for h in other.halfplanes():
            outside = _clip(verts, h.flipped())
            if outside:
                pieces.append(ConvexPolygon._trusted(outside))
            verts = _clip(verts, h)
            if not verts:
                break
        return [p for p in pieces if not p.is_void]

    def image(self, g: Mat2) -> "ConvexPolygon":
        return ConvexPolygon._trusted([g.apply(p) for p in self.vertices])

    def min_norm_sq(self) -> Scalar:
        """Exact squared distance from the origin (origin is outside)."""
        v = self.vertices
        best = None
        edges = [(v[i], v[(i + 1) % len(v)]) for i in range(len(v))] if len(v) > 1 else [(v[0], v[0])]
        for a, b in edges:
            dx, dy = b[0] - a[0], b[1] - a[1]
            ll = dx * dx + dy * dy
            if ll == 0:
                d2 = a[0] * a[0] + a[1] * a[1]
            else:
                t = -(a[0] * dx + a[1] * dy) / ll
                if t <= 0:
                    q = a
                elif t >= 1:
                    q = b
                else:
                    q = (a[0] + t * dx, a[1] + t * dy)
                d2 = q[0] * q[0] + q[1] * q[1]
            if best is None or d2 < best:
                best = d2
        return best

    def max_norm_sq(self) -> Scalar:
        return max(p[0] * p[0] + p[1] * p[1] for p in self.vertices)


def _bbox_disjoint(b1, b2) -> bool:
    return b1[2] < b2[0] or b2[2] < b1[0] or b1[3] < b2[1] or b2[3] < b1[1]


def rect(x0, y0, x1, y1) -> ConvexPolygon:
    x0, y0, x1, y1 = (Fraction(v) for v in (x0, y0, x1, y1))
    return ConvexPolygon(((x0, y0), (x1, y0), (x1, y1), (x0, y1)))


@dataclass(frozen=True)
class RegionSet:
    """Finite union of convex polygons; void members are dropped."""

    polygons: Tuple[ConvexPolygon, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "polygons", tuple(p for p in self.polygons if not p.is_void))

    @classmethod
    def of(cls, *polygons: ConvexPolygon) -> "RegionSet":
        return cls(tuple(polygons))

    def is_empty(self, strict: bool = False) -> bool:
        """Without ``strict``, degenerate pieces (zero area) count as empty."""
        if strict:
            return not self.polygons
        return all(p.is_degenerate for p in self.polygons)

    def contains_point(self, p: Point) -> bool:
        return any(poly.contains_point(p) for poly in self.polygons)

    def image(self, g: Mat2) -> "RegionSet":
        return RegionSet(tuple(p.image(g) for p in self.polygons))

    def intersect(self, other: "RegionSet") -> "RegionSet":
        out = []
        for p in self.polygons:
            pb = p.bbox()
            for q in other.polygons:
                if _bbox_disjoint(pb, q.bbox()):
                    continue
                r = p.intersect(q)
                if not r.is_void:
                    out.append(r)
        return RegionSet(tuple(out))

    def union(self, other: "RegionSet") -> "RegionSet":
        return RegionSet(self.polygons + other.polygons)

    def difference(self, other: "RegionSet") -> "RegionSet":
        pieces = list(self.polygons)
        for q in other.polygons:
            nxt = []
            for p in pieces:
                nxt.extend(p.subtract(q))
            pieces = nxt
        return RegionSet(tuple(pieces))

    def issubset(self, other: "RegionSet") -> bool:
        """Containment up to sets of zero area."""
        return self.difference(other).is_empty()

    def bbox(self):
        boxes = [p.bbox() for p in self.polygons]
        return (
            min(b[0] for b in boxes),
            min(b[1] for b in boxes),
            max(b[2] for b in boxes),
            max(b[3] for b in boxes),
        )

    def same_points(self, other: "RegionSet") -> bool:
        return self.issubset(other) and other.issubset(self)


@dataclass(frozen=True)
class Crown:
    """``u^-1 {z : r1_sq <= |z|^2 <= r2_sq}`` for a unimodular frame u."""

    r1_sq: Fraction
    r2_sq: Fraction
    frame: Mat2 = IDENTITY

    def __post_init__(self):
        object.__setattr__(self, "r1_sq", Fraction(self.r1_sq))
        object.__setattr__(self, "r2_sq", Fraction(self.r2_sq))
        if not 0 < self.r1_sq < self.r2_sq:
            raise DegenerateCrown(f"need 0 < r1_sq < r2_sq, got {self.r1_sq}, {self.r2_sq}")

    def contains_point(self, p: Point) -> bool:
        x, y = self.frame.apply(p)
        n = x * x + y * y
        return self.r1_sq <= n <= self.r2_sq

    def contains_strictly(self, p: Point) -> bool:
        x, y = self.frame.apply(p)
        n = x * x + y * y
        return self.r1_sq < n < self.r2_sq

    def image(self, g: Mat2) -> "Crown":
        return Crown(self.r1_sq, self.r2_sq, self.frame @ g.inverse())

    def encloses_interior(self, region: RegionSet) -> bool:
        """Whether every polygon lies in the open crown ``r1 < |u z| < r2``."""
        for poly in region.polygons:
            framed = poly.image(self.frame)
            if not (upper(framed.max_norm_sq()) < self.r2_sq and lower(framed.min_norm_sq()) > self.r1_sq):
                return False
        return True

    def encloses(self, region: RegionSet) -> bool:
        for poly in region.polygons:
            framed = poly.image(self.frame)
            if not (upper(framed.max_norm_sq()) <= self.r2_sq and lower(framed.min_norm_sq()) >= self.r1_sq):
                return False
        return True


def enclosing_crown(region: RegionSet, frame: Mat2 = IDENTITY, slack=Fraction(1, 20)) -> Crown:
    """A crown in ``frame`` whose open interior contains ``region``.

    The exact extreme squared norms are widened by the factor ``(1+slack)^2``.
    """
    if region.is_empty(strict=True):
        raise ValueError("cannot enclose an empty region")
    framed = [p.image(frame) for p in region.polygons]
    lo = min(lower(p.min_norm_sq()) for p in framed)
    hi = max(upper(p.max_norm_sq()) for p in framed)
    widen = (1 + Fraction(slack)) ** 2
    return Crown(lo / widen, hi * widen, frame)


def unit_directions(k: int) -> List[Point]:
    """k exact rational unit vectors at angles close to ``2*pi*i/k``.

    The angle fraction ``i/k`` is reduced before approximation, so the
    directions for k are a subset of those for any multiple of k.
    """
    out = []
    for i in range(k):
        frac = Fraction(i, k)
        if frac == Fraction(1, 2):
            out.append((Fraction(-1), Fraction(0)))
            continue
        t = Fraction(math.tan(math.pi * frac)).limit_denominator(10**6)
        den = 1 + t * t
        out.append(((1 - t * t) / den, 2 * t / den))
    return out


def crown_hull(c: Crown, sides: int = 8, bits: int = 32) -> RegionSet:
    """Polygonal annulus containing the crown, as ``sides`` convex cells.

    The outer boundary is cut out by tangent lines ``e_i . z = R`` with
    rational unit normals ``e_i`` and ``R >= r2``; the inner boundary is the
    polygon with vertices ``s e_i``, ``s <= r1``, which lies inside the inner
    disk. Cell i is bounded by the rays through ``e_i`` and ``e_{i+1}``.
    """
    if sides < 8 or sides % 2:
        raise ValueError("hull needs an even number of sides >= 8")
    R = sqrt_upper(c.r2_sq, bits)
    s = sqrt_lower(c.r1_sq, bits)
    dirs = unit_directions(sides)
    cells = []
    for i in range(sides):
        e0, e1 = dirs[i], dirs[(i + 1) % sides]
        det = e0[0] * e1[1] - e0[1] * e1[0]
        corner = (R * (e1[1] - e0[1]) / det, R * (e0[0] - e1[0]) / det)
        cells.append(
            ConvexPolygon(
                (
                    (s * e0[0], s * e0[1]),
                    (R * e0[0], R * e0[1]),
                    corner,
                    (R * e1[0], R * e1[1]),
                    (s * e1[0], s * e1[1]),
                )
            )
        )
    hull = RegionSet(tuple(cells))
    if c.frame != IDENTITY:
        hull = hull.image(c.frame.inverse())
    return hull


@dataclass(frozen=True)
class Cone:
    """The radial region ``pi^-1(base)`` in ``R^2 - {0}``."""

    base: CircleSet

    @classmethod
    def over(cls, arc: Union[Arc, CircleSet]) -> "Cone":
        return cls(arc.to_set() if isinstance(arc, Arc) else arc)

    def contains_point(self, p: Point) -> bool:
        if p[0] == 0 and p[1] == 0:
            return False
        return self.base.contains(ProjPoint(*p))

    def image(self, g: Mat2) -> "Cone":
        return Cone(self.base.image(g))

    def intersect(self, other: "Cone") -> "Cone":
        return Cone(self.base & other.base)

    def union(self, other: "Cone") -> "Cone":
        return Cone(self.base | other.base)

    def difference(self, other: "Cone") -> "Cone":
        return Cone(self.base - other.base)

    def is_empty(self, strict: bool = False) -> bool:
        if strict:
            return self.base.is_empty()
        return not self.base.has_interior()

    def issubset(self, other: "Cone") -> bool:
        return self.base.issubset(other.base)

    def closure(self) -> "Cone":
        return Cone(self.base.closure())


def linear_image(region, g: Mat2):
    """Exact image of a RegionSet, polygon, Arc, CircleSet, Cone or Crown."""
    if isinstance(region, (RegionSet, ConvexPolygon, Arc, CircleSet, Cone, Crown)):
        return region.image(g)
    raise TypeError(f"cannot map {type(region).__name__}")


def intersect(r1: RegionSet, r2: RegionSet) -> RegionSet:
    return r1.intersect(r2)


def is_empty(region, strict: bool = False) -> bool:
    return region.is_empty(strict=strict)


def arc_checks(family: Sequence[Union[Arc, CircleSet]]) -> dict:
    """Cover / disjointness / properness of a family of open arcs."""
    sets = [a.to_set() if isinstance(a, Arc) else a for a in family]
    union = CircleSet.empty()
    for s in sets:
        union = union | s
    disjoint = all(
        (sets[i] & sets[j]).is_empty() for i in range(len(sets)) for j in range(i + 1, len(sets))
    )
    return {
        "covers_RP1": union.is_full(),
        "pairwise_disjoint": disjoint,
        "union_proper": union.complement().has_interior(),
    }
