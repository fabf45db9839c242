from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from planecert.circle import Arc, CircleSet
from planecert.errors import DegenerateCrown, OriginInRegion
from planecert.oracle import GridSpec, member_mask, sample_points
from planecert.projective import IDENTITY, Mat2, act_proj, ProjPoint
from planecert.regions import (
    Cone,
    ConvexPolygon,
    Crown,
    RegionSet,
    arc_checks,
    crown_hull,
    enclosing_crown,
    intersect,
    is_empty,
    linear_image,
    rect,
    unit_directions,
)

from conftest import A, B, unimodular


def _clip_oracle(subject, clipper):
    """Textbook Sutherland-Hodgman, written independently of the package."""
    out = list(subject)
    n = len(clipper)
    for i in range(n):
        (ax, ay), (bx, by) = clipper[i], clipper[(i + 1) % n]
        inside = lambda p: (bx - ax) * (p[1] - ay) - (by - ay) * (p[0] - ax) >= 0
        src, out = out, []
        for j in range(len(src)):
            p, q = src[j], src[(j + 1) % len(src)]
            if inside(q):
                if not inside(p):
                    out.append(_cross(p, q, (ax, ay), (bx, by)))
                out.append(q)
            elif inside(p):
                out.append(_cross(p, q, (ax, ay), (bx, by)))
        if not out:
            break
    return out


def _cross(p, q, a, b):
    x1, y1, x2, y2 = *p, *q
    x3, y3, x4, y4 = *a, *b
    den = (x1 - x2) * (y3 - y4) - (y1 - y2) * (x3 - x4)
    t = ((x1 - x3) * (y3 - y4) - (y1 - y3) * (x3 - x4)) / den
    return (x1 + t * (x2 - x1), y1 + t * (y2 - y1))


def _area2(vs):
    return sum(vs[i][0] * vs[(i + 1) % len(vs)][1] - vs[(i + 1) % len(vs)][0] * vs[i][1] for i in range(len(vs)))


def test_linear_image_examples():
    sq = RegionSet.of(rect(1, -1, 2, 1))
    assert linear_image(sq, A).same_points(RegionSet.of(rect(2, Fraction(-1, 2), 4, Fraction(1, 2))))
    assert linear_image(sq, IDENTITY) == sq
    assert linear_image(Arc.slopes(-1, 1), A) == Arc.slopes(Fraction(-1, 4), Fraction(1, 4))
    cone = Cone.over(Arc.slopes(-1, 1))
    assert linear_image(cone, A) == Cone.over(Arc.slopes(Fraction(-1, 4), Fraction(1, 4)))


def test_polygon_normal_form():
    p = ConvexPolygon(((2, 0), (2, 2), (1, 1), (1, 0)))
    q = ConvexPolygon(((1, 1), (2, 2), (2, 0), (1, 0)))  # clockwise listing
    assert p == q
    assert p.vertices[0] == (1, 0)
    with pytest.raises(OriginInRegion):
        ConvexPolygon(((-1, -1), (1, -1), (0, 1)))


def test_intersect_examples():
    r1, r2 = RegionSet.of(rect(1, 1, 2, 2)), RegionSet.of(rect(3, 3, 4, 4))
    assert is_empty(intersect(r1, r2))
    assert intersect(r1, r1).same_points(r1)
    assert is_empty(RegionSet())
    assert not is_empty(RegionSet.of(rect(1, 1, 2, 2)))


def test_intersect_against_clipping_oracle():
    big = RegionSet.of(rect(Fraction(1, 4), Fraction(1, 4), 2, 2))
    notch = RegionSet.of(rect(Fraction(1, 4), Fraction(1, 4), Fraction(3, 2), Fraction(3, 2)))
    l_shape = big.difference(notch)
    other = rect(1, 1, 3, 3)
    got = intersect(l_shape, RegionSet.of(other))
    want_area = 0
    for piece in l_shape.polygons:
        vs = _clip_oracle(list(piece.vertices), list(other.vertices))
        if len(vs) >= 3:
            want_area += _area2(vs)
    assert sum(p.area2() for p in got.polygons) == want_area == 2 * (1 - Fraction(1, 4))
    vertex_set = {v for p in got.polygons for v in p.vertices}
    assert {(2, 2), (1, Fraction(3, 2)), (Fraction(3, 2), 1), (2, 1), (1, 2)} <= vertex_set


def test_degenerate_and_strict():
    seg = RegionSet.of(rect(1, 1, 2, 2)).intersect(RegionSet.of(rect(2, 1, 3, 2)))
    assert seg.is_empty() and not seg.is_empty(strict=True)


def test_crown_and_hull():
    with pytest.raises(DegenerateCrown):
        Crown(4, 1)
    c = Crown(1, 4)
    hull = crown_hull(c, 8)
    assert len(hull.polygons) == 8
    pts = sample_points(GridSpec(100, 0, c))
    assert len(pts) == 10**4
    assert member_mask(hull, pts).all()
    # hull cells stay off the origin and hug the annulus
    assert all(p.min_norm_sq() > 0 for p in hull.polygons)


def test_hull_in_frame_is_image():
    u = Mat2(Fraction(1, 2), Fraction(1, 2), -1, 1)
    c = Crown(1, 4, u)
    assert crown_hull(c, 8).same_points(linear_image(crown_hull(Crown(1, 4), 8), u.inverse()))


def test_hulls_nest():
    c = Crown(1, 4)
    fine, coarse = crown_hull(c, 64), crown_hull(c, 8)
    assert fine.issubset(coarse)
    pts = sample_points(GridSpec(100, 3, c))
    assert member_mask(coarse, pts).all() and member_mask(fine, pts).all()


def test_hull_soundness_1e5():
    c = Crown(Fraction(9, 10), Fraction(7, 2), B)
    pts = sample_points(GridSpec(317, 1, c))
    assert len(pts) >= 10**5
    assert member_mask(crown_hull(c, 8), pts).all()


def test_unit_directions_exact():
    for k in (8, 12, 64):
        for x, y in unit_directions(k):
            assert x * x + y * y == 1
    assert set(unit_directions(8)) <= set(unit_directions(64))


def test_enclosing_crown():
    sq = RegionSet.of(rect(1, Fraction(-1, 2), 2, Fraction(1, 2)))
    c = enclosing_crown(sq)
    assert c.encloses_interior(sq)
    assert c.r1_sq < 1 and c.r2_sq > Fraction(17, 4)


def test_arc_checks_examples():
    half1, half2 = Arc.slopes(-2, 2), Arc.slopes(1, -1)
    assert arc_checks([half1, half2])["covers_RP1"]
    res = arc_checks([Arc.slopes(Fraction(-1, 4), Fraction(1, 4)), Arc.slopes(1, 2)])
    assert res["pairwise_disjoint"] and res["union_proper"] and not res["covers_RP1"]


def test_cone_algebra():
    U = Cone.over(Arc.slopes(-1, 1))
    assert U.contains_point((1, 0)) and U.contains_point((-3, 1)) and not U.contains_point((0, 1))
    assert not U.contains_point((0, 0))
    V = Cone.over(Arc.slopes(0, 2))
    assert U.intersect(V) == Cone.over(Arc.slopes(0, 1))
    assert U.difference(U).is_empty(strict=True)
    assert U.issubset(U.union(V))


# -- properties ---------------------------------------------------------------

coord = st.fractions(min_value=-6, max_value=6, max_denominator=4)


@st.composite
def off_origin_rect(draw):
    x0 = draw(st.fractions(min_value=Fraction(1, 4), max_value=4, max_denominator=4))
    y0 = draw(coord)
    w = draw(st.fractions(min_value=Fraction(1, 4), max_value=3, max_denominator=4))
    h = draw(st.fractions(min_value=Fraction(1, 4), max_value=3, max_denominator=4))
    p = rect(x0, y0, x0 + w, y0 + h)
    turn = draw(st.sampled_from([Mat2(1, 0, 0, 1), Mat2(0, -1, 1, 0), Mat2(-1, 0, 0, -1), Mat2(0, 1, -1, 0)]))
    return p.image(turn)


@given(off_origin_rect(), unimodular(), unimodular())
def test_linear_image_functorial(p, g, h):
    R = RegionSet.of(p)
    assert linear_image(linear_image(R, g), h) == linear_image(R, h @ g)
    assert linear_image(linear_image(R, g), g.inverse()) == R


@settings(max_examples=25, deadline=None)
@given(off_origin_rect(), off_origin_rect(), off_origin_rect(), st.integers(0, 2**16))
def test_intersect_commutative_associative(p, q, r, seed):
    P, Q, R = (RegionSet.of(x) for x in (p, q, r))
    box = RegionSet.of(rect(Fraction(1, 8), -10, 10, 10)).union(RegionSet.of(rect(-10, -10, Fraction(-1, 8), 10)))
    pts = sample_points(GridSpec(100, seed, box))
    lhs, rhs = intersect(P, Q), intersect(Q, P)
    assert (member_mask(lhs, pts) == member_mask(rhs, pts)).all()
    l3, r3 = intersect(intersect(P, Q), R), intersect(P, intersect(Q, R))
    assert (member_mask(l3, pts) == member_mask(r3, pts)).all()


@settings(max_examples=40, deadline=None)
@given(off_origin_rect(), unimodular(), unimodular(), unimodular())
def test_squeeze_region_identity(p, g, g2, gamma):
    K = RegionSet.of(p)
    gi = gamma.inverse()
    lhs = K.intersect(K.image(g @ gi)).intersect(K.image(g @ gi @ g2 @ gi))
    T = gamma @ g2.inverse() @ gamma @ g.inverse()
    rhs = K.image(T).intersect(K.image(gamma @ g2.inverse())).intersect(K)
    assert is_empty(lhs) == is_empty(rhs)
    assert lhs.image(T).same_points(rhs)


@given(st.fractions(min_value=Fraction(1, 9), max_value=3, max_denominator=9), st.integers(1, 4))
def test_cone_equivariance(s, k):
    cone = Cone.over(Arc.slopes(-s, s))
    g = B**k
    img = cone.image(g)
    for p in ((1, 0), (1, s / 2), (2, -s), (-1, s * 2)):
        q = (g.a * p[0] + g.b * p[1], g.c * p[0] + g.d * p[1])
        assert img.contains_point(q) == cone.contains_point(p)
