from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from planecert.circle import Arc, CircleSet, point_at_psi, psi
from planecert.projective import INFINITY, ZERO_SLOPE, Mat2, ProjPoint, act_proj

from conftest import A, unimodular

slopes = st.fractions(min_value=-20, max_value=20, max_denominator=9)


def test_psi_values():
    assert psi(ZERO_SLOPE) == 0
    assert psi(ProjPoint.from_slope(1)) == Fraction(1, 2)
    assert psi(ProjPoint.from_slope(-3)) == Fraction(-3, 4)
    assert psi(INFINITY) == 1


@given(slopes)
def test_point_at_psi_inverts_psi(s):
    p = ProjPoint.from_slope(s)
    assert point_at_psi(psi(p)) == p


def test_arc_image_slope_quarter():
    U = Arc.slopes(-1, 1)
    assert U.image(A) == Arc.slopes(Fraction(-1, 4), Fraction(1, 4))
    assert U.contains(ZERO_SLOPE) and not U.contains(ProjPoint.from_slope(1))


def test_arc_through_infinity():
    U = Arc.slopes(2, -2)  # from slope 2 up through infinity to slope -2
    assert U.contains(INFINITY)
    assert U.contains(ProjPoint.from_slope(5))
    assert not U.contains(ZERO_SLOPE)
    assert (U.to_set() | Arc.slopes(-2, 2).to_set()).closure().is_full()


def test_boolean_algebra():
    U, V = Arc.slopes(-1, 1).to_set(), Arc.slopes(0, 2).to_set()
    assert (U & V) == Arc.slopes(0, 1).to_set()
    assert (U - V) == CircleSet.open_arc(ProjPoint.from_slope(-1), ProjPoint.from_slope(0)) | CircleSet.singleton(
        ZERO_SLOPE
    )
    assert (U | U.complement()).is_full()
    assert U.closure() == CircleSet.closed_arc(ProjPoint.from_slope(-1), ProjPoint.from_slope(1))
    assert U.closure().interior() == U
    assert CircleSet.singleton(ZERO_SLOPE).has_interior() is False
    assert CircleSet.empty().is_empty()


@given(slopes, slopes, unimodular())
def test_image_equivariant(lo, hi, g):
    if lo == hi:
        return
    U = Arc.slopes(lo, hi)
    img = U.to_set().image(g)
    for s in (lo, hi, (lo + hi) / 2, lo - 1, hi + 1):
        p = ProjPoint.from_slope(s)
        assert img.contains(act_proj(g, p)) == U.contains(p)


@given(slopes, slopes, slopes, slopes)
def test_set_ops_agree_with_membership(a, b, c, d):
    if a == b or c == d:
        return
    U, V = Arc.slopes(a, b).to_set(), Arc.slopes(c, d).to_set()
    for s in (a, b, c, d, (a + c) / 2, (b + d) / 2, Fraction(7, 3)):
        p = ProjPoint.from_slope(s)
        assert (U & V).contains(p) == (U.contains(p) and V.contains(p))
        assert (U | V).contains(p) == (U.contains(p) or V.contains(p))
        assert (U - V).contains(p) == (U.contains(p) and not V.contains(p))
    assert (U & V).issubset(U) and U.issubset(U | V)
