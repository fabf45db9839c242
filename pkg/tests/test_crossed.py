from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from planecert.circle import Arc, CircleSet
from planecert.crossed import (
    Coefficient,
    FormalElement,
    adjoint,
    bump,
    elementary,
    isometry_pair,
    nilpotent_factorization,
    partition_of_unity,
    product,
    scaling_check,
)
from planecert.errors import CertificateMismatch, FamilyNotVerified, NotElementaryTensor
from planecert.oracle import GridSpec, evaluate, leaf_value, realize_numeric
from planecert.paradox import ParadoxFamily, paradoxical_family
from planecert.projective import IDENTITY, Mat2, ProjPoint
from planecert.regions import Cone, Crown, RegionSet, enclosing_crown, rect
from planecert.witness import FiniteSubset, squeeze_witness

from conftest import A, B

SQUARE = RegionSet.of(rect(1, Fraction(-1, 2), 2, Fraction(1, 2)))
BOX = RegionSet.of(rect(Fraction(1, 16), -8, 8, 8), rect(-8, -8, Fraction(-1, 16), 8))


def _inside(region, p):
    return True if region is None else region.contains_point(p)


def _f(name, support, plateau=None):
    return Coefficient.of_leaf(bump(name, support, plateau))


def test_product_pointwise():
    f = _f("f", RegionSet.of(rect(1, 1, 3, 3)))
    g = _f("g", RegionSet.of(rect(2, 2, 4, 4)))
    P = product(FormalElement.coeff_at(f), FormalElement.coeff_at(g))
    (m, t), = P.terms
    assert m == IDENTITY and t.coeff.support.same_points(RegionSet.of(rect(2, 2, 3, 3)))
    assert product(FormalElement.coeff_at(f), FormalElement.zero()).is_zero()


def test_cube_on_certified_crown():
    F = FiniteSubset.from_words({"a": A}, ["a"])
    C = enclosing_crown(SQUARE)
    cert = squeeze_witness(F, C, delta=A)
    K = cert.hull()
    x = FormalElement.coeff_at(_f("f", K, SQUARE)) * FormalElement.unitary(cert.gamma, "gamma")
    cube = product(product(x, x, prune=False), x, prune=False)
    (g, t), = cube.terms
    assert g == cert.gamma**3
    assert t.coeff.is_zero()
    expected = K.intersect(K.image(cert.gamma)).intersect(K.image(cert.gamma @ cert.gamma))
    assert expected.is_empty()


def test_adjoint_examples():
    f = _f("f", SQUARE)
    E = FormalElement.coeff_at(f)
    assert adjoint(E).terms[0][1].coeff.support == SQUARE
    x = elementary(A, f)
    xsx, xxs = product(adjoint(x), x), product(x, adjoint(x))
    assert xsx.terms[0][1].coeff.support.same_points(SQUARE)
    assert xxs.terms[0][1].coeff.support.same_points(SQUARE.image(A))


def test_scaling_examples():
    U = Arc.slopes(-1, 1)
    x = elementary(A, Coefficient.of_leaf(bump("f", Cone.over(U), Cone(U.closure().image(A)))))
    res = scaling_check(x)
    assert res.is_scaling and res.witness_point is not None
    # plateau = support and t.supp = supp: the clopen case is rejected
    whole = Cone(CircleSet.whole())
    y = elementary(A, Coefficient.of_leaf(bump("g", whole, whole)))
    assert not scaling_check(y).is_scaling
    # x = u_e f: x*x = xx*
    z = elementary(IDENTITY, Coefficient.of_leaf(bump("h", Cone.over(U), Cone.over(U))), "e")
    assert not scaling_check(z).is_scaling
    with pytest.raises(NotElementaryTensor):
        scaling_check(x + elementary(B, Coefficient.of_leaf(bump("k", Cone.over(U))), "b"))


def test_scaling_numeric_identity():
    U = Arc.slopes(-1, 1)
    x = elementary(A, Coefficient.of_leaf(bump("f", Cone.over(U), Cone(U.closure().image(A)))))
    xsx, xxs = product(adjoint(x), x), product(x, adjoint(x))
    grid = GridSpec(100, 0, CircleSet.whole())
    lhs = realize_numeric(product(xsx, xxs), grid).values["e"]
    rhs = realize_numeric(xxs, grid).values["e"]
    assert np.array_equal(lhs, rhs)
    p = scaling_check(x).witness_point
    assert abs(evaluate(xsx, p)["e"] - evaluate(xxs, p)["e"]) >= 0.5


def test_nilpotent_examples():
    F = FiniteSubset.from_words({"a": A}, ["a"])
    cert = squeeze_witness(F, enclosing_crown(SQUARE), delta=A)
    z = FormalElement.coeff_at(_f("z", SQUARE, SQUARE), A, "a")
    X, Y, proof = nilpotent_factorization(z, cert)
    assert proof["A_cube_empty"] and proof["B_cube_empty"] and proof["f_is_one_on_supports"]
    grid = GridSpec(100, 0, cert.crown)
    assert realize_numeric(proof["A_cube"], grid).all_zero()
    assert realize_numeric(proof["B_cube"], grid).all_zero()
    # the factors multiply back to z on the support of z
    (g, t), = product(X, Y).terms
    assert g == A and t.coeff.support.same_points(SQUARE)
    zero = nilpotent_factorization(FormalElement.zero(), cert)
    assert zero[2]["trivial"]
    with pytest.raises(CertificateMismatch):
        nilpotent_factorization(FormalElement.coeff_at(_f("w", SQUARE), B, "b"), cert)


def test_same_name_leaves_stay_distinct():
    left = _f("f", RegionSet.of(rect(1, 0, 2, 1)))
    right = _f("f", RegionSet.of(rect(3, 0, 4, 1)))
    P = left.times(right)
    assert P.is_zero()
    assert len(P.monomials[0]) == 2


def test_partition_of_unity_sums_to_one():
    cover = [Arc.slopes(-2, 2), Arc.slopes(1, -1)]
    leaves = partition_of_unity("phi", cover)
    total = Coefficient.of_leaf(leaves[0]).plus(Coefficient.of_leaf(leaves[1]))
    assert total.is_one()
    for s in (Fraction(0), Fraction(3, 2), Fraction(5), Fraction(-7, 3)):
        p = (Fraction(1), s)
        vals = [leaf_value(l, p) for l in leaves]
        assert abs(sum(vals) - 1) < 1e-12 and all(v >= 0 for v in vals)


def test_isometry_pair():
    fam = paradoxical_family(A, B, 2, 2)
    x, y, proof = isometry_pair(fam)
    assert proof["xstar_x_is_one"] and proof["ystar_y_is_one"]
    assert proof["xstar_y_terms"] == 4 and proof["xstar_y_pruned_terms"] == 0
    assert proof["xx_star_witness_nonempty"]
    table = realize_numeric(proof["xstar_y"], GridSpec(100, 0, CircleSet.whole()))
    assert table.max_abs() <= 1e-12
    p = proof["xx_star_witness_point"]
    xxs = product(x, adjoint(x))
    assert evaluate(xxs, p).get("e", 0.0) == 0.0


def test_isometry_rejects_bad_family():
    fam = paradoxical_family(A, B, 2, 2)
    bad = ParadoxFamily(1, 1, (fam.items[0], fam.items[2]), fam.power)
    with pytest.raises(FamilyNotVerified):
        isometry_pair(bad)


# -- properties ---------------------------------------------------------------

UNITS = [("e", IDENTITY), ("a", A), ("a^-1", A.inverse()), ("b", B)]


@st.composite
def elements(draw, max_terms=2):
    E = FormalElement.zero()
    for i in range(draw(st.integers(1, max_terms))):
        x0 = draw(st.fractions(Fraction(1, 4), 3, max_denominator=4))
        y0 = draw(st.fractions(-3, 2, max_denominator=4))
        w = draw(st.fractions(Fraction(1, 2), 3, max_denominator=4))
        sign = draw(st.sampled_from([1, -1]))
        supp = RegionSet.of(rect(x0, y0, x0 + w, y0 + w).image(Mat2(sign, 0, 0, sign)))
        core = RegionSet.of(rect(x0 + w / 4, y0 + w / 4, x0 + 3 * w / 4, y0 + 3 * w / 4).image(Mat2(sign, 0, 0, sign)))
        word, g = draw(st.sampled_from(UNITS))
        name = f"f{draw(st.integers(0, 10**6))}_{i}"
        E = E + FormalElement.coeff_at(_f(name, supp, core), g, word)
    return E


def _check_support(E, grid):
    table = realize_numeric(E, grid)
    for g, t in E.terms:
        vals = table.values[t.word]
        for k in np.nonzero(vals)[0]:
            assert _inside(t.coeff.support, table.points[k]), (t.word, table.points[k])


@settings(max_examples=30, deadline=None)
@given(elements(), elements())
def test_support_soundness(E1, E2):
    grid = GridSpec(100, 0, BOX)
    _check_support(product(E1, E2, prune=False), grid)
    _check_support(product(adjoint(E1), E2, prune=False), grid)


@settings(max_examples=10, deadline=None)
@given(elements(1), elements(1), elements(1))
def test_associativity(E1, E2, E3):
    left = product(product(E1, E2, prune=False), E3, prune=False)
    right = product(E1, product(E2, E3, prune=False), prune=False)
    assert sorted(g.rows() for g, _ in left.terms) == sorted(g.rows() for g, _ in right.terms)
    grid = GridSpec(60, 0, BOX)
    _check_support(left, grid)
    _check_support(right, grid)
    lsup = {g: t.coeff.support for g, t in left.terms}
    for g, t in right.terms:
        assert lsup[g].same_points(t.coeff.support)


@settings(max_examples=20, deadline=None)
@given(elements(), elements())
def test_adjoint_involution_and_reversal(E1, E2):
    back = adjoint(adjoint(E1))
    assert [(g, t.coeff.support) for g, t in back.terms] == [(g, t.coeff.support) for g, t in E1.terms]
    lhs = adjoint(product(E1, E2, prune=False))
    rhs = product(adjoint(E2), adjoint(E1), prune=False)
    assert {g for g, _ in lhs.terms} == {g for g, _ in rhs.terms}
    rs = {g: t.coeff.support for g, t in rhs.terms}
    for g, t in lhs.terms:
        assert t.coeff.support.same_points(rs[g])
