from fractions import Fraction

import pytest
from hypothesis import strategies as st

from planecert.projective import Mat2
from planecert.regions import Crown
from planecert.witness import FiniteSubset

A = Mat2(2, 0, 0, Fraction(1, 2))
B = Mat2(Fraction(5, 3), Fraction(4, 3), Fraction(4, 3), Fraction(5, 3))
GENS = {"a": A, "b": B}
TWO_GEN_WORDS = ["a", "b", "a b", "b a", "a^2", "b^2", "a b^-1", "b^-1 a"]


@pytest.fixture
def a():
    return A


@pytest.fixture
def b():
    return B


@pytest.fixture
def crown14():
    return Crown(1, 4)


@pytest.fixture
def cyclic_subset():
    return FiniteSubset.from_words({"a": A}, ["a", "a^-1"])


@pytest.fixture
def two_gen_subset():
    return FiniteSubset.from_words(GENS, TWO_GEN_WORDS)


small_int = st.integers(min_value=-6, max_value=6)
small_frac = st.fractions(min_value=-4, max_value=4, max_denominator=6)


@st.composite
def unimodular(draw, rational_entries=True):
    """Random SL(2, Q) element as a short product of elementary matrices."""
    m = Mat2(1, 0, 0, 1)
    for _ in range(draw(st.integers(1, 4))):
        kind = draw(st.sampled_from("ULD"))
        if kind == "U":
            m = m @ Mat2(1, draw(small_frac if rational_entries else small_int), 0, 1)
        elif kind == "L":
            m = m @ Mat2(1, 0, draw(small_frac if rational_entries else small_int), 1)
        else:
            lam = draw(st.fractions(min_value=Fraction(1, 3), max_value=3, max_denominator=4))
            m = m @ Mat2(lam, 0, 0, 1 / lam)
    return m


@st.composite
def hyperbolic(draw):
    u = draw(unimodular())
    lam = draw(st.sampled_from([Fraction(2), Fraction(3), Fraction(3, 2), Fraction(5, 2), Fraction(4)]))
    return u.inverse() @ Mat2(lam, 0, 0, 1 / lam) @ u


# -- acceptance reporting -----------------------------------------------------

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
