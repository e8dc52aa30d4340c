"""Hypothesis strategies shared across the test modules."""

from fractions import Fraction

from hypothesis import strategies as st

from frechet.exppoly import ExpPoly, Frequency, Polynomial
from frechet.scalar import Scalar

small = st.integers(-6, 6)
fractions = st.fractions(min_value=-8, max_value=8, max_denominator=6)


@st.composite
def scalars(draw, complex_ok=True):
    im = draw(fractions) if complex_ok and draw(st.booleans()) else Fraction(0)
    return Scalar(draw(fractions), im)


nonzero_scalars = scalars().filter(bool)

BASES = [Scalar(1), Scalar(2), Scalar(-1), Scalar(1, 1), Scalar(Fraction(1, 2)), Scalar(0, 1)]


def vectors(d, lo=-5, hi=5):
    return st.lists(st.integers(lo, hi), min_size=d, max_size=d).map(tuple)


@st.composite
def polynomials(draw, d=1, max_degree=3):
    terms = {}
    for _ in range(draw(st.integers(0, 4))):
        exps = draw(st.lists(st.integers(0, max_degree), min_size=d, max_size=d))
        if sum(exps) <= max_degree:
            terms[tuple(exps)] = draw(scalars())
    return Polynomial(d, terms)


@st.composite
def exppolys(draw, d=1, max_degree=3, bases=BASES):
    parts = {}
    for _ in range(draw(st.integers(0, 3))):
        freq = Frequency(tuple(draw(st.sampled_from(bases)) for _ in range(d)))
        poly = draw(polynomials(d, max_degree))
        parts[freq] = parts[freq] + poly if freq in parts else poly
    return ExpPoly(d, parts)
