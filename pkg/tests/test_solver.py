import warnings
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from frechet.diffcalc import DiffChain, EmptyWindowError, GridFunction, GridWindow, apply_chain_grid
from frechet.exppoly import ExpPoly, Frequency
from frechet.linalg import rank
from frechet.scalar import Scalar
from frechet.solver import (NonPolynomialRhsWarning, UnderdeterminedFitWarning, ansatz_functions,
                            exppoly_fit, fit_minimal_degree, grid_in_span, monomials_up_to,
                            polynomial_ansatz_solve, stabilized_kernel, window_kernel)

x = ExpPoly.variable()
UNIT = Frequency.unit(1)


def W(a, b):
    return GridWindow((a,), (b,))


def assert_solves(space, equations, window):
    """The particular satisfies the system and the kernel vectors satisfy its homogeneous part."""
    for chain, rhs in equations:
        valid = window.valid_for(chain)
        g = apply_chain_grid(chain, GridFunction(window, space.particular))
        assert g == GridFunction.sample(rhs or ExpPoly.zero(window.num_vars), valid)
        for v in space.kernel:
            assert apply_chain_grid(chain, GridFunction(window, v)).is_zero()
    assert rank(space.kernel) == space.dimension


def test_window_kernel_third_difference():
    eqs = [(DiffChain([1, 1, 1]), None)]
    space = window_kernel(eqs, W(0, 12))
    assert space.dimension == 3
    assert_solves(space, eqs, W(0, 12))
    for v in space.kernel:
        assert exppoly_fit(GridFunction(W(0, 12), v), [UNIT], 2) is not None


def test_window_kernel_two_second_differences():
    eqs = [(DiffChain([2, 2]), None), (DiffChain([3, 3]), None)]
    space = window_kernel(eqs, W(0, 30))
    assert space.dimension == 2
    assert_solves(space, eqs, W(0, 30))
    for v in space.kernel:
        fitted = exppoly_fit(GridFunction(W(0, 30), v), [UNIT], 2)
        assert fitted is not None and fitted.total_degree() <= 2


def test_window_kernel_telescoping():
    eqs = [(DiffChain([1]), ExpPoly.constant(1))]
    space = window_kernel(eqs, W(0, 10))
    assert space.dimension == 1
    assert_solves(space, eqs, W(0, 10))
    p = exppoly_fit(GridFunction(W(0, 10), space.particular), [UNIT], 1)
    assert p - x == ExpPoly.constant(p.evaluate((0,)))


def test_window_kernel_inconsistent_diagnostic():
    eqs = [(DiffChain([1]), ExpPoly.constant(1)), (DiffChain([1]), ExpPoly.constant(2))]
    space = window_kernel(eqs, W(0, 5))
    assert not space.consistent
    assert space.diagnostic == {"inconsistent": True, "equation": 1, "point": [0]}
    assert space.to_json()["particular"] is None


def test_window_kernel_empty_valid_window():
    with pytest.raises(EmptyWindowError):
        window_kernel([(DiffChain([5]), None)], W(0, 4))


def test_window_kernel_dimension_monotone():
    eqs = [(DiffChain([2, 4]), None), (DiffChain([3, 9]), None)]
    dims = [window_kernel(eqs, W(0, n)).dimension for n in range(14, 40, 3)]
    assert dims == sorted(dims, reverse=True)
    assert dims[-1] == 2


@settings(max_examples=25)
@given(st.lists(st.lists(st.integers(1, 4), min_size=1, max_size=3), min_size=1, max_size=2),
       st.integers(13, 16))
def test_window_kernel_monotone_positive_steps(chains, size):
    # the largest stencil offset is determined by the others, so restriction is injective
    eqs = [(DiffChain(c), None) for c in chains]
    dims = [window_kernel(eqs, W(0, n)).dimension for n in (size, size + 3, size + 7)]
    assert dims == sorted(dims, reverse=True)


def test_window_kernel_grows_without_finite_global_kernel():
    # solutions a(y) + x*b(y) of Delta_(1,0)^2 f = 0: two free values per row
    eqs = [(DiffChain([(1, 0), (1, 0)]), None)]
    dims = [window_kernel(eqs, GridWindow((0, 0), (4, n))).dimension for n in (3, 4, 5)]
    assert dims == [6, 8, 10]


def test_window_kernel_monotone_generating_2d():
    eqs = [(DiffChain([(1, 0), (0, 1)]), None), (DiffChain([(1, 0), (1, 0)]), None),
           (DiffChain([(0, 1), (0, 1)]), None)]
    dims = [window_kernel(eqs, GridWindow((0, 0), (n, n))).dimension for n in (3, 4, 5, 6)]
    assert dims == [3, 3, 3, 3]


def test_ansatz_examples():
    space = polynomial_ansatz_solve([(DiffChain([1, 1]), None)], 1, 1)
    assert space.dimension == 2 and space.consistent

    space = polynomial_ansatz_solve([(DiffChain([1]), 2 * x + 1)], 2, 1)
    part, kernel = ansatz_functions(space, 1)
    assert part == x ** 2
    assert kernel == [ExpPoly.constant(1)]


def test_ansatz_matches_stabilized_window():
    eqs = [(DiffChain([2, 2]), None), (DiffChain([3, 3]), None)]
    ansatz = polynomial_ansatz_solve(eqs, 2, 1)
    space, window, sizes, dims, stabilized = stabilized_kernel(eqs, W(0, 20))
    assert stabilized and ansatz.dimension == space.dimension == 2
    _, kernel = ansatz_functions(ansatz, 1)
    for k in kernel:
        assert grid_in_span(space.kernel, GridFunction.sample(k, window).values)


def test_ansatz_samples_land_in_window_kernel_2d():
    eqs = [(DiffChain([(1, 0), (1, 0)]), None), (DiffChain([(0, 1), (1, 1)]), None)]
    ansatz = polynomial_ansatz_solve(eqs, 3, 2)
    space, window, _, _, stabilized = stabilized_kernel(eqs, GridWindow((0, 0), (5, 5)))
    assert stabilized and ansatz.dimension == space.dimension
    _, kernel = ansatz_functions(ansatz, 2)
    for k in kernel:
        assert grid_in_span(space.kernel, GridFunction.sample(k, window).values)


def test_ansatz_warns_on_exponential_rhs():
    with pytest.warns(NonPolynomialRhsWarning):
        space = polynomial_ansatz_solve([(DiffChain([1]), ExpPoly.exponential(2))], 3, 1)
    assert not space.consistent and space.diagnostic["inconsistent"]


def test_fit_examples():
    w = W(0, 10)
    assert exppoly_fit(GridFunction.sample(ExpPoly.exponential(2), w),
                       [Frequency((Scalar(2),))], 0) == ExpPoly.exponential(2)
    parity = GridFunction.from_function(lambda p: p[0] % 2, w)
    assert all(exppoly_fit(parity, [UNIT], d) is None for d in range(8))
    fitted = exppoly_fit(parity, [Frequency((Scalar(-1),)), UNIT], 0)
    assert fitted == ExpPoly.constant(Fraction(1, 2)) - ExpPoly.exponential(-1).scale(Fraction(1, 2))
    assert exppoly_fit(GridFunction.sample(x ** 2, w), [UNIT], 2) == x ** 2


def test_fit_underdetermined_warns():
    with pytest.warns(UnderdeterminedFitWarning):
        exppoly_fit(GridFunction.sample(x, W(0, 3)), [UNIT], 5)


def test_fit_minimal_degree_escalates():
    g = GridFunction.sample(x ** 3 - x, W(-3, 9))
    fitted, deg = fit_minimal_degree(g, [UNIT], 8)
    assert deg == 3 and fitted == x ** 3 - x
    assert fit_minimal_degree(GridFunction.sample(ExpPoly.exponential(3), W(0, 12)), [UNIT], 4) == (None, None)


def test_monomials_graded():
    assert monomials_up_to(2, 2) == [(0, 0), (0, 1), (1, 0), (0, 2), (1, 1), (2, 0)]


def test_stabilized_kernel_reports_sizes():
    space, window, sizes, dims, stabilized = stabilized_kernel([(DiffChain([1, 1, 1]), None)], W(0, 6))
    assert stabilized and dims[-3:] == [3, 3, 3] and len(sizes) == len(dims)
    _, _, _, dims, stabilized = stabilized_kernel([(DiffChain([2, 4]), None), (DiffChain([3, 6]), None)],
                                                  W(0, 12), max_growths=0)
    assert not stabilized and len(dims) == 1
