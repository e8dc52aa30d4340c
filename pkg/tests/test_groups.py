import math

import pytest
import sympy
from hypothesis import given, strategies as st
from sympy.matrices.normalforms import hermite_normal_form, invariant_factors

from frechet.groups import (INFINITE, DimensionError, GroupSpec, IntMatrix, coset_representatives,
                            generates, hermite_basis, in_subgroup, smith_normal_form, snf_divisors,
                            subgroup_index)

Z1, Z2 = GroupSpec.z(1), GroupSpec.z(2)

matrices = st.integers(1, 4).flatmap(lambda r: st.integers(1, 4).flatmap(
    lambda c: st.lists(st.lists(st.integers(-20, 20), min_size=c, max_size=c),
                       min_size=r, max_size=r)))


def check_snf(m: IntMatrix):
    u, d, v = smith_normal_form(m)
    assert u @ m @ v == d
    assert abs(u.determinant()) == 1 and abs(v.determinant()) == 1
    assert d.is_diagonal()
    diag = d.diagonal()
    assert all(x >= 0 for x in diag)
    for a, b in zip(diag, diag[1:]):
        assert (b == 0) if a == 0 else (b % a == 0)
    return diag


@given(matrices)
def test_snf_reconstruction(rows):
    check_snf(IntMatrix.from_rows(rows))


@given(matrices)
def test_snf_matches_sympy_invariant_factors(rows):
    diag = check_snf(IntMatrix.from_rows(rows))
    oracle = [abs(int(x)) for x in invariant_factors(sympy.Matrix(rows), domain=sympy.ZZ)]
    assert diag == oracle


def test_snf_examples():
    assert check_snf(IntMatrix.from_rows([[2, 0], [0, 1]])) == [1, 2]
    u, d, v = smith_normal_form(IntMatrix.identity(3))
    assert d == IntMatrix.identity(3)
    _, d, _ = smith_normal_form(IntMatrix.from_rows([[2, 3]]))
    assert d == IntMatrix.from_rows([[1, 0]])


def test_snf_empty_and_zero():
    u, d, v = smith_normal_form(IntMatrix.zeros(0, 0))
    assert d.rows == d.cols == 0
    assert check_snf(IntMatrix.zeros(2, 3)) == [0, 0]


def test_snf_deterministic():
    m = IntMatrix.from_rows([[6, -4, 10], [3, 9, -12], [0, 5, 7]])
    assert smith_normal_form(m) == smith_normal_form(m)


def test_intmatrix_shape_checked():
    with pytest.raises(ValueError):
        IntMatrix(2, 2, ((1, 2), (3,)))


def test_generates_examples():
    assert generates(Z2, [(1, 0), (0, 1)])
    assert generates(Z1, [2, 3])
    assert not generates(Z2, [(2, 0), (0, 1)])
    assert snf_divisors(Z2, [(2, 0), (0, 1)]) == [1, 2]


def test_subgroup_index_examples():
    assert subgroup_index(Z2, [(2, 0), (0, 1)]) == 2
    assert subgroup_index(Z2, [(1, 0)]) == INFINITE
    assert subgroup_index(Z1, [1]) == 1


def test_empty_step_list():
    assert subgroup_index(Z2, []) == INFINITE
    assert not generates(Z1, [])
    finite = GroupSpec(0, (4, 6))
    assert subgroup_index(finite, []) == 24
    assert generates(GroupSpec(0, ()), [])


def test_torsion_groups():
    g = GroupSpec(1, (4, 6))
    assert subgroup_index(g, []) == INFINITE
    assert subgroup_index(g, [g.element([1], [0, 0])]) == 24
    assert generates(g, [g.element([1], [0, 0]), g.element([0], [1, 0]), g.element([0], [0, 1])])
    # Z_4 x Z_6 is not cyclic, so a single generator reaches index 2 at best
    assert subgroup_index(GroupSpec(0, (4, 6)), [GroupSpec(0, (4, 6)).element([], [1, 1])]) == 2
    assert generates(GroupSpec(0, (4, 9)), [GroupSpec(0, (4, 9)).element([], [1, 1])])


def test_torsion_elements_reduced():
    g = GroupSpec(1, (4,))
    a = g.element([1], [3]) + g.element([2], [3])
    assert a.torsion == (2,)
    assert (-g.element([0], [1])).torsion == (3,)


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        generates(Z2, [(1, 0, 0)])
    with pytest.raises(ValueError):
        GroupSpec(1, (1,))


def test_group_json_round_trip():
    g = GroupSpec(2, (3, 5))
    assert g.to_json() == {"free_rank": 2, "torsion": [3, 5]}
    assert GroupSpec.from_json(g.to_json()) == g


steps_z2 = st.lists(st.tuples(st.integers(-6, 6), st.integers(-6, 6)), min_size=0, max_size=4)


@given(steps_z2)
def test_generates_iff_index_one(steps):
    assert generates(Z2, steps) == (subgroup_index(Z2, steps) == 1)


@given(steps_z2, st.tuples(st.integers(-6, 6), st.integers(-6, 6)))
def test_appending_preserves_generation(steps, extra):
    if generates(Z2, steps):
        assert generates(Z2, steps + [extra])


@given(steps_z2)
def test_index_is_abs_det_oracle_for_two_steps(steps):
    if len(steps) == 2:
        det = abs(steps[0][0] * steps[1][1] - steps[0][1] * steps[1][0])
        assert subgroup_index(Z2, steps) == (det if det else INFINITE)


def test_coset_examples():
    assert [r.free for r in coset_representatives(Z1, [2])] == [(0,), (1,)]
    reps = [r.free for r in coset_representatives(Z2, [(2, 0), (0, 2)])]
    assert reps == [(0, 0), (1, 0), (0, 1), (1, 1)]
    assert [r.free for r in coset_representatives(Z1, [1])] == [(0,)]
    with pytest.raises(ValueError):
        coset_representatives(Z2, [(1, 0)])


def lattice_contains(steps, v):
    """Independent oracle: HNF basis from sympy, then an integral rational solve."""
    basis = hermite_normal_form(sympy.Matrix(steps).T)
    sol = basis.solve(sympy.Matrix(v))
    return all(x.is_integer for x in sol)


@given(st.lists(st.tuples(st.integers(-5, 5), st.integers(-5, 5)), min_size=2, max_size=3))
def test_coset_representatives_transversal(steps):
    index = subgroup_index(Z2, steps)
    if index == INFINITE or index > 60:
        return
    reps = coset_representatives(Z2, steps)
    assert len(reps) == index
    assert reps[0].is_identity()
    for i, a in enumerate(reps):
        for b in reps[i + 1:]:
            diff = (a + -b).free
            assert not in_subgroup(Z2, steps, diff)
            assert not lattice_contains(steps, diff)


@given(st.lists(st.tuples(st.integers(-5, 5), st.integers(-5, 5)), min_size=1, max_size=3),
       st.tuples(st.integers(-12, 12), st.integers(-12, 12)))
def test_in_subgroup_matches_hnf_oracle(steps, v):
    if subgroup_index(Z2, steps) == INFINITE:
        return
    assert in_subgroup(Z2, steps, v) == lattice_contains(steps, v)


def test_hermite_basis_is_lower_triangular():
    basis = hermite_basis([[2, 0], [1, 3]], 2)
    assert basis is not None
    for i, col in enumerate(basis):
        assert all(col[k] == 0 for k in range(i)) and col[i] > 0
    assert math.prod(col[i] for i, col in enumerate(basis)) == 6
    assert hermite_basis([[1, 1]], 2) is None
