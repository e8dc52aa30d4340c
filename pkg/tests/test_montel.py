import math

import pytest
from hypothesis import given, settings, strategies as st

from frechet.corpus import make_rng, random_exppoly
from frechet.diffcalc import DiffChain, GridWindow, apply_chain_exppoly, apply_chain_grid
from frechet.exppoly import ExpPoly, Span, tau_span_dimension
from frechet.groups import GroupSpec, generates, in_subgroup, subgroup_index
from frechet.montel import (HypothesisError, MontelSystem, TupleLimitError, counterexample,
                            degree_bound, invariant_space, montel_condition, reduction_trace,
                            verify_montel)

from .strategies import exppolys

Z1, Z2 = GroupSpec.z(1), GroupSpec.z(2)
x = ExpPoly.variable()
two_x = ExpPoly.exponential(2)


def test_condition_examples():
    assert montel_condition(MontelSystem.build(Z1, [[2, 4], [3, 9]])) == (True, [])
    ok, failing = montel_condition(MontelSystem.build(Z1, [[2, 4], [3, 6]]))
    # gcd oracle over the four transversals
    expected = [(i, j) for i, a in enumerate([2, 4]) for j, b in enumerate([3, 6]) if math.gcd(a, b) > 1]
    assert not ok and failing == expected == [(0, 1), (1, 1)]
    assert montel_condition(MontelSystem.build(Z1, [[1]]))[0]
    g = GroupSpec(0, (3,))
    assert montel_condition(MontelSystem.build(g, [[g.element([], [2])]]))[0]
    # Z x Z_3 is not cyclic
    g = GroupSpec(1, (3,))
    assert not montel_condition(MontelSystem.build(g, [[g.element([1], [1])]]))[0]


def test_condition_tuple_cap():
    sys = MontelSystem.build(Z1, [[1, -1, 1]] * 4)
    with pytest.raises(TupleLimitError):
        montel_condition(sys, max_tuples=80)
    assert montel_condition(sys, max_tuples=81)[0]


step_1d = st.integers(-6, 6).filter(bool)


@settings(max_examples=40)
@given(st.lists(st.lists(step_1d, min_size=2, max_size=2), min_size=1, max_size=3),
       st.integers(0, 2), st.integers(0, 1), st.integers(1, 3))
def test_condition_monotone_z(columns, k, i, divisor):
    k %= len(columns)
    sys = MontelSystem.build(Z1, columns)
    old = columns[k][i]
    if old % divisor:
        return
    # old/divisor generates a subgroup containing old
    replaced = [list(c) for c in columns]
    replaced[k][i] = old // divisor
    if montel_condition(sys)[0]:
        assert montel_condition(MontelSystem.build(Z1, replaced))[0]


vec2 = st.tuples(st.integers(-3, 3), st.integers(-3, 3))


@settings(max_examples=40)
@given(st.lists(st.lists(vec2, min_size=2, max_size=2), min_size=2, max_size=2),
       st.integers(0, 1), st.integers(0, 1), vec2)
def test_condition_monotone_z2(columns, k, i, extra):
    sys = MontelSystem.build(Z2, columns)
    replaced = [list(c) for c in columns]
    # a step whose subgroup contains the old one: the gcd-reduced primitive vector
    old = columns[k][i]
    g = math.gcd(*old)
    if not g:
        return
    replaced[k][i] = (old[0] // g, old[1] // g)
    assert in_subgroup(Z2, [replaced[k][i]], old)
    if montel_condition(sys)[0]:
        assert montel_condition(MontelSystem.build(Z2, replaced))[0]


def test_degree_bound_examples():
    assert degree_bound([1, 1]) == 2
    assert degree_bound([0, 0, 0]) == 0
    assert degree_bound([2, 3]) == 5


def test_invariant_space_examples():
    v = invariant_space(x, [ExpPoly.constant(1)], [1])
    assert v.dimension == 2 and v.closed and Span(v.basis).dimension == 2
    assert ExpPoly.constant(1) in Span(v.basis)
    v = invariant_space(x ** 2, [2 * x + 1], [1])
    assert v.dimension == 3 and v.closed
    v = invariant_space(two_x, [two_x], [1])
    assert v.dimension == 1 and v.closed
    with pytest.raises(HypothesisError):
        invariant_space(x ** 2, [x], [1])


@settings(max_examples=30)
@given(exppolys(d=1, max_degree=3), st.lists(step_1d, min_size=1, max_size=3))
def test_invariant_space_bound_and_closure(f, steps):
    rhs = [f.delta(h) for h in steps]
    v = invariant_space(f, rhs, steps)
    assert v.closed
    assert v.dimension <= 1 + sum(tau_span_dimension(p) for p in rhs)
    span = Span(v.basis)
    assert f in span
    for b in v.basis:
        for h in steps:
            assert b.translate(h) in span


def test_invariant_space_z2():
    f = ExpPoly.variable(0, 2) * ExpPoly.variable(1, 2) + ExpPoly.exponential(2, 3)
    steps = [(1, 0), (0, 1)]
    v = invariant_space(f, [f.delta(h) for h in steps], steps)
    assert v.closed and v.dimension <= v.dimension_bound


SYS_2439 = MontelSystem.build(Z1, [[2, 4], [3, 9]])


def test_trace_forward_square():
    sys = MontelSystem.forward(Z1, [[2, 4], [3, 9]], x ** 2)
    trace = reduction_trace(sys, x ** 2, full=True)
    assert trace.ok
    for node in trace.nodes:
        if not node.label.startswith("G"):
            assert node.function.is_polynomial() and node.function.total_degree() <= 0
        else:
            assert node.function.is_polynomial() and node.function.total_degree() <= 1


def test_trace_zero_function():
    trace = reduction_trace(SYS_2439, ExpPoly.zero(1), full=True)
    assert trace.ok and all(not node.function for node in trace.nodes)


def test_trace_rejects_non_solution():
    with pytest.raises(HypothesisError):
        reduction_trace(SYS_2439, x ** 2)


def test_trace_forward_cube_every_tuple():
    f = x ** 3
    sys = MontelSystem.forward(Z1, [[2, 4], [3, 9]], f)
    for index in [(0, 0), (0, 1), (1, 0), (1, 1)]:
        trace = reduction_trace(sys, f, index)
        assert trace.ok and trace.base_generates
        assert [n.label for n in trace.nodes][0] == f"F{list(index)}"


def test_trace_three_columns_identities():
    rng = make_rng(7)
    f = random_exppoly(rng, 1, 2)
    sys = MontelSystem.forward(Z1, [[2, 5, 1], [3, 1, 2], [5, 7, 3]], f)
    trace = reduction_trace(sys, f, (1, 2, 0), full=True)
    assert trace.ok
    assert len(trace.nodes) == 27 * 7
    for node in trace.nodes:
        for eq in node.equations:
            assert apply_chain_exppoly(eq.chain, node.function) == eq.rhs


def test_trace_z2_system():
    f = ExpPoly.variable(0, 2) ** 2 * ExpPoly.exponential(1, 2)
    cols = [[(1, 0), (0, 1)], [(0, 1), (1, 1)]]
    sys = MontelSystem.forward(Z2, cols, f)
    assert montel_condition(sys)[0] is False
    trace = reduction_trace(sys, f, (0, 0))
    assert trace.ok and trace.base_generates


def test_counterexample_parity():
    ce = counterexample(Z1, [2, 4], GridWindow((0,), (16,)))
    assert [ce(p) for p in range(6)] == [0, 1, 0, 1, 0, 1]
    assert all(ce.annihilated.values())
    assert ce.witness_step == (1,)
    assert [r["order"] for r in ce.residues] == list(range(1, 9))
    assert ce.non_polynomial
    for m in range(1, 9):
        assert not apply_chain_grid(DiffChain([1] * m), ce.grid).is_zero()


def test_counterexample_z2_lattice():
    ce = counterexample(Z2, [(2, 0), (0, 2)])
    for a in range(4):
        for b in range(4):
            assert ce((a, b)) == (a % 2) + 2 * (b % 2)
    assert all(ce.annihilated.values()) and ce.non_polynomial
    assert len(set(ce.grid.values)) == 4


def test_counterexample_requires_non_generating():
    with pytest.raises(HypothesisError):
        counterexample(Z1, [1])
    with pytest.raises(HypothesisError):
        counterexample(Z1, [2, 3])


def test_counterexample_infinite_index():
    ce = counterexample(Z2, [(1, 1)])
    assert ce.enlarged and all(ce.annihilated.values()) and ce.non_polynomial


@settings(max_examples=25)
@given(st.lists(vec2.filter(any), min_size=1, max_size=3))
def test_counterexample_property(steps):
    if generates(Z2, steps) or subgroup_index(Z2, steps) > 12:
        return
    ce = counterexample(Z2, steps, GridWindow((0, 0), (9, 9)), max_order=3)
    for h in steps:
        assert apply_chain_grid(DiffChain([h]), ce.grid).is_zero()
    assert len(set(ce.grid.values)) > 1


def test_verify_generating_zero_rhs():
    report = verify_montel(SYS_2439, GridWindow((0,), (40,)))
    assert report.status == "verified" and report.exit_code == 0
    assert report.condition_ok and report.stabilized and report.fitted
    assert report.kernel_dimension == 2
    assert all(c.is_polynomial() and c.total_degree() <= 8 for c in report.certificates)


def test_verify_forward_generated():
    f = x * two_x
    sys = MontelSystem.forward(Z1, [[2, 4], [3, 9]], f)
    report = verify_montel(sys, trace_f=f)
    assert report.status == "verified"
    assert sys.is_solution(report.particular)
    assert report.accounts_for(f)
    assert report.trace is not None and report.trace.ok


def test_verify_condition_failure():
    report = verify_montel(MontelSystem.build(Z1, [[2, 4], [3, 6]]))
    assert not report.condition_ok and report.exit_code == 1
    assert report.failing_tuples == [(0, 1), (1, 1)]
    assert not report.fitted and report.status == "condition-failed"
    # the kernel contains the parity solution, which no polynomial fits
    assert report.kernel_dimension > 2


def test_verify_inconclusive_without_growth():
    report = verify_montel(SYS_2439, GridWindow((0,), (14,)), max_growths=1)
    assert report.status == "inconclusive" and report.exit_code == 1
    assert not report.fitted


def test_verify_z2():
    cols = [[(1, 0), (0, 1)], [(1, 1), (1, -1)]]
    sys = MontelSystem.build(Z2, cols)
    report = verify_montel(sys)
    assert report.condition_ok and report.status == "verified"
    assert report.kernel_dimension == 4
    assert all(c.is_polynomial() and c.total_degree() <= 2 for c in report.certificates)


def test_verify_z2_infinite_kernel_is_inconclusive():
    # both columns are Delta_(1,0) Delta_(0,1), so every a(x1) + b(x2) is a solution
    sys = MontelSystem.build(Z2, [[(1, 0), (0, 1)], [(0, 1), (1, 0)]])
    report = verify_montel(sys, max_growths=3, degree_cap=1)
    assert not report.condition_ok and report.failing_tuples == [(0, 1), (1, 0)]
    assert report.status == "inconclusive" and report.exit_code == 1
    assert report.kernel_dimensions == sorted(report.kernel_dimensions)


def test_verify_jobs_deterministic():
    a = verify_montel(SYS_2439, jobs=1).to_json()
    b = verify_montel(SYS_2439, jobs=2).to_json()
    assert a == b


def test_system_json_round_trip():
    sys = MontelSystem.forward(Z1, [[2, 4], [3, 9]], x * two_x)
    assert MontelSystem.from_json(sys.to_json()) == sys
    bare = sys.to_json()
    bare["rhs"] = None
    assert MontelSystem.from_json(bare, derive_from=x * two_x) == sys


def test_system_shape_checked():
    with pytest.raises(ValueError):
        MontelSystem.build(Z1, [[1, 2], [3]])
    with pytest.raises(ValueError):
        MontelSystem.build(Z1, [[1]], [ExpPoly.zero(2)])
