"""Mixed-difference Montel systems: the generating condition, verification, and the proof machinery.

A system consists of ``s`` columns of ``n`` steps each together with
right-hand sides ``P_1..P_s``; a function ``f`` solves it when
``Delta_{h_{1,k}} ... Delta_{h_{n,k}} f = P_k`` for every column ``k``.
Whenever every transversal ``{h_{i_1,1}, ..., h_{i_s,s}}`` generates the
group, solutions are exponential polynomials (polynomials when all
``P_k`` vanish).  This module checks that condition, confirms the
conclusion on finite windows of Z^d, replays the induction that proves it,
and builds periodic counterexamples when the condition fails.

Tuple indices are zero-based throughout.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from .diffcalc import DiffChain, GridFunction, GridWindow, apply_chain_exppoly, apply_chain_grid, expand_chain
from .exppoly import ExpPoly, Frequency, Span, span_basis
from .groups import INFINITE, CosetReducer, GroupElement, GroupSpec, as_element, element_from_json, generates, subgroup_index
from .solver import fit_minimal_degree, stabilized_kernel, window_kernel

DEFAULT_MAX_TUPLES = 10**6
DEFAULT_DEGREE_CAP = 8


class HypothesisError(ValueError):
    """The input does not satisfy the hypotheses an operation relies on."""


class TupleLimitError(ValueError):
    """Enumerating every transversal would exceed the configured cap."""


@dataclass(frozen=True)
class MontelSystem:
    group: GroupSpec
    n: int
    s: int
    steps: tuple[tuple[GroupElement, ...], ...]  # steps[k][i] is h_{i,k}
    rhs: tuple[ExpPoly, ...]

    def __post_init__(self):
        if self.n < 1 or self.s < 1:
            raise ValueError("a system needs n >= 1 and s >= 1")
        cols = tuple(tuple(as_element(self.group, h) for h in col) for col in self.steps)
        if len(cols) != self.s or any(len(col) != self.n for col in cols):
            raise ValueError(f"expected {self.s} columns of {self.n} steps")
        object.__setattr__(self, "steps", cols)
        rhs = tuple(self.rhs) if self.rhs else tuple(ExpPoly.zero(self.group.free_rank)
                                                     for _ in range(self.s))
        if len(rhs) != self.s or any(p.num_vars != self.group.free_rank for p in rhs):
            raise ValueError(f"expected {self.s} right-hand sides on Z^{self.group.free_rank}")
        object.__setattr__(self, "rhs", rhs)

    @classmethod
    def build(cls, group: GroupSpec, columns: Sequence[Sequence], rhs: Sequence[ExpPoly] | None = None):
        columns = [list(col) for col in columns]
        return cls(group, len(columns[0]), len(columns), tuple(tuple(c) for c in columns),
                   tuple(rhs) if rhs is not None else ())

    @classmethod
    def forward(cls, group: GroupSpec, columns: Sequence[Sequence], f: ExpPoly) -> "MontelSystem":
        """System whose right-hand sides are the column chains applied to ``f``."""
        bare = cls.build(group, columns)
        return cls.build(group, columns, [apply_chain_exppoly(bare.chain(k), f) for k in range(bare.s)])

    @property
    def num_vars(self) -> int:
        return self.group.free_rank

    def step_vector(self, k: int, i: int) -> tuple[int, ...]:
        return self.steps[k][i].free

    def chain(self, k: int, skip: Sequence[int] = ()) -> DiffChain:
        """Column ``k`` as a chain, omitting the rows listed in ``skip``."""
        return DiffChain([h.free for i, h in enumerate(self.steps[k]) if i not in skip], self.num_vars)

    def selection(self, index: Sequence[int]) -> list[GroupElement]:
        return [self.steps[k][i] for k, i in enumerate(index)]

    def is_homogeneous(self) -> bool:
        return not any(self.rhs)

    def residuals(self, f: ExpPoly) -> list[ExpPoly]:
        return [apply_chain_exppoly(self.chain(k), f) - self.rhs[k] for k in range(self.s)]

    def is_solution(self, f: ExpPoly) -> bool:
        return not any(self.residuals(f))

    def to_json(self) -> dict:
        return {
            "group": self.group.to_json(),
            "n": self.n,
            "s": self.s,
            "steps": [[h.to_json() for h in col] for col in self.steps],
            "rhs": [p.to_json() for p in self.rhs],
        }

    @classmethod
    def from_json(cls, data, derive_from: ExpPoly | None = None) -> "MontelSystem":
        group = GroupSpec.from_json(data["group"])
        columns = [[element_from_json(group, h) for h in col] for col in data["steps"]]
        if len(columns) != data["s"] or any(len(col) != data["n"] for col in columns):
            raise ValueError("steps do not match the declared n and s")
        if data.get("rhs") is None and derive_from is not None:
            return cls.forward(group, columns, derive_from)
        rhs = [ExpPoly.from_json(p, group.free_rank) for p in data.get("rhs") or []]
        return cls.build(group, columns, rhs or None)


def montel_condition(sys: MontelSystem, max_tuples: int = DEFAULT_MAX_TUPLES):
    """Check that every transversal of the columns generates the group.

    Returns ``(ok, failing_tuples)`` with the failing index tuples in
    lexicographic order.
    """
    total = sys.n ** sys.s
    if total > max_tuples:
        raise TupleLimitError(f"{total} tuples exceed the cap of {max_tuples}")
    seen: dict = {}
    failing = []
    for index in itertools.product(range(sys.n), repeat=sys.s):
        chosen = sys.selection(index)
        key = tuple(sorted((h.free, h.torsion) for h in chosen))
        if key not in seen:
            seen[key] = generates(sys.group, chosen)
        if not seen[key]:
            failing.append(index)
    return not failing, failing


def degree_bound(orders: Sequence[int]) -> int:
    """Degree bound ``n_1 + ... + n_s`` for ``Delta_{h_k}^{n_k+1} f = 0`` with generating steps."""
    return sum(orders)


# -- the base case: a finite-dimensional translation-invariant space --------

@dataclass
class InvariantSpace:
    basis: list[ExpPoly]
    steps: list[tuple[int, ...]]
    closed: bool
    dimension_bound: int
    closure_failures: list[dict] = field(default_factory=list)

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def to_json(self) -> dict:
        return {
            "basis": [b.to_json() for b in self.basis],
            "basis_text": [str(b) for b in self.basis],
            "dimension": self.dimension,
            "dimension_bound": self.dimension_bound,
            "closed": self.closed,
            "steps": [list(h) for h in self.steps],
            "closure_failures": self.closure_failures,
        }


def _free_vector(h, num_vars: int) -> tuple[int, ...]:
    if isinstance(h, GroupElement):
        return tuple(h.free)
    if isinstance(h, int):
        return (h,)
    vec = tuple(h)
    if len(vec) != num_vars:
        raise ValueError(f"step {vec} does not live in Z^{num_vars}")
    return vec


def invariant_space(f: ExpPoly, rhs: Sequence[ExpPoly], steps: Sequence) -> InvariantSpace:
    """The space ``span{f} + tau(P_1) + ... + tau(P_s)`` for ``Delta_{h_k} f = P_k``.

    Raises HypothesisError unless every difference equation holds exactly.
    The returned space is checked to be closed under each ``tau_{h_k}``.
    """
    vecs = [_free_vector(h, f.num_vars) for h in steps]
    if len(vecs) != len(rhs):
        raise ValueError("one right-hand side per step is required")
    for k, (h, p) in enumerate(zip(vecs, rhs)):
        if f.delta(h) != p:
            raise HypothesisError(f"Delta_{list(h)} f != P_{k}: residue {f.delta(h) - p}")
    generators = [f]
    for p in rhs:
        generators.extend(p.tau_span_basis())
    basis = span_basis(generators)
    span = Span(basis)
    failures = []
    for b_index, b in enumerate(basis):
        for h in vecs:
            if b.translate(h) not in span:
                failures.append({"basis_index": b_index, "step": list(h)})
    bound = 1 + sum(p.tau_span_dimension() for p in rhs)
    return InvariantSpace(basis, vecs, not failures, bound, failures)


# -- the induction, materialized -------------------------------------------

@dataclass
class TraceEquation:
    column: int
    chain: DiffChain
    rhs: ExpPoly
    source: str
    ok: bool

    def to_json(self) -> dict:
        return {
            "column": self.column,
            "chain": self.chain.to_json(),
            "rhs": self.rhs.to_json(),
            "rhs_text": str(self.rhs),
            "source": self.source,
            "status": "ok" if self.ok else "FAILED",
        }


@dataclass
class TraceNode:
    label: str
    index: tuple[int, ...]
    kept: tuple[int, ...]
    operator: DiffChain
    function: ExpPoly
    equations: list[TraceEquation]
    reduced_condition_ok: bool

    @property
    def ok(self) -> bool:
        return all(eq.ok for eq in self.equations)

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "tuple": list(self.index),
            "kept_columns": list(self.kept),
            "operator": self.operator.to_json(),
            "function": self.function.to_json(),
            "function_text": str(self.function),
            "equations": [eq.to_json() for eq in self.equations],
            "reduced_condition_ok": self.reduced_condition_ok,
            "status": "ok" if self.ok else "FAILED",
        }


@dataclass
class ReductionTrace:
    index: tuple[int, ...]
    nodes: list[TraceNode]
    base_steps: list[tuple[int, ...]]
    base_functions: list[ExpPoly]
    base_generates: bool
    base_case: InvariantSpace

    @property
    def ok(self) -> bool:
        return all(node.ok for node in self.nodes) and self.base_case.closed

    def to_json(self) -> dict:
        return {
            "tuple": list(self.index),
            "nodes": [node.to_json() for node in self.nodes],
            "base_case": {
                "steps": [list(h) for h in self.base_steps],
                "differences": [p.to_json() for p in self.base_functions],
                "differences_text": [str(p) for p in self.base_functions],
                "steps_generate": self.base_generates,
                "invariant_space": self.base_case.to_json(),
            },
            "status": "ok" if self.ok else "FAILED",
        }


def _node_label(sys: MontelSystem, index, kept) -> str:
    deleted = [k for k in range(sys.s) if k not in kept]
    if not deleted:
        return f"F{list(index)}"
    return f"G{list(index)}/del{deleted}"


def _reduced_system(sys: MontelSystem, index) -> MontelSystem:
    cols = [[h for i, h in enumerate(sys.steps[k]) if i != index[k]] for k in range(sys.s)]
    return MontelSystem.build(sys.group, cols)


def _trace_node(sys: MontelSystem, f: ExpPoly, index, kept, cache: dict,
                condition_cache: dict) -> TraceNode:
    """One intermediate function of the induction and the smaller system it satisfies.

    The node is ``g = Delta_{h_{i_k,k} : k in kept} f``.  Every column ``j``
    contributes the chain of its steps other than ``h_{i_j,j}``.  For a kept
    column the right-hand side is the rest of the selection applied to
    ``P_j``; for a deleted column a second step ``h_{m,j}`` is moved into the
    selection, turning the right-hand side into a difference of the node one
    level up.
    """
    def node_fn(idx, kk):
        key = (tuple(idx), tuple(sorted(kk)))
        if key not in cache:
            chain = DiffChain([sys.step_vector(k, idx[k]) for k in key[1]], sys.num_vars)
            cache[key] = apply_chain_exppoly(chain, f)
        return cache[key]

    kept = tuple(sorted(kept))
    g = node_fn(index, kept)
    operator = DiffChain([sys.step_vector(k, index[k]) for k in kept], sys.num_vars)
    equations = []
    for j in range(sys.s):
        chain = sys.chain(j, skip=(index[j],))
        lhs = apply_chain_exppoly(chain, g)
        if j in kept:
            rest = DiffChain([sys.step_vector(k, index[k]) for k in kept if k != j], sys.num_vars)
            rhs = apply_chain_exppoly(rest, sys.rhs[j])
            source = f"{rest} P{j}"
        else:
            m = next(i for i in range(sys.n) if i != index[j])
            upper = list(index)
            upper[j] = m
            inner = node_fn(upper, kept + (j,))
            outer = sys.chain(j, skip=(index[j], m))
            rhs = apply_chain_exppoly(outer, inner)
            source = f"{outer} {_node_label(sys, upper, tuple(sorted(kept + (j,))))}"
        equations.append(TraceEquation(j, chain, rhs, source, lhs == rhs))
    key = tuple(index)
    if key not in condition_cache:
        condition_cache[key] = montel_condition(_reduced_system(sys, index))[0]
    return TraceNode(_node_label(sys, index, kept), tuple(index), kept, operator, g,
                     equations, condition_cache[key])


def reduction_trace(sys: MontelSystem, f: ExpPoly, index: Sequence[int] | None = None,
                    full: bool = False) -> ReductionTrace:
    """Replay the induction on a concrete solution ``f``.

    Starting from ``F_i`` (the full transversal ``i`` applied to ``f``) one
    column is deleted at a time until only single differences remain; every
    node's smaller system is checked exactly.  The final single differences
    feed the base case, an explicit invariant space containing ``f``.
    With ``full=True`` every tuple and every subset of columns is visited.
    """
    if not sys.group.is_free():
        raise ValueError("reduction traces run on Z^d")
    residuals = sys.residuals(f)
    bad = [k for k, r in enumerate(residuals) if r]
    if bad:
        raise HypothesisError(f"f does not solve the system: columns {bad} have nonzero residue")
    index = tuple(index) if index is not None else (0,) * sys.s
    if len(index) != sys.s or any(not 0 <= i < sys.n for i in index):
        raise ValueError(f"tuple {index} is not in [0, {sys.n})^{sys.s}")

    cache: dict = {}
    condition_cache: dict = {}
    nodes: list[TraceNode] = []
    if sys.n >= 2:
        if full:
            visits = [(idx, kept) for idx in itertools.product(range(sys.n), repeat=sys.s)
                      for size in range(sys.s, 0, -1)
                      for kept in itertools.combinations(range(sys.s), size)]
        else:
            path = [tuple(range(d, sys.s)) for d in range(sys.s)]
            singles = [(k,) for k in range(sys.s) if (k,) not in path]
            visits = [(index, kept) for kept in path + singles]
        for idx, kept in visits:
            nodes.append(_trace_node(sys, f, idx, kept, cache, condition_cache))

    base_steps = [sys.step_vector(k, index[k]) for k in range(sys.s)]
    base_functions = [f.delta(h) for h in base_steps]
    base = invariant_space(f, base_functions, base_steps)
    return ReductionTrace(index, nodes, base_steps, base_functions,
                          generates(sys.group, sys.selection(index)), base)


# -- necessity: periodic solutions when the condition fails ----------------

@dataclass
class Counterexample:
    group: GroupSpec
    steps: list[tuple[int, ...]]
    index: int
    reducer: CosetReducer
    grid: GridFunction
    annihilated: dict
    witness_step: tuple[int, ...]
    residues: list[dict]
    enlarged: bool = False

    @property
    def representatives(self) -> list[GroupElement]:
        return self.reducer.representatives()

    @property
    def non_polynomial(self) -> bool:
        return all(r["nonzero"] for r in self.residues)

    def value(self, x) -> int:
        return self.reducer.position(x)

    __call__ = value

    def description(self) -> str:
        base = "f(x) = position of the coset of x among the representatives (values 0.."
        base += f"{self.index - 1})"
        if self.enlarged:
            base += "; cosets taken modulo <steps> + 2Z^d since <steps> has infinite index"
        return base

    def to_json(self) -> dict:
        return {
            "group": self.group.to_json(),
            "steps": [list(h) for h in self.steps],
            "index": self.index,
            "function": self.description(),
            "table": [{"representative": list(r.free), "value": k}
                      for k, r in enumerate(self.representatives)],
            "grid": self.grid.to_json(),
            "annihilated": [{"step": list(h), "zero": ok} for h, ok in self.annihilated.items()],
            "witness_step": list(self.witness_step),
            "residues": self.residues,
            "non_polynomial": self.non_polynomial,
            "argument": ("f is bounded and non-constant along the witness step; a bounded "
                         "function annihilated by some power of a difference operator is "
                         "constant along that step, so no unmixed Fréchet equation "
                         "Delta_e^m f = 0 holds. The residues above exhibit this for every "
                         "tested order."),
        }


def counterexample(group: GroupSpec, failing_steps: Sequence, window: GridWindow | None = None,
                   max_order: int = 8) -> Counterexample:
    """A non-polynomial function killed by every ``Delta_h``, ``h`` in ``failing_steps``.

    The function is constant on cosets of the generated subgroup and takes a
    different value on each coset.  Raises HypothesisError when the steps
    generate the group, in which case no such function exists.
    """
    if not group.is_free():
        raise ValueError("counterexamples are sampled on Z^d grids")
    d = group.free_rank
    steps = [_free_vector(h, d) if not isinstance(h, GroupElement) else tuple(h.free)
             for h in failing_steps]
    index = subgroup_index(group, steps)
    if index == 1:
        raise HypothesisError("the steps generate the group; every solution is a polynomial")
    enlarged = index == INFINITE
    lattice = list(steps)
    if enlarged:
        lattice += [tuple(2 * int(i == j) for j in range(d)) for i in range(d)]
    reducer = CosetReducer(group, lattice)
    if window is None:
        side = max(16, max_order + 2 * reducer.index + 1)
        window = GridWindow.sized([side] * d)
    grid = GridFunction.from_function(reducer.position, window)

    annihilated = {}
    for h in steps:
        annihilated[h] = apply_chain_grid(DiffChain([h]), grid).is_zero()
    witness = next(e for e in (tuple(int(i == j) for j in range(d)) for i in range(d))
                   if not reducer.contains(e))
    residues = []
    for m in range(1, max_order + 1):
        res = apply_chain_grid(DiffChain([witness] * m), grid)
        hit = next(((x, v) for x, v in res.items() if v), None)
        residues.append({
            "order": m,
            "nonzero": hit is not None,
            "point": list(hit[0]) if hit else None,
            "value": hit[1].to_json() if hit else None,
        })
    return Counterexample(group, steps, reducer.index, reducer, grid, annihilated,
                          witness, residues, enlarged)


# -- end-to-end verification ------------------------------------------------

@dataclass
class MontelReport:
    condition_ok: bool
    failing_tuples: list
    degree_bound: int
    window_sizes: list
    kernel_dimensions: list
    kernel_dimension: int
    stabilized: bool
    fitted: bool
    certificates: list
    certificate_degrees: list
    frequencies: list
    particular: ExpPoly | None = None
    particular_degree: int | None = None
    rhs_nonzero: bool = False
    consistent: bool = True
    trace: ReductionTrace | None = None
    notes: list = field(default_factory=list)

    @property
    def status(self) -> str:
        if not self.stabilized:
            return "inconclusive"
        if not self.condition_ok:
            return "condition-failed"
        if not self.fitted:
            return "no-certificate"
        return "verified"

    @property
    def exit_code(self) -> int:
        return 0 if self.status == "verified" else 1

    def certified_span(self) -> Span:
        return Span(c for c in self.certificates if c is not None)

    def accounts_for(self, f: ExpPoly) -> bool:
        """True iff ``f - particular`` lies in the span of the kernel certificates."""
        if self.rhs_nonzero and self.particular is None:
            return False
        base = self.particular if self.particular is not None else ExpPoly.zero(f.num_vars)
        return (f - base) in self.certified_span()

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "condition_ok": self.condition_ok,
            "failing_tuples": [list(t) for t in self.failing_tuples],
            "degree_bound": self.degree_bound,
            "window_sizes": self.window_sizes,
            "kernel_dimensions": self.kernel_dimensions,
            "kernel_dimension": self.kernel_dimension,
            "stabilized": self.stabilized,
            "inconclusive": not self.stabilized,
            "fitted": self.fitted,
            "frequencies": [f.to_json() for f in self.frequencies],
            "certificates": [None if c is None else c.to_json() for c in self.certificates],
            "certificates_text": [None if c is None else str(c) for c in self.certificates],
            "certificate_degrees": self.certificate_degrees,
            "all_polynomial": all(c is not None and c.is_polynomial() for c in self.certificates),
            "rhs_nonzero": self.rhs_nonzero,
            "consistent": self.consistent,
            "particular": None if self.particular is None else self.particular.to_json(),
            "particular_text": None if self.particular is None else str(self.particular),
            "particular_degree": self.particular_degree,
            "trace": None if self.trace is None else self.trace.to_json(),
            "notes": self.notes,
        }


def _default_window(sys: MontelSystem) -> GridWindow:
    d = sys.num_vars
    spans = []
    for c in range(d):
        span = 1
        for k in range(sys.s):
            offs = [o[c] for o, _ in expand_chain(sys.chain(k))] or [0]
            span = max(span, max(offs) - min(offs))
        spans.append(span)
    if d == 1:
        return GridWindow.sized([max(20, 2 * spans[0] + 1)])
    return GridWindow.sized([max(6, span + 3) for span in spans])


def _fit_job(args):
    grid, freqs, cap = args
    return fit_minimal_degree(grid, freqs, cap)


def verify_montel(sys: MontelSystem, window: GridWindow | None = None,
                  degree_cap: int = DEFAULT_DEGREE_CAP, max_tuples: int = DEFAULT_MAX_TUPLES,
                  max_growths: int = 8, frequencies: Sequence[Frequency] | None = None,
                  jobs: int = 1, trace_f: ExpPoly | None = None) -> MontelReport:
    """Check the hypothesis and confirm the conclusion on growing windows of Z^d.

    The homogeneous kernel is recomputed on enlarged windows until its
    dimension repeats over two successive enlargements; each basis vector of
    the final kernel (and a particular solution when some ``P_k`` is
    nonzero) is then fitted exactly by an exponential polynomial whose
    frequencies are those of the right-hand sides plus the unit frequency.
    A failed fit means "no certificate up to the cap", never a refutation.
    """
    if not sys.group.is_free():
        raise ValueError("verification needs the group to be Z^d")
    condition_ok, failing = montel_condition(sys, max_tuples)
    d = sys.num_vars
    notes = []
    window = window or _default_window(sys)
    equations = [(sys.chain(k), sys.rhs[k]) for k in range(sys.s)]
    space, final, sizes, dims, stabilized = stabilized_kernel(equations, window,
                                                              max_growths=max_growths)
    if not stabilized:
        notes.append(f"kernel dimension did not stabilize within {max_growths} enlargements; "
                     "result is inconclusive")

    if frequencies is None:
        freqs = [Frequency.unit(d)]
        for p in sys.rhs:
            freqs.extend(p.frequencies())
        freqs = sorted(set(freqs), key=Frequency.sort_key)
    else:
        freqs = list(dict.fromkeys(frequencies))

    grids = [GridFunction(final, tuple(v)) for v in space.kernel]
    jobs_args = [(g, freqs, degree_cap) for g in grids]
    if jobs > 1 and len(grids) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            fits = list(pool.map(_fit_job, jobs_args))
    else:
        fits = [_fit_job(a) for a in jobs_args]
    certificates = [c for c, _ in fits]
    degrees = [deg for _, deg in fits]
    fitted = all(c is not None for c in certificates)
    if not fitted:
        notes.append(f"no exponential-polynomial certificate up to degree {degree_cap} with the "
                     "candidate frequencies for some kernel vectors")

    rhs_nonzero = not sys.is_homogeneous()
    particular = particular_degree = None
    consistent = True
    if rhs_nonzero:
        full = window_kernel(equations, final)
        if full.particular is None:
            consistent = False
            fitted = False
            notes.append(f"inhomogeneous system inconsistent on the window: {full.diagnostic}")
        else:
            particular, particular_degree = fit_minimal_degree(
                GridFunction(final, tuple(full.particular)), freqs, degree_cap)
            if particular is None:
                fitted = False
                notes.append("no certificate for the particular solution up to the cap")
    if not condition_ok:
        notes.append("generating condition fails; non-certifiable kernel vectors are expected")

    trace = reduction_trace(sys, trace_f) if trace_f is not None else None
    return MontelReport(
        condition_ok=condition_ok,
        failing_tuples=failing,
        degree_bound=degree_bound([sys.n - 1] * sys.s),
        window_sizes=sizes,
        kernel_dimensions=dims,
        kernel_dimension=space.dimension,
        stabilized=stabilized,
        fitted=fitted and stabilized,
        certificates=certificates,
        certificate_degrees=degrees,
        frequencies=freqs,
        particular=particular,
        particular_degree=particular_degree,
        rhs_nonzero=rhs_nonzero,
        consistent=consistent,
        trace=trace,
        notes=notes,
    )
