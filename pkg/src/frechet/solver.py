"""Exact solution spaces of difference systems: window kernels, polynomial ansatz, fitting."""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field
from typing import Sequence

from .diffcalc import DiffChain, EmptyWindowError, GridFunction, GridWindow, apply_chain_exppoly, expand_chain
from .exppoly import ExpPoly, Frequency, Polynomial
from .linalg import RowReducer, solve_affine
from .scalar import ONE, ZERO, Scalar


class UnderdeterminedFitWarning(UserWarning):
    pass


class NonPolynomialRhsWarning(UserWarning):
    pass


@dataclass
class AffineSolutionSpace:
    """``particular + span(kernel)``; ``particular`` is None when the system is inconsistent.

    ``labels`` names the coordinates: window points for window kernels,
    exponent vectors for the polynomial ansatz.
    """

    particular: list[Scalar] | None
    kernel: list[list[Scalar]]
    labels: list = field(default_factory=list)
    diagnostic: dict | None = None

    @property
    def dimension(self) -> int:
        return len(self.kernel)

    @property
    def consistent(self) -> bool:
        return self.particular is not None

    def to_json(self) -> dict:
        out = {
            "particular": None if self.particular is None else [v.to_json() for v in self.particular],
            "kernel": [[v.to_json() for v in vec] for vec in self.kernel],
            "dimension": self.dimension,
        }
        if self.diagnostic is not None:
            out["diagnostic"] = self.diagnostic
        return out


def _normalize_equations(equations, num_vars: int | None = None):
    out = []
    for chain, rhs in equations:
        if not isinstance(chain, DiffChain):
            chain = DiffChain(chain, num_vars)
        out.append((chain, rhs if rhs else None))
    return out


def window_kernel(equations, window: GridWindow) -> AffineSolutionSpace:
    """All exact solutions on ``window`` of ``chain(u) = rhs`` for every equation.

    Unknowns are the grid values in row-major order; each equation contributes
    one constraint per point of its valid sub-window.
    """
    equations = _normalize_equations(equations, window.num_vars)
    strides = window.strides()
    volume = window.volume

    def rows():
        for eq_index, (chain, rhs) in enumerate(equations):
            valid = window.valid_for(chain)
            if valid.is_empty():
                raise EmptyWindowError(
                    f"equation {eq_index} ({chain}) has no valid points in {window.to_json()}")
            stencil = [(sum(o * s for o, s in zip(off, strides)), c) for off, c in expand_chain(chain)]
            for x in valid.points():
                base = last - window.index(x)
                coeffs = {base - shift: c for shift, c in stencil}
                value = rhs.evaluate(x) if rhs is not None else ZERO
                yield (eq_index, list(x)), coeffs, value

    # columns run backwards over the window so the free values sit at its start
    last = volume - 1
    res = solve_affine(rows(), volume)
    diagnostic = None
    particular = None
    if res.particular is None:
        eq_index, point = res.violated
        diagnostic = {"inconsistent": True, "equation": eq_index, "point": point}
    else:
        particular = res.particular[::-1]
    kernel = [v[::-1] for v in res.kernel]
    return AffineSolutionSpace(particular, kernel, list(window.points()), diagnostic)


def monomials_up_to(max_degree: int, num_vars: int) -> list[tuple[int, ...]]:
    """Exponent vectors of total degree at most ``max_degree``, graded then lexicographic."""
    out = []
    for deg in range(max_degree + 1):
        for exps in itertools.product(range(deg + 1), repeat=num_vars):
            if sum(exps) == deg:
                out.append(exps)
    return out


def polynomial_from_vector(monomials: Sequence[tuple[int, ...]], vec: Sequence[Scalar],
                           num_vars: int, freq: Frequency | None = None) -> ExpPoly:
    return ExpPoly.from_polynomial(Polynomial(num_vars, dict(zip(monomials, vec))), freq)


def polynomial_ansatz_solve(equations, max_degree: int, num_vars: int) -> AffineSolutionSpace:
    """Solve the system over polynomials of total degree ``<= max_degree``.

    Coordinates of the result are the coefficients of ``labels`` (exponent vectors).
    """
    equations = _normalize_equations(equations, num_vars)
    for _, rhs in equations:
        if rhs is not None and not rhs.is_polynomial():
            warnings.warn("right-hand side has a non-unit frequency; the polynomial ansatz "
                          "cannot match it", NonPolynomialRhsWarning, stacklevel=2)
    monos = monomials_up_to(max_degree, num_vars)
    images = [
        [apply_chain_exppoly(chain, ExpPoly.monomial(m)) for m in monos] for chain, _ in equations
    ]

    def rows():
        for eq_index, (chain, rhs) in enumerate(equations):
            keys = set()
            for img in images[eq_index]:
                keys.update(img.coordinates())
            target = rhs.coordinates() if rhs is not None else {}
            keys.update(target)
            for key in sorted(keys, key=lambda k: (k[0].sort_key(), k[1])):
                coeffs = {}
                for j, img in enumerate(images[eq_index]):
                    c = img.coordinates().get(key)
                    if c:
                        coeffs[j] = c
                freq, exps = key
                yield (eq_index, [str(freq) or "1", list(exps)]), coeffs, target.get(key, ZERO)

    res = solve_affine(rows(), len(monos))
    diagnostic = None
    if res.particular is None:
        eq_index, term = res.violated
        diagnostic = {"inconsistent": True, "equation": eq_index, "term": term}
    return AffineSolutionSpace(res.particular, res.kernel, monos, diagnostic)


def ansatz_functions(space: AffineSolutionSpace, num_vars: int) -> tuple[ExpPoly | None, list[ExpPoly]]:
    """Turn an ansatz solution space back into ExpPolys."""
    part = None
    if space.particular is not None:
        part = polynomial_from_vector(space.labels, space.particular, num_vars)
    return part, [polynomial_from_vector(space.labels, v, num_vars) for v in space.kernel]


def exppoly_fit(g: GridFunction, frequencies: Sequence[Frequency], max_degree: int) -> ExpPoly | None:
    """Exact ``sum_lambda p_lambda(x) lambda^x`` through every sample of ``g``, or None.

    The polynomial parts have total degree ``<= max_degree``.  A returned
    ExpPoly reproduces every window value exactly.
    """
    num_vars = g.window.num_vars
    freqs = list(dict.fromkeys(frequencies))
    monos = monomials_up_to(max_degree, num_vars)
    unknowns = [(f, m) for f in freqs for m in monos]
    if g.window.volume < len(unknowns):
        warnings.warn(f"fit has {len(unknowns)} unknowns but only {g.window.volume} samples",
                      UnderdeterminedFitWarning, stacklevel=2)

    def rows():
        for x, value in g.items():
            powers = {f: f.power(x) for f in freqs}
            coeffs = {}
            for j, (f, m) in enumerate(unknowns):
                mono = 1
                for xi, e in zip(x, m):
                    mono *= xi ** e
                if mono:
                    coeffs[j] = powers[f] * mono
            yield list(x), coeffs, value

    res = solve_affine(rows(), len(unknowns))
    if res.particular is None:
        return None
    parts: dict = {}
    for (f, m), c in zip(unknowns, res.particular):
        if c:
            parts.setdefault(f, {})[m] = c
    fitted = ExpPoly(num_vars, {f: Polynomial(num_vars, t) for f, t in parts.items()})
    if any(fitted.evaluate(x) != v for x, v in g.items()):
        return None
    return fitted


def fit_minimal_degree(g: GridFunction, frequencies: Sequence[Frequency],
                       degree_cap: int) -> tuple[ExpPoly | None, int | None]:
    """Escalate the fit degree from 0 to ``degree_cap``; return the first certificate."""
    for deg in range(degree_cap + 1):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UnderdeterminedFitWarning)
            fitted = exppoly_fit(g, frequencies, deg)
        if fitted is not None:
            return fitted, deg
    return None, None


def kernel_grid_functions(space: AffineSolutionSpace, window: GridWindow) -> list[GridFunction]:
    return [GridFunction(window, tuple(v)) for v in space.kernel]


def grid_in_span(vectors: Sequence[Sequence[Scalar]], target: Sequence[Scalar]) -> bool:
    red = RowReducer(0)
    for v in vectors:
        red.add(v)
    return red.contains(target)


def stabilized_kernel(equations, window: GridWindow, growth: Sequence[int] | None = None,
                      max_growths: int = 8, rhs_free: bool = True):
    """Grow ``window`` until the kernel dimension repeats over two successive enlargements.

    Returns ``(space, window, sizes, dims, stabilized)`` where ``space`` is the
    solution space on the last window examined.
    """
    equations = _normalize_equations(equations, window.num_vars)
    if growth is None:
        growth = []
        for c in range(window.num_vars):
            span = 1
            for chain, _ in equations:
                offs = [o[c] for o, _ in expand_chain(chain)] or [0]
                span = max(span, max(offs) - min(offs))
            growth.append(span)
    homogeneous = [(chain, None) for chain, _ in equations] if rhs_free else equations
    sizes, dims = [], []
    current = window
    for attempt in range(max_growths + 1):
        if attempt:
            current = current.grown(growth)
        space = window_kernel(homogeneous, current)
        sizes.append(list(current.shape))
        dims.append(space.dimension)
        if len(dims) >= 3 and dims[-1] == dims[-2] == dims[-3]:
            return space, current, sizes, dims, True
    return space, current, sizes, dims, False
