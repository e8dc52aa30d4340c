"""Exact verification of Fréchet-type difference equations on abelian groups.

Functions are exponential polynomials over the Gaussian rationals; every
computation is exact.
"""

from .diffcalc import (DiffChain, GridFunction, GridWindow, apply_chain_exppoly, apply_chain_grid,
                       djokovic_crosscheck, expand_chain, frechet_check_unmixed)
from .exppoly import ExpPoly, Frequency, Polynomial, Span, delta, tau_span_dimension, translate
from .groups import (INFINITE, GroupElement, GroupSpec, IntMatrix, coset_representatives, generates,
                     hermite_basis, in_subgroup, smith_normal_form, subgroup_index)
from .montel import (Counterexample, HypothesisError, MontelReport, MontelSystem, TupleLimitError,
                     counterexample, degree_bound, invariant_space, montel_condition,
                     reduction_trace, verify_montel)
from .scalar import I, ONE, ZERO, Scalar
from .solver import (AffineSolutionSpace, exppoly_fit, fit_minimal_degree, polynomial_ansatz_solve,
                     stabilized_kernel, window_kernel)

__version__ = "0.1.0"

__all__ = [
    "AffineSolutionSpace", "Counterexample", "DiffChain", "ExpPoly", "Frequency", "GridFunction",
    "GridWindow", "GroupElement", "GroupSpec", "HypothesisError", "I", "INFINITE", "IntMatrix",
    "MontelReport", "MontelSystem", "ONE", "Polynomial", "Scalar", "Span", "TupleLimitError", "ZERO",
    "apply_chain_exppoly", "apply_chain_grid", "coset_representatives", "counterexample", "degree_bound",
    "delta", "djokovic_crosscheck", "expand_chain", "exppoly_fit", "fit_minimal_degree",
    "frechet_check_unmixed", "generates", "hermite_basis", "in_subgroup", "invariant_space",
    "montel_condition", "polynomial_ansatz_solve", "reduction_trace", "smith_normal_form",
    "stabilized_kernel", "subgroup_index", "tau_span_dimension", "translate", "verify_montel",
    "window_kernel",
]
