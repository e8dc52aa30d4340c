"""Exact row reduction over Q(i).

Rows are stored sparsely as ``{column: Scalar}`` dicts.  The reducer keeps
its pivot rows in fully reduced form at all times, so the state after any
sequence of insertions is the unique reduced row echelon form of the rows
seen so far; the insertion order never changes the result.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .scalar import ZERO, Scalar

ScalarMatrix = Sequence[Sequence]
SparseRow = dict


def _sparse(row) -> SparseRow:
    if isinstance(row, Mapping):
        items = row.items()
    else:
        items = enumerate(row)
    out = {}
    for c, v in items:
        if v:
            out[c] = v if isinstance(v, Scalar) else Scalar.coerce(v)
    return out


def _axpy(target: SparseRow, coef: Scalar, source: SparseRow) -> None:
    # target -= coef * source, in place
    for c, v in source.items():
        cur = target.get(c)
        new = -(coef * v) if cur is None else cur - coef * v
        if new:
            target[c] = new
        else:
            target.pop(c, None)


class RowReducer:
    """Incremental reduced row echelon form.

    ``augmented`` names a right-hand-side column; a row whose leading entry
    falls there is an inconsistency and is recorded instead of kept.
    """

    def __init__(self, ncols: int, augmented: int | None = None):
        self.ncols = ncols
        self.augmented = augmented
        self.pivots: dict[int, SparseRow] = {}
        self.inconsistent_tag = None
        self.inconsistent = False

    def reduce(self, row) -> SparseRow:
        r = _sparse(row)
        for c in [c for c in r if c in self.pivots]:
            coef = r.get(c)
            if coef:
                _axpy(r, coef, self.pivots[c])
        return r

    def add(self, row, tag=None) -> bool:
        """Insert a row; return True when it raised the rank."""
        r = self.reduce(row)
        if not r:
            return False
        lead = min(r)
        if lead == self.augmented:
            if not self.inconsistent:
                self.inconsistent = True
                self.inconsistent_tag = tag
            return False
        inv = r[lead].inverse()
        r = {c: v * inv for c, v in r.items()}
        for prow in self.pivots.values():
            coef = prow.get(lead)
            if coef:
                _axpy(prow, coef, r)
        self.pivots[lead] = r
        return True

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def free_columns(self) -> list[int]:
        width = self.ncols if self.augmented is None else self.augmented
        return [c for c in range(width) if c not in self.pivots]

    def rows(self) -> list[SparseRow]:
        return [self.pivots[c] for c in sorted(self.pivots)]

    def nullspace(self) -> list[list[Scalar]]:
        width = self.ncols if self.augmented is None else self.augmented
        basis = []
        for f in self.free_columns():
            v = [ZERO] * width
            v[f] = Scalar(1)
            for p, prow in self.pivots.items():
                coef = prow.get(f)
                if coef:
                    v[p] = -coef
            basis.append(v)
        return basis

    def particular(self) -> list[Scalar] | None:
        if self.augmented is None or self.inconsistent:
            return None
        v = [ZERO] * self.augmented
        for p, prow in self.pivots.items():
            v[p] = prow.get(self.augmented, ZERO)
        return v

    def contains(self, row) -> bool:
        return not self.reduce(row)


def rref(matrix: ScalarMatrix, ncols: int | None = None) -> tuple[list[list[Scalar]], list[int]]:
    """Dense reduced row echelon form and pivot columns."""
    if ncols is None:
        ncols = len(matrix[0]) if matrix else 0
    red = RowReducer(ncols)
    for row in matrix:
        red.add(row)
    pivots = sorted(red.pivots)
    dense = [[red.pivots[p].get(c, ZERO) for c in range(ncols)] for p in pivots]
    return dense, pivots


def rank(matrix: Iterable) -> int:
    rows = list(matrix)
    red = RowReducer(0)
    for row in rows:
        red.add(row)
    return red.rank


def rref_nullspace(matrix: ScalarMatrix, ncols: int | None = None) -> list[list[Scalar]]:
    """Basis of ``{v : M v = 0}`` read off the RREF; size is ``ncols - rank``."""
    if ncols is None:
        ncols = len(matrix[0]) if matrix else 0
    red = RowReducer(ncols)
    for row in matrix:
        red.add(row)
    return red.nullspace()


def independent_subset(vectors: Sequence) -> list[int]:
    """Indices of a maximal linearly independent prefix-greedy subset."""
    red = RowReducer(0)
    return [i for i, v in enumerate(vectors) if red.add(v)]


def in_span(basis: Sequence, vector) -> bool:
    red = RowReducer(0)
    for b in basis:
        red.add(b)
    return red.contains(vector)


def mat_vec(matrix: ScalarMatrix, vector: Sequence) -> list[Scalar]:
    out = []
    for row in matrix:
        acc = ZERO
        for a, b in zip(row, vector):
            if a and b:
                acc = acc + Scalar.coerce(a) * b
        out.append(acc)
    return out


@dataclass
class SolveResult:
    particular: list[Scalar] | None
    kernel: list[list[Scalar]]
    rank: int
    violated: object = None
    notes: list[str] = field(default_factory=list)


def solve_affine(rows: Iterable[tuple[object, Mapping, object]], ncols: int) -> SolveResult:
    """Solve sparse equations ``(tag, {col: coef}, rhs)`` exactly.

    An inconsistent system yields ``particular=None`` and ``violated`` set to
    the tag of the first equation that exposed the contradiction.
    """
    red = RowReducer(ncols + 1, augmented=ncols)
    for tag, coeffs, rhs in rows:
        row = dict(coeffs)
        if rhs:
            row[ncols] = rhs
        red.add(row, tag)
    return SolveResult(
        particular=red.particular(),
        kernel=red.nullspace(),
        rank=red.rank,
        violated=red.inconsistent_tag,
    )
