"""Finitely generated abelian groups ``Z^r x Z_m1 x ... x Z_mt`` and generation tests.

Every question about the subgroup spanned by a list of steps is answered in
the lift ``Z^(r+t)``: the steps are lifted to integer columns and the torsion
relations ``m_i * e_(r+i)`` are appended, so a single Smith normal form code
path serves free, finite and mixed groups alike.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

INFINITE = math.inf


class DimensionError(ValueError):
    """Raised when a group element does not fit its group."""


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise ValueError("IntMatrix entries do not match its dimensions")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> "IntMatrix":
        rows = tuple(tuple(int(v) for v in r) for r in rows)
        if cols is None:
            cols = len(rows[0]) if rows else 0
        return cls(len(rows), cols, rows)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, tuple((0,) * cols for _ in range(rows)))

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        cols = list(zip(*other.entries)) if other.rows else [()] * other.cols
        out = tuple(
            tuple(sum(a * b for a, b in zip(row, col)) for col in cols) for row in self.entries
        )
        return IntMatrix(self.rows, other.cols, out)

    def transpose(self) -> "IntMatrix":
        return IntMatrix(self.cols, self.rows, tuple(
            tuple(self.entries[i][j] for i in range(self.rows)) for j in range(self.cols)))

    def determinant(self) -> int:
        """Exact determinant by fraction-free (Bareiss) elimination."""
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        n = self.rows
        a = [list(r) for r in self.entries]
        sign, prev = 1, 1
        for k in range(n - 1):
            if a[k][k] == 0:
                swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
                if swap is None:
                    return 0
                a[k], a[swap] = a[swap], a[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[n - 1][n - 1] if n else 1

    def is_diagonal(self) -> bool:
        return all(v == 0 for i, r in enumerate(self.entries) for j, v in enumerate(r) if i != j)

    def diagonal(self) -> list[int]:
        return [self.entries[i][i] for i in range(min(self.rows, self.cols))]


def smith_normal_form(m: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Return ``(U, D, V)`` with ``U @ m @ V == D`` and ``U``, ``V`` unimodular.

    ``D`` is diagonal with nonnegative entries forming a divisibility chain.
    The pivot at each stage is the entry of smallest absolute value in the
    remaining block, ties broken lexicographically by (row, column).
    """
    rows, cols = m.rows, m.cols
    a = [list(r) for r in m.entries]
    u = [[int(i == j) for j in range(rows)] for i in range(rows)]
    v = [[int(i == j) for j in range(cols)] for i in range(cols)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    def add_row(src, dst, q):
        # row_dst -= q * row_src
        ra, rs = a[dst], a[src]
        for c in range(cols):
            ra[c] -= q * rs[c]
        ua, us = u[dst], u[src]
        for c in range(rows):
            ua[c] -= q * us[c]

    def add_col(src, dst, q):
        # col_dst -= q * col_src
        for r in a:
            r[dst] -= q * r[src]
        for r in v:
            r[dst] -= q * r[src]

    for t in range(min(rows, cols)):
        while True:
            pivot = None
            for i in range(t, rows):
                for j in range(t, cols):
                    x = a[i][j]
                    if x and (pivot is None or abs(x) < pivot[0]):
                        pivot = (abs(x), i, j)
            if pivot is None:
                break
            _, pi, pj = pivot
            swap_rows(t, pi)
            swap_cols(t, pj)
            p = a[t][t]
            dirty = False
            for i in range(t + 1, rows):
                if a[i][t]:
                    add_row(t, i, a[i][t] // p)
                    dirty = dirty or a[i][t] != 0
            for j in range(t + 1, cols):
                if a[t][j]:
                    add_col(t, j, a[t][j] // p)
                    dirty = dirty or a[t][j] != 0
            if dirty:
                continue
            # pivot now isolated; enforce divisibility of the remaining block
            bad = next(
                (i for i in range(t + 1, rows) for j in range(t + 1, cols) if a[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(bad, t, -1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]

    return (
        IntMatrix.from_rows(u, rows),
        IntMatrix.from_rows(a, cols),
        IntMatrix.from_rows(v, cols),
    )


def hermite_basis(columns: Sequence[Sequence[int]], dim: int) -> list[list[int]] | None:
    """Lower-triangular basis of the lattice spanned by ``columns`` in ``Z^dim``.

    Returns ``dim`` basis columns ``b_0..b_{dim-1}`` with ``b_j[i] == 0`` for
    ``i < j``, positive diagonal, and ``0 <= b_j[i] < b_i[i]`` for ``j < i``.
    Returns None when the lattice does not have full rank.
    """
    work = [list(c) for c in columns if any(c)]
    basis: list[list[int]] = []
    for row in range(dim):
        # gcd-combine all remaining columns on this row into a single one
        while True:
            live = [c for c in work if c[row]]
            if len(live) <= 1:
                break
            live.sort(key=lambda c: abs(c[row]))
            head = live[0]
            for c in live[1:]:
                q = c[row] // head[row]
                for k in range(dim):
                    c[k] -= q * head[k]
            work = [c for c in work if any(c)]
        live = [c for c in work if c[row]]
        if not live:
            return None
        head = live[0]
        work = [c for c in work if c is not head]
        if head[row] < 0:
            head = [-x for x in head]
        basis.append(head)
    for i in range(dim):
        d = basis[i][i]
        for j in range(i):
            q = basis[j][i] // d
            if q:
                basis[j] = [x - q * y for x, y in zip(basis[j], basis[i])]
    return basis


@dataclass(frozen=True)
class GroupSpec:
    free_rank: int
    torsion_orders: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "torsion_orders", tuple(int(m) for m in self.torsion_orders))
        if self.free_rank < 0:
            raise ValueError("free_rank must be nonnegative")
        if any(m < 2 for m in self.torsion_orders):
            raise ValueError("torsion orders must be >= 2")

    @classmethod
    def z(cls, d: int) -> "GroupSpec":
        return cls(d, ())

    @property
    def lift_rank(self) -> int:
        return self.free_rank + len(self.torsion_orders)

    def is_free(self) -> bool:
        return not self.torsion_orders

    def order(self) -> float:
        if self.free_rank:
            return INFINITE
        return math.prod(self.torsion_orders)

    def element(self, free: Iterable[int] = (), torsion: Iterable[int] = ()) -> "GroupElement":
        free, torsion = tuple(free), tuple(torsion)
        if len(free) != self.free_rank or len(torsion) != len(self.torsion_orders):
            raise DimensionError(
                f"element with {len(free)} free / {len(torsion)} torsion coordinates "
                f"does not belong to {self}"
            )
        return GroupElement(free, tuple(t % m for t, m in zip(torsion, self.torsion_orders)),
                            self.torsion_orders)

    def identity(self) -> "GroupElement":
        return self.element((0,) * self.free_rank, (0,) * len(self.torsion_orders))

    def from_lift(self, vec: Sequence[int]) -> "GroupElement":
        return self.element(vec[: self.free_rank], vec[self.free_rank:])

    def relation_columns(self) -> list[list[int]]:
        n, r = self.lift_rank, self.free_rank
        return [[m if k == r + i else 0 for k in range(n)] for i, m in enumerate(self.torsion_orders)]

    def to_json(self) -> dict:
        return {"free_rank": self.free_rank, "torsion": list(self.torsion_orders)}

    @classmethod
    def from_json(cls, data) -> "GroupSpec":
        return cls(int(data["free_rank"]), tuple(data.get("torsion", ())))

    def __str__(self) -> str:
        parts = [f"Z^{self.free_rank}"] if self.free_rank else []
        parts += [f"Z_{m}" for m in self.torsion_orders]
        return " x ".join(parts) or "0"


@dataclass(frozen=True)
class GroupElement:
    free: tuple[int, ...]
    torsion: tuple[int, ...] = ()
    orders: tuple[int, ...] = ()

    def __add__(self, other: "GroupElement") -> "GroupElement":
        if self.orders != other.orders or len(self.free) != len(other.free):
            raise DimensionError("adding elements of different groups")
        return GroupElement(
            tuple(a + b for a, b in zip(self.free, other.free)),
            tuple((a + b) % m for a, b, m in zip(self.torsion, other.torsion, self.orders)),
            self.orders,
        )

    def __neg__(self) -> "GroupElement":
        return GroupElement(tuple(-a for a in self.free),
                            tuple(-a % m for a, m in zip(self.torsion, self.orders)), self.orders)

    def lift(self) -> list[int]:
        return list(self.free) + list(self.torsion)

    def is_identity(self) -> bool:
        return not any(self.free) and not any(self.torsion)

    def to_json(self) -> dict:
        return {"free": list(self.free), "torsion": list(self.torsion)}


def element_from_json(group: GroupSpec, data) -> GroupElement:
    if isinstance(data, (list, tuple)):
        return group.element(data, ())
    return group.element(data.get("free", ()), data.get("torsion", ()))


def as_element(group: GroupSpec, step) -> GroupElement:
    """Accept a GroupElement, an int (rank-1 groups) or a free-part vector."""
    if isinstance(step, GroupElement):
        if len(step.free) != group.free_rank or step.orders != group.torsion_orders:
            raise DimensionError(f"{step} does not belong to {group}")
        return step
    if isinstance(step, int):
        step = (step,)
    return group.element(step, (0,) * len(group.torsion_orders))


def _lifted_columns(group: GroupSpec, steps) -> list[list[int]]:
    cols = [as_element(group, h).lift() for h in steps]
    return cols + group.relation_columns()


def _lift_matrix(group: GroupSpec, steps) -> IntMatrix:
    cols = _lifted_columns(group, steps)
    n = group.lift_rank
    return IntMatrix(n, len(cols), tuple(tuple(c[i] for c in cols) for i in range(n)))


def snf_divisors(group: GroupSpec, steps) -> list[int]:
    """Invariant factors of the lifted generator matrix (one per lifted coordinate)."""
    n = group.lift_rank
    _, d, _ = smith_normal_form(_lift_matrix(group, steps))
    diag = d.diagonal()
    return diag + [0] * (n - len(diag))


def subgroup_index(group: GroupSpec, steps) -> float | int:
    """Index of the subgroup generated by ``steps``; ``INFINITE`` if rank-deficient."""
    divisors = snf_divisors(group, steps)
    if any(d == 0 for d in divisors):
        return INFINITE
    return math.prod(divisors)


def generates(group: GroupSpec, steps) -> bool:
    return subgroup_index(group, steps) == 1


class CosetReducer:
    """Maps group elements to canonical coset representatives of a finite-index subgroup.

    The representatives form the box ``0 <= x_i < a_i`` where ``a_i`` is the
    diagonal of the Hermite basis of the lifted subgroup lattice.
    """

    def __init__(self, group: GroupSpec, steps):
        self.group = group
        self.basis = hermite_basis(_lifted_columns(group, steps), group.lift_rank)
        if self.basis is None:
            raise ValueError("subgroup has infinite index; no finite transversal")
        self.moduli = [self.basis[i][i] for i in range(group.lift_rank)]

    @property
    def index(self) -> int:
        return math.prod(self.moduli)

    def reduce_vector(self, vec: Sequence[int]) -> tuple[int, ...]:
        x = list(vec)
        for i, col in enumerate(self.basis):
            q = x[i] // col[i]
            if q:
                x = [a - q * b for a, b in zip(x, col)]
        return tuple(x)

    def reduce(self, element) -> GroupElement:
        return self.group.from_lift(self.reduce_vector(as_element(self.group, element).lift()))

    def position(self, element) -> int:
        """Mixed-radix index of the coset, first coordinate fastest."""
        rep = self.reduce_vector(as_element(self.group, element).lift())
        pos, radix = 0, 1
        for x, m in zip(rep, self.moduli):
            pos += x * radix
            radix *= m
        return pos

    def representatives(self) -> list[GroupElement]:
        ranges = [range(m) for m in reversed(self.moduli)]
        return [self.group.from_lift(tuple(reversed(p))) for p in itertools.product(*ranges)]

    def contains(self, element) -> bool:
        return not any(self.reduce_vector(as_element(self.group, element).lift()))


def coset_representatives(group: GroupSpec, steps) -> list[GroupElement]:
    """Complete transversal of ``group`` modulo the subgroup generated by ``steps``."""
    if subgroup_index(group, steps) == INFINITE:
        raise ValueError("subgroup has infinite index; no finite transversal")
    return CosetReducer(group, steps).representatives()


def in_subgroup(group: GroupSpec, steps, element) -> bool:
    """Exact membership of ``element`` in the subgroup generated by ``steps``.

    Solves ``M y = element`` over the integers via the Smith form of the lifted
    generator matrix, so it also works for infinite-index subgroups.
    """
    mat = _lift_matrix(group, steps)
    u, d, _ = smith_normal_form(mat)
    target = as_element(group, element).lift()
    rhs = [sum(u[i, k] * target[k] for k in range(mat.rows)) for i in range(mat.rows)]
    diag = d.diagonal()
    for i, r in enumerate(rhs):
        di = diag[i] if i < len(diag) else 0
        if di == 0:
            if r:
                return False
        elif r % di:
            return False
    return True
