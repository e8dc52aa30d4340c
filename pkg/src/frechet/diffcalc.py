"""Composed difference operators on Z^d, sampled grid functions, and Fréchet checks."""

from __future__ import annotations

import itertools
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .exppoly import ExpPoly
from .scalar import ZERO, Scalar


class EmptyWindowError(ValueError):
    """The stencil does not fit anywhere inside the window."""


def _as_vector(h) -> tuple[int, ...]:
    if isinstance(h, int):
        return (h,)
    if hasattr(h, "free"):  # GroupElement on a free group
        if getattr(h, "torsion", ()):
            raise ValueError("difference steps on grids must live in Z^d")
        return tuple(h.free)
    return tuple(int(v) for v in h)


@dataclass(frozen=True)
class DiffChain:
    """The composed operator ``Delta_{h_1} ... Delta_{h_n}`` as a sorted multiset of steps."""

    steps: tuple[tuple[int, ...], ...]
    num_vars: int

    def __init__(self, steps: Iterable = (), num_vars: int | None = None):
        vecs = tuple(sorted(_as_vector(h) for h in steps))
        if num_vars is None:
            if not vecs:
                raise ValueError("an empty chain needs an explicit num_vars")
            num_vars = len(vecs[0])
        if any(len(v) != num_vars for v in vecs):
            raise ValueError("chain steps have inconsistent dimensions")
        object.__setattr__(self, "steps", vecs)
        object.__setattr__(self, "num_vars", num_vars)

    def __len__(self) -> int:
        return len(self.steps)

    def __add__(self, other: "DiffChain") -> "DiffChain":
        return DiffChain(self.steps + other.steps, self.num_vars)

    def without(self, step) -> "DiffChain":
        """Drop one copy of ``step``."""
        steps = list(self.steps)
        steps.remove(_as_vector(step))
        return DiffChain(steps, self.num_vars)

    def to_json(self) -> list:
        return [list(h) for h in self.steps]

    def __str__(self) -> str:
        def fmt(h):
            return str(h[0]) if len(h) == 1 else "(" + ",".join(map(str, h)) + ")"
        return "".join(f"Δ[{fmt(h)}]" for h in self.steps) or "id"


def expand_chain(chain: DiffChain) -> list[tuple[tuple[int, ...], int]]:
    """Signed stencil of the chain, summed over all subsets of its steps.

    ``Delta_{h_1}..Delta_{h_n} f(x) = sum_S (-1)^(n-|S|) f(x + sum_{i in S} h_i)``.
    Coincident offsets are merged and offsets whose coefficients cancel are dropped.
    """
    acc: dict[tuple[int, ...], int] = {(0,) * chain.num_vars: 1}
    for h in chain.steps:
        nxt: dict[tuple[int, ...], int] = defaultdict(int)
        for off, c in acc.items():
            nxt[tuple(a + b for a, b in zip(off, h))] += c
            nxt[off] -= c
        acc = {k: v for k, v in nxt.items() if v}
    return sorted(acc.items(), key=lambda kv: tuple(-v for v in kv[0]))


def apply_chain_exppoly(chain: DiffChain, f: ExpPoly) -> ExpPoly:
    if chain.num_vars != f.num_vars:
        raise ValueError(f"chain in Z^{chain.num_vars} applied to a function on Z^{f.num_vars}")
    for h in chain.steps:
        f = f.delta(h)
    return f


@dataclass(frozen=True)
class GridWindow:
    """Half-open box ``lower <= x < upper`` in Z^d."""

    lower: tuple[int, ...]
    upper: tuple[int, ...]

    def __init__(self, lower, upper):
        lower, upper = _as_vector(lower), _as_vector(upper)
        if len(lower) != len(upper):
            raise ValueError("window bounds have different dimensions")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def sized(cls, sizes: Sequence[int], lower: Sequence[int] | None = None) -> "GridWindow":
        lower = tuple(lower) if lower is not None else (0,) * len(sizes)
        return cls(lower, tuple(a + s for a, s in zip(lower, sizes)))

    @property
    def num_vars(self) -> int:
        return len(self.lower)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(max(0, u - l) for l, u in zip(self.lower, self.upper))

    @property
    def volume(self) -> int:
        return math.prod(self.shape)

    def is_empty(self) -> bool:
        return any(u <= l for l, u in zip(self.lower, self.upper))

    def points(self):
        """Window points in row-major order (last coordinate fastest)."""
        return itertools.product(*(range(l, u) for l, u in zip(self.lower, self.upper)))

    def strides(self) -> tuple[int, ...]:
        out, acc = [], 1
        for s in reversed(self.shape):
            out.append(acc)
            acc *= s
        return tuple(reversed(out))

    def index(self, x: Sequence[int]) -> int:
        return sum((xi - l) * s for xi, l, s in zip(x, self.lower, self.strides()))

    def __contains__(self, x) -> bool:
        return all(l <= xi < u for xi, l, u in zip(x, self.lower, self.upper))

    def valid_for(self, chain: DiffChain) -> "GridWindow":
        """Largest sub-box of points whose whole stencil lies inside this window."""
        offsets = [off for off, _ in expand_chain(chain)]
        if not offsets:
            return self
        lo = [min(o[c] for o in offsets) for c in range(self.num_vars)]
        hi = [max(o[c] for o in offsets) for c in range(self.num_vars)]
        return GridWindow(
            tuple(l - a for l, a in zip(self.lower, lo)),
            tuple(u - b for u, b in zip(self.upper, hi)),
        )

    def grown(self, amount: Sequence[int]) -> "GridWindow":
        return GridWindow(self.lower, tuple(u + a for u, a in zip(self.upper, amount)))

    def to_json(self) -> dict:
        return {"lower": list(self.lower), "upper": list(self.upper)}

    @classmethod
    def from_json(cls, data) -> "GridWindow":
        window = cls(tuple(data["lower"]), tuple(data["upper"]))
        if window.is_empty():
            raise ValueError(f"window needs lower < upper in every coordinate, got {data}")
        return window


@dataclass(frozen=True)
class GridFunction:
    window: GridWindow
    values: tuple[Scalar, ...]

    def __post_init__(self):
        vals = tuple(Scalar.coerce(v) for v in self.values)
        if len(vals) != self.window.volume:
            raise ValueError(f"{len(vals)} values for a window of volume {self.window.volume}")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_function(cls, fn: Callable, window: GridWindow) -> "GridFunction":
        return cls(window, tuple(fn(x) for x in window.points()))

    @classmethod
    def sample(cls, f: ExpPoly, window: GridWindow) -> "GridFunction":
        return cls.from_function(f.evaluate, window)

    def __getitem__(self, x) -> Scalar:
        return self.values[self.window.index(_as_vector(x))]

    def items(self):
        return zip(self.window.points(), self.values)

    def is_zero(self) -> bool:
        return not any(self.values)

    def nonzero_points(self) -> list[tuple[tuple[int, ...], Scalar]]:
        return [(x, v) for x, v in self.items() if v]

    def to_json(self) -> dict:
        return {"window": self.window.to_json(), "values": [v.to_json() for v in self.values]}

    @classmethod
    def from_json(cls, data) -> "GridFunction":
        return cls(GridWindow.from_json(data["window"]),
                   tuple(Scalar.from_json(v) for v in data["values"]))


def apply_chain_grid(chain: DiffChain, g: GridFunction) -> GridFunction:
    if chain.num_vars != g.window.num_vars:
        raise ValueError("chain and grid live in different dimensions")
    valid = g.window.valid_for(chain)
    if valid.is_empty():
        raise EmptyWindowError(f"stencil of {chain} does not fit inside {g.window.to_json()}")
    strides = g.window.strides()
    stencil = [(sum(o * s for o, s in zip(off, strides)), c) for off, c in expand_chain(chain)]
    vals = g.values
    out = []
    for x in valid.points():
        base = g.window.index(x)
        acc = ZERO
        for shift, c in stencil:
            v = vals[base + shift]
            if v:
                acc = acc + v * c
        out.append(acc)
    return GridFunction(valid, tuple(out))


def frechet_check_unmixed(f: ExpPoly | GridFunction, h, order: int) -> bool:
    """True iff ``Delta_h^order`` annihilates ``f`` (on the valid window for grids)."""
    if order < 1:
        raise ValueError("order must be at least 1")
    vec = _as_vector(h)
    chain = DiffChain([vec] * order)
    if isinstance(f, GridFunction):
        return apply_chain_grid(chain, f).is_zero()
    return not apply_chain_exppoly(chain, f)


@dataclass
class DjokovicReport:
    """Outcome of a sampled comparison of the mixed and unmixed Fréchet equations.

    This is an empirical check over the supplied samples, not a proof: the
    equations quantify over every step of the group.
    """

    degree_bound: int
    unmixed_ok: bool
    mixed_ok: bool
    unmixed_witness: dict | None = None
    mixed_witness: dict | None = None
    unmixed_checked: int = 0
    mixed_checked: int = 0
    note: str = field(default="sampled empirical check over the supplied steps, not a proof")

    def to_json(self) -> dict:
        return {
            "degree_bound": self.degree_bound,
            "unmixed_ok": self.unmixed_ok,
            "mixed_ok": self.mixed_ok,
            "unmixed_witness": self.unmixed_witness,
            "mixed_witness": self.mixed_witness,
            "unmixed_checked": self.unmixed_checked,
            "mixed_checked": self.mixed_checked,
            "note": self.note,
        }


def djokovic_crosscheck(f: ExpPoly, degree_bound: int, trial_tuples, trial_steps) -> DjokovicReport:
    order = degree_bound + 1
    report = DjokovicReport(degree_bound, True, True)
    for h in trial_steps:
        h = _as_vector(h)
        residue = apply_chain_exppoly(DiffChain([h] * order), f)
        report.unmixed_checked += 1
        if residue and report.unmixed_ok:
            report.unmixed_ok = False
            report.unmixed_witness = {"step": list(h), "residue": str(residue)}
    for steps in trial_tuples:
        chain = DiffChain(steps, f.num_vars)
        if len(chain) != order:
            raise ValueError(f"trial tuple has {len(chain)} steps, expected {order}")
        residue = apply_chain_exppoly(chain, f)
        report.mixed_checked += 1
        if residue and report.mixed_ok:
            report.mixed_ok = False
            report.mixed_witness = {"steps": chain.to_json(), "residue": str(residue)}
    return report
