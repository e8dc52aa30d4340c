"""Exact exponential polynomials on Z^d.

An :class:`ExpPoly` is a finite sum ``sum_lambda p_lambda(x) * lambda^x`` where
``lambda^x = prod_i lambda_i^x_i`` for a :class:`Frequency` of nonzero
Gaussian rationals and ``p_lambda`` is a :class:`Polynomial`.  Distinct
frequencies give linearly independent functions on Z^d, so the canonical
part map (no zero parts, no zero coefficients) is a faithful equality test.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .linalg import RowReducer
from .scalar import ONE, ZERO, Scalar

NEG_INF = -math.inf

Exps = tuple  # exponent vector, tuple[int, ...]


class DimensionError(ValueError):
    pass


def _vec(h, num_vars: int) -> tuple[int, ...]:
    if isinstance(h, int):
        h = (h,)
    h = tuple(int(v) for v in h)
    if len(h) != num_vars:
        raise DimensionError(f"vector of length {len(h)} used with {num_vars} variables")
    return h


@lru_cache(maxsize=None)
def _shift_rows(e: int, h: int) -> tuple[tuple[int, int], ...]:
    # (x + h)^e = sum_k C(e, k) h^(e-k) x^k
    return tuple((k, math.comb(e, k) * h ** (e - k)) for k in range(e + 1) if h or k == e)


class Polynomial:
    """Multivariate polynomial with Scalar coefficients, stored canonically."""

    __slots__ = ("num_vars", "terms")

    def __init__(self, num_vars: int, terms: Mapping | None = None):
        self.num_vars = num_vars
        clean = {}
        for exps, c in (terms or {}).items():
            exps = tuple(exps)
            if len(exps) != num_vars or any(e < 0 for e in exps):
                raise DimensionError(f"bad exponent vector {exps} for {num_vars} variables")
            c = Scalar.coerce(c)
            if c:
                clean[exps] = c
        self.terms = clean

    @classmethod
    def _raw(cls, num_vars: int, terms: dict) -> "Polynomial":
        obj = object.__new__(cls)
        obj.num_vars = num_vars
        obj.terms = terms
        return obj

    @classmethod
    def zero(cls, num_vars: int) -> "Polynomial":
        return cls._raw(num_vars, {})

    @classmethod
    def constant(cls, c, num_vars: int) -> "Polynomial":
        return cls(num_vars, {(0,) * num_vars: c})

    @classmethod
    def variable(cls, i: int, num_vars: int) -> "Polynomial":
        return cls(num_vars, {tuple(int(k == i) for k in range(num_vars)): 1})

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.num_vars == other.num_vars and self.terms == other.terms

    def __hash__(self):
        return hash((self.num_vars, frozenset(self.terms.items())))

    def total_degree(self) -> float | int:
        if not self.terms:
            return NEG_INF
        return max(sum(e) for e in self.terms)

    def _check(self, other: "Polynomial"):
        if self.num_vars != other.num_vars:
            raise DimensionError("polynomials in different numbers of variables")

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e)
            v = c if v is None else v + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return Polynomial._raw(self.num_vars, out)

    def __neg__(self) -> "Polynomial":
        return Polynomial._raw(self.num_vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def scale(self, c) -> "Polynomial":
        c = Scalar.coerce(c)
        if not c:
            return Polynomial.zero(self.num_vars)
        return Polynomial._raw(self.num_vars, {e: v * c for e, v in self.terms.items()})

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        if not isinstance(other, Polynomial):
            return self.scale(other)
        self._check(other)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = out.get(e)
                v = c1 * c2 if v is None else v + c1 * c2
                if v:
                    out[e] = v
                else:
                    out.pop(e, None)
        return Polynomial._raw(self.num_vars, out)

    def shift(self, h: Sequence[int]) -> "Polynomial":
        """``x -> p(x + h)``."""
        h = _vec(h, self.num_vars)
        if not any(h):
            return self
        out: dict = {}
        for exps, c in self.terms.items():
            factors = [_shift_rows(e, hi) for e, hi in zip(exps, h)]
            for combo in itertools.product(*factors):
                k = tuple(t[0] for t in combo)
                mult = math.prod(t[1] for t in combo)
                if not mult:
                    continue
                v = out.get(k)
                v = c * mult if v is None else v + c * mult
                if v:
                    out[k] = v
                else:
                    out.pop(k, None)
        return Polynomial._raw(self.num_vars, out)

    def evaluate(self, x: Sequence[int]) -> Scalar:
        x = _vec(x, self.num_vars)
        acc = ZERO
        for exps, c in self.terms.items():
            acc = acc + c * math.prod(xi ** e for xi, e in zip(x, exps))
        return acc

    def sorted_terms(self) -> list[tuple[Exps, Scalar]]:
        return sorted(self.terms.items(), key=lambda t: (-sum(t[0]), tuple(-e for e in t[0])))

    def to_json(self) -> list:
        return [{"exps": list(e), "coeff": c.to_json()} for e, c in self.sorted_terms()]

    @classmethod
    def from_json(cls, data, num_vars: int | None = None) -> "Polynomial":
        if not isinstance(data, list):
            raise ValueError("Polynomial must be a list of {exps, coeff} terms")
        terms: dict = {}
        for term in data:
            if not isinstance(term, dict) or set(term) != {"exps", "coeff"}:
                raise ValueError(f"malformed polynomial term {term!r}")
            exps = tuple(int(e) for e in term["exps"])
            if num_vars is None:
                num_vars = len(exps)
            c = Scalar.from_json(term["coeff"])
            terms[exps] = terms.get(exps, ZERO) + c
        if num_vars is None:
            raise ValueError("cannot infer the number of variables of an empty polynomial")
        return cls(num_vars, terms)

    def __str__(self) -> str:
        return _format_poly(self, "")

    def __repr__(self) -> str:
        return f"Polynomial({self})"


def _var_names(num_vars: int) -> list[str]:
    return ["x"] if num_vars == 1 else [f"x{i + 1}" for i in range(num_vars)]


def _format_poly(p: Polynomial, suffix: str) -> str:
    if not p.terms:
        return "0"
    names = _var_names(p.num_vars)
    pieces = []
    for exps, c in p.sorted_terms():
        mono = "*".join(n if e == 1 else f"{n}^{e}" for n, e in zip(names, exps) if e)
        mono = "*".join(s for s in (mono, suffix) if s)
        if not mono:
            pieces.append(str(c))
        elif c == 1:
            pieces.append(mono)
        elif c == -1:
            pieces.append("-" + mono)
        else:
            pieces.append(f"{c}*{mono}")
    text = " + ".join(pieces)
    return text.replace("+ -", "- ")


@dataclass(frozen=True)
class Frequency:
    bases: tuple[Scalar, ...]

    def __post_init__(self):
        bases = tuple(Scalar.coerce(b) for b in self.bases)
        if any(not b for b in bases):
            raise ValueError("frequency bases must be nonzero")
        object.__setattr__(self, "bases", bases)

    @classmethod
    def unit(cls, num_vars: int) -> "Frequency":
        return cls((ONE,) * num_vars)

    @property
    def num_vars(self) -> int:
        return len(self.bases)

    def is_unit(self) -> bool:
        return all(b == 1 for b in self.bases)

    def power(self, h: Sequence[int]) -> Scalar:
        """``lambda^h`` for an integer vector ``h`` (negative entries allowed)."""
        acc = ONE
        for b, e in zip(self.bases, h):
            if e:
                acc = acc * b ** e
        return acc

    def __mul__(self, other: "Frequency") -> "Frequency":
        return Frequency(tuple(a * b for a, b in zip(self.bases, other.bases)))

    def sort_key(self):
        return (not self.is_unit(), tuple((b.re, b.im) for b in self.bases))

    def to_json(self) -> list:
        return [b.to_json() for b in self.bases]

    @classmethod
    def from_json(cls, data) -> "Frequency":
        if not isinstance(data, list):
            raise ValueError("frequency must be a list of Scalars")
        return cls(tuple(Scalar.from_json(b) for b in data))

    def __str__(self) -> str:
        names = _var_names(len(self.bases))
        return "*".join(f"{_base_str(b)}^{n}" for b, n in zip(self.bases, names) if b != 1)


def _base_str(b: Scalar) -> str:
    text = str(b)
    return f"({text})" if text[0] == "-" or "/" in text else text


class ExpPoly:
    """Exact exponential polynomial on Z^d; immutable by convention."""

    __slots__ = ("num_vars", "parts")

    def __init__(self, num_vars: int, parts: Mapping[Frequency, Polynomial] | None = None):
        self.num_vars = num_vars
        clean = {}
        for freq, poly in (parts or {}).items():
            if freq.num_vars != num_vars or poly.num_vars != num_vars:
                raise DimensionError("part dimension does not match the ExpPoly")
            if poly:
                clean[freq] = clean[freq] + poly if freq in clean else poly
                if not clean[freq]:
                    del clean[freq]
        self.parts = clean

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, num_vars: int) -> "ExpPoly":
        return cls(num_vars)

    @classmethod
    def from_polynomial(cls, poly: Polynomial, freq: Frequency | None = None) -> "ExpPoly":
        freq = freq or Frequency.unit(poly.num_vars)
        return cls(poly.num_vars, {freq: poly})

    @classmethod
    def constant(cls, c, num_vars: int = 1) -> "ExpPoly":
        return cls.from_polynomial(Polynomial.constant(c, num_vars))

    @classmethod
    def variable(cls, i: int = 0, num_vars: int = 1) -> "ExpPoly":
        return cls.from_polynomial(Polynomial.variable(i, num_vars))

    @classmethod
    def exponential(cls, *bases) -> "ExpPoly":
        """The character ``x -> prod_i bases[i]^x_i``."""
        freq = Frequency(tuple(bases))
        return cls.from_polynomial(Polynomial.constant(1, freq.num_vars), freq)

    @classmethod
    def monomial(cls, exps: Sequence[int], coeff=1, freq: Frequency | None = None) -> "ExpPoly":
        exps = tuple(exps)
        return cls.from_polynomial(Polynomial(len(exps), {exps: coeff}), freq)

    # -- structure --------------------------------------------------------
    def __bool__(self) -> bool:
        return bool(self.parts)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Scalar)):
            other = ExpPoly.constant(other, self.num_vars)
        if not isinstance(other, ExpPoly):
            return NotImplemented
        return self.num_vars == other.num_vars and self.parts == other.parts

    def __hash__(self):
        return hash((self.num_vars, frozenset(self.parts.items())))

    def frequencies(self) -> list[Frequency]:
        return sorted(self.parts, key=Frequency.sort_key)

    def is_polynomial(self) -> bool:
        return all(freq.is_unit() for freq in self.parts)

    def total_degree(self) -> float | int:
        if not self.parts:
            return NEG_INF
        return max(p.total_degree() for p in self.parts.values())

    def polynomial_part(self) -> Polynomial:
        return self.parts.get(Frequency.unit(self.num_vars), Polynomial.zero(self.num_vars))

    # -- arithmetic -------------------------------------------------------
    def _coerce(self, other) -> "ExpPoly":
        if isinstance(other, ExpPoly):
            if other.num_vars != self.num_vars:
                raise DimensionError("ExpPolys in different numbers of variables")
            return other
        return ExpPoly.constant(other, self.num_vars)

    def __add__(self, other) -> "ExpPoly":
        other = self._coerce(other)
        parts = dict(self.parts)
        for freq, poly in other.parts.items():
            if freq in parts:
                merged = parts[freq] + poly
                if merged:
                    parts[freq] = merged
                else:
                    del parts[freq]
            else:
                parts[freq] = poly
        return ExpPoly._raw(self.num_vars, parts)

    __radd__ = __add__

    def __neg__(self) -> "ExpPoly":
        return ExpPoly._raw(self.num_vars, {f: -p for f, p in self.parts.items()})

    def __sub__(self, other) -> "ExpPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "ExpPoly":
        return self._coerce(other) - self

    def scale(self, c) -> "ExpPoly":
        c = Scalar.coerce(c)
        if not c:
            return ExpPoly.zero(self.num_vars)
        return ExpPoly._raw(self.num_vars, {f: p.scale(c) for f, p in self.parts.items()})

    def __mul__(self, other) -> "ExpPoly":
        if not isinstance(other, ExpPoly):
            return self.scale(other)
        other = self._coerce(other)
        out = ExpPoly.zero(self.num_vars)
        for f1, p1 in self.parts.items():
            for f2, p2 in other.parts.items():
                out = out + ExpPoly(self.num_vars, {f1 * f2: p1 * p2})
        return out

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "ExpPoly":
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        out = ExpPoly.constant(1, self.num_vars)
        for _ in range(k):
            out = out * self
        return out

    @classmethod
    def _raw(cls, num_vars: int, parts: dict) -> "ExpPoly":
        obj = object.__new__(cls)
        obj.num_vars = num_vars
        obj.parts = parts
        return obj

    # -- the operators ----------------------------------------------------
    def translate(self, h) -> "ExpPoly":
        """Translation ``x -> f(x + h)``; each part maps to ``lambda^h p(x+h) lambda^x``."""
        h = _vec(h, self.num_vars)
        if not any(h):
            return self
        parts = {}
        for freq, poly in self.parts.items():
            parts[freq] = poly.shift(h).scale(freq.power(h))
        return ExpPoly._raw(self.num_vars, parts)

    def delta(self, h) -> "ExpPoly":
        """Forward difference ``x -> f(x + h) - f(x)``."""
        return self.translate(h) - self

    def evaluate(self, x) -> Scalar:
        x = _vec(x, self.num_vars)
        acc = ZERO
        for freq, poly in self.parts.items():
            acc = acc + poly.evaluate(x) * freq.power(x)
        return acc

    __call__ = evaluate

    # -- translate spans --------------------------------------------------
    def coordinates(self) -> dict:
        """Coefficient vector keyed by ``(frequency, exponents)``."""
        return {(f, e): c for f, p in self.parts.items() for e, c in p.terms.items()}

    def tau_span_basis(self) -> list["ExpPoly"]:
        """A basis of the span of all translates of ``self``.

        The span splits as a direct sum over frequencies, and each summand is
        ``lambda^x`` times the translate span of the polynomial part, which is
        reached by the translates over the box ``{0..deg+1}^d``.
        """
        basis = []
        for freq in self.frequencies():
            poly = self.parts[freq]
            for h in _independent_shifts(poly):
                basis.append(ExpPoly.from_polynomial(poly.shift(h), freq))
        return basis

    def tau_span_dimension(self) -> int:
        return sum(len(_independent_shifts(p)) for p in self.parts.values())

    # -- serialization ----------------------------------------------------
    def to_json(self) -> list:
        return [{"freq": f.to_json(), "poly": self.parts[f].to_json()} for f in self.frequencies()]

    @classmethod
    def from_json(cls, data, num_vars: int | None = None) -> "ExpPoly":
        if not isinstance(data, list):
            raise ValueError("ExpPoly must be a list of {freq, poly} parts")
        parts: dict = {}
        for part in data:
            if not isinstance(part, dict) or set(part) != {"freq", "poly"}:
                raise ValueError(f"malformed ExpPoly part {part!r}")
            freq = Frequency.from_json(part["freq"])
            if num_vars is None:
                num_vars = freq.num_vars
            poly = Polynomial.from_json(part["poly"], freq.num_vars)
            parts[freq] = parts[freq] + poly if freq in parts else poly
        if num_vars is None:
            raise ValueError("cannot infer the number of variables of an empty ExpPoly")
        return cls(num_vars, parts)

    def __str__(self) -> str:
        if not self.parts:
            return "0"
        pieces = []
        for f in self.frequencies():
            p = self.parts[f]
            if f.is_unit():
                pieces.append(_format_poly(p, ""))
            elif len(p.terms) == 1:
                pieces.append(_format_poly(p, str(f)))
            else:
                pieces.append(f"({_format_poly(p, '')})*{f}")
        return " + ".join(pieces).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"ExpPoly({self})"


def _shift_box(num_vars: int, radius: int):
    return itertools.product(range(radius + 1), repeat=num_vars)


def _independent_shifts(poly: Polynomial) -> list[tuple[int, ...]]:
    """Shifts ``h`` whose translates ``p(x+h)`` form a basis of the translate span."""
    if not poly:
        return []
    radius = int(poly.total_degree()) + 1
    red = RowReducer(0)
    keys: dict = {}
    chosen = []
    for h in _shift_box(poly.num_vars, radius):
        row = {keys.setdefault(e, len(keys)): c for e, c in poly.shift(h).terms.items()}
        if red.add(row):
            chosen.append(h)
    # saturation double-check: one more layer of shifts adds nothing
    for h in _shift_box(poly.num_vars, radius + 1):
        if max(h) <= radius:
            continue
        row = {keys.setdefault(e, len(keys)): c for e, c in poly.shift(h).terms.items()}
        assert red.contains(row), "translate span did not saturate"
    return chosen


def translate(f: ExpPoly, h) -> ExpPoly:
    return f.translate(h)


def delta(f: ExpPoly, h) -> ExpPoly:
    return f.delta(h)


def evaluate(f: ExpPoly, x) -> Scalar:
    return f.evaluate(x)


def is_polynomial(f: ExpPoly) -> bool:
    return f.is_polynomial()


def total_degree(f: ExpPoly) -> float | int:
    return f.total_degree()


def tau_span_dimension(f: ExpPoly) -> int:
    return f.tau_span_dimension()


def span_basis(functions: Iterable[ExpPoly]) -> list[ExpPoly]:
    """Linearly independent subset (greedy, in order) of ``functions``."""
    red = RowReducer(0)
    keys: dict = {}
    out = []
    for f in functions:
        row = {keys.setdefault(k, len(keys)): c for k, c in f.coordinates().items()}
        if red.add(row):
            out.append(f)
    return out


class Span:
    """Exact membership tests in the span of a list of ExpPolys."""

    def __init__(self, functions: Iterable[ExpPoly] = ()):
        self._red = RowReducer(0)
        self._keys: dict = {}
        self.basis: list[ExpPoly] = []
        for f in functions:
            self.add(f)

    def _row(self, f: ExpPoly) -> dict:
        return {self._keys.setdefault(k, len(self._keys)): c for k, c in f.coordinates().items()}

    def add(self, f: ExpPoly) -> bool:
        if self._red.add(self._row(f)):
            self.basis.append(f)
            return True
        return False

    def __contains__(self, f: ExpPoly) -> bool:
        return self._red.contains(self._row(f))

    @property
    def dimension(self) -> int:
        return self._red.rank
