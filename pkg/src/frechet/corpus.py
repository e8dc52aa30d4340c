"""Seeded random inputs for property tests and the acceptance corpus.

The default seed comes from the ``FRECHET_SEED`` environment variable.
"""

from __future__ import annotations

import os
import random
from fractions import Fraction

from .exppoly import ExpPoly, Frequency, Polynomial
from .groups import IntMatrix
from .scalar import Scalar

DEFAULT_SEED = 20240607

# the frequency pool used by the randomized Montel instances
BASE_POOL = (Scalar(1), Scalar(2), Scalar(-1), Scalar(1, 1))


def seed_from_env(default: int = DEFAULT_SEED) -> int:
    raw = os.environ.get("FRECHET_SEED")
    return int(raw) if raw not in (None, "") else default


def make_rng(seed: int | None = None) -> random.Random:
    return random.Random(seed_from_env() if seed is None else seed)


def random_int_matrix(rng: random.Random, max_rows: int = 4, max_cols: int = 4,
                      bound: int = 20) -> IntMatrix:
    rows, cols = rng.randint(1, max_rows), rng.randint(1, max_cols)
    return IntMatrix.from_rows(
        [[rng.randint(-bound, bound) for _ in range(cols)] for _ in range(rows)], cols)


def random_scalar(rng: random.Random, bound: int = 5, complex_prob: float = 0.0) -> Scalar:
    re = Fraction(rng.randint(-bound, bound))
    if rng.random() < 0.2:
        re /= rng.randint(1, 4)
    im = rng.randint(-bound, bound) if rng.random() < complex_prob else 0
    return Scalar(re, im)


def random_polynomial(rng: random.Random, num_vars: int, max_degree: int, terms: int = 4,
                      exact_degree: bool = False, complex_prob: float = 0.0) -> Polynomial:
    out: dict = {}
    for _ in range(terms):
        deg = rng.randint(0, max_degree)
        out[_random_exps(rng, num_vars, deg)] = random_scalar(rng, complex_prob=complex_prob)
    if exact_degree and max_degree >= 0:
        lead = _random_exps(rng, num_vars, max_degree)
        c = random_scalar(rng)
        out[lead] = c if c else Scalar(1)
    return Polynomial(num_vars, out)


def _random_exps(rng: random.Random, num_vars: int, deg: int) -> tuple[int, ...]:
    exps = [0] * num_vars
    for _ in range(deg):
        exps[rng.randrange(num_vars)] += 1
    return tuple(exps)


def random_frequency(rng: random.Random, num_vars: int, pool=BASE_POOL) -> Frequency:
    return Frequency(tuple(rng.choice(pool) for _ in range(num_vars)))


def random_exppoly(rng: random.Random, num_vars: int = 1, max_degree: int = 3,
                   max_parts: int = 3, pool=BASE_POOL, complex_prob: float = 0.0) -> ExpPoly:
    parts: dict = {}
    for _ in range(rng.randint(1, max_parts)):
        freq = random_frequency(rng, num_vars, pool)
        poly = random_polynomial(rng, num_vars, max_degree, terms=rng.randint(1, 3),
                                 complex_prob=complex_prob)
        parts[freq] = parts[freq] + poly if freq in parts else poly
    return ExpPoly(num_vars, parts)


def random_step(rng: random.Random, num_vars: int, bound: int = 4, nonzero: bool = True):
    while True:
        h = tuple(rng.randint(-bound, bound) for _ in range(num_vars))
        if any(h) or not nonzero:
            return h
