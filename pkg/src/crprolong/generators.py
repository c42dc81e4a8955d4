"""Seeded random instances of model and condition-star data, used by tests and demos."""
from __future__ import annotations

from fractions import Fraction
from typing import List

import numpy as np

from .acstruct import ModelSpec, StarSpec
from .scalar import I, ONE, Scalar, ZERO
from .symexpr import Const, Expr, add, conj, mul, z, zbar


def random_scalar(rng: np.random.Generator, bound: int = 3, den: int = 2,
                  allow_zero: bool = True) -> Scalar:
    while True:
        re = Fraction(int(rng.integers(-bound, bound + 1)), int(rng.integers(1, den + 1)))
        im = Fraction(int(rng.integers(-bound, bound + 1)), int(rng.integers(1, den + 1)))
        s = Scalar(re, im)
        if allow_zero or not s.is_zero():
            return s


def random_model_spec(n: int, rng: np.random.Generator, density: float = 0.6) -> ModelSpec:
    def table():
        return tuple(tuple(random_scalar(rng) if rng.random() < density else ZERO
                           for _ in range(n - 1)) for _ in range(n - 1))
    return ModelSpec(n, table(), table())


def random_linear(n: int, rng: np.random.Generator, terms: int = 2) -> Expr:
    """A nonzero constant-free linear form in all 2n coordinates."""
    out = []
    for _ in range(terms):
        j = int(rng.integers(1, n + 1))
        v = z(j) if rng.random() < 0.5 else zbar(j)
        out.append(mul(Const(random_scalar(rng, allow_zero=False)), v))
    return add(*out)


def random_poly(n: int, rng: np.random.Generator, terms: int = 3, max_deg: int = 2) -> Expr:
    out = []
    for _ in range(terms):
        factors: List[Expr] = [Const(random_scalar(rng, allow_zero=False))]
        for _ in range(int(rng.integers(1, max_deg + 1))):
            j = int(rng.integers(1, n + 1))
            factors.append(z(j) if rng.random() < 0.5 else zbar(j))
        out.append(mul(*factors))
    return add(*out)


def valid_star_spec(n: int, w: Expr, bs: List[Expr]) -> StarSpec:
    """Condition-star data solving all constraints, parametrised by ``w`` and ``B_j`` (all vanishing at 0).

    c = 2i|w|^2 / (1 - |w|^2),  d = 2w / (1 - |w|^2),  A_j = i w conj(B_j).
    """
    if len(bs) != n - 1:
        raise ValueError(f"need {n - 1} B entries")
    s = mul(w, conj(w))
    denom = Const(ONE) - s
    c = mul(Const(Scalar(0, 2)), s) / denom
    d = mul(Const(Scalar(2)), w) / denom
    entries: List[Expr] = []
    for b in bs:
        entries.append(mul(Const(I), w, conj(b)))
        entries.append(b)
    entries += [c, d]
    return StarSpec(n, tuple(entries))


def random_star_spec(n: int, rng: np.random.Generator, valid: bool = True) -> StarSpec:
    if valid:
        w = random_linear(n, rng, terms=1)
        bs = [random_linear(n, rng, terms=int(rng.integers(1, 3))) for _ in range(n - 1)]
        return valid_star_spec(n, w, bs)
    if rng.random() < 0.5:
        return StarSpec(n, tuple(random_poly(n, rng) for _ in range(2 * n)))
    # perturb one entry of a valid spec
    base = random_star_spec(n, rng, True)
    k = int(rng.integers(1, 2 * n + 1))
    entries = list(base.entries)
    entries[k - 1] = add(entries[k - 1], random_linear(n, rng, terms=1))
    return StarSpec(n, tuple(entries))
