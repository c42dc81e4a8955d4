"""Complexified almost complex structures on C^n.

Matrices act on coefficient column vectors in the basis order
``(d/dz1, d/dzbar1, ..., d/dzn, d/dzbarn)``.  Row and column indices in the
public API are 1-based, so ``entry(2k-1, 2l)`` is the d/dzk component of
``J(d/dzbar_l)``.  Odd indices are holomorphic directions, even ones
antiholomorphic.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .ratfunc import RatFunc
from .scalar import I, ONE, ZERO, Scalar
from .symexpr import (Const, Expr, ZeroVerdict, add, conj, from_ratfunc, has_sqrt, is_zero,
                      mul, normalize_rational, simplify, z, zbar)

Matrix = List[List[Expr]]

_ZERO = Const(ZERO)


def _std_diag(idx: int) -> Expr:
    # idx is 1-based; odd -> +i, even -> -i
    return Const(I) if idx % 2 == 1 else Const(-I)


class StructureMatrix:
    """A 2n x 2n matrix of Exprs, stored in complexified form only."""

    __slots__ = ("n", "entries", "kind")

    def __init__(self, n: int, entries: Sequence[Sequence[Expr]], kind: str = "raw"):
        if n < 1:
            raise ValueError("n must be positive")
        rows = tuple(tuple(r) for r in entries)
        if len(rows) != 2 * n or any(len(r) != 2 * n for r in rows):
            raise ValueError(f"expected a {2 * n}x{2 * n} matrix")
        self.n = n
        self.entries = rows
        self.kind = kind

    @property
    def size(self) -> int:
        return 2 * self.n

    def entry(self, r: int, c: int) -> Expr:
        return self.entries[r - 1][c - 1]

    def as_lists(self) -> Matrix:
        return [list(r) for r in self.entries]

    def map(self, fn) -> "StructureMatrix":
        return StructureMatrix(self.n, [[fn(e) for e in row] for row in self.entries], self.kind)

    def has_sqrt(self) -> bool:
        return any(has_sqrt(e) for row in self.entries for e in row)

    def __repr__(self):
        return f"StructureMatrix(n={self.n}, kind={self.kind!r})"


def matmul(a: Sequence[Sequence[Expr]], b: Sequence[Sequence[Expr]]) -> Matrix:
    rows, inner, cols = len(a), len(b), len(b[0])
    out = []
    for r in range(rows):
        row = []
        for c in range(cols):
            terms = [mul(a[r][k], b[k][c]) for k in range(inner)
                     if not _is_const_zero(a[r][k]) and not _is_const_zero(b[k][c])]
            row.append(add(*terms) if terms else _ZERO)
        out.append(row)
    return out


def _is_const_zero(e: Expr) -> bool:
    return isinstance(e, Const) and e.c.is_zero()


def matrix_verdicts(m: Sequence[Sequence[Expr]], seed: int = 0, trials: int = 20,
                    tol: float = 1e-9, n: Optional[int] = None) -> List[Tuple[int, int, ZeroVerdict]]:
    """Zero verdict for every entry, as ``(row, col, verdict)`` with 1-based indices."""
    out = []
    for r, row in enumerate(m, 1):
        for c, e in enumerate(row, 1):
            out.append((r, c, is_zero(e, trials=trials, tol=tol, seed=seed, n=n)))
    return out


def matrix_is_zero(m: Sequence[Sequence[Expr]], **kw) -> bool:
    return all(v for _, _, v in matrix_verdicts(m, **kw))


# ---------------------------------------------------------------------------
# specs

@dataclass(frozen=True)
class ModelSpec:
    """Linear forms ``Lt[2n, 2j-1] = sum_l alpha[j][l] z_l + beta[j][l] zbar_l`` (j < n)."""

    n: int
    alpha: Tuple[Tuple[Scalar, ...], ...]
    beta: Tuple[Tuple[Scalar, ...], ...]

    def __post_init__(self):
        m = self.n - 1
        if self.n < 2:
            raise ValueError("model structures need n >= 2")
        for tab in (self.alpha, self.beta):
            if len(tab) != m or any(len(r) != m for r in tab):
                raise ValueError(f"coefficient tables must be {m}x{m}")

    @classmethod
    def zero(cls, n: int) -> "ModelSpec":
        row = tuple(ZERO for _ in range(n - 1))
        return cls(n, tuple(row for _ in range(n - 1)), tuple(row for _ in range(n - 1)))

    @classmethod
    def from_coefficients(cls, n: int, alpha, beta) -> "ModelSpec":
        conv = lambda t: tuple(tuple(Scalar.coerce(c) for c in r) for r in t)
        return cls(n, conv(alpha), conv(beta))

    @classmethod
    def from_forms(cls, n: int, forms: Sequence[Expr]) -> "ModelSpec":
        """Read the coefficients off linear Exprs; rejects anything non-linear."""
        if len(forms) != n - 1:
            raise ValueError(f"expected {n - 1} linear forms")
        alpha, beta = [], []
        for j, f in enumerate(forms, 1):
            if has_sqrt(f):
                raise ValueError(f"form {j} is not a linear form in z'")
            rf = normalize_rational(f)
            if not rf.is_poly():
                raise ValueError(f"form {j} is not polynomial")
            scale = rf.den.const_value().inverse()
            arow = [ZERO] * (n - 1)
            brow = [ZERO] * (n - 1)
            for mono, c in rf.num.terms.items():
                if len(mono) != 1 or mono[0][1] != 1:
                    raise ValueError(f"form {j} is not linear and constant-free")
                v = mono[0][0]
                idx, bar = divmod(v, 2)
                if idx >= n - 1:
                    raise ValueError(f"form {j} depends on z{n} or zbar{n}")
                (brow if bar else arow)[idx] = c * scale
            alpha.append(tuple(arow))
            beta.append(tuple(brow))
        return cls(n, tuple(alpha), tuple(beta))

    def form(self, j: int) -> Expr:
        """``Lt[2n, 2j-1]`` as an Expr."""
        terms = []
        for l in range(1, self.n):
            a, b = self.alpha[j - 1][l - 1], self.beta[j - 1][l - 1]
            if not a.is_zero():
                terms.append(mul(Const(a), z(l)))
            if not b.is_zero():
                terms.append(mul(Const(b), zbar(l)))
        return add(*terms) if terms else _ZERO

    def frame_coefficients(self) -> Tuple[Tuple[Tuple[Scalar, ...], ...], Tuple[Tuple[Scalar, ...], ...]]:
        """``(a, b)`` with ``beta_j(z) = sum_l a[j][l] z_l + b[j][l] zbar_l``."""
        h = Scalar(0, Fraction(-1, 2))
        a = tuple(tuple(h * c for c in r) for r in self.alpha)
        b = tuple(tuple(h * c for c in r) for r in self.beta)
        return a, b


@dataclass(frozen=True)
class StarSpec:
    """Entries ``Lt[2n-1, k]`` for k = 1..2n."""

    n: int
    entries: Tuple[Expr, ...]

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("condition-star structures need n >= 2")
        if len(self.entries) != 2 * self.n:
            raise ValueError(f"expected {2 * self.n} entries")

    @classmethod
    def zero(cls, n: int) -> "StarSpec":
        return cls(n, tuple(_ZERO for _ in range(2 * n)))

    def entry(self, k: int) -> Expr:
        return self.entries[k - 1]

    # named pieces for j < n
    def A(self, j: int) -> Expr:
        return self.entries[2 * j - 2]

    def B(self, j: int) -> Expr:
        return self.entries[2 * j - 1]

    @property
    def c(self) -> Expr:
        return self.entries[2 * self.n - 2]

    @property
    def d(self) -> Expr:
        return self.entries[2 * self.n - 1]


# ---------------------------------------------------------------------------
# builders

def _standard_rows(n: int) -> Matrix:
    size = 2 * n
    return [[_std_diag(r) if r == c else _ZERO for c in range(1, size + 1)]
            for r in range(1, size + 1)]


def build_standard(n: int) -> StructureMatrix:
    if n < 2:
        raise ValueError("n must be >= 2")
    return StructureMatrix(n, _standard_rows(n), "standard")


def build_model(spec: ModelSpec) -> StructureMatrix:
    n = spec.n
    rows = _standard_rows(n)
    for j in range(1, n):
        f = spec.form(j)
        rows[2 * n - 1][2 * j - 2] = f
        rows[2 * n - 2][2 * j - 1] = simplify(conj(f)) if not _is_const_zero(f) else _ZERO
    return StructureMatrix(n, rows, "model")


def build_condition_star(spec: StarSpec) -> StructureMatrix:
    n = spec.n
    rows = _standard_rows(n)
    top, bottom = rows[2 * n - 2], rows[2 * n - 1]
    for k in range(1, 2 * n + 1):
        e = spec.entry(k)
        top[k - 1] = add(top[k - 1], e)
        partner = k + 1 if k % 2 == 1 else k - 1
        ce = conj(e) if not _is_const_zero(e) else _ZERO
        bottom[partner - 1] = add(bottom[partner - 1], ce)
    return StructureMatrix(n, rows, "star")


def build_raw(n: int, overrides: dict) -> StructureMatrix:
    """J_st with selected entries replaced; keys are 1-based ``(row, col)``."""
    rows = _standard_rows(n)
    for (r, c), e in overrides.items():
        if not (1 <= r <= 2 * n and 1 <= c <= 2 * n):
            raise ValueError(f"entry ({r},{c}) out of range")
        rows[r - 1][c - 1] = e
    return StructureMatrix(n, rows, "raw")


# ---------------------------------------------------------------------------
# checks

def involution_residual(J: StructureMatrix) -> Matrix:
    """Entrywise simplified ``J*J + I``."""
    sq = matmul(J.entries, J.entries)
    for k in range(J.size):
        sq[k][k] = add(sq[k][k], Const(ONE))
    return [[simplify(e) for e in row] for row in sq]


def reality_residuals(J: StructureMatrix) -> List[Tuple[int, int, Expr]]:
    """``entry(2k, 2l) - conj(entry(2k-1, 2l-1))`` and the mixed analogue, per block."""
    out = []
    for k in range(1, J.n + 1):
        for l in range(1, J.n + 1):
            pairs = [((2 * k, 2 * l), (2 * k - 1, 2 * l - 1)),
                     ((2 * k, 2 * l - 1), (2 * k - 1, 2 * l))]
            for (r1, c1), (r2, c2) in pairs:
                res = simplify(add(J.entry(r1, c1), mul(Const(-ONE), conj(J.entry(r2, c2)))))
                out.append((r1, c1, res))
    return out


def star_constraint_residuals(spec: StarSpec) -> List[Expr]:
    """Residuals ``[J1_1..J1_{n-1}, J2_1..J2_{n-1}, J3, J4]``."""
    n = spec.n
    c, d = spec.c, spec.d
    two_i = Const(Scalar(0, 2))
    j1, j2 = [], []
    for j in range(1, n):
        A, B = spec.A(j), spec.B(j)
        j1.append(simplify(add(mul(two_i, A), mul(A, c), mul(conj(B), d))))
        j2.append(simplify(add(mul(B, c), mul(conj(A), d))))
    j3 = simplify(add(mul(two_i, c), mul(c, c), mul(d, conj(d))))
    j4 = simplify(mul(Const(Scalar(Fraction(1, 2))), add(c, conj(c))))
    return j1 + j2 + [j3, j4]


def star_constraint_names(n: int) -> List[str]:
    return ([f"J1[{j}]" for j in range(1, n)] + [f"J2[{j}]" for j in range(1, n)]
            + ["J3", "J4"])


def is_standard_row(J: StructureMatrix, r: int) -> bool:
    for c in range(1, J.size + 1):
        e = J.entry(r, c)
        target = _std_diag(r) if r == c else _ZERO
        if not is_zero(add(e, mul(Const(-ONE), target))):
            return False
    return True


def star_spec_of(J: StructureMatrix) -> Optional[StarSpec]:
    """Recover the condition-star data when rows 1..2n-2 are standard and the last rows are conjugate."""
    n = J.n
    if not all(is_standard_row(J, r) for r in range(1, 2 * n - 1)):
        return None
    top = [J.entry(2 * n - 1, k) for k in range(1, 2 * n + 1)]
    top[2 * n - 2] = add(top[2 * n - 2], Const(-I))
    spec = StarSpec(n, tuple(simplify(e) for e in top))
    rebuilt = build_condition_star(spec)
    for c in range(1, 2 * n + 1):
        diff = add(J.entry(2 * n, c), mul(Const(-ONE), rebuilt.entry(2 * n, c)))
        if not is_zero(diff):
            return None
    return spec


def model_spec_of(J: StructureMatrix) -> Optional[ModelSpec]:
    spec = star_spec_of(J)
    if spec is None:
        return None
    n = J.n
    # model shape: only even columns < 2n-1 of row 2n-1 may be nonzero
    for k in list(range(1, 2 * n - 1, 2)) + [2 * n - 1, 2 * n]:
        if not is_zero(spec.entry(k)):
            return None
    try:
        return ModelSpec.from_forms(n, [simplify(conj(spec.entry(2 * j))) for j in range(1, n)])
    except ValueError:
        return None


def classify(J: StructureMatrix) -> str:
    """Shape class: ``standard``, ``model``, ``star`` or ``raw``."""
    n = J.n
    if all(is_standard_row(J, r) for r in range(1, 2 * n + 1)):
        return "standard"
    if model_spec_of(J) is not None:
        return "model"
    if star_spec_of(J) is not None:
        return "star"
    return "raw"


def first_order_part(e: Expr) -> Expr:
    """Degree <= 1 Taylor part at 0 of a rational Expr with nonvanishing denominator at 0."""
    return from_ratfunc(RatFunc(normalize_rational(e).taylor(1)))
