"""Vector fields with Expr coefficients, J-holomorphic frames, brackets and the Levi form."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .acstruct import ModelSpec, StarSpec, StructureMatrix, star_constraint_residuals
from .errors import (ConstraintViolated, NotOnSurface, NotTangent, ReductionOrderInsufficient,
                     SingularFrameAt0, SqrtCoefficientsUnsupported)
from .poly import Poly
from .ratfunc import RatFunc, zbarvar, zvar
from .scalar import I, ONE, ZERO, Scalar
from .symexpr import (Const, Expr, ZeroVerdict, _to_rf, add, conj, eval_expr, from_ratfunc,
                      has_sqrt, inv, is_zero, mul, normalize_rational, simplify, substitute,
                      wirtinger_d, z, zbar)

_ZERO = Const(ZERO)
_ONE = Const(ONE)
_I = Const(I)
_MINUS_HALF_I = Const(Scalar(0, Fraction(-1, 2)))


def _is_const_zero(e: Expr) -> bool:
    return isinstance(e, Const) and e.c.is_zero()


class VectorField:
    """``sum_j c[j] d/dz_j + d[j] d/dzbar_j`` (lists are 0-based, indices in names 1-based)."""

    __slots__ = ("n", "c", "d")

    def __init__(self, n: int, c: Sequence[Expr], d: Sequence[Expr]):
        if len(c) != n or len(d) != n:
            raise ValueError("coefficient lists must have length n")
        self.n = n
        self.c = tuple(c)
        self.d = tuple(d)

    @classmethod
    def zero(cls, n: int) -> "VectorField":
        return cls(n, [_ZERO] * n, [_ZERO] * n)

    @classmethod
    def basis(cls, n: int, j: int, bar: bool = False) -> "VectorField":
        c = [_ZERO] * n
        d = [_ZERO] * n
        (d if bar else c)[j - 1] = _ONE
        return cls(n, c, d)

    @classmethod
    def from_column(cls, n: int, col: Sequence[Expr]) -> "VectorField":
        return cls(n, col[0::2], col[1::2])

    def column(self) -> List[Expr]:
        out = []
        for a, b in zip(self.c, self.d):
            out += [a, b]
        return out

    def __add__(self, other: "VectorField") -> "VectorField":
        return VectorField(self.n, [add(a, b) for a, b in zip(self.c, other.c)],
                           [add(a, b) for a, b in zip(self.d, other.d)])

    def __sub__(self, other: "VectorField") -> "VectorField":
        return self + other.scale(Const(-ONE))

    def scale(self, f) -> "VectorField":
        f = f if isinstance(f, Expr) else Const(Scalar.coerce(f))
        return VectorField(self.n, [mul(f, a) for a in self.c], [mul(f, b) for b in self.d])

    def conj(self) -> "VectorField":
        return VectorField(self.n, [conj(b) for b in self.d], [conj(a) for a in self.c])

    def simplify(self) -> "VectorField":
        return VectorField(self.n, [simplify(a) for a in self.c], [simplify(b) for b in self.d])

    def apply(self, f: Expr) -> Expr:
        """The derivative ``X f``."""
        terms = []
        for j in range(1, self.n + 1):
            a, b = self.c[j - 1], self.d[j - 1]
            if not _is_const_zero(a):
                terms.append(mul(a, wirtinger_d(f, zvar(j))))
            if not _is_const_zero(b):
                terms.append(mul(b, wirtinger_d(f, zbarvar(j))))
        return add(*terms) if terms else _ZERO

    def has_sqrt(self) -> bool:
        return any(has_sqrt(e) for e in self.c + self.d)

    def evaluate(self, p: Sequence[complex]) -> np.ndarray:
        """Coefficient column in basis order at the point ``p``."""
        return np.array([eval_expr(e, p) for e in self.column()], dtype=complex)

    def verdicts(self, **kw) -> List[ZeroVerdict]:
        return [is_zero(e, **kw) for e in self.column()]

    def is_zero(self, **kw) -> bool:
        return all(self.verdicts(**kw))

    def to_text(self) -> str:
        parts = []
        for j in range(1, self.n + 1):
            for e, name in ((self.c[j - 1], f"d/dz{j}"), (self.d[j - 1], f"d/dzbar{j}")):
                s = simplify(e)
                if not _is_const_zero(s):
                    parts.append(f"({s})*{name}")
        return " + ".join(parts) if parts else "0"

    def __repr__(self):
        return f"VectorField({self.to_text()})"


def apply_structure(J: StructureMatrix, X: VectorField) -> VectorField:
    if J.n != X.n:
        raise ValueError("dimension mismatch")
    col = X.column()
    out = []
    for row in J.entries:
        terms = [mul(a, b) for a, b in zip(row, col) if not _is_const_zero(a) and not _is_const_zero(b)]
        out.append(add(*terms) if terms else _ZERO)
    return VectorField.from_column(X.n, out)


def eigen_residual(J: StructureMatrix, X: VectorField) -> VectorField:
    """``J X - i X``, simplified."""
    return (apply_structure(J, X) - X.scale(_I)).simplify()


def lie_bracket(X: VectorField, Y: VectorField) -> VectorField:
    if X.n != Y.n:
        raise ValueError("dimension mismatch")
    c = [simplify(add(X.apply(a), mul(Const(-ONE), Y.apply(b)))) for a, b in zip(Y.c, X.c)]
    d = [simplify(add(X.apply(a), mul(Const(-ONE), Y.apply(b)))) for a, b in zip(Y.d, X.d)]
    return VectorField(X.n, c, d)


def T_field(n: int) -> VectorField:
    """``T = i (d/dz_n - d/dzbar_n)``."""
    c = [_ZERO] * n
    d = [_ZERO] * n
    c[n - 1] = _I
    d[n - 1] = Const(-I)
    return VectorField(n, c, d)


# ---------------------------------------------------------------------------
# hypersurfaces

class Hypersurface:
    """A real hypersurface ``rho = 0`` near 0, with ``zbar_n`` solved as a truncated series.

    The reduction rule replaces ``zbar_n`` by a polynomial ``w`` in the other
    variables; for the Siegel surface the rule is exact.
    """

    def __init__(self, n: int, rho: Expr, order: int = 4):
        self.n = n
        self.rho = rho
        self.order = order
        rf = normalize_rational(rho)
        if not rf.is_poly():
            raise ValueError("defining function must be polynomial")
        if not (rf - rf.conj()).is_zero():
            raise ValueError("defining function must be real valued")
        poly = rf.num.scale(rf.den.const_value().inverse())
        vb = zbarvar(n)
        u = poly.diff(vb).const_value()
        if u.is_zero():
            raise ValueError("d rho / d zbar_n vanishes at 0; no graph reduction")
        self._poly = poly
        w = Poly()
        exact = False
        for _ in range(order + 2):
            val = poly.substitute(lambda v, w=w: w if v == vb else None)
            if val.is_zero():
                exact = True
                break
            w = (w - val.scale(u.inverse())).truncate(order)
        if not exact:
            val = poly.substitute(lambda v: w if v == vb else None)
            exact = val.is_zero()
        self.rule = w
        self.exact = exact

    @classmethod
    def siegel(cls, n: int, order: int = 4) -> "Hypersurface":
        terms = [mul(Const(Scalar(Fraction(1, 2))), add(z(n), zbar(n)))]
        terms += [mul(z(l), zbar(l)) for l in range(1, n)]
        return cls(n, add(*terms), order)

    @property
    def rule_expr(self) -> Expr:
        return from_ratfunc(RatFunc(self.rule))

    def reduce(self, e: Expr) -> Expr:
        """Substitute the graph rule for ``zbar_n``."""
        return substitute(e, {zbarvar(self.n): self.rule_expr})

    def residual_parts(self, e: Expr, max_degree: Optional[int] = None) -> Dict[int, Expr]:
        """Nonzero homogeneous Taylor parts of ``e`` on the surface, up to ``max_degree``."""
        if max_degree is None:
            max_degree = self.order
        if max_degree > self.order and not self.exact:
            raise ReductionOrderInsufficient(
                f"requested degree {max_degree} exceeds truncation order {self.order}")
        rf = normalize_rational(self.reduce(e))
        parts = rf.taylor(max_degree).homogeneous_parts()
        return {d: from_ratfunc(RatFunc(p)) for d, p in parts.items() if not p.is_zero()}

    def on_surface_verdict(self, e: Expr, **kw) -> ZeroVerdict:
        """Zero verdict for ``e`` restricted to the surface."""
        red = self.reduce(e)
        if self.exact or has_sqrt(red):
            return is_zero(red, **kw)
        parts = self.residual_parts(e)
        if not parts:
            return ZeroVerdict("ExactZero")
        deg, part = next(iter(parts.items()))
        return is_zero(part, **kw)

    def value(self, p: Sequence[complex]) -> float:
        return eval_expr(self.rho, p).real

    def point(self, zprime: Sequence[complex], t: float = 0.0) -> Tuple[complex, ...]:
        """A point of the Siegel-type surface ``Re z_n = -|z'|^2`` with ``Im z_n = t`` (exact only for Siegel)."""
        s = sum(abs(c) ** 2 for c in zprime)
        return tuple(zprime) + (complex(-s, t),)


# ---------------------------------------------------------------------------
# frames

@dataclass(frozen=True)
class Frame:
    n: int
    L: Tuple[VectorField, ...]
    T: VectorField
    provenance: str
    spec: object = None

    @property
    def Lbar(self) -> Tuple[VectorField, ...]:
        return tuple(X.conj() for X in self.L)

    def fields(self) -> List[VectorField]:
        return [self.T, *self.L, *self.Lbar]


def model_frame_coefficients(spec: ModelSpec) -> Tuple[List[Expr], List[Expr]]:
    """``(alpha_j, beta_j)`` for j = 1..n-1 on the Siegel surface."""
    alphas, betas = [], []
    for j in range(1, spec.n):
        beta = simplify(mul(_MINUS_HALF_I, spec.form(j)))
        alpha = simplify(add(mul(Const(-ONE), beta), mul(Const(Scalar(-2)), zbar(j))))
        alphas.append(alpha)
        betas.append(beta)
    return alphas, betas


def build_model_frame(spec: ModelSpec, surface: Optional[Hypersurface] = None) -> Frame:
    """Frame ``L_j = d/dz_j + alpha_j d/dz_n + beta_j d/dzbar_n``.

    Without ``surface`` the Siegel closed form is used; otherwise ``alpha_j``
    is fixed by tangency to the given surface.
    """
    n = spec.n
    alphas, betas = model_frame_coefficients(spec)
    if surface is not None:
        rho = surface.rho
        rn = wirtinger_d(rho, zvar(n))
        rnb = wirtinger_d(rho, zbarvar(n))
        alphas = [simplify(mul(Const(-ONE), add(wirtinger_d(rho, zvar(j)), mul(betas[j - 1], rnb)),
                               inv(rn)))
                  for j in range(1, n)]
    fields = []
    for j in range(1, n):
        c = [_ZERO] * n
        d = [_ZERO] * n
        c[j - 1] = _ONE
        c[n - 1] = alphas[j - 1]
        d[n - 1] = betas[j - 1]
        fields.append(VectorField(n, c, d))
    return Frame(n, tuple(fields), T_field(n), "model-on-dH", spec)


def star_frame_coefficients(spec: StarSpec) -> Tuple[List[Expr], List[Expr], Expr]:
    """``(a_i, b_i, b_n)`` of the condition-star frame."""
    n = spec.n
    a = [simplify(mul(_MINUS_HALF_I, spec.A(i))) for i in range(1, n)]
    b = [simplify(mul(_MINUS_HALF_I, conj(spec.B(i)))) for i in range(1, n)]
    bn = simplify(mul(conj(spec.d), inv(add(Const(Scalar(0, 2)), mul(Const(-ONE), conj(spec.c))))))
    return a, b, bn


def build_star_frame(spec: StarSpec, check: bool = True) -> List[VectorField]:
    """``X_i = d/dz_i + a_i d/dz_n + b_i d/dzbar_n`` (i < n) and ``X_n = d/dz_n + b_n d/dzbar_n``."""
    n = spec.n
    if check:
        bad = [k for k, r in enumerate(star_constraint_residuals(spec)) if not is_zero(r)]
        if bad:
            raise ConstraintViolated(f"constraint residuals nonzero at positions {bad}")
    a, b, bn = star_frame_coefficients(spec)
    out = []
    for i in range(1, n):
        c = [_ZERO] * n
        d = [_ZERO] * n
        c[i - 1] = _ONE
        c[n - 1] = a[i - 1]
        d[n - 1] = b[i - 1]
        out.append(VectorField(n, c, d))
    c = [_ZERO] * n
    d = [_ZERO] * n
    c[n - 1] = _ONE
    d[n - 1] = bn
    out.append(VectorField(n, c, d))
    return out


def build_raw_frame(J: StructureMatrix) -> List[VectorField]:
    """``X_k = d/dz_k + sum_l m_l d/dzbar_l`` solving ``J X_k = i X_k``.

    With J split into blocks by holomorphic/antiholomorphic rows and columns,
    ``m = -(D - iI)^{-1} C e_k``; valid near 0 where ``D - iI`` is invertible.
    """
    n = J.n
    D = [[J.entry(2 * r, 2 * c) for c in range(1, n + 1)] for r in range(1, n + 1)]
    for r in range(n):
        D[r][r] = add(D[r][r], Const(-I))
    out = []
    for k in range(1, n + 1):
        rhs = [simplify(mul(Const(-ONE), J.entry(2 * r, 2 * k - 1))) for r in range(1, n + 1)]
        m = solve_linear(D, rhs)
        c = [_ZERO] * n
        c[k - 1] = _ONE
        out.append(VectorField(n, c, m))
    return out


# ---------------------------------------------------------------------------
# exact linear algebra

def _nonzero_at_sample(rf: RatFunc, atoms: Dict[object, Expr]) -> bool:
    """Guard against pivots that vanish only through sqrt relations."""
    return not is_zero(from_ratfunc(rf, atoms))


def solve_linear(M: Sequence[Sequence[Expr]], rhs: Sequence[Expr]) -> List[Expr]:
    """Solve ``M x = rhs`` for square ``M`` by exact elimination.

    Square roots are treated as opaque atoms; pivots are accepted only when
    they are nonzero as rational functions and, if sqrt atoms occur, also on
    random samples.
    """
    size = len(M)
    opaque: Dict[Expr, object] = {}
    A = [[_to_rf(e, opaque) for e in row] + [_to_rf(r, opaque)] for row, r in zip(M, rhs)]
    atoms = {a: k for k, a in opaque.items()}
    for col in range(size):
        piv = None
        for r in range(col, size):
            if not A[r][col].is_zero() and (not atoms or _nonzero_at_sample(A[r][col], atoms)):
                piv = r
                break
        if piv is None:
            raise SingularFrameAt0(f"no pivot in column {col + 1}")
        A[col], A[piv] = A[piv], A[col]
        pinv = A[col][col].inverse()
        A[col] = [x * pinv for x in A[col]]
        for r in range(size):
            if r != col and not A[r][col].is_zero():
                f = A[r][col]
                A[r] = [x - f * y for x, y in zip(A[r], A[col])]
    return [from_ratfunc(A[r][size], atoms) for r in range(size)]


def _check_independent_at0(fields: Sequence[VectorField]):
    n = fields[0].n
    M = np.array([X.evaluate([0j] * n) for X in fields]).T
    if M.shape[0] != M.shape[1] or abs(np.linalg.det(M)) < 1e-12:
        raise SingularFrameAt0("frame fields are dependent at 0")


def solve_in_basis(Y: VectorField, fields: Sequence[VectorField]) -> List[Expr]:
    """Coefficients of ``Y`` in a basis of 2n fields."""
    _check_independent_at0(fields)
    cols = [X.column() for X in fields]
    size = len(cols)
    M = [[cols[c][r] for c in range(size)] for r in range(size)]
    return solve_linear(M, Y.column())


def solve_at_point(Y: VectorField, fields: Sequence[VectorField], p: Sequence[complex]) -> np.ndarray:
    M = np.array([X.evaluate(p) for X in fields]).T
    return np.linalg.solve(M, Y.evaluate(p))


@dataclass
class FrameDecomposition:
    gamma: Expr
    a_coeffs: List[Expr]
    b_coeffs: List[Expr]
    residual: VectorField

    def is_constant(self) -> bool:
        return all(_const_like(e) for e in [self.gamma, *self.a_coeffs, *self.b_coeffs])


def _const_like(e: Expr) -> bool:
    e = simplify(e)
    return isinstance(e, Const)


def normal_complement(n: int) -> VectorField:
    """``d/dz_n + d/dzbar_n``, transverse to the tangent frame at 0."""
    c = [_ZERO] * n
    d = [_ZERO] * n
    c[n - 1] = _ONE
    d[n - 1] = _ONE
    return VectorField(n, c, d)


def decompose_in_frame(Y: VectorField, frame: Frame) -> FrameDecomposition:
    """Write ``Y = gamma T + sum a_l L_l + sum b_l Lbar_l + residual``.

    The residual is the component along ``d/dz_n + d/dzbar_n``; it vanishes
    iff ``Y`` lies in the span of the frame.
    """
    n = frame.n
    N = normal_complement(n)
    fields = [frame.T, *frame.L, *frame.Lbar, N]
    if Y.has_sqrt() or any(X.has_sqrt() for X in fields):
        raise SqrtCoefficientsUnsupported("use solve_at_point for sqrt-bearing fields")
    coeffs = solve_in_basis(Y, fields)
    m = n - 1
    return FrameDecomposition(coeffs[0], coeffs[1:1 + m], coeffs[1 + m:1 + 2 * m],
                              N.scale(coeffs[-1]).simplify())


def structure_constants(frame: Frame) -> Dict[str, Expr]:
    """Constants ``gamma[j,kb]`` of ``[L_j, Lbar_k]`` and ``c[j,k]`` of ``[L_j, L_k]`` (j < k)."""
    out: Dict[str, Expr] = {}
    m = frame.n - 1
    Lb = frame.Lbar
    for j in range(1, m + 1):
        for k in range(1, m + 1):
            dec = decompose_in_frame(lie_bracket(frame.L[j - 1], Lb[k - 1]), frame)
            out[f"gamma[{j},{k}b]"] = simplify(dec.gamma)
    for j in range(1, m + 1):
        for k in range(j + 1, m + 1):
            dec = decompose_in_frame(lie_bracket(frame.L[j - 1], frame.L[k - 1]), frame)
            out[f"c[{j},{k}]"] = simplify(dec.gamma)
    return out


# ---------------------------------------------------------------------------
# Levi form

def levi_form(J: StructureMatrix, surface: Hypersurface, Lsec: VectorField,
              p: Sequence[complex], tol: float = 1e-10) -> float:
    """``Re d rho(J [X, JX])(p)`` for the real field ``X = Lsec + conj(Lsec)``."""
    if abs(eval_expr(surface.rho, p)) > tol:
        raise NotOnSurface(f"rho(p) = {eval_expr(surface.rho, p)}")
    X = Lsec + Lsec.conj()
    if abs(eval_expr(X.apply(surface.rho), p)) > tol:
        raise NotTangent("X rho(p) is not zero")
    JX = apply_structure(J, X)
    V = apply_structure(J, lie_bracket(X, JX))
    val = eval_expr(V.apply(surface.rho), p)
    if abs(val.imag) >= 1e-9:
        raise ValueError(f"Levi form has imaginary part {val.imag}")
    return val.real


# ---------------------------------------------------------------------------
# integrability defect

def defect_coefficients(Xs: Sequence[VectorField], j: int, k: int) -> List[Expr]:
    """Coefficients of ``Xbar_1..Xbar_n`` in ``[X_j, X_k]`` over ``{X_l, Xbar_l}``."""
    n = len(Xs)
    basis = [*Xs, *(X.conj() for X in Xs)]
    coeffs = solve_in_basis(lie_bracket(Xs[j - 1], Xs[k - 1]), basis)
    return [simplify(c) for c in coeffs[n:]]


defect_projection = defect_coefficients


def defect_at_point(Xs: Sequence[VectorField], j: int, k: int, p: Sequence[complex]) -> np.ndarray:
    n = len(Xs)
    basis = [*Xs, *(X.conj() for X in Xs)]
    return solve_at_point(lie_bracket(Xs[j - 1], Xs[k - 1]), basis, p)[n:]


def star_defect_closed_form(spec: StarSpec, j: int, k: int) -> Dict[str, Expr]:
    """``a, b`` with ``[X_j, X_k] = a d/dz_n + b d/dzbar_n`` and the resulting ``A, B``.

    ``A = (a - conj(b_n) b) / (1 - |b_n|^2)`` and ``B = (b - b_n a) / (1 - |b_n|^2)``.
    """
    Xs = build_star_frame(spec, check=False)
    n = spec.n
    br = lie_bracket(Xs[j - 1], Xs[k - 1])
    a, b = br.c[n - 1], br.d[n - 1]
    _, _, bn = star_frame_coefficients(spec)
    den = inv(add(_ONE, mul(Const(-ONE), bn, conj(bn))))
    A = simplify(mul(add(a, mul(Const(-ONE), conj(bn), b)), den))
    B = simplify(mul(add(b, mul(Const(-ONE), bn, a)), den))
    return {"a": a, "b": b, "A": A, "B": B}


def direction_varies(samples: Sequence[np.ndarray], threshold: float = 1e-3) -> Tuple[bool, float]:
    """Whether complex lines spanned by sample vectors differ; returns the largest normalized minor."""
    vecs = [v / np.linalg.norm(v) for v in samples if np.linalg.norm(v) > 1e-14]
    worst = 0.0
    for u in vecs[1:]:
        v0 = vecs[0]
        for a in range(len(u)):
            for b in range(a + 1, len(u)):
                worst = max(worst, abs(v0[a] * u[b] - v0[b] * u[a]))
    return worst > threshold, worst
