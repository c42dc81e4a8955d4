"""Symbolic expressions in z_1..z_n, zbar_1..zbar_n over Q(i).

Expressions are immutable trees.  Rational subexpressions normalise to
:class:`~crprolong.ratfunc.RatFunc`; square roots stay as opaque nodes and are
handled numerically by :func:`is_zero`.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from .errors import (
    NegativeSqrtArgument,
    NoValidSamplePoint,
    ParseError,
    PoleAtPoint,
    SqrtPresent,
)
from .poly import Poly
from .ratfunc import OPAQUE_BASE, RatFunc, lex_key, var_name, zbarvar, zvar
from .scalar import I, ONE, ZERO, Scalar, format_scalar

__all__ = [
    "Expr", "Var", "Const", "Sum", "Prod", "Neg", "Inv", "Sqrt", "Conj",
    "RatFunc", "Scalar", "parse", "to_text", "wirtinger_d", "conj",
    "normalize_rational", "simplify", "eval_expr", "is_zero", "ZeroVerdict",
    "const", "z", "zbar", "x", "y", "add", "mul", "neg", "inv", "sqrt",
    "from_ratfunc", "has_sqrt", "max_index", "substitute", "to_complex_fn",
]


# ---------------------------------------------------------------------------
# node types

class Expr:
    __slots__ = ("_h",)

    def __add__(self, other):
        return add(self, _lift(other))

    def __radd__(self, other):
        return add(_lift(other), self)

    def __sub__(self, other):
        return add(self, neg(_lift(other)))

    def __rsub__(self, other):
        return add(_lift(other), neg(self))

    def __mul__(self, other):
        return mul(self, _lift(other))

    def __rmul__(self, other):
        return mul(_lift(other), self)

    def __truediv__(self, other):
        return mul(self, inv(_lift(other)))

    def __rtruediv__(self, other):
        return mul(_lift(other), inv(self))

    def __neg__(self):
        return neg(self)

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only nonnegative integer powers are supported")
        if k == 0:
            return Const(ONE)
        return mul(*([self] * k))

    def __str__(self):
        return to_text(self)

    def _key(self):
        raise NotImplementedError

    def __eq__(self, other):
        return isinstance(other, Expr) and type(self) is type(other) and self._key() == other._key()

    def __hash__(self):
        try:
            return self._h
        except AttributeError:
            h = hash((type(self).__name__, self._key()))
            object.__setattr__(self, "_h", h)
            return h


class Var(Expr):
    __slots__ = ("v",)

    def __init__(self, v: int):
        self.v = v

    def _key(self):
        return self.v

    @property
    def index(self) -> int:
        return self.v // 2 + 1

    @property
    def bar(self) -> bool:
        return bool(self.v & 1)

    def __repr__(self):
        return f"Var({var_name(self.v)})"


class Const(Expr):
    __slots__ = ("c",)

    def __init__(self, c):
        self.c = Scalar.coerce(c)

    def _key(self):
        return self.c

    def __repr__(self):
        return f"Const({self.c})"


class _Nary(Expr):
    __slots__ = ("args",)

    def __init__(self, args: Tuple[Expr, ...]):
        self.args = tuple(args)

    def _key(self):
        return self.args

    def __repr__(self):
        return f"{type(self).__name__}({', '.join(map(repr, self.args))})"


class Sum(_Nary):
    __slots__ = ()


class Prod(_Nary):
    __slots__ = ()


class _Unary(Expr):
    __slots__ = ("arg",)

    def __init__(self, arg: Expr):
        self.arg = arg

    def _key(self):
        return self.arg

    def __repr__(self):
        return f"{type(self).__name__}({self.arg!r})"


class Neg(_Unary):
    __slots__ = ()


class Inv(_Unary):
    __slots__ = ()


class Sqrt(_Unary):
    __slots__ = ()


class Conj(_Unary):
    __slots__ = ()


# ---------------------------------------------------------------------------
# smart constructors (light simplification only)

ZERO_E = Const(ZERO)
ONE_E = Const(ONE)


def _lift(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, RatFunc):
        return from_ratfunc(x)
    return Const(Scalar.coerce(x))


def const(c) -> Const:
    return Const(Scalar.coerce(c))


def z(j: int) -> Var:
    return Var(zvar(j))


def zbar(j: int) -> Var:
    return Var(zbarvar(j))


def x(j: int) -> Expr:
    return mul(add(z(j), zbar(j)), Const(Scalar(Fraction(1, 2))))


def y(j: int) -> Expr:
    # (z - zbar)/(2i) = -i/2 (z - zbar)
    return mul(add(z(j), neg(zbar(j))), Const(Scalar(0, Fraction(-1, 2))))


def add(*xs: Expr) -> Expr:
    flat = []
    acc = ZERO
    for e in xs:
        parts = e.args if isinstance(e, Sum) else (e,)
        for p in parts:
            if isinstance(p, Const):
                acc = acc + p.c
            else:
                flat.append(p)
    if not acc.is_zero():
        flat.append(Const(acc))
    if not flat:
        return ZERO_E
    if len(flat) == 1:
        return flat[0]
    return Sum(tuple(flat))


def mul(*xs: Expr) -> Expr:
    flat = []
    acc = ONE
    sign = False
    for e in xs:
        parts = e.args if isinstance(e, Prod) else (e,)
        for p in parts:
            if isinstance(p, Neg):
                sign = not sign
                p = p.arg
                if isinstance(p, Prod):
                    for q in p.args:
                        if isinstance(q, Const):
                            acc = acc * q.c
                        else:
                            flat.append(q)
                    continue
            if isinstance(p, Const):
                acc = acc * p.c
            else:
                flat.append(p)
    if sign:
        acc = -acc
    if acc.is_zero():
        return ZERO_E
    if not flat:
        return Const(acc)
    if not acc.is_one():
        flat.insert(0, Const(acc))
    if len(flat) == 1:
        return flat[0]
    return Prod(tuple(flat))


def neg(e: Expr) -> Expr:
    if isinstance(e, Const):
        return Const(-e.c)
    if isinstance(e, Neg):
        return e.arg
    if isinstance(e, Prod) and isinstance(e.args[0], Const):
        return mul(Const(-e.args[0].c), *e.args[1:])
    return Neg(e)


def inv(e: Expr) -> Expr:
    if isinstance(e, Const):
        if e.c.is_zero():
            raise ZeroDivisionError("inverse of the constant 0")
        return Const(e.c.inverse())
    if isinstance(e, Inv):
        return e.arg
    return Inv(e)


def _rational_sqrt(q: Fraction) -> Optional[Fraction]:
    if q < 0:
        return None
    n, d = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if n * n == q.numerator and d * d == q.denominator:
        return Fraction(n, d)
    return None


def sqrt(e: Expr) -> Expr:
    if isinstance(e, Const) and e.c.is_real():
        r = _rational_sqrt(e.c.re)
        if r is not None:
            return Const(Scalar(r))
    return Sqrt(e)


def conj_node(e: Expr) -> Expr:
    return Conj(e)


# ---------------------------------------------------------------------------
# traversal helpers

def has_sqrt(e: Expr) -> bool:
    if isinstance(e, Sqrt):
        return True
    if isinstance(e, _Nary):
        return any(has_sqrt(a) for a in e.args)
    if isinstance(e, _Unary):
        return has_sqrt(e.arg)
    return False


def max_index(e: Expr) -> int:
    """Largest coordinate index appearing in ``e`` (0 if constant)."""
    if isinstance(e, Var):
        return e.index
    if isinstance(e, _Nary):
        return max((max_index(a) for a in e.args), default=0)
    if isinstance(e, _Unary):
        return max_index(e.arg)
    return 0


def _var_code(var) -> int:
    if isinstance(var, Var):
        return var.v
    if isinstance(var, int):
        return var
    if isinstance(var, str):
        m = re.fullmatch(r"(zbar|z)(\d+)", var)
        if m:
            j = int(m.group(2))
            return zbarvar(j) if m.group(1) == "zbar" else zvar(j)
    raise ValueError(f"not a coordinate variable: {var!r}")


# ---------------------------------------------------------------------------
# conjugation

def conj(e: Expr) -> Expr:
    """Complex conjugate with Conj pushed to the leaves."""
    memo: Dict[int, Expr] = {}

    def go(t: Expr) -> Expr:
        k = id(t)
        if k in memo:
            return memo[k]
        if isinstance(t, Var):
            r = Var(t.v ^ 1)
        elif isinstance(t, Const):
            r = Const(t.c.conj())
        elif isinstance(t, Sum):
            r = add(*(go(a) for a in t.args))
        elif isinstance(t, Prod):
            r = mul(*(go(a) for a in t.args))
        elif isinstance(t, Neg):
            r = neg(go(t.arg))
        elif isinstance(t, Inv):
            r = inv(go(t.arg))
        elif isinstance(t, Sqrt):
            r = Sqrt(go(t.arg))
        elif isinstance(t, Conj):
            r = push_conj(t.arg)
        else:
            raise TypeError(t)
        memo[k] = r
        return r

    return go(e)


def push_conj(e: Expr) -> Expr:
    """Remove every Conj node (pure rewrite, value preserving)."""
    if isinstance(e, (Var, Const)):
        return e
    if isinstance(e, Conj):
        return conj(e.arg)
    if isinstance(e, Sum):
        return add(*(push_conj(a) for a in e.args))
    if isinstance(e, Prod):
        return mul(*(push_conj(a) for a in e.args))
    if isinstance(e, Neg):
        return neg(push_conj(e.arg))
    if isinstance(e, Inv):
        return inv(push_conj(e.arg))
    if isinstance(e, Sqrt):
        return Sqrt(push_conj(e.arg))
    raise TypeError(e)


# ---------------------------------------------------------------------------
# rational normal form

def normalize_rational(e: Expr) -> RatFunc:
    """Canonical rational function of a sqrt-free expression."""
    return _to_rf(e, None)


def _to_rf(e: Expr, opaque: Optional[Dict[Expr, object]]) -> RatFunc:
    """RatFunc of ``e``; with ``opaque`` given, square roots become atoms ``s`` with ``s^2`` reduced."""
    memo: Dict[int, RatFunc] = {}
    squares: Dict[int, RatFunc] = {}

    def go(t: Expr) -> RatFunc:
        k = id(t)
        r = memo.get(k)
        if r is not None:
            return r
        if isinstance(t, Var):
            r = RatFunc.var(t.v)
        elif isinstance(t, Const):
            r = RatFunc.const(t.c)
        elif isinstance(t, Sum):
            parts = [go(a) for a in t.args]
            r = parts[0]
            for p in parts[1:]:
                r = r + p
        elif isinstance(t, Prod):
            parts = [go(a) for a in t.args]
            r = parts[0]
            for p in parts[1:]:
                r = r * p
                if squares:
                    r = _reduce_atoms(r, squares)
        elif isinstance(t, Neg):
            r = -go(t.arg)
        elif isinstance(t, Inv):
            r = go(t.arg).inverse()
            if squares:
                r = _reduce_atoms(r, squares)
        elif isinstance(t, Conj):
            r = go(t.arg).conj()
        elif isinstance(t, Sqrt):
            if opaque is None:
                raise SqrtPresent("expression contains a square root")
            arg = _simplify_mixed(t.arg)
            key = Sqrt(arg)
            atom = opaque.get(key)
            if atom is None:
                atom = opaque[key] = OPAQUE_BASE + len(opaque)
            if atom not in squares:
                squares[atom] = go(t.arg)
            r = RatFunc.var(atom)
        else:
            raise TypeError(t)
        memo[k] = r
        return r

    return go(e)


def _reduce_poly(p: Poly, squares: Dict[int, RatFunc]) -> RatFunc:
    if not any(v in squares and e > 1 for m in p.terms for v, e in m):
        return RatFunc(p)
    acc = RatFunc.const(0)
    for m, c in p.terms.items():
        keep = []
        t = RatFunc.const(c)
        for v, e in m:
            if v in squares and e > 1:
                t = t * squares[v] ** (e // 2)
                e = e % 2
            if e:
                keep.append((v, e))
        acc = acc + t * RatFunc(Poly.monomial(tuple(keep)))
    return acc


def _reduce_atoms(rf: RatFunc, squares: Dict[int, RatFunc]) -> RatFunc:
    """Reduce ``s^2 -> u`` and clear square-root atoms from the denominator."""
    r = _reduce_poly(rf.num, squares) / _reduce_poly(rf.den, squares)
    for _ in range(8):
        atoms = [v for v in r.den.variables() if v in squares]
        if not atoms:
            return r
        a = atoms[0]
        flip = r.den.substitute(lambda v: Poly.var(a).scale(-1) if v == a else None)
        num = _reduce_poly(r.num * flip, squares)
        den = _reduce_poly(r.den * flip, squares)
        r = num / den
    return r


def _poly_to_expr(p: Poly, atoms: Optional[Dict[object, Expr]] = None) -> Expr:
    if p.is_zero():
        return ZERO_E
    terms = []
    for m, c in sorted(p.terms.items(), key=lambda t: lex_key(t[0]), reverse=True):
        factors = []
        for v, e in m:
            base = Var(v) if v < OPAQUE_BASE else atoms[v]
            factors.extend([base] * e)
        terms.append(mul(Const(c), *factors))
    return add(*terms)


def from_ratfunc(rf: RatFunc, atoms: Optional[Dict[object, Expr]] = None) -> Expr:
    num = _poly_to_expr(rf.num, atoms)
    if rf.den.is_const():
        c = rf.den.const_value()
        return num if c.is_one() else mul(num, Const(c.inverse()))
    return mul(num, Inv(_poly_to_expr(rf.den, atoms)))


def _simplify_mixed(e: Expr) -> Expr:
    opaque: Dict[Expr, object] = {}
    rf = _to_rf(e, opaque)
    atoms = {a: k for k, a in opaque.items()}
    return from_ratfunc(rf, atoms)


def simplify(e: Expr) -> Expr:
    """Canonical form: exact for rational input, sqrt nodes kept opaque otherwise."""
    if not has_sqrt(e):
        return from_ratfunc(normalize_rational(e))
    return _simplify_mixed(e)


# ---------------------------------------------------------------------------
# differentiation

def wirtinger_d(e: Expr, var) -> Expr:
    """Formal derivative treating z_j and zbar_j as independent."""
    v = _var_code(var)
    memo: Dict[int, Expr] = {}

    def go(t: Expr) -> Expr:
        k = id(t)
        r = memo.get(k)
        if r is not None:
            return r
        if isinstance(t, Var):
            r = ONE_E if t.v == v else ZERO_E
        elif isinstance(t, Const):
            r = ZERO_E
        elif isinstance(t, Sum):
            r = add(*(go(a) for a in t.args))
        elif isinstance(t, Prod):
            terms = []
            for i, a in enumerate(t.args):
                da = go(a)
                if da == ZERO_E:
                    continue
                terms.append(mul(*t.args[:i], da, *t.args[i + 1:]))
            r = add(*terms)
        elif isinstance(t, Neg):
            r = neg(go(t.arg))
        elif isinstance(t, Inv):
            du = go(t.arg)
            r = ZERO_E if du == ZERO_E else neg(mul(du, t, t))
        elif isinstance(t, Sqrt):
            du = go(t.arg)
            r = ZERO_E if du == ZERO_E else mul(Const(Scalar(Fraction(1, 2))), du, Inv(t))
        elif isinstance(t, Conj):
            r = go(push_conj(t))
        else:
            raise TypeError(t)
        memo[k] = r
        return r

    return go(e)


def substitute(e: Expr, images: Dict[int, Expr]) -> Expr:
    """Replace coordinate variables (by code) with expressions."""
    def go(t: Expr) -> Expr:
        if isinstance(t, Var):
            return images.get(t.v, t)
        if isinstance(t, Const):
            return t
        if isinstance(t, Sum):
            return add(*(go(a) for a in t.args))
        if isinstance(t, Prod):
            return mul(*(go(a) for a in t.args))
        if isinstance(t, Neg):
            return neg(go(t.arg))
        if isinstance(t, Inv):
            return inv(go(t.arg))
        if isinstance(t, Sqrt):
            return Sqrt(go(t.arg))
        if isinstance(t, Conj):
            return Conj(go(t.arg))
        raise TypeError(t)
    return go(e)


# ---------------------------------------------------------------------------
# numeric evaluation

SQRT_TOL = 1e-12
POLE_TOL = 1e-14


def eval_expr(e: Expr, point: Sequence[complex]) -> complex:
    """Evaluate at ``point`` (zbar_j is the conjugate of the j-th entry)."""
    pt = [complex(p) for p in point]
    memo: Dict[int, complex] = {}

    def go(t: Expr) -> complex:
        k = id(t)
        r = memo.get(k)
        if r is not None:
            return r
        if isinstance(t, Var):
            j = t.v // 2
            if j >= len(pt):
                raise IndexError(f"{var_name(t.v)} out of range for a point of length {len(pt)}")
            r = pt[j].conjugate() if t.v & 1 else pt[j]
        elif isinstance(t, Const):
            r = complex(t.c)
        elif isinstance(t, Sum):
            r = sum((go(a) for a in t.args), 0j)
        elif isinstance(t, Prod):
            r = 1 + 0j
            for a in t.args:
                r *= go(a)
        elif isinstance(t, Neg):
            r = -go(t.arg)
        elif isinstance(t, Inv):
            d = go(t.arg)
            if abs(d) < POLE_TOL:
                raise PoleAtPoint(f"denominator vanishes (|d| = {abs(d):.3g})")
            r = 1 / d
        elif isinstance(t, Sqrt):
            u = go(t.arg)
            if abs(u.imag) > SQRT_TOL * max(1.0, abs(u)) or u.real < -SQRT_TOL:
                raise NegativeSqrtArgument(f"sqrt argument {u} is not a nonnegative real")
            r = complex(math.sqrt(max(u.real, 0.0)), 0.0)
        elif isinstance(t, Conj):
            r = go(t.arg).conjugate()
        else:
            raise TypeError(t)
        memo[k] = r
        return r

    return go(e)


def to_complex_fn(e: Expr) -> Callable[[Sequence[complex]], complex]:
    return lambda p: eval_expr(e, p)


@dataclass(frozen=True)
class ZeroVerdict:
    kind: str  # ExactZero | ProbablyZero | NonZero
    witness: Optional[Tuple[complex, ...]] = None
    value: Optional[complex] = None

    def __bool__(self):
        return self.kind != "NonZero"


def sample_polydisc(rng: np.random.Generator, n: int, radius: float = 0.5) -> Tuple[complex, ...]:
    r = radius * np.sqrt(rng.random(n))
    th = 2 * np.pi * rng.random(n)
    return tuple(complex(a) for a in r * np.exp(1j * th))


def is_zero(e: Expr, trials: int = 20, tol: float = 1e-9, seed: int = 0,
            n: Optional[int] = None,
            domain: Optional[Callable[[Sequence[complex]], bool]] = None,
            max_retries: int = 100) -> ZeroVerdict:
    """Decide whether ``e`` vanishes identically.

    Exact for sqrt-free input; otherwise evaluates at ``trials`` random points
    of the polydisc of radius 1/2, optionally restricted by ``domain``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not has_sqrt(e):
        rf = normalize_rational(e)
        if rf.is_zero():
            return ZeroVerdict("ExactZero")
        exact = True
    else:
        exact = False
    dim = max(n or 0, max_index(e), 1)
    rng = np.random.default_rng(seed)
    p, val = None, 0j
    for _ in range(trials):
        for _attempt in range(max_retries):
            p = sample_polydisc(rng, dim)
            if domain is not None and not domain(p):
                continue
            try:
                val = eval_expr(e, p)
            except (PoleAtPoint, NegativeSqrtArgument):
                continue
            break
        else:
            raise NoValidSamplePoint(f"no admissible sample point after {max_retries} retries")
        if (exact and val != 0) or abs(val) >= tol:
            return ZeroVerdict("NonZero", p, val)
    if exact:
        # nonzero rational function that vanished at every sample
        return ZeroVerdict("NonZero", p, val)
    return ZeroVerdict("ProbablyZero")


# ---------------------------------------------------------------------------
# parser

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>zbar\d+|sqrt|conj|[zxy]\d+|i)|(?P<op>[-+*/^()]))")


class _Parser:
    def __init__(self, text: str, n: Optional[int]):
        self.text = text
        self.n = n
        self.toks = []
        pos = 0
        while True:
            m = _TOKEN.match(text, pos)
            if m is None:
                rest = text[pos:]
                if rest.strip() == "":
                    break
                bad = pos + (len(rest) - len(rest.lstrip()))
                raise ParseError(f"unexpected character {text[bad]!r}", bad, text)
            kind = m.lastgroup
            start = m.start(kind)
            self.toks.append((kind, m.group(kind), start))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else ("eof", "", len(self.text))

    def take(self):
        t = self.peek()
        self.i += 1
        return t

    def expect_op(self, op: str):
        kind, val, pos = self.take()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}, found {val or 'end of input'!r}", pos, self.text)

    def parse(self) -> Expr:
        if not self.toks:
            raise ParseError("empty expression", 0, self.text)
        e = self.expr()
        kind, val, pos = self.peek()
        if kind != "eof":
            raise ParseError(f"unexpected token {val!r}", pos, self.text)
        return e

    def expr(self) -> Expr:
        terms = [self.term()]
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                t = self.term()
                terms.append(t if val == "+" else neg(t))
            else:
                return add(*terms)

    def term(self) -> Expr:
        e = self.unary()
        while True:
            kind, val, pos = self.peek()
            if kind == "op" and val in "*/":
                self.take()
                f = self.unary()
                if val == "*":
                    e = mul(e, f)
                else:
                    if isinstance(f, Const) and f.c.is_zero():
                        raise ParseError("division by zero", pos, self.text)
                    e = mul(e, inv(f))
            else:
                return e

    def unary(self) -> Expr:
        kind, val, _ = self.peek()
        if kind == "op" and val == "-":
            self.take()
            return neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.take()
            k2, v2, p2 = self.take()
            if k2 != "num":
                raise ParseError("exponent must be an unsigned integer", p2, self.text)
            return base ** int(v2)
        return base

    def _index(self, s: str, pos: int) -> int:
        j = int(re.search(r"\d+$", s).group())
        if j < 1:
            raise ParseError(f"unknown variable index in {s!r}", pos, self.text)
        if self.n is not None and j > self.n:
            raise ParseError(f"index {j} out of range for n = {self.n}", pos, self.text)
        return j

    def atom(self) -> Expr:
        kind, val, pos = self.take()
        if kind == "num":
            return Const(Scalar(int(val)))
        if kind == "name":
            if val == "i":
                return Const(I)
            if val in ("sqrt", "conj"):
                self.expect_op("(")
                inner = self.expr()
                self.expect_op(")")
                return sqrt(inner) if val == "sqrt" else Conj(inner)
            j = self._index(val, pos)
            if val.startswith("zbar"):
                return zbar(j)
            return {"z": z, "x": x, "y": y}[val[0]](j)
        if kind == "op" and val == "(":
            e = self.expr()
            self.expect_op(")")
            return e
        raise ParseError(f"unexpected {val or 'end of input'!r}", pos, self.text)


def parse(text: str, n: Optional[int] = None) -> Expr:
    """Parse the expression language; ``n`` bounds the coordinate indices."""
    return _Parser(text, n).parse()


# ---------------------------------------------------------------------------
# printer

_P_SUM, _P_PROD, _P_UNARY, _P_POW, _P_ATOM = range(5)


def _const_text(c: Scalar) -> Tuple[str, int]:
    s = format_scalar(c)
    if s.startswith("("):
        return s, _P_ATOM
    if s.startswith("-"):
        return s, _P_UNARY
    if "/" in s or "*" in s:
        return s, _P_PROD
    return s, _P_ATOM


def _negative_lead(c: Scalar) -> bool:
    return (not c.im and c.re < 0) or (not c.re and c.im < 0)


def _wrap(s: str, prec: int, need: int) -> str:
    return f"({s})" if prec < need else s


def _fmt(e: Expr) -> Tuple[str, int]:
    if isinstance(e, Var):
        return var_name(e.v), _P_ATOM
    if isinstance(e, Const):
        return _const_text(e.c)
    if isinstance(e, Sum):
        out = []
        for k, a in enumerate(e.args):
            sign = "+"
            if isinstance(a, Neg):
                sign, a = "-", a.arg
            elif isinstance(a, Const) and _negative_lead(a.c):
                sign, a = "-", Const(-a.c)
            elif isinstance(a, Prod) and isinstance(a.args[0], Const) and _negative_lead(a.args[0].c):
                sign, a = "-", mul(Const(-a.args[0].c), *a.args[1:])
            s, p = _fmt(a)
            s = _wrap(s, p, _P_PROD)
            if k == 0:
                out.append(s if sign == "+" else f"-{s}")
            else:
                out.append(f" {sign} {s}")
        return "".join(out), _P_SUM
    if isinstance(e, Prod):
        num, den = [], []
        for a in e.args:
            (den if isinstance(a, Inv) else num).append(a.arg if isinstance(a, Inv) else a)
        parts = []
        for group in (num, den):
            chunks = []
            k = 0
            while k < len(group):
                a = group[k]
                r = 1
                while k + r < len(group) and group[k + r] == a:
                    r += 1
                s, p = _fmt(a)
                if r > 1:
                    chunks.append((f"{_wrap(s, p, _P_ATOM)}^{r}", _P_POW))
                else:
                    chunks.append((s, p))
                k += r
            parts.append(chunks)
        num_c, den_c = parts
        text = ""
        lead_minus = (len(num_c) > 1 and isinstance(num[0], Const) and num[0].c == -1)
        if lead_minus:
            num_c = num_c[1:]
        for idx, (s, p) in enumerate(num_c):
            text += ("" if idx == 0 else "*") + _wrap(s, p, _P_PROD)
        if not num_c:
            text = "1"
        for s, p in den_c:
            text += "/" + _wrap(s, p, _P_POW)
        if lead_minus:
            return "-" + text, _P_UNARY if not den_c and len(num_c) == 1 else _P_PROD
        return text, _P_PROD
    if isinstance(e, Neg):
        s, p = _fmt(e.arg)
        return "-" + _wrap(s, p, _P_PROD), _P_UNARY
    if isinstance(e, Inv):
        s, p = _fmt(e.arg)
        return "1/" + _wrap(s, p, _P_POW), _P_PROD
    if isinstance(e, Sqrt):
        return f"sqrt({_fmt(e.arg)[0]})", _P_ATOM
    if isinstance(e, Conj):
        return f"conj({_fmt(e.arg)[0]})", _P_ATOM
    raise TypeError(e)


def to_text(e: Expr) -> str:
    """Render in the parser's input language."""
    return _fmt(e)[0]
