"""Rational functions in the coordinate variables z_j, zbar_j.

Variable codes are ints: ``z_j -> 2(j-1)`` and ``zbar_j -> 2(j-1)+1`` so that
the natural int order is the lex order z1 < zbar1 < z2 < ... .  Opaque extra
atoms (e.g. square-root nodes during simplification) may use tuple keys.
"""
from __future__ import annotations

from typing import Dict, Tuple

from .errors import DivisionByZeroPolynomial
from .poly import Monomial, Poly, mono_from_dict
from .scalar import ONE, Scalar


def zvar(j: int) -> int:
    return 2 * (j - 1)


def zbarvar(j: int) -> int:
    return 2 * (j - 1) + 1


def var_name(v: int) -> str:
    j, bar = divmod(v, 2)
    return f"{'zbar' if bar else 'z'}{j + 1}"


def lex_key(m: Monomial):
    """Sort key realising lex order with z1 most significant."""
    return tuple((-v, e) for v, e in m)


# codes at or above this are opaque real atoms (square roots) fixed by conjugation
OPAQUE_BASE = 1 << 20


def _conj_code(v: int) -> int:
    return v if v >= OPAQUE_BASE else v ^ 1


def poly_conj(p: Poly) -> Poly:
    out: Dict[Monomial, Scalar] = {}
    for m, c in p.terms.items():
        out[mono_from_dict({_conj_code(v): e for v, e in m})] = c.conj()
    return Poly(out, True)


def leading_term(p: Poly) -> Tuple[Monomial, Scalar]:
    return max(p.terms.items(), key=lambda t: lex_key(t[0]))


def exact_divide(f: Poly, g: Poly, max_steps: int = 20000) -> Poly | None:
    """Return ``f / g`` if ``g`` divides ``f`` exactly, else None."""
    if g.is_zero():
        raise DivisionByZeroPolynomial("division by the zero polynomial")
    gm, gc = leading_term(g)
    gd = dict(gm)
    ginv = gc.inverse()
    q = Poly()
    r = f
    steps = 0
    while not r.is_zero():
        steps += 1
        if steps > max_steps:
            return None
        rm, rc = leading_term(r)
        rd = dict(rm)
        if any(rd.get(v, 0) < e for v, e in gd.items()):
            return None
        qm = mono_from_dict({v: e - gd.get(v, 0) for v, e in rd.items()})
        t = Poly.monomial(qm, rc * ginv)
        q = q + t
        r = r - t * g
    return q


class RatFunc:
    """Quotient ``num / den`` with a light canonical form (no GCD)."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly | None = None, _canon: bool = False):
        if den is None:
            den = Poly.const(1)
        if den.is_zero():
            raise DivisionByZeroPolynomial("denominator is identically zero")
        if not _canon:
            num, den = _canonical(num, den)
        self.num = num
        self.den = den

    @classmethod
    def const(cls, c) -> "RatFunc":
        return cls(Poly.const(c), None, True)

    @classmethod
    def var(cls, v) -> "RatFunc":
        return cls(Poly.var(v), None, True)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_poly(self) -> bool:
        return self.den.is_const()

    def is_const(self) -> bool:
        return self.num.is_const() and self.den.is_const()

    def const_value(self) -> Scalar:
        if not self.is_const():
            raise ValueError("RatFunc is not constant")
        return self.num.const_value() / self.den.const_value()

    def variables(self) -> set:
        return self.num.variables() | self.den.variables()

    def __add__(self, other):
        other = _lift(other)
        if self.den == other.den:
            return RatFunc(self.num + other.num, self.den)
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den, True)

    def __sub__(self, other):
        return self + (-_lift(other))

    def __rsub__(self, other):
        return _lift(other) - self

    def __mul__(self, other):
        other = _lift(other)
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if self.num.is_zero():
            raise DivisionByZeroPolynomial("inverse of the zero rational function")
        return RatFunc(self.den, self.num)

    def __truediv__(self, other):
        return self * _lift(other).inverse()

    def __rtruediv__(self, other):
        return _lift(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return RatFunc(self.num ** k, self.den ** k)

    def __eq__(self, other):
        if not isinstance(other, RatFunc):
            try:
                other = _lift(other)
            except TypeError:
                return NotImplemented
        return (self.num * other.den - other.num * self.den).is_zero()

    def __hash__(self):
        # equal values may differ in representation; only constants hash stably
        return hash(("RatFunc", self.const_value())) if self.is_const() else hash("RatFunc")

    def diff(self, v) -> "RatFunc":
        dn = self.num.diff(v)
        dd = self.den.diff(v)
        if dd.is_zero():
            return RatFunc(dn, self.den)
        return RatFunc(dn * self.den - self.num * dd, self.den * self.den)

    def conj(self) -> "RatFunc":
        return RatFunc(poly_conj(self.num), poly_conj(self.den))

    def substitute(self, images) -> "RatFunc":
        """Substitute RatFunc images for variables (``images(v)`` -> RatFunc or None)."""
        def sub_poly(p: Poly) -> "RatFunc":
            acc = RatFunc.const(0)
            for m, c in p.terms.items():
                t = RatFunc.const(c)
                for v, e in m:
                    img = images(v)
                    t = t * (RatFunc.var(v) if img is None else img) ** e
                acc = acc + t
            return acc
        return sub_poly(self.num) / sub_poly(self.den)

    def taylor(self, order: int) -> Poly:
        """Taylor polynomial at 0 up to total degree ``order`` (denominator must not vanish at 0)."""
        c0 = self.den.const_value()
        if c0.is_zero():
            raise ZeroDivisionError("denominator vanishes at 0")
        u = self.den.scale(c0.inverse()) - 1
        # 1/(1+u) = sum (-u)^k, u has no constant term
        inv = Poly.const(1)
        power = Poly.const(1)
        for _ in range(order):
            power = (power * -u).truncate(order)
            inv = inv + power
        return (self.num * inv).truncate(order).scale(c0.inverse())

    def evaluate(self, values) -> complex:
        d = self.den.evaluate(values)
        n = self.num.evaluate(values)
        return n / d

    def __repr__(self):
        return f"RatFunc({self.num!r}, {self.den!r})"


def _lift(x) -> RatFunc:
    if isinstance(x, RatFunc):
        return x
    if isinstance(x, Poly):
        return RatFunc(x)
    return RatFunc.const(Scalar.coerce(x))


def _canonical(num: Poly, den: Poly):
    if num.is_zero():
        return Poly(), Poly.const(1)
    g = mono_from_dict({})
    mg_n = num.monomial_gcd()
    mg_d = den.monomial_gcd()
    if mg_n and mg_d:
        dn, dd = dict(mg_n), dict(mg_d)
        g = mono_from_dict({v: min(e, dd[v]) for v, e in dn.items() if v in dd})
        if g:
            num = num.divide_monomial(g)
            den = den.divide_monomial(g)
    if len(den) > 1:
        q = exact_divide(num, den) if len(num) >= len(den) else None
        if q is not None:
            num, den = q, Poly.const(1)
    _, lc = leading_term(den)
    if not lc.is_one():
        inv = lc.inverse()
        num = num.scale(inv)
        den = den.scale(inv)
    return num, den


ONE_RF = RatFunc(Poly.const(ONE), None, True)
