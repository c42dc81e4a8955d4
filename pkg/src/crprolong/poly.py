"""Sparse multivariate polynomials over the Gaussian rationals.

A monomial is a tuple of ``(var, exponent)`` pairs sorted by ``var``; variables
may be any hashable, mutually comparable keys (ints for coordinates, tagged
tuples for jet variables and constant atoms).  ``Poly`` is immutable.
"""
from __future__ import annotations

from typing import Callable, Dict, Iterable, Iterator, Tuple

from .scalar import ONE, ZERO, Scalar

Monomial = Tuple[Tuple[object, int], ...]

UNIT: Monomial = ()


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    out = []
    i = j = 0
    la, lb = len(a), len(b)
    while i < la and j < lb:
        va, ea = a[i]
        vb, eb = b[j]
        if va == vb:
            out.append((va, ea + eb))
            i += 1
            j += 1
        elif va < vb:
            out.append(a[i])
            i += 1
        else:
            out.append(b[j])
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return tuple(out)


def mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


def mono_from_dict(d: Dict[object, int]) -> Monomial:
    return tuple(sorted((v, e) for v, e in d.items() if e))


class Poly:
    """Polynomial as a mapping monomial -> nonzero Scalar."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Dict[Monomial, Scalar] | None = None, _clean: bool = False):
        if terms is None:
            terms = {}
        elif not _clean:
            terms = {m: c for m, c in terms.items() if not c.is_zero()}
        self.terms = terms
        self._hash = None

    # -- constructors -------------------------------------------------------
    @classmethod
    def const(cls, c) -> "Poly":
        c = Scalar.coerce(c)
        return cls({UNIT: c}, True) if not c.is_zero() else cls()

    @classmethod
    def var(cls, v, exp: int = 1) -> "Poly":
        return cls({((v, exp),): ONE}, True)

    @classmethod
    def monomial(cls, m: Monomial, c=ONE) -> "Poly":
        c = Scalar.coerce(c)
        return cls({m: c}, True) if not c.is_zero() else cls()

    # -- queries ------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_const(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and UNIT in self.terms)

    def const_value(self) -> Scalar:
        """The constant term (``ZERO`` if absent)."""
        return self.terms.get(UNIT, ZERO)

    def variables(self) -> set:
        out = set()
        for m in self.terms:
            out.update(v for v, _ in m)
        return out

    def total_degree(self) -> int:
        return max((mono_degree(m) for m in self.terms), default=-1)

    def degree_in(self, v) -> int:
        return max((e for m in self.terms for w, e in m if w == v), default=0)

    def sorted_terms(self, key=None) -> list:
        return sorted(self.terms.items(), key=key or (lambda t: t[0]))

    def __iter__(self) -> Iterator[Tuple[Monomial, Scalar]]:
        return iter(self.terms.items())

    def __len__(self):
        return len(self.terms)

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for m, c in other.terms.items():
            prev = out.get(m)
            if prev is None:
                out[m] = c
            else:
                s = prev + c
                if s.is_zero():
                    del out[m]
                else:
                    out[m] = s
        return Poly(out, True)

    __radd__ = __add__

    def __neg__(self):
        return Poly({m: -c for m, c in self.terms.items()}, True)

    def __sub__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return Poly.const(other) - self

    def scale(self, c) -> "Poly":
        c = Scalar.coerce(c)
        if c.is_zero():
            return Poly()
        if c.is_one():
            return self
        return Poly({m: v * c for m, v in self.terms.items()}, True)

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return self.scale(other)
        if not self.terms or not other.terms:
            return Poly()
        a, b = self.terms, other.terms
        if len(a) < len(b):
            a, b = b, a
        out: Dict[Monomial, Scalar] = {}
        for mb, cb in b.items():
            for ma, ca in a.items():
                m = mono_mul(ma, mb)
                c = ca * cb
                prev = out.get(m)
                out[m] = c if prev is None else prev + c
        return Poly(out)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power of Poly")
        out = Poly.const(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.terms == other.terms
        if isinstance(other, (int, Scalar)):
            return self == Poly.const(other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    # -- transformations ----------------------------------------------------
    def diff(self, v) -> "Poly":
        out: Dict[Monomial, Scalar] = {}
        for m, c in self.terms.items():
            for idx, (w, e) in enumerate(m):
                if w == v:
                    rest = m[:idx] + (((w, e - 1),) if e > 1 else ()) + m[idx + 1:]
                    out[rest] = out.get(rest, ZERO) + c * e
                    break
        return Poly(out)

    def derive(self, var_image: Callable[[object], "Poly"]) -> "Poly":
        """Apply the derivation sending each variable ``v`` to ``var_image(v)``."""
        out = Poly()
        cache: Dict[object, Poly] = {}
        for m, c in self.terms.items():
            for idx, (w, e) in enumerate(m):
                dv = cache.get(w)
                if dv is None:
                    dv = cache[w] = var_image(w)
                if dv.is_zero():
                    continue
                rest = m[:idx] + (((w, e - 1),) if e > 1 else ()) + m[idx + 1:]
                out = out + Poly.monomial(rest, c * e) * dv
        return out

    def substitute(self, images: Callable[[object], "Poly | None"]) -> "Poly":
        """Replace variables; ``images(v)`` returns a Poly or None to keep ``v``."""
        out = Poly()
        cache: Dict[object, Poly | None] = {}
        powcache: Dict[Tuple[object, int], Poly] = {}
        for m, c in self.terms.items():
            term = Poly.const(c)
            keep = []
            for w, e in m:
                if w not in cache:
                    cache[w] = images(w)
                img = cache[w]
                if img is None:
                    keep.append((w, e))
                else:
                    key = (w, e)
                    p = powcache.get(key)
                    if p is None:
                        p = powcache[key] = img ** e
                    term = term * p
            if keep:
                term = term * Poly.monomial(tuple(keep))
            out = out + term
        return out

    def map_coeffs(self, fn: Callable[[Scalar], Scalar]) -> "Poly":
        return Poly({m: fn(c) for m, c in self.terms.items()})

    def truncate(self, max_degree: int, weight: Callable[[object], int] | None = None) -> "Poly":
        """Drop monomials of (weighted) degree above ``max_degree``."""
        if weight is None:
            return Poly({m: c for m, c in self.terms.items() if mono_degree(m) <= max_degree}, True)
        return Poly({m: c for m, c in self.terms.items()
                     if sum(weight(v) * e for v, e in m) <= max_degree}, True)

    def homogeneous_parts(self) -> Dict[int, "Poly"]:
        parts: Dict[int, Dict[Monomial, Scalar]] = {}
        for m, c in self.terms.items():
            parts.setdefault(mono_degree(m), {})[m] = c
        return {d: Poly(t, True) for d, t in sorted(parts.items())}

    def monomial_gcd(self) -> Monomial:
        it = iter(self.terms)
        try:
            g = dict(next(it))
        except StopIteration:
            return UNIT
        for m in it:
            md = dict(m)
            g = {v: min(e, md[v]) for v, e in g.items() if v in md}
            if not g:
                break
        return mono_from_dict(g)

    def divide_monomial(self, m: Monomial) -> "Poly":
        if not m:
            return self
        md = dict(m)
        out = {}
        for mono, c in self.terms.items():
            d = dict(mono)
            for v, e in md.items():
                d[v] -= e
                if d[v] < 0:
                    raise ArithmeticError("monomial does not divide polynomial")
            out[mono_from_dict(d)] = c
        return Poly(out, True)

    def leading(self, key=None) -> Tuple[Monomial, Scalar]:
        """Greatest term under ``key`` (default: tuple order of monomials)."""
        return max(self.terms.items(), key=key or (lambda t: t[0]))

    def evaluate(self, values: Callable[[object], complex]) -> complex:
        total = 0j
        cache: Dict[object, complex] = {}
        for m, c in self.terms.items():
            t = complex(c)
            for v, e in m:
                x = cache.get(v)
                if x is None:
                    x = cache[v] = values(v)
                t *= x ** e
            total += t
        return total

    def __repr__(self):
        return f"Poly({self.terms!r})"


def poly_sum(items: Iterable[Poly]) -> Poly:
    """Sum with a single accumulation dict (faster than repeated ``+``)."""
    out: Dict[Monomial, Scalar] = {}
    for p in items:
        for m, c in p.terms.items():
            prev = out.get(m)
            out[m] = c if prev is None else prev + c
    return Poly(out)
