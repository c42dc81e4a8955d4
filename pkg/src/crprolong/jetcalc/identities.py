"""Named jet identities checked by exact normalization.

Each identity is a pair (lhs, rhs) of raw-word polynomials together with the
rule mode it holds in.  ``verify_identity`` normalizes ``lhs - rhs`` and reports
the nonzero remainder, if any.  Identities are named by their left-hand word.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional

from ..poly import Poly
from ..scalar import Scalar
from .engine import (RuleSet, W, atom, f, fb, gamma, poly_text, standard_binding)


@dataclass
class Identity:
    name: str
    lhs: Poly
    rhs: Poly
    base: bool = True
    note: str = ""


@dataclass
class IdentityResult:
    name: str
    ok: bool
    residual: Poly
    note: str = ""

    @property
    def witness(self) -> str:
        return poly_text(self.residual)


def verify_identity(lhs: Poly, rhs: Poly, rules: RuleSet) -> Poly:
    """Normal form of ``lhs - rhs``; zero exactly when the identity holds under ``rules``."""
    return rules.normalize(lhs - rhs)


def tangency_expansion(n: int, k: int, rules: Optional[RuleSet] = None) -> Poly:
    """``Lbar_k`` applied to the first-order tangency relation, minus its expanded form.

    The relation is ``(f_n + fbar_n)/2 + sum_j f_j fbar_j = 0``.  Returns the
    normalized difference, which vanishes identically.
    """
    rules = rules or RuleSet(n)
    half = Scalar(1, 0) / 2
    rel = (f(n) + fb(n)).scale(half) + sum((f(j) * fb(j) for j in range(1, n)), Poly())
    lhs = rules.apply((2, k), rules.normalize(rel, bind=False))
    rhs = (W(f"Lb{k} f{n}") + W(f"Lb{k} fb{n}")).scale(half)
    rhs = rhs + sum((f(j) * W(f"Lb{k} fb{j}") for j in range(1, n)), Poly())
    return rules.normalize(lhs - rhs)


def _sum(it) -> Poly:
    return sum(it, Poly())


def identity_suite(n: int) -> List[Identity]:
    """All identities for dimension ``n`` (indices range over every admissible value)."""
    if n < 2:
        raise ValueError("n must be >= 2")
    ks = range(1, n)
    js = range(1, n)
    a = lambda j, l: atom("a", j, l)
    ab = lambda j, l: atom("ab", j, l)
    b = lambda j, l: atom("b", j, l)
    bb = lambda j, l: atom("bb", j, l)
    out: List[Identity] = []

    def add(name, lhs, rhs, base=True, note=""):
        out.append(Identity(name, lhs, rhs, base, note))

    g11 = gamma(1, 1)
    for k in ks:
        # L_k fbar_n through the tangency system
        add(f"L{k} fb{n}", W(f"L{k} fb{n}"),
            _sum((a(j, l) * f(l) + b(j, l) * fb(l)) * W(f"L{k} f{j}") for j in js for l in js))
        for m in ks:
            for j in js:
                add(f"L{k} Lb{m} fb{j}", W(f"L{k} Lb{m} fb{j}"), gamma(k, m) * W(f"T fb{j}"))
            add(f"L{k} Lb{m} fb{n}", W(f"L{k} Lb{m} fb{n}"),
                _sum((-_sum(bb(j, l) * W(f"L{k} f{l}") for l in js) - W(f"L{k} f{j}").scale(2))
                     * W(f"Lb{m} fb{j}") for j in js)
                + _sum((-_sum(ab(j, l) * fb(l) + bb(j, l) * f(l) for l in js) - f(j).scale(2))
                       * gamma(k, m) * W(f"T fb{j}") for j in js),
                note="sign of the 2 f_j term fixed")
            add(f"L{m} Lb{k} f{n}", W(f"L{m} Lb{k} f{n}"),
                _sum(bb(j, l) * W(f"L{m} f{l}") * W(f"Lb{k} fb{j}")
                     + gamma(m, k) * (bb(j, l) * f(l) + ab(j, l) * fb(l)) * W(f"T fb{j}")
                     for j in js for l in js))
            add(f"Lb{m} Lb{k} f{n}", W(f"Lb{m} Lb{k} f{n}"),
                _sum(ab(j, l) * W(f"Lb{m} fb{l}") * W(f"Lb{k} fb{j}")
                     + (bb(j, l) * f(l) + ab(j, l) * fb(l)) * W(f"Lb{m} Lb{k} fb{j}")
                     for j in js for l in js))
            for p in js:
                add(f"Lb{k} L{k} L{k} L{m} f{p}", W(f"Lb{k} L{k} L{k} L{m} f{p}"),
                    -gamma(m, k) * W(f"T L{k} L{k} f{p}")
                    - gamma(k, k).scale(2) * W(f"T L{k} L{m} f{p}"))
        for p in js:
            add(f"Lb{k} L{k} L{k} f{p}", W(f"Lb{k} L{k} L{k} f{p}"),
                -gamma(k, k).scale(2) * W(f"T L{k} f{p}"))
        add(f"L{k} L{k} Lb{k} f{n}", W(f"L{k} L{k} Lb{k} f{n}"),
            _sum(bb(j, l) * (W(f"L{k} L{k} f{l}") * W(f"Lb{k} fb{j}")
                             + gamma(k, k).scale(2) * W(f"L{k} f{l}") * W(f"T fb{j}"))
                 for j in js for l in js),
            note="sign of the bracket term fixed")
    for p in js:
        add(f"Lb1 L1 f{p}", W(f"Lb1 L1 f{p}"), -g11 * W(f"T f{p}"))
    for p in range(1, n + 1):
        add(f"Lb1 L1 f{p} (brackets only)", W(f"Lb1 L1 f{p}"),
            W(f"L1 Lb1 f{p}") - g11 * W(f"T f{p}"), base=False)
    add(f"L1 Lb1 f{n}", W(f"L1 Lb1 f{n}"),
        _sum(bb(j, l) * (W(f"L1 f{l}") * W(f"Lb1 fb{j}") + g11 * f(l) * W(f"T fb{j}"))
             + g11 * ab(j, l) * fb(l) * W(f"T fb{j}") for j in js for l in js),
        note="sign of the bracket term fixed")
    add(f"T L1 Lb1 f{n}", W(f"T L1 Lb1 f{n}"),
        _sum(bb(j, l) * (W(f"T L1 f{l}") * W(f"Lb1 fb{j}") + W(f"L1 f{l}") * W(f"T Lb1 fb{j}")
                         + g11 * (W(f"T f{l}") * W(f"T fb{j}") + f(l) * W(f"T^2 fb{j}")))
             + g11 * ab(j, l) * (W(f"T fb{l}") * W(f"T fb{j}") + fb(l) * W(f"T^2 fb{j}"))
             for j in js for l in js))
    add(f"T^2 L1 Lb1 f{n}", W(f"T^2 L1 Lb1 f{n}"),
        _sum(bb(j, l) * (W(f"T^2 L1 f{l}") * W(f"Lb1 fb{j}")
                         + W(f"T L1 f{l}") * W(f"T Lb1 fb{j}").scale(2)
                         + W(f"L1 f{l}") * W(f"T^2 Lb1 fb{j}")
                         + g11 * (W(f"T^2 f{l}") * W(f"T fb{j}")
                                  + W(f"T f{l}") * W(f"T^2 fb{j}").scale(2)
                                  + f(l) * W(f"T^3 fb{j}")))
             + g11 * ab(j, l) * (W(f"T^2 fb{l}") * W(f"T fb{j}")
                                 + W(f"T fb{l}") * W(f"T^2 fb{j}").scale(2)
                                 + fb(l) * W(f"T^3 fb{j}"))
             for j in js for l in js),
        note="factor 2 on the mixed T-derivative term")
    out.extend(bracket_reductions(n))
    return out


def bracket_reductions(n: int) -> List[Identity]:
    """Reordering of every mixed third-order word into normal order, brackets only."""
    out: List[Identity] = []
    ks = range(1, n)
    g = gamma
    c = lambda i, j: atom("c", i, j)
    for p in range(1, n + 1):
        for k in ks:
            for m in ks:
                fp = f"f{p}"
                # t=2, a=1 / t=1, a=2 and t=2, b=1 / t=1, b=2: T is central
                out.append(Identity(f"L{k} T^2 {fp}", W(f"L{k} T^2 {fp}"), W(f"T^2 L{k} {fp}"), False))
                out.append(Identity(f"L{k} T L{m} {fp}", W(f"L{k} T L{m} {fp}"),
                                    W(f"T L{k} L{m} {fp}"), False))
                out.append(Identity(f"Lb{k} T Lb{m} {fp}", W(f"Lb{k} T Lb{m} {fp}"),
                                    W(f"T Lb{k} Lb{m} {fp}"), False))
                for q in ks:
                    # a=2, b=1
                    out.append(Identity(
                        f"L{m} Lb{k} L{q} {fp}", W(f"L{m} Lb{k} L{q} {fp}"),
                        W(f"L{m} L{q} Lb{k} {fp}") - g(q, k) * W(f"T L{m} {fp}"), False))
                    out.append(Identity(
                        f"Lb{k} L{m} L{q} {fp}", W(f"Lb{k} L{m} L{q} {fp}"),
                        W(f"L{m} L{q} Lb{k} {fp}") - g(q, k) * W(f"T L{m} {fp}")
                        - g(m, k) * W(f"T L{q} {fp}"), False))
                    # a=1, b=2
                    out.append(Identity(
                        f"Lb{m} L{k} Lb{q} {fp}", W(f"Lb{m} L{k} Lb{q} {fp}"),
                        W(f"L{k} Lb{m} Lb{q} {fp}") - g(k, m) * W(f"T Lb{q} {fp}"), False))
                    out.append(Identity(
                        f"Lb{m} Lb{q} L{k} {fp}", W(f"Lb{m} Lb{q} L{k} {fp}"),
                        W(f"L{k} Lb{m} Lb{q} {fp}") - g(k, q) * W(f"T Lb{m} {fp}")
                        - g(k, m) * W(f"T Lb{q} {fp}"), False))
                # t=1, a=1, b=1
                out.append(Identity(f"Lb{k} T L{m} {fp}", W(f"Lb{k} T L{m} {fp}"),
                                    W(f"T L{m} Lb{k} {fp}") - g(m, k) * W(f"T^2 {fp}"), False))
                out.append(Identity(f"Lb{k} L{m} T {fp}", W(f"Lb{k} L{m} T {fp}"),
                                    W(f"T L{m} Lb{k} {fp}") - g(m, k) * W(f"T^2 {fp}"), False))
                out.append(Identity(f"T Lb{k} L{m} {fp}", W(f"T Lb{k} L{m} {fp}"),
                                    W(f"T L{m} Lb{k} {fp}") - g(m, k) * W(f"T^2 {fp}"), False))
                out.append(Identity(f"L{m} T Lb{k} {fp}", W(f"L{m} T Lb{k} {fp}"),
                                    W(f"T L{m} Lb{k} {fp}"), False))
                out.append(Identity(f"L{m} Lb{k} T {fp}", W(f"L{m} Lb{k} T {fp}"),
                                    W(f"T L{m} Lb{k} {fp}"), False))
                # [L, L] reordering, nonzero only for n >= 3
                out.append(Identity(f"L{k} L{m} {fp}", W(f"L{k} L{m} {fp}"),
                                    W(f"L{m} L{k} {fp}") + c(k, m) * W(f"T {fp}"), False))
    return out


def negative_control(n: int) -> Identity:
    """A deliberately corrupted identity (wrong sign) that must fail."""
    return Identity("corrupted Lb1 L1 L1 f1", W("Lb1 L1 L1 f1"),
                    gamma(1, 1).scale(2) * W("T L1 f1"))


def run_suite(n: int, binding: Optional[Dict[tuple, Scalar]] = None,
              identities: Optional[List[Identity]] = None) -> List[IdentityResult]:
    base = RuleSet(n, True, binding)
    brackets = RuleSet(n, False, binding)
    results = []
    for k in range(1, n):
        res = tangency_expansion(n, k, base)
        results.append(IdentityResult(f"Lb{k} applied to the tangency relation", res.is_zero(), res))
    for ident in identities if identities is not None else identity_suite(n):
        rules = base if ident.base else brackets
        res = verify_identity(ident.lhs, ident.rhs, rules)
        results.append(IdentityResult(ident.name, res.is_zero(), res, ident.note))
    return results


def run_standard_suite(n: int) -> List[IdentityResult]:
    return run_suite(n, standard_binding(n))
