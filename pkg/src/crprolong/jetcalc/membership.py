"""Membership proofs for the function spaces ``C[p,q]`` and ``Cb[p,q]``.

``Cb[p,q]`` (``bar=True``) is the set of analytic functions of the generators
``T^t Lbar^a fbar_j`` (j < n, t <= q, t + |a| <= p) and ``Lbar^a fbar_n``
(|a| <= p); ``C[p,q]`` is its conjugate.  Claims are keyed by the normal-order
jet variable of a word (brackets-only normal form), so words on ``f_n`` that the
base rules expand away can still carry claims.

Strategies:

* ``direct``: every variable of the base normal form lies in the space.
* ``peel``: the word is ``O W'`` with ``W'`` in a space S' and a proven closure
  ``O(S') in S``.
* ``commutator-solve``: a start word shown in S by ``peel`` normalizes to
  ``c * target + R`` with ``c`` a nonzero constant and ``R`` in S.
* ``inclusion``: every generator of one space lies in another.

Each bracket constant ``gamma[j,jb]`` is nonzero by strict pseudoconvexity; this
is the only nonvanishing assumed of the atoms.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from ..poly import Poly
from .engine import (KIND_L, KIND_LB, L, Lb, Op, RuleSet, T_OP, jetvar, op_text, poly_text,
                     var_text)


@dataclass(frozen=True, order=True)
class Space:
    p: int
    q: int
    bar: bool = True

    @property
    def name(self) -> str:
        return f"{'Cb' if self.bar else 'C'}[{self.p},{self.q}]"

    def conj(self) -> "Space":
        return Space(self.p, self.q, not self.bar)

    def __str__(self) -> str:
        return self.name


@dataclass
class Claim:
    var: tuple
    space: Space
    name: str
    strategy: str
    axiom: bool = False


@dataclass
class ProofStep:
    name: str
    statement: str
    strategy: str
    ok: bool
    detail: str = ""


AXIOM_INVERSION = "analytic inversion of the tangency system: f_q is a function of fbar, Lbar fbar"
AXIOM_PROLONG = "first prolongation: L_k f_q is a function of fbar, Lbar fbar"


def _conj_var(v: tuple) -> tuple:
    return ("j", 1 - v[1]) + v[2:]


def _multisets(n: int, size: int) -> Iterable[Tuple[int, ...]]:
    return combinations_with_replacement(range(1, n), size)


class Prover:
    """Accumulates claims, inclusions and closures; every step is logged."""

    def __init__(self, n: int):
        self.n = n
        self.base = RuleSet(n, True)
        self.comm = RuleSet(n, False)
        self.claims: Dict[tuple, List[Claim]] = {}
        self.edges: Set[Tuple[Space, Space]] = set()
        self.closures: List[Tuple[Op, Space, Space]] = []
        self.steps: List[ProofStep] = []
        self.divisors: Set[tuple] = set()
        self._known: Set[Tuple[tuple, Space]] = set()

    # -- bookkeeping --------------------------------------------------------
    def key(self, ops: Sequence[Op], bar: int, idx: int) -> tuple:
        p = self.comm.word(ops, bar, idx)
        if len(p.terms) != 1:
            raise ValueError(f"word {self.word_text(ops, bar, idx)} is not in normal order")
        (mono, c), = p.terms.items()
        if not c.is_one() or len(mono) != 1 or mono[0][1] != 1:
            raise ValueError("word is not in normal order")
        return mono[0][0]

    @staticmethod
    def word_text(ops: Sequence[Op], bar: int, idx: int) -> str:
        return " ".join([op_text(o) for o in ops] + [f"{'fb' if bar else 'f'}{idx}"])

    def _claim(self, v: tuple, space: Space, name: str, strategy: str, axiom: bool = False):
        self.claims.setdefault(v, []).append(Claim(v, space, name, strategy, axiom))

    def _log(self, name, statement, strategy, ok, detail=""):
        self.steps.append(ProofStep(name, statement, strategy, ok, detail))
        return ok

    def axiom(self, ops: Sequence[Op], bar: int, idx: int, space: Space, provenance: str):
        v = self.key(ops, bar, idx)
        self._claim(v, space, provenance, "axiom", True)
        self._log(provenance, f"{var_text(v)} in {space}", "axiom", True)

    # -- space relations ----------------------------------------------------
    @staticmethod
    def trivially_included(a: Space, b: Space) -> bool:
        return a.bar == b.bar and a.p <= b.p and a.q <= b.q

    def included(self, a: Space, b: Space) -> bool:
        reach = {a}
        changed = True
        while changed:
            changed = False
            for src, dst in self.edges:
                if dst not in reach and any(self.trivially_included(x, src) for x in reach):
                    reach.add(dst)
                    changed = True
        return any(self.trivially_included(x, b) for x in reach)

    def generators(self, space: Space) -> List[tuple]:
        bar = 1 if space.bar else 0
        out = []
        for j in range(1, self.n):
            for t in range(space.q + 1):
                for r in range(space.p - t + 1):
                    for a in _multisets(self.n, r):
                        out.append(jetvar(bar, j, t, a))
        for r in range(space.p + 1):
            for a in _multisets(self.n, r):
                out.append(jetvar(bar, self.n, 0, a))
        return out

    def _generator_space(self, v: tuple) -> Optional[Space]:
        _, bar, idx, t, outer, inner = v
        if inner or (idx == self.n and t):
            return None
        return Space(max(t + len(outer), 1), max(t, 1), bar == 1)

    def in_space(self, v: tuple, space: Space, _stack: Optional[Set] = None) -> bool:
        if v[0] == "c":
            return True
        if (v, space) in self._known:
            return True
        ok = self._in_space(v, space, _stack or set())
        if ok:
            self._known.add((v, space))
        return ok

    def _in_space(self, v, space, stack) -> bool:
        gs = self._generator_space(v)
        if gs is not None and self.included(gs, space):
            return True
        for c in self.claims.get(v, ()):
            if self.included(c.space, space):
                return True
        for c in self.claims.get(_conj_var(v), ()):
            if self.included(c.space.conj(), space):
                return True
        if (v, space) in stack:
            return False
        nf = self.base.normalize(Poly.var(v), bind=False)
        if nf == Poly.var(v):
            return False
        stack = stack | {(v, space)}
        return all(self.in_space(w, space, stack) for w in nf.variables())

    def poly_in_space(self, p: Poly, space: Space) -> List[tuple]:
        """Variables of ``p`` not shown to lie in ``space`` (empty list means success)."""
        return [v for v in sorted(p.variables()) if not self.in_space(v, space)]

    # -- strategies ---------------------------------------------------------
    def prove_closure(self, op: Op, src: Space, dst: Space, name: str) -> bool:
        bad = []
        if not self.included(src, dst):
            bad.append(f"{src} not in {dst}")
        for g in self.generators(src):
            img = self.base.apply(op, self.base.normalize(Poly.var(g), bind=False))
            miss = self.poly_in_space(img, dst)
            if miss:
                bad.append(f"{op_text(op)} {var_text(g)}: {', '.join(var_text(m) for m in miss)}")
        ok = not bad
        if ok:
            self.closures.append((op, src, dst))
        return self._log(name, f"{op_text(op)}({src}) in {dst}", "generator check", ok, "; ".join(bad))

    def prove_inclusion(self, a: Space, b: Space, name: str) -> bool:
        bad = [var_text(g) for g in self.generators(a) if not self.in_space(g, b)]
        ok = not bad
        if ok:
            self.edges.add((a, b))
            self.edges.add((a.conj(), b.conj()))
            self._known.clear()
        return self._log(name, f"{a} in {b}", "inclusion", ok, ", ".join(bad))

    def peel(self, ops: Sequence[Op], bar: int, idx: int, space: Space) -> Optional[str]:
        """Show the function ``ops f`` lies in ``space``; returns a justification or None."""
        if not ops:
            return None
        head, rest = ops[0], tuple(ops[1:])
        inner = self.base.word(rest, bar, idx)
        for op, src, dst in self.closures:
            if op == head and self.included(dst, space) and not self.poly_in_space(inner, src):
                return f"{self.word_text(rest, bar, idx)} in {src}, {op_text(op)}({src}) in {dst}"
        return None

    def prove_peel(self, ops, bar, idx, space, name) -> bool:
        why = self.peel(ops, bar, idx, space)
        if why is not None:
            self._claim(self.key(ops, bar, idx), space, name, "peel")
        return self._log(name, f"{self.word_text(ops, bar, idx)} in {space}", "peel",
                         why is not None, why or "no closure applies")

    def prove_direct(self, ops, bar, idx, space, name) -> bool:
        nf = self.base.word(ops, bar, idx)
        miss = self.poly_in_space(nf, space)
        ok = not miss
        if ok:
            self._claim(self.key(ops, bar, idx), space, name, "direct")
        return self._log(name, f"{self.word_text(ops, bar, idx)} in {space}", "direct", ok,
                         ", ".join(var_text(m) for m in miss))

    def prove_commutator(self, start: Sequence[Op], target: Sequence[Op], bar: int, idx: int,
                         space: Space, name: str, brackets_only: bool = False) -> bool:
        stmt = f"{self.word_text(target, bar, idx)} in {space}"
        why = self.peel(start, bar, idx, space)
        if why is None:
            return self._log(name, stmt, "commutator-solve", False,
                             f"start {self.word_text(start, bar, idx)} not shown in {space}")
        rules = self.comm if brackets_only else self.base
        nf = rules.word(start, bar, idx)
        v = self.key(target, bar, idx)
        coeff, rest = Poly(), Poly()
        for mono, c in nf.terms.items():
            exps = dict(mono)
            if exps.get(v) == 1:
                del exps[v]
                coeff = coeff + Poly({tuple(sorted(exps.items())): c})
            else:
                rest = rest + Poly({mono: c})
        problems = []
        if not _nonzero_constant(coeff):
            problems.append(f"coefficient {poly_text(coeff)} is not a nonzero constant")
        miss = self.poly_in_space(rest, space)
        if miss:
            problems.append("remainder outside: " + ", ".join(var_text(m) for m in miss))
        ok = not problems
        if ok:
            self._claim(v, space, name, "commutator-solve")
            self.divisors |= {a for a in coeff.variables() if a[0] == "c"}
        mode = "brackets only" if brackets_only else "base rules"
        detail = (f"{self.word_text(start, bar, idx)} = ({poly_text(coeff)}) {var_text(v)} + R "
                  f"[{mode}]; {why}")
        return self._log(name, stmt, "commutator-solve", ok,
                         detail + ("" if ok else "; " + "; ".join(problems)))


def _nonzero_constant(c: Poly) -> bool:
    if len(c.terms) != 1:
        return not c.is_zero() and c.is_const()
    (mono, coef), = c.terms.items()
    if coef.is_zero():
        return False
    return all(v[0] == "c" and v[1] == "g" and v[2] == v[3] for v, _ in mono)


def _mult_key(beta: Tuple[int, ...]):
    k = beta[0] if beta else 1
    return (-beta.count(k), beta)


def run_chain(n: int) -> Prover:
    """Run the full membership chain for dimension ``n``; inspect ``prover.steps``."""
    pr = Prover(n)
    ks = range(1, n)
    ps = range(1, n)
    C11, C21, C31, C41 = (Space(p, 1) for p in (1, 2, 3, 4))

    for q in range(1, n + 1):
        pr.axiom((), 0, q, C11, AXIOM_INVERSION)
        for k in ks:
            pr.axiom((L(k),), 0, q, C11, AXIOM_PROLONG)

    for m in ks:
        pr.prove_closure(L(m), C11, C11, "L-closure of Cb[1,1]")
    for r in range(2, 5):
        for a in _multisets(n, r):
            for q in range(1, n + 1):
                pr.prove_peel(tuple(L(k) for k in a), 0, q, C11, "L^a f_q in Cb[1,1]")

    for m in ks:
        pr.prove_closure(Lb(m), C11, C21, "Lbar-closure Cb[1,1] -> Cb[2,1]")

    for r in range(4):
        for beta in sorted(_multisets(n, r), key=_mult_key):
            k = beta[0] if beta else 1
            target = (T_OP,) + tuple(L(x) for x in beta)
            start = (Lb(k), L(k)) + tuple(L(x) for x in beta)
            for p in ps:
                pr.prove_commutator(start, target, 0, p, C21, "T L^a f_p in Cb[2,1]")
            if beta:
                pr.prove_direct(target, 0, n, C21, "T L^a f_n in Cb[2,1]")
            else:
                pr.prove_commutator(start, target, 0, n, C21, "T f_n in Cb[2,1]", brackets_only=True)

    pr.prove_inclusion(Space(4, 1, False), C21, "C[4,1] in Cb[2,1]")

    pr.prove_closure(Lb(1), C21, C31, "Lbar_1-closure Cb[2,1] -> Cb[3,1]")
    for p in ps:
        pr.prove_commutator((Lb(1), T_OP, L(1)), (T_OP, T_OP), 0, p, C31, "T^2 f_p in Cb[3,1]")
    pr.prove_commutator((Lb(1), T_OP, L(1)), (T_OP, T_OP), 0, n, C31, "T^2 f_n in Cb[3,1]",
                        brackets_only=True)

    for m in ks:
        pr.prove_closure(Lb(m), C21, C31, "Lbar-closure Cb[2,1] -> Cb[3,1]")
    for k in ks:
        for p in ps:
            pr.prove_commutator((Lb(k), T_OP, L(k), L(k)), (T_OP, T_OP, L(k)), 0, p, C31,
                                "T^2 L_k f_p in Cb[3,1]")
        pr.prove_commutator((Lb(k), T_OP, L(k), L(k)), (T_OP, T_OP, L(k)), 0, n, C31,
                            "T^2 L_k f_n in Cb[3,1]", brackets_only=True)

    for m in ks:
        pr.prove_closure(Lb(m), C31, C41, "Lbar-closure Cb[3,1] -> Cb[4,1]")
    for p in ps:
        pr.prove_commutator((Lb(1), T_OP, T_OP, L(1)), (T_OP,) * 3, 0, p, C41, "T^3 f_p in Cb[4,1]")
    pr.prove_commutator((Lb(1), T_OP, T_OP, L(1)), (T_OP,) * 3, 0, n, C41, "T^3 f_n in Cb[4,1]",
                        brackets_only=True)

    C21c = Space(2, 1, False)
    for t in range(4):
        for a in _multisets(n, 3 - t):
            for q in range(1, n + 1):
                pr.prove_direct((T_OP,) * t + tuple(L(x) for x in a), 0, q, C21c,
                                "third-order T^t L^a f_q in C[2,1]")
    pr.prove_inclusion(Space(3, 3, False), C21c, "C[3,3] in C[2,1]")

    for ops in normal_words(n, 3, 0):
        if any(kind == KIND_LB for kind, _ in ops):
            for q in range(1, n + 1):
                pr.prove_direct(ops, 0, q, C21c, "T^t L^a Lbar^b f_q in C[2,1]")
    return pr


def normal_words(n: int, order: int, bar: int) -> List[Tuple[Op, ...]]:
    """All normal-order words of the given order (T's, outer letters, inner letters)."""
    okind, ikind = (KIND_LB, KIND_L) if bar else (KIND_L, KIND_LB)
    out = []
    for t in range(order + 1):
        for a in range(order - t + 1):
            b = order - t - a
            for oa in _multisets(n, a):
                for ib in _multisets(n, b):
                    out.append((T_OP,) * t + tuple((okind, k) for k in oa)
                               + tuple((ikind, k) for k in ib))
    return out


def check_membership(prover: Prover, word: str, space: Space) -> bool:
    """Whether the (normal-order) word, as a function, is shown to lie in ``space``."""
    from .engine import parse_word

    ops, bar, idx = parse_word(word)
    nf = prover.base.word(ops, bar, idx)
    return not prover.poly_in_space(nf, space)
