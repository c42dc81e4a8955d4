"""Rewrite engine for frame derivatives of a CR map ``f = (f_1, ..., f_n)``.

Jet polynomials are ``Poly`` objects whose variables are tagged tuples:

* ``('j', bar, idx, t, outer, inner)`` is a normal-ordered jet variable.  For
  ``bar == 0`` it denotes ``T^t L^outer Lbar^inner f_idx``; for ``bar == 1`` the
  mirrored ``T^t Lbar^outer L^inner fbar_idx``.  ``outer`` and ``inner`` are
  ascending index tuples.  With this convention conjugation only flips ``bar``.
* ``('w', bar, idx, ops)`` is a raw, unnormalized word (leftmost op applied last).
* ``('c', name, i, j)`` is a constant atom (see :func:`atom`).

Operators are pairs ``(kind, index)`` with kind 0 = T, 1 = L, 2 = Lbar.

Rules (a :class:`RuleSet`), applied innermost first:

* T is central.  ``[L_j, Lbar_k] = gamma[j,kb] T``, ``[L_j, L_k] = c[j,k] T``,
  ``[Lbar_j, Lbar_k] = cb[j,k] T``.
* Base relations, active unless ``base=False``: ``Lbar_p f_j = 0`` and
  ``L_p fbar_j = 0`` for j < n; ``L_p fbar_n = sum_j beta_j(f) L_p f_j``;
  ``L_p f_n = sum_j alpha_j(f) L_p f_j`` and the conjugates, where
  ``beta_j(f) = sum_l (a[j,l] f_l + b[j,l] fbar_l)`` and
  ``alpha_j(f) = -beta_j(f) - 2 fbar_j``.

Termination: each rewrite either shortens the distance of an operator to its
sorted slot or replaces two L-type letters by one T, so the lexicographic
measure (letters out of place, L-type letter count) strictly decreases.  A step
budget guards against rule-table bugs.
"""
from __future__ import annotations

import re
from typing import Dict, List, Optional, Sequence, Tuple

from ..errors import NonTermination
from ..poly import Poly
from ..scalar import Scalar, format_scalar

Op = Tuple[int, int]
T_OP: Op = (0, 0)

KIND_T, KIND_L, KIND_LB = 0, 1, 2


def L(k: int) -> Op:
    return (KIND_L, k)


def Lb(k: int) -> Op:
    return (KIND_LB, k)


def op_conj(op: Op) -> Op:
    kind, k = op
    return (3 - kind, k) if kind else op


# ---------------------------------------------------------------------------
# variables and atoms

def jetvar(bar: int, idx: int, t: int = 0, outer: Sequence[int] = (), inner: Sequence[int] = ()) -> tuple:
    return ("j", bar, idx, t, tuple(outer), tuple(inner))


def f(idx: int) -> Poly:
    return Poly.var(jetvar(0, idx))


def fb(idx: int) -> Poly:
    return Poly.var(jetvar(1, idx))


def is_jetvar(v) -> bool:
    return v[0] == "j"


def is_atom(v) -> bool:
    return v[0] == "c"


def var_order(v) -> int:
    return v[3] + len(v[4]) + len(v[5])


_ATOM_CONJ = {"a": "ab", "ab": "a", "b": "bb", "bb": "b", "c": "cb", "cb": "c"}


def atom(name: str, i: int, j: int) -> Poly:
    """Constant atom as a Poly.

    ``g`` is gamma[i, jb] (bracket of L_i with Lbar_j); ``c``/``cb`` are the
    antisymmetric [L, L] / [Lbar, Lbar] constants (only i < j is stored);
    ``a, ab, b, bb`` are the model coefficients and their conjugates.
    """
    if name in ("c", "cb"):
        if i == j:
            return Poly()
        if i > j:
            return -Poly.var(("c", name, j, i))
    return Poly.var(("c", name, i, j))


def gamma(j: int, k: int) -> Poly:
    return atom("g", j, k)


def _conj_var(v) -> Poly:
    tag = v[0]
    if tag == "j":
        return Poly.var(("j", 1 - v[1]) + v[2:])
    if tag == "w":
        return Poly.var(("w", 1 - v[1], v[2], tuple(op_conj(o) for o in v[3])))
    _, name, i, j = v
    if name == "g":
        return -Poly.var(("c", "g", j, i))
    return Poly.var(("c", _ATOM_CONJ[name], i, j))


def conj_poly(p: Poly) -> Poly:
    return p.map_coeffs(lambda c: c.conj()).substitute(_conj_var)


# ---------------------------------------------------------------------------
# text forms

def op_text(op: Op) -> str:
    kind, k = op
    return "T" if kind == KIND_T else (f"L{k}" if kind == KIND_L else f"Lb{k}")


def var_text(v) -> str:
    tag = v[0]
    if tag == "c":
        _, name, i, j = v
        if name == "g":
            return f"gamma[{i},{j}b]"
        return f"{name}[{i},{j}]"
    if tag == "w":
        _, bar, idx, ops = v
        parts = [op_text(o) for o in ops]
        return " ".join(parts + [f"{'fb' if bar else 'f'}{idx}"])
    _, bar, idx, t, outer, inner = v
    parts = []
    if t:
        parts.append("T" if t == 1 else f"T^{t}")
    okind, ikind = ("Lb", "L") if bar else ("L", "Lb")
    parts += [f"{okind}{k}" for k in outer] + [f"{ikind}{k}" for k in inner]
    parts.append(f"{'fb' if bar else 'f'}{idx}")
    return " ".join(parts)


def _sort_key(item):
    mono, _ = item
    return tuple((var_text(v), e) for v, e in mono)


def poly_text(p: Poly) -> str:
    """Deterministic text form, terms sorted by their variable text."""
    if p.is_zero():
        return "0"
    out = []
    for mono, c in sorted(p.terms.items(), key=_sort_key):
        factors = []
        for v, e in mono:
            s = var_text(v)
            if " " in s:
                s = f"({s})"
            factors.append(s if e == 1 else f"{s}^{e}")
        body = "*".join(factors)
        neg = (c.im == 0 and c.re < 0) or (c.re == 0 and c.im < 0)
        mag = -c if neg else c
        if not body:
            term = format_scalar(mag)
        elif mag.is_one():
            term = body
        else:
            term = f"{format_scalar(mag)}*{body}"
        if not out:
            out.append(("-" if neg else "") + term)
        else:
            out.append((" - " if neg else " + ") + term)
    return "".join(out)


_WORD_TOKEN = re.compile(r"\s*(T(?:\^(\d+))?|Lb(\d+)|L(\d+)|fb(\d+)|f(\d+))")


def parse_word(text: str) -> Tuple[Tuple[Op, ...], int, int]:
    """Parse ``"T^2 L1 Lb2 f3"`` into ``(ops, bar, idx)``; the target comes last."""
    pos = 0
    ops: List[Op] = []
    target = None
    text = text.strip()
    while pos < len(text):
        m = _WORD_TOKEN.match(text, pos)
        if not m or target is not None:
            raise ValueError(f"bad word {text!r} at position {pos}")
        tok = m.group(1)
        if tok.startswith("T"):
            ops += [T_OP] * int(m.group(2) or 1)
        elif m.group(3):
            ops.append(Lb(int(m.group(3))))
        elif m.group(4):
            ops.append(L(int(m.group(4))))
        elif m.group(5):
            target = (1, int(m.group(5)))
        else:
            target = (0, int(m.group(6)))
        pos = m.end()
    if target is None:
        raise ValueError(f"word {text!r} has no target")
    return tuple(ops), target[0], target[1]


def W(text: str) -> Poly:
    """Raw (unnormalized) word as a one-variable polynomial."""
    ops, bar, idx = parse_word(text)
    return Poly.var(("w", bar, idx, ops))


def word_poly(ops: Sequence[Op], bar: int, idx: int) -> Poly:
    return Poly.var(("w", bar, idx, tuple(ops)))


def is_normal_order(ops: Sequence[Op], bar: int) -> bool:
    """T's first, then the outer kind ascending, then the inner kind ascending."""
    okind = KIND_LB if bar else KIND_L
    stage = 0
    last = 0
    for kind, k in ops:
        s = 0 if kind == KIND_T else (1 if kind == okind else 2)
        if s < stage:
            return False
        if s != stage:
            stage, last = s, 0
        if s and k < last:
            return False
        last = k
    return True


# ---------------------------------------------------------------------------
# rule sets

class RuleSet:
    """Rewrite rules for dimension ``n``; immutable apart from internal memo tables."""

    def __init__(self, n: int, base: bool = True, binding: Optional[Dict[tuple, Scalar]] = None,
                 budget: int = 10 ** 6):
        if n < 2:
            raise ValueError("n must be >= 2")
        self.n = n
        self.base = base
        self.binding = dict(binding) if binding else None
        self.budget = budget
        self.steps = 0
        self._act: Dict[Tuple[Op, tuple], Poly] = {}
        self._word: Dict[tuple, Poly] = {}

    def with_mode(self, base: bool) -> "RuleSet":
        return RuleSet(self.n, base, self.binding, self.budget)

    # -- commutators --------------------------------------------------------
    def commutator(self, x: Op, y: Op) -> Poly:
        """Coefficient ``k`` with ``[x, y] = k T``."""
        kx, ix = x
        ky, iy = y
        if kx == KIND_T or ky == KIND_T:
            return Poly()
        if kx == KIND_L and ky == KIND_LB:
            return gamma(ix, iy)
        if kx == KIND_LB and ky == KIND_L:
            return -gamma(iy, ix)
        if kx == KIND_L:
            return atom("c", ix, iy)
        return atom("cb", ix, iy)

    # -- base relations -------------------------------------------------------
    def beta(self, j: int) -> Poly:
        return Poly() + sum((atom("a", j, l) * f(l) + atom("b", j, l) * fb(l)
                             for l in range(1, self.n)), Poly())

    def alpha(self, j: int) -> Poly:
        return -self.beta(j) - fb(j).scale(2)

    def _base(self, op: Op, bar: int) -> Poly:
        """Expansion of ``op`` applied to the bare target ``f_n`` (bar=0) or ``fbar_n``."""
        kind, p = op
        n = self.n
        lf = lambda j: Poly.var(jetvar(0, j, 0, (p,), ()))
        lbfb = lambda j: Poly.var(jetvar(1, j, 0, (p,), ()))
        out = Poly()
        for j in range(1, n):
            if bar == 0 and kind == KIND_L:
                out = out + self.alpha(j) * lf(j)
            elif bar == 0:
                out = out + conj_poly(self.beta(j)) * lbfb(j)
            elif kind == KIND_L:
                out = out + self.beta(j) * lf(j)
            else:
                out = out + conj_poly(self.alpha(j)) * lbfb(j)
        return out

    # -- core ---------------------------------------------------------------
    def _tick(self):
        self.steps += 1
        if self.steps > self.budget:
            raise NonTermination(f"step budget {self.budget} exceeded")

    def act(self, op: Op, v: tuple) -> Poly:
        """Normal form of ``op`` applied to the jet variable ``v``."""
        key = (op, v)
        hit = self._act.get(key)
        if hit is not None:
            return hit
        self._tick()
        res = self._act_uncached(op, v)
        self._act[key] = res
        return res

    def _act_uncached(self, op: Op, v: tuple) -> Poly:
        _, bar, idx, t, outer, inner = v
        kind, k = op
        if kind == KIND_T:
            return Poly.var(("j", bar, idx, t + 1, outer, inner))
        okind = KIND_LB if bar else KIND_L
        if kind == okind:
            if outer and outer[0] < k:
                return self._swap(op, (okind, outer[0]), ("j", bar, idx, t, outer[1:], inner))
            if not outer and not inner and self.base and idx == self.n:
                return self._with_t(self._base(op, bar), t)
            return Poly.var(("j", bar, idx, t, (k,) + outer, inner))
        if outer:
            return self._swap(op, (okind, outer[0]), ("j", bar, idx, t, outer[1:], inner))
        if inner and inner[0] < k:
            return self._swap(op, (kind, inner[0]), ("j", bar, idx, t, (), inner[1:]))
        if not inner and self.base:
            if idx < self.n:
                return Poly()
            return self._with_t(self._base(op, bar), t)
        return Poly.var(("j", bar, idx, t, (), (k,) + inner))

    def _swap(self, op: Op, first: Op, rest: tuple) -> Poly:
        # op (first rest) = first (op rest) + [op, first] rest
        out = self.apply(first, self.act(op, rest))
        comm = self.commutator(op, first)
        if not comm.is_zero():
            out = out + comm * self.act(T_OP, rest)
        return out

    def _with_t(self, p: Poly, t: int) -> Poly:
        for _ in range(t):
            p = self.apply(T_OP, p)
        return p

    def apply(self, op: Op, p: Poly) -> Poly:
        """Leibniz extension of :meth:`act` to a polynomial; atoms are constants."""
        return p.derive(lambda v: self.act(op, v) if v[0] == "j" else Poly())

    def word(self, ops: Sequence[Op], bar: int, idx: int) -> Poly:
        key = (tuple(ops), bar, idx)
        hit = self._word.get(key)
        if hit is not None:
            return hit
        p = Poly.var(jetvar(bar, idx))
        for op in reversed(ops):
            p = self.apply(op, p)
        self._word[key] = p
        return p

    def _expand_var(self, v) -> Optional[Poly]:
        tag = v[0]
        if tag == "w":
            return self.word(v[3], v[1], v[2])
        if tag == "j":
            _, bar, idx, t, outer, inner = v
            okind, ikind = (KIND_LB, KIND_L) if bar else (KIND_L, KIND_LB)
            ops = [T_OP] * t + [(okind, k) for k in outer] + [(ikind, k) for k in inner]
            return self.word(ops, bar, idx)
        return None

    def normalize(self, p: Poly, bind: bool = True) -> Poly:
        """Rewrite every word and jet variable to normal form; optionally apply the binding."""
        out = p.substitute(self._expand_var)
        if bind and self.binding:
            out = bind_atoms(out, self.binding)
        return out

    def W(self, text: str) -> Poly:
        ops, bar, idx = parse_word(text)
        return self.normalize(word_poly(ops, bar, idx))


def bind_atoms(p: Poly, binding: Dict[tuple, Scalar]) -> Poly:
    def image(v):
        if v[0] != "c":
            return None
        if v in binding:
            return Poly.const(binding[v])
        return None
    return p.substitute(image)


def is_base_normal(rules: RuleSet, v: tuple) -> bool:
    """Whether the jet variable survives base-mode normalization unchanged."""
    if v[0] != "j":
        return True
    return rules.normalize(Poly.var(v), bind=False) == Poly.var(v)


# ---------------------------------------------------------------------------
# bindings

def standard_binding(n: int) -> Dict[tuple, Scalar]:
    """Atom values for the standard structure: gamma[j,jb] = -2i, everything else 0."""
    out: Dict[tuple, Scalar] = {}
    for j in range(1, n):
        for k in range(1, n):
            out[("c", "g", j, k)] = Scalar(0, -2) if j == k else Scalar(0)
            for name in ("a", "ab", "b", "bb"):
                out[("c", name, j, k)] = Scalar(0)
            if j < k:
                out[("c", "c", j, k)] = Scalar(0)
                out[("c", "cb", j, k)] = Scalar(0)
    return out


def model_binding(spec) -> Dict[tuple, Scalar]:
    """Atom values for a model structure; bracket constants come from the frame decomposition."""
    from ..frames import build_model_frame, structure_constants

    n = spec.n
    frame = build_model_frame(spec)
    consts = structure_constants(frame)
    a, b = spec.frame_coefficients()
    out: Dict[tuple, Scalar] = {}
    for j in range(1, n):
        for k in range(1, n):
            g = consts[f"gamma[{j},{k}b]"]
            out[("c", "g", j, k)] = _const_of(g)
            out[("c", "a", j, k)] = a[j - 1][k - 1]
            out[("c", "ab", j, k)] = a[j - 1][k - 1].conj()
            out[("c", "b", j, k)] = b[j - 1][k - 1]
            out[("c", "bb", j, k)] = b[j - 1][k - 1].conj()
            if j < k:
                c = _const_of(consts[f"c[{j},{k}]"])
                out[("c", "c", j, k)] = c
                out[("c", "cb", j, k)] = c.conj()
    return out


def _const_of(e) -> Scalar:
    from ..symexpr import Const, simplify

    s = simplify(e)
    if not isinstance(s, Const):
        raise ValueError(f"structure constant {s} is not constant")
    return s.c
