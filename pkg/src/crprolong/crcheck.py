"""Checks for concrete maps: pseudo-holomorphy and the tangential CR equations on a surface."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .acstruct import StructureMatrix, matmul, model_spec_of
from .errors import InputError
from .frames import Frame, Hypersurface, build_model_frame
from .ratfunc import zbarvar, zvar
from .scalar import ONE, Scalar
from .symexpr import (Const, Expr, ZeroVerdict, add, conj, eval_expr, has_sqrt, is_zero, mul,
                      simplify, sqrt, substitute, wirtinger_d, z, zbar)


@dataclass(frozen=True)
class SymbolicMap:
    n_source: int
    n_target: int
    components: Tuple[Expr, ...]
    name: str = ""

    def __post_init__(self):
        if len(self.components) != self.n_target:
            raise ValueError(f"expected {self.n_target} components, got {len(self.components)}")

    def images(self) -> Dict[int, Expr]:
        """Substitution table sending target coordinates to the components."""
        out: Dict[int, Expr] = {}
        for j, comp in enumerate(self.components, start=1):
            out[zvar(j)] = comp
            out[zbarvar(j)] = conj(comp)
        return out

    def pull(self, e: Expr) -> Expr:
        """``e`` (in target coordinates) composed with the map."""
        return substitute(e, self.images())

    def vanishes_at_origin(self) -> bool:
        zero = (0j,) * self.n_source
        return all(abs(eval_expr(c, zero)) == 0 for c in self.components)

    def has_sqrt(self) -> bool:
        return any(has_sqrt(c) for c in self.components)


def identity_map(n: int) -> SymbolicMap:
    return SymbolicMap(n, n, tuple(z(j) for j in range(1, n + 1)), "identity")


def dilation(n: int, delta) -> SymbolicMap:
    """``(z', z_n) -> (sqrt(delta) z', delta z_n)``; exact when ``delta`` is a rational square."""
    d = Const(Scalar(Fraction(delta)))
    r = sqrt(d)
    comps = [mul(r, z(j)) for j in range(1, n)] + [mul(d, z(n))]
    return SymbolicMap(n, n, tuple(comps), f"dilation({delta})")


def conjugation_map(n: int) -> SymbolicMap:
    return SymbolicMap(n, n, tuple(zbar(j) for j in range(1, n + 1)), "conjugation")


def compose(f: SymbolicMap, g: SymbolicMap) -> SymbolicMap:
    """``f o g``."""
    if f.n_source != g.n_target:
        raise ValueError("dimension mismatch in composition")
    comps = tuple(simplify(g.pull(c)) if not has_sqrt(c) and not g.has_sqrt() else g.pull(c)
                  for c in f.components)
    return SymbolicMap(g.n_source, f.n_target, comps, f"{f.name}o{g.name}")


def jacobian(f: SymbolicMap) -> List[List[Expr]]:
    """Differential in the complexified bases (rows: d/dw_j, d/dwbar_j; columns: d/dz_k, d/dzbar_k)."""
    rows: List[List[Expr]] = []
    for comp in f.components:
        cb = conj(comp)
        for g in (comp, cb):
            row = []
            for k in range(1, f.n_source + 1):
                row.append(wirtinger_d(g, zvar(k)))
                row.append(wirtinger_d(g, zbarvar(k)))
            rows.append(row)
    return rows


def _clean(e: Expr) -> Expr:
    return e if has_sqrt(e) else simplify(e)


def pseudoholomorphy_residual(f: SymbolicMap, J: StructureMatrix, Jt: StructureMatrix) -> List[List[Expr]]:
    """Entries of ``Df J - J'(f) Df``; identically zero exactly for (J, J')-holomorphic maps."""
    if J.n != f.n_source or Jt.n != f.n_target:
        raise ValueError("structure dimensions do not match the map")
    D = jacobian(f)
    Jf = [[f.pull(e) for e in row] for row in Jt.as_lists()]
    left = matmul(D, J.as_lists())
    right = matmul(Jf, D)
    return [[_clean(add(a, mul(Const(-ONE), b))) for a, b in zip(ra, rb)]
            for ra, rb in zip(left, right)]


@dataclass
class CRResidual:
    family: str
    label: str
    expr: Expr
    verdict: ZeroVerdict
    parts: Optional[Dict[int, Expr]] = None

    @property
    def ok(self) -> bool:
        return bool(self.verdict)


def _model_frame(J: StructureMatrix, surface: Hypersurface, which: str) -> Frame:
    spec = model_spec_of(J)
    if spec is None:
        raise InputError(f"{which} structure is not of model type; no frame available")
    return build_model_frame(spec, surface)


def _on_surface(surface: Hypersurface, e: Expr, family: str, label: str, trials: int, tol: float,
                seed: int) -> CRResidual:
    red = surface.reduce(e)
    if has_sqrt(red):
        return CRResidual(family, label, red,
                          is_zero(red, trials=trials, tol=tol, seed=seed, n=surface.n))
    red = simplify(red)
    if surface.exact:
        return CRResidual(family, label, red,
                          is_zero(red, trials=trials, tol=tol, seed=seed, n=surface.n))
    parts = surface.residual_parts(e)
    if not parts:
        return CRResidual(family, label, red, ZeroVerdict("ExactZero"), parts)
    deg = min(parts)
    return CRResidual(family, label, red,
                      is_zero(parts[deg], trials=trials, tol=tol, seed=seed, n=surface.n), parts)


def cr_residuals(f: SymbolicMap, J: StructureMatrix, Jt: StructureMatrix, surface: Hypersurface,
                 target: Hypersurface, trials: int = 20, tol: float = 1e-9,
                 seed: int = 0) -> List[CRResidual]:
    """Tangential CR equations and the tangency relation, each reduced on the source surface.

    Families: ``Lp fbar_j`` (j < n), ``Lp f_n``, ``Lp fbar_n`` and ``tangency``
    (target defining function composed with f).
    """
    n, m = f.n_source, f.n_target
    if J.n != n or Jt.n != m or surface.n != n or target.n != m:
        raise ValueError("dimension mismatch")
    if not f.vanishes_at_origin():
        raise InputError("the map must send 0 to 0")
    src = _model_frame(J, surface, "source")
    tgt = _model_frame(Jt, target, "target")
    alpha = [f.pull(X.c[m - 1]) for X in tgt.L]
    beta = [f.pull(X.d[m - 1]) for X in tgt.L]
    comps = f.components
    bars = [conj(c) for c in comps]
    out: List[CRResidual] = []
    for p, Lp in enumerate(src.L, start=1):
        Lf = [Lp.apply(c) for c in comps]
        for j in range(1, m):
            out.append(_on_surface(surface, Lp.apply(bars[j - 1]), "Lp fbar_j", f"L{p} fbar{j}",
                                   trials, tol, seed))
        rn = add(Lf[m - 1], mul(Const(-ONE), add(*[mul(alpha[j], Lf[j]) for j in range(m - 1)])))
        out.append(_on_surface(surface, rn, "Lp f_n", f"L{p} f{m}", trials, tol, seed))
        rb = add(Lp.apply(bars[m - 1]),
                 mul(Const(-ONE), add(*[mul(beta[j], Lf[j]) for j in range(m - 1)])))
        out.append(_on_surface(surface, rb, "Lp fbar_n", f"L{p} fbar{m}", trials, tol, seed))
    out.append(_on_surface(surface, f.pull(target.rho), "tangency", "rho'(f)", trials, tol, seed))
    return out


@dataclass
class Pushforward:
    matrix: np.ndarray
    cond: float
    exact: Optional[List[List[Scalar]]] = None

    @property
    def invertible(self) -> bool:
        return bool(np.isfinite(self.cond))


def frame_pushforward_matrix(f: SymbolicMap, frame: Frame, p: Sequence = None) -> Pushforward:
    """``(L_k f_j)(p)`` for k, j < n with its condition number; exact when ``p`` is Gaussian rational."""
    n = f.n_source
    if p is None:
        p = [Scalar(0)] * n
    exact_pt = all(isinstance(c, (int, Fraction, Scalar)) for c in p)
    numeric = [complex(c) for c in p]
    rows_num, rows_exact = [], []
    for Lk in frame.L:
        rn, re_ = [], []
        for j in range(f.n_target - 1):
            e = Lk.apply(f.components[j])
            rn.append(eval_expr(e, numeric))
            if exact_pt and not has_sqrt(e):
                table = {}
                for i, c in enumerate(p, start=1):
                    s = Scalar.coerce(c)
                    table[zvar(i)] = Const(s)
                    table[zbarvar(i)] = Const(s.conj())
                val = simplify(substitute(e, table))
                re_.append(val.c if isinstance(val, Const) else None)
            else:
                re_.append(None)
        rows_num.append(rn)
        rows_exact.append(re_)
    mat = np.array(rows_num, dtype=complex)
    sv = np.linalg.svd(mat, compute_uv=False)
    cond = float("inf") if sv[-1] <= 1e-14 * max(sv[0], 1.0) else float(sv[0] / sv[-1])
    exact = rows_exact if all(x is not None for r in rows_exact for x in r) else None
    return Pushforward(mat, cond, exact)
