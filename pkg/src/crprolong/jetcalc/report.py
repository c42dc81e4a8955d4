"""Classification of every third-order word applied to every component of f."""
from __future__ import annotations

from itertools import product
from typing import Dict, List, Optional

from ..scalar import Scalar
from .engine import (KIND_L, KIND_LB, KIND_T, L, Lb, RuleSet, T_OP, bind_atoms, is_normal_order,
                     op_text, poly_text, standard_binding, var_order, var_text)
from .membership import Prover, Space, run_chain


def _case(ops) -> Dict[str, int]:
    return {"t": sum(k == KIND_T for k, _ in ops), "a": sum(k == KIND_L for k, _ in ops),
            "b": sum(k == KIND_LB for k, _ in ops)}


def complete_system_report(n: int = 2, binding: Optional[Dict[tuple, Scalar]] = None,
                           prover: Optional[Prover] = None) -> Dict:
    """One entry per (word, target) with status ``rearranged``, ``reduced``, ``axiom`` or ``open``.

    * rearranged: the word is out of normal order; ``trace`` holds its bracket-only
      normal form and ``case`` the letter counts.
    * reduced: the base normal form only involves derivatives of order <= 2.
    * axiom: the surviving third-order variables lie in C[2,1] or Cb[2,1] by the
      membership chain, which rests on the two registered axioms.
    * open: membership is not established, either because the chain misses a
      variable or because the binding sets an atom the chain divides by to zero.
    """
    if binding is None:
        binding = standard_binding(n)
    prover = prover or run_chain(n)
    base = RuleSet(n, True, binding)
    comm = RuleSet(n, False, binding)
    letters = [T_OP] + [L(k) for k in range(1, n)] + [Lb(k) for k in range(1, n)]
    spaces = (Space(2, 1, False), Space(2, 1, True))
    degenerate = sorted(var_text(a) for a in prover.divisors
                        if a in binding and Scalar.coerce(binding[a]).is_zero())
    entries: List[Dict] = []
    for ops in product(letters, repeat=3):
        for q in range(1, n + 1):
            word = " ".join(op_text(o) for o in ops) + f" f{q}"
            entry: Dict = {"word": word, "target": f"f{q}"}
            nf = base.word(ops, 0, q)
            expr = bind_atoms(nf, binding)
            entry["expression"] = poly_text(expr)
            if not is_normal_order(ops, 0):
                entry["status"] = "rearranged"
                entry["case"] = _case(ops)
                entry["trace"] = poly_text(comm.normalize(comm.word(ops, 0, q)))
            else:
                high = sorted(v for v in expr.variables() if v[0] == "j" and var_order(v) >= 3)
                if not high:
                    entry["status"] = "reduced"
                else:
                    used = []
                    ok = True
                    for v in high:
                        where = next((s for s in spaces if prover.in_space(v, s)), None)
                        if where is None:
                            ok = False
                            used.append(f"{var_text(v)} unresolved")
                        else:
                            used.append(f"{var_text(v)} in {where}")
                    if degenerate:
                        ok = False
                        used.append("chain divides by " + ", ".join(degenerate) + ", bound to 0 here")
                    entry["status"] = "axiom" if ok else "open"
                    entry["trace"] = "; ".join(used)
            entries.append(entry)
    counts: Dict[str, int] = {}
    for e in entries:
        counts[e["status"]] = counts.get(e["status"], 0) + 1
    return {"n": n, "entries": entries, "counts": counts, "degenerate": degenerate,
            "axioms": sorted({c.name for cs in prover.claims.values() for c in cs if c.axiom})}
