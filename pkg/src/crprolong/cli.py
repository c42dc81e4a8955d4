"""Command-line entry point.

Exit codes: 0 when every check passes, 1 on a verification failure (the first
ten witnesses are listed), 2 on malformed input.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np

from .errors import CrprolongError, InputError

MAX_WITNESSES = 10


@dataclass
class RunConfig:
    command: str
    order: int = 4
    trials: int = 20
    tol: float = 1e-9
    seed: int = 0
    fmt: str = "text"

    def __post_init__(self):
        if self.tol <= 0:
            raise InputError("tolerance must be positive")
        if self.trials < 1:
            raise InputError("trials must be >= 1")

    @property
    def zero_kw(self) -> Dict:
        return {"trials": self.trials, "tol": self.tol, "seed": self.seed}


class Outcome:
    """Collects report lines, a JSON payload and failure witnesses."""

    def __init__(self):
        self.lines: List[str] = []
        self.data: Dict = {}
        self.witnesses: List[str] = []

    def say(self, line: str = ""):
        self.lines.append(line)

    def fail(self, witness: str):
        self.witnesses.append(witness)


def _cplx(z: complex) -> str:
    return f"{z.real:.12g}{z.imag:+.12g}i"


def _verdict_text(v) -> str:
    if v.kind == "NonZero" and v.witness is not None:
        pt = ", ".join(_cplx(c) for c in v.witness)
        return f"NonZero at ({pt}) value {_cplx(complex(v.value))}"
    return v.kind


def _verdict_json(v) -> Dict:
    out = {"kind": v.kind}
    if v.witness is not None:
        out["witness"] = [_cplx(c) for c in v.witness]
        out["value"] = _cplx(complex(v.value))
    return out


def _parse_point(text: Optional[str], n: int) -> List[complex]:
    if not text:
        return [0j] * n
    try:
        pt = [complex(s.strip().replace("i", "j")) for s in text.split(",")]
    except ValueError as exc:
        raise InputError(f"bad point {text!r}: {exc}") from exc
    if len(pt) != n:
        raise InputError(f"point needs {n} coordinates")
    return pt


def _frame_fields(J):
    """Holomorphic frame appropriate to the shape of J."""
    from .acstruct import classify, model_spec_of, star_spec_of
    from .frames import build_model_frame, build_raw_frame, build_star_frame

    kind = classify(J)
    if kind in ("standard", "model"):
        return kind, list(build_model_frame(model_spec_of(J)).L)
    if kind == "star":
        return kind, build_star_frame(star_spec_of(J))
    return kind, build_raw_frame(J)


# ---------------------------------------------------------------------------
# commands

def cmd_check_structure(args, cfg: RunConfig, out: Outcome):
    from .acstruct import (classify, involution_residual, matrix_verdicts, reality_residuals,
                           star_constraint_names, star_constraint_residuals, star_spec_of)
    from .symexpr import is_zero

    J = _load_structure(args.file)
    kind = classify(J)
    verdicts = matrix_verdicts(involution_residual(J), n=J.n, **cfg.zero_kw)
    bad = [(r, c, v) for r, c, v in verdicts if not v]
    overall = "NonZero" if bad else ("ExactZero" if all(v.kind == "ExactZero" for _, _, v in verdicts)
                                     else "ProbablyZero")
    out.say(f"structure: n={J.n} kind={kind}")
    out.say(f"involution: {overall}")
    for r, c, v in bad:
        out.fail(f"(J^2 + I)[{r},{c}]: {_verdict_text(v)}")
    real = [(r, c, is_zero(e, n=J.n, **cfg.zero_kw)) for r, c, e in reality_residuals(J)]
    rbad = [(r, c, v) for r, c, v in real if not v]
    out.say(f"conjugate pairing: {'NonZero' if rbad else 'zero'}")
    for r, c, v in rbad:
        out.fail(f"conjugate pairing at [{r},{c}]: {_verdict_text(v)}")
    out.data = {"n": J.n, "kind": kind, "involution": overall,
                "involution_failures": [{"row": r, "col": c, **_verdict_json(v)} for r, c, v in bad]}
    spec = star_spec_of(J)
    if spec is not None and kind == "star":
        cons = []
        for name, e in zip(star_constraint_names(J.n), star_constraint_residuals(spec)):
            v = is_zero(e, n=J.n, **cfg.zero_kw)
            out.say(f"  {name}: {v.kind}")
            cons.append({"name": name, **_verdict_json(v)})
            if not v:
                out.fail(f"{name}: {_verdict_text(v)}")
        out.data["constraints"] = cons


def cmd_frame(args, cfg: RunConfig, out: Outcome):
    from .frames import eigen_residual

    J = _load_structure(args.file)
    kind, fields = _frame_fields(J)
    out.say(f"frame for n={J.n} ({kind}):")
    rows = []
    for k, X in enumerate(fields, start=1):
        res = eigen_residual(J, X)
        vs = res.verdicts(n=J.n, **cfg.zero_kw)
        worst = next((v for v in vs if not v), None)
        kind_ = worst.kind if worst else ("ExactZero" if all(v.kind == "ExactZero" for v in vs)
                                          else "ProbablyZero")
        out.say(f"  X{k} = {X.to_text()}")
        out.say(f"     JX - iX: {kind_}")
        rows.append({"field": f"X{k}", "expr": X.to_text(), "eigen_residual": kind_})
        if worst:
            out.fail(f"X{k}: J X - i X {_verdict_text(worst)}")
    out.data = {"n": J.n, "kind": kind, "fields": rows}


def cmd_brackets(args, cfg: RunConfig, out: Outcome):
    from .acstruct import model_spec_of
    from .frames import build_model_frame, decompose_in_frame, lie_bracket, structure_constants
    from .symexpr import normalize_rational

    J = _load_structure(args.file)
    spec = model_spec_of(J)
    if spec is None:
        raise InputError("brackets needs a standard or model structure")
    frame = build_model_frame(spec)
    consts = structure_constants(frame)
    out.say(f"bracket constants (n={J.n}):")
    for name in sorted(consts):
        out.say(f"  {name} = {consts[name]}")
    for j in range(1, J.n):
        for k in range(1, J.n):
            dec = decompose_in_frame(lie_bracket(frame.L[j - 1], frame.Lbar[k - 1]), frame)
            if not dec.residual.is_zero(n=J.n, **cfg.zero_kw) or not dec.is_constant():
                out.fail(f"[L{j}, Lbar{k}] is not a constant multiple of T")
    vanishing = [f"gamma[{j},{j}b]" for j in range(1, J.n)
                 if normalize_rational(consts[f"gamma[{j},{j}b]"]).is_zero()]
    out.say(f"diagonal gamma nonzero: {'no (' + ', '.join(vanishing) + ')' if vanishing else 'yes'}")
    out.data = {"n": J.n, "constants": {k: str(v) for k, v in sorted(consts.items())},
                "vanishing_diagonal": vanishing}


def cmd_levi(args, cfg: RunConfig, out: Outcome):
    from .frames import Hypersurface, levi_form

    J = _load_structure(args.file)
    _, fields = _frame_fields(J)
    if not 1 <= args.field < J.n:
        raise InputError(f"--field must lie in 1..{J.n - 1}")
    p = _parse_point(args.point, J.n)
    surface = Hypersurface.siegel(J.n, cfg.order)
    val = levi_form(J, surface, fields[args.field - 1], p)
    out.say(f"Levi form of L{args.field} at ({', '.join(_cplx(c) for c in p)}): {val:.12g}")
    out.data = {"field": args.field, "point": [_cplx(c) for c in p], "value": val}
    if not val > 0:
        out.fail(f"Levi form {val} is not positive")


def cmd_defect(args, cfg: RunConfig, out: Outcome):
    from .frames import defect_at_point, direction_varies
    from .symexpr import sample_polydisc

    J = _load_structure(args.file)
    kind, fields = _frame_fields(J)
    n = J.n
    for name, v in (("--j", args.j), ("--k", args.k)):
        if not 1 <= v <= n:
            raise InputError(f"{name} must lie in 1..{n}")
    rng = np.random.default_rng(cfg.seed)
    samples, pts = [], []
    for _ in range(10):
        p = sample_polydisc(rng, n)
        pts.append(p)
        samples.append(defect_at_point(fields, args.j, args.k, p))
    varies, minor = direction_varies(samples)
    verdict = "NON-CONSTANT" if varies else "CONSTANT"
    out.say(f"defect of [X{args.j}, X{args.k}] ({kind}), Xbar coefficients at seeded points:")
    for p, s in zip(pts, samples):
        out.say("  " + ", ".join(_cplx(c) for c in s))
    out.say(f"largest normalized 2x2 minor: {minor:.6g}")
    out.say(f"defect direction {verdict}")
    out.data = {"j": args.j, "k": args.k, "kind": kind, "direction": verdict, "minor": minor,
                "samples": [[_cplx(c) for c in s] for s in samples]}


def cmd_identities(args, cfg: RunConfig, out: Outcome):
    from .jetcalc import RuleSet, negative_control, run_suite, verify_identity

    n, binding = args.n, None
    if args.bind:
        from .fileio import load_binding
        n, binding = load_binding(args.bind)
    results = run_suite(n, binding)
    out.say(f"identities for n={n} ({'bound' if binding else 'generic atoms'}):")
    for r in results:
        out.say(f"  {'PASS' if r.ok else 'FAIL'}  {r.name}")
        if not r.ok:
            out.fail(f"{r.name}: residual {r.witness}")
    neg = negative_control(n)
    res = verify_identity(neg.lhs, neg.rhs, RuleSet(n, True, binding))
    out.say(f"  negative control ({neg.name}): {'fails as expected' if not res.is_zero() else 'PASSED'}")
    if res.is_zero():
        out.fail("negative control unexpectedly verified")
    passed = sum(r.ok for r in results)
    out.say(f"{passed}/{len(results)} identities PASS")
    out.data = {"n": n, "bound": binding is not None,
                "results": [{"name": r.name, "ok": r.ok} for r in results],
                "negative_control_fails": not res.is_zero()}


def cmd_prolong_report(args, cfg: RunConfig, out: Outcome):
    from .jetcalc import complete_system_report, standard_binding

    n, binding = args.n, None
    if args.bind:
        from .fileio import load_binding
        n, binding = load_binding(args.bind)
    rep = complete_system_report(n, binding or standard_binding(n))
    for e in rep["entries"]:
        line = f"{e['word']:<14} {e['status']:<10} {e['expression']}"
        if "trace" in e:
            line += f"    [{e['trace']}]"
        out.say(line)
    out.say(f"counts: {json.dumps(rep['counts'], sort_keys=True)}")
    for ax in rep["axioms"]:
        out.say(f"axiom used: {ax}")
    for e in rep["entries"]:
        if e["status"] == "open":
            out.fail(f"{e['word']}: {e.get('trace', '')}")
    out.data = rep["entries"]


def cmd_verify_map(args, cfg: RunConfig, out: Outcome):
    from .crcheck import cr_residuals, pseudoholomorphy_residual
    from .fileio import load_map
    from .frames import Hypersurface
    from .symexpr import is_zero

    f = load_map(args.map)
    J = _load_structure(args.jsrc)
    Jt = _load_structure(args.jtgt)
    if J.n != f.n_source or Jt.n != f.n_target:
        raise InputError("structure dimensions do not match the map")
    ph = pseudoholomorphy_residual(f, J, Jt)
    ph_rows = []
    for r, row in enumerate(ph, start=1):
        for c, e in enumerate(row, start=1):
            v = is_zero(e, n=f.n_source, **cfg.zero_kw)
            if not v:
                out.fail(f"pseudo-holomorphy [{r},{c}]: {_verdict_text(v)}")
                ph_rows.append({"row": r, "col": c, **_verdict_json(v)})
    out.say(f"map {f.name or args.map}: pseudo-holomorphy {'NonZero' if ph_rows else 'zero'}")
    src = Hypersurface.siegel(f.n_source, cfg.order)
    tgt = Hypersurface.siegel(f.n_target, cfg.order)
    cr = cr_residuals(f, J, Jt, src, tgt, **cfg.zero_kw)
    crj = []
    for res in cr:
        out.say(f"  {res.label:<12} {_verdict_text(res.verdict)}")
        crj.append({"label": res.label, "family": res.family, **_verdict_json(res.verdict)})
        if not res.ok:
            out.fail(f"{res.label}: {_verdict_text(res.verdict)}")
    out.data = {"map": f.name, "pseudoholomorphy_failures": ph_rows, "cr": crj}


def _load_structure(path):
    from .fileio import load_structure
    return load_structure(path)


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="crprolong", description=__doc__.splitlines()[0])
    ap.add_argument("--format", choices=["text", "json"], default="text")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--tol", type=float, default=1e-9)
    ap.add_argument("--order", type=int, default=4, help="truncation order of surface reductions")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-structure", help="involution and shape checks")
    p.add_argument("file")
    p.set_defaults(func=cmd_check_structure)
    p = sub.add_parser("frame", help="J-holomorphic frame with eigen-equation residuals")
    p.add_argument("file")
    p.set_defaults(func=cmd_frame)
    p = sub.add_parser("brackets", help="bracket constants of a model frame")
    p.add_argument("file")
    p.set_defaults(func=cmd_brackets)
    p = sub.add_parser("levi", help="Levi form of one frame field")
    p.add_argument("file")
    p.add_argument("--field", type=int, default=1)
    p.add_argument("--point", default=None, help="comma separated complex coordinates")
    p.set_defaults(func=cmd_levi)
    p = sub.add_parser("defect", help="integrability defect direction of [X_j, X_k]")
    p.add_argument("file")
    p.add_argument("--j", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=cmd_defect)
    p = sub.add_parser("identities", help="jet identity suite")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--bind", default=None)
    p.set_defaults(func=cmd_identities)
    p = sub.add_parser("prolong-report", help="classification of all third-order words")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--bind", default=None)
    p.set_defaults(func=cmd_prolong_report)
    p = sub.add_parser("verify-map", help="pseudo-holomorphy and CR residuals of a map")
    p.add_argument("map")
    p.add_argument("jsrc")
    p.add_argument("jtgt")
    p.set_defaults(func=cmd_verify_map)
    return ap


def run(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    seed = args.seed
    env = os.environ.get("CRPROLONG_SEED")
    try:
        if env is not None:
            try:
                seed = int(env)
            except ValueError:
                raise InputError(f"CRPROLONG_SEED must be an integer, got {env!r}")
        cfg = RunConfig(args.command, args.order, args.trials, args.tol, seed, args.format)
        if getattr(args, "n", None) is not None and args.n < 2:
            raise InputError("--n must be >= 2")
        out = Outcome()
        args.func(args, cfg, out)
    except InputError as exc:
        print(f"input error: {exc}", file=stderr)
        return 2
    except CrprolongError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=stderr)
        return 1
    if cfg.fmt == "json":
        payload = {"command": cfg.command, "seed": cfg.seed, "ok": not out.witnesses,
                   "result": out.data, "witnesses": out.witnesses[:MAX_WITNESSES]}
        stdout.write(json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n")
    else:
        for line in out.lines:
            stdout.write(line + "\n")
        if out.witnesses:
            stdout.write(f"FAILED ({len(out.witnesses)} witnesses, first {MAX_WITNESSES} shown):\n")
            for w in out.witnesses[:MAX_WITNESSES]:
                stdout.write(f"  {w}\n")
    return 1 if out.witnesses else 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
