"""Acceptance criteria 1-10, one printed verdict line each.

Run with ``pytest tests/test_acceptance.py -v``; the verdict lines are written
to the terminal even when output capture is on.
"""
import json
import math
import time
from pathlib import Path

import numpy as np
import pytest

from crprolong.acstruct import (ModelSpec, build_condition_star, build_model, build_standard,
                                involution_residual, matrix_verdicts, model_spec_of,
                                star_constraint_residuals, star_spec_of)
from crprolong.crcheck import (conjugation_map, cr_residuals, frame_pushforward_matrix, identity_map,
                               pseudoholomorphy_residual)
from crprolong.fileio import fixture_path, load_map, load_structure
from crprolong.frames import (Hypersurface, build_model_frame, build_raw_frame, build_star_frame,
                              decompose_in_frame, defect_at_point, defect_coefficients,
                              direction_varies, eigen_residual, levi_form, lie_bracket,
                              structure_constants)
from crprolong.generators import random_model_spec, random_star_spec
from crprolong.jetcalc import (complete_system_report, negative_control, run_chain,
                               run_standard_suite, run_suite, standard_binding, verify_identity,
                               RuleSet)
from crprolong.jetcalc.membership import AXIOM_INVERSION, AXIOM_PROLONG
from crprolong.ratfunc import zbarvar, zvar
from crprolong.scalar import Scalar
from crprolong.symexpr import (conj, eval_expr, has_sqrt, is_zero, normalize_rational, parse,
                               sample_polydisc, simplify, to_text, wirtinger_d)

from conftest import fd_wirtinger, random_expr, run_cli
from test_frames import levi_oracle

GOLDEN = Path(__file__).parent / "golden"
MODEL_FIXTURES = ["std2.json", "std3.json", "model-family.json", "model3.json"]


@pytest.fixture
def report_line(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
    return emit


def exact_zero_matrix(m) -> bool:
    return all(normalize_rational(e).is_zero() for row in m for e in row)


def zero_field(X) -> bool:
    return all(normalize_rational(e).is_zero() for e in X.column())


# 1 -------------------------------------------------------------------------

def test_criterion_1_involution(report_line):
    t0 = time.perf_counter()
    std_ok = all(exact_zero_matrix(involution_residual(build_standard(n))) for n in (2, 3, 4))
    models = 0
    model_ok = True
    for n in (2, 3, 4):
        rng = np.random.default_rng(1000 + n)
        for _ in range(20):
            model_ok &= exact_zero_matrix(involution_residual(build_model(random_model_spec(n, rng))))
            models += 1
    bad = [v for _, _, v in matrix_verdicts(involution_residual(load_structure("perturbed.json")), n=2)
           if not v]
    perturbed_ok = bool(bad) and all(v.kind == "NonZero" for v in bad)
    dt = time.perf_counter() - t0
    ok = std_ok and model_ok and perturbed_ok and dt < 5
    report_line(1, ok, f"J_st n=2..4 exact zero, {models} random model specs exact zero, "
                       f"perturbed fixture NonZero; {dt:.2f} s (< 5 s)")
    assert ok


# 2 -------------------------------------------------------------------------

def test_criterion_2_constraint_equivalence(report_line):
    t0 = time.perf_counter()
    agree = 0
    total = 0
    seen = {True: 0, False: 0}
    for n in (2, 3):
        rng = np.random.default_rng(2000 + n)
        for k in range(20):
            spec = random_star_spec(n, rng, valid=k % 2 == 0)
            cons = all(is_zero(e) for e in star_constraint_residuals(spec))
            invo = all(v for _, _, v in matrix_verdicts(involution_residual(build_condition_star(spec))))
            agree += cons == invo
            seen[invo] += 1
            total += 1
    dt = time.perf_counter() - t0
    ok = agree == total and seen[True] > 0 and seen[False] > 0 and dt < 10
    report_line(2, ok, f"{agree}/{total} specs agree ({seen[True]} structures, {seen[False]} violating); "
                       f"{dt:.2f} s (< 10 s)")
    assert ok


# 3 -------------------------------------------------------------------------

def test_criterion_3_frames(report_line):
    checks = 0
    failures = []
    for name in MODEL_FIXTURES:
        J = load_structure(name)
        frame = build_model_frame(model_spec_of(J))
        s = Hypersurface.siegel(J.n)
        for j, L in enumerate(frame.L, 1):
            conds = {
                "JL - iL": zero_field(eigen_residual(J, L)),
                "L rho": s.on_surface_verdict(L.apply(s.rho)).kind == "ExactZero",
                "[T, L]": zero_field(lie_bracket(frame.T, L)),
            }
            for k, Lb in enumerate(frame.Lbar, 1):
                dec = decompose_in_frame(lie_bracket(L, Lb), frame)
                conds[f"[L{j}, Lb{k}]"] = dec.is_constant() and zero_field(dec.residual)
            for what, ok in conds.items():
                checks += 1
                if not ok:
                    failures.append(f"{name}: {what} (L{j})")
    g = structure_constants(build_model_frame(ModelSpec.zero(2)))["gamma[1,1b]"]
    gamma_ok = simplify(g).c == Scalar(0, -2)
    star_ok = True
    rng = np.random.default_rng(3003)
    specs = [star_spec_of(load_structure("star-valid.json"))]
    specs += [random_star_spec(n, rng, True) for n in (2, 2, 3)]
    for spec in specs:
        J = build_condition_star(spec)
        Xs = build_star_frame(spec)
        star_ok &= all(zero_field(eigen_residual(J, X)) for X in Xs)
        for j in range(1, spec.n):
            for k in range(j + 1, spec.n + 1):
                coeffs = defect_coefficients(Xs, j, k)
                star_ok &= all(normalize_rational(c).is_zero() for c in coeffs[:-1])
    ok = not failures and gamma_ok and star_ok
    report_line(3, ok, f"{checks} model-frame checks on {len(MODEL_FIXTURES)} fixtures, "
                       f"gamma[1,1b] = {to_text(g)} for J_st, {len(specs)} condition-star frames "
                       f"with defect on Xbar_n only" + (f"; failures: {failures}" if failures else ""))
    assert ok


# 4 -------------------------------------------------------------------------

def test_criterion_4_identities(report_line):
    t0 = time.perf_counter()
    generic = run_suite(2) + run_suite(3)
    standard = run_standard_suite(2) + run_standard_suite(3)
    neg = negative_control(2)
    res = verify_identity(neg.lhs, neg.rhs, RuleSet(2))
    dt = time.perf_counter() - t0
    ok = all(r.ok for r in generic) and all(r.ok for r in standard) and not res.is_zero() and dt < 30
    report_line(4, ok, f"{sum(r.ok for r in generic)}/{len(generic)} generic, "
                       f"{sum(r.ok for r in standard)}/{len(standard)} under J_st binding (n=2,3); "
                       f"negative control fails as required; {dt:.2f} s (< 30 s)")
    assert ok


# 5 -------------------------------------------------------------------------

def test_criterion_5_membership_chain(report_line):
    results = {}
    for n in (2, 3):
        pr = run_chain(n)
        results[n] = pr
    ok = all(all(s.ok for s in pr.steps) for pr in results.values())
    axioms = {s.name for pr in results.values() for s in pr.steps if s.strategy == "axiom"}
    ok &= axioms == {AXIOM_INVERSION, AXIOM_PROLONG}
    rep = complete_system_report(2)
    ok &= set(rep["axioms"]) == axioms
    steps = {n: f"{sum(s.ok for s in pr.steps)}/{len(pr.steps)}" for n, pr in results.items()}
    report_line(5, ok, f"chain steps pass n=2: {steps[2]}, n=3: {steps[3]}; "
                       f"axioms used: {len(axioms)} with provenance")
    assert ok


# 6 -------------------------------------------------------------------------

def test_criterion_6_report(report_line):
    rep = complete_system_report(2, standard_binding(2))
    entries = rep["entries"]
    classified = [e for e in entries if e["status"] in ("rearranged", "reduced", "axiom")]
    cases = {(e["case"]["t"], e["case"]["a"], e["case"]["b"])
             for e in entries if e["status"] == "rearranged" and e.get("trace")}
    code, out, _ = run_cli(["--format", "json", "--seed", "0", "prolong-report"])
    golden = (GOLDEN / "prolong_report_n2.json").read_text(encoding="utf-8")
    ok = (len(classified) == len(entries) == 54 and {(0, 2, 1), (0, 1, 2), (1, 1, 1)} <= cases
          and code == 0 and out == golden)
    report_line(6, ok, f"{len(classified)}/{len(entries)} order-3 words classified "
                       f"({json.dumps(rep['counts'], sort_keys=True)}); commutator cases with traces "
                       f"present; golden byte match: {out == golden}")
    assert ok


# 7 -------------------------------------------------------------------------

def _defect_samples():
    Xs = build_raw_frame(load_structure("star-example.json"))
    rng = np.random.default_rng(0)
    rows = []
    for _ in range(10):
        p = sample_polydisc(rng, 2)
        rows.append((p, defect_at_point(Xs, 1, 2, p)))
    return rows


def _literal(p):
    y1, y2 = p[0].imag, p[1].imag
    return 1 / (2 * math.sqrt(2 + y2 * y2)), -1 / (2 * math.sqrt(2 + y1 * y1))


def _corrected(p):
    y1, y2 = p[0].imag, p[1].imag
    s1, s2 = math.sqrt(2 + y1 * y1), math.sqrt(2 + y2 * y2)
    return (1 + 1j * y1 / s1) / (2 * s2), -(1 + 1j * y2 / s2) / (2 * s1)


@pytest.mark.xfail(strict=True, reason="the stated coefficients omit two bracket terms; "
                                       "see the corrected closed form test below")
def test_criterion_7_literal_coefficients(report_line):
    rows = _defect_samples()
    lit = max(max(abs(v[0] - _literal(p)[0]), abs(v[1] - _literal(p)[1])) for p, v in rows)
    cor = max(max(abs(v[0] - _corrected(p)[0]), abs(v[1] - _corrected(p)[1])) for p, v in rows)
    varies, minor = direction_varies([v for _, v in rows])
    report_line(7, lit < 1e-9,
                f"literal coefficients max |err| = {lit:.3e} (needs < 1e-9); corrected closed form "
                f"max |err| = {cor:.1e}; direction {'NON-CONSTANT' if varies else 'constant'} "
                f"(minor {minor:.3f})")
    assert lit < 1e-9


def test_criterion_7_corrected_closed_form():
    rows = _defect_samples()
    for p, v in rows:
        a, b = _corrected(p)
        assert abs(v[0] - a) < 1e-9 and abs(v[1] - b) < 1e-9
        # real parts agree with the stated values
        la, lb = _literal(p)
        assert abs(v[0].real - la) < 1e-9 and abs(v[1].real - lb) < 1e-9
    varies, minor = direction_varies([v for _, v in rows])
    assert varies and minor > 1e-3
    code, out, _ = run_cli(["defect", "star-example.json", "--j", "1", "--k", "2"])
    assert code == 0 and "defect direction NON-CONSTANT" in out


# 8 -------------------------------------------------------------------------

def test_criterion_8_levi(report_line):
    J = build_standard(2)
    s = Hypersurface.siegel(2)
    L = build_model_frame(ModelSpec.zero(2)).L[0]
    p0 = (0j, 0j)
    val = levi_form(J, s, L, p0)
    oracle = levi_oracle(J, s.rho, L, p0)
    rel = abs(val - oracle) / abs(oracle)
    scale_err = 0.0
    for lam in (2, Scalar(1, 1), Scalar(-3, 2) / 5):
        scaled = levi_form(J, s, L.scale(lam), p0)
        want = abs(complex(Scalar.coerce(lam))) ** 2 * val
        scale_err = max(scale_err, abs(scaled - want) / abs(want))
    ok = val > 0 and rel < 1e-6 and scale_err < 1e-9
    report_line(8, ok, f"Levi(L1, 0) = {val:.12g} > 0, FD oracle rel err {rel:.1e} (< 1e-6), "
                       f"scaling law rel err {scale_err:.1e} (< 1e-9)")
    assert ok


# 9 -------------------------------------------------------------------------

def test_criterion_9_cr_maps(report_line):
    J = build_standard(2)
    s = Hypersurface.siegel(2)

    def verdicts(f):
        ph = [is_zero(e, n=2) for row in pseudoholomorphy_residual(f, J, J) for e in row]
        cr = [r.verdict for r in cr_residuals(f, J, J, s, s)]
        return ph + cr

    passing = {"identity": identity_map(2), "lambda_1/4": load_map("lambda-quarter.json")}
    failing = {"conjugation": conjugation_map(2), "non-preserving": load_map("non-preserving.json")}
    pass_ok = all(all(v.kind == "ExactZero" for v in verdicts(f)) for f in passing.values())
    fail_ok = all(any(v.kind == "NonZero" and v.witness is not None for v in verdicts(f))
                  for f in failing.values())
    push = frame_pushforward_matrix(load_map("lambda-quarter.json"), build_model_frame(ModelSpec.zero(2)))
    push_ok = push.exact == [[Scalar(1, 0) / 2]] and push.invertible
    ok = pass_ok and fail_ok and push_ok
    report_line(9, ok, "identity and lambda_1/4 exact zero on all residuals; conjugation and "
                       f"non-preserving maps fail with witnesses; pushforward(lambda_1/4, 0) = "
                       f"{[[str(x) for x in r] for r in push.exact or []]}")
    assert ok


# 10 ------------------------------------------------------------------------

def _sqrt_fixture_exprs():
    out = []
    for path in sorted(fixture_path("").glob("*.json")):
        doc = json.loads(path.read_text(encoding="utf-8"))
        if "entries" not in doc:
            continue
        J = load_structure(path.name)
        for row in J.as_lists():
            out += [(path.name, e) for e in row if has_sqrt(e)]
        if J.has_sqrt():
            # frame coefficients derived from the sqrt entries
            for X in build_raw_frame(J):
                out += [(path.name + " frame", e) for e in X.d if has_sqrt(e)]
    return out


def test_criterion_10_numerical_hygiene(report_line):
    exprs = _sqrt_fixture_exprs()
    rng = np.random.default_rng(10)
    points = [sample_polydisc(rng, 2) for _ in range(10)]
    worst = 0.0
    for _, e in exprs:
        for j in (1, 2):
            for var, bar in ((zvar(j), False), (zbarvar(j), True)):
                d = wirtinger_d(e, var)
                for p in points:
                    exact = eval_expr(d, p)
                    fd = fd_wirtinger(lambda q: eval_expr(e, q), p, j, bar)
                    worst = max(worst, abs(exact - fd) / max(1.0, abs(exact)))
    rng = np.random.default_rng(20)
    prop_fail = 0
    for _ in range(200):
        e = random_expr(rng)
        for j in (1, 2):
            a = normalize_rational(conj(wirtinger_d(e, zvar(j))))
            b = normalize_rational(wirtinger_d(conj(e), zbarvar(j)))
            prop_fail += not (a - b).is_zero()
        prop_fail += not (normalize_rational(parse(to_text(e))) - normalize_rational(e)).is_zero()
    ok = bool(exprs) and worst < 1e-6 and prop_fail == 0
    report_line(10, ok, f"{len(exprs)} sqrt-bearing expressions: derivative vs FD max rel err "
                        f"{worst:.1e} (< 1e-6) at 10 points; 200 random expressions: "
                        f"{prop_fail} property failures; suite wall-clock in the summary line")
    assert ok
