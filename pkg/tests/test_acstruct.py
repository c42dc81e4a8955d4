import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from crprolong.acstruct import (ModelSpec, StarSpec, build_condition_star, build_model, build_raw,
                                build_standard, classify, first_order_part, involution_residual,
                                matrix_is_zero, matrix_verdicts, model_spec_of,
                                reality_residuals, star_constraint_residuals, star_spec_of)
from crprolong.fileio import load_structure
from crprolong.generators import random_model_spec, random_star_spec, valid_star_spec
from crprolong.scalar import I, Scalar
from crprolong.symexpr import Const, is_zero, normalize_rational, parse, z, zbar


def eq(a, b) -> bool:
    return (normalize_rational(a) - normalize_rational(b)).is_zero()


def exact_zero(m) -> bool:
    return all(normalize_rational(e).is_zero() for row in m for e in row)


def test_standard_diagonal():
    J = build_standard(2)
    diag = [J.entry(k, k) for k in range(1, 5)]
    assert [d.c for d in diag] == [I, -I, I, -I]
    assert all(eq(J.entry(r, c), Const(0)) for r in range(1, 5) for c in range(1, 5) if r != c)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_standard_is_structure(n):
    J = build_standard(n)
    assert exact_zero(involution_residual(J))
    assert all(normalize_rational(e).is_zero() for _, _, e in reality_residuals(J))
    assert classify(J) == "standard"


def test_standard_rejects_small_n():
    with pytest.raises(ValueError):
        build_standard(1)


def test_model_zero_is_standard():
    J = build_model(ModelSpec.zero(3))
    Jst = build_standard(3)
    assert all(eq(J.entry(r, c), Jst.entry(r, c)) for r in range(1, 7) for c in range(1, 7))


def test_model_entry_placement():
    spec = ModelSpec.from_forms(3, [z(1), Const(0)])
    J = build_model(spec)
    assert eq(J.entry(6, 1), z(1))
    assert eq(J.entry(5, 2), zbar(1))
    assert [J.entry(k, k).c for k in range(1, 7)] == [I, -I] * 3


def test_model_forms_must_be_linear():
    with pytest.raises(ValueError):
        ModelSpec.from_forms(2, [z(1) * z(1)])
    with pytest.raises(ValueError):
        ModelSpec.from_forms(2, [z(2)])
    with pytest.raises(ValueError):
        ModelSpec.from_forms(2, [z(1) + 1])


@settings(max_examples=30, derandomize=True, deadline=None)
@given(st.integers(2, 4), st.integers(0, 10**6))
def test_random_models_are_structures(n, seed):
    J = build_model(random_model_spec(n, np.random.default_rng(seed)))
    assert exact_zero(involution_residual(J))
    assert all(normalize_rational(e).is_zero() for _, _, e in reality_residuals(J))


def test_model_round_trip():
    spec = random_model_spec(3, np.random.default_rng(11), density=1.0)
    back = model_spec_of(build_model(spec))
    assert back is not None
    for j in (1, 2):
        assert eq(back.form(j), spec.form(j))


def test_star_zero_is_standard():
    J = build_condition_star(StarSpec.zero(2))
    assert classify(J) == "standard"


def test_star_intro_matrix_layout():
    a, b, c, d = (parse(s, 2) for s in ("z1", "zbar2", "z1*zbar1", "z2"))
    J = build_condition_star(StarSpec(2, (a, b, c, d)))
    row3 = [J.entry(3, k) for k in range(1, 5)]
    assert eq(row3[0], a) and eq(row3[1], b) and eq(row3[3], d)
    assert eq(row3[2], Const(I) + c)
    assert all(normalize_rational(e).is_zero() for _, _, e in reality_residuals(J))


def test_j3_violation_residual():
    spec = StarSpec(2, (Const(0), Const(0), z(1), Const(0)))
    res = involution_residual(build_condition_star(spec))
    nonzero = [e for row in res for e in row if not normalize_rational(e).is_zero()]
    assert nonzero
    expected = Const(Scalar(0, 2)) * z(1) + z(1) * z(1)
    assert any(eq(e, expected) for e in nonzero)
    assert eq(star_constraint_residuals(spec)[2], expected)


def test_j1_single_entry():
    spec = StarSpec(2, (z(1), Const(0), Const(0), Const(0)))
    res = star_constraint_residuals(spec)
    assert eq(res[0], Const(Scalar(0, 2)) * z(1))


def test_zero_spec_constraints_vanish():
    assert all(normalize_rational(e).is_zero() for e in star_constraint_residuals(StarSpec.zero(3)))


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("valid", [True, False])
def test_constraint_equivalence(n, valid):
    rng = np.random.default_rng(100 * n + valid)
    for _ in range(5):
        spec = random_star_spec(n, rng, valid)
        cons = all(is_zero(e) for e in star_constraint_residuals(spec))
        invo = all(v for _, _, v in matrix_verdicts(involution_residual(build_condition_star(spec))))
        assert cons == invo
        if valid:
            assert cons


def test_first_order_vanishing_under_j1():
    # w, B vanish at 0, so A = i w conj(B) has no linear part
    spec = valid_star_spec(2, z(1), [zbar(2)])
    assert normalize_rational(first_order_part(spec.A(1))).is_zero()
    assert all(is_zero(e) for e in star_constraint_residuals(spec))


def test_star_spec_recovery():
    spec = valid_star_spec(2, z(2), [z(1)])
    J = build_condition_star(spec)
    back = star_spec_of(J)
    assert back is not None
    assert all(eq(a, b) for a, b in zip(back.entries, spec.entries))
    assert classify(J) == "star"


def test_raw_fixture_not_a_structure():
    J = load_structure("perturbed.json")
    assert classify(J) == "raw"
    verdicts = matrix_verdicts(involution_residual(J), n=2)
    bad = [v for _, _, v in verdicts if not v]
    assert bad and all(v.kind == "NonZero" and len(v.witness) == 2 for v in bad)
    assert not matrix_is_zero(involution_residual(J))


def test_raw_rejects_out_of_range():
    with pytest.raises(ValueError):
        build_raw(2, {(5, 1): z(1)})


def test_star_example_fixture_is_structure():
    J = load_structure("star-example.json")
    assert J.has_sqrt()
    assert all(v for _, _, v in matrix_verdicts(involution_residual(J), n=2))
