from fractions import Fraction

import numpy as np
import pytest

from crprolong.acstruct import ModelSpec, build_standard
from crprolong.crcheck import (SymbolicMap, compose, conjugation_map, cr_residuals, dilation,
                               frame_pushforward_matrix, identity_map, jacobian,
                               pseudoholomorphy_residual)
from crprolong.errors import InputError
from crprolong.fileio import load_map, load_structure
from crprolong.frames import Hypersurface, build_model_frame
from crprolong.scalar import Scalar
from crprolong.symexpr import is_zero, parse, z

SQUARES = [Fraction(1, 4), Fraction(4), Fraction(9, 16), Fraction(1, 9)]
STRUCTURES = ["std2.json", "model-family.json"]


def holomorphic(f, J, Jt) -> bool:
    return all(is_zero(e, n=f.n_source) for row in pseudoholomorphy_residual(f, J, Jt) for e in row)


def all_cr(f, J, Jt, exact=True):
    s = Hypersurface.siegel(J.n)
    res = cr_residuals(f, J, Jt, s, Hypersurface.siegel(Jt.n))
    if exact:
        return all(r.verdict.kind == "ExactZero" for r in res)
    return all(r.ok for r in res)


def test_jacobian_of_identity():
    D = jacobian(identity_map(2))
    for r, row in enumerate(D):
        for c, e in enumerate(row):
            assert is_zero(e - (1 if r == c else 0)).kind == "ExactZero"


@pytest.mark.parametrize("name", STRUCTURES)
def test_identity_passes(name):
    J = load_structure(name)
    f = identity_map(2)
    assert holomorphic(f, J, J)
    assert all_cr(f, J, J)


@pytest.mark.parametrize("name", STRUCTURES)
@pytest.mark.parametrize("delta", SQUARES)
def test_dilation_family_exact(name, delta):
    J = load_structure(name)
    f = dilation(2, delta)
    assert not f.has_sqrt()
    assert holomorphic(f, J, J)
    assert all_cr(f, J, J)


def test_dilation_non_square_numeric():
    J = build_standard(2)
    f = dilation(2, 2)
    assert f.has_sqrt()
    assert holomorphic(f, J, J)
    assert all_cr(f, J, J, exact=False)


@pytest.mark.parametrize("a,b", [(Fraction(1, 4), Fraction(4)), (Fraction(9, 16), Fraction(1, 9))])
def test_composition_closure(a, b):
    J = load_structure("model-family.json")
    g = compose(dilation(2, a), dilation(2, b))
    assert holomorphic(g, J, J) and all_cr(g, J, J)
    expect = dilation(2, a * b)
    for x, y in zip(g.components, expect.components):
        assert is_zero(x - y).kind == "ExactZero"


def test_composition_with_rotation():
    # z' -> i z' preserves the Siegel surface and commutes with J_st
    J = build_standard(2)
    rot = SymbolicMap(2, 2, (parse("i*z1"), z(2)), "rotation")
    assert holomorphic(rot, J, J) and all_cr(rot, J, J)
    g = compose(rot, dilation(2, Fraction(1, 4)))
    assert holomorphic(g, J, J) and all_cr(g, J, J)


def test_conjugation_fails():
    J = build_standard(2)
    f = conjugation_map(2)
    assert not holomorphic(f, J, J)
    res = cr_residuals(f, J, J, Hypersurface.siegel(2), Hypersurface.siegel(2))
    bad = {r.label for r in res if not r.ok}
    assert {"L1 fbar1", "L1 fbar2"} <= bad
    assert all(r.verdict.witness is not None and len(r.verdict.witness) == 2
               for r in res if not r.ok)


def test_non_preserving_fails():
    J = build_standard(2)
    f = load_map("non-preserving.json")
    assert holomorphic(f, J, J)
    res = cr_residuals(f, J, J, Hypersurface.siegel(2), Hypersurface.siegel(2))
    bad = {r.label for r in res if not r.ok}
    assert {"L1 f2", "rho'(f)"} <= bad
    assert "L1 fbar1" not in bad


def test_map_must_fix_origin():
    J = build_standard(2)
    f = SymbolicMap(2, 2, (z(1) + 1, z(2)))
    with pytest.raises(InputError):
        cr_residuals(f, J, J, Hypersurface.siegel(2), Hypersurface.siegel(2))


def test_non_model_structure_rejected():
    J = load_structure("star-valid.json")
    with pytest.raises(InputError):
        cr_residuals(identity_map(2), J, J, Hypersurface.siegel(2), Hypersurface.siegel(2))


def test_truncated_surface_reports_degrees():
    # source rho = Re z2 + |z1|^2 + (2 Re z2)^2 is reduced with a truncated graph rule
    rho = parse("(z2 + zbar2)/2 + z1*zbar1 + (z2 + zbar2)^2", 2)
    src = Hypersurface(2, rho, order=4)
    J = build_standard(2)
    same = cr_residuals(identity_map(2), J, J, src, src)
    assert all(r.ok and r.parts == {} for r in same)
    into_siegel = {r.label: r for r in cr_residuals(identity_map(2), J, J, src, Hypersurface.siegel(2))}
    assert min(into_siegel["rho'(f)"].parts) == 4
    assert min(into_siegel["L1 f2"].parts) == 3
    assert not into_siegel["rho'(f)"].ok


def test_pushforward_dilation_exact():
    frame = build_model_frame(ModelSpec.zero(2))
    push = frame_pushforward_matrix(load_map("lambda-quarter.json"), frame)
    assert push.exact == [[Scalar(1, 0) / 2]]
    assert push.invertible and push.cond == pytest.approx(1.0)


def test_pushforward_identity():
    frame = build_model_frame(ModelSpec.zero(3))
    push = frame_pushforward_matrix(identity_map(3), frame)
    assert push.exact == [[Scalar(1), Scalar(0)], [Scalar(0), Scalar(1)]]


def test_pushforward_rank_deficient():
    frame = build_model_frame(ModelSpec.zero(3))
    f = SymbolicMap(3, 3, (z(1), z(1), z(3)), "rank-deficient")
    push = frame_pushforward_matrix(f, frame)
    assert not push.invertible and push.cond == float("inf")


def test_pushforward_numeric_point():
    frame = build_model_frame(ModelSpec.zero(2))
    push = frame_pushforward_matrix(dilation(2, 2), frame, [0.1 + 0.2j, 0j])
    assert push.exact is None
    assert np.allclose(push.matrix, [[np.sqrt(2)]])
