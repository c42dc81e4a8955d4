"""Checking candidate maps against the tangential CR equations.

Dilations (z', z_n) -> (sqrt(d) z', d z_n) preserve both the structure and the
Siegel surface.  Complex conjugation is not pseudo-holomorphic, and a map that
bends the surface fails the tangency relation.
"""
from fractions import Fraction

from crprolong.acstruct import ModelSpec
from crprolong.crcheck import (compose, conjugation_map, cr_residuals, dilation,
                               frame_pushforward_matrix, pseudoholomorphy_residual)
from crprolong.fileio import load_map, load_structure
from crprolong.frames import Hypersurface, build_model_frame
from crprolong.symexpr import is_zero

J = load_structure("model-family.json")
S = Hypersurface.siegel(2)

maps = [dilation(2, Fraction(1, 4)), compose(dilation(2, Fraction(1, 4)), dilation(2, 9)),
        conjugation_map(2), load_map("non-preserving.json")]
for f in maps:
    ph = all(is_zero(e, n=2) for row in pseudoholomorphy_residual(f, J, J) for e in row)
    failed = [r.label for r in cr_residuals(f, J, J, S, S) if not r.ok]
    print(f"{f.name:<42} pseudo-holomorphic: {ph!s:<5}  failing CR residuals: {failed or 'none'}")

push = frame_pushforward_matrix(dilation(2, Fraction(1, 4)), build_model_frame(ModelSpec.zero(2)))
print("\n(L_k f_j)(0) for the 1/4 dilation:", [[str(x) for x in row] for row in push.exact],
      "condition number", push.cond)
