"""Almost complex structures on C^n and their holomorphic frames.

Starts from the standard structure and a model deformation of it.  Then builds
the frame of (1,0) fields tangent to the Siegel surface Re z_n + |z'|^2 = 0 and
looks at its bracket constants and Levi form.
"""
import numpy as np

from crprolong.acstruct import ModelSpec, build_model, build_standard, involution_residual
from crprolong.frames import (Hypersurface, build_model_frame, eigen_residual, levi_form,
                              structure_constants)
from crprolong.symexpr import normalize_rational, parse


def is_exact_zero(m):
    return all(normalize_rational(e).is_zero() for row in m for e in row)


# The standard structure is diagonal in the basis d/dz1, d/dzbar1, ..., d/dzn, d/dzbarn.
J0 = build_standard(3)
print("J_st diagonal:", [str(J0.entry(k, k)) for k in range(1, 7)])
print("J_st^2 + I vanishes:", is_exact_zero(involution_residual(J0)))

# A model structure perturbs only the last two rows, by linear forms in z'.
spec = ModelSpec.from_forms(3, [parse("z2 - i*zbar1", 3), parse("2*z1 + zbar2", 3)])
J = build_model(spec)
print("\nmodel structure, row 6:", [str(J.entry(6, k)) for k in range(1, 7)])
print("J^2 + I vanishes:", is_exact_zero(involution_residual(J)))

# Frame L_j = d/dz_j + alpha_j d/dz_n + beta_j d/dzbar_n, tangent to the Siegel surface.
frame = build_model_frame(spec)
surface = Hypersurface.siegel(3)
for j, L in enumerate(frame.L, start=1):
    print(f"\nL{j} = {L.to_text()}")
    print("  J L - i L is zero:", eigen_residual(J, L).is_zero())
    print("  L rho on the surface:", surface.on_surface_verdict(L.apply(surface.rho)).kind)

# Brackets close up on T = i(d/dz_n - d/dzbar_n) with constant coefficients.
print("\nbracket constants:")
for name, value in sorted(structure_constants(frame).items()):
    print(f"  {name} = {value}")

# The Levi form is positive along the surface: strict pseudoconvexity.
rng = np.random.default_rng(1)
for _ in range(3):
    p = surface.point(0.3 * (rng.random(2) - 0.5) + 0.3j * (rng.random(2) - 0.5), t=0.1)
    print("Levi(L1) at", np.round(p, 3), "=", round(levi_form(J, surface, frame.L[0], p), 6))
