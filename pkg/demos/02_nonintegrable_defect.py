"""A structure whose integrability defect changes direction from point to point.

The structure below has two blocks, each depending on the imaginary part of the
other coordinate through a square root.  Its (1,0) frame is computed by solving
J X = i X, and the (0,1) part of [X1, X2] is sampled at random points.  If that
part always pointed in one complex direction, a change of frame could make the
defect a multiple of a single field.  It does not.
"""
import math

import numpy as np

from crprolong.fileio import load_structure
from crprolong.frames import build_raw_frame, defect_at_point, direction_varies
from crprolong.symexpr import sample_polydisc

J = load_structure("star-example.json")
X1, X2 = build_raw_frame(J)
print("X1 =", X1.to_text())
print("X2 =", X2.to_text())

rng = np.random.default_rng(0)
samples = []
print("\n  point                                Xbar1 coeff              Xbar2 coeff")
for _ in range(6):
    p = sample_polydisc(rng, 2)
    v = defect_at_point([X1, X2], 1, 2, p)
    samples.append(v)
    print(f"  {np.round(p, 3)!s:<36} {v[0]:.6f}   {v[1]:.6f}")

# Closed form: with s_k = sqrt(2 + y_k^2) the coefficients are
# (1 + i y1/s1)/(2 s2) and -(1 + i y2/s2)/(2 s1).
p = sample_polydisc(rng, 2)
y1, y2 = p[0].imag, p[1].imag
s1, s2 = math.sqrt(2 + y1 ** 2), math.sqrt(2 + y2 ** 2)
v = defect_at_point([X1, X2], 1, 2, p)
print("\nclosed form error:", abs(v[0] - (1 + 1j * y1 / s1) / (2 * s2)),
      abs(v[1] + (1 + 1j * y2 / s2) / (2 * s1)))

varies, minor = direction_varies(samples)
print("direction", "NON-CONSTANT" if varies else "constant", f"(largest 2x2 minor {minor:.3f})")
