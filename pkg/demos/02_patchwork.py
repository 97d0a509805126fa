"""
Gluing cylinders into a pointwise minimizer
===========================================

Three vertical strips with target curvatures diag(1, .2), diag(-2, .5) and
diag(.5, .1) each prefer to bend across the strip, so the rulings all run
along the cuts and the cylinders glue with matching tangent planes. Turning
the left strip's preferred direction through 90 degrees breaks this.

Usage: python 02_patchwork.py [output_dir]
"""
import sys
from pathlib import Path

import numpy as np

from hetplate import (IsotropicModuli, PlateDomain, StrainField, classify,
                      construct_patchwork, limit_energy, lower_bound, pointwise_minimizer_exists)
from hetplate.io import export_obj
from hetplate.strain import ScaledProfile

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out")
out.mkdir(exist_ok=True)

moduli = IsotropicModuli(1.0, 0.5)  # beta = 0.2
thirds = [[(1 / 3, 0), (1 / 3, 1)], [(2 / 3, 0), (2 / 3, 1)]]
domain = PlateDomain((0, 1, 0, 1), thirds)
targets = [np.diag([1.0, 0.2]), np.diag([-2.0, 0.5]), np.diag([0.5, 0.1])]
# B(t) = t M has target curvature exactly M
field = StrainField(domain, [ScaledProfile([0, 1], A) for A in targets])

sets = [classify(A, moduli.beta) for A in targets]
for k, S in enumerate(sets):
    print(f"piece {k}: {S.case.value}, curvature {S.r:+.4f} along normal {np.round(S.normals[0], 3)}")

verdict = pointwise_minimizer_exists(domain, sets)
surf = construct_patchwork(domain, verdict.elements)
print("max jump across cuts:", surf.max_cut_jump())
print("limit energy:", limit_energy(surf, field, moduli).total,
      " lower bound:", lower_bound(field, moduli).total)
export_obj(surf, out / "three_strips.obj", 48)
print("wrote", out / "three_strips.obj")

# now the left strip prefers to bend along the cut: rulings cross at the interface
halves = PlateDomain((0, 1, 0, 1), [[(0.5, 0), (0.5, 1)]])
crossed = [classify(np.diag([0.3, 1.2]), moduli.beta), classify(np.diag([1.0, 0.2]), moduli.beta)]
v = pointwise_minimizer_exists(halves, crossed)
print("crossed rulings:", v.reason.value, v.location, "-", v.detail)
