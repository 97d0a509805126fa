"""
From three dimensions to the plate limit
========================================

For the strain B = t diag(1, 0, 1/2) the unit cylinder is a pointwise
minimizer with zero limit energy. Building a recovery sequence from it and
evaluating the rescaled 3D energy for thinner and thinner plates shows the
gap closing. Here the gap is exactly c^2 h^2 / 320 with c = 1/2.
"""
import numpy as np

from hetplate import PlateDomain, StrainField, construct_patchwork, gamma_experiment
from hetplate.energy import StVenantDensity
from hetplate.quadforms import IsotropicModuli
from hetplate.strain import ScaledProfile

square = PlateDomain((0, 1, 0, 1))
field = StrainField(square, [ScaledProfile([0, 1], np.diag([1.0, 0.0, 0.5]))])
cylinder = construct_patchwork(square, [np.diag([1.0, 0.0])])

hs = [1 / 10, 1 / 20, 1 / 40, 1 / 80, 1 / 160]
table = gamma_experiment(cylinder, field, hs=hs, grid=16)
print(f"limit energy E0 = {table.limit.total:.3e}")
print("      h     h^-2 E^h      c^2 h^2/320")
for r in table.rows:
    print(f"{r.h:8.5f}  {r.scaled_energy:.6e}  {0.25 * r.h**2 / 320:.6e}")
print("fitted slope of the gap:", table.slope)

# a target the cylinder cannot match exactly, with a St. Venant-type density
field = StrainField(square, [ScaledProfile([0, 1], np.diag([1.0, 0.3]))])
moduli = IsotropicModuli(1.0, 1.0)
surface = construct_patchwork(square, [np.diag([1.0 + 0.3 / 3, 0.0])])  # DOMINANT_1, beta = 1/3
table = gamma_experiment(surface, field, StVenantDensity(moduli), hs=hs[:4], grid=16)
print(f"\nSt. Venant: E0 = {table.limit.total:.6f}")
for r in table.rows:
    print(f"{r.h:8.5f}  ratio {r.ratio:.8f}  gap {r.gap:.3e}")
print("fitted slope of the gap:", table.slope)
