"""
Target curvature from a thickness profile
=========================================

Two strips carry the strain profiles (t + 1) I and (t^3 + 1) I. Averaged
over the thickness they stretch the mid-plane identically, so only the
first moment tells them apart: 12 int t B gives I on the left and 0.15 I
on the right.
"""
import numpy as np

from hetplate import IsotropicModuli, PlateDomain, StrainField, classify, compatibility_report
from hetplate.strain import PolynomialProfile

I2, Z2 = np.eye(2), np.zeros((2, 2))
domain = PlateDomain((0, 1, 0, 1), [[(0.5, 0), (0.5, 1)]])
field = StrainField(domain, [PolynomialProfile([I2, I2]), PolynomialProfile([I2, Z2, Z2, I2])])
moduli = IsotropicModuli(mu=1.0, lam=1.0)

for k, prof in enumerate(field.profiles):
    print(f"piece {k}: D_min =\n{prof.d_min()}\n target curvature =\n{prof.target_curvature()}")

# equal target eigenvalues -> every direction is optimal, at an amplified radius
for k, prof in enumerate(field.profiles):
    S = classify(prof.target_curvature(), moduli.beta)
    print(f"piece {k}: {S.case.value}, principal curvature {S.r:.6f}, "
          f"pointwise minimum {S.value(moduli.mu):.6f}")

# D_min is the identity on both pieces: a symmetrized gradient, so the theory applies
rep = compatibility_report(field, 32)
print("compatible:", rep.compatible, " max residual:", rep.max_residual)

# a stretch that jumps across the cut is not compatible
bad = StrainField(domain, [PolynomialProfile([np.diag([0.0, 1.0])]), PolynomialProfile([Z2])])
rep = compatibility_report(bad, 32)
print("jumping D_min compatible:", rep.compatible, "-", rep.note)
