"""Heterogeneous pre-strained plates: strain analysis, Kirchhoff limit
energy, minimizer classification and construction, and gel sheets."""

__version__ = "0.1.0"

from .classifier import Case, MinimizerSet, brute_force_minimizer_set, classify
from .cylinders import (Cylinder, PiecewiseCylinder, construct_patchwork, patch_check,
                        pointwise_minimizer_exists)
from .energy import gamma_experiment, limit_energy, lower_bound
from .quadforms import IsotropicModuli, q2_closed, q2_relaxed, q3, qbar2
from .strain import PlateDomain, StrainField, compatibility_report, d_min, target_curvature

__all__ = [
    "Case", "MinimizerSet", "brute_force_minimizer_set", "classify",
    "Cylinder", "PiecewiseCylinder", "construct_patchwork", "patch_check",
    "pointwise_minimizer_exists", "gamma_experiment", "limit_energy", "lower_bound",
    "IsotropicModuli", "q2_closed", "q2_relaxed", "q3", "qbar2",
    "PlateDomain", "StrainField", "compatibility_report", "d_min", "target_curvature",
]
