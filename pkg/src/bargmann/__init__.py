# src/bargmann/__init__.py
# Weighted spaces H_Phi, exact Gaussian integrals and magnetic translations.

from .bargmann_core import OrthonormalBasis, QuadRule, bargmann_phase, derive_weight, phi0_basis
from .holo import HoloFunction
from .magnetic import MagneticTranslation, plane_wave_operator, weyl_translation
from .weights import WeightFunction, perturbed_weight, quadratic_weight_function

__all__ = [
    "HoloFunction",
    "MagneticTranslation",
    "OrthonormalBasis",
    "QuadRule",
    "WeightFunction",
    "bargmann_phase",
    "derive_weight",
    "perturbed_weight",
    "phi0_basis",
    "plane_wave_operator",
    "quadratic_weight_function",
    "weyl_translation",
]
