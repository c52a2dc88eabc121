# src/calculus/__init__.py
# Symbols on Lambda_Phi0 and their Weyl calculus.

from .composition import compose_direct, compose_fourier, compose_plane_wave
from .fourier import fourier_symplectic, twisted_convolution
from .quantization import OperatorMatrix, operator_norm, quantize_direct, quantize_superposition

__all__ = [
    "OperatorMatrix",
    "compose_direct",
    "compose_fourier",
    "compose_plane_wave",
    "fourier_symplectic",
    "operator_norm",
    "quantize_direct",
    "quantize_superposition",
    "twisted_convolution",
]
