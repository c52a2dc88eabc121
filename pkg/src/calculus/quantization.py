#!/usr/bin/env python3
"""
Weyl Quantization Module

Matrices of Op_h^w(a) in the analytic Phi0-orthonormal basis, by three routes:

  superposition  Op(a) = (pi h)^{-1} rho int F_h a(Y) exp(2 i sigma((x, hD), Y)/h) dY,
                 each magnetic translation matrix exact (Wick overlaps);
  direct         the contour integral over y with theta = (2/i) dPhi0/dx((x + y)/2);
  exact atoms    plane waves, polynomials in (x, xi) and radial symbols.

Norms on other weights H_Phi are measured through the Gram matrix of the
same basis in Phi (generalized eigenproblem).
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Union

import numpy as np
from scipy import linalg as sla
from scipy.integrate import trapezoid
from scipy.special import comb, roots_legendre

from src.bargmann.bargmann_core import (
    BargmannPhase,
    GramData,
    OrthonormalBasis,
    QuadRule,
    ground_state,
    inner_product,
)
from src.bargmann.gaussian_integrals import gaussian_overlap
from src.bargmann.holo import HoloFunction
from src.bargmann.magnetic import plane_wave_operator, translation_matrices, translation_matrix
from src.bargmann.weights import WeightFunction
from src.calculus.fourier import (
    check_oscillation,
    effective_radius,
    fourier_prefactor,
    fourier_radial,
    fourier_values,
)
from src.calculus.symbols import PlaneWaveSymbol, PolynomialSymbol, Symbol
from src.core.exceptions import ConditioningError, ConfigError, IntegrabilityError, UnsupportedSymbolError

logger = logging.getLogger(__name__)

CONDITION_LIMIT = 1e12
FOURIER_CUTOFF = 1e-14
BOX_DECAY = 1e-6


@dataclass
class OperatorMatrix:
    """entries[j, k] = (Op e_k, e_j) in a Phi0-orthonormal basis."""
    entries: np.ndarray
    basis: OrthonormalBasis
    route: str
    label: str = ""

    def __post_init__(self):
        if not np.all(np.isfinite(self.entries)):
            raise ConditioningError(f"operator matrix ({self.route}) has non-finite entries")

    @property
    def h(self) -> float:
        return self.basis.h

    @property
    def N(self) -> int:
        return self.basis.N

    @property
    def weight(self) -> WeightFunction:
        return self.basis.weight

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return OperatorMatrix(self.entries @ other.entries, self.basis, f"{self.route}@{other.route}")

    def adjoint(self) -> "OperatorMatrix":
        return OperatorMatrix(self.entries.conj().T, self.basis, f"{self.route}*", self.label)

    def max_rel_diff(self, other: "OperatorMatrix") -> float:
        """max |A - B| / max |B|."""
        scale = float(np.max(np.abs(other.entries)))
        return float(np.max(np.abs(self.entries - other.entries))) / (scale or 1.0)


def _require_phi0(basis: OrthonormalBasis) -> None:
    if not basis.weight.is_quadratic:
        raise ConfigError("operator matrices are assembled in the Phi0 basis; pass phi0_basis(...)")


def quantize_superposition(a: Symbol, basis: OrthonormalBasis, rule: QuadRule,
                           symbol_rule: Optional[QuadRule] = None, chunk: int = 512) -> OperatorMatrix:
    """Op(a) as a quadrature over Y of F_h a(Y) times the matrix of the Weyl translation by Y."""
    _require_phi0(basis)
    if isinstance(a, PlaneWaveSymbol):
        return OperatorMatrix(a.amplitude * translation_matrix(plane_wave_operator(a.form, a.h), basis),
                              basis, "plane_wave", a.label)
    if isinstance(a, PolynomialSymbol):
        return quantize_polynomial(a, basis)
    w, h = basis.weight.base, basis.h
    values = fourier_values(a, rule, symbol_rule)
    peak = float(np.max(np.abs(values)))
    edge = max(np.max(np.abs(values[[0, -1], :])), np.max(np.abs(values[:, [0, -1]])))
    if peak > 0 and edge > BOX_DECAY * peak:
        raise IntegrabilityError(
            f"F_h of {a.label} has not decayed on the Y box (edge/peak {edge / peak:.2e}); enlarge R beyond {rule.R:g}"
        )
    coef = (fourier_prefactor(w, h) * rule.grid_weights * values).ravel()
    y = rule.points
    keep = np.abs(coef) > FOURIER_CUTOFF * float(np.max(np.abs(coef)) or 1.0)
    coef, y = coef[keep], y[keep]
    # Weyl translation by Y: (a, b) = (2 xi(y), -2 y)
    a_par = 2.0 * w.xi(y)
    b_par = -2.0 * y
    entries = np.zeros((basis.size, basis.size), dtype=complex)
    for start in range(0, y.size, chunk):
        sl = slice(start, start + chunk)
        mats = translation_matrices(a_par[sl], b_par[sl], basis)
        entries += np.einsum("i,ijk->jk", coef[sl], mats)
    logger.debug(f"Superposition of {a.label}: {y.size} translations at h={h}, N={basis.N}")
    return OperatorMatrix(entries, basis, "superposition", a.label)


def weyl_monomial(u: HoloFunction, j: int, k: int) -> HoloFunction:
    """Op^w(x^j xi^k) u = 2^{-j} sum_m C(j, m) x^m (hD)^k (x^{j-m} u)."""
    total = None
    for m in range(j + 1):
        v = u
        for _ in range(j - m):
            v = v.times_x()
        for _ in range(k):
            v = v.hD()
        for _ in range(m):
            v = v.times_x()
        v = v.scale(comb(j, m, exact=True) / 2.0 ** j)
        total = v if total is None else total + v
    return total


def quantize_polynomial(a: PolynomialSymbol, basis: OrthonormalBasis) -> OperatorMatrix:
    _require_phi0(basis)
    w = basis.weight.base
    functions = basis.functions
    entries = np.zeros((basis.size, basis.size), dtype=complex)
    for k, e_k in enumerate(functions):
        image = None
        for (j, m), c in np.ndenumerate(a.coeffs):
            if c == 0:
                continue
            term = weyl_monomial(e_k, j, m).scale(c)
            image = term if image is None else image + term
        if image is None:
            continue
        entries[:, k] = [gaussian_overlap(image, e_j, w) for e_j in functions]
    return OperatorMatrix(entries, basis, "polynomial", a.label)


def _direct_kernel(a: Symbol, x: np.ndarray, y: np.ndarray, w, h: float) -> np.ndarray:
    """(L/pi h) a((x+y)/2) exp(i (x-y) theta/h + (Phi0(y) - Phi0(x))/h), a unimodular phase times a."""
    xx = x[:, None]
    yy = y[None, :]
    theta = -1j * (w.q * (xx + yy) + w.l * (np.conj(xx) + np.conj(yy)))
    exponent = 1j * (xx - yy) * theta / h + (w.value(yy) - w.value(xx)) / h
    return (w.l / (math.pi * h)) * a(0.5 * (xx + yy)) * np.exp(exponent)


def quantize_direct(a: Symbol, u: HoloFunction, x: np.ndarray, rule: QuadRule, chunk: int = 256) -> np.ndarray:
    """Op(a) u at the points x by quadrature over y on the contour theta = xi((x + y)/2)."""
    w = a.weight
    h = u.h
    x = np.atleast_1d(np.asarray(x, dtype=complex))
    flat = x.ravel()
    y = rule.points
    gy = rule.weights * u.weighted(y, w.value(y))
    # for |Q| <= L the kernel phase varies at most half as fast as exp(2 i sigma/h) at the same reach
    reach = 0.5 * (float(np.max(np.abs(flat))) + effective_radius(gy, y))
    check_oscillation(h, w, rule, reach, "direct quantization")
    out = np.empty(flat.size, dtype=complex)
    for start in range(0, flat.size, chunk):
        xc = flat[start:start + chunk]
        out[start:start + chunk] = (_direct_kernel(a, xc, y, w, h) @ gy) * np.exp(w.value(xc) / h)
    return out.reshape(x.shape)


def direct_operator_matrix(a: Symbol, basis: OrthonormalBasis, rule: QuadRule, chunk: int = 256) -> OperatorMatrix:
    """A = G_x^H K G_y with G the weighted basis values and K the weighted direct kernel."""
    _require_phi0(basis)
    w, h = basis.weight.base, basis.h
    points = rule.points
    weights = rule.weights
    G = basis.weighted_values(points)
    Gy = weights[:, None] * G
    reach = 0.5 * effective_radius(G[:, -1], points)
    check_oscillation(h, w, rule, reach, "direct operator matrix")
    entries = np.zeros((basis.size, basis.size), dtype=complex)
    for start in range(0, points.size, chunk):
        sl = slice(start, start + chunk)
        K = _direct_kernel(a, points[sl], points, w, h)
        entries += (weights[sl, None] * G[sl]).conj().T @ (K @ Gy)
    return OperatorMatrix(entries, basis, "direct", a.label)


def laguerre_functions(K: int, x: np.ndarray) -> np.ndarray:
    """l_k(x) = L_k(x) exp(-x/2) for k = 0..K by the three-term recurrence, shape (K+1, len(x))."""
    x = np.asarray(x, dtype=float)
    out = np.empty((K + 1, x.size))
    out[0] = np.exp(-0.5 * x)
    if K >= 1:
        out[1] = (1.0 - x) * out[0]
    for k in range(1, K):
        out[k + 1] = ((2 * k + 1 - x) * out[k] - k * out[k - 1]) / (k + 1)
    return out


def radial_eigenvalues(profile, K: int, h: float, support: float = math.inf) -> np.ndarray:
    """lambda_k = (2/h) (-1)^k int a(r) l_k(2 r^2/h) r dr, the spectrum of Op of a radial symbol."""
    r_max = math.sqrt(h * (2 * K + 60))
    if math.isfinite(support):
        r_max = min(r_max, support)
    nodes = 10 * K + 400
    t, wt = roots_legendre(nodes)
    r = 0.5 * r_max * (t + 1.0)
    wt = 0.5 * r_max * wt
    a = np.asarray(profile(r), dtype=complex) * np.ones(r.shape)
    ell = laguerre_functions(K, 2.0 * r * r / h)
    signs = (-1.0) ** np.arange(K + 1)
    return (2.0 / h) * signs * (ell @ (wt * a * r))


def quantize_radial(a: Symbol, basis: OrthonormalBasis) -> OperatorMatrix:
    """Radial symbols are diagonal in the Phi0 basis."""
    _require_phi0(basis)
    profile = a.radial_profile()
    if profile is None:
        raise UnsupportedSymbolError(f"{a.label} symbol is not radial about the origin")
    support = getattr(a, "support", math.inf)
    values = radial_eigenvalues(profile, basis.N, basis.h, support)
    return OperatorMatrix(np.diag(values), basis, "radial", a.label)


def rank_one_projection(phase: BargmannPhase, h: float, basis: OrthonormalBasis,
                        rule: Optional[QuadRule] = None) -> OperatorMatrix:
    """P u = (u, v0) v0 for the calibrated ground state v0."""
    _require_phi0(basis)
    v0 = ground_state(phase, h)
    if rule is None:
        c = basis.coordinates(v0)
    else:
        c = np.array([inner_product(v0, e_j, basis.weight, rule) for e_j in basis.functions])
    return OperatorMatrix(np.outer(c, c.conj()), basis, "projection", "chi0")


@dataclass
class NormReport:
    norm: float
    leading: Dict[int, float] = field(default_factory=dict)
    condition: float = 1.0


def _generalized_norm(A: np.ndarray, G: np.ndarray) -> float:
    eigenvalues = sla.eigh(A.conj().T @ G @ A, G, eigvals_only=True)
    return math.sqrt(max(float(eigenvalues[-1]), 0.0))


def operator_norm(A: Union[OperatorMatrix, np.ndarray], gram: Optional[GramData] = None) -> NormReport:
    """max ||A c||_G / ||c||_G, with leading-block norms at N/4, N/2, 3N/4 and N."""
    entries = A.entries if isinstance(A, OperatorMatrix) else np.asarray(A)
    size = entries.shape[0]
    if gram is None:
        G = np.eye(size)
        condition = 1.0
    else:
        G = gram.gram
        condition = gram.condition
        if G.shape != entries.shape:
            raise ConfigError(f"Gram matrix shape {G.shape} does not match operator shape {entries.shape}")
    if condition > CONDITION_LIMIT:
        raise ConditioningError(
            f"Gram condition number {condition:.3e} exceeds {CONDITION_LIMIT:.0e}; reduce N to about {max(size // 2 - 1, 0)}"
        )
    leading = {}
    for block in sorted({max(1, size // 4), max(1, size // 2), max(1, 3 * size // 4), size}):
        leading[block - 1] = _generalized_norm(entries[:block, :block], G[:block, :block])
    return NormReport(norm=leading[size - 1], leading=leading, condition=condition)


def fourier_bound(a: Symbol, phi1: WeightFunction, h: float, xi_max: float = 2000.0, samples: int = 4000) -> float:
    """
    (pi h)^{-1} int |F_h a(Y)| exp(min(2 b0, b1 |2y|)/h) dY: the superposition integral bounded
    with the translation norms on H_Phi1.
    """
    profile = a.radial_profile()
    support = getattr(a, "support", math.inf)
    if profile is None or not math.isfinite(support):
        raise UnsupportedSymbolError("fourier_bound needs a compactly supported radial symbol")
    w = phi1.base
    radii = np.linspace(0.0, 0.5 * h * xi_max, samples)
    fa = np.abs(fourier_radial(profile, radii, h, support))
    envelope = np.minimum(2.0 * phi1.b0, phi1.b1 * radii / math.sqrt(w.l)) / h
    integrand = fa * np.exp(envelope) * 2.0 * math.pi * radii
    return float(trapezoid(integrand, radii) / (math.pi * h))
