#!/usr/bin/env python3
"""
Bargmann Core Module

Weighted spaces H_Phi(C) at desk scale: tensor trapezoid quadrature, weighted
inner products, the generalized Bargmann transform of real-side Gaussians,
the canonical transformation kappa_phi and the weight it induces, ground
states and Phi-orthonormal bases of polynomial-times-Gaussian functions.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial import hermite as H
from scipy import linalg as sla
from scipy.special import gamma as gamma_fn

from src.bargmann.gaussian_integrals import (
    check_integrable,
    gaussian_overlap,
    pair_exponent,
)
from src.bargmann.holo import HoloFunction
from src.bargmann.weights import WeightFunction, quadratic_weight_function
from src.core.exceptions import ConditioningError, ConfigError, IntegrabilityError
from src.core.phase_space import PhasePoint, QuadraticWeight

logger = logging.getLogger(__name__)

CALIBRATION_TOLERANCE = 1e-8


@dataclass(frozen=True)
class QuadRule:
    """Tensor trapezoid rule on the box center + [-R, R]^2 with M points per axis."""
    R: float
    M: int
    center: complex = 0.0

    def __post_init__(self):
        if self.R <= 0 or self.M < 2:
            raise ConfigError(f"quadrature needs R > 0 and M >= 2, got R={self.R}, M={self.M}")

    @classmethod
    def for_weight(cls, h: float, L: float, degree: int = 0, M: int = 128, center: complex = 0.0) -> "QuadRule":
        """Box wide enough that |x|^{2 degree} exp(-2 L |x|^2 / h) has a tail below 1e-16."""
        R = math.sqrt(h / (2.0 * L) * (2.0 * degree + 40.0))
        return cls(R=R, M=M, center=center)

    @property
    def spacing(self) -> float:
        return 2.0 * self.R / (self.M - 1)

    @cached_property
    def axis(self) -> np.ndarray:
        return np.linspace(-self.R, self.R, self.M)

    @cached_property
    def axis_weights(self) -> np.ndarray:
        wts = np.full(self.M, self.spacing)
        wts[0] *= 0.5
        wts[-1] *= 0.5
        return wts

    @cached_property
    def grid(self) -> np.ndarray:
        """Complex nodes, indexed [i_s, i_t] with x = center + s_i + i t_j."""
        return self.center + self.axis[:, None] + 1j * self.axis[None, :]

    @cached_property
    def grid_weights(self) -> np.ndarray:
        return self.axis_weights[:, None] * self.axis_weights[None, :]

    @property
    def points(self) -> np.ndarray:
        return self.grid.ravel()

    @property
    def weights(self) -> np.ndarray:
        return self.grid_weights.ravel()

    def integrate(self, values: np.ndarray) -> complex:
        return complex(np.sum(self.grid_weights * values))

    def refined(self, factor: int = 2) -> "QuadRule":
        return replace(self, M=(self.M - 1) * factor + 1)


@dataclass(frozen=True)
class BargmannPhase:
    """phi(x, y) = (a/2) x^2 + b x y + (c/2) y^2 with Im c > 0 and b != 0."""
    a: complex
    b: complex
    c: complex
    C: Optional[float] = None
    name: str = "custom"

    def __post_init__(self):
        if complex(self.c).imag <= 0:
            raise ConfigError(f"Bargmann phase needs Im c > 0, got c={self.c}")
        if complex(self.b) == 0:
            raise ConfigError("Bargmann phase needs b != 0 (det phi''_xy = 0)")

    def __call__(self, x, y):
        return 0.5 * self.a * x * x + self.b * x * y + 0.5 * self.c * y * y

    @property
    def constant(self) -> float:
        return 1.0 if self.C is None else self.C


PHASE_PRESETS: Dict[str, Tuple[complex, complex, complex]] = {
    # phi = i (x - y)^2 / 2
    "fbi": (1j, -1j, 1j),
    # phi = i (x^2/2 - sqrt(2) x y + y^2/2)
    "bargmann": (1j, -math.sqrt(2.0) * 1j, 1j),
}


def bargmann_phase(name: str) -> BargmannPhase:
    if name not in PHASE_PRESETS:
        raise ConfigError(f"unknown Bargmann phase '{name}', expected one of {sorted(PHASE_PRESETS)}")
    a, b, c = PHASE_PRESETS[name]
    return BargmannPhase(a=a, b=b, c=c, name=name)


def kappa_phi(y, eta, phase: BargmannPhase) -> PhasePoint:
    """kappa_phi(y, -phi'_y(x, y)) = (x, phi'_x(x, y)) for real (y, eta)."""
    x = -(np.asarray(eta, dtype=complex) + phase.c * np.asarray(y)) / phase.b
    xi = phase.a * x + phase.b * np.asarray(y)
    return PhasePoint(x, xi)


def kappa_phi_inverse(x, xi, phase: BargmannPhase) -> Tuple[np.ndarray, np.ndarray]:
    """The preimage (y, eta) of (x, xi); real when (x, xi) lies on Lambda_Phi0."""
    x = np.asarray(x, dtype=complex)
    y = (np.asarray(xi, dtype=complex) - phase.a * x) / phase.b
    eta = -phase.b * x - phase.c * y
    return y, eta


def derive_weight(phase: BargmannPhase) -> QuadraticWeight:
    """Phi0(x) = max over real y of -Im phi(x, y), maximized in closed form."""
    im_c = complex(phase.c).imag
    Q = 0.5j * phase.a - phase.b ** 2 / (4.0 * im_c)
    L = abs(phase.b) ** 2 / (4.0 * im_c)
    name = phase.name if phase.name in PHASE_PRESETS else "derived"
    return QuadraticWeight(Q=np.array([[Q]]), L=np.array([[L]]), name=name)


@dataclass(frozen=True)
class RealGaussian:
    """p(y) exp(-(alpha y^2 + beta y + gamma)/h) on R, p by ascending coefficients."""
    coeffs: np.ndarray
    h: float
    alpha: complex = 0.5
    beta: complex = 0.0
    gamma: complex = 0.0
    label: str = ""

    def __call__(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        poly = np.polynomial.polynomial.polyval(y, np.asarray(self.coeffs, dtype=complex))
        return poly * np.exp(-(self.alpha * y * y + self.beta * y + self.gamma) / self.h)


def real_side_ground_state(h: float) -> RealGaussian:
    """e0(y) = pi^{-1/4} h^{-1/4} exp(-y^2 / 2h), unit norm in L^2(R)."""
    return RealGaussian(coeffs=np.array([np.pi ** -0.25 * h ** -0.25]), h=h, alpha=0.5, label="e0")


def hermite_state(k: int, h: float) -> RealGaussian:
    """The k-th semiclassical Hermite function, unit norm in L^2(R)."""
    t_coeffs = H.herm2poly(np.eye(k + 1)[k])
    norm = (2.0 ** k * math.factorial(k)) ** -0.5 * np.pi ** -0.25 * h ** -0.25
    y_coeffs = norm * t_coeffs * h ** (-0.5 * np.arange(k + 1))
    return RealGaussian(coeffs=y_coeffs, h=h, alpha=0.5, label=f"hermite_{k}")


def bargmann_transform_gaussian(g: RealGaussian, phase: BargmannPhase) -> HoloFunction:
    """
    T g(x) = C h^{-3/4} int exp(i phi(x, y)/h) g(y) dy in closed form. Completing the
    square in y leaves exp(q(x)/h) times even Gaussian moments of the shifted polynomial.
    """
    h = g.h
    A = g.alpha - 0.5j * phase.c
    if complex(A).real <= 0:
        raise IntegrabilityError(f"Bargmann integral diverges: Re(alpha - i c/2) = {complex(A).real:.3e} <= 0")
    coeffs = np.asarray(g.coeffs, dtype=complex)
    if not np.any(coeffs):
        return HoloFunction.zero(h)

    q2 = 0.5j * phase.a - phase.b ** 2 / (4.0 * A)
    q1 = -1j * g.beta * phase.b / (2.0 * A)
    q0 = -g.gamma + g.beta ** 2 / (4.0 * A)

    shift = Polynomial([-g.beta / (2.0 * A), 1j * phase.b / (2.0 * A)])
    p = Polynomial(coeffs)
    result = Polynomial([0.0j])
    for j in range(0, len(coeffs), 2):
        moment = gamma_fn((j + 1) / 2.0) * np.exp((j + 1) / 2.0 * np.log(h / A))
        result = result + p.deriv(j)(shift) * (moment / math.factorial(j))
    prefactor = phase.constant * h ** -0.75
    return HoloFunction(coeffs=prefactor * np.asarray(result.coef, dtype=complex), h=h,
                        q2=q2, q1=q1, q0=q0, label=f"T({g.label})")


def transform_hermite_combination(coefficients: Sequence[complex], phase: BargmannPhase, h: float) -> HoloFunction:
    """T applied termwise to sum_k c_k hermite_k."""
    total = HoloFunction.zero(h)
    for k, c in enumerate(coefficients):
        if c == 0:
            continue
        term = bargmann_transform_gaussian(hermite_state(k, h), phase).scale(c)
        total = term if total.is_zero else total + term
    return total


def _weighted_pair(u: HoloFunction, v: HoloFunction, weight: WeightFunction, rule: QuadRule):
    if u.h != v.h:
        raise ConfigError(f"inner product needs a shared h, got {u.h} and {v.h}")
    A, _ = pair_exponent(u, v, weight.base).real_form()
    check_integrable(A, "weighted product in inner_product")
    X = rule.grid
    phi = weight.value(X)
    return u.weighted(X, phi), v.weighted(X, phi)


def inner_product(u: HoloFunction, v: HoloFunction, weight: WeightFunction, rule: QuadRule) -> complex:
    """(u, v)_{H_Phi} = int u conj(v) exp(-2 Phi/h) L(dx) by quadrature."""
    if u.is_zero or v.is_zero:
        return 0.0j
    wu, wv = _weighted_pair(u, v, weight, rule)
    return rule.integrate(wu * np.conj(wv))


def norm(u: HoloFunction, weight: WeightFunction, rule: QuadRule) -> float:
    return math.sqrt(max(inner_product(u, u, weight, rule).real, 0.0))


@dataclass(frozen=True)
class CalibrationResult:
    phase: BargmannPhase
    C: float
    quadrature_norm: float
    exact_norm: float
    residual: float


def calibrate(phase: BargmannPhase, h: float, rule: Optional[QuadRule] = None) -> CalibrationResult:
    """Fix the constant C of the Bargmann transform by unit norm of T e0."""
    w = derive_weight(phase)
    rule = rule or QuadRule.for_weight(h, w.l)
    raw = bargmann_transform_gaussian(real_side_ground_state(h), replace(phase, C=1.0))
    raw_norm = norm(raw, quadratic_weight_function(w), rule)
    C = 1.0 / raw_norm
    calibrated = replace(phase, C=C)
    v0 = bargmann_transform_gaussian(real_side_ground_state(h), calibrated)
    exact = math.sqrt(gaussian_overlap(v0, v0, w).real)
    residual = abs(norm(v0, quadratic_weight_function(w), rule) - 1.0)
    if abs(exact - 1.0) > 1e3 * CALIBRATION_TOLERANCE:
        logger.warning(f"Calibration of {phase.name} at h={h}: exact norm {exact:.10f} deviates from 1")
    logger.info(f"Calibrated {phase.name} phase at h={h}: C={C:.10f}, residual {residual:.2e}")
    return CalibrationResult(phase=calibrated, C=C, quadrature_norm=raw_norm, exact_norm=exact, residual=residual)


def ground_state(phase: BargmannPhase, h: float) -> HoloFunction:
    """v0 = T e0 with the calibrated constant."""
    if phase.C is None:
        phase = calibrate(phase, h).phase
    return bargmann_transform_gaussian(real_side_ground_state(h), phase)


def monomial_norms(w: QuadraticWeight, h: float, N: int) -> np.ndarray:
    """||x^k exp(Q x^2/h)||_{H_Phi0} = sqrt(pi k! (h/2L)^{k+1})."""
    k = np.arange(N + 1)
    log_sq = math.log(math.pi) + np.array([math.lgamma(j + 1) for j in k]) + (k + 1) * math.log(h / (2.0 * w.l))
    return np.exp(0.5 * log_sq)


@dataclass
class OrthonormalBasis:
    """Basis e_k = sum_m mixing[m, k] x^m exp(Q x^2/h) / ||x^m exp(Q x^2/h)||_{Phi0}."""
    weight: WeightFunction
    h: float
    N: int
    mixing: np.ndarray
    gram: np.ndarray
    gram_condition: float
    scales: np.ndarray = field(init=False)

    def __post_init__(self):
        self.scales = 1.0 / monomial_norms(self.weight.base, self.h, self.N)

    @property
    def size(self) -> int:
        return self.N + 1

    @property
    def q2(self) -> complex:
        return self.weight.base.q

    @property
    def coefficients(self) -> np.ndarray:
        """Column k holds the x-power coefficients of e_k."""
        return self.scales[:, None] * self.mixing

    def function(self, k: int) -> HoloFunction:
        return HoloFunction(coeffs=self.coefficients[:, k], h=self.h, q2=self.q2, label=f"e_{k}")

    @property
    def functions(self) -> List[HoloFunction]:
        return [self.function(k) for k in range(self.size)]

    def weighted_monomials(self, x) -> np.ndarray:
        """g_k(x) = x^k exp(Q x^2/h - Phi0(x)/h) / ||.||, built by g_k = g_{k-1} x / sqrt(k h / 2L)."""
        x = np.asarray(x, dtype=complex).ravel()
        w = self.weight.base
        out = np.empty((x.size, self.size), dtype=complex)
        out[:, 0] = np.exp((w.q * x * x - w.value(x)) / self.h) * self.scales[0]
        for k in range(1, self.size):
            out[:, k] = out[:, k - 1] * x / math.sqrt(k * self.h / (2.0 * w.l))
        return out

    def weighted_values(self, x) -> np.ndarray:
        """e_k(x) exp(-Phi0(x)/h), shape (points, N+1)."""
        return self.weighted_monomials(x) @ self.mixing

    def values(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=complex).ravel()
        return self.weighted_values(x) * np.exp(self.weight.base.value(x) / self.h)[:, None]

    def coordinates(self, u: HoloFunction) -> np.ndarray:
        """Coefficients (u, e_j)_{Phi0} for j = 0..N, exact."""
        if not self.weight.is_quadratic:
            raise ConfigError("exact coordinates are only available in a Phi0-orthonormal basis")
        return np.array([gaussian_overlap(u, self.function(j), self.weight.base) for j in range(self.size)])


def phi0_basis(w: QuadraticWeight, h: float, N: int) -> OrthonormalBasis:
    """The analytic Phi0-orthonormal basis (monomials are orthogonal because Phi0 - Re(Q x^2) is radial)."""
    if N < 0:
        raise ConfigError(f"basis degree must be non-negative, got {N}")
    eye = np.eye(N + 1, dtype=complex)
    return OrthonormalBasis(weight=quadratic_weight_function(w), h=h, N=N, mixing=eye, gram=eye, gram_condition=1.0)


@dataclass(frozen=True)
class GramData:
    gram: np.ndarray
    condition: float
    weight: WeightFunction


def weight_gram(basis: OrthonormalBasis, weight: WeightFunction, rule: QuadRule, chunk: int = 16384) -> GramData:
    """G[j, k] = (e_k, e_j)_{H_Phi} by chunked quadrature."""
    h = basis.h
    points = rule.points
    weights = rule.weights
    G = np.zeros((basis.size, basis.size), dtype=complex)
    for start in range(0, points.size, chunk):
        x = points[start:start + chunk]
        V = basis.weighted_values(x)
        wt = weights[start:start + chunk] * np.exp(-2.0 * weight.f(x) / h)
        G += (V.conj() * wt[:, None]).T @ V
    G = 0.5 * (G + G.conj().T)
    eigenvalues = np.linalg.eigvalsh(G)
    if eigenvalues[0] <= 0:
        raise ConditioningError(
            f"Gram matrix in {weight.describe()} is not positive definite at N={basis.N} "
            f"(smallest eigenvalue {eigenvalues[0]:.3e}); reduce N or enlarge the quadrature box"
        )
    condition = float(eigenvalues[-1] / eigenvalues[0])
    return GramData(gram=G, condition=condition, weight=weight)


def gram_orthonormal_basis(weight: WeightFunction, N: int, rule: QuadRule, h: float) -> OrthonormalBasis:
    """
    Monomial span orthonormalized against inner_product in H_Phi (Cholesky, upper triangular).

    A WeightFunction carries no semiclassical parameter, so h is passed explicitly; it fixes the
    Phi0 reference basis and the exp(-2 Phi / h) factor of the Gram integrals.
    """
    reference = phi0_basis(weight.base, h, N)
    data = weight_gram(reference, weight, rule)
    if data.condition > 1e12:
        raise ConditioningError(
            f"Gram condition number {data.condition:.3e} exceeds 1e12 at N={N}; reduce N to about {max(N // 2, 0)}"
        )
    try:
        lower = sla.cholesky(data.gram, lower=True)
    except np.linalg.LinAlgError as exc:
        raise ConditioningError(f"Gram matrix at N={N} failed Cholesky factorization: {exc}") from exc
    mixing = sla.solve_triangular(lower, np.eye(N + 1), lower=True).conj().T
    logger.info(f"Orthonormal basis in {weight.describe()}: N={N}, Gram condition {data.condition:.3e}")
    return OrthonormalBasis(weight=weight, h=h, N=N, mixing=mixing, gram=data.gram, gram_condition=data.condition)
