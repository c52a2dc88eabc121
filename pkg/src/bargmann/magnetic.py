#!/usr/bin/env python3
"""
Magnetic Translations Module

The operators exp(-i l(x, hD)/h) for complex linear forms l real on Lambda_Phi0,
acting exactly on HoloFunctions:

    exp(-i l/h) u(x) = exp(i a b / 2h) exp(-i a x / h) u(x - b),  (a, b) = (l'_x, l'_xi).

Also weight transport along translations, the Hamilton-Jacobi flow of the
perturbation, and the quantization-multiplication identity.
"""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from src.bargmann.bargmann_core import OrthonormalBasis, QuadRule, inner_product
from src.bargmann.gaussian_integrals import gaussian_overlap, overlap_batch
from src.bargmann.holo import HoloFunction
from src.bargmann.weights import WeightFunction
from src.core.exceptions import ConfigError
from src.core.phase_space import (
    LinearFormOnLambda,
    PhasePoint,
    QuadraticWeight,
    linear_form,
    sigma_lambda_coords,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MagneticTranslation:
    """exp(-sign * i l(x, hD)/h) for the form l."""
    form: LinearFormOnLambda
    h: float
    sign: int = 1

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ConfigError(f"translation sign must be +1 or -1, got {self.sign}")
        if self.h <= 0:
            raise ConfigError(f"semiclassical parameter h must be positive, got {self.h}")

    @property
    def weight(self) -> QuadraticWeight:
        return self.form.weight

    @property
    def ab(self) -> Tuple[complex, complex]:
        """(a, b): the modulation frequency and the shift."""
        return complex(self.sign * self.form.ell_x[0]), complex(self.sign * self.form.xstar[0])

    @property
    def shift(self) -> complex:
        return self.ab[1]

    @property
    def hamilton(self) -> PhasePoint:
        a, b = self.ab
        return PhasePoint(b, -a)

    def inverse(self) -> "MagneticTranslation":
        return MagneticTranslation(self.form, self.h, -self.sign)

    def __call__(self, u: HoloFunction) -> HoloFunction:
        return apply(self, u)


def weyl_translation(y: complex, w: QuadraticWeight, h: float) -> MagneticTranslation:
    """exp(2 i sigma((x, hD), Y)/h) for Y the point of Lambda_Phi0 above y."""
    return MagneticTranslation(linear_form(-2.0 * complex(y), w), h, sign=1)


def half_translation(z: complex, w: QuadraticWeight, h: float) -> MagneticTranslation:
    """exp(i sigma((x, hD), Z)/h)."""
    return weyl_translation(0.5 * complex(z), w, h)


def plane_wave_operator(form: LinearFormOnLambda, h: float) -> MagneticTranslation:
    """The Weyl quantization of exp(i l/h)."""
    return MagneticTranslation(form, h, sign=-1)


def apply(t: MagneticTranslation, u: HoloFunction) -> HoloFunction:
    if abs(u.h - t.h) > 1e-15 * t.h:
        raise ConfigError(f"translation with h={t.h} applied to a function with h={u.h}")
    a, b = t.ab
    return u.translate(b).multiply_exp(a1=-1j * a, a0=0.5j * a * b)


def compose_cocycle(tY: MagneticTranslation, tZ: MagneticTranslation) -> Tuple[MagneticTranslation, complex]:
    """tY o tZ = phase * t_{Y+Z}, with phase exp(i sigma(H_Y, H_Z) / 2h)."""
    if abs(tY.h - tZ.h) > 1e-15 * tY.h:
        raise ConfigError(f"cannot compose translations with h={tY.h} and h={tZ.h}")
    if tY.weight is not tZ.weight and not (
        np.allclose(tY.weight.Q, tZ.weight.Q) and np.allclose(tY.weight.L, tZ.weight.L)
    ):
        raise ConfigError("cannot compose translations over different weights")
    a1, b1 = tY.ab
    a2, b2 = tZ.ab
    phase = np.exp(0.5j * (a2 * b1 - a1 * b2) / tY.h)
    combined = MagneticTranslation(linear_form(b1 + b2, tY.weight), tY.h, sign=1)
    return combined, complex(phase)


def modulus_transport_residual(t: MagneticTranslation, u: HoloFunction, x: np.ndarray) -> float:
    """max | |e^{-Phi0/h} t u (x)| - |e^{-Phi0/h} u (x - b)| | over the sample points."""
    w = t.weight
    b = t.shift
    x = np.asarray(x, dtype=complex)
    lhs = np.abs(apply(t, u).weighted(x, w.value(x)))
    rhs = np.abs(u.weighted(x - b, w.value(x - b)))
    return float(np.max(np.abs(lhs - rhs)))


def transport_weight(phi1: WeightFunction, xstar: complex) -> WeightFunction:
    """Phi2(x) = Phi1(x) + f(x - x*) - f(x) = Phi0(x) + f(x - x*)."""
    return phi1.transported(xstar)


def hj_solution(phi1: WeightFunction, xstar: complex, t: float) -> WeightFunction:
    """Psi(., t) = Phi0 + f(. - t x*), the solution of the real Hamilton-Jacobi equation."""
    return phi1.transported(t * complex(xstar))


def hj_residual(phi1: WeightFunction, xstar: complex, x: np.ndarray, t: np.ndarray, step: float = 1e-5) -> np.ndarray:
    """|d_t Psi - Im l(x, (2/i) d_x Psi)| by central differences."""
    x = np.asarray(x, dtype=complex)
    t = np.asarray(t, dtype=float)
    form = linear_form(xstar, phi1.base)

    def psi(xx, tt):
        if phi1.is_quadratic:
            return phi1.base.value(xx)
        return phi1.base.value(xx) + phi1.scale * phi1.perturbation(xx - phi1.shift - tt * complex(xstar))

    dt = (psi(x, t + step) - psi(x, t - step)) / (2.0 * step)
    ds = (psi(x + step, t) - psi(x - step, t)) / (2.0 * step)
    dtt = (psi(x + 1j * step, t) - psi(x - 1j * step, t)) / (2.0 * step)
    dx = 0.5 * (ds - 1j * dtt)
    rhs = np.imag(form(x, -2j * dx))
    return np.abs(dt - rhs)


@dataclass(frozen=True)
class NormBound:
    sampled_exponent: float
    envelope_exponent: float

    @property
    def bound(self) -> float:
        return float(np.exp(self.sampled_exponent))

    @property
    def envelope(self) -> float:
        return float(np.exp(self.envelope_exponent))


def norm_bound_on_weighted(t: MagneticTranslation, phi1: WeightFunction, rule: QuadRule = None) -> NormBound:
    """
    exp(sup |Phi2 - Phi1| / h) bounds the norm of t on H_Phi1; the envelope
    min(2 b0, b1 |b|)/h does not depend on sampling.

    Returns the exponents; the real bound is `.bound` and the sampling-free one `.envelope`.
    """
    if phi1.is_quadratic or t.shift == 0:
        return NormBound(0.0, 0.0)
    rule = rule or QuadRule(R=12.0, M=241)
    x = rule.points
    b = t.shift
    sup = float(np.max(np.abs(phi1.f(x - b) - phi1.f(x))))
    envelope = min(2.0 * phi1.b0, phi1.b1 * abs(b)) / t.h
    return NormBound(sampled_exponent=sup / t.h, envelope_exponent=envelope)


def apply_linear_form(form: LinearFormOnLambda, u: HoloFunction) -> HoloFunction:
    """l(x, hD) u = l'_x x u + x* hD u, exact."""
    return u.times_x().scale(form.ell_x[0]) + u.hD().scale(form.xstar[0])


def quantization_multiplication(form: LinearFormOnLambda, u: HoloFunction, psi: WeightFunction,
                                rule: QuadRule) -> Tuple[complex, complex]:
    """((l(x, hD) u, u)_{H_Psi}, int l(x, (2/i) dPsi/dx) |u|^2 e^{-2 Psi/h} L(dx))."""
    if not np.any(form.xstar):
        return 0.0j, 0.0j
    lhs = inner_product(apply_linear_form(form, u), u, psi, rule)
    X = rule.grid
    weighted = u.weighted(X, psi.value(X))
    symbol = form(X, psi.xi(X))
    rhs = rule.integrate(symbol * np.abs(weighted) ** 2)
    return lhs, rhs


def flow_norm_derivative(form: LinearFormOnLambda, u: HoloFunction, phi1: WeightFunction, rule: QuadRule,
                         t: float = 0.5, dt: float = 1e-4) -> float:
    """d/dt ||exp(-i t l/h) u||^2_{H_Psi_t} by central differences; vanishes along the flow."""
    xstar = complex(form.xstar[0])

    def squared_norm(tt):
        moved = apply(MagneticTranslation(form.scale(tt), u.h), u)
        return inner_product(moved, moved, hj_solution(phi1, xstar, tt), rule).real

    return (squared_norm(t + dt) - squared_norm(t - dt)) / (2.0 * dt)


def prefactor_identity_residual(form: LinearFormOnLambda, x: np.ndarray) -> float:
    """max |Phi0(x + x*/2) - Phi0(x - x*/2) + Re(i l'_x x)|."""
    w = form.weight
    xs = complex(form.xstar[0])
    x = np.asarray(x, dtype=complex)
    residual = w.value(x + 0.5 * xs) - w.value(x - 0.5 * xs) + np.real(1j * form.ell_x[0] * x)
    return float(np.max(np.abs(residual)))


@dataclass(frozen=True)
class ModulusPhaseCheck:
    constant: complex
    spread: float
    modulus_error: float


def modulus_phase_form(form: LinearFormOnLambda, u: HoloFunction, x: np.ndarray) -> ModulusPhaseCheck:
    """
    Compare exp(i l(x, hD)/h) u with
    exp(-2i Im(Q x* x)/h) exp(i sigma(X, X*)/2h) exp((Phi0(x) - Phi0(x + x*))/h) u(x + x*);
    the ratio must be a unimodular constant.
    """
    w = form.weight
    h = u.h
    xs = complex(form.xstar[0])
    x = np.asarray(x, dtype=complex)
    translated = apply(plane_wave_operator(form, h), u)
    sig = sigma_lambda_coords(x, xs, w)
    phase = (-2j * np.imag(w.q * xs * x) + 0.5j * sig) / h
    # both sides are taken relative to exp(Phi0(x)/h)
    lhs = translated.weighted(x, w.value(x))
    rhs = np.exp(phase) * u.weighted(x + xs, w.value(x + xs))
    ratio = lhs / rhs
    constant = complex(np.mean(ratio))
    return ModulusPhaseCheck(
        constant=constant,
        spread=float(np.max(np.abs(ratio - constant))),
        modulus_error=abs(abs(constant) - 1.0),
    )


def translation_overlap_bound(form: LinearFormOnLambda, u: HoloFunction, v: HoloFunction,
                              rule: QuadRule) -> Tuple[float, float]:
    """(|(e^{i l/h} u, v)|, int e^{-Phi0(x+x*)/h} |u(x+x*)| e^{-Phi0(x)/h} |v(x)| L(dx))."""
    w = form.weight
    xs = complex(form.xstar[0])
    value = abs(gaussian_overlap(apply(plane_wave_operator(form, u.h), u), v, w))
    X = rule.grid
    integrand = np.abs(u.weighted(X + xs, w.value(X + xs))) * np.abs(v.weighted(X, w.value(X)))
    return value, rule.integrate(integrand).real


def translated_exponents(w: QuadraticWeight, a: np.ndarray, b: np.ndarray):
    """Exponent (q1, q0) of exp(i a b/2h) exp(-i a x/h) g(x - b) for g with exponent Q x^2/h."""
    q1 = -2.0 * w.q * b - 1j * a
    q0 = w.q * b * b + 0.5j * a * b
    return q1, q0


def translation_matrices(a: np.ndarray, b: np.ndarray, basis: OrthonormalBasis, columns: int = None,
                         chunk: int = 2048) -> np.ndarray:
    """
    M[i, j, k] = (t_i e_k, e_j)_{Phi0} for the translations with parameters (a[i], b[i]),
    k restricted to the first `columns` basis functions.
    """
    w = basis.weight.base
    a = np.atleast_1d(np.asarray(a, dtype=complex))
    b = np.atleast_1d(np.asarray(b, dtype=complex))
    # e_k only involves powers up to k
    Cu = basis.coefficients if columns is None else basis.coefficients[:columns, :columns]
    Cv = basis.coefficients
    target = basis.function(0)
    out = np.empty((a.size, basis.size, Cu.shape[1]), dtype=complex)
    for start in range(0, a.size, chunk):
        sl = slice(start, start + chunk)
        q1, q0 = translated_exponents(w, a[sl], b[sl])
        out[sl] = overlap_batch(w.q, q1, q0, b[sl], Cu, target, Cv, w, basis.h)
    return out


def translation_matrix(t: MagneticTranslation, basis: OrthonormalBasis) -> np.ndarray:
    """Exact matrix of a magnetic translation in a Phi0-orthonormal basis."""
    a, b = t.ab
    return translation_matrices(np.array([a]), np.array([b]), basis)[0]
