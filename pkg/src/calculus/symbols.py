#!/usr/bin/env python3
"""
Symbols Module

Symbols are functions on Lambda_Phi0, identified with C through pi_x. Each kind
keeps a closed form when one exists (Gaussians, plane waves, polynomials in
(x, xi), phase-shifted products) and always exposes an evaluator at arbitrary
x coordinates.

Real phase-space coordinates on Lambda_Phi0 are X_r = 2 sqrt(L) x; they carry
the symplectic volume as Lebesgue measure, and |X|^2 below means |X_r|^2 = 4 L |x|^2.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, ClassVar, Optional

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from src.bargmann.bargmann_core import BargmannPhase, QuadRule
from src.bargmann.gaussian_integrals import GaussianExponent
from src.core.exceptions import ConfigError, UnsupportedSymbolError
from src.core.phase_space import LinearFormOnLambda, QuadraticWeight

logger = logging.getLogger(__name__)


class SymbolKind(str, Enum):
    GAUSSIAN_POLY = "gaussian_poly"
    PLANE_WAVE = "plane_wave"
    GEVREY_BUMP = "gevrey_bump"
    WINDOWED = "windowed"
    GRID_SAMPLED = "grid_sampled"
    POLYNOMIAL = "polynomial"
    MODULATED = "modulated"
    RADIAL = "radial"


def phase_radius(x, w: QuadraticWeight) -> np.ndarray:
    """|X_r| = 2 sqrt(L) |x|."""
    return 2.0 * math.sqrt(w.l) * np.abs(np.asarray(x))


def real_coordinates(x, w: QuadraticWeight) -> np.ndarray:
    x = 2.0 * math.sqrt(w.l) * np.asarray(x, dtype=complex)
    return np.stack([x.real, x.imag], axis=-1)


def from_real_coordinates(p, q, w: QuadraticWeight) -> np.ndarray:
    return (np.asarray(p) + 1j * np.asarray(q)) / (2.0 * math.sqrt(w.l))


@dataclass(frozen=True)
class Symbol:
    weight: QuadraticWeight
    h: float

    kind: ClassVar[SymbolKind]
    integrable: ClassVar[bool] = True

    def __call__(self, x) -> np.ndarray:
        raise NotImplementedError

    def sample(self, rule: QuadRule) -> np.ndarray:
        return self(rule.grid)

    def radial_profile(self) -> Optional[Callable[[np.ndarray], np.ndarray]]:
        """Profile in the real radius |X_r| when the symbol is radial about 0."""
        return None

    @property
    def label(self) -> str:
        return self.kind.value


@dataclass(frozen=True)
class GaussianSymbol(Symbol):
    """P(x, xbar) exp(E(x)), P = sum poly[j, k] x^j xbar^k (P = 1 when poly is None)."""
    exponent: GaussianExponent = field(default_factory=GaussianExponent)
    poly: Optional[np.ndarray] = None
    name: str = "gaussian"

    kind: ClassVar[SymbolKind] = SymbolKind.GAUSSIAN_POLY

    @property
    def is_pure(self) -> bool:
        return self.poly is None

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        values = np.exp(self.exponent(x))
        if self.poly is None:
            return values
        xb = x.conj()
        prefactor = np.zeros(x.shape, dtype=complex)
        for (j, k), c in np.ndenumerate(self.poly):
            if c != 0:
                prefactor += c * x ** j * xb ** k
        return prefactor * values

    def radial_profile(self):
        e = self.exponent
        radial = (self.poly is None and abs(e.alpha) == 0 and abs(e.gamma) == 0
                  and abs(e.delta) == 0 and abs(e.eps) == 0 and abs(np.imag(e.beta)) == 0)
        if not radial:
            return None
        rate = -np.real(e.beta) / (4.0 * self.weight.l)
        amplitude = np.exp(e.zeta)
        return lambda r: amplitude * np.exp(-rate * np.asarray(r) ** 2)

    def times(self, other: "GaussianSymbol") -> "GaussianSymbol":
        if not (self.is_pure and other.is_pure):
            raise UnsupportedSymbolError("closed-form products need pure Gaussians")
        return GaussianSymbol(self.weight, self.h, self.exponent + other.exponent,
                              name=f"{self.name}*{other.name}")

    @property
    def label(self) -> str:
        return self.name


def gaussian_symbol(w: QuadraticWeight, h: float, rate: float, center: complex = 0.0,
                    amplitude: complex = 1.0, name: str = "gaussian") -> GaussianSymbol:
    """amplitude * exp(-rate |X - C|^2) in real phase-space norm."""
    if rate < 0:
        raise ConfigError(f"Gaussian symbol rate must be non-negative, got {rate}")
    base = GaussianExponent(beta=-4.0 * w.l * rate, zeta=complex(np.log(complex(amplitude))))
    return GaussianSymbol(w, h, base.shifted(center), name=name)


def projection_symbol(w: QuadraticWeight, h: float) -> GaussianSymbol:
    """chi0(X / h^{1/2}) = 2 exp(-|X|^2 / h), the Weyl symbol of the ground-state projection."""
    return gaussian_symbol(w, h, rate=1.0 / h, amplitude=2.0, name="projection")


def window_symbol(w: QuadraticWeight, h: float, t: complex = 0.0) -> GaussianSymbol:
    """chi_T(X) = chi0(X - T) = 2 exp(-|X - T|^2)."""
    return gaussian_symbol(w, h, rate=1.0, center=t, amplitude=2.0, name="window")


@dataclass(frozen=True)
class PlaneWaveSymbol(Symbol):
    """amplitude * exp(i l(X)/h), unimodular on Lambda_Phi0."""
    form: Optional[LinearFormOnLambda] = None
    amplitude: complex = 1.0

    kind: ClassVar[SymbolKind] = SymbolKind.PLANE_WAVE
    integrable: ClassVar[bool] = False

    def phase_exponent(self) -> GaussianExponent:
        """exp(i l(x, xi(x))/h) written as exp(delta x + eps xbar)."""
        w = self.weight
        xs = complex(self.form.xstar[0])
        ell = complex(self.form.ell_x[0])
        return GaussianExponent(
            delta=1j * (ell - 2j * w.q * xs) / self.h,
            eps=2.0 * w.l * xs / self.h,
            zeta=complex(np.log(complex(self.amplitude))),
        )

    def __call__(self, x) -> np.ndarray:
        return self.amplitude * np.exp(1j * self.form.on_lambda(np.asarray(x, dtype=complex)) / self.h)


def plane_wave(form: LinearFormOnLambda, h: float, amplitude: complex = 1.0) -> PlaneWaveSymbol:
    return PlaneWaveSymbol(form.weight, h, form=form, amplitude=amplitude)


def twisted_plane_wave(y: complex, w: QuadraticWeight, h: float) -> GaussianExponent:
    """Exponent of X -> exp(2 i sigma(X, Y)/h)."""
    y = complex(y)
    return GaussianExponent(delta=-4.0 * w.l * y.conjugate() / h, eps=4.0 * w.l * y / h)


def windowed_plane_wave(y: complex, t: complex, w: QuadraticWeight, h: float) -> GaussianSymbol:
    """b_{Y,T}(X) = exp(2 i sigma(X, Y)/h) chi0((X - T)/h^{1/2})."""
    window = gaussian_symbol(w, h, rate=1.0 / h, center=t, amplitude=2.0)
    return GaussianSymbol(w, h, window.exponent + twisted_plane_wave(y, w, h), name="b_YT")


@dataclass(frozen=True)
class RadialSymbol(Symbol):
    """profile(|X_r|), zero beyond `support`."""
    profile: Callable[[np.ndarray], np.ndarray] = None
    support: float = math.inf
    name: str = "radial"
    decaying: bool = True

    kind: ClassVar[SymbolKind] = SymbolKind.RADIAL

    @property
    def integrable(self) -> bool:
        return self.decaying or math.isfinite(self.support)

    def __call__(self, x) -> np.ndarray:
        r = phase_radius(x, self.weight)
        values = np.asarray(self.profile(r), dtype=complex) * np.ones(r.shape)
        if math.isfinite(self.support):
            values = np.where(r < self.support, values, 0.0)
        return values

    def radial_profile(self):
        return self.profile

    @property
    def label(self) -> str:
        return self.name


def constant_symbol(w: QuadraticWeight, h: float, value: complex = 1.0) -> RadialSymbol:
    return RadialSymbol(w, h, profile=lambda r: np.full(np.shape(r), value, dtype=complex), name="constant",
                        decaying=False)


def exponential_profile_symbol(w: QuadraticWeight, h: float) -> RadialSymbol:
    """exp(-|X_r|): its windowed transforms are dominated by a fixed L^1 function."""
    return RadialSymbol(w, h, profile=lambda r: np.exp(-np.asarray(r)), name="exp_radius")


def cone_symbol(w: QuadraticWeight, h: float) -> RadialSymbol:
    """(1 - |X_r|)_+: compactly supported but only Lipschitz, so not Gevrey of any order."""
    return RadialSymbol(w, h, profile=lambda r: np.clip(1.0 - np.asarray(r), 0.0, None), support=1.0, name="cone")


@dataclass(frozen=True)
class WindowedSymbol(Symbol):
    """window(X) * base(X)."""
    window: Symbol = None
    base: Symbol = None

    kind: ClassVar[SymbolKind] = SymbolKind.WINDOWED

    def __call__(self, x) -> np.ndarray:
        return self.window(x) * self.base(x)

    def closed_form(self) -> Optional[GaussianSymbol]:
        if isinstance(self.window, GaussianSymbol) and isinstance(self.base, GaussianSymbol) \
                and self.window.is_pure and self.base.is_pure:
            return self.window.times(self.base)
        return None


@dataclass(frozen=True)
class GridSampledSymbol(Symbol):
    """Values on a QuadRule grid, interpolated elsewhere and zero outside the box."""
    rule: QuadRule = None
    values: np.ndarray = None
    name: str = "grid"

    kind: ClassVar[SymbolKind] = SymbolKind.GRID_SAMPLED

    def __post_init__(self):
        if self.values.shape != (self.rule.M, self.rule.M):
            raise ConfigError(f"grid values have shape {self.values.shape}, expected {(self.rule.M, self.rule.M)}")

    def sample(self, rule: QuadRule) -> np.ndarray:
        if rule == self.rule:
            return self.values
        return self(rule.grid)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        axis = self.rule.axis
        local = x - self.rule.center
        pts = np.stack([local.real.ravel(), local.imag.ravel()], axis=-1)
        re = RegularGridInterpolator((axis, axis), self.values.real, method="cubic", bounds_error=False, fill_value=0.0)
        im = RegularGridInterpolator((axis, axis), self.values.imag, method="cubic", bounds_error=False, fill_value=0.0)
        return (re(pts) + 1j * im(pts)).reshape(x.shape)

    @property
    def label(self) -> str:
        return self.name


@dataclass(frozen=True)
class PolynomialSymbol(Symbol):
    """sum coeffs[j, k] x^j xi^k, a holomorphic polynomial on C^2 restricted to Lambda_Phi0."""
    coeffs: np.ndarray = None
    name: str = "polynomial"

    kind: ClassVar[SymbolKind] = SymbolKind.POLYNOMIAL
    integrable: ClassVar[bool] = False

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        xi = self.weight.xi(x)
        return np.polynomial.polynomial.polyval2d(x, xi, self.coeffs)

    @property
    def label(self) -> str:
        return self.name


def oscillator_symbol(phase: BargmannPhase, w: QuadraticWeight, h: float) -> PolynomialSymbol:
    """(y^2 + eta^2) o kappa_phi^{-1} as a polynomial in (x, xi)."""
    a, b, c = phase.a, phase.b, phase.c
    # y = (xi - a x)/b, eta = (a c/b - b) x - (c/b) xi
    y = np.array([-a / b, 1.0 / b])
    eta = np.array([a * c / b - b, -c / b])
    coeffs = np.zeros((3, 3), dtype=complex)
    for lin in (y, eta):
        coeffs[2, 0] += lin[0] ** 2
        coeffs[1, 1] += 2.0 * lin[0] * lin[1]
        coeffs[0, 2] += lin[1] ** 2
    return PolynomialSymbol(w, h, coeffs=coeffs, name="oscillator")


@dataclass(frozen=True)
class ModulatedSymbol(Symbol):
    """exp(i l(X)/h) base(x + shift): a plane wave composed with a symbol."""
    form: Optional[LinearFormOnLambda] = None
    base: Symbol = None
    shift: complex = 0.0

    kind: ClassVar[SymbolKind] = SymbolKind.MODULATED

    @property
    def integrable(self) -> bool:
        return self.base.integrable

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        return np.exp(1j * self.form.on_lambda(x) / self.h) * self.base(x + self.shift)

    def as_gaussian(self) -> GaussianSymbol:
        if not (isinstance(self.base, GaussianSymbol) and self.base.is_pure):
            raise UnsupportedSymbolError("only Gaussian bases have a closed-form modulated symbol")
        wave = plane_wave(self.form, self.h).phase_exponent()
        return GaussianSymbol(self.weight, self.h, self.base.exponent.shifted(-self.shift) + wave,
                              name=f"mod({self.base.name})")
