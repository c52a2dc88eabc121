#!/usr/bin/env python3
"""
Holomorphic Function Module

HoloFunction is the closed class u(x) = p(x - c) * exp((q2 x^2 + q1 x + q0)/h)
on C (n == 1). It is closed under translation, multiplication by exp of
holomorphic polynomials of degree <= 2, multiplication by polynomials and
the semiclassical derivative hD = (h/i) d/dx, so magnetic translations and
polynomial quantizations act on it without approximation.
"""

from dataclasses import dataclass, field, replace
from typing import Sequence, Union

import numpy as np
from numpy.polynomial import Polynomial

from src.core.exceptions import ConfigError

ArrayLike = Union[complex, np.ndarray]


def _recenter(coeffs: np.ndarray, shift: complex) -> np.ndarray:
    """Coefficients of p(y + shift) in powers of y."""
    if shift == 0:
        return coeffs
    return np.asarray(Polynomial(coeffs)(Polynomial([shift, 1.0])).coef, dtype=complex)


@dataclass(frozen=True)
class HoloFunction:
    """u(x) = p(x - center) exp(q(x)/h), p given by ascending coefficients."""
    coeffs: np.ndarray
    h: float
    q2: complex = 0.0
    q1: complex = 0.0
    q0: complex = 0.0
    center: complex = 0.0
    label: str = field(default="", compare=False)

    def __post_init__(self):
        if self.h <= 0:
            raise ConfigError(f"semiclassical parameter h must be positive, got {self.h}")
        coeffs = np.atleast_1d(np.asarray(self.coeffs, dtype=complex))
        if coeffs.size == 0:
            coeffs = np.zeros(1, dtype=complex)
        object.__setattr__(self, "coeffs", coeffs)
        for name in ("q2", "q1", "q0", "center"):
            object.__setattr__(self, name, complex(getattr(self, name)))

    @classmethod
    def monomial(cls, k: int, h: float, q2: complex = 0.0, scale: complex = 1.0) -> "HoloFunction":
        coeffs = np.zeros(k + 1, dtype=complex)
        coeffs[k] = scale
        return cls(coeffs=coeffs, h=h, q2=q2, label=f"x^{k}")

    @classmethod
    def zero(cls, h: float) -> "HoloFunction":
        return cls(coeffs=np.zeros(1), h=h)

    @property
    def degree(self) -> int:
        nonzero = np.nonzero(self.coeffs)[0]
        return int(nonzero[-1]) if nonzero.size else 0

    @property
    def is_zero(self) -> bool:
        return not np.any(self.coeffs)

    def exponent(self, x: ArrayLike) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        return self.q2 * x * x + self.q1 * x + self.q0

    def polynomial(self, x: ArrayLike) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        return np.polynomial.polynomial.polyval(x - self.center, self.coeffs)

    def __call__(self, x: ArrayLike) -> np.ndarray:
        return self.polynomial(x) * np.exp(self.exponent(x) / self.h)

    def weighted(self, x: ArrayLike, phi: ArrayLike) -> np.ndarray:
        """u(x) exp(-phi(x)/h), with the exponentials combined before evaluation."""
        return self.polynomial(x) * np.exp((self.exponent(x) - np.asarray(phi)) / self.h)

    def same_exponent(self, other: "HoloFunction", tol: float = 1e-13) -> bool:
        return (abs(self.h - other.h) <= tol * self.h
                and abs(self.q2 - other.q2) <= tol * (1 + abs(self.q2))
                and abs(self.q1 - other.q1) <= tol * (1 + abs(self.q1))
                and abs(self.q0 - other.q0) <= tol * (1 + abs(self.q0)))

    def recenter(self, new_center: complex) -> "HoloFunction":
        coeffs = _recenter(self.coeffs, complex(new_center) - self.center)
        return replace(self, coeffs=coeffs, center=complex(new_center))

    def translate(self, z: complex) -> "HoloFunction":
        """x -> u(x - z)."""
        z = complex(z)
        return replace(
            self,
            center=self.center + z,
            q1=self.q1 - 2.0 * self.q2 * z,
            q0=self.q0 - self.q1 * z + self.q2 * z * z,
        )

    def multiply_exp(self, a2: complex = 0.0, a1: complex = 0.0, a0: complex = 0.0) -> "HoloFunction":
        """u(x) exp((a2 x^2 + a1 x + a0)/h)."""
        return replace(self, q2=self.q2 + a2, q1=self.q1 + a1, q0=self.q0 + a0)

    def multiply_polynomial(self, poly: Sequence[complex]) -> "HoloFunction":
        """u(x) r(x), r given by ascending coefficients in x."""
        local = _recenter(np.asarray(poly, dtype=complex), self.center)
        return replace(self, coeffs=np.polynomial.polynomial.polymul(self.coeffs, local))

    def times_x(self) -> "HoloFunction":
        return self.multiply_polynomial([0.0, 1.0])

    def scale(self, c: complex) -> "HoloFunction":
        return replace(self, coeffs=complex(c) * self.coeffs)

    def hD(self) -> "HoloFunction":
        """(h/i) du/dx, exact within the class."""
        y_linear = np.array([2.0 * self.q2 * self.center + self.q1, 2.0 * self.q2], dtype=complex)
        deriv = np.polynomial.polynomial.polyder(self.coeffs) if self.coeffs.size > 1 else np.zeros(1)
        tail = np.polynomial.polynomial.polymul(self.coeffs, y_linear)
        new = np.polynomial.polynomial.polyadd(self.h * np.asarray(deriv, dtype=complex), tail)
        return replace(self, coeffs=-1j * new)

    def __add__(self, other: "HoloFunction") -> "HoloFunction":
        if not self.same_exponent(other):
            raise ConfigError("HoloFunction sum requires identical exponents")
        aligned = other.recenter(self.center)
        return replace(self, coeffs=np.polynomial.polynomial.polyadd(self.coeffs, aligned.coeffs))

    def __sub__(self, other: "HoloFunction") -> "HoloFunction":
        return self + other.scale(-1.0)
