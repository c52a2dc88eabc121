#!/usr/bin/env python3
"""
Phase Space Module

Quadratic weights Phi0 on C^n, the I-Lagrangian plane Lambda_Phi0, the complex
symplectic form and complex linear forms that are real on Lambda_Phi0.

For n == 1 every function accepts complex arrays of any shape (one point per
entry). For n > 1 the last axis carries the coordinates.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Union

import numpy as np

from src.core.exceptions import ConfigError, OffLambdaError

logger = logging.getLogger(__name__)

ArrayLike = Union[complex, np.ndarray]

LAMBDA_TOLERANCE = 1e-10


@dataclass(frozen=True)
class QuadraticWeight:
    """Phi0(x) = Re(x^T Q x) + conj(x)^T L x with L Hermitian positive definite."""
    Q: np.ndarray
    L: np.ndarray
    name: str = "custom"

    def __post_init__(self):
        Q = np.atleast_2d(np.asarray(self.Q, dtype=complex))
        L = np.atleast_2d(np.asarray(self.L, dtype=complex))
        if Q.shape != L.shape or Q.shape[0] != Q.shape[1]:
            raise ConfigError(f"Q and L must be square matrices of equal size, got {Q.shape} and {L.shape}")
        if not np.allclose(Q, Q.T, atol=1e-14):
            raise ConfigError("Q must be complex symmetric")
        if not np.allclose(L, L.conj().T, atol=1e-14):
            raise ConfigError("L must be Hermitian")
        if np.min(np.linalg.eigvalsh(L)) <= 0.0:
            raise ConfigError("L must be positive definite (strict plurisubharmonicity)")
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "L", L)

    @property
    def n(self) -> int:
        return self.Q.shape[0]

    @property
    def q(self) -> complex:
        """Scalar Q for n == 1."""
        return complex(self.Q[0, 0])

    @property
    def l(self) -> float:
        """Scalar L for n == 1."""
        return float(self.L[0, 0].real)

    def _points(self, x: ArrayLike) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        if self.n == 1:
            return x[..., None]
        if x.shape[-1] != self.n:
            raise ConfigError(f"expected points with last axis {self.n}, got shape {x.shape}")
        return x

    def _unpoints(self, v: np.ndarray) -> np.ndarray:
        return v[..., 0] if self.n == 1 else v

    def value(self, x: ArrayLike) -> np.ndarray:
        """Phi0(x), real."""
        p = self._points(x)
        quad = np.einsum("...i,ij,...j->...", p, self.Q, p)
        herm = np.einsum("...i,ij,...j->...", p.conj(), self.L, p)
        return quad.real + herm.real

    def dx(self, x: ArrayLike) -> np.ndarray:
        """Holomorphic derivative dPhi0/dx = Q x + L^T conj(x)."""
        p = self._points(x)
        return self._unpoints(p @ self.Q.T + p.conj() @ self.L)

    def xi(self, x: ArrayLike) -> np.ndarray:
        """The fibre coordinate (2/i) dPhi0/dx of the point of Lambda above x."""
        return -2j * self.dx(x)

    def density(self) -> float:
        """Density of the symplectic volume of Lambda in pi_x coordinates."""
        return float(4.0 ** self.n * np.linalg.det(self.L).real)

    def levi_margin(self, q2: ArrayLike) -> float:
        """Smallest eigenvalue of L minus |Q - q2| (n == 1): positive iff Phi0 - Re(q2 x^2) is positive definite."""
        return self.l - float(np.max(np.abs(self.q - np.asarray(q2))))


@dataclass(frozen=True)
class PhasePoint:
    """A point (x, xi) of C^{2n}."""
    x: np.ndarray
    xi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", np.atleast_1d(np.asarray(self.x, dtype=complex)))
        object.__setattr__(self, "xi", np.atleast_1d(np.asarray(self.xi, dtype=complex)))

    def __add__(self, other: "PhasePoint") -> "PhasePoint":
        return PhasePoint(self.x + other.x, self.xi + other.xi)

    def __sub__(self, other: "PhasePoint") -> "PhasePoint":
        return PhasePoint(self.x - other.x, self.xi - other.xi)

    def __neg__(self) -> "PhasePoint":
        return PhasePoint(-self.x, -self.xi)

    def scale(self, c: float) -> "PhasePoint":
        return PhasePoint(c * self.x, c * self.xi)


def lift(x: ArrayLike, w: QuadraticWeight) -> PhasePoint:
    """The point of Lambda_Phi0 above x."""
    x = np.atleast_1d(np.asarray(x, dtype=complex))
    return PhasePoint(x, np.atleast_1d(w.xi(x if w.n > 1 else x[0])))


def on_lambda_residual(X: PhasePoint, w: QuadraticWeight) -> float:
    expected = np.atleast_1d(w.xi(X.x if w.n > 1 else X.x[0]))
    return float(np.max(np.abs(X.xi - expected)))


def is_on_lambda(X: PhasePoint, w: QuadraticWeight, tol: float = LAMBDA_TOLERANCE) -> bool:
    return on_lambda_residual(X, w) < tol


def sigma(U: PhasePoint, V: PhasePoint) -> complex:
    """sigma(U, V) = xi_U . x_V - x_U . xi_V."""
    return complex(np.dot(U.xi, V.x) - np.dot(U.x, V.xi))


def sigma_on_lambda(X: PhasePoint, Xs: PhasePoint, w: QuadraticWeight) -> float:
    """sigma restricted to Lambda_Phi0: -4 Im(conj(x*)^T L x)."""
    for point in (X, Xs):
        residual = on_lambda_residual(point, w)
        if residual > LAMBDA_TOLERANCE:
            raise OffLambdaError(f"point {point.x} is off Lambda (residual {residual:.3e})")
    return float(-4.0 * np.imag(Xs.x.conj() @ w.L @ X.x))


def sigma_lambda_coords(x: ArrayLike, y: ArrayLike, w: QuadraticWeight) -> np.ndarray:
    """Vectorized sigma(lift x, lift y) for n == 1 arrays, -4 L Im(conj(y) x)."""
    return -4.0 * w.l * np.imag(np.conj(y) * np.asarray(x))


@dataclass(frozen=True)
class LinearFormOnLambda:
    """l(x, xi) = ell_x . x + xstar . xi, real on Lambda_Phi0."""
    xstar: np.ndarray
    weight: QuadraticWeight
    ell_x: np.ndarray = field(init=False)

    def __post_init__(self):
        xstar = np.atleast_1d(np.asarray(self.xstar, dtype=complex))
        object.__setattr__(self, "xstar", xstar)
        object.__setattr__(self, "ell_x", -lift(xstar, self.weight).xi)

    @property
    def hamilton(self) -> PhasePoint:
        """H_l = (xstar, -ell_x), which lies on Lambda_Phi0."""
        return PhasePoint(self.xstar, -self.ell_x)

    def __call__(self, x: ArrayLike, xi: ArrayLike) -> np.ndarray:
        if self.weight.n == 1:
            return self.ell_x[0] * np.asarray(x) + self.xstar[0] * np.asarray(xi)
        return np.asarray(x) @ self.ell_x + np.asarray(xi) @ self.xstar

    def on_lambda(self, x: ArrayLike) -> np.ndarray:
        """Values on Lambda_Phi0 (real up to rounding) for points given by their x coordinate."""
        return np.real(self(x, self.weight.xi(x)))

    def __add__(self, other: "LinearFormOnLambda") -> "LinearFormOnLambda":
        return LinearFormOnLambda(self.xstar + other.xstar, self.weight)

    def scale(self, c: float) -> "LinearFormOnLambda":
        return LinearFormOnLambda(c * self.xstar, self.weight)


def linear_form(xstar: ArrayLike, w: QuadraticWeight) -> LinearFormOnLambda:
    return LinearFormOnLambda(xstar, w)


WEIGHT_PRESETS: Dict[str, Dict[str, complex]] = {
    # Phi0 = |x|^2 / 2
    "bargmann": {"Q": 0.0, "L": 0.5},
    # Phi0 = (Im x)^2 / 2
    "fbi": {"Q": -0.25, "L": 0.25},
}


def quadratic_weight(name: str) -> QuadraticWeight:
    if name not in WEIGHT_PRESETS:
        raise ConfigError(f"unknown weight preset '{name}', expected one of {sorted(WEIGHT_PRESETS)}")
    preset = WEIGHT_PRESETS[name]
    return QuadraticWeight(Q=np.array([[preset["Q"]]]), L=np.array([[preset["L"]]]), name=name)
