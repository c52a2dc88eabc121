#!/usr/bin/env python3
"""
Gaussian Integrals Module

Closed-form integrals over C of exp(E(z)) with E a (not necessarily
holomorphic) quadratic polynomial in (z, conj z), Gaussian marginalization,
and polynomial moments by the Wick recursion. These give exact weighted
inner products of HoloFunctions, Fourier transforms of Gaussian symbols and
matrix elements of magnetic translations.

Real coordinates are z = s + i t; the integral of exp(-v^T A v / 2 + b^T v + zeta)
over R^2 is 2 pi / sqrt(det A) exp(b^T A^{-1} b / 2 + zeta), with the square
root continued from the real positive definite case.
"""

import logging
from dataclasses import dataclass, replace
from typing import Tuple

import numpy as np

from src.bargmann.holo import HoloFunction
from src.core.exceptions import IntegrabilityError
from src.core.phase_space import QuadraticWeight

logger = logging.getLogger(__name__)

LOG_TWO_PI = float(np.log(2.0 * np.pi))


@dataclass(frozen=True)
class GaussianExponent:
    """E(z) = alpha z^2 + beta z zbar + gamma zbar^2 + delta z + eps zbar + zeta."""
    alpha: complex = 0.0
    beta: complex = 0.0
    gamma: complex = 0.0
    delta: complex = 0.0
    eps: complex = 0.0
    zeta: complex = 0.0

    def __call__(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        zb = z.conj()
        return (self.alpha * z * z + self.beta * z * zb + self.gamma * zb * zb
                + self.delta * z + self.eps * zb + self.zeta)

    def __add__(self, other: "GaussianExponent") -> "GaussianExponent":
        return GaussianExponent(
            self.alpha + other.alpha, self.beta + other.beta, self.gamma + other.gamma,
            self.delta + other.delta, self.eps + other.eps, self.zeta + other.zeta,
        )

    def conjugate(self) -> "GaussianExponent":
        """Exponent of conj(exp(E(z)))."""
        return GaussianExponent(
            np.conj(self.gamma), np.conj(self.beta), np.conj(self.alpha),
            np.conj(self.eps), np.conj(self.delta), np.conj(self.zeta),
        )

    def shifted(self, c: complex) -> "GaussianExponent":
        """Exponent of z -> E(z - c)."""
        c = complex(c)
        cb = c.conjugate()
        return GaussianExponent(
            alpha=self.alpha,
            beta=self.beta,
            gamma=self.gamma,
            delta=self.delta - 2.0 * self.alpha * c - self.beta * cb,
            eps=self.eps - self.beta * c - 2.0 * self.gamma * cb,
            zeta=(self.zeta + self.alpha * c * c + self.beta * c * cb + self.gamma * cb * cb
                  - self.delta * c - self.eps * cb),
        )

    def dilated(self, lam: float) -> "GaussianExponent":
        """Exponent of z -> E(z / lam), lam real."""
        return GaussianExponent(
            self.alpha / lam ** 2, self.beta / lam ** 2, self.gamma / lam ** 2,
            self.delta / lam, self.eps / lam, self.zeta,
        )

    def with_linear(self, delta: complex = 0.0, eps: complex = 0.0, zeta: complex = 0.0) -> "GaussianExponent":
        return replace(self, delta=self.delta + delta, eps=self.eps + eps, zeta=self.zeta + zeta)

    def real_form(self) -> Tuple[np.ndarray, np.ndarray]:
        """(A, b) with E(s + i t) = -v^T A v / 2 + b^T v + zeta."""
        a_ss = -2.0 * (self.alpha + self.beta + self.gamma)
        a_tt = 2.0 * (self.alpha - self.beta + self.gamma)
        a_st = -2.0j * (self.alpha - self.gamma)
        A = np.array([[a_ss, a_st], [a_st, a_tt]], dtype=complex)
        b = np.array([self.delta + self.eps, 1j * (self.delta - self.eps)], dtype=complex)
        return A, b


def check_integrable(A: np.ndarray, context: str = "Gaussian") -> None:
    real_part = np.real(A)
    smallest = float(np.min(np.linalg.eigvalsh(0.5 * (real_part + real_part.T))))
    if smallest <= 0.0:
        raise IntegrabilityError(
            f"{context} is not integrable: real part of the quadratic form has eigenvalue {smallest:.3e} <= 0"
        )


def log_sqrt_det(A: np.ndarray) -> complex:
    """log sqrt(det A), continued through the principal square roots of the eigenvalues."""
    eigenvalues = np.linalg.eigvals(A)
    return complex(0.5 * np.sum(np.log(eigenvalues.astype(complex))))


def log_gaussian_integral(E: GaussianExponent) -> complex:
    """log of the integral of exp(E) over C with respect to Lebesgue measure."""
    A, b = E.real_form()
    check_integrable(A)
    K = np.linalg.inv(A)
    return LOG_TWO_PI - log_sqrt_det(A) + 0.5 * complex(b @ K @ b) + complex(E.zeta)


def gaussian_integral(E: GaussianExponent) -> complex:
    return complex(np.exp(log_gaussian_integral(E)))


def marginalize(inner: GaussianExponent, cross: np.ndarray, outer: GaussianExponent) -> GaussianExponent:
    """
    Integrate out y from exp(inner(y) + l(x) y + m(x) ybar + outer(x)), where
    (l, m) = cross @ (x, xbar). Returns the resulting exponent in x.
    """
    cross = np.asarray(cross, dtype=complex)
    A, b0 = inner.real_form()
    check_integrable(A, "marginal Gaussian")
    K = np.linalg.inv(A)
    c11, c12 = cross[0]
    c21, c22 = cross[1]
    W = np.array([[c11 + c21, c12 + c22], [1j * (c11 - c21), 1j * (c12 - c22)]], dtype=complex)
    quad = W.T @ K @ W
    lin = b0 @ K @ W
    return outer + GaussianExponent(
        alpha=0.5 * quad[0, 0],
        beta=quad[0, 1],
        gamma=0.5 * quad[1, 1],
        delta=lin[0],
        eps=lin[1],
        zeta=0.5 * complex(b0 @ K @ b0) + complex(inner.zeta) + LOG_TWO_PI - log_sqrt_det(A),
    )


def wick_moment_table(A: np.ndarray, b: np.ndarray, shift_z: np.ndarray, shift_w: np.ndarray,
                      m_max: int, n_max: int) -> np.ndarray:
    """
    Normalized moments T[:, m, n] = E[(z - shift_z)^m (zbar - shift_w)^n] of the
    complex Gaussian with real form (A, b); b has shape (B, 2), shifts shape (B,).
    """
    K = np.linalg.inv(A)
    b = np.atleast_2d(b)
    mu = b @ K.T
    mu_z = mu[:, 0] + 1j * mu[:, 1] - np.asarray(shift_z)
    mu_w = mu[:, 0] - 1j * mu[:, 1] - np.asarray(shift_w)
    k_zz = K[0, 0] - K[1, 1] + 2j * K[0, 1]
    k_ww = K[0, 0] - K[1, 1] - 2j * K[0, 1]
    k_zw = K[0, 0] + K[1, 1]

    batch = b.shape[0]
    T = np.zeros((batch, m_max + 1, n_max + 1), dtype=complex)
    T[:, 0, 0] = 1.0
    for n in range(n_max):
        T[:, 0, n + 1] = mu_w * T[:, 0, n]
        if n > 0:
            T[:, 0, n + 1] += n * k_ww * T[:, 0, n - 1]
    n_index = np.arange(1, n_max + 1)
    for m in range(m_max):
        T[:, m + 1, :] = mu_z[:, None] * T[:, m, :]
        if m > 0:
            T[:, m + 1, :] += m * k_zz * T[:, m - 1, :]
        if n_max > 0:
            T[:, m + 1, 1:] += n_index * k_zw * T[:, m, :-1]
    return T


def pair_exponent(u: HoloFunction, v: HoloFunction, w: QuadraticWeight) -> GaussianExponent:
    """Exponent of u(x) conj(v(x)) exp(-2 Phi0(x)/h), polynomial parts excluded."""
    h = u.h
    return GaussianExponent(
        alpha=(u.q2 - w.q) / h,
        beta=-2.0 * w.l / h,
        gamma=(np.conj(v.q2) - np.conj(w.q)) / h,
        delta=u.q1 / h,
        eps=np.conj(v.q1) / h,
        zeta=(u.q0 + np.conj(v.q0)) / h,
    )


def gaussian_overlap(u: HoloFunction, v: HoloFunction, w: QuadraticWeight) -> complex:
    """(u, v) in H_Phi0, exact."""
    if u.is_zero or v.is_zero:
        return 0.0j
    E = pair_exponent(u, v, w)
    A, b = E.real_form()
    check_integrable(A, "weighted product of HoloFunctions")
    log_mass = log_gaussian_integral(E)
    T = wick_moment_table(A, b[None, :], np.array([u.center]), np.array([np.conj(v.center)]),
                          u.degree, v.degree)[0]
    moments = u.coeffs[: u.degree + 1] @ T @ np.conj(v.coeffs[: v.degree + 1])
    return complex(np.exp(log_mass) * moments)


def overlap_batch(q2u: complex, q1u: np.ndarray, q0u: np.ndarray, cu: np.ndarray, Cu: np.ndarray,
                  v: HoloFunction, Cv: np.ndarray, w: QuadraticWeight, h: float) -> np.ndarray:
    """
    Matrices M[b, j, k] = (u_k^b, v_j)_{H_Phi0} where the u_k^b share the exponent
    (q2u, q1u[b], q0u[b]) and center cu[b] with polynomial coefficients Cu[:, k],
    and the v_j share the exponent and center of `v` with coefficients Cv[:, j].
    """
    q1u = np.atleast_1d(np.asarray(q1u, dtype=complex))
    q0u = np.atleast_1d(np.asarray(q0u, dtype=complex))
    cu = np.atleast_1d(np.asarray(cu, dtype=complex))
    E = GaussianExponent(
        alpha=(q2u - w.q) / h,
        beta=-2.0 * w.l / h,
        gamma=(np.conj(v.q2) - np.conj(w.q)) / h,
    )
    A, _ = E.real_form()
    check_integrable(A, "weighted product of translated basis functions")
    K = np.linalg.inv(A)
    delta = q1u / h
    eps = np.conj(v.q1) / h
    zeta = (q0u + np.conj(v.q0)) / h
    b = np.stack([delta + eps, 1j * (delta - eps)], axis=1)
    log_mass = LOG_TWO_PI - log_sqrt_det(A) + 0.5 * np.einsum("bi,ij,bj->b", b, K, b) + zeta
    T = wick_moment_table(A, b, cu, np.full(cu.shape, np.conj(v.center)), Cu.shape[0] - 1, Cv.shape[0] - 1)
    M = np.einsum("nj,bmn,mk->bjk", np.conj(Cv), T, Cu, optimize=True)
    return np.exp(log_mass)[:, None, None] * M
