#!/usr/bin/env python3
"""
Rank-One Decomposition Module

Op(a) written as a superposition of rank-one operators. With
chi_T(X) = chi0(X - T), chi0(X) = 2 exp(-|X|^2), and the windowed plane waves
b_{Y,T}(X) = exp(2 i sigma(X, Y)/h) chi0((X - T)/h^{1/2}),

    a = M(h)^{-1} (pi h)^{-1} rho^2 int int F_h(chi_T a)(Y) b_{Y,T} dY dT,
    Op(b_{Y,T}) u = exp(i sigma(T, Y)/h) (u, U(-(Y+T)) v0) U(Y-T) v0,

where U(Z) = exp(i sigma((x, hD), Z)/h) and M(h) = rho int chi0(X) chi0(X/h^{1/2}) dX.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.bargmann.bargmann_core import OrthonormalBasis, QuadRule
from src.bargmann.gaussian_integrals import overlap_batch
from src.bargmann.holo import HoloFunction
from src.bargmann.magnetic import translated_exponents, translation_matrices
from src.calculus.fourier import fourier_values
from src.calculus.quantization import OperatorMatrix
from src.calculus.symbols import Symbol, WindowedSymbol, window_symbol
from src.core.exceptions import ConditioningError, ConfigError
from src.core.phase_space import QuadraticWeight, sigma_lambda_coords

logger = logging.getLogger(__name__)

TRUNCATION = 1e-10
MASS_FLOOR = 1e-12


@dataclass(frozen=True)
class MassResult:
    numeric: float
    closed_form: float
    h: float

    @property
    def over_h(self) -> float:
        return self.numeric / self.h


def decomposition_mass(w: QuadraticWeight, h: float, rule: Optional[QuadRule] = None) -> MassResult:
    """M(h) by quadrature, with the closed form 4 pi h / (1 + h) of the Gaussian window."""
    rule = rule or QuadRule(R=math.sqrt(10.0 / w.l), M=201)
    x = rule.grid
    window = window_symbol(w, h)
    numeric = w.density() * rule.integrate(window(x) * window(x / math.sqrt(h))).real
    return MassResult(numeric=numeric, closed_form=4.0 * math.pi * h / (1.0 + h), h=h)


def coherent_values(z: np.ndarray, basis: OrthonormalBasis, chunk: int = 4096) -> np.ndarray:
    """G[i, j] = (U(z_i) e_0, e_j)."""
    w = basis.weight.base
    z = np.atleast_1d(np.asarray(z, dtype=complex)).ravel()
    out = np.empty((z.size, basis.size), dtype=complex)
    for start in range(0, z.size, chunk):
        sl = slice(start, start + chunk)
        out[sl] = translation_matrices(w.xi(z[sl]), -z[sl], basis, columns=1)[:, :, 0]
    return out


def rank_one_term(y: complex, t: complex, basis: OrthonormalBasis) -> np.ndarray:
    """Matrix of Op(b_{Y,T}): exp(i sigma(T, Y)/h) G(Y - T) F(Y + T)^T with F_k(Z) = conj(G_k(-Z))."""
    w = basis.weight.base
    G = coherent_values(np.array([y - t, -(y + t)]), basis)
    phase = np.exp(1j * sigma_lambda_coords(t, y, w) / basis.h)
    return phase * np.outer(G[0], G[1].conj())


def _lattice_steps(y_rule: QuadRule, t_rule: QuadRule) -> int:
    if y_rule.M % 2 == 0 or t_rule.M % 2 == 0:
        raise ConfigError("rank-one decomposition needs odd grid sizes so that Y and T share the lattice origin")
    if y_rule.center != 0 or t_rule.center != 0:
        raise ConfigError("rank-one decomposition grids must be centered at the origin")
    ratio = t_rule.spacing / y_rule.spacing
    steps = int(round(ratio))
    if steps < 1 or abs(ratio - steps) > 1e-9 * ratio:
        raise ConfigError(
            f"window/lattice mismatch: T spacing {t_rule.spacing:.6g} is not a multiple of Y spacing {y_rule.spacing:.6g}"
        )
    return steps


@dataclass
class DecompositionResult:
    matrix: OperatorMatrix
    mass: MassResult
    windows_used: int
    windows_total: int
    terms_used: int


def _windowed_transform_values(a: Symbol, t: complex, y_rule: QuadRule, symbol_rule: Optional[QuadRule]) -> np.ndarray:
    return fourier_values(WindowedSymbol(a.weight, a.h, window=window_symbol(a.weight, a.h, t), base=a),
                          y_rule, symbol_rule)


def rank_one_decomposition(a: Symbol, basis: OrthonormalBasis, y_rule: QuadRule, t_rule: QuadRule,
                           symbol_rule: Optional[QuadRule] = None, truncation: float = TRUNCATION) -> DecompositionResult:
    """M(h) Op(a) assembled from rank-one terms over (Y, T), divided by the numerical M(h)."""
    if not basis.weight.is_quadratic:
        raise ConfigError("rank-one decomposition is assembled in the Phi0 basis")
    w, h = basis.weight.base, basis.h
    steps = _lattice_steps(y_rule, t_rule)
    mass = decomposition_mass(w, h)
    if mass.numeric < MASS_FLOOR:
        raise ConditioningError(f"M(h) = {mass.numeric:.3e} is below {MASS_FLOOR:.0e} at h={h}")

    t_points = t_rule.points
    peaks = np.array([np.max(np.abs(_windowed_transform_values(a, t, y_rule, symbol_rule))) for t in t_points])
    top = float(np.max(peaks))
    kept = np.nonzero(peaks >= truncation * top)[0]
    logger.info(f"Rank-one decomposition at h={h}: {kept.size}/{t_points.size} windows above {truncation:.0e}")

    # Y - T and -(Y + T) lie on the Y lattice; tabulate G there once
    m_y = (y_rule.M - 1) // 2
    m_t = (t_rule.M - 1) // 2
    t_index = np.stack(np.unravel_index(kept, (t_rule.M, t_rule.M)), axis=1) - m_t
    reach = m_y + steps * int(np.max(np.abs(t_index))) if kept.size else m_y
    side = np.arange(-reach, reach + 1)
    lattice = y_rule.spacing * (side[:, None] + 1j * side[None, :])
    table = coherent_values(lattice, basis).reshape(side.size, side.size, basis.size)

    y_index = np.stack(np.meshgrid(np.arange(y_rule.M), np.arange(y_rule.M), indexing="ij"), axis=-1).reshape(-1, 2) - m_y
    y_points = y_rule.points
    y_weights = y_rule.weights
    t_weights = t_rule.weights
    entries = np.zeros((basis.size, basis.size), dtype=complex)
    terms = 0
    for idx, (i_s, i_t) in zip(kept, t_index):
        t = t_points[idx]
        values = _windowed_transform_values(a, t, y_rule, symbol_rule).ravel()
        mask = np.abs(values) >= truncation * top
        if not np.any(mask):
            continue
        coef = (t_weights[idx] * y_weights[mask] * values[mask]
                * np.exp(1j * sigma_lambda_coords(t, y_points[mask], w) / h))
        yi = y_index[mask]
        minus = table[yi[:, 0] - steps * i_s + reach, yi[:, 1] - steps * i_t + reach]
        plus = table[-(yi[:, 0] + steps * i_s) + reach, -(yi[:, 1] + steps * i_t) + reach]
        entries += (minus * coef[:, None]).T @ plus.conj()
        terms += int(mask.sum())
    prefactor = w.density() ** 2 / (math.pi * h) / mass.numeric
    matrix = OperatorMatrix(prefactor * entries, basis, "rank_one", a.label)
    return DecompositionResult(matrix=matrix, mass=mass, windows_used=int(kept.size),
                               windows_total=int(t_points.size), terms_used=terms)


@dataclass(frozen=True)
class CoherentCoefficients:
    values: np.ndarray
    l2_norm: float
    h: float

    @property
    def scaled_norm(self) -> float:
        """||F|| / h^{1/2}; sqrt(2 pi) for a unit vector."""
        return self.l2_norm / math.sqrt(self.h)


def coherent_coefficients(u: HoloFunction, basis: OrthonormalBasis, t_rule: QuadRule) -> CoherentCoefficients:
    """F(T) = (u, U(T) v0) over the T grid, and its L2 norm with respect to the symplectic volume."""
    w = basis.weight.base
    h = basis.h
    t = t_rule.points
    e0 = basis.function(0)
    q1, q0 = translated_exponents(w, w.xi(t), -t)
    inner = overlap_batch(w.q, q1, q0, -t, e0.coeffs[:1, None], u, u.coeffs[:, None], w, h)[:, 0, 0]
    values = np.conj(inner).reshape(t_rule.grid.shape)
    l2 = math.sqrt(w.density() * t_rule.integrate(np.abs(values) ** 2).real)
    return CoherentCoefficients(values=values, l2_norm=l2, h=h)
