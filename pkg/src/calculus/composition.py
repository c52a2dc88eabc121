#!/usr/bin/env python3
"""
Weyl Composition Module

The symbol c = a # b of Op(a) Op(b) on Lambda_Phi0, by two independent routes:

    direct:   c(X) = (pi h)^{-2} rho^2 int int exp(-2 i sigma(Y, Z)/h) a(X + Y) b(X + Z) dY dZ
    fourier:  c(X) = (pi h)^{-1} (a *_sigma F_h b)(X)

plus the exact rules for plane waves and the closed form for Gaussian pairs.
"""

import logging
import math
from enum import Enum
from typing import Optional

import numpy as np

from src.bargmann.bargmann_core import QuadRule
from src.calculus.fourier import (
    check_oscillation,
    closed_form,
    effective_radius,
    fourier_gaussian,
    fourier_prefactor,
    fourier_values,
    twisted_convolution_at,
    twisted_convolution_gaussian,
)
from src.calculus.symbols import GaussianSymbol, GridSampledSymbol, ModulatedSymbol, Symbol
from src.core.exceptions import ConfigError, UnsupportedSymbolError
from src.core.phase_space import LinearFormOnLambda

logger = logging.getLogger(__name__)


class Side(str, Enum):
    LEFT = "left"
    RIGHT = "right"


def compose_direct(a: Symbol, b: Symbol, x: complex, rule: QuadRule) -> complex:
    """
    a # b at the point of Lambda_Phi0 above x; `rule` is the offset grid for Y and Z.

    One factor may be bounded but not integrable (a plane wave): the finite double sum then
    pairs it with the sampled transform of the integrable factor.
    """
    if not (a.integrable or b.integrable):
        raise UnsupportedSymbolError(
            f"direct composition needs at least one integrable factor, got {a.label} and {b.label}"
        )
    w, h = a.weight, a.h
    x = complex(x)
    c = 8.0 * w.l / h
    offsets = rule.grid - rule.center
    A = rule.grid_weights * a(x + offsets)
    B = rule.grid_weights * b(x + offsets)
    reach = max(effective_radius(A, offsets), effective_radius(B, offsets))
    check_oscillation(h, w, rule, reach, "direct composition")
    axis = rule.axis
    R = np.exp(-1j * c * np.outer(axis, axis))
    P = np.exp(1j * c * np.outer(axis, axis))
    # D[i, j] = sum_{p, q} exp(i c (zs_p yt_j - zt_q ys_i)) B[p, q]
    D = R @ (P @ B).T
    return complex(fourier_prefactor(w, h) ** 2 * np.sum(A * D))


def compose_direct_at(a: Symbol, b: Symbol, x: np.ndarray, rule: QuadRule) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=complex))
    return np.array([compose_direct(a, b, xi, rule) for xi in x.ravel()]).reshape(x.shape)


def compose_fourier_at(a: Symbol, b: Symbol, x: np.ndarray, y_rule: QuadRule,
                       b_rule: Optional[QuadRule] = None) -> np.ndarray:
    """(pi h)^{-1} rho int exp(2 i sigma(X, Y)/h) a(X - Y) F_h b(Y) dY at the points x."""
    if not b.integrable:
        raise UnsupportedSymbolError(f"Fourier-side composition needs an integrable right factor, got {b.label}")
    w, h = a.weight, a.h
    x = np.atleast_1d(np.asarray(x, dtype=complex))
    fb = fourier_values(b, y_rule, b_rule)
    reach = float(np.max(np.abs(x)))
    check_oscillation(h, w, y_rule, reach, "Fourier-side composition")
    values = twisted_convolution_at(a, b, x, y_rule, v_values=fb)
    return values / (math.pi * h)


def compose_fourier(a: Symbol, b: Symbol, rule: QuadRule, y_rule: QuadRule,
                    b_rule: Optional[QuadRule] = None) -> Symbol:
    """a # b; closed form for Gaussian pairs, otherwise sampled on `rule`."""
    ga, gb = closed_form(a), closed_form(b)
    if ga is not None and gb is not None:
        return compose_gaussian(ga, gb)
    values = compose_fourier_at(a, b, rule.grid, y_rule, b_rule)
    return GridSampledSymbol(a.weight, a.h, rule=rule, values=values, name=f"{a.label}#{b.label}")


def compose_gaussian(a: GaussianSymbol, b: GaussianSymbol) -> GaussianSymbol:
    """Exact a # b for pure Gaussians."""
    if a.h != b.h:
        raise ConfigError(f"cannot compose symbols with h={a.h} and h={b.h}")
    c = twisted_convolution_gaussian(a, fourier_gaussian(b))
    exponent = c.exponent.with_linear(zeta=-math.log(math.pi * a.h))
    return GaussianSymbol(a.weight, a.h, exponent, name=f"{a.name}#{b.name}")


def compose_plane_wave(form: LinearFormOnLambda, a: Symbol, side: Side = Side.LEFT, h: Optional[float] = None) -> Symbol:
    """
    exp(i l/h) # a = exp(i l(X)/h) a(X + H_l/2) and a # exp(i l/h) = exp(i l(X)/h) a(X - H_l/2);
    H_l lies above x*.
    """
    side = Side(side)
    xs = complex(form.xstar[0])
    if xs == 0 and not np.any(form.ell_x):
        return a
    shift = 0.5 * xs if side is Side.LEFT else -0.5 * xs
    return ModulatedSymbol(a.weight, a.h if h is None else h, form=form, base=a, shift=shift)
