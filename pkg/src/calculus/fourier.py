#!/usr/bin/env python3
"""
Symplectic Fourier Transform Module

    F_h a(X) = (pi h)^{-1} rho * int exp(2 i sigma(X, Y)/h) a(Y) dA(y)

over Lambda_Phi0 in pi_x coordinates, rho = 4L the symplectic density. With
this normalization F_h is an involution and exp(-|X|^2/h) is its fixed point.
Pure Gaussians transform in closed form; everything else goes through a
separable tensor quadrature on QuadRule grids.
"""

import logging
import math
import warnings
from typing import Callable, Optional

import numpy as np
from scipy.special import j0, roots_legendre

from src.bargmann.bargmann_core import QuadRule
from src.bargmann.gaussian_integrals import GaussianExponent, marginalize
from src.calculus.symbols import (
    GaussianSymbol,
    GridSampledSymbol,
    ModulatedSymbol,
    Symbol,
    WindowedSymbol,
)
from src.core.exceptions import ConfigError, OscillationWarning, UnsupportedSymbolError
from src.core.phase_space import QuadraticWeight, sigma_lambda_coords

logger = logging.getLogger(__name__)

MIN_POINTS_PER_WAVELENGTH = 6.0


def fourier_prefactor(w: QuadraticWeight, h: float) -> float:
    return w.density() / (math.pi * h)


def points_per_wavelength(h: float, w: QuadraticWeight, rule: QuadRule, reach: float) -> float:
    """Samples per period of exp(2 i sigma(X, Y)/h) in Y when |X| <= reach."""
    if reach <= 0:
        return math.inf
    return math.pi * h * (rule.M - 1) / (8.0 * w.l * rule.R * reach)


def check_oscillation(h: float, w: QuadraticWeight, rule: QuadRule, reach: float, context: str) -> float:
    ppw = points_per_wavelength(h, w, rule, reach)
    if ppw < MIN_POINTS_PER_WAVELENGTH:
        needed = int(math.ceil(MIN_POINTS_PER_WAVELENGTH * (rule.M - 1) / ppw)) + 1
        message = (f"{context}: {ppw:.2f} grid points per oscillation wavelength at h={h} "
                   f"(M={rule.M}, R={rule.R:g}, reach={reach:.3g}); raise M to about {needed}")
        logger.warning(message)
        warnings.warn(message, OscillationWarning, stacklevel=3)
    return ppw


def effective_radius(values: np.ndarray, offsets: np.ndarray, tol: float = 1e-3) -> float:
    """Largest |offset| where |values| exceeds tol times its maximum."""
    magnitude = np.abs(values)
    peak = float(np.max(magnitude)) if magnitude.size else 0.0
    if peak == 0.0:
        return 0.0
    return float(np.max(np.abs(offsets[magnitude > tol * peak])))


def fourier_gaussian(a: GaussianSymbol) -> GaussianSymbol:
    """Closed-form F_h of a pure Gaussian symbol."""
    if not a.is_pure:
        raise UnsupportedSymbolError("closed-form Fourier transform needs a pure Gaussian")
    w, h = a.weight, a.h
    c = 4.0 * w.l / h
    cross = np.array([[0.0, c], [-c, 0.0]])
    outer = GaussianExponent(zeta=math.log(fourier_prefactor(w, h)))
    return GaussianSymbol(w, h, marginalize(a.exponent, cross, outer), name=f"F[{a.name}]")


def closed_form(a: Symbol) -> Optional[GaussianSymbol]:
    """The pure-Gaussian form of a symbol when it has one."""
    if isinstance(a, GaussianSymbol) and a.is_pure:
        return a
    if isinstance(a, WindowedSymbol):
        return a.closed_form()
    if isinstance(a, ModulatedSymbol) and isinstance(a.base, GaussianSymbol) and a.base.is_pure:
        return a.as_gaussian()
    return None


def fourier_grid(values: np.ndarray, src: QuadRule, dst: QuadRule, w: QuadraticWeight, h: float) -> np.ndarray:
    """F_h of grid samples on `src`, evaluated on the nodes of `dst`."""
    c = 8.0 * w.l / h
    ys = src.center.real + src.axis
    yt = src.center.imag + src.axis
    xs = dst.center.real + dst.axis
    xt = dst.center.imag + dst.axis
    P = np.exp(1j * c * np.outer(xs, yt))
    R = np.exp(-1j * c * np.outer(xt, ys))
    B = src.grid_weights * values
    return fourier_prefactor(w, h) * (P @ (R @ B).T)


def fourier_values(a: Symbol, dst: QuadRule, src: Optional[QuadRule] = None) -> np.ndarray:
    """F_h a sampled on `dst`; closed form when available, else grid quadrature on `src`."""
    exact = closed_form(a)
    if exact is not None:
        return fourier_gaussian(exact)(dst.grid)
    if not a.integrable:
        raise UnsupportedSymbolError(f"{a.label} symbols are not integrable; F_h is undefined as an integral")
    if src is None:
        raise ConfigError(f"Fourier transform of a {a.label} symbol needs a quadrature rule")
    reach = float(np.max(np.abs(dst.grid)))
    check_oscillation(a.h, a.weight, src, reach, f"F_h of {a.label}")
    return fourier_grid(a.sample(src), src, dst, a.weight, a.h)


def fourier_symplectic(a: Symbol, rule: Optional[QuadRule] = None, out_rule: Optional[QuadRule] = None) -> Symbol:
    exact = closed_form(a)
    if exact is not None:
        return fourier_gaussian(exact)
    if not a.integrable:
        raise UnsupportedSymbolError(f"F_h is not defined on {a.label} symbols")
    if rule is None:
        raise ConfigError(f"Fourier transform of a {a.label} symbol needs a quadrature rule")
    out_rule = out_rule or rule
    values = fourier_values(a, out_rule, rule)
    return GridSampledSymbol(a.weight, a.h, rule=out_rule, values=values, name=f"F[{a.label}]")


def fourier_radial(profile: Callable[[np.ndarray], np.ndarray], radii: np.ndarray, h: float,
                   support: float, nodes: Optional[int] = None) -> np.ndarray:
    """
    F_h of a radial symbol a(|X_r|) supported in |X_r| < support, as a function of |X_r|:
    (2/h) int_0^support a(r) J0(2 R r/h) r dr.
    """
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    if not math.isfinite(support) or support <= 0:
        raise ConfigError(f"radial Fourier transform needs a finite positive support, got {support}")
    if nodes is None:
        # a few nodes per period of J0 at the largest radius
        nodes = int(4.0 * float(np.max(radii)) * support / (math.pi * h)) + 400
    t, wt = roots_legendre(nodes)
    r = 0.5 * support * (t + 1.0)
    wt = 0.5 * support * wt
    a = np.asarray(profile(r), dtype=complex)
    kernel = j0(2.0 * np.outer(radii, r) / h)
    return (2.0 / h) * (kernel @ (wt * a * r))


def twisted_convolution_gaussian(u: GaussianSymbol, v: GaussianSymbol) -> GaussianSymbol:
    """Closed-form u *_sigma v for pure Gaussians."""
    if not (u.is_pure and v.is_pure):
        raise UnsupportedSymbolError("closed-form twisted convolution needs pure Gaussians")
    w, h = u.weight, u.h
    e = u.exponent
    c = 4.0 * w.l / h
    inner = GaussianExponent(e.alpha, e.beta, e.gamma, -e.delta, -e.eps) + v.exponent
    cross = np.array([[-2.0 * e.alpha, -e.beta + c], [-e.beta - c, -2.0 * e.gamma]])
    outer = e.with_linear(zeta=math.log(w.density()))
    return GaussianSymbol(w, h, marginalize(inner, cross, outer), name=f"{u.name}*{v.name}")


def twisted_convolution_at(u: Symbol, v: Symbol, x: np.ndarray, rule: QuadRule,
                           v_values: Optional[np.ndarray] = None, chunk: int = 64) -> np.ndarray:
    """(u *_sigma v)(X) = rho * int exp(2 i sigma(X, Y)/h) u(X - Y) v(Y) dA(y) at the points x."""
    w, h = u.weight, u.h
    x = np.atleast_1d(np.asarray(x, dtype=complex))
    y = rule.points
    vw = rule.weights * (v(y) if v_values is None else np.asarray(v_values).ravel())
    out = np.empty(x.size, dtype=complex)
    flat = x.ravel()
    for start in range(0, flat.size, chunk):
        xc = flat[start:start + chunk, None]
        phase = np.exp(2j * sigma_lambda_coords(xc, y[None, :], w) / h)
        out[start:start + chunk] = (phase * u(xc - y[None, :])) @ vw
    return w.density() * out.reshape(x.shape)


def twisted_convolution(u: Symbol, v: Symbol, rule: QuadRule, out_rule: Optional[QuadRule] = None) -> Symbol:
    for factor in (u, v):
        if not factor.integrable:
            raise UnsupportedSymbolError(f"twisted convolution needs integrable factors, got {factor.label}")
    out_rule = out_rule or rule
    reach = float(np.max(np.abs(out_rule.grid)))
    check_oscillation(u.h, u.weight, rule, reach, "twisted convolution")
    values = twisted_convolution_at(u, v, out_rule.grid, rule)
    return GridSampledSymbol(u.weight, u.h, rule=out_rule, values=values, name=f"{u.label}*{v.label}")
