#!/usr/bin/env python3
"""
Gevrey Module

Compactly supported Gevrey-s bumps, the lattice partition of unity they
generate, windowed symplectic Fourier transforms, and stretched-exponential
fits A r^-beta exp(-r^rho / C) of the windowed-transform envelope. Windows live on the real
phase-space coordinates X_r of Lambda_Phi0.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from typing import ClassVar, List, Optional, Sequence

import numpy as np
from scipy.optimize import lsq_linear, minimize_scalar

from src.bargmann.bargmann_core import QuadRule
from src.calculus.fourier import fourier_symplectic
from src.calculus.symbols import (
    Symbol,
    SymbolKind,
    WindowedSymbol,
    from_real_coordinates,
    gaussian_symbol,
    real_coordinates,
)
from src.core.exceptions import ConfigError, FitError
from src.core.phase_space import QuadraticWeight

logger = logging.getLogger(__name__)

MIN_SAMPLES = 8
MISMATCH_RHO = 0.99
MISMATCH_RHO_LOW = 0.1
MISMATCH_RESIDUAL = 0.5
# relative to the zero-frequency peak
FIT_WINDOW = (1e-10, 1e-1)
RHO_RANGE = (0.05, 1.0)
RHO_SCAN = 96
EXPONENTIAL_SHARE = 0.25
INVERSE_S_BAND = (0.8, 1.2)
WINDOW_AGREEMENT = 0.05
FREQUENCY_STEP = 0.5
MAX_AXIS_POINTS = 2001
GAUSSIAN_WINDOW_HALF_WIDTH = 5.0


@dataclass(frozen=True)
class GevreyBump:
    """amplitude * exp(-(1 - |t/r|^2)^{-1/(s-1)}) for |t| < r, t = p - center in R^2."""
    s: float
    r: float = 1.0
    center: tuple = (0.0, 0.0)
    amplitude: float = 1.0

    def __post_init__(self):
        if self.s <= 1:
            raise ConfigError(f"Gevrey index s must exceed 1, got {self.s}")
        if self.r <= 0:
            raise ConfigError(f"bump support radius must be positive, got {self.r}")

    def profile(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        u = 1.0 - (t / self.r) ** 2
        inside = u > 0
        out = np.zeros(t.shape)
        out[inside] = self.amplitude * np.exp(-u[inside] ** (-1.0 / (self.s - 1.0)))
        return out

    def __call__(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        return self.profile(np.hypot(p[..., 0] - self.center[0], p[..., 1] - self.center[1]))


def gevrey_bump(s: float, r: float = 1.0, center=(0.0, 0.0), amplitude: float = 1.0) -> GevreyBump:
    return GevreyBump(s=s, r=r, center=tuple(float(c) for c in center), amplitude=amplitude)


@dataclass(frozen=True)
class GevreyBumpSymbol(Symbol):
    bump: GevreyBump = None

    kind: ClassVar[SymbolKind] = SymbolKind.GEVREY_BUMP

    @property
    def support(self) -> float:
        return self.bump.r + math.hypot(*self.bump.center)

    def __call__(self, x) -> np.ndarray:
        return self.bump(real_coordinates(x, self.weight)).astype(complex)

    def radial_profile(self):
        if self.bump.center != (0.0, 0.0):
            return None
        return self.bump.profile

    @property
    def label(self) -> str:
        return f"bump_s{self.bump.s:g}"


def bump_symbol(w: QuadraticWeight, h: float, s: float, r: float = 1.0) -> GevreyBumpSymbol:
    return GevreyBumpSymbol(w, h, bump=gevrey_bump(s, r))


@dataclass
class LatticePartition:
    """chi_j(p) = chi0(p - B j), chi0 = psi / sum_j psi(. - B j) with psi a Gevrey bump."""
    bump: GevreyBump
    basis: np.ndarray = field(default_factory=lambda: np.eye(2))

    def __post_init__(self):
        self.basis = np.asarray(self.basis, dtype=float)
        if self.basis.shape != (2, 2) or abs(np.linalg.det(self.basis)) < 1e-12:
            raise ConfigError("lattice basis must be an invertible 2x2 matrix")
        covering = self.covering_radius()
        if self.bump.r <= covering:
            raise ConfigError(
                f"bump radius {self.bump.r:g} does not exceed the lattice covering radius {covering:.4f}; "
                "the partition denominator would vanish"
            )
        self.reach = int(math.ceil(self.bump.r * np.linalg.norm(np.linalg.inv(self.basis), 2))) + 1

    def covering_radius(self, samples: int = 41) -> float:
        """Largest distance from a point of the fundamental cell to the lattice."""
        u = np.linspace(0.0, 1.0, samples)
        cell = np.stack(np.meshgrid(u, u, indexing="ij"), axis=-1).reshape(-1, 2) @ self.basis.T
        corners = np.array([[0, 0], [1, 0], [0, 1], [1, 1]]) @ self.basis.T
        d = np.linalg.norm(cell[:, None, :] - corners[None, :, :], axis=-1).min(axis=1)
        return float(d.max())

    def _psi(self, p: np.ndarray) -> np.ndarray:
        return self.bump.profile(np.linalg.norm(p, axis=-1))

    def denominator(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        k = np.rint(p @ np.linalg.inv(self.basis).T)
        total = np.zeros(p.shape[:-1])
        for i in range(-self.reach, self.reach + 1):
            for j in range(-self.reach, self.reach + 1):
                shift = (k + np.array([i, j])) @ self.basis.T
                total += self._psi(p - shift)
        return total

    def chi(self, p, j=(0, 0)) -> np.ndarray:
        p = np.asarray(p, dtype=float) - np.asarray(j, dtype=float) @ self.basis.T
        numerator = self._psi(p)
        out = np.zeros(numerator.shape)
        inside = numerator > 0
        out[inside] = numerator[inside] / self.denominator(p[inside])
        return out

    def total(self, p) -> np.ndarray:
        """sum_j chi_j(p) over the translates that can reach p."""
        p = np.asarray(p, dtype=float)
        k = np.rint(p @ np.linalg.inv(self.basis).T)
        total = np.zeros(p.shape[:-1])
        for i in range(-self.reach, self.reach + 1):
            for j in range(-self.reach, self.reach + 1):
                total += self.chi(p - (k + np.array([i, j])) @ self.basis.T)
        return total


def partition_of_unity(s: float, r: float = 1.0, lattice: Optional[np.ndarray] = None) -> LatticePartition:
    return LatticePartition(bump=gevrey_bump(s, r), basis=np.eye(2) if lattice is None else lattice)


def gaussian_window(p) -> np.ndarray:
    """(2/pi)^{1/2} exp(-|p|^2)."""
    p = np.asarray(p, dtype=float)
    return math.sqrt(2.0 / math.pi) * np.exp(-np.sum(p * p, axis=-1))


@dataclass(frozen=True)
class PartitionWindowSymbol(Symbol):
    """chi0(X_r - T_r) for a lattice partition."""
    partition: LatticePartition = None
    t: complex = 0.0

    kind: ClassVar[SymbolKind] = SymbolKind.GEVREY_BUMP

    def __call__(self, x) -> np.ndarray:
        p = real_coordinates(np.asarray(x, dtype=complex) - self.t, self.weight)
        return self.partition.chi(p).astype(complex)


def window_on_lambda(w: QuadraticWeight, h: float, t: complex, window: str,
                     partition: Optional[LatticePartition] = None) -> Symbol:
    if window == "gaussian":
        return gaussian_symbol(w, h, rate=1.0, center=t, amplitude=math.sqrt(2.0 / math.pi), name="gaussian_window")
    if window == "gevrey":
        if partition is None:
            raise ConfigError("a Gevrey window needs a lattice partition")
        return PartitionWindowSymbol(w, h, partition=partition, t=t)
    raise ConfigError(f"unknown window '{window}', expected 'gaussian' or 'gevrey'")


def windowed_transform(a: Symbol, t: complex, window: str = "gaussian", rule: Optional[QuadRule] = None,
                       out_rule: Optional[QuadRule] = None, partition: Optional[LatticePartition] = None) -> Symbol:
    """F_h(chi_T a)."""
    chi = window_on_lambda(a.weight, a.h, t, window, partition)
    return fourier_symplectic(WindowedSymbol(a.weight, a.h, window=chi, base=a), rule, out_rule)


@dataclass(frozen=True)
class DecaySamples:
    """Envelope of sup_T |F(chi_T a)| at the requested radii; NaN beyond the grid's frequency cap."""
    radii: np.ndarray
    moduli: np.ndarray
    window: str
    t_grid: int
    peak: float = math.nan
    spacing: float = math.nan

    @property
    def reference(self) -> float:
        if math.isfinite(self.peak) and self.peak > 0:
            return self.peak
        finite = self.moduli[np.isfinite(self.moduli)]
        return float(finite.max()) if finite.size else math.nan

    def in_window(self, lo: float = FIT_WINDOW[0], hi: float = FIT_WINDOW[1]) -> "DecaySamples":
        """Samples whose modulus relative to the zero-frequency peak lies in [lo, hi]."""
        ref = self.reference
        with np.errstate(invalid="ignore"):
            keep = np.isfinite(self.moduli) & (self.moduli >= lo * ref) & (self.moduli <= hi * ref)
        return replace(self, radii=self.radii[keep], moduli=self.moduli[keep])

    def below_floor(self, lo: float = FIT_WINDOW[0]) -> bool:
        """True when the envelope drops under the fitting floor inside the sampled radii."""
        finite = self.moduli[np.isfinite(self.moduli)]
        return bool(finite.size and np.any(finite < lo * self.reference))


def _axis(half: float, spacing: float) -> np.ndarray:
    n = int(math.ceil(2.0 * half / spacing)) + 1
    if n > MAX_AXIS_POINTS:
        logger.warning(
            f"Sampling box of half-width {half:g} at spacing {spacing:g} needs {n} points per axis; "
            f"capping at {MAX_AXIS_POINTS}"
        )
        n = MAX_AXIS_POINTS
    return np.linspace(-half, half, n)


def _peak_envelope(spectrum: np.ndarray) -> tuple:
    """Local maxima of a sampled modulus, made non-increasing by a running max from the right."""
    interior = (spectrum[1:-1] >= spectrum[:-2]) & (spectrum[1:-1] >= spectrum[2:])
    index = np.concatenate(([0], np.nonzero(interior)[0] + 1, [spectrum.size - 1]))
    values = np.maximum.accumulate(spectrum[index][::-1])[::-1]
    return index, values


def windowed_decay_samples(a: Symbol, radii: np.ndarray, window: str = "gevrey",
                           t_points: Sequence[complex] = (0.0,), partition: Optional[LatticePartition] = None,
                           spacing: float = 0.002) -> DecaySamples:
    """
    Envelope of sup over T and both coordinate directions of |F(chi_T a)(xi)|, F the transform
    int exp(-i xi . p) g(p) dp on R^2, taken as zero-padded FFTs of the axis marginals.

    The envelope interpolates the peaks of the oscillating modulus, so the zeros between endpoint
    contributions never reach the fit. Radii above pi / (2 spacing) are returned as NaN.
    """
    w = a.weight
    radii = np.asarray(radii, dtype=float)
    support = float(getattr(a, "support", math.inf))
    if window == "gevrey":
        if partition is None:
            raise ConfigError("a Gevrey window needs a lattice partition")
        half = partition.bump.r
    elif window == "gaussian":
        half = GAUSSIAN_WINDOW_HALF_WIDTH
    else:
        raise ConfigError(f"unknown window '{window}', expected 'gaussian' or 'gevrey'")

    # a compact symbol under the Gaussian window is sampled once on its own support box
    fixed = window == "gaussian" and math.isfinite(support)
    u = _axis(support if fixed else half, spacing)
    du = float(u[1] - u[0])
    grid = np.stack(np.meshgrid(u, u, indexing="ij"), axis=-1)
    if fixed:
        base = a(from_real_coordinates(grid[..., 0], grid[..., 1], w))
    elif window == "gevrey":
        chi = partition.chi(grid)
    else:
        chi = gaussian_window(grid)

    length = max(u.size, 1 << int(math.ceil(math.log2(2.0 * math.pi / (du * FREQUENCY_STEP)))))
    step = 2.0 * math.pi / (length * du)
    top = int(math.floor(math.pi / (2.0 * du) / step))
    mirror = (length - np.arange(top + 1)) % length
    best = np.zeros(top + 1)
    used = 0
    for t in t_points:
        tr = real_coordinates(t, w)
        if fixed:
            g = gaussian_window(grid - tr) * base
        else:
            if np.hypot(tr[0], tr[1]) >= half + support:
                continue
            g = chi * a(from_real_coordinates(grid[..., 0] + tr[0], grid[..., 1] + tr[1], w))
        if not np.any(g):
            continue
        used += 1
        for axis in (0, 1):
            spectrum = np.abs(np.fft.fft(g.sum(axis=1 - axis) * du, n=length)) * du
            best = np.maximum(best, np.maximum(spectrum[: top + 1], spectrum[mirror]))
    if not used:
        raise FitError("no window placement overlaps the symbol")

    index, values = _peak_envelope(best)
    with np.errstate(divide="ignore"):
        log_values = np.log(np.maximum(values, np.finfo(float).tiny))
    moduli = np.exp(np.interp(radii, index * step, log_values))
    moduli[radii > top * step] = math.nan
    logger.debug(
        f"Windowed samples ({window}): {used}/{len(t_points)} placements, spacing {du:.4g}, "
        f"frequency cap {top * step:.4g}"
    )
    return DecaySamples(radii=radii, moduli=moduli, window=window, t_grid=len(t_points),
                        peak=float(best.max()), spacing=du)


def lattice_t_points(w: QuadraticWeight, size: int = 5, step: float = 1.0) -> List[complex]:
    """A size x size block of lattice points around the origin, as x coordinates."""
    offsets = step * (np.arange(size) - (size - 1) / 2.0)
    return [complex(from_real_coordinates(p, q, w)) for p in offsets for q in offsets]


@dataclass(frozen=True)
class DecayFit:
    """log v = log A - beta log r - r^rho / C; beta is the algebraic prefactor exponent."""
    rho: float
    C: float
    A: float
    residual: float
    radius_min: float
    radius_max: float
    samples: int
    flag: str = "ok"
    beta: float = 0.0


def _profile(rho: float, log_r: np.ndarray, log_v: np.ndarray):
    """Bounded linear least squares for (log A, beta >= 0, 1/C >= 0) at fixed rho."""
    design = np.column_stack([np.ones_like(log_r), -log_r, -np.exp(rho * log_r)])
    return lsq_linear(design, log_v, bounds=([-np.inf, 0.0, 0.0], np.inf))


def _log_model(r, log_a, beta, rho, inv_c):
    return log_a - beta * np.log(r) - inv_c * r ** rho


def decay_fit(radii: np.ndarray, moduli: np.ndarray, s: Optional[float] = None) -> DecayFit:
    """
    Least-squares fit of A r^-beta exp(-r^rho / C), rho in [0.05, 1], by a profile scan over rho.

    Flagged model_mismatch when rho sits at either edge of its range, the residual is large,
    the stretched exponential carries too little of the decay, or rho misses [0.8/s, 1.2/s].
    """
    r = np.asarray(radii, dtype=float)
    v = np.asarray(moduli, dtype=float)
    if r.size < MIN_SAMPLES:
        raise FitError(f"decay fit needs at least {MIN_SAMPLES} samples, got {r.size}")
    if np.any(v <= 0) or np.any(r <= 0):
        raise FitError("decay fit needs positive radii and moduli")
    flag = "ok"
    if r.max() / r.min() < 10.0:
        flag = "narrow_range"
        logger.warning(f"Decay fit over [{r.min():.3g}, {r.max():.3g}] spans less than one decade")
    log_v = np.log(v)
    log_r = np.log(r)

    rhos = np.linspace(RHO_RANGE[0], RHO_RANGE[1], RHO_SCAN)
    costs = np.array([_profile(rho, log_r, log_v).cost for rho in rhos])
    i = int(np.argmin(costs))
    lo, hi = rhos[max(i - 1, 0)], rhos[min(i + 1, rhos.size - 1)]
    refined = minimize_scalar(lambda rho: _profile(rho, log_r, log_v).cost, bounds=(lo, hi),
                              method="bounded", options={"xatol": 1e-8})
    rho = float(refined.x) if refined.success and refined.fun <= costs[i] else float(rhos[i])
    log_a, beta, inv_c = (float(p) for p in _profile(rho, log_r, log_v).x)

    residual = float(np.sqrt(np.mean((_log_model(r, log_a, beta, rho, inv_c) - log_v) ** 2)))
    stretched = inv_c * (r.max() ** rho - r.min() ** rho)
    algebraic = beta * math.log(r.max() / r.min())
    share = stretched / (stretched + algebraic) if stretched + algebraic > 0 else 0.0
    reasons = []
    if rho >= MISMATCH_RHO:
        reasons.append("rho at the Gaussian edge")
    if rho <= MISMATCH_RHO_LOW:
        reasons.append("rho at the algebraic edge")
    if residual > MISMATCH_RESIDUAL:
        reasons.append(f"residual {residual:.3g}")
    if share < EXPONENTIAL_SHARE:
        reasons.append(f"stretched-exponential share {share:.2f}")
    if s is not None and not INVERSE_S_BAND[0] / s <= rho <= INVERSE_S_BAND[1] / s:
        reasons.append(f"rho outside [{INVERSE_S_BAND[0] / s:.3f}, {INVERSE_S_BAND[1] / s:.3f}]")
    if reasons:
        flag = "model_mismatch"
        logger.warning(f"Decay fit mismatch: {'; '.join(reasons)}")
    C = 1.0 / inv_c if inv_c > 0 else math.inf
    logger.info(f"Decay fit: rho={rho:.4f}, C={C:.4g}, beta={beta:.3f}, residual {residual:.3e} ({flag})")
    return DecayFit(rho=rho, C=C, A=math.exp(log_a), residual=residual, radius_min=float(r.min()),
                    radius_max=float(r.max()), samples=int(r.size), flag=flag, beta=beta)


def fit_windowed_decay(samples: DecaySamples, s: Optional[float] = None) -> DecayFit:
    """decay_fit restricted to moduli inside the fitting window."""
    window = samples.in_window()
    if window.radii.size < MIN_SAMPLES and samples.below_floor():
        logger.warning(
            f"Windowed transform ({samples.window}) falls under the fitting floor with only "
            f"{window.radii.size} samples left; faster than any stretched exponential"
        )
        return DecayFit(rho=1.0, C=math.nan, A=math.nan, residual=math.nan, radius_min=math.nan,
                        radius_max=math.nan, samples=int(window.radii.size), flag="model_mismatch",
                        beta=math.nan)
    return decay_fit(window.radii, window.moduli, s=s)
