#!/usr/bin/env python3
"""
Schur Kernel Report Module

The Schur-test integrals behind the perturbed-weight bound, evaluated over an
h-grid. The kernel bound is

    k(r) = h^{-1} exp(-r^2/(C h)) exp(h^{1-1/s} r / (K h)),

with C the width constant of the Gaussian factor and K the O(1) denominator of the
growth exponent. It is split at r0 = C h^{1-1/s} into I1 (outer, r > r0) and I2
(inner, r < r0, holding the peak near r0 / (2K)). With b = sqrt(C) h^{1/2-1/s} / K
the total is pi C (1 + b (sqrt(pi)/2) e^{b^2/4} (1 + erf(b/2))), so it stays O(1)
exactly when s >= 2.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np
from scipy.integrate import quad
from scipy.special import erf

from src.core.exceptions import ConfigError
from src.core.models import SchurRow

logger = logging.getLogger(__name__)

STABLE_RATIO = 3.0
DIVERGENT_RATIO = 10.0
KERNEL_K = 3.0


def _kernel(r: float, h: float, s: float, C: float, K: float) -> float:
    return math.exp(-r * r / (C * h) + h ** (-1.0 / s) * r / K) * 2.0 * math.pi * r / h


def schur_integrals(s: float, C: float, h: float, K: float = KERNEL_K):
    """(I1, I2): the kernel integral outside and inside r0 = C h^{1-1/s}."""
    r0 = C * h ** (1.0 - 1.0 / s)
    peak = r0 / (2.0 * K)
    inner, _ = quad(_kernel, 0.0, r0, args=(h, s, C, K), points=[min(peak, r0)], limit=200)
    outer, _ = quad(_kernel, r0, np.inf, args=(h, s, C, K), limit=200)
    return outer, inner


def schur_total(s: float, C: float, h: float, K: float = KERNEL_K) -> float:
    b = math.sqrt(C) * h ** (0.5 - 1.0 / s) / K
    return math.pi * C * (1.0 + b * 0.5 * math.sqrt(math.pi) * math.exp(b * b / 4.0) * (1.0 + float(erf(b / 2.0))))


def fourier_side_integral(s: float, C: float, h: float, C0: float = 1.0) -> float:
    """h^{-2} int exp(h^{-1/s} (-|y|^{1/s}/C0 + (2/C) min(1, |y|))) dy over R^2."""
    def integrand(y):
        return math.exp(h ** (-1.0 / s) * (-y ** (1.0 / s) / C0 + (2.0 / C) * min(1.0, y))) * 2.0 * math.pi * y

    inner, _ = quad(integrand, 0.0, 1.0, limit=200)
    outer, _ = quad(integrand, 1.0, np.inf, limit=200)
    return (inner + outer) / h ** 2


@dataclass
class SchurReport:
    s: float
    C: float
    K: float = KERNEL_K
    rows: List[SchurRow] = field(default_factory=list)

    @property
    def totals(self) -> np.ndarray:
        return np.array([row["I1"] + row["I2"] for row in self.rows])

    @property
    def ratio(self) -> float:
        totals = self.totals
        return float(totals.max() / totals.min())

    @property
    def stable(self) -> bool:
        return self.ratio < STABLE_RATIO

    @property
    def divergent(self) -> bool:
        return self.ratio > DIVERGENT_RATIO

    @property
    def expected_divergence(self) -> bool:
        return self.s < 2.0

    @property
    def flag(self) -> str:
        if self.divergent:
            return "divergence"
        return "stable" if self.stable else "inconclusive"


def schur_kernel_report(s: float, C: float, h_grid: Sequence[float], K: float = KERNEL_K,
                        C0: float = 1.0) -> SchurReport:
    if s <= 1:
        raise ConfigError(f"Gevrey index s must exceed 1, got {s}")
    if C <= 0:
        raise ConfigError(f"kernel constant C must be positive, got {C}")
    if K <= 0:
        raise ConfigError(f"kernel denominator K must be positive, got {K}")
    if s < 2:
        logger.warning(f"Schur report at s={s}: the kernel bound is expected to diverge as h -> 0")
    report = SchurReport(s=s, C=C, K=K)
    for h in h_grid:
        i1, i2 = schur_integrals(s, C, h, K)
        report.rows.append(SchurRow(s=s, C=C, K=K, h=h, I1=i1, I2=i2,
                                    fourier_side=fourier_side_integral(s, C, h, C0)))
    logger.info(f"Schur report s={s}, C={C}, K={K}: ratio {report.ratio:.3f} over {len(report.rows)} h values ({report.flag})")
    return report
