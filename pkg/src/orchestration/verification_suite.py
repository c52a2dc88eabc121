#!/usr/bin/env python3
"""
Verification Suite

The invariant checks behind `main.py verify`. Each check produces one VerifyRow
with the measured residual and the tolerance it is held to. Closed-form
identities are held near machine precision, quadrature routes to the accuracy
of their grids.

Random draws come from one generator seeded by the config, consumed in a fixed
order, so two runs with the same seed report identical residuals.
"""

import logging
import math
from typing import Callable, List, Optional

import numpy as np

from src.bargmann.bargmann_core import (
    QuadRule,
    bargmann_phase,
    calibrate,
    derive_weight,
    ground_state,
    inner_product,
    kappa_phi,
    norm,
    phi0_basis,
    transform_hermite_combination,
    weight_gram,
)
from src.bargmann.gaussian_integrals import gaussian_overlap
from src.bargmann.holo import HoloFunction
from src.bargmann.magnetic import (
    MagneticTranslation,
    apply,
    compose_cocycle,
    hj_residual,
    modulus_phase_form,
    modulus_transport_residual,
    plane_wave_operator,
    prefactor_identity_residual,
    quantization_multiplication,
    transport_weight,
    translation_matrix,
)
from src.bargmann.weights import WeightFunction, get_perturbation, perturbed_weight, quadratic_weight_function
from src.calculus.composition import Side, compose_direct, compose_fourier_at, compose_gaussian, compose_plane_wave
from src.calculus.decomposition import coherent_coefficients, decomposition_mass, rank_one_decomposition
from src.calculus.fourier import fourier_gaussian, fourier_values, twisted_convolution_gaussian
from src.calculus.gevrey import partition_of_unity
from src.calculus.quantization import (
    direct_operator_matrix,
    operator_norm,
    quantize_polynomial,
    quantize_radial,
    quantize_superposition,
    rank_one_projection,
)
from src.calculus.schur import STABLE_RATIO, schur_kernel_report, schur_total
from src.calculus.symbols import (
    RadialSymbol,
    constant_symbol,
    exponential_profile_symbol,
    gaussian_symbol,
    oscillator_symbol,
    projection_symbol,
)
from src.core.exceptions import (
    ConditioningError,
    FitError,
    IntegrabilityError,
    OffLambdaError,
    UnsupportedSymbolError,
)
from src.core.models import VerifyRow
from src.core.phase_space import (
    QuadraticWeight,
    lift,
    linear_form,
    on_lambda_residual,
    quadratic_weight,
    sigma,
    sigma_lambda_coords,
)
from src.orchestration.experiment_runner import (
    SUPERPOSITION_POINTS,
    decomposition_y_rule,
    superposition_rule,
)
from src.utils.config_loader import ExperimentConfig

logger = logging.getLogger(__name__)

EXACT = 1e-10
CALIBRATION = 1e-8
UNITARITY = 1e-8
ALGEBRA = 1e-6
INVOLUTION = 1e-7
COMPOSITION = 1e-5
CROSS_ROUTE = 1e-3
SPECTRAL = 1e-2
PROJECTION = 1e-6
PROJECTION_SYMBOL = 1e-4
FINITE_DIFFERENCE = 1e-6
MASS_RATIO = 4.0
UNIFORM_RATIO = 2.0
COHERENT = 1e-3

# h=0.2 cross-route checks; the direct composition grid must resolve exp(2 i sigma/h) over R = 4
COMPOSE_POINTS = 301
COMPOSE_PAIRS = 10
COMPOSE_H = 0.1
CROSS_ROUTE_DEGREE = 6
# quantization cross-route checks run at the acceptance resolution
QUANTIZATION_DEGREE = 12
QUANTIZATION_H = 0.1
DIRECT_POINTS = 181
SPECTRAL_DEGREE = 40
SPECTRAL_H = 0.1
PLANE_WAVE_XSTAR = 0.15 + 0.1j
PARTITION_SAMPLES = 1000
SCHUR_STABLE = (2.0, 4.0)
SCHUR_CONTRAST = 1.5
SCHUR_H_GRID = (0.2, 0.1, 0.05, 0.025)

CHECK_ERRORS = (IntegrabilityError, ConditioningError, UnsupportedSymbolError, OffLambdaError, FitError)


def _relative(a, b) -> float:
    a = np.asarray(a)
    b = np.asarray(b)
    scale = float(np.max(np.abs(b))) or 1.0
    return float(np.max(np.abs(a - b))) / scale


class VerificationSuite:
    """Runs every invariant check for one weight preset and collects the rows."""

    def __init__(self, config: ExperimentConfig, weight: Optional[QuadraticWeight] = None):
        self.config = config
        self.weight = weight or quadratic_weight(config.weight)
        self.phase = bargmann_phase(config.weight)
        self.rng = np.random.default_rng(config.seed)
        self.rows: List[VerifyRow] = []

    # --- helpers ---

    def _record(self, check: str, module: str, residual: float, tolerance: float, note: str = "",
                expected_failure: bool = False, passed: Optional[bool] = None) -> VerifyRow:
        residual = float(residual)
        if passed is None:
            passed = math.isfinite(residual) and residual < tolerance
        row = VerifyRow(check=check, module=module, passed=bool(passed), residual=residual, tolerance=tolerance,
                        expected_failure=expected_failure, note=note)
        self.rows.append(row)
        level = logging.INFO if passed or expected_failure else logging.WARNING
        logger.log(level, f"{module}/{check}: residual {residual:.3e} (tolerance {tolerance:.1e}) "
                          f"{'passed' if passed else 'FAILED'}{' ' + note if note else ''}")
        return row

    def _guarded(self, check: str, module: str, fn: Callable[[], None]) -> None:
        try:
            fn()
        except CHECK_ERRORS as exc:
            self._record(check, module, math.nan, 0.0, note=f"{type(exc).__name__}: {exc}", passed=False)

    def _points(self, count: int, scale: float = 1.0) -> np.ndarray:
        return scale * (self.rng.standard_normal(count) + 1j * self.rng.standard_normal(count))

    def _random_state(self, h: float, degree: int = 3) -> HoloFunction:
        """A unit vector in the span of the first basis functions."""
        basis = phi0_basis(self.weight, h, degree)
        c = self._points(degree + 1)
        c /= np.linalg.norm(c)
        return HoloFunction(coeffs=basis.coefficients @ c, h=h, q2=self.weight.q, label="random")

    def run(self) -> List[VerifyRow]:
        groups = [
            ("phase_space", self.check_phase_space),
            ("bargmann_core", self.check_bargmann_core),
            ("magnetic", self.check_magnetic),
            ("fourier", self.check_fourier),
            ("plane_wave", self.check_plane_waves),
            ("composition", self.check_composition),
            ("quantization", self.check_quantization),
            ("spectral", self.check_spectral),
            ("schur", self.check_schur),
            ("gevrey", self.check_gevrey),
            ("decomposition", self.check_decomposition),
        ]
        for name, group in groups:
            logger.info(f"Verifying {name}")
            self._guarded(f"{name}_group", name, group)
        failed = sum(1 for row in self.rows if not row["passed"] and not row["expected_failure"])
        logger.info(f"Verification finished: {len(self.rows)} checks, {failed} failed")
        return self.rows

    # --- phase space ---

    def check_phase_space(self) -> None:
        w = self.weight
        x = self._points(100)
        lifted = max(on_lambda_residual(lift(xi, w), w) for xi in x)
        self._record("lift_on_lambda", "phase_space", lifted, EXACT, note=f"{x.size} points")

        xs = self._points(1)[0]
        form = linear_form(xs, w)
        values = form(x, w.xi(x))
        reality = float(np.max(np.abs(values.imag))) / max(float(np.max(np.abs(values))), 1.0)
        self._record("form_real_on_lambda", "phase_space", reality, EXACT)

        y = self._points(x.size)
        direct = np.array([sigma(lift(a, w), lift(b, w)) for a, b in zip(x, y)])
        residual = max(float(np.max(np.abs(direct.imag))),
                       float(np.max(np.abs(direct.real - sigma_lambda_coords(x, y, w)))))
        self._record("sigma_on_lambda", "phase_space", residual, EXACT, note="Im sigma = 0, coordinate formula")

        fbi = quadratic_weight("fbi")
        point = lift(1j, fbi)
        self._record("fbi_lift_of_i", "phase_space", abs(point.xi[0] - (-1.0)), EXACT, note="lift(i) = (i, -1)")

    # --- Bargmann transform ---

    def check_bargmann_core(self) -> None:
        w = self.weight
        derived = derive_weight(self.phase)
        self._record("derived_weight_matches_preset", "bargmann_core",
                     abs(derived.q - w.q) + abs(derived.l - w.l), EXACT, note=self.phase.name)

        eta = self.rng.standard_normal(100)
        y = self.rng.standard_normal(100)
        kappa = max(on_lambda_residual(kappa_phi(a, b, self.phase), derived) for a, b in zip(y, eta))
        self._record("kappa_maps_into_lambda", "bargmann_core", kappa, EXACT, note="100 real points")

        for h in self.config.h_grid:
            result = calibrate(self.phase, h)
            self._record("calibration", "bargmann_core", result.residual, CALIBRATION, note=f"h={h}, C={result.C:.10f}")

        h = self.config.h_grid[0]
        phase = calibrate(self.phase, h).phase
        c = self._points(5)
        u = transform_hermite_combination(c, phase, h)
        parseval = abs(gaussian_overlap(u, u, w).real - float(np.sum(np.abs(c) ** 2))) / float(np.sum(np.abs(c) ** 2))
        self._record("parseval_hermite", "bargmann_core", parseval, CALIBRATION, note=f"h={h}, 5 Hermite modes")

        v = self._random_state(h)
        rule = QuadRule.for_weight(h, w.l, degree=6, M=self.config.M)
        exact = gaussian_overlap(u, v, w)
        numeric = inner_product(u, v, quadratic_weight_function(w), rule)
        self._record("overlap_vs_quadrature", "bargmann_core", abs(exact - numeric) / max(abs(exact), 1e-300),
                     CALIBRATION, note=f"h={h}, M={rule.M}, R={rule.R:.4g}")

        t = MagneticTranslation(linear_form(self._points(1, 0.5)[0], w), h)
        moved = apply(t, u)
        a, b = t.ab
        x = self._points(50, 0.5)
        expected = np.exp(0.5j * a * b / h) * np.exp(-1j * a * x / h) * u(x - b)
        self._record("translation_stays_in_class", "bargmann_core", _relative(moved(x), expected), EXACT,
                     note="apply() against the defining formula")

    # --- magnetic translations ---

    def check_magnetic(self) -> None:
        w = self.weight
        config = self.config
        worst = 0.0
        for h in config.h_grid:
            for _ in range(config.draws):
                u = self._random_state(h)
                t = MagneticTranslation(linear_form(self._points(1, 0.5)[0], w), h)
                moved = apply(t, u)
                before = gaussian_overlap(u, u, w).real
                worst = max(worst, abs(gaussian_overlap(moved, moved, w).real / before - 1.0))
        self._record("unitary_on_phi0", "magnetic", worst, UNITARITY,
                     note=f"{config.draws} draws per h over {config.h_grid}")

        worst = 0.0
        for h in config.h_grid:
            phi1 = perturbed_weight(w, config.perturbation, h, config.s, config.C)
            for _ in range(3):
                u = self._random_state(h)
                t = MagneticTranslation(linear_form(self._points(1, 0.5)[0], w), h)
                phi2 = transport_weight(phi1, t.shift)
                base = QuadRule.for_weight(h, w.l, degree=3, M=config.M)
                rule = QuadRule(R=base.R + abs(t.shift), M=config.M)
                worst = max(worst, abs(norm(apply(t, u), phi2, rule) / norm(u, phi1, rule) - 1.0))
                x = self._points(20, 0.5)
                worst = max(worst, modulus_transport_residual(t, u, x))
        self._record("isometry_phi1_to_phi2", "magnetic", worst, UNITARITY,
                     note=f"3 draws per h, perturbation {config.perturbation}, s={config.s}, C={config.C}")

        h = config.h_grid[0]
        u = self._random_state(h)
        tY = MagneticTranslation(linear_form(self._points(1, 0.5)[0], w), h)
        tZ = MagneticTranslation(linear_form(self._points(1, 0.5)[0], w), h)
        combined, phase = compose_cocycle(tY, tZ)
        x = self._points(50, 0.5)
        self._record("cocycle_law", "magnetic", _relative(apply(tY, apply(tZ, u))(x), phase * apply(combined, u)(x)),
                     EXACT, note=f"h={h}")

        form = linear_form(self._points(1, 0.5)[0], w)
        self._record("prefactor_identity", "magnetic", prefactor_identity_residual(form, self._points(50)), EXACT)

        v0 = ground_state(self.phase, h)
        check = modulus_phase_form(form, v0, self._points(50, 0.5))
        self._record("translation_unimodular_constant", "magnetic", max(check.spread, check.modulus_error), ALGEBRA,
                     note=f"constant {check.constant:.6f}")

        sine = WeightFunction(base=w, perturbation=get_perturbation("sine"), scale=0.1)
        x = self._points(50)
        times = self.rng.uniform(0.0, 1.0, x.size)
        self._record("hamilton_jacobi", "magnetic", float(np.max(hj_residual(sine, form.xstar[0], x, times))),
                     FINITE_DIFFERENCE, note="sine perturbation at scale 0.1")

        phi1 = perturbed_weight(w, config.perturbation, h, config.s, config.C)
        rule = QuadRule.for_weight(h, w.l, degree=2, M=config.M)
        lhs, rhs = quantization_multiplication(form, v0, phi1, rule)
        self._record("quantization_multiplication", "magnetic", abs(lhs - rhs) / max(abs(rhs), 1e-300), ALGEBRA,
                     note=f"h={h}, weight {phi1.describe()}")

    # --- symplectic Fourier transform ---

    def check_fourier(self) -> None:
        w = self.weight
        h = self.config.h_grid[0]
        a = gaussian_symbol(w, h, rate=1.3, center=0.2 + 0.1j, name="a")
        x = self._points(50, 0.5)
        self._record("fourier_involution", "fourier", _relative(fourier_gaussian(fourier_gaussian(a))(x), a(x)),
                     INVOLUTION, note=f"h={h}")

        rate = 1.0
        radial = RadialSymbol(w, h, profile=lambda r: np.exp(-rate * np.asarray(r) ** 2), name="radial_gaussian")
        reference = gaussian_symbol(w, h, rate=rate)
        src = QuadRule(R=6.0 / (2.0 * math.sqrt(w.l)), M=201)
        dst = QuadRule(R=0.5, M=21)
        grid = fourier_values(radial, dst, src)
        self._record("fourier_grid_vs_closed_form", "fourier", _relative(grid, fourier_gaussian(reference)(dst.grid)),
                     ALGEBRA, note=f"h={h}, M={src.M}")

        u = gaussian_symbol(w, h, rate=1.0, center=self._points(1, 0.2)[0], name="u")
        v = gaussian_symbol(w, h, rate=2.0, center=self._points(1, 0.2)[0], name="v")
        lhs = fourier_gaussian(twisted_convolution_gaussian(u, v))
        rhs = twisted_convolution_gaussian(fourier_gaussian(u), v)
        self._record("fourier_of_twisted_convolution", "fourier", _relative(lhs(x), rhs(x)), ALGEBRA,
                     note="F(u * v) = (F u) * v")

    # --- plane waves ---

    def check_plane_waves(self) -> None:
        w = self.weight
        h = self.config.h_grid[0]
        basis = phi0_basis(w, h, CROSS_ROUTE_DEGREE)
        a = gaussian_symbol(w, h, rate=self.config.symbol_rate)
        A = quantize_radial(a, basis).entries
        form = linear_form(PLANE_WAVE_XSTAR, w)
        T = translation_matrix(plane_wave_operator(form, h), basis)
        rule = QuadRule(R=superposition_rule(a, h).R + abs(PLANE_WAVE_XSTAR), M=SUPERPOSITION_POINTS)
        # A is diagonal, so the truncated products are exact
        for side, exact in ((Side.LEFT, T @ A), (Side.RIGHT, A @ T)):
            modulated = quantize_superposition(compose_plane_wave(form, a, side), basis, rule).entries
            self._record(f"plane_wave_{side.value}_matrix", "plane_wave", _relative(modulated, exact), ALGEBRA,
                         note=f"h={h}, N={basis.N}, x*={PLANE_WAVE_XSTAR}")

        x = self._points(50, 0.5)
        xs = complex(form.xstar[0])
        conjugated = compose_plane_wave(form, compose_plane_wave(form.scale(-1.0), a, Side.RIGHT), Side.LEFT)
        self._record("plane_wave_conjugation", "plane_wave", _relative(conjugated(x), a(x + xs)), EXACT,
                     note="shift by H_l")
        sandwich = compose_plane_wave(form, compose_plane_wave(form, a, Side.RIGHT), Side.LEFT)
        self._record("plane_wave_sandwich", "plane_wave",
                     _relative(sandwich(x), np.exp(2j * form.on_lambda(x) / h) * a(x)), EXACT)

    # --- composition ---

    def check_composition(self) -> None:
        w = self.weight
        config = self.config
        h = config.h_grid[0]
        a = gaussian_symbol(w, h, rate=config.symbol_rate, name="a")
        b = gaussian_symbol(w, h, rate=config.compose_b_rate, name="b")
        points = np.array(config.points)
        exact = compose_gaussian(a, b)(points)
        rule = QuadRule(R=config.R, M=COMPOSE_POINTS)
        direct = np.array([compose_direct(a, b, x, rule) for x in points])
        self._record("compose_direct_vs_closed_form", "composition", _relative(direct, exact), COMPOSITION,
                     note=f"h={h}, M={rule.M}, R={rule.R:g}")

        h = COMPOSE_H
        worst = 0.0
        routes = 0.0
        for _ in range(COMPOSE_PAIRS):
            a = gaussian_symbol(w, h, rate=self.rng.uniform(0.5, 2.0), center=self._points(1, 0.15)[0], name="a")
            b = gaussian_symbol(w, h, rate=self.rng.uniform(0.5, 2.0), center=self._points(1, 0.15)[0], name="b")
            fourier = compose_fourier_at(a, b, points, superposition_rule(b, h, points=config.M))
            direct = np.array([compose_direct(a, b, x, rule) for x in points])
            worst = max(worst, _relative(fourier, compose_gaussian(a, b)(points)))
            routes = max(routes, _relative(direct, fourier))
        self._record("compose_fourier_vs_closed_form", "composition", worst, COMPOSITION,
                     note=f"{COMPOSE_PAIRS} Gaussian pairs, h={h}, M={config.M}")
        self._record("compose_direct_vs_fourier", "composition", routes, COMPOSITION,
                     note=f"{COMPOSE_PAIRS} Gaussian pairs, h={h}, direct M={rule.M}, R={rule.R:g}")

    # --- quantization ---

    def check_quantization(self) -> None:
        w = self.weight
        config = self.config
        h = QUANTIZATION_H
        basis = phi0_basis(w, h, QUANTIZATION_DEGREE)

        identity = quantize_radial(constant_symbol(w, h), basis).entries
        self._record("quantized_one_is_identity", "quantization", _relative(identity, np.eye(basis.size)), EXACT,
                     note=f"h={h}, N={basis.N}")

        gram = weight_gram(basis, quadratic_weight_function(w), QuadRule.for_weight(h, w.l, degree=basis.N, M=config.M))
        self._record("norm_of_identity", "quantization", abs(operator_norm(np.eye(basis.size), gram).norm - 1.0),
                     CALIBRATION, note=f"Gram condition {gram.condition:.3g}")

        a = gaussian_symbol(w, h, rate=config.symbol_rate)
        superposition = quantize_superposition(a, basis, superposition_rule(a, h))
        direct = direct_operator_matrix(a, basis, QuadRule.for_weight(h, w.l, degree=basis.N, M=DIRECT_POINTS))
        radial = quantize_radial(a, basis)
        self._record("direct_vs_superposition", "quantization", direct.max_rel_diff(superposition), CROSS_ROUTE,
                     note=f"h={h}, N={basis.N}, M={DIRECT_POINTS}")
        self._record("radial_vs_superposition", "quantization", radial.max_rel_diff(superposition), CROSS_ROUTE)

        P = rank_one_projection(calibrate(self.phase, h).phase, h, basis).entries
        residual = max(_relative(P @ P, P), _relative(P.conj().T, P), abs(np.trace(P) - 1.0))
        self._record("projection_algebra", "quantization", residual, PROJECTION, note="P^2 = P, P* = P, tr P = 1")
        chi0 = projection_symbol(w, h)
        quantized = quantize_superposition(chi0, basis, superposition_rule(chi0, h)).entries
        self._record("projection_symbol", "quantization", _relative(quantized, P), PROJECTION_SYMBOL)

        norms = []
        for hh in config.h_grid:
            b = phi0_basis(w, hh, config.N)
            norms.append(operator_norm(quantize_radial(exponential_profile_symbol(w, hh), b)).norm)
        ratio = max(norms) / min(norms)
        self._record("exp_radius_norm_uniform", "quantization", ratio, UNIFORM_RATIO,
                     note=f"exp(-|X|) norms {['%.4f' % n for n in norms]}")

    # --- spectra ---

    def check_spectral(self) -> None:
        for name in ("bargmann", "fbi"):
            w = quadratic_weight(name)
            phase = calibrate(bargmann_phase(name), SPECTRAL_H).phase
            basis = phi0_basis(w, SPECTRAL_H, SPECTRAL_DEGREE)
            A = quantize_polynomial(oscillator_symbol(phase, w, SPECTRAL_H), basis)
            eigenvalues = np.sort(np.linalg.eigvals(A.entries).real)[:5]
            expected = SPECTRAL_H * (2 * np.arange(5) + 1)
            self._record(f"oscillator_spectrum_{name}", "spectral", float(np.max(np.abs(eigenvalues / expected - 1.0))),
                         SPECTRAL, note=f"h={SPECTRAL_H}, N={SPECTRAL_DEGREE}")

    # --- Schur kernel ---

    def check_schur(self) -> None:
        C, K = self.config.C, self.config.schur_k
        for s in SCHUR_STABLE:
            report = schur_kernel_report(s, C, SCHUR_H_GRID, K=K)
            self._record(f"schur_stable_s{s:g}", "schur", report.ratio, STABLE_RATIO,
                         note=f"{report.flag}, C={C:g}, K={K:g}")
            closed = np.array([schur_total(s, C, h, K) for h in SCHUR_H_GRID])
            self._record(f"schur_closed_form_s{s:g}", "schur", float(np.max(np.abs(report.totals / closed - 1.0))),
                         ALGEBRA, note=f"C={C:g}, K={K:g}")
        report = schur_kernel_report(SCHUR_CONTRAST, C, SCHUR_H_GRID, K=K)
        # below s = 2 the kernel bound must blow up; the row fails by construction
        self._record(f"schur_divergence_s{SCHUR_CONTRAST:g}", "schur", report.ratio, STABLE_RATIO,
                     note=report.flag, expected_failure=report.divergent, passed=False)

    # --- Gevrey ---

    def check_gevrey(self) -> None:
        partition = partition_of_unity(self.config.s)
        p = self.rng.uniform(-5.0, 5.0, (PARTITION_SAMPLES, 2))
        self._record("partition_of_unity", "gevrey", float(np.max(np.abs(partition.total(p) - 1.0))), EXACT,
                     note=f"s={self.config.s}, {PARTITION_SAMPLES} points")

    # --- rank-one decomposition ---

    def check_decomposition(self) -> None:
        w = self.weight
        config = self.config
        masses = [decomposition_mass(w, h) for h in config.h_grid]
        closed = max(abs(m.numeric - m.closed_form) / m.closed_form for m in masses)
        self._record("mass_closed_form", "decomposition", closed, ALGEBRA, note="4 pi h / (1 + h)")
        scaled = [m.over_h for m in masses]
        self._record("mass_scales_like_h", "decomposition", max(scaled) / min(scaled), MASS_RATIO)

        h = config.h_grid[0]
        v0 = ground_state(self.phase, h)
        coefficients = coherent_coefficients(v0, phi0_basis(w, h, 0), QuadRule(R=3.0, M=121))
        self._record("coherent_norm", "decomposition", abs(coefficients.scaled_norm / math.sqrt(2.0 * math.pi) - 1.0),
                     COHERENT, note=f"h={h}")

        basis = phi0_basis(w, h, CROSS_ROUTE_DEGREE)
        a = gaussian_symbol(w, h, rate=config.symbol_rate)
        superposition = quantize_superposition(a, basis, superposition_rule(a, h))
        result = rank_one_decomposition(a, basis, decomposition_y_rule(config, h), QuadRule(R=config.t_R, M=config.t_M))
        self._record("rank_one_vs_superposition", "decomposition", result.matrix.max_rel_diff(superposition),
                     CROSS_ROUTE, note=f"h={h}, N={basis.N}, {result.windows_used}/{result.windows_total} windows")
