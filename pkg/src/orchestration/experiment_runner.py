import logging
import math
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Dict, List, Optional, Sequence, TypeVar

import numpy as np

from src import __version__
from src.bargmann.bargmann_core import QuadRule, bargmann_phase, calibrate, ground_state, phi0_basis, weight_gram
from src.bargmann.weights import perturbed_weight, quadratic_weight_function
from src.calculus.composition import compose_direct, compose_fourier_at, compose_gaussian
from src.calculus.decomposition import coherent_coefficients, rank_one_decomposition
from src.calculus.fourier import MIN_POINTS_PER_WAVELENGTH, closed_form
from src.calculus.gevrey import (
    WINDOW_AGREEMENT,
    bump_symbol,
    fit_windowed_decay,
    lattice_t_points,
    partition_of_unity,
    windowed_decay_samples,
)
from src.calculus.quantization import (
    OperatorMatrix,
    direct_operator_matrix,
    fourier_bound,
    operator_norm,
    quantize_radial,
    quantize_superposition,
)
from src.calculus.symbols import (
    Symbol,
    cone_symbol,
    exponential_profile_symbol,
    gaussian_symbol,
    oscillator_symbol,
    projection_symbol,
)
from src.core.exceptions import ConfigError, FitError, UnsupportedSymbolError
from src.core.models import ComposeRow, DecompCheckRow, GevreyFitRow, NormSweepRow, Provenance, Report
from src.core.phase_space import QuadraticWeight, quadratic_weight
from src.utils.config_loader import ExperimentConfig

logger = logging.getLogger(__name__)

T = TypeVar("T")

UNIFORM_RATIO = 2.0
BOUND_BLOWUP = 10.0
MASS_RATIO_LIMIT = 4.0
SUPERPOSITION_POINTS = 81
# e^{-40} at the edge of the superposition box
SUPERPOSITION_DECAY = 40.0


class WarningCollector(logging.Handler):
    """Keeps the text of every WARNING record logged under `src` during a run."""

    def __init__(self):
        super().__init__(level=logging.WARNING)
        self.messages: List[str] = []

    def emit(self, record: logging.LogRecord) -> None:
        message = f"{record.name}: {record.getMessage()}"
        if message not in self.messages:
            self.messages.append(message)


def build_symbol(config: ExperimentConfig, w: QuadraticWeight, h: float, kind: Optional[str] = None) -> Symbol:
    kind = kind or config.symbol
    if kind == "gaussian":
        return gaussian_symbol(w, h, rate=config.symbol_rate)
    if kind == "bump":
        return bump_symbol(w, h, s=config.s, r=config.bump_r)
    if kind == "projection":
        return projection_symbol(w, h)
    if kind == "exp_radius":
        return exponential_profile_symbol(w, h)
    if kind == "cone":
        return cone_symbol(w, h)
    if kind == "oscillator":
        phase = calibrate(bargmann_phase(config.weight), h).phase
        return oscillator_symbol(phase, w, h)
    raise ConfigError(f"unknown symbol kind '{kind}'")


def superposition_rule(a: Symbol, h: float, points: int = SUPERPOSITION_POINTS) -> QuadRule:
    """Y box for the superposition route of a Gaussian symbol: F_h a decays like exp(-4L|y|^2 / (rate h^2))."""
    gaussian = closed_form(a)
    if gaussian is None:
        raise UnsupportedSymbolError(f"no superposition box rule for {a.label}; use the radial or direct route")
    w = a.weight
    rate = -float(np.real(gaussian.exponent.beta)) / (4.0 * w.l)
    if rate <= 0:
        raise UnsupportedSymbolError(f"{a.label} does not decay; its superposition integral has no finite box")
    return QuadRule(R=h * math.sqrt(SUPERPOSITION_DECAY * rate / (4.0 * w.l)), M=points)


def decomposition_y_rule(config: ExperimentConfig, h: float) -> QuadRule:
    """Odd, origin-centered Y grid with the configured spacing and half-width about y_reach * h."""
    # exact multiples must not round up
    half = int(math.ceil(config.y_reach * h / config.y_spacing - 1e-9))
    return QuadRule(R=half * config.y_spacing, M=2 * half + 1)


def direct_rule(config: ExperimentConfig, w: QuadraticWeight, h: float) -> QuadRule:
    return QuadRule.for_weight(h, w.l, degree=config.N, M=config.M)


class ExperimentRunner:
    """Runs one configured experiment and assembles its Report."""

    def __init__(self, config: ExperimentConfig):
        self.config = config
        self.weight = quadratic_weight(config.weight)
        self.collector = WarningCollector()

    # --- plumbing ---

    def _map(self, fn: Callable[[float], T], values: Sequence[float]) -> List[T]:
        """fn over values, concurrently when threads > 1; results in input order."""
        if self.config.threads <= 1 or len(values) <= 1:
            return [fn(v) for v in values]
        with ThreadPoolExecutor(max_workers=self.config.threads) as pool:
            futures = [pool.submit(fn, v) for v in values]
            return [f.result() for f in futures]

    def _tolerances(self) -> Dict[str, float]:
        return {
            "uniform_ratio": UNIFORM_RATIO,
            "bound_blowup": BOUND_BLOWUP,
            "mass_ratio": MASS_RATIO_LIMIT,
            "min_points_per_wavelength": MIN_POINTS_PER_WAVELENGTH,
        }

    def _report(self, rows: List[Dict[str, Any]], summary: Dict[str, Any]) -> Report:
        provenance = Provenance(
            experiment=self.config.experiment,
            version=__version__,
            config=self.config.echo(),
            tolerances=self._tolerances(),
            seed=self.config.seed,
            threads=self.config.threads,
        )
        return Report(provenance=provenance, rows=rows, warnings=list(self.collector.messages), summary=summary)

    def run(self) -> Report:
        dispatch = {
            "verify": self.run_verify,
            "norm-sweep": self.run_norm_sweep,
            "gevrey-fit": self.run_gevrey_fit,
            "decomp-check": self.run_decomposition_check,
            "compose": self.run_compose,
        }
        package_logger = logging.getLogger("src")
        package_logger.addHandler(self.collector)
        try:
            with warnings.catch_warnings():
                # OscillationWarning is also logged, which is where the report picks it up
                warnings.simplefilter("ignore")
                logger.info(f"Running {self.config.experiment} over h={self.config.h_grid}")
                return dispatch[self.config.experiment]()
        finally:
            package_logger.removeHandler(self.collector)

    # --- experiments ---

    def run_verify(self) -> Report:
        from src.orchestration.verification_suite import VerificationSuite

        suite = VerificationSuite(self.config, self.weight)
        rows = suite.run()
        failed = [row["check"] for row in rows if not row["passed"] and not row["expected_failure"]]
        expected = [row["check"] for row in rows if not row["passed"] and row["expected_failure"]]
        summary = {"checks": len(rows), "failed": len(failed), "failed_checks": failed,
                   "expected_failures": expected, "passed": not failed}
        return self._report(rows, summary)

    def _operator_matrix(self, a: Symbol, h: float) -> OperatorMatrix:
        basis = phi0_basis(self.weight, h, self.config.N)
        route = self.config.route
        if route == "radial":
            return quantize_radial(a, basis)
        if route == "superposition":
            return quantize_superposition(a, basis, superposition_rule(a, h))
        return direct_operator_matrix(a, basis, direct_rule(self.config, self.weight, h))

    def _norm_row(self, h: float) -> NormSweepRow:
        config = self.config
        start = time.perf_counter()
        w = self.weight
        phi1 = perturbed_weight(w, config.perturbation, h, config.s, config.C)
        basis = phi0_basis(w, h, config.N)
        gram = weight_gram(basis, phi1, QuadRule.for_weight(h, w.l, degree=config.N, M=config.M))
        a = build_symbol(config, w, h)
        A = self._operator_matrix(a, h)
        report = operator_norm(A, gram)
        try:
            bound = fourier_bound(a, phi1, h)
            baseline = fourier_bound(a, quadratic_weight_function(w), h)
            flag = "bound_blowup" if bound > BOUND_BLOWUP * baseline else "ok"
        except UnsupportedSymbolError:
            bound, flag = math.nan, "ok"
        logger.info(f"Norm sweep h={h}: ||Op(a)|| = {report.norm:.6f} on {phi1.describe()}, bound {bound:.4g}")
        return NormSweepRow(h=h, s=config.s, C=config.C, N=config.N, M=config.M, R=gram_rule_radius(h, w, config),
                            route=config.route, norm=report.norm, bound=bound, ratio_flag=flag,
                            wall_time=time.perf_counter() - start)

    def run_norm_sweep(self) -> Report:
        rows = self._map(self._norm_row, self.config.h_grid)
        norms = np.array([row["norm"] for row in rows])
        ratio = float(norms.max() / norms.min()) if norms.min() > 0 else math.inf
        blowup = any(row["ratio_flag"] == "bound_blowup" for row in rows)
        summary = {"norm_ratio": ratio, "uniform": ratio < UNIFORM_RATIO, "bound_blowup": blowup,
                   "leading_norm": rows[0]["norm"]}
        logger.info(f"Norm sweep max/min ratio {ratio:.4f} over {len(rows)} h values")
        return self._report(rows, summary)

    def _echo(self, h: float, R: Optional[float] = None, s: Optional[float] = None) -> Dict[str, Any]:
        config = self.config
        return dict(h=h, N=config.N, M=config.M, R=config.R if R is None else R,
                    s=config.s if s is None else s, C=config.C)

    def _window_fit(self, entry: str, a: Symbol, window: str, s_nominal: Optional[float]):
        config = self.config
        partition = partition_of_unity(s_nominal or config.s, r=config.window_r) if window == "gevrey" else None
        radii = np.geomspace(config.radius_min, config.radius_max, config.radius_count)
        samples = windowed_decay_samples(a, radii, window, lattice_t_points(self.weight), partition,
                                         config.spacing)
        try:
            return fit_windowed_decay(samples, s=s_nominal)
        except FitError as exc:
            logger.warning(f"Decay fit for {entry} under the {window} window failed: {exc}")
            return None

    def _fit_row(self, entry: str) -> GevreyFitRow:
        config = self.config
        start = time.perf_counter()
        w = self.weight
        h = config.h_grid[0]
        name, _, index = entry.partition(":")
        if name == "bump":
            s_nominal: Optional[float] = float(index)
            a = bump_symbol(w, h, s=s_nominal, r=config.bump_r)
            other = "gaussian" if config.window == "gevrey" else "gevrey"
            windows = (config.window, other)
        else:
            # analytic symbols: a compactly supported window would impose its own Gevrey decay
            s_nominal = None
            a = build_symbol(config, w, h, kind=name)
            windows = ("gaussian",)
        fits = [self._window_fit(entry, a, window, s_nominal) for window in windows]
        fit = fits[0]
        if fit is None:
            values = dict(rho_fit=math.nan, C_fit=math.nan, residual=math.nan, flag="fit_failed",
                          beta_fit=math.nan, radius_min=math.nan, radius_max=math.nan)
        else:
            values = dict(rho_fit=fit.rho, C_fit=fit.C, residual=fit.residual, flag=fit.flag,
                          beta_fit=fit.beta, radius_min=fit.radius_min, radius_max=fit.radius_max)
        rho_other = fits[1].rho if len(fits) > 1 and fits[1] is not None else math.nan
        gap = abs(values["rho_fit"] - rho_other)
        if gap >= WINDOW_AGREEMENT and values["flag"] != "fit_failed":
            logger.warning(f"{entry}: {windows[0]} and {windows[1]} windows disagree on rho by {gap:.3f}")
            values["flag"] = "model_mismatch"
        elif len(fits) > 1 and fits[1] is not None and fits[1].flag == "model_mismatch" and values["flag"] == "ok":
            values["flag"] = "model_mismatch"
        return GevreyFitRow(symbol=entry, s_nominal=s_nominal, window=windows[0], rho_other_window=rho_other,
                            window_gap=gap, wall_time=time.perf_counter() - start,
                            **self._echo(h, s=s_nominal), **values)

    def run_gevrey_fit(self) -> Report:
        rows = self._map(self._fit_row, self.config.symbols)
        brackets = {}
        for row in rows:
            if row["s_nominal"] is not None and math.isfinite(row["rho_fit"]):
                brackets[row["symbol"]] = abs(row["rho_fit"] - 1.0 / row["s_nominal"]) <= 0.1
        summary = {"brackets_inverse_s": brackets,
                   "model_mismatch": [row["symbol"] for row in rows if row["flag"] == "model_mismatch"],
                   "window_agreement": WINDOW_AGREEMENT,
                   "t_grid": "5x5 lattice block, unit step"}
        return self._report(rows, summary)

    def _decomposition_row(self, h: float) -> DecompCheckRow:
        config = self.config
        start = time.perf_counter()
        w = self.weight
        basis = phi0_basis(w, h, config.N)
        a = build_symbol(config, w, h)
        superposition = quantize_superposition(a, basis, superposition_rule(a, h))
        direct = direct_operator_matrix(a, basis, direct_rule(config, w, h))
        decomposition = rank_one_decomposition(a, basis, decomposition_y_rule(config, h),
                                               QuadRule(R=config.t_R, M=config.t_M))
        diffs = {
            "direct_vs_superposition": direct.max_rel_diff(superposition),
            "rank_one_vs_superposition": decomposition.matrix.max_rel_diff(superposition),
            "rank_one_vs_direct": decomposition.matrix.max_rel_diff(direct),
        }
        mass = decomposition.mass
        v0 = ground_state(calibrate(bargmann_phase(config.weight), h).phase, h)
        coefficients = coherent_coefficients(v0, basis, QuadRule(R=config.t_R, M=config.t_M))
        logger.info(f"Decomposition check h={h}: route diffs {diffs}, M(h)/h = {mass.over_h:.6f}")
        return DecompCheckRow(**self._echo(h, R=direct_rule(config, w, h).R),
                              max_rel_diff=max(diffs.values()), route_diffs=diffs, M_h=mass.numeric,
                              M_h_over_h_n=mass.over_h, coherent_norm_over_sqrt_h=coefficients.scaled_norm,
                              wall_time=time.perf_counter() - start)

    def run_decomposition_check(self) -> Report:
        rows = self._map(self._decomposition_row, self.config.h_grid)
        scaled = np.array([row["M_h_over_h_n"] for row in rows])
        mass_ratio = float(scaled.max() / scaled.min())
        summary = {"max_rel_diff": max(row["max_rel_diff"] for row in rows), "mass_ratio": mass_ratio,
                   "mass_ratio_ok": mass_ratio < MASS_RATIO_LIMIT}
        return self._report(rows, summary)

    def run_compose(self) -> Report:
        config = self.config
        w = self.weight
        h = config.h_grid[0]
        a = gaussian_symbol(w, h, rate=config.symbol_rate, name="a")
        b = gaussian_symbol(w, h, rate=config.compose_b_rate, name="b")
        offsets = QuadRule(R=config.R, M=config.M)
        points = np.array(config.points)
        fourier = compose_fourier_at(a, b, points, superposition_rule(b, h, points=config.M))
        exact = compose_gaussian(a, b)(points)
        rows: List[ComposeRow] = []
        for x, f in zip(points, fourier):
            d = compose_direct(a, b, x, offsets)
            rows.append(ComposeRow(x_re=x.real, x_im=x.imag, direct_re=d.real, direct_im=d.imag,
                                   fourier_re=f.real, fourier_im=f.imag,
                                   rel_diff=abs(d - f) / max(abs(f), 1e-300), **self._echo(h)))
        summary = {"max_rel_diff": max(row["rel_diff"] for row in rows), "h": h,
                   "closed_form_max_rel_diff": float(np.max(np.abs(fourier - exact) / np.abs(exact)))}
        return self._report(rows, summary)


def gram_rule_radius(h: float, w: QuadraticWeight, config: ExperimentConfig) -> float:
    return QuadRule.for_weight(h, w.l, degree=config.N, M=config.M).R


def run_experiment(config: ExperimentConfig) -> Report:
    return ExperimentRunner(config).run()
