#!/usr/bin/env python3
"""
Workload Estimator Module

Estimates how many kernel evaluations each experiment will perform, from the
grid sizes in its configuration, so the CLI can announce the cost of a run
before starting it.
"""

from dataclasses import dataclass
from typing import Any, Dict, List

from src.utils.config_loader import ExperimentConfig


@dataclass
class WorkloadEstimate:
    """Kernel evaluations for one stage of an experiment."""
    evaluations: int
    operation_name: str
    kind: str = "quadrature"

    @property
    def estimated_seconds(self) -> float:
        """Rough wall time on one core."""
        return self.evaluations * WorkloadEstimator.SECONDS_PER_EVALUATION.get(self.kind, 1e-8)


class WorkloadEstimator:
    """
    Counts evaluations per experiment stage. The counts are exact for the grids
    involved; the per-evaluation timings are desk-scale averages.
    """

    SECONDS_PER_EVALUATION = {
        "quadrature": 2e-8,  # one weighted sample times one basis column
        "overlap": 4e-7,  # one closed-form Wick overlap entry
        "fourier": 5e-9,  # one separable transform multiply-add
        "scalar": 1e-4,  # one adaptive 1-D integral
    }

    def estimate_norm_sweep(self, config: ExperimentConfig) -> List[WorkloadEstimate]:
        size = config.N + 1
        estimates = []
        for h in config.h_grid:
            estimates.append(WorkloadEstimate(config.M ** 2 * size ** 2, f"Gram matrix at h={h}"))
            if config.route == "superposition":
                estimates.append(WorkloadEstimate(config.M ** 2 * size ** 2, f"Superposition at h={h}", "overlap"))
            elif config.route == "direct":
                estimates.append(WorkloadEstimate(config.M ** 4, f"Direct kernel at h={h}"))
        return estimates

    def estimate_decomposition(self, config: ExperimentConfig) -> List[WorkloadEstimate]:
        size = config.N + 1
        windows = config.t_M ** 2
        estimates = []
        for h in config.h_grid:
            y_points = (2 * int(config.y_reach * h / config.y_spacing) + 3) ** 2
            terms = windows * y_points
            estimates.append(WorkloadEstimate(2 * windows * y_points * 4, f"Windowed transforms at h={h}", "fourier"))
            estimates.append(WorkloadEstimate(terms * size ** 2, f"Rank-one terms at h={h}"))
            estimates.append(WorkloadEstimate(config.M ** 4, f"Direct route at h={h}"))
        return estimates

    def estimate_gevrey_fit(self, config: ExperimentConfig) -> List[WorkloadEstimate]:
        n = int(2.0 * max(config.bump_r, 6.0) / config.spacing) + 1
        per_symbol = 25 * (n * n + 2 * config.radius_count * n)
        return [WorkloadEstimate(per_symbol, f"Windowed decay of {entry}", "fourier") for entry in config.symbols]

    def estimate_compose(self, config: ExperimentConfig) -> List[WorkloadEstimate]:
        per_point = 2 * config.M ** 3 + config.M ** 2
        return [WorkloadEstimate(per_point * len(config.compose_points), "Direct composition", "fourier"),
                WorkloadEstimate(config.M ** 2 * len(config.compose_points), "Fourier-side composition")]

    def estimate_verify(self, config: ExperimentConfig) -> List[WorkloadEstimate]:
        size = config.N + 1
        return [WorkloadEstimate(config.draws * len(config.h_grid) * config.M ** 2, "Unitarity draws"),
                WorkloadEstimate(config.M ** 2 * size ** 2, "Cross-route quantization", "overlap"),
                WorkloadEstimate(3 * 4 * len(config.h_grid), "Schur integrals", "scalar")]

    def estimate(self, config: ExperimentConfig) -> Dict[str, Any]:
        dispatch = {
            "verify": self.estimate_verify,
            "norm-sweep": self.estimate_norm_sweep,
            "gevrey-fit": self.estimate_gevrey_fit,
            "decomp-check": self.estimate_decomposition,
            "compose": self.estimate_compose,
        }
        estimates = dispatch[config.experiment](config)
        return {
            "experiment": config.experiment,
            "total_evaluations": sum(e.evaluations for e in estimates),
            "estimated_seconds": sum(e.estimated_seconds for e in estimates),
            "estimates": estimates,
        }
