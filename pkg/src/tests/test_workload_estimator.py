import unittest

from src.utils.config_loader import ExperimentConfig
from src.utils.workload_estimator import WorkloadEstimate, WorkloadEstimator


class TestWorkloadEstimator(unittest.TestCase):

    def setUp(self):
        self.estimator = WorkloadEstimator()

    def test_norm_sweep_counts_per_h(self):
        config = ExperimentConfig(experiment="norm-sweep", h_grid=[0.2, 0.1], N=3, M=10, route="direct")
        estimates = self.estimator.estimate_norm_sweep(config)
        self.assertEqual(len(estimates), 4)
        self.assertEqual(estimates[0].evaluations, 100 * 16)
        self.assertEqual(estimates[1].evaluations, 10 ** 4)

    def test_radial_route_has_no_kernel_stage(self):
        config = ExperimentConfig(experiment="norm-sweep", h_grid=[0.2], route="radial")
        self.assertEqual(len(self.estimator.estimate_norm_sweep(config)), 1)

    def test_dispatch_totals(self):
        for experiment in ("verify", "norm-sweep", "gevrey-fit", "decomp-check", "compose"):
            with self.subTest(experiment=experiment):
                result = self.estimator.estimate(ExperimentConfig(experiment=experiment))
                self.assertEqual(result["experiment"], experiment)
                self.assertEqual(result["total_evaluations"], sum(e.evaluations for e in result["estimates"]))
                self.assertGreater(result["estimated_seconds"], 0.0)

    def test_compose_scales_with_points(self):
        one = self.estimator.estimate(ExperimentConfig(experiment="compose", compose_points=["0"]))
        two = self.estimator.estimate(ExperimentConfig(experiment="compose", compose_points=["0", "0.1"]))
        self.assertEqual(two["total_evaluations"], 2 * one["total_evaluations"])

    def test_seconds_by_kind(self):
        self.assertAlmostEqual(WorkloadEstimate(1000, "x", "scalar").estimated_seconds, 0.1)
        self.assertAlmostEqual(WorkloadEstimate(1000, "x", "unknown").estimated_seconds, 1e-5)


if __name__ == '__main__':
    unittest.main()
