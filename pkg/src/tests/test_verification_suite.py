import math
import unittest

from src.core.exceptions import IntegrabilityError
from src.core.phase_space import quadratic_weight
from src.orchestration.verification_suite import VerificationSuite
from src.utils.config_loader import ExperimentConfig


class TestVerificationSuite(unittest.TestCase):

    def setUp(self):
        self.suite = VerificationSuite(ExperimentConfig(), quadratic_weight("bargmann"))

    def _rows(self, module):
        return {row["check"]: row for row in self.suite.rows if row["module"] == module}

    def test_phase_space_checks_pass(self):
        self.suite.check_phase_space()
        rows = self._rows("phase_space")
        for name in ("lift_on_lambda", "form_real_on_lambda", "sigma_on_lambda", "fbi_lift_of_i"):
            self.assertIn(name, rows)
            self.assertTrue(rows[name]["passed"], rows[name])

    def test_schur_contrast_is_expected_failure(self):
        self.suite.check_schur()
        rows = self._rows("schur")
        self.assertTrue(rows["schur_stable_s2"]["passed"])
        self.assertTrue(rows["schur_stable_s4"]["passed"])
        contrast = rows["schur_divergence_s1.5"]
        self.assertFalse(contrast["passed"])
        self.assertTrue(contrast["expected_failure"])
        self.assertTrue(rows["schur_closed_form_s2"]["passed"])
        self.assertTrue(rows["schur_closed_form_s4"]["passed"])

    def test_schur_reads_kernel_constants_from_config(self):
        suite = VerificationSuite(ExperimentConfig(C=20.0, schur_k=2.0), quadratic_weight("bargmann"))
        suite.check_schur()
        row = {r["check"]: r for r in suite.rows}["schur_stable_s4"]
        self.assertIn("C=20, K=2", row["note"])
        self.assertNotEqual(row["residual"], self._schur_ratio(ExperimentConfig()))

    @staticmethod
    def _schur_ratio(config):
        suite = VerificationSuite(config, quadratic_weight("bargmann"))
        suite.check_schur()
        return {r["check"]: r for r in suite.rows}["schur_stable_s4"]["residual"]

    def test_composition_routes_agree_on_random_pairs(self):
        self.suite.check_composition()
        rows = self._rows("composition")
        for name in ("compose_direct_vs_closed_form", "compose_fourier_vs_closed_form", "compose_direct_vs_fourier"):
            self.assertTrue(rows[name]["passed"], rows[name])
        self.assertIn("10 Gaussian pairs, h=0.1", rows["compose_direct_vs_fourier"]["note"])

    def test_quantization_cross_route_at_acceptance_resolution(self):
        self.suite.check_quantization()
        row = self._rows("quantization")["direct_vs_superposition"]
        self.assertTrue(row["passed"], row)
        self.assertIn("h=0.1, N=12", row["note"])

    def test_guarded_records_failed_row(self):
        def boom():
            raise IntegrabilityError("box too small")

        self.suite._guarded("guard_group", "raising_check", boom)
        row = self.suite.rows[-1]
        self.assertFalse(row["passed"])
        self.assertFalse(row["expected_failure"])
        self.assertTrue(math.isnan(row["residual"]))
        self.assertIn("IntegrabilityError", row["note"])

    def test_same_seed_same_residuals(self):
        other = VerificationSuite(ExperimentConfig(), quadratic_weight("bargmann"))
        self.suite.check_phase_space()
        other.check_phase_space()
        self.assertEqual([r["residual"] for r in self.suite.rows], [r["residual"] for r in other.rows])


if __name__ == "__main__":
    unittest.main()
