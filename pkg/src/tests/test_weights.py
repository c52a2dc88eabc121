import unittest

import numpy as np
import numpy.testing as npt

from src.bargmann.weights import (
    PERTURBATIONS,
    WeightFunction,
    get_perturbation,
    perturbed_weight,
    quadratic_weight_function,
)
from src.core.exceptions import ConfigError
from src.core.phase_space import quadratic_weight


class TestPerturbations(unittest.TestCase):

    def setUp(self):
        rng = np.random.default_rng(11)
        self.x = 6.0 * (rng.standard_normal(200) + 1j * rng.standard_normal(200))

    def test_sup_bounds_hold(self):
        for name, g in PERTURBATIONS.items():
            g_s, g_t = g.gradient(self.x)
            self.assertLessEqual(float(np.max(np.abs(g(self.x)))), g.b0 + 1e-12, name)
            self.assertLessEqual(float(np.max(np.hypot(g_s, g_t))), g.b1 + 1e-12, name)

    def test_gradients_match_difference_quotients(self):
        step = 1e-6
        for name in ("tanh_bump", "sine"):
            g = get_perturbation(name)
            g_s, g_t = g.gradient(self.x)
            npt.assert_allclose((g(self.x + step) - g(self.x - step)) / (2 * step), g_s, atol=1e-6)
            npt.assert_allclose((g(self.x + 1j * step) - g(self.x - 1j * step)) / (2 * step), g_t, atol=1e-6)

    def test_unknown_perturbation(self):
        with self.assertRaises(ConfigError):
            get_perturbation("cosine")


class TestWeightFunction(unittest.TestCase):

    def setUp(self):
        self.base = quadratic_weight("bargmann")
        self.x = np.array([0.1 + 0.2j, -1.5j, 2.0, -0.7 + 0.3j])

    def test_quadratic_weight_function(self):
        phi = quadratic_weight_function(self.base)
        self.assertTrue(phi.is_quadratic)
        npt.assert_allclose(phi.value(self.x), self.base.value(self.x))
        npt.assert_allclose(phi.xi(self.x), self.base.xi(self.x))
        self.assertEqual(phi.b0, 0.0)

    def test_perturbed_scale(self):
        h, s, C = 0.04, 2.0, 5.0
        phi = perturbed_weight(self.base, "sine", h, s, C)
        scale = h ** 0.5 / C
        self.assertAlmostEqual(phi.scale, scale)
        self.assertFalse(phi.is_quadratic)
        npt.assert_allclose(phi.f(self.x), scale * np.sin(self.x.real))
        self.assertAlmostEqual(phi.b1, scale)

    def test_perturbed_dx(self):
        phi = perturbed_weight(self.base, "tanh_bump", 0.1, 2.0, 1.0)
        step = 1e-6
        d_s = (phi.value(self.x + step) - phi.value(self.x - step)) / (2 * step)
        d_t = (phi.value(self.x + 1j * step) - phi.value(self.x - 1j * step)) / (2 * step)
        npt.assert_allclose(phi.dx(self.x), 0.5 * (d_s - 1j * d_t), atol=1e-6)

    def test_transported(self):
        phi = perturbed_weight(self.base, "tanh_bump", 0.1, 2.0, 1.0)
        moved = phi.transported(0.5 - 0.25j)
        npt.assert_allclose(moved.f(self.x), phi.f(self.x - (0.5 - 0.25j)))
        self.assertIn("tanh_bump", moved.describe())

    def test_invalid_coupling(self):
        with self.assertRaises(ConfigError):
            perturbed_weight(self.base, "sine", 0.1, 2.0, 0.0)
        with self.assertRaises(ConfigError):
            perturbed_weight(self.base, "sine", 0.1, 1.0, 1.0)

    def test_zero_perturbation_is_quadratic(self):
        phi = WeightFunction(base=self.base, perturbation=get_perturbation("zero"), scale=0.3)
        self.assertTrue(phi.is_quadratic)
        npt.assert_allclose(phi.f(self.x), 0.0)


if __name__ == '__main__':
    unittest.main()
