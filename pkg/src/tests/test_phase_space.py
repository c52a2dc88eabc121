import unittest

import numpy as np
import numpy.testing as npt

from src.core.exceptions import ConfigError, OffLambdaError
from src.core.phase_space import (
    PhasePoint,
    QuadraticWeight,
    is_on_lambda,
    lift,
    linear_form,
    quadratic_weight,
    sigma,
    sigma_lambda_coords,
    sigma_on_lambda,
)


class TestQuadraticWeight(unittest.TestCase):

    def setUp(self):
        self.bargmann = quadratic_weight("bargmann")
        self.fbi = quadratic_weight("fbi")

    def test_presets(self):
        self.assertEqual(self.bargmann.q, 0.0)
        self.assertAlmostEqual(self.bargmann.l, 0.5)
        self.assertAlmostEqual(self.fbi.q, -0.25)
        self.assertAlmostEqual(self.fbi.l, 0.25)

    def test_values(self):
        x = np.array([1.0 + 2.0j, -0.5j, 3.0])
        npt.assert_allclose(self.bargmann.value(x), np.abs(x) ** 2 / 2, atol=1e-14)
        npt.assert_allclose(self.fbi.value(x), x.imag ** 2 / 2, atol=1e-14)

    def test_density_is_four_l(self):
        self.assertAlmostEqual(self.bargmann.density(), 2.0)
        self.assertAlmostEqual(self.fbi.density(), 1.0)

    def test_rejects_non_positive_levi_form(self):
        with self.assertRaises(ConfigError):
            QuadraticWeight(Q=np.array([[0.0]]), L=np.array([[-1.0]]))

    def test_unknown_preset(self):
        with self.assertRaises(ConfigError):
            quadratic_weight("gaussian")


class TestLambda(unittest.TestCase):

    def setUp(self):
        self.w = quadratic_weight("bargmann")
        self.rng = np.random.default_rng(1)

    def test_lift_is_on_lambda(self):
        for x in self.rng.standard_normal(20) + 1j * self.rng.standard_normal(20):
            self.assertTrue(is_on_lambda(lift(x, self.w), self.w))

    def test_fbi_lift_of_i(self):
        point = lift(1j, quadratic_weight("fbi"))
        self.assertAlmostEqual(complex(point.x[0]), 1j)
        self.assertAlmostEqual(complex(point.xi[0]), -1.0)

    def test_sigma_on_lambda_example(self):
        X = lift(1.0, self.w)
        Xs = lift(1j, self.w)
        self.assertAlmostEqual(sigma_on_lambda(X, Xs, self.w), 2.0)
        self.assertAlmostEqual(sigma(X, Xs), 2.0)

    def test_sigma_real_on_lambda(self):
        x = self.rng.standard_normal(10) + 1j * self.rng.standard_normal(10)
        y = self.rng.standard_normal(10) + 1j * self.rng.standard_normal(10)
        for w in (self.w, quadratic_weight("fbi")):
            values = np.array([sigma(lift(a, w), lift(b, w)) for a, b in zip(x, y)])
            npt.assert_allclose(values.imag, 0.0, atol=1e-12)
            npt.assert_allclose(values.real, sigma_lambda_coords(x, y, w), atol=1e-12)

    def test_sigma_off_lambda_raises(self):
        off = PhasePoint(1.0, 5.0)
        with self.assertRaises(OffLambdaError):
            sigma_on_lambda(off, lift(0.5, self.w), self.w)

    def test_linear_form_real_on_lambda(self):
        form = linear_form(0.3 - 0.7j, quadratic_weight("fbi"))
        x = self.rng.standard_normal(30) + 1j * self.rng.standard_normal(30)
        values = form(x, form.weight.xi(x))
        npt.assert_allclose(values.imag, 0.0, atol=1e-12)

    def test_hamilton_field_lies_above_xstar(self):
        form = linear_form(0.2 + 0.4j, self.w)
        H = form.hamilton
        self.assertAlmostEqual(complex(H.x[0]), 0.2 + 0.4j)
        self.assertTrue(is_on_lambda(H, self.w))


if __name__ == '__main__':
    unittest.main()
