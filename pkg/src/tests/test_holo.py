import unittest

import numpy as np
import numpy.testing as npt

from src.bargmann.holo import HoloFunction
from src.core.exceptions import ConfigError


class TestHoloFunction(unittest.TestCase):

    def setUp(self):
        self.h = 0.5
        self.u = HoloFunction(coeffs=[1.0, 2.0 - 1.0j, 0.5], h=self.h, q2=0.1, q1=0.2 + 0.1j, q0=0.3,
                              center=0.4 - 0.2j)
        rng = np.random.default_rng(3)
        self.x = rng.standard_normal(25) + 1j * rng.standard_normal(25)

    def test_rejects_non_positive_h(self):
        with self.assertRaises(ConfigError):
            HoloFunction(coeffs=[1.0], h=0.0)

    def test_degree_and_zero(self):
        self.assertEqual(self.u.degree, 2)
        self.assertTrue(HoloFunction.zero(self.h).is_zero)
        self.assertEqual(HoloFunction.monomial(4, self.h).degree, 4)

    def test_translate(self):
        z = 0.7 + 0.3j
        npt.assert_allclose(self.u.translate(z)(self.x), self.u(self.x - z), rtol=1e-12)

    def test_recenter_keeps_values(self):
        npt.assert_allclose(self.u.recenter(-1.0 + 0.5j)(self.x), self.u(self.x), rtol=1e-11)

    def test_multiply_exp(self):
        moved = self.u.multiply_exp(a2=-0.05, a1=0.3j, a0=0.1)
        expected = self.u(self.x) * np.exp((-0.05 * self.x ** 2 + 0.3j * self.x + 0.1) / self.h)
        npt.assert_allclose(moved(self.x), expected, rtol=1e-12)

    def test_multiply_polynomial(self):
        product = self.u.multiply_polynomial([1.0, 2.0, -0.5j])
        expected = self.u(self.x) * (1.0 + 2.0 * self.x - 0.5j * self.x ** 2)
        npt.assert_allclose(product(self.x), expected, rtol=1e-11)

    def test_hD_matches_difference_quotient(self):
        step = 1e-5
        derivative = (self.u(self.x + step) - self.u(self.x - step)) / (2.0 * step)
        npt.assert_allclose(self.u.hD()(self.x), -1j * self.h * derivative, rtol=1e-6)

    def test_weighted(self):
        phi = np.abs(self.x) ** 2 / 2
        npt.assert_allclose(self.u.weighted(self.x, phi), self.u(self.x) * np.exp(-phi / self.h), rtol=1e-12)

    def test_sum(self):
        v = HoloFunction(coeffs=[0.0, 1.0], h=self.h, q2=0.1, q1=0.2 + 0.1j, q0=0.3)
        npt.assert_allclose((self.u + v)(self.x), self.u(self.x) + v(self.x), rtol=1e-11)
        npt.assert_allclose((self.u - v)(self.x), self.u(self.x) - v(self.x), rtol=1e-10, atol=1e-12)

    def test_sum_requires_shared_exponent(self):
        with self.assertRaises(ConfigError):
            _ = self.u + HoloFunction.monomial(1, self.h)


if __name__ == '__main__':
    unittest.main()
