import math
import unittest

import numpy as np
import numpy.testing as npt

from src.bargmann.gaussian_integrals import GaussianExponent, gaussian_integral, gaussian_overlap
from src.bargmann.holo import HoloFunction
from src.core.exceptions import IntegrabilityError
from src.core.phase_space import quadratic_weight


class TestGaussianExponent(unittest.TestCase):

    def setUp(self):
        self.E = GaussianExponent(alpha=0.1 + 0.2j, beta=-1.0, gamma=0.05j, delta=0.3, eps=-0.2j, zeta=0.1)
        rng = np.random.default_rng(5)
        self.z = rng.standard_normal(20) + 1j * rng.standard_normal(20)

    def test_standard_gaussian(self):
        self.assertAlmostEqual(gaussian_integral(GaussianExponent(beta=-1.0)), math.pi, places=12)

    def test_linear_terms(self):
        delta, eps = 0.3 + 0.2j, 0.1 - 0.4j
        value = gaussian_integral(GaussianExponent(beta=-1.0, delta=delta, eps=eps))
        self.assertAlmostEqual(value, math.pi * np.exp(delta * eps), places=12)

    def test_growing_exponent_raises(self):
        with self.assertRaises(IntegrabilityError):
            gaussian_integral(GaussianExponent(beta=1.0))

    def test_shifted(self):
        c = 0.4 - 0.7j
        npt.assert_allclose(self.E.shifted(c)(self.z), self.E(self.z - c), rtol=1e-12)

    def test_conjugate(self):
        npt.assert_allclose(self.E.conjugate()(self.z), np.conj(self.E(self.z)), rtol=1e-12)

    def test_real_form_reproduces_exponent(self):
        A, b = self.E.real_form()
        v = np.stack([self.z.real, self.z.imag], axis=1)
        values = -0.5 * np.einsum("bi,ij,bj->b", v, A, v) + v @ b + self.E.zeta
        npt.assert_allclose(values, self.E(self.z), rtol=1e-12)


class TestGaussianOverlap(unittest.TestCase):

    def setUp(self):
        self.h = 0.25
        self.bargmann = quadratic_weight("bargmann")
        self.fbi = quadratic_weight("fbi")

    def test_monomial_norms(self):
        # ||x^k||^2 = pi k! (h / 2L)^{k+1}
        for w in (self.bargmann, self.fbi):
            for k in range(5):
                u = HoloFunction.monomial(k, self.h, q2=w.q)
                expected = math.pi * math.factorial(k) * (self.h / (2.0 * w.l)) ** (k + 1)
                self.assertAlmostEqual(gaussian_overlap(u, u, w).real / expected, 1.0, places=10)

    def test_monomials_orthogonal(self):
        u = HoloFunction.monomial(2, self.h)
        v = HoloFunction.monomial(3, self.h)
        self.assertAlmostEqual(abs(gaussian_overlap(u, v, self.bargmann)), 0.0, places=12)

    def test_hermitian(self):
        u = HoloFunction(coeffs=[1.0, 0.5j], h=self.h, q1=0.2 - 0.1j, center=0.3)
        v = HoloFunction(coeffs=[0.2, 1.0, -0.3], h=self.h, q1=-0.4j, q0=0.1)
        self.assertAlmostEqual(gaussian_overlap(u, v, self.bargmann),
                               np.conj(gaussian_overlap(v, u, self.bargmann)), places=12)

    def test_zero_function(self):
        self.assertEqual(gaussian_overlap(HoloFunction.zero(self.h), HoloFunction.monomial(1, self.h),
                                          self.bargmann), 0.0)

    def test_growing_function_raises(self):
        u = HoloFunction.monomial(0, self.h, q2=0.6)
        with self.assertRaises(IntegrabilityError):
            gaussian_overlap(u, u, self.bargmann)


if __name__ == '__main__':
    unittest.main()
