import math
import unittest

import numpy as np
import numpy.testing as npt

from src.bargmann.bargmann_core import QuadRule, phi0_basis
from src.bargmann.gaussian_integrals import gaussian_overlap
from src.bargmann.magnetic import (
    MagneticTranslation,
    apply,
    compose_cocycle,
    flow_norm_derivative,
    hj_residual,
    hj_solution,
    modulus_phase_form,
    modulus_transport_residual,
    norm_bound_on_weighted,
    plane_wave_operator,
    prefactor_identity_residual,
    quantization_multiplication,
    translation_matrix,
    translation_overlap_bound,
    transport_weight,
    weyl_translation,
)
from src.bargmann.weights import perturbed_weight, quadratic_weight_function
from src.core.exceptions import ConfigError
from src.core.phase_space import linear_form, quadratic_weight


class TestMagneticTranslation(unittest.TestCase):

    def setUp(self):
        self.h = 0.3
        self.w = quadratic_weight("fbi")
        self.basis = phi0_basis(self.w, self.h, 4)
        self.u = self.basis.function(1) + self.basis.function(3).scale(0.5j)
        rng = np.random.default_rng(2)
        self.x = rng.standard_normal(30) + 1j * rng.standard_normal(30)

    def test_invalid_sign(self):
        with self.assertRaises(ConfigError):
            MagneticTranslation(linear_form(0.1, self.w), self.h, sign=2)

    def test_unitary_on_phi0(self):
        t = MagneticTranslation(linear_form(0.4 - 0.3j, self.w), self.h)
        moved = t(self.u)
        self.assertAlmostEqual(gaussian_overlap(moved, moved, self.w).real,
                               gaussian_overlap(self.u, self.u, self.w).real, places=10)

    def test_inverse(self):
        t = MagneticTranslation(linear_form(0.7 + 0.2j, self.w), self.h)
        npt.assert_allclose(t.inverse()(t(self.u))(self.x), self.u(self.x), rtol=1e-10, atol=1e-12)

    def test_cocycle_law(self):
        tY = weyl_translation(0.3 + 0.1j, self.w, self.h)
        tZ = weyl_translation(-0.2 + 0.4j, self.w, self.h)
        combined, phase = compose_cocycle(tY, tZ)
        self.assertAlmostEqual(abs(phase), 1.0, places=12)
        npt.assert_allclose(tY(tZ(self.u))(self.x), phase * combined(self.u)(self.x), rtol=1e-10, atol=1e-12)

    def test_cocycle_rejects_mixed_h(self):
        with self.assertRaises(ConfigError):
            compose_cocycle(weyl_translation(0.1, self.w, 0.3), weyl_translation(0.1, self.w, 0.2))

    def test_apply_rejects_mixed_h(self):
        with self.assertRaises(ConfigError):
            apply(weyl_translation(0.1, self.w, 0.2), self.u)

    def test_modulus_transport(self):
        t = MagneticTranslation(linear_form(0.5 + 0.5j, self.w), self.h)
        self.assertLess(modulus_transport_residual(t, self.u, self.x), 1e-10)

    def test_prefactor_identity(self):
        for w in (self.w, quadratic_weight("bargmann")):
            self.assertLess(prefactor_identity_residual(linear_form(0.3 - 0.6j, w), self.x), 1e-12)

    def test_translation_constant_is_unimodular(self):
        check = modulus_phase_form(linear_form(0.25 + 0.4j, self.w), self.u, self.x)
        self.assertLess(check.spread, 1e-8)
        self.assertLess(check.modulus_error, 1e-8)

    def test_translation_matrix_entries(self):
        t = MagneticTranslation(linear_form(0.2 - 0.1j, self.w), self.h)
        T = translation_matrix(t, self.basis)
        for k in (0, 2):
            moved = t(self.basis.function(k))
            for j in range(self.basis.size):
                self.assertAlmostEqual(T[j, k], gaussian_overlap(moved, self.basis.function(j), self.w), places=10)

    def test_plane_wave_operator_is_inverse_sign(self):
        form = linear_form(0.3j, self.w)
        self.assertEqual(plane_wave_operator(form, self.h).shift, -0.3j)

    def test_overlap_bound(self):
        form = linear_form(0.4 - 0.2j, self.w)
        v = self.basis.function(2)
        rule = QuadRule.for_weight(self.h, self.w.l, degree=8, M=201)
        value, bound = translation_overlap_bound(form, self.u, v, rule)
        self.assertGreater(value, 0.0)
        self.assertLessEqual(value, bound * (1.0 + 1e-8))


class TestWeightedTranslation(unittest.TestCase):

    def setUp(self):
        self.h = 0.3
        self.w = quadratic_weight("bargmann")
        self.phi1 = perturbed_weight(self.w, "sine", self.h, 2.0, 4.0)
        self.u = phi0_basis(self.w, self.h, 2).function(2)
        self.rule = QuadRule.for_weight(self.h, self.w.l, degree=6, M=161)

    def test_transport_weight(self):
        x = np.array([0.2, 1.0 - 1.0j])
        phi2 = transport_weight(self.phi1, 0.5)
        npt.assert_allclose(phi2.f(x), self.phi1.f(x - 0.5))

    def test_hj_solution_interpolates_transport(self):
        x = np.array([0.2, 1.0 - 1.0j])
        xstar = 0.4 - 0.2j
        npt.assert_allclose(hj_solution(self.phi1, xstar, 0.0).f(x), self.phi1.f(x))
        npt.assert_allclose(hj_solution(self.phi1, xstar, 1.0).f(x), transport_weight(self.phi1, xstar).f(x))

    def test_hamilton_jacobi(self):
        x = np.array([0.2 + 0.1j, -1.0 + 0.5j, 0.7j])
        t = np.array([0.1, 0.5, 0.9])
        self.assertLess(float(np.max(hj_residual(self.phi1, 0.4 - 0.2j, x, t))), 1e-6)

    def test_quantization_multiplication(self):
        form = linear_form(0.2 + 0.3j, self.w)
        lhs, rhs = quantization_multiplication(form, self.u, self.phi1, self.rule)
        self.assertAlmostEqual(lhs, rhs, places=7)

    def test_norm_is_constant_along_the_flow(self):
        form = linear_form(0.3 - 0.1j, self.w)
        self.assertLess(abs(flow_norm_derivative(form, self.u, self.phi1, self.rule)), 1e-5)

    def test_norm_bound(self):
        t = MagneticTranslation(linear_form(1.0, self.w), self.h)
        bound = norm_bound_on_weighted(t, self.phi1)
        self.assertGreaterEqual(bound.bound, 1.0)
        self.assertLessEqual(bound.sampled_exponent, bound.envelope_exponent + 1e-12)
        self.assertEqual(norm_bound_on_weighted(t, quadratic_weight_function(self.w)).bound, 1.0)
        self.assertIsInstance(bound.bound, float)
        self.assertAlmostEqual(bound.bound, math.exp(bound.sampled_exponent))


if __name__ == '__main__':
    unittest.main()
