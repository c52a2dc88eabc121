import math
import unittest
import warnings

import numpy as np
import numpy.testing as npt

from src.bargmann.bargmann_core import QuadRule
from src.calculus.fourier import (
    check_oscillation,
    closed_form,
    fourier_gaussian,
    fourier_prefactor,
    fourier_radial,
    fourier_symplectic,
    fourier_values,
    points_per_wavelength,
    twisted_convolution,
    twisted_convolution_at,
    twisted_convolution_gaussian,
)
from src.calculus.symbols import RadialSymbol, gaussian_symbol, phase_radius, plane_wave
from src.core.exceptions import ConfigError, OscillationWarning, UnsupportedSymbolError
from src.core.phase_space import linear_form, quadratic_weight


class TestClosedForms(unittest.TestCase):

    def setUp(self):
        self.h = 0.2
        rng = np.random.default_rng(6)
        self.x = 0.5 * (rng.standard_normal(15) + 1j * rng.standard_normal(15))

    def test_prefactor(self):
        self.assertAlmostEqual(fourier_prefactor(quadratic_weight("bargmann"), 0.5), 4.0 / math.pi)

    def test_fixed_point(self):
        for name in ("bargmann", "fbi"):
            w = quadratic_weight(name)
            a = gaussian_symbol(w, self.h, rate=1.0 / self.h)
            npt.assert_allclose(fourier_gaussian(a)(self.x), a(self.x), rtol=1e-10)

    def test_involution(self):
        w = quadratic_weight("fbi")
        a = gaussian_symbol(w, self.h, rate=2.0, center=0.2 - 0.1j, amplitude=0.5)
        npt.assert_allclose(fourier_gaussian(fourier_gaussian(a))(self.x), a(self.x), rtol=1e-9, atol=1e-14)

    def test_closed_form(self):
        w = quadratic_weight("bargmann")
        a = gaussian_symbol(w, self.h, rate=1.0)
        self.assertIs(closed_form(a), a)
        self.assertIsNone(closed_form(RadialSymbol(w, self.h, profile=np.exp)))
        self.assertIs(fourier_symplectic(a).__class__, a.__class__)


class TestQuadratureTransforms(unittest.TestCase):

    def setUp(self):
        self.h = 0.2
        self.w = quadratic_weight("bargmann")
        self.radial = RadialSymbol(self.w, self.h, profile=lambda r: np.exp(-np.asarray(r) ** 2))
        self.exact = fourier_gaussian(gaussian_symbol(self.w, self.h, rate=1.0))

    def test_grid_matches_closed_form(self):
        src = QuadRule(R=6.0 / (2.0 * math.sqrt(self.w.l)), M=201)
        dst = QuadRule(R=0.5, M=21)
        values = fourier_values(self.radial, dst, src)
        expected = self.exact(dst.grid)
        npt.assert_allclose(values, expected, atol=1e-8 * float(np.max(np.abs(expected))))

    def test_radial_transform_matches_closed_form(self):
        x = np.array([0.0, 0.1 + 0.05j, -0.3j, 0.45])
        values = fourier_radial(self.radial.profile, phase_radius(x, self.w), self.h, support=8.0)
        npt.assert_allclose(values, self.exact(x), rtol=1e-8, atol=1e-12)

    def test_radial_transform_needs_support(self):
        with self.assertRaises(ConfigError):
            fourier_radial(self.radial.profile, [0.1], self.h, support=math.inf)

    def test_missing_rule(self):
        with self.assertRaises(ConfigError):
            fourier_values(self.radial, QuadRule(R=0.5, M=5))

    def test_plane_wave_is_not_integrable(self):
        wave = plane_wave(linear_form(0.2, self.w), self.h)
        with self.assertRaises(UnsupportedSymbolError):
            fourier_values(wave, QuadRule(R=0.5, M=5), QuadRule(R=1.0, M=11))

    def test_coarse_grid_warns(self):
        rule = QuadRule(R=4.0, M=11)
        self.assertLess(points_per_wavelength(self.h, self.w, rule, 2.0), 6.0)
        with self.assertWarns(OscillationWarning):
            with self.assertLogs("src.calculus.fourier", level="WARNING"):
                check_oscillation(self.h, self.w, rule, 2.0, "coarse grid")

    def test_fine_grid_is_quiet(self):
        rule = QuadRule(R=1.0, M=401)
        with warnings.catch_warnings():
            warnings.simplefilter("error", OscillationWarning)
            ppw = check_oscillation(self.h, self.w, rule, 0.5, "fine grid")
        self.assertGreaterEqual(ppw, 6.0)


class TestTwistedConvolution(unittest.TestCase):

    def test_quadrature_matches_closed_form(self):
        h = 0.5
        w = quadratic_weight("bargmann")
        u = gaussian_symbol(w, h, rate=1.0, center=0.2)
        v = gaussian_symbol(w, h, rate=0.5, center=-0.1j)
        x = np.array([0.0, 0.3 + 0.2j, -0.4j])
        rule = QuadRule(R=4.0, M=161)
        expected = twisted_convolution_gaussian(u, v)(x)
        npt.assert_allclose(twisted_convolution_at(u, v, x, rule), expected, rtol=1e-8, atol=1e-12)

    def test_grid_symbol(self):
        h = 0.5
        w = quadratic_weight("bargmann")
        u = gaussian_symbol(w, h, rate=1.0)
        v = gaussian_symbol(w, h, rate=2.0, center=0.1)
        out = QuadRule(R=0.4, M=5)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", OscillationWarning)
            sampled = twisted_convolution(u, v, QuadRule(R=4.0, M=161), out)
        npt.assert_allclose(sampled.values, twisted_convolution_gaussian(u, v)(out.grid), rtol=1e-8, atol=1e-12)

    def test_narrow_unit_mass_kernel_is_an_approximate_identity(self):
        h = 0.2
        w = quadratic_weight("bargmann")
        u = gaussian_symbol(w, h, rate=1.0, center=0.1)
        rate = 2500.0
        v = gaussian_symbol(w, h, rate=rate, amplitude=rate / math.pi)
        x = np.array([0.0, 0.2 + 0.1j])
        npt.assert_allclose(twisted_convolution_at(u, v, x, QuadRule(R=0.15, M=121)), u(x), rtol=1e-2)

    def test_commutes_only_for_centered_radial_pairs(self):
        h = 0.5
        w = quadratic_weight("bargmann")
        x = np.array([0.0, 0.3 + 0.2j, -0.4j])
        rule = QuadRule(R=4.0, M=161)
        u = gaussian_symbol(w, h, rate=1.0)
        v = gaussian_symbol(w, h, rate=0.5)
        npt.assert_allclose(twisted_convolution_at(u, v, x, rule), twisted_convolution_at(v, u, x, rule),
                            rtol=1e-8, atol=1e-12)
        shifted = gaussian_symbol(w, h, rate=1.0, center=0.2)
        moved = gaussian_symbol(w, h, rate=0.5, center=-0.1j)
        uv = twisted_convolution_at(shifted, moved, x, rule)
        vu = twisted_convolution_at(moved, shifted, x, rule)
        self.assertGreater(float(np.max(np.abs(uv - vu))), 1e-3)

    def test_needs_integrable_factors(self):
        w = quadratic_weight("bargmann")
        u = gaussian_symbol(w, 0.5, rate=1.0)
        with self.assertRaises(UnsupportedSymbolError):
            twisted_convolution(u, plane_wave(linear_form(0.2, w), 0.5), QuadRule(R=1.0, M=11))


if __name__ == '__main__':
    unittest.main()
