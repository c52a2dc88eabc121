import math
import unittest

import numpy as np
import numpy.testing as npt

from src.bargmann.bargmann_core import QuadRule, bargmann_phase, derive_weight, kappa_phi
from src.calculus.symbols import (
    GaussianSymbol,
    GridSampledSymbol,
    ModulatedSymbol,
    WindowedSymbol,
    constant_symbol,
    exponential_profile_symbol,
    gaussian_symbol,
    oscillator_symbol,
    phase_radius,
    plane_wave,
    projection_symbol,
    twisted_plane_wave,
    window_symbol,
)
from src.core.exceptions import ConfigError, UnsupportedSymbolError
from src.core.phase_space import linear_form, quadratic_weight, sigma_lambda_coords


class TestGaussianSymbols(unittest.TestCase):

    def setUp(self):
        self.h = 0.2
        self.w = quadratic_weight("fbi")
        rng = np.random.default_rng(4)
        self.x = rng.standard_normal(20) + 1j * rng.standard_normal(20)

    def test_values(self):
        a = gaussian_symbol(self.w, self.h, rate=1.5, center=0.3 - 0.1j, amplitude=2.0)
        expected = 2.0 * np.exp(-1.5 * 4.0 * self.w.l * np.abs(self.x - (0.3 - 0.1j)) ** 2)
        npt.assert_allclose(a(self.x), expected, rtol=1e-12)

    def test_negative_rate(self):
        with self.assertRaises(ConfigError):
            gaussian_symbol(self.w, self.h, rate=-1.0)

    def test_radial_profile(self):
        a = gaussian_symbol(self.w, self.h, rate=0.7)
        profile = a.radial_profile()
        npt.assert_allclose(profile(phase_radius(self.x, self.w)), a(self.x), rtol=1e-12)
        self.assertIsNone(gaussian_symbol(self.w, self.h, rate=0.7, center=1.0).radial_profile())

    def test_projection_and_window(self):
        self.assertAlmostEqual(complex(projection_symbol(self.w, self.h)(0.0)), 2.0)
        self.assertAlmostEqual(complex(window_symbol(self.w, self.h, t=0.5j)(0.5j)), 2.0)

    def test_times(self):
        a = gaussian_symbol(self.w, self.h, rate=1.0)
        b = gaussian_symbol(self.w, self.h, rate=0.5, center=0.2)
        npt.assert_allclose(a.times(b)(self.x), a(self.x) * b(self.x), rtol=1e-12)
        windowed = WindowedSymbol(self.w, self.h, window=a, base=b)
        npt.assert_allclose(windowed.closed_form()(self.x), windowed(self.x), rtol=1e-12)

    def test_times_needs_pure_gaussians(self):
        a = gaussian_symbol(self.w, self.h, rate=1.0)
        with_poly = GaussianSymbol(self.w, self.h, a.exponent, poly=np.array([[0.0, 1.0]]))
        with self.assertRaises(UnsupportedSymbolError):
            a.times(with_poly)

    def test_polynomial_prefactor(self):
        a = gaussian_symbol(self.w, self.h, rate=1.0)
        with_poly = GaussianSymbol(self.w, self.h, a.exponent, poly=np.array([[1.0, 0.0], [0.0, 2.0]]))
        expected = (1.0 + 2.0 * np.abs(self.x) ** 2) * a(self.x)
        npt.assert_allclose(with_poly(self.x), expected, rtol=1e-12)


class TestOtherSymbols(unittest.TestCase):

    def setUp(self):
        self.h = 0.25
        self.w = quadratic_weight("bargmann")
        rng = np.random.default_rng(8)
        self.x = rng.standard_normal(20) + 1j * rng.standard_normal(20)

    def test_plane_wave_is_unimodular(self):
        wave = plane_wave(linear_form(0.4 + 0.3j, self.w), self.h)
        npt.assert_allclose(np.abs(wave(self.x)), 1.0, rtol=1e-12)
        self.assertFalse(wave.integrable)

    def test_plane_wave_exponent(self):
        for w in (self.w, quadratic_weight("fbi")):
            wave = plane_wave(linear_form(-0.2 + 0.5j, w), self.h, amplitude=0.5j)
            npt.assert_allclose(np.exp(wave.phase_exponent()(self.x)), wave(self.x), rtol=1e-10)

    def test_twisted_plane_wave(self):
        y = 0.3 - 0.2j
        expected = np.exp(2j * sigma_lambda_coords(self.x, y, self.w) / self.h)
        npt.assert_allclose(np.exp(twisted_plane_wave(y, self.w, self.h)(self.x)), expected, rtol=1e-10)

    def test_modulated_closed_form(self):
        base = gaussian_symbol(self.w, self.h, rate=1.0, center=0.1j)
        symbol = ModulatedSymbol(self.w, self.h, form=linear_form(0.3, self.w), base=base, shift=0.15)
        npt.assert_allclose(symbol.as_gaussian()(self.x), symbol(self.x), rtol=1e-10, atol=1e-14)

    def test_radial_symbols(self):
        npt.assert_allclose(constant_symbol(self.w, self.h, 2.0)(self.x), 2.0)
        self.assertFalse(constant_symbol(self.w, self.h).integrable)
        a = exponential_profile_symbol(self.w, self.h)
        npt.assert_allclose(a(self.x), np.exp(-phase_radius(self.x, self.w)), rtol=1e-12)
        self.assertTrue(a.integrable)

    def test_grid_sampled_interpolates(self):
        rule = QuadRule(R=2.0, M=81)
        a = gaussian_symbol(self.w, self.h, rate=0.5)
        sampled = GridSampledSymbol(self.w, self.h, rule=rule, values=a(rule.grid))
        inner = 0.8 * self.x / np.max(np.abs(self.x))
        npt.assert_allclose(sampled(inner), a(inner), atol=1e-5)
        self.assertIs(sampled.sample(rule), sampled.values)
        self.assertEqual(complex(sampled(np.array([5.0 + 5.0j]))[0]), 0.0)

    def test_grid_sampled_shape_mismatch(self):
        with self.assertRaises(ConfigError):
            GridSampledSymbol(self.w, self.h, rule=QuadRule(R=1.0, M=5), values=np.zeros((4, 4)))

    def test_oscillator_symbol(self):
        for name in ("bargmann", "fbi"):
            phase = bargmann_phase(name)
            w = derive_weight(phase)
            a = oscillator_symbol(phase, w, self.h)
            for y, eta in ((0.3, -0.7), (1.2, 0.4), (-0.5, 0.0)):
                point = kappa_phi(y, eta, phase)
                self.assertAlmostEqual(complex(a(point.x[0])), y * y + eta * eta, places=10)


if __name__ == '__main__':
    unittest.main()
