import math
import unittest
import warnings

import numpy as np

from dynrmt.evalfn import (
    FourierSpec, correlation_mismatch, correlations, dyadic_dominance, evaluate, is_admissible,
    quadrature_correlations, symbol_from_correlations, symbol_g,
)
from dynrmt.exceptions import ConfigError, CorrelationMismatchWarning, MeanNonzeroError

from .utils import LabTestCase


class FourierSpecTests(LabTestCase):
    def test_zero_coefficients_dropped(self):
        self.assertEqual(FourierSpec(((1, 1.0), (2, 0.0))), FourierSpec.exponential())

    def test_sorted(self):
        spec = FourierSpec(((3, 1.0), (-1, 2.0)))
        self.assertEqual(spec.frequencies.tolist(), [-1, 3])

    def test_duplicate_frequency(self):
        with self.assertRaises(ConfigError):
            FourierSpec(((1, 1.0), (1, 2.0)))

    def test_all_zero(self):
        with self.assertRaises(ConfigError):
            FourierSpec(((1, 0.0),))

    def test_json(self):
        spec = FourierSpec.from_json({'coeffs': [[1, 1.0, 0.0], [2, 0.0, 0.5]]})
        self.assertEqual(spec.coeff(2), 0.5j)
        self.assertEqual(FourierSpec.from_json(spec.to_json()), spec)

    def test_bad_json(self):
        with self.assertRaises(ConfigError):
            FourierSpec.from_json({'coefficients': []})
        with self.assertRaises(ConfigError):
            FourierSpec.from_json({'coeffs': [[1, 'a']]})

    def test_mean_zero_rule(self):
        spec = FourierSpec(((0, 0.5), (1, 1.0)))
        with self.assertRaises(MeanNonzeroError) as context:
            spec.require_mean_zero()
        self.assertIn('mean-zero', str(context.exception))

    def test_is_real(self):
        self.assertTrue(FourierSpec.cosine().is_real)
        self.assertFalse(FourierSpec.exponential().is_real)

    def test_evaluate(self):
        x = np.linspace(0, 1, 17)
        self.assertAllClose(evaluate(FourierSpec.exponential(), x), np.exp(2j * np.pi * x))
        self.assertAllClose(evaluate(FourierSpec.cosine(), x).real, np.cos(2 * np.pi * x), atol=1e-15)

    def test_bounds(self):
        spec = FourierSpec(((1, 1.0), (2, -0.5j)))
        self.assertEqual(spec.l1_norm, 1.5)
        self.assertAlmostEqual(spec.derivative_bound, 2 * math.pi * 2)

    def test_rotation(self):
        spec = FourierSpec.exponential().rotated(math.pi / 2)
        self.assertAlmostEqual(spec.coeff(1), 1j)


class SymbolTests(LabTestCase):
    def test_exponential_symbol_is_one(self):
        x = np.linspace(0, 1, 50)
        self.assertAllClose(symbol_g(FourierSpec.exponential(), x), np.ones(50))

    def test_chain(self):
        "c_1 = 1, c_2 = a: g(x) = |1 + a e(x)|^2."
        a = 0.3
        spec = FourierSpec(((1, 1.0), (2, a)))
        x = np.linspace(0, 1, 33)
        self.assertAllClose(symbol_g(spec, x), np.abs(1 + a * np.exp(2j * np.pi * x)) ** 2)

    def test_two_sided_doubles_real_symbol(self):
        spec = FourierSpec.cosine()
        self.assertAlmostEqual(symbol_g(spec, 0.3, 'printed'), 0.25)
        self.assertAlmostEqual(symbol_g(spec, 0.3, 'two_sided'), 0.5)

    def test_fourier_form_matches_chains(self):
        spec = FourierSpec(((1, 1.0), (2, 0.3), (4, -0.2j), (3, 0.5)))
        x = np.linspace(0, 1, 101)
        data = correlations(spec, 4)
        self.assertAllClose(symbol_from_correlations(data, x), symbol_g(spec, x), rtol=0, atol=1e-13)

    def test_unknown_convention(self):
        with self.assertRaises(ConfigError):
            symbol_g(FourierSpec.exponential(), 0.1, 'sideways')


class CorrelationTests(LabTestCase):
    def test_exponential(self):
        data = correlations(FourierSpec.exponential(), 3)
        self.assertAllClose(data.phi, [1, 0, 0, 0])
        self.assertAllClose(data.psi, [0, 0, 0, 0])
        self.assertFalse(data.has_pseudo_covariance)
        self.assertTrue(data.is_constant_symbol)

    def test_chain_lags(self):
        spec = FourierSpec(((1, 1.0), (2, 0.3)))
        data = correlations(spec, 2)
        self.assertAllClose(data.phi, [1.09, 0.3, 0.0])
        self.assertEqual(data.phi_at(-1), np.conj(data.phi[1]))
        self.assertEqual(data.phi_at(5), 0)

    def test_range_covers_support(self):
        spec = FourierSpec(((1, 1.0), (16, 0.1)))
        self.assertEqual(correlations(spec, 1).J_max, 4)

    def test_bad_lag_count(self):
        with self.assertRaises(ValueError):
            correlations(FourierSpec.exponential(), 0)

    def test_cosine_pseudo_covariance(self):
        data = correlations(FourierSpec.cosine(), 2, 'two_sided')
        self.assertAlmostEqual(data.phi[0], 0.5)
        self.assertAlmostEqual(data.psi[0], 0.5)
        self.assertTrue(data.has_pseudo_covariance)

    def test_symbol_bounds(self):
        spec = FourierSpec(((1, 1.0), (2, 0.3)))
        data = correlations(spec, 2)
        self.assertAlmostEqual(data.g_min, 0.49, places=6)
        self.assertAlmostEqual(data.g_max, 1.69, places=6)

    def test_tail(self):
        data = correlations(FourierSpec(((1, 1.0), (2, 0.3), (4, 0.1))), 2)
        self.assertAlmostEqual(data.tail(0), 2 * (abs(data.phi[1]) + abs(data.phi[2])))
        self.assertEqual(data.tail(2), 0.0)

    def test_quadrature_agrees(self):
        spec = FourierSpec(((1, 1.0), (2, 0.3)))
        phi, psi = quadrature_correlations(spec, 2, samples=20000, seed=3)
        data = correlations(spec, 2)
        self.assertAllClose(phi, data.phi, rtol=0, atol=0.05)
        self.assertAllClose(psi, data.psi, rtol=0, atol=0.05)

    def test_no_mismatch_for_analytic_spec(self):
        spec = FourierSpec(((1, 1.0), (2, 0.3)))
        with warnings.catch_warnings():
            warnings.simplefilter('error')
            self.assertLess(correlation_mismatch(spec, 2), 1e-12)

    def test_mismatch_for_real_spec(self):
        with self.assertWarns(CorrelationMismatchWarning):
            gap = correlation_mismatch(FourierSpec.cosine(), 2, 'printed')
        self.assertAlmostEqual(gap, 0.25)


class AdmissibilityTests(LabTestCase):
    def test_exponential(self):
        verdict = is_admissible(FourierSpec.exponential())
        self.assertTrue(verdict)
        self.assertAlmostEqual(verdict.g_min, 1.0)

    def test_vanishing_symbol(self):
        "c_1 = 1, c_2 = 1: g(x) = |1 + e(x)|^2 vanishes at x = 1/2."
        verdict = is_admissible(FourierSpec(((1, 1.0), (2, 1.0))))
        self.assertFalse(verdict)
        self.assertAlmostEqual(verdict.witness, 0.5)
        self.assertIn('vanishes', verdict.reason)

    def test_mean_nonzero(self):
        verdict = is_admissible(FourierSpec(((0, 1.0), (1, 1.0))))
        self.assertFalse(verdict)
        self.assertIn('mean-nonzero', verdict.reason)

    def test_dominance(self):
        self.assertEqual(dyadic_dominance(FourierSpec(((1, 1.0), (2, 0.3)))), 1)
        self.assertIsNone(dyadic_dominance(FourierSpec(((1, 1.0), (2, 1.0)))))
        self.assertEqual(dyadic_dominance(FourierSpec(((1, 1.0), (2, 1.0), (3, 0.5)))), 3)


if __name__ == '__main__':
    unittest.main()
