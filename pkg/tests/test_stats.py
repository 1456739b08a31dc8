import unittest
import warnings

import numpy as np
import scipy.integrate
import scipy.stats

from dynrmt.exceptions import SampleSizeError, UnfoldingWarning, WindowError
from dynrmt.spectral import Spectrum
from dynrmt.stats import (
    POISSON_MEAN_RATIO, UnfoldedSample, bulk_window, gap_ratios, gaussian_matrix, gue_oracle, ks_distance,
    oracle_sample, poisson_spacing_cdf, report, semicircle_cdf, semicircle_density, spacing_histogram, unfold,
    unfolding_map, wigner_surmise_cdf,
)

from .utils import LabTestCase


ENERGIES = np.linspace(-2, 2, 2001)
SEMICIRCLE = semicircle_density(ENERGIES)


def picket_fence(count, spacing=1.0):
    return Spectrum.from_eigenvalues(np.arange(count) * spacing)


class ReferenceTests(LabTestCase):
    def test_semicircle_cdf(self):
        self.assertAlmostEqual(semicircle_cdf(-2), 0.0)
        self.assertAlmostEqual(semicircle_cdf(0), 0.5)
        self.assertAlmostEqual(semicircle_cdf(5), 1.0)

    def test_semicircle_density_mass(self):
        self.assertAlmostEqual(scipy.integrate.trapezoid(SEMICIRCLE, ENERGIES), 1.0, delta=1e-3)

    def test_spacing_cdfs(self):
        self.assertAlmostEqual(poisson_spacing_cdf(0), 0.0)
        self.assertAlmostEqual(wigner_surmise_cdf(0), 0.0)
        self.assertAlmostEqual(wigner_surmise_cdf(10), 1.0)
        s = np.linspace(0, 5, 2001)
        self.assertTrue(np.all(np.diff(wigner_surmise_cdf(s)) >= 0))

    def test_ks_against_cdf(self):
        rng = np.random.default_rng(0)
        self.assertLess(ks_distance(rng.exponential(size=5000), poisson_spacing_cdf), 0.03)

    def test_ks_sample_from_reference(self):
        rng = np.random.default_rng(4)
        sample = rng.standard_normal(10000)
        self.assertLess(ks_distance(sample, scipy.stats.norm.cdf), 1.63 / 100 * 1.5)

    def test_ks_constant_sample(self):
        self.assertGreaterEqual(ks_distance(np.zeros(100), scipy.stats.norm.cdf), 0.5)

    def test_ks_is_scale_free(self):
        rng = np.random.default_rng(5)
        sample, reference = rng.standard_normal(2000), rng.standard_normal(3000) + 0.1
        self.assertAlmostEqual(
            ks_distance(np.exp(sample), np.exp(reference)), ks_distance(sample, reference), places=12
        )
        self.assertAlmostEqual(
            ks_distance(np.exp(sample), lambda y: scipy.stats.norm.cdf(np.log(y))),
            ks_distance(sample, scipy.stats.norm.cdf),
            places=12,
        )

    def test_ks_two_samples(self):
        self.assertEqual(ks_distance([1.0, 2.0], [1.0, 2.0]), 0.0)

    def test_ks_empty(self):
        with self.assertRaises(SampleSizeError):
            ks_distance([], poisson_spacing_cdf)
        with self.assertRaises(SampleSizeError):
            ks_distance([1.0], [])


class UnfoldTests(LabTestCase):
    def test_unfolding_map(self):
        mapping = unfolding_map([0, 1, 2], [1, 1, 1], (0, 2), 10)
        self.assertAllClose(mapping(np.array([0.0, 0.5, 2.0])), [0.0, 5.0, 20.0])

    def test_unit_spacing(self):
        "Evenly spaced levels unfold to unit spacing whatever the raw scale."
        energies = np.linspace(-1, 1, 101)
        rho = np.full(101, 0.5)
        spectra = [Spectrum.from_eigenvalues(np.linspace(-1, 1, 41)) for _ in range(3)]
        with warnings.catch_warnings():
            warnings.simplefilter('error')
            sample = unfold(spectra, (-1, 1), energies, rho)
        self.assertAllClose(sample.spacings, np.ones(120))
        self.assertAlmostEqual(sample.scale, 41 * 0.5 * 0.05)
        self.assertEqual(sample.trials, 3)

    def test_unfolded_levels_are_uniform(self):
        "Levels drawn from the semicircle unfold to uniform positions inside the window."
        rng = np.random.default_rng(6)
        grid = np.linspace(-2, 2, 20001)
        levels = np.interp(rng.random(16000), semicircle_cdf(grid), grid)
        with warnings.catch_warnings():
            warnings.simplefilter('error')
            sample = unfold([Spectrum.from_eigenvalues(levels)], (-1, 1), ENERGIES, SEMICIRCLE)
        self.assertAlmostEqual(sample.spacings.mean(), 1.0, delta=1e-12)

        mass = 16000 * (semicircle_cdf(1) - semicircle_cdf(-1))
        positions = sample.unfolded[0] * sample.scale / mass
        self.assertGreater(positions.size, 9000)
        self.assertLess(scipy.stats.kstest(positions, 'uniform').statistic, 0.02)

    def test_mismatched_density_warns(self):
        energies = np.linspace(-1, 1, 101)
        spectra = [Spectrum.from_eigenvalues(np.linspace(-1, 1, 41))]
        with self.assertWarns(UnfoldingWarning):
            sample = unfold(spectra, (-1, 1), energies, np.full(101, 0.25))
        self.assertAllClose(sample.spacings.mean(), 1.0)

    def test_window_leaves_bulk(self):
        with self.assertRaises(WindowError):
            unfold([picket_fence(10)], (-2, 2), ENERGIES, SEMICIRCLE)

    def test_window_without_grid(self):
        with self.assertRaises(WindowError):
            unfold([picket_fence(10)], (5, 6), ENERGIES, SEMICIRCLE)

    def test_bulk_window(self):
        spectra = gue_oracle(64, 4, seed=1)
        lo, hi = bulk_window(spectra, ENERGIES, SEMICIRCLE)
        self.assertLess(lo, 0)
        self.assertGreater(hi, 0)
        self.assertGreaterEqual(semicircle_density(lo), 0.05)
        self.assertGreaterEqual(semicircle_density(hi), 0.05)

    def test_bulk_window_outside_support(self):
        spectra = [Spectrum.from_eigenvalues(np.linspace(3, 4, 50))]
        with self.assertRaises(WindowError):
            bulk_window(spectra, ENERGIES, SEMICIRCLE)


class SpacingTests(LabTestCase):
    def test_picket_fence_ratios(self):
        ratios = gap_ratios([np.arange(50.0)], min_gaps=10)
        self.assertAllClose(ratios.ratios, np.ones(48))

    def test_too_few_gaps(self):
        with self.assertRaises(SampleSizeError):
            gap_ratios([np.arange(50.0)])

    def test_poisson_ratio(self):
        rng = np.random.default_rng(2)
        levels = np.cumsum(rng.exponential(size=20000))
        self.assertAlmostEqual(gap_ratios([levels]).mean, POISSON_MEAN_RATIO, delta=0.01)

    def test_histogram_mass(self):
        rng = np.random.default_rng(3)
        sample = UnfoldedSample(energies=[], unfolded=[np.cumsum(rng.exponential(size=3000))], window=(0, 1),
                                trials=1)
        histogram = spacing_histogram(sample)
        self.assertAlmostEqual(histogram.mass, 1.0)
        self.assertEqual(len(histogram.rows()), 40)

    def test_histogram_too_small(self):
        sample = UnfoldedSample(energies=[], unfolded=[np.arange(10.0)], window=(0, 1), trials=1)
        with self.assertRaises(SampleSizeError):
            spacing_histogram(sample)


class OracleTests(LabTestCase):
    def test_unitary_matrix(self):
        H = gaussian_matrix(40, np.random.default_rng(0), beta=2)
        self.assertHermitian(H)
        self.assertAlmostEqual(np.mean(np.abs(H) ** 2) * 40, 1.0, delta=0.1)

    def test_orthogonal_matrix(self):
        H = gaussian_matrix(40, np.random.default_rng(0), beta=1)
        self.assertTrue(np.isrealobj(H))
        self.assertAllClose(H, H.T)

    def test_bad_beta(self):
        with self.assertRaises(ValueError):
            gaussian_matrix(4, np.random.default_rng(0), beta=4)

    def test_oracle_is_deterministic(self):
        first = gue_oracle(32, 2, seed=5)
        second = gue_oracle(32, 2, seed=5)
        self.assertArrayEqual(first[1].eigenvalues, second[1].eigenvalues)

    def test_oracle_needs_size(self):
        with self.assertRaises(ValueError):
            gue_oracle(16, 2, seed=5)

    def test_semicircle_law(self):
        spectra = gue_oracle(512, 20, seed=7)
        pooled = np.concatenate([s.eigenvalues for s in spectra])
        self.assertLess(ks_distance(pooled, semicircle_cdf), 0.02)

    def test_trace_and_normalization(self):
        for spectrum in gue_oracle(128, 5, seed=8):
            self.assertLessEqual(abs(spectrum.eigenvalues.sum()) / 128, 0.2)
            self.assertAlmostEqual(np.mean(spectrum.eigenvalues ** 2), 1.0, delta=0.05)

    def test_unitary_ratio(self):
        sample = oracle_sample(200, 20, seed=1)
        self.assertAlmostEqual(gap_ratios(sample).mean, 0.60, delta=0.02)

    def test_orthogonal_ratio(self):
        sample = oracle_sample(200, 20, seed=1, beta=1)
        self.assertAlmostEqual(gap_ratios(sample).mean, 0.53, delta=0.02)

    def test_report(self):
        sample = oracle_sample(200, 20, seed=2)
        stat = report('gue', sample, {'poisson': poisson_spacing_cdf, 'surmise': wigner_surmise_cdf})
        self.assertLess(stat.ks['surmise'], stat.ks['poisson'])
        data = stat.to_json()
        self.assertEqual(data['label'], 'gue')
        self.assertEqual(len(data['histogram']['densities']), 40)


if __name__ == '__main__':
    unittest.main()
