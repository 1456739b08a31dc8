"""
Bulk universality through its numerical proxies: gap ratios and unfolded
spacing distributions against the Gaussian oracles, for the matrices,
their resampled twins, the Ornstein-Uhlenbeck flow and a Poisson control.
"""
import math
import unittest

import numpy as np

from dynrmt.config import EnsembleConfig
from dynrmt.ensemble import build_X, ou_interpolate
from dynrmt.evalfn import FourierSpec, correlations
from dynrmt.lab import cmd_flow, cmd_universality
from dynrmt.stats import POISSON_MEAN_RATIO

from ..utils import COSINE, EXPONENTIAL, LabTestCase, capture_output, output_dir, run_config, scale


CHAIN = FourierSpec(((1, 1.0), (2, 0.3)))

RATIO_TOLERANCE = scale(0.025, 0.01)
KS_TOLERANCE = scale(0.06, 0.03)


def universality(coeffs, control=None, **fields):
    config = run_config(coeffs, N=scale(128, 512), trials=scale(40, 50), seed=5, **fields)
    with capture_output():
        return cmd_universality(config, output_dir(), control=control)


class ExponentialTests(LabTestCase):
    @classmethod
    def setUpClass(cls):
        cls.reports = universality(EXPONENTIAL, control='poisson')

    def test_gap_ratio(self):
        gue = self.reports['gue'].mean_ratio
        for name in ('X', 'Y'):
            with self.subTest(name=name):
                self.assertLessEqual(abs(self.reports[name].mean_ratio - gue), RATIO_TOLERANCE)

    def test_spacing_distribution(self):
        for name in ('X', 'Y'):
            with self.subTest(name=name):
                self.assertLessEqual(self.reports[name].ks['gue'], KS_TOLERANCE)

    def test_poisson_control(self):
        poisson = self.reports['poisson'].mean_ratio
        self.assertLessEqual(abs(poisson - POISSON_MEAN_RATIO), scale(0.02, 0.01))
        self.assertGreaterEqual(self.reports['X'].mean_ratio - poisson, 0.15)

    def test_unfolding_is_consistent(self):
        self.assertAlmostEqual(self.reports['X'].scale, 1.0, delta=0.1)


class CosineTests(LabTestCase):
    "A real evaluation function lands in the orthogonal class."

    @classmethod
    def setUpClass(cls):
        cls.reports = universality(COSINE, convention='two_sided')

    def test_gap_ratio(self):
        goe = self.reports['goe'].mean_ratio
        self.assertLessEqual(abs(self.reports['X'].mean_ratio - goe), RATIO_TOLERANCE)
        self.assertGreater(self.reports['gue'].mean_ratio - goe, 0.04)

    def test_spacing_distribution(self):
        self.assertLessEqual(self.reports['X'].ks['goe'], KS_TOLERANCE)


class FlowTests(LabTestCase):
    def test_gap_ratio_is_stable(self):
        config = run_config(EXPONENTIAL, N=scale(128, 512), trials=scale(40, 50), seed=6)
        with capture_output():
            rows = cmd_flow(config, output_dir(), times=(0.0, 0.5, math.inf))
        ratios = [row[1] for row in rows]
        self.assertLessEqual(max(ratios) - min(ratios), scale(0.03, 0.015))

    def test_entry_variance_is_preserved(self):
        data = correlations(FourierSpec.exponential(), 3)
        N = 64
        for t in (0.5, math.inf):
            energy = []
            for seed in range(20):
                H0 = build_X(EnsembleConfig(N=N, spec=FourierSpec.exponential(), seed=seed))
                energy.append(N * np.mean(np.abs(ou_interpolate(H0, data, t, seed).block) ** 2))
            with self.subTest(t=t):
                self.assertAlmostEqual(np.mean(energy), 1.0, delta=0.05)

    def test_row_covariance_is_preserved(self):
        data = correlations(CHAIN, 3)
        N = 64
        products = []
        for seed in range(20):
            H0 = build_X(EnsembleConfig(N=N, spec=CHAIN, seed=seed))
            B = ou_interpolate(H0, data, 0.5, seed, W=3).block
            products.append(N * np.mean(B[:, :-1] * B[:, 1:].conj()))
        self.assertAlmostEqual(np.mean(products).real, data.phi_at(1).real, delta=0.05)


if __name__ == '__main__':
    unittest.main()
