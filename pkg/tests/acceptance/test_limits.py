"""
The limiting law: the eigenvalue histogram against rho_inf, and the
self-consistent equation against closed forms and the resolvent.
"""
import math
import unittest

import numpy as np

from dynrmt.ensemble import build_gaussian_comparison
from dynrmt.evalfn import FourierSpec, correlations
from dynrmt.lab import cmd_density
from dynrmt.sce import (
    SpectralMeasure, deterministic_block, semicircle_transform, solve_fixed_point, uniqueness_check,
)
from dynrmt.spectral import resolvent

from ..utils import COSINE, EXPONENTIAL, LabTestCase, capture_output, output_dir, run_config, scale


CHAIN = FourierSpec(((1, 1.0), (2, 0.3)))


def grid_points(count, seed):
    rng = np.random.default_rng(seed)
    return rng.uniform(-3, 3, count) + 1j * 10 ** rng.uniform(-2, 0.5, count)


class SemicircleReproductionTests(LabTestCase):
    def test_exponential_histogram(self):
        config = run_config(EXPONENTIAL, N=scale(256, 512), trials=scale(10, 20), seed=11, grid=221)
        with capture_output():
            deviation = cmd_density(config, output_dir())
        self.assertLessEqual(deviation, 0.03)

    def test_cosine_histogram(self):
        "The true correlations of cos give the semicircle of radius sqrt(2)."
        config = run_config(COSINE, N=scale(256, 512), trials=scale(10, 20), seed=12, grid=221,
                            convention='two_sided')
        with capture_output():
            deviation = cmd_density(config, output_dir())
        self.assertLessEqual(deviation, 0.04)


class ClosedFormTests(LabTestCase):
    def test_unit_symbol(self):
        measure = SpectralMeasure.from_spec(FourierSpec.exponential())
        worst = max(abs(solve_fixed_point(measure, z).m - semicircle_transform(z)) for z in grid_points(100, 0))
        self.assertLessEqual(worst, 1e-10)

    def test_cosine_symbol(self):
        measure = SpectralMeasure.from_spec(FourierSpec.cosine())
        worst = max(abs(solve_fixed_point(measure, z).m - 2 * semicircle_transform(2 * z))
                    for z in grid_points(100, 1))
        self.assertLessEqual(worst, 1e-10)

    def test_two_sided_cosine_symbol(self):
        measure = SpectralMeasure.from_spec(FourierSpec.cosine(), 'two_sided')
        worst = max(abs(solve_fixed_point(measure, z).m - semicircle_transform(z, math.sqrt(0.5)))
                    for z in grid_points(100, 2))
        self.assertLessEqual(worst, 1e-10)


class HerglotzTests(LabTestCase):
    def random_problem(self, rng, lowest=-3):
        points = rng.uniform(0.05, 4, size=rng.integers(1, 40))
        z = complex(rng.uniform(-5, 5), 10 ** rng.uniform(lowest, 1))
        return SpectralMeasure('finite_eigenvalues', points), z

    def test_upper_half_plane(self):
        rng = np.random.default_rng(20)
        for probe in range(scale(1000, 10000)):
            measure, z = self.random_problem(rng)
            m = solve_fixed_point(measure, z).m
            self.assertGreater(m.imag, 0, msg='probe %d at z=%r' % (probe, z))

    def test_restarts_agree(self):
        rng = np.random.default_rng(21)
        for probe in range(scale(50, 500)):
            measure, z = self.random_problem(rng, lowest=-1.3)
            spread = uniqueness_check(measure, z, restarts=5, seed=probe)
            self.assertLessEqual(spread, 1e-9, msg='probe %d at z=%r' % (probe, z))


class DeterministicBlockTests(LabTestCase):
    def test_gaussian_average(self):
        data = correlations(CHAIN, 3)
        N = scale(128, 256)
        z = 1j
        m = solve_fixed_point(SpectralMeasure.from_toeplitz(data, N, 3), z).m
        expected = deterministic_block(data, N, 3, z, m)

        seeds = scale(10, 20)
        upper = np.zeros((N, N), dtype=np.complex128)
        lower = np.zeros((N, N), dtype=np.complex128)
        for seed in range(seeds):
            G = resolvent(build_gaussian_comparison(data, N, 3, seed), z)
            upper += G[:N, :N] / seeds
            lower += G[N:, N:] / seeds

        self.assertLessEqual(np.abs(lower - expected).max(), 0.15)
        self.assertLessEqual(np.abs(upper - m * np.eye(N)).max(), 0.15)


if __name__ == '__main__':
    unittest.main()
