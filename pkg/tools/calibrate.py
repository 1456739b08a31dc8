# -*- coding: utf-8 -*-
"""Re-measure the frozen constants of the acceptance checks."""

# Standard library imports
import argparse
import json
import sys

# Third party imports
import numpy as np

from dynrmt.config import EnsembleConfig
from dynrmt.ensemble import build_ensemble_member, build_gaussian_comparison
from dynrmt.evalfn import FourierSpec, correlations
from dynrmt.sce import SpectralMeasure, deterministic_block, solve_fixed_point
from dynrmt.spectral import decompose, deloc_metric, resolvent
from dynrmt.stats import gap_ratios, oracle_sample


def deloc_threshold(N, seeds):
    "Worst scaled sup-norm over |lambda| <= 0.5 for the exponential spec."
    cfg = EnsembleConfig(N=N, spec=FourierSpec.exponential(), seed=3)
    values = []
    for trial in range(seeds):
        spectrum = decompose(build_ensemble_member(cfg.for_trial(trial)), want_vectors=True)
        values.append(deloc_metric(spectrum, 0.0, 0.5))
        print('.', end='', flush=True)
    return values


def block_gap(N, seeds, z=1j):
    "Largest entry gap between the seed-averaged Gaussian block and its prediction."
    data = correlations(FourierSpec(((1, 1.0), (2, 0.3))), 3)
    m = solve_fixed_point(SpectralMeasure.from_toeplitz(data, N, 3), z).m
    expected = deterministic_block(data, N, 3, z, m)
    average = np.zeros((N, N), dtype=np.complex128)
    for seed in range(seeds):
        average += resolvent(build_gaussian_comparison(data, N, 3, seed), z)[N:, N:] / seeds
        print('.', end='', flush=True)
    return float(np.abs(average - expected).max())


def oracle_ratios(N, trials):
    "Mean gap ratio of the unitary and orthogonal oracles."
    return {
        beta: gap_ratios(oracle_sample(N, trials, seed=1, beta=beta)).mean
        for beta in (1, 2)
    }


def main(args):
    """Run every measurement and print (or write) the results."""
    print('Measuring delocalization at N=%d ' % args.N, end='', flush=True)
    deloc = deloc_threshold(args.N, args.seeds)
    print()
    print('Measuring the deterministic block at N=%d ' % args.N, end='', flush=True)
    gap = block_gap(args.N, args.seeds)
    print()
    print('Sampling the Gaussian oracles at N=%d ...' % (2 * args.N))
    ratios = oracle_ratios(2 * args.N, args.trials)

    results = {
        'deloc_max': max(deloc),
        'deloc_mean': float(np.mean(deloc)),
        'block_gap': gap,
        'goe_mean_ratio': ratios[1],
        'gue_mean_ratio': ratios[2],
    }
    for name, value in sorted(results.items()):
        print('%-16s %.4f' % (name, value))

    if args.output:
        with open(args.output, 'w', encoding='utf-8') as out:
            json.dump(results, out, sort_keys=True, indent=2)
    return results


if __name__ == '__main__':
    parser = argparse.ArgumentParser(
        description='Re-measure the frozen constants of the acceptance checks.'
    )
    parser.add_argument('--N', type=int, default=256, help='Block size of the measured matrices')
    parser.add_argument('--seeds', type=int, default=20, help='Seeds per measurement')
    parser.add_argument('--trials', type=int, default=50, help='Oracle trials')
    parser.add_argument('-o', '--output', help='Write the results to this JSON file')

    main(parser.parse_args())
    sys.exit(0)
