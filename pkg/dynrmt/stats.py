"""
Local eigenvalue statistics: unfolding, spacings, gap ratios and the
Gaussian reference ensembles.
"""
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.integrate
import scipy.linalg
import scipy.special
import scipy.stats

from .exceptions import SampleSizeError, UnfoldingWarning, WindowError
from .orbit import philox
from .spectral import Spectrum


# Density below which an energy is not treated as bulk.
BULK_DENSITY = 0.05

MIN_GAPS = 1000

POISSON_MEAN_RATIO = 2 * math.log(2) - 1

ORACLE_STREAM = 3


##########################################################################
# Reference distributions
##########################################################################

def semicircle_cdf(x, scale=1.0):
    "CDF of the semicircle law on [-2s, 2s]."
    t = np.clip(np.asarray(x, dtype=np.float64) / (2 * scale), -1, 1)
    return 0.5 + (t * np.sqrt(1 - t * t) + np.arcsin(t)) / np.pi


def semicircle_density(x, scale=1.0):
    x = np.asarray(x, dtype=np.float64)
    return np.sqrt(np.clip(4 * scale * scale - x * x, 0, None)) / (2 * np.pi * scale * scale)


def poisson_spacing_cdf(s):
    return 1 - np.exp(-np.clip(np.asarray(s, dtype=np.float64), 0, None))


def wigner_surmise_cdf(s):
    "CDF of the unitary surmise (32/pi^2) s^2 exp(-4 s^2/pi)."
    s = np.clip(np.asarray(s, dtype=np.float64), 0, None)
    return scipy.special.erf(2 * s / np.sqrt(np.pi)) - (4 * s / np.pi) * np.exp(-4 * s * s / np.pi)


def ks_distance(sample, reference):
    """Kolmogorov-Smirnov distance between a sample and a reference.

    ``reference`` is either a CDF callable or a second sample.
    """
    sample = np.asarray(sample, dtype=np.float64)
    if sample.size == 0:
        raise SampleSizeError("KS distance of an empty sample")
    if callable(reference):
        return float(scipy.stats.kstest(sample, reference).statistic)
    reference = np.asarray(reference, dtype=np.float64)
    if reference.size == 0:
        raise SampleSizeError("KS distance against an empty reference")
    return float(scipy.stats.ks_2samp(sample, reference).statistic)


##########################################################################
# Unfolding
##########################################################################

@dataclass(frozen=True, eq=False)
class UnfoldedSample:
    """Bulk eigenvalues of several trials mapped to unit mean spacing.

    ``unfolded`` keeps one array per trial so that spacings never straddle
    two trials.
    """
    energies: list
    unfolded: list
    window: tuple
    trials: int
    scale: float = 1.0

    @property
    def spacings(self):
        return np.concatenate([np.diff(u) for u in self.unfolded])


def unfolding_map(energies, rho, window, dimension):
    "Return x -> dimension * int_{E_lo}^{x} rho over the window."
    lo, hi = window
    energies = np.asarray(energies, dtype=np.float64)
    rho = np.asarray(rho, dtype=np.float64)
    inside = (energies >= lo) & (energies <= hi)
    grid = np.concatenate([[lo], energies[inside], [hi]])
    values = np.interp(grid, energies, rho)
    cumulative = dimension * scipy.integrate.cumulative_trapezoid(values, grid, initial=0)

    def unfold(x):
        return np.interp(x, grid, cumulative)
    return unfold


def check_window(window, energies, rho, eps=BULK_DENSITY):
    """Raise WindowError unless rho >= eps all over ``window``.

    Returns the mask of the grid points inside the window.
    """
    lo, hi = window
    energies = np.asarray(energies)
    inside = (energies >= lo) & (energies <= hi)
    if not np.any(inside):
        raise WindowError("window [%g, %g] holds no density grid points" % (lo, hi))
    lowest = float(np.min(np.interp([lo, hi], energies, rho).tolist() + list(np.asarray(rho)[inside])))
    if lowest < eps:
        raise WindowError(
            "window [%g, %g] leaves the bulk: density drops to %.3g < %g" % (lo, hi, lowest, eps)
        )
    return inside


def unfold(spectra, window, energies, rho, eps=BULK_DENSITY):
    """Unfold the eigenvalues inside ``window`` by the limiting density.

    Each eigenvalue is mapped to 2N int_{E_lo}^{lambda} rho, and the pooled
    mean spacing is then normalized to exactly one. A normalization far from
    one means the density does not describe the spectra and is warned about.
    """
    lo, hi = window
    check_window(window, energies, rho, eps)

    kept, mapped = [], []
    for spectrum in spectra:
        values = spectrum.eigenvalues[(spectrum.eigenvalues >= lo) & (spectrum.eigenvalues <= hi)]
        mapping = unfolding_map(energies, rho, window, spectrum.dimension)
        kept.append(values)
        mapped.append(mapping(values))

    gaps = np.concatenate([np.diff(u) for u in mapped]) if mapped else np.array([])
    if gaps.size == 0:
        raise SampleSizeError("no spacings inside the unfolding window [%g, %g]" % (lo, hi))
    scale = float(gaps.mean())
    if not 0.9 <= scale <= 1.1:
        warnings.warn(
            "unfolded mean spacing is %.3f before normalization; the density may not match" % scale,
            UnfoldingWarning,
            stacklevel=2,
        )
    return UnfoldedSample(
        energies=kept,
        unfolded=[u / scale for u in mapped],
        window=(float(lo), float(hi)),
        trials=len(spectra),
        scale=scale,
    )


def bulk_window(spectra, energies=None, rho=None, eps=BULK_DENSITY, fraction=0.4):
    """Central ``fraction`` of the pooled eigenvalues, shrunk to where rho >= eps."""
    pooled = np.sort(np.concatenate([s.eigenvalues for s in spectra]))
    lo, hi = np.quantile(pooled, [0.5 - fraction / 2, 0.5 + fraction / 2])
    if energies is None:
        return float(lo), float(hi)

    energies = np.asarray(energies, dtype=np.float64)
    dense = np.asarray(rho) >= eps
    middle = int(np.argmin(np.abs(energies - (lo + hi) / 2)))
    if not dense[middle]:
        raise WindowError("density is below %g at the window centre %g" % (eps, energies[middle]))
    left = middle
    while left > 0 and dense[left - 1]:
        left -= 1
    right = middle
    while right < len(energies) - 1 and dense[right + 1]:
        right += 1
    return float(max(lo, energies[left])), float(min(hi, energies[right]))


##########################################################################
# Spacing statistics
##########################################################################

def _ratios(levels):
    gaps = np.diff(levels)
    gaps = gaps[gaps > 0]
    return np.minimum(gaps[:-1], gaps[1:]) / np.maximum(gaps[:-1], gaps[1:])


@dataclass(frozen=True, eq=False)
class GapRatios:
    ratios: np.ndarray

    @property
    def mean(self):
        return float(self.ratios.mean())


def gap_ratios(sample, min_gaps=MIN_GAPS):
    """r = min(s_a, s_a+1) / max(s_a, s_a+1) over consecutive spacings.

    ``sample`` is an UnfoldedSample or a list of sorted level arrays.
    """
    levels = sample.unfolded if isinstance(sample, UnfoldedSample) else sample
    ratios = np.concatenate([_ratios(np.asarray(u)) for u in levels])
    if ratios.size + len(levels) < min_gaps:
        raise SampleSizeError("gap ratios need at least %d gaps, got %d" % (min_gaps, ratios.size + len(levels)))
    return GapRatios(ratios=ratios)


@dataclass(frozen=True, eq=False)
class SpacingHistogram:
    edges: np.ndarray
    densities: np.ndarray
    count: int

    @property
    def mass(self):
        return float(np.sum(self.densities * np.diff(self.edges)))

    def rows(self):
        return [(lo, hi, d) for lo, hi, d in zip(self.edges[:-1], self.edges[1:], self.densities)]


def spacing_histogram(sample, bins=40, upper=4.0, min_spacings=MIN_GAPS):
    "Normalized histogram of the unfolded nearest-neighbour spacings."
    spacings = sample.spacings
    if spacings.size < min_spacings:
        raise SampleSizeError("spacing histogram needs %d spacings, got %d" % (min_spacings, spacings.size))
    upper = max(upper, float(spacings.max()))
    densities, edges = np.histogram(spacings, bins=bins, range=(0.0, upper), density=True)
    return SpacingHistogram(edges=edges, densities=densities, count=int(spacings.size))


@dataclass(eq=False)
class StatReport:
    label: str
    histogram: SpacingHistogram
    mean_ratio: float
    ks: dict = field(default_factory=dict)
    gaps: int = 0
    window: tuple = None
    scale: float = 1.0

    def to_json(self):
        return {
            'label': self.label,
            'mean_ratio': self.mean_ratio,
            'ks': dict(self.ks),
            'gaps': self.gaps,
            'window': list(self.window) if self.window else None,
            'unfolding_scale': self.scale,
            'histogram': {
                'edges': [float(e) for e in self.histogram.edges],
                'densities': [float(d) for d in self.histogram.densities],
            },
        }


def report(label, sample, references=None, bins=40, min_gaps=MIN_GAPS):
    """Gap ratios, spacing histogram and KS distances to each reference sample."""
    ratios = gap_ratios(sample, min_gaps)
    histogram = spacing_histogram(sample, bins=bins, min_spacings=min_gaps)
    ks = {
        name: ks_distance(sample.spacings, reference)
        for name, reference in sorted((references or {}).items())
    }
    return StatReport(
        label=label,
        histogram=histogram,
        mean_ratio=ratios.mean,
        ks=ks,
        gaps=int(sample.spacings.size),
        window=sample.window,
        scale=sample.scale,
    )


##########################################################################
# Gaussian oracles
##########################################################################

def gaussian_matrix(N, rng, beta=2):
    """Wigner matrix with off-diagonal E|H_ij|^2 = 1/N.

    beta = 2 is the unitary ensemble (real diagonal of variance 1/N),
    beta = 1 the orthogonal one (diagonal variance 2/N).
    """
    if beta == 2:
        A = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
        return (A + A.conj().T) / (2 * math.sqrt(N))
    elif beta == 1:
        A = rng.standard_normal((N, N))
        return (A + A.T) / math.sqrt(2 * N)
    raise ValueError("beta must be 1 or 2, got %r" % beta)


def gue_oracle(N, trials, seed, beta=2):
    "Eigenvalues of ``trials`` independent Gaussian matrices of size N."
    if N < 32:
        raise ValueError("the Gaussian oracle needs N >= 32, got %d" % N)
    spectra = []
    for trial in range(trials):
        rng = np.random.Generator(philox(seed, ORACLE_STREAM, beta, trial))
        H = gaussian_matrix(N, rng, beta)
        spectra.append(Spectrum.from_eigenvalues(scipy.linalg.eigvalsh(H), 'gaussian-%d' % beta))
    return spectra


def oracle_sample(N, trials, seed, beta=2, fraction=0.4):
    "Unfolded bulk sample of the Gaussian oracle, unfolded by the semicircle."
    spectra = gue_oracle(N, trials, seed, beta)
    energies = np.linspace(-2, 2, 2001)
    window = bulk_window(spectra, energies, semicircle_density(energies), fraction=fraction)
    return unfold(spectra, window, energies, semicircle_density(energies))
