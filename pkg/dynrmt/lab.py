import hashlib
import math
import os
import sys

import numpy as np
from joblib import Parallel, delayed

from .config import RunManifest
from .exceptions import ConfigError
from .ensemble import (
    build_ensemble_member, check_resampling, effective_band, localized_control, ou_interpolate, poisson_control,
)
from .evalfn import correlations, is_admissible
from .export import write_csv, write_json, write_matrix
from .sce import SpectralMeasure, solve_grid
from .spectral import Spectrum, decompose, deloc_metric, local_law_errors, supnorms
from .stats import (
    BULK_DENSITY, MIN_GAPS, bulk_window, check_window, gue_oracle, poisson_spacing_cdf, report, semicircle_density,
    unfold, wigner_surmise_cdf,
)


# Width of the bins of the empirical eigenvalue histogram.
HISTOGRAM_BIN = 0.1

ETA_EXPONENTS = (0.3, 0.5, 0.8)
FLOW_TIMES = (0.0, 0.5, math.inf)

# Imaginary part of the spectral parameter used to read off rho_inf.
DENSITY_ETA = 1e-5


def _member_spectrum(cfg, trial, want_vectors=False):
    member = cfg.for_trial(trial)
    H = build_ensemble_member(member)
    return decompose(H, want_vectors=want_vectors, source_hash=member.fingerprint(ignore=('resampled',)))


def _flow_spectrum(cfg, trial, data, band, t):
    member = cfg.for_trial(trial)
    H = ou_interpolate(build_ensemble_member(member), data, t, member.seed, band)
    return decompose(H, source_hash=member.fingerprint(ignore=('resampled',)))


def _file_hash(filename):
    with open(filename, 'rb') as source:
        return hashlib.sha256(source.read()).hexdigest()


class Lab:
    """One configured run: shared state for the commands that drive it.

    Trials run through a joblib pool; results always come back in trial
    order, so the outputs do not depend on the number of jobs.
    """
    def __init__(self, config, outdir='.', verbosity=0):
        self.config = config
        self.cfg = config.ensemble
        self.outdir = outdir
        self.verbosity = verbosity
        self.artifacts = {}
        self._data = None
        self._measure = None

    def log(self, message, level=1):
        if self.verbosity >= level:
            print(message, file=sys.stderr)

    def path(self, name):
        return os.path.join(self.outdir, name) if self.outdir else name

    @property
    def data(self):
        if self._data is None:
            self._data = correlations(self.cfg.spec, self.cfg.W, self.cfg.convention)
        return self._data

    @property
    def band(self):
        return effective_band(self.data, self.cfg.N, self.cfg.W)

    @property
    def measure(self):
        if self._measure is None:
            self._measure = SpectralMeasure.from_spec(self.cfg.spec, self.cfg.convention)
        return self._measure

    def map_trials(self, function, *args, cfg=None):
        "[function(cfg, trial, *args) for each trial], in trial order."
        cfg = cfg or self.cfg
        jobs = self.config.jobs if self.config.jobs else -1
        self.log("Running %d trials on %s jobs ..." % (self.config.trials, jobs if jobs > 0 else 'all'), 2)
        return Parallel(n_jobs=jobs)(
            delayed(function)(cfg, trial, *args) for trial in range(self.config.trials)
        )

    def spectra(self, resampled=False, want_vectors=False):
        self.log("Diagonalizing %d %s matrices of size %d ..." % (
            self.config.trials, 'H_Y' if resampled else 'H_X', 2 * self.cfg.N))
        if resampled:
            check_resampling(self.cfg)
        return self.map_trials(_member_spectrum, want_vectors, cfg=self.cfg.replace(resampled=resampled))

    def energies(self):
        "The E-grid: the config's grid size over the symbol's support, widened by 10%."
        radius = 1.1 * 2 * math.sqrt(max(self.measure.support[1], 1e-12))
        return np.linspace(-radius, radius, self.config.grid)

    def limit(self, energies, eta=DENSITY_ETA):
        self.log("Solving self-consistent equation on %d points ..." % len(energies))
        return solve_grid(self.measure, np.asarray(energies) + 1j * eta)

    def window(self, spectra, energies, rho):
        "The configured window, checked against rho, or the default bulk window."
        if self.config.window is not None:
            check_window(self.config.window, energies, rho, BULK_DENSITY)
            return self.config.window
        return bulk_window(spectra, energies, rho, BULK_DENSITY)

    def manifest(self, command, parameters):
        return RunManifest(
            command=command,
            config=self.config.to_json(),
            parameters=parameters,
            seed=self.cfg.seed,
        )

    def write_csv(self, name, header, rows, manifest):
        filename = self.path(name)
        self.log("Writing %s ..." % filename)
        write_csv(filename, header, rows, manifest.digest)
        self.artifacts[name] = _file_hash(filename)
        return filename

    def write_json(self, name, data, manifest):
        filename = self.path(name)
        self.log("Writing %s ..." % filename)
        write_json(filename, data, manifest.digest)
        self.artifacts[name] = _file_hash(filename)
        return filename

    def finish(self, manifest):
        "Write manifest.json; it records the artifacts and the wall clock."
        manifest.artifacts.update(self.artifacts)
        filename = self.path('manifest.json')
        self.log("Writing %s ..." % filename)
        write_json(filename, manifest.to_json())
        return manifest


##########################################################################
# Commands
##########################################################################

def _histogram(spectra, radius):
    "Pooled eigenvalue histogram on [-radius, radius]: (edges, densities)."
    bins = max(1, int(round(2 * radius / HISTOGRAM_BIN)))
    edges = np.linspace(-radius, radius, bins + 1)
    pooled = np.concatenate([s.eigenvalues for s in spectra])
    counts, edges = np.histogram(pooled, bins=edges)
    return edges, counts / (pooled.size * np.diff(edges))


def cmd_density(config, outdir='.', eta=None, verbosity=0):
    """rho_inf on the E-grid next to the pooled eigenvalue histogram.

    Writes density.csv (E,rho_limit,rho_empirical) and sce.json. Returns
    the largest gap between a histogram bin and rho_inf at the bin centre,
    over the bins inside |E| <= 0.75 of the spectral edge.
    """
    lab = Lab(config, outdir, verbosity)
    eta = config.eta if eta is None else eta
    manifest = lab.manifest('density', {'eta': eta})

    energies = lab.energies()
    solution = lab.limit(energies, eta)
    rho_limit = solution.density
    edges, densities = _histogram(lab.spectra(lab.cfg.resampled), float(energies[-1]))
    index = np.clip(np.searchsorted(edges, energies, side='right') - 1, 0, len(densities) - 1)
    rho_empirical = densities[index]

    lab.write_csv('density.csv', ('E', 'rho_limit', 'rho_empirical'),
                  zip(energies, rho_limit, rho_empirical), manifest)
    lab.write_json('sce.json', {'records': solution.records()}, manifest)
    lab.finish(manifest)

    edge = 0.75 * float(energies[-1]) / 1.1
    centres = (edges[:-1] + edges[1:]) / 2
    inner = np.abs(centres) <= edge
    deviation = float(np.abs(densities - np.interp(centres, energies, rho_limit))[inner].max())
    print("density: max |rho_empirical - rho_limit| = %.4f over |E| <= %.3f" % (deviation, edge))
    return deviation


def cmd_locallaw(config, outdir='.', exponents=ETA_EXPONENTS, verbosity=0):
    """sup over the bulk E-grid of |m_N - m_inf| at eta = N^-a, per exponent a.

    Writes locallaw.csv (exponent,eta,error_median,error_max,bound).
    """
    lab = Lab(config, outdir, verbosity)
    N = config.N
    exponents = tuple(float(a) for a in exponents)
    manifest = lab.manifest('locallaw', {'eta_exponents': list(exponents)})

    energies = lab.energies()
    rho = lab.limit(energies).density
    spectra = lab.spectra(lab.cfg.resampled)
    bulk = energies[check_window(lab.window(spectra, energies, rho), energies, rho, BULK_DENSITY)]

    etas = np.array([N ** -a for a in exponents])
    m_limit = np.array([lab.limit(bulk, eta).m for eta in etas])
    errors = local_law_errors(spectra, bulk, etas, m_limit)

    rows = [
        (a, eta, float(np.median(errors[n])), float(errors[n].max()), 1.0 / (N * eta))
        for n, (a, eta) in enumerate(zip(exponents, etas))
    ]
    lab.write_csv('locallaw.csv', ('exponent', 'eta', 'error_median', 'error_max', 'bound'), rows, manifest)
    lab.finish(manifest)

    for a, eta, median, worst, bound in rows:
        print("locallaw: a=%g eta=%.3g median error %.3g (%.2f / (N eta))" % (a, eta, median, median / bound))
    return rows


def _references(N, trials, seed, real, fraction=0.4):
    "Gaussian oracle spacings, unfolded by their own semicircle."
    energies = np.linspace(-2, 2, 2001)
    rho = semicircle_density(energies)
    references = {}
    for name, beta in (('gue', 2), ('goe', 1)):
        if beta == 1 and not real:
            continue
        spectra = gue_oracle(N, trials, seed, beta)
        sample = unfold(spectra, bulk_window(spectra, energies, rho, fraction=fraction), energies, rho)
        references[name] = sample
    return references


def _statistics(lab, spectra, energies, rho, references, label, min_gaps):
    window = lab.window(spectra, energies, rho)
    sample = unfold(spectra, window, energies, rho)
    targets = {name: ref.spacings for name, ref in references.items()}
    targets['poisson'] = poisson_spacing_cdf
    targets['surmise'] = wigner_surmise_cdf
    return report(label, sample, targets, min_gaps=min_gaps)


def cmd_universality(config, outdir='.', control=None, min_gaps=MIN_GAPS, verbosity=0):
    """Gap ratios, spacing histograms and KS distances for H_X and H_Y.

    Real evaluation functions are compared with the orthogonal oracle as
    well as the unitary one. ``control='poisson'`` adds an uncorrelated
    diagonal ensemble with the same density.
    """
    lab = Lab(config, outdir, verbosity)
    manifest = lab.manifest('universality', {'control': control, 'min_gaps': min_gaps})

    energies = lab.energies()
    rho = lab.limit(energies).density
    real = lab.cfg.spec.is_real
    lab.log("Sampling Gaussian oracle ...")
    references = _references(2 * config.N, config.trials, lab.cfg.seed, real)

    reports = {}
    for name, ref in references.items():
        reports[name] = report(name, ref, min_gaps=min_gaps)
    reports['X'] = _statistics(lab, lab.spectra(False), energies, rho, references, 'X', min_gaps)
    reports['Y'] = _statistics(lab, lab.spectra(True), energies, rho, references, 'Y', min_gaps)

    if control == 'poisson':
        lab.log("Sampling Poisson control ...")
        spectra = [
            Spectrum.from_eigenvalues(
                np.diag(poisson_control(config.N, lab.cfg.for_trial(t).seed, energies, rho)).real
            )
            for t in range(config.trials)
        ]
        reports['poisson'] = _statistics(lab, spectra, energies, rho, references, 'poisson', min_gaps)
    elif control is not None:
        raise ValueError("unknown universality control %r" % control)

    for name, stat in sorted(reports.items()):
        lab.write_csv('spacing-%s.csv' % name, ('bin_lo', 'bin_hi', 'density'), stat.histogram.rows(), manifest)
    summary = {
        'admissible': bool(is_admissible(lab.cfg.spec, lab.cfg.convention)),
        'real': real,
        'reports': {name: stat.to_json() for name, stat in reports.items()},
    }
    lab.write_json('universality.json', summary, manifest)
    lab.finish(manifest)

    for name, stat in sorted(reports.items()):
        print("universality: %s mean gap ratio %.4f over %d gaps" % (name, stat.mean_ratio, stat.gaps))
    return reports


def cmd_flow(config, outdir='.', times=FLOW_TIMES, min_gaps=MIN_GAPS, verbosity=0):
    """Statistics of the Ornstein-Uhlenbeck flow of H_X at each time t.

    Writes flow.csv (t,mean_ratio,ks_gue,gaps).
    """
    lab = Lab(config, outdir, verbosity)
    times = tuple(float(t) for t in times)
    if any(t < 0 for t in times):
        raise ConfigError("flow times must be nonnegative, got %s" % ", ".join("%g" % t for t in times))
    manifest = lab.manifest('flow', {'times': ['inf' if math.isinf(t) else t for t in times],
                                     'min_gaps': min_gaps})

    energies = lab.energies()
    rho = lab.limit(energies).density
    references = _references(2 * config.N, config.trials, lab.cfg.seed, False)

    rows = []
    for t in times:
        lab.log("Flowing to t=%g ..." % t)
        spectra = lab.map_trials(_flow_spectrum, lab.data, lab.band, t, cfg=lab.cfg.replace(resampled=False))
        stat = _statistics(lab, spectra, energies, rho, references, 't=%g' % t, min_gaps)
        rows.append((t, stat.mean_ratio, stat.ks['gue'], stat.gaps))

    lab.write_csv('flow.csv', ('t', 'mean_ratio', 'ks_gue', 'gaps'), rows, manifest)
    lab.finish(manifest)
    for t, ratio, ks, gaps in rows:
        print("flow: t=%g mean gap ratio %.4f, KS to GUE %.4f" % (t, ratio, ks))
    return rows


def cmd_deloc(config, outdir='.', control=None, verbosity=0):
    """Scaled eigenvector sup-norms 2N max_i |u(i)|^2 inside the window.

    Writes deloc.csv (index,eigenvalue,supnorm2) over all trials, in trial
    order, and deloc.json with the worst value per trial.
    """
    lab = Lab(config, outdir, verbosity)
    manifest = lab.manifest('deloc', {'control': control})

    if control == 'localized':
        spectra = [decompose(localized_control(config.N), want_vectors=True)]
    elif control is None:
        spectra = lab.spectra(lab.cfg.resampled, want_vectors=True)
    else:
        raise ValueError("unknown delocalization control %r" % control)

    if config.window is not None or control is None:
        energies = lab.energies()
        lo, hi = lab.window(spectra, energies, lab.limit(energies).density)
    else:
        lo, hi = -1.0, 1.0
    energy, width = (lo + hi) / 2, (hi - lo) / 2

    rows, metrics = [], []
    for spectrum in spectra:
        norms = supnorms(spectrum)
        inside = np.flatnonzero(np.abs(spectrum.eigenvalues - energy) <= width)
        rows.extend((int(a), spectrum.eigenvalues[a], norms[a]) for a in inside)
        metrics.append(deloc_metric(spectrum, energy, width))

    lab.write_csv('deloc.csv', ('index', 'eigenvalue', 'supnorm2'), rows, manifest)
    lab.write_json('deloc.json', {
        'window': [lo, hi],
        'metric': metrics,
        'worst': max(metrics),
        'dimension': spectra[0].dimension,
    }, manifest)
    lab.finish(manifest)
    print("deloc: worst scaled sup-norm %.3f (dimension %d)" % (max(metrics), spectra[0].dimension))
    return metrics


def cmd_export(config, outdir='.', trial=0, verbosity=0):
    """Dump one ensemble member with its sidecar and its spectrum."""
    lab = Lab(config, outdir, verbosity)
    manifest = lab.manifest('export', {'trial': trial})
    member = lab.cfg.for_trial(trial)
    H = build_ensemble_member(member)

    filename = lab.path('matrix.cbin')
    lab.log("Writing %s ..." % filename)
    matrix, sidecar = write_matrix(filename, H, member.seed, member.fingerprint(), manifest.digest)
    lab.artifacts['matrix.cbin'] = _file_hash(matrix)
    lab.artifacts['matrix.json'] = _file_hash(sidecar)

    spectrum = decompose(H)
    lab.write_csv('spectrum.csv', ('index', 'eigenvalue'), enumerate(spectrum.eigenvalues), manifest)
    lab.finish(manifest)
    print("export: wrote %s (dimension %d)" % (filename, H.dimension))
    return filename
