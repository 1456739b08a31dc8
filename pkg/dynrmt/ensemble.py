"""
Matrices built from doubling-map orbits and their Gaussian counterparts.

The dynamical block X fills row i with f evaluated along N consecutive
points of one orbit, then skips N steps before the next row. H_X is its
Hermitization [[0, X], [X^dagger, 0]]. The same module builds the resampled
block Y, the banded correlation matrices Phi^N and Psi^N, the circulant
comparison matrix, covariance-matched Gaussian blocks and the exact
Ornstein-Uhlenbeck interpolation between the two.
"""
import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.integrate
import scipy.linalg

from .evalfn import evaluate, is_admissible
from .exceptions import AdmissibilityWarning, CovarianceError, ResamplingWarning
from .orbit import orbit_length, philox, resample, sample_orbit, shift_values


# Random streams under one seed. The orbit digits use stream 0 and the
# resampled tails stream 1 (see dynrmt.orbit).
GAUSSIAN_STREAM = 2
CONTROL_STREAM = 4


@dataclass(frozen=True, eq=False)
class HermitianBlockMatrix:
    """The 2N x 2N matrix [[0, B], [B^dagger, 0]], stored as its block B."""
    block: np.ndarray
    seed: int = None
    source: str = ''

    @property
    def N(self):
        return self.block.shape[0]

    @property
    def dimension(self):
        return 2 * self.N

    def dense(self):
        N = self.N
        H = np.zeros((2 * N, 2 * N), dtype=np.complex128)
        H[:N, N:] = self.block
        H[N:, :N] = self.block.conj().T
        return H

    def __repr__(self):
        return '<HermitianBlockMatrix N=%d source=%s>' % (self.N, self.source or '?')


def _frozen(array):
    array.setflags(write=False)
    return array


def _as_block(block, seed, source):
    return HermitianBlockMatrix(
        block=_frozen(np.ascontiguousarray(block, dtype=np.complex128)),
        seed=seed,
        source=source,
    )


##########################################################################
# Dynamical blocks
##########################################################################

def orbit_positions(N, stride='display'):
    """Orbit shift k used by entry (i, j) of the block, as an N x N array.

    "display" puts row i (1-based) on shifts 2N(i-1)+1 ... 2N(i-1)+N, so N
    steps are skipped between rows; "inline" uses (2N-1)i + j.
    """
    i = np.arange(1, N + 1, dtype=np.int64)[:, None]
    j = np.arange(1, N + 1, dtype=np.int64)[None, :]
    if stride == 'display':
        return 2 * N * (i - 1) + j
    elif stride == 'inline':
        return (2 * N - 1) * i + j
    raise ValueError("unknown stride %r" % stride)


def _warn_if_inadmissible(cfg):
    verdict = is_admissible(cfg.spec, cfg.convention)
    if not verdict:
        warnings.warn(
            "building a matrix from an inadmissible evaluation function (%s)" % verdict.reason,
            AdmissibilityWarning,
            stacklevel=3,
        )


def check_resampling(cfg, stacklevel=2):
    "Warn when no digit below the evaluation precision is redrawn."
    if cfg.W >= cfg.precision:
        warnings.warn(
            "resampling window W=%d keeps all %d evaluated digits; H_Y equals H_X" % (cfg.W, cfg.precision),
            ResamplingWarning,
            stacklevel=stacklevel + 1,
        )


def build_X(cfg, orbit=None):
    "The Hermitization of X_ij = f(T^k x) / sqrt(N), k given by the row stride."
    _warn_if_inadmissible(cfg)
    positions = orbit_positions(cfg.N, cfg.stride)
    if orbit is None:
        orbit = sample_orbit(cfg.seed, max(orbit_length(cfg.N, cfg.precision),
                                           int(positions.max()) + cfg.precision))
    points = shift_values(orbit, positions, cfg.precision)
    return _as_block(evaluate(cfg.spec, points) / math.sqrt(cfg.N), cfg.seed, 'X')


def build_Y(cfg, orbit=None):
    "As build_X, with each orbit point replaced by its resampled copy y_k."
    _warn_if_inadmissible(cfg)
    check_resampling(cfg, stacklevel=2)
    positions = orbit_positions(cfg.N, cfg.stride)
    if orbit is None:
        orbit = sample_orbit(cfg.seed, max(orbit_length(cfg.N, cfg.precision),
                                           int(positions.max()) + cfg.precision))
    resampled = resample(orbit, cfg.W, int(positions.max()) + 1, cfg.seed, cfg.precision)
    points = resampled.values(positions)
    return _as_block(evaluate(cfg.spec, points) / math.sqrt(cfg.N), cfg.seed, 'Y')


def build_ensemble_member(cfg, orbit=None):
    if cfg.resampled:
        return build_Y(cfg, orbit)
    return build_X(cfg, orbit)


##########################################################################
# Toeplitz machinery
##########################################################################

def effective_band(data, N, W):
    "The band that actually carries non-zero correlations."
    return max(0, min(W, data.J_max, N - 1))


@dataclass(frozen=True, eq=False)
class BandedToeplitz:
    """Toeplitz matrix with entries t(i - j) for |i - j| <= W, zero elsewhere.

    ``lags`` holds t(-W) ... t(W).
    """
    size: int
    W: int
    lags: np.ndarray

    def entry(self, lag):
        if abs(lag) > self.W:
            return 0j
        return self.lags[lag + self.W]

    def dense(self):
        column = np.zeros(self.size, dtype=np.complex128)
        row = np.zeros(self.size, dtype=np.complex128)
        band = min(self.W, self.size - 1)
        column[:band + 1] = self.lags[self.W:self.W + band + 1]
        row[:band + 1] = self.lags[self.W - band:self.W + 1][::-1]
        return scipy.linalg.toeplitz(column, row)

    def eigenvalues(self):
        return scipy.linalg.eigvalsh(self.dense())


def build_phiN(data, N, W):
    "Phi^N_ij = phi(i - j) on the band |i - j| <= W."
    if W > N:
        raise ValueError("band half-width %d exceeds the matrix size %d" % (W, N))
    return BandedToeplitz(size=N, W=W, lags=_frozen(data.phi_lags(W)))


def build_psiN(data, N, W):
    "Psi^N_ij = psi(|i - j|) on the band; complex symmetric, not Hermitian."
    if W > N:
        raise ValueError("band half-width %d exceeds the matrix size %d" % (W, N))
    return BandedToeplitz(size=N, W=W, lags=_frozen(data.psi_lags(W)))


def build_toeplitz_full(data, N):
    "The unbanded Toeplitz matrix A^N with every lag |j| < N."
    return build_phiN(data, N, N - 1)


def spectral_window(data, W):
    "Interval holding the spectrum of Phi^N: the symbol range widened by the tail."
    tail = data.tail(W)
    return data.g_min - tail, data.g_max + tail


def circulant_eigs(data, N, W):
    "The eigenvalues sum_{|j|<=W} phi(j) exp(2 pi i k j / N) of the wrapped band, sorted."
    if 2 * W >= N:
        raise ValueError("circulant comparison needs 2W < N, got W=%d, N=%d" % (W, N))
    k = np.arange(N)[:, None]
    j = np.arange(-W, W + 1)[None, :]
    values = np.exp(2j * np.pi * k * j / N) @ data.phi_lags(W)
    return np.sort(values.real)


def circulant_matrix(data, N, W):
    "Phi^N with its band wrapped around the torus."
    if 2 * W >= N:
        raise ValueError("circulant comparison needs 2W < N, got W=%d, N=%d" % (W, N))
    column = np.zeros(N, dtype=np.complex128)
    for lag in range(-W, W + 1):
        column[lag % N] = data.phi_at(lag)
    return scipy.linalg.circulant(column)


def interlacing_offset(data, N, W, tolerance=1e-12):
    """Smallest r with c_{j-r} <= e_j <= c_{j+r} for all j.

    c are the sorted circulant eigenvalues and e the sorted eigenvalues of
    Phi^N; rank(circulant - Phi^N) <= 2W forces r <= 2W.
    """
    circ = circulant_eigs(data, N, W)
    exact = build_phiN(data, N, W).eigenvalues()
    slack = tolerance * max(1.0, float(np.abs(circ).max()))

    for r in range(N):
        lower_ok = np.all(circ[:N - r] <= exact[r:] + slack)
        upper_ok = np.all(exact[:N - r] <= circ[r:] + slack)
        if lower_ok and upper_ok:
            return r
    return N


##########################################################################
# Gaussian comparison
##########################################################################

def real_covariance(data, N, W, pseudo=None):
    """Covariance of (Re b, Im b) for one row b of the Gaussian block, unscaled.

    E[b_a conj b_c] = phi(c - a) and E[b_a b_c] = psi(|a - c|), both cut off
    beyond lag W. The pseudo-covariance is dropped when it is negligible,
    unless ``pseudo`` forces the choice.
    """
    band = min(W, N - 1)
    C = build_phiN(data, N, band).dense().T
    if pseudo is None:
        pseudo = data.has_pseudo_covariance
    if pseudo:
        P = build_psiN(data, N, band).dense()
    else:
        P = np.zeros((N, N), dtype=np.complex128)

    sigma = np.empty((2 * N, 2 * N), dtype=np.float64)
    sigma[:N, :N] = (C.real + P.real) / 2
    sigma[N:, N:] = (C.real - P.real) / 2
    sigma[:N, N:] = (P.imag - C.imag) / 2
    sigma[N:, :N] = (C.imag + P.imag) / 2
    return sigma


def _first_bad_minor(sigma, tolerance):
    "Smallest k whose leading k x k minor has an eigenvalue below -tolerance."
    lo, hi = 1, sigma.shape[0]
    while lo < hi:
        mid = (lo + hi) // 2
        if scipy.linalg.eigvalsh(sigma[:mid, :mid])[0] < -tolerance:
            hi = mid
        else:
            lo = mid + 1
    return lo, float(scipy.linalg.eigvalsh(sigma[:lo, :lo])[0])


def covariance_factor(sigma, tolerance=1e-10):
    """A matrix L with L L^T = sigma.

    Cholesky is tried first; a semidefinite sigma falls back to a clipped
    eigendecomposition, and an indefinite one raises CovarianceError.
    """
    try:
        return scipy.linalg.cholesky(sigma, lower=True)
    except scipy.linalg.LinAlgError:
        pass

    w, V = scipy.linalg.eigh(sigma)
    slack = tolerance * max(1.0, float(np.abs(w).max()))
    if w[0] < -slack:
        minor, eigenvalue = _first_bad_minor(sigma, slack)
        raise CovarianceError(minor, eigenvalue)
    return V * np.sqrt(np.clip(w, 0, None))


def _gaussian_rows(factor, N, rows, rng):
    Z = rng.standard_normal((rows, factor.shape[1]))
    R = Z @ factor.T
    return (R[:, :N] + 1j * R[:, N:]) / math.sqrt(N)


def build_gaussian_comparison(data, N, W, seed):
    """Gaussian block with independent rows, each a stationary complex process.

    Row covariance phi and pseudo-covariance psi are cut off at lag W and the
    block is scaled by 1/sqrt(N), so that N E[B_ij conj B_il] = phi(l - j).
    """
    factor = covariance_factor(real_covariance(data, N, W))
    rng = np.random.Generator(philox(seed, GAUSSIAN_STREAM))
    return _as_block(_gaussian_rows(factor, N, N, rng), seed, 'gaussian')


def ou_interpolate(H0, data, t, seed, W=None):
    """Exact Ornstein-Uhlenbeck endpoint e^{-t/2} H0 + sqrt(1 - e^{-t}) G.

    G is an independent Gaussian comparison matrix; t may be math.inf.
    """
    if t < 0:
        raise ValueError("flow time must be nonnegative, got %r" % t)
    if t == 0:
        return H0
    N = H0.N
    if W is None:
        W = effective_band(data, N, N - 1)
    G = build_gaussian_comparison(data, N, W, seed)
    if math.isinf(t):
        return _as_block(G.block, seed, 'ou(inf)')
    decay = math.exp(-t / 2)
    block = decay * H0.block + math.sqrt(-math.expm1(-t)) * G.block
    return _as_block(block, seed, 'ou(%g)' % t)


def xi(data, N, W, a, b, c, d):
    """N E[H_ab conj H_cd] for the comparison ensemble, indices 0-based in 0..2N-1."""
    def locate(row, col):
        if row < N <= col:
            return row, col - N, False
        if col < N <= row:
            return col, row - N, True
        return None

    first, second = locate(a, b), locate(c, d)
    if first is None or second is None:
        return 0j
    i, j, conj_first = first
    k, l, conj_second = second
    if i != k or abs(l - j) > W:
        return 0j

    if not conj_first and not conj_second:
        return data.phi_at(l - j)
    if not conj_first and conj_second:
        return data.psi_at(l - j) if data.has_pseudo_covariance else 0j
    if conj_first and not conj_second:
        return (data.psi_at(l - j) if data.has_pseudo_covariance else 0j).conjugate()
    return data.phi_at(l - j).conjugate()


@dataclass(frozen=True, eq=False)
class GaussianSplit:
    ginibre: HermitianBlockMatrix
    rest: HermitianBlockMatrix
    scale: float

    @property
    def total(self):
        return _as_block(self.ginibre.block + self.rest.block, self.rest.seed, 'gaussian')


def split_gaussian_component(data, N, W, seed, fraction=0.5):
    """Write the comparison block as sqrt(s) Ginibre + independent remainder.

    s is ``fraction`` of the largest multiple of the identity that can be
    taken out of the row covariance while keeping the remainder positive.
    """
    if not 0 <= fraction <= 1:
        raise ValueError("fraction must lie in [0, 1], got %r" % fraction)
    sigma = real_covariance(data, N, W)
    floor = max(float(scipy.linalg.eigvalsh(sigma)[0]), 0.0)
    scale = 2 * fraction * floor

    rest_factor = covariance_factor(sigma - (scale / 2) * np.eye(2 * N))
    rng = np.random.Generator(philox(seed, GAUSSIAN_STREAM))
    ginibre = math.sqrt(scale / 2) * (
        rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
    ) / math.sqrt(N)
    rest = _gaussian_rows(rest_factor, N, N, rng)
    return GaussianSplit(
        ginibre=_as_block(ginibre, seed, 'ginibre'),
        rest=_as_block(rest, seed, 'gaussian-rest'),
        scale=scale,
    )


##########################################################################
# Controls
##########################################################################

def poisson_control(N, seed, energies=None, density=None):
    """Diagonal 2N x 2N matrix with i.i.d. entries.

    Entries follow the tabulated ``density`` on ``energies`` when given,
    and the unit semicircle otherwise, so the spectrum is uncorrelated but
    has the same one-point law as the ensemble it controls.
    """
    if energies is None:
        energies = np.linspace(-2, 2, 2001)
        density = np.sqrt(np.clip(4 - energies ** 2, 0, None)) / (2 * np.pi)
    energies = np.asarray(energies, dtype=np.float64)
    density = np.clip(np.asarray(density, dtype=np.float64), 0, None)

    cdf = scipy.integrate.cumulative_trapezoid(density, energies, initial=0)
    cdf /= cdf[-1]
    rng = np.random.Generator(philox(seed, CONTROL_STREAM))
    diagonal = np.interp(rng.random(2 * N), cdf, energies)
    return np.diag(diagonal).astype(np.complex128)


def localized_control(N):
    "Diagonal matrix with distinct entries; its eigenvectors are basis vectors."
    return np.diag(np.linspace(-1, 1, 2 * N)).astype(np.complex128)
