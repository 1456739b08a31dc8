"""
Evaluation functions given by finitely many Fourier coefficients.

A FourierSpec describes f(x) = sum_k c_k exp(2 pi i k x). From the
coefficients we get the dyadic symbol g_f, the correlations phi and psi of
f along a doubling-map orbit, and the admissibility test g_f >= g_min > 0.

Two frequency conventions are supported. "printed" sums over k >= 1 and odd
n >= 1 only, which is exact for analytic f (no negative frequencies).
"two_sided" sums over every non-zero k and equals the true orbit
correlation E[f(x) conj f(T^j x)] for any finite spec.
"""
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigError, CorrelationMismatchWarning, MeanNonzeroError
from .orbit import DEFAULT_PRECISION, sample_orbit, shift_values


CONVENTIONS = ('printed', 'two_sided')

# Grid-minimum of g_f below this value means "not admissible".
ADMISSIBILITY_TOLERANCE = 1e-8

# Pseudo-covariances with a smaller norm are treated as zero.
PSEUDO_COVARIANCE_CUTOFF = 1e-12


def _check_convention(convention):
    if convention not in CONVENTIONS:
        raise ConfigError(
            "unknown frequency convention %r; expected one of %s" % (
                convention, ', '.join(CONVENTIONS)
            )
        )


@dataclass(frozen=True)
class FourierSpec:
    """A finite Fourier series, stored as (k, c_k) pairs sorted by frequency.

    Zero coefficients are dropped, so two specs describing the same function
    compare equal.
    """
    coefficients: tuple

    def __post_init__(self):
        cleaned = []
        seen = set()
        for k, c in self.coefficients:
            k = int(k)
            if k in seen:
                raise ConfigError("frequency %d given more than once" % k)
            seen.add(k)
            c = complex(c)
            if c != 0:
                cleaned.append((k, c))
        if not cleaned:
            raise ConfigError("an evaluation function needs at least one non-zero coefficient")
        object.__setattr__(self, 'coefficients', tuple(sorted(cleaned)))

    @classmethod
    def from_mapping(cls, mapping):
        return cls(tuple(mapping.items()))

    @classmethod
    def exponential(cls):
        "f(x) = exp(2 pi i x)."
        return cls(((1, 1.0),))

    @classmethod
    def cosine(cls):
        "f(x) = cos(2 pi x)."
        return cls(((-1, 0.5), (1, 0.5)))

    @classmethod
    def from_json(cls, data):
        """Build a spec from ``{"coeffs": [[k, re, im], ...]}``.

        A bare list of triples is accepted too.
        """
        if isinstance(data, dict):
            try:
                data = data['coeffs']
            except KeyError:
                raise ConfigError("evaluation function is missing the 'coeffs' list")
        try:
            pairs = [(int(k), complex(float(re), float(im))) for k, re, im in data]
        except (TypeError, ValueError):
            raise ConfigError("coefficients must be [k, re, im] triples, got %r" % (data,))
        return cls(tuple(pairs))

    def to_json(self):
        return {'coeffs': [[k, c.real, c.imag] for k, c in self.coefficients]}

    @property
    def frequencies(self):
        return np.array([k for k, c in self.coefficients], dtype=np.int64)

    @property
    def amplitudes(self):
        return np.array([c for k, c in self.coefficients], dtype=np.complex128)

    @property
    def max_frequency(self):
        return int(max(abs(k) for k, c in self.coefficients))

    def coeff(self, k):
        for freq, c in self.coefficients:
            if freq == k:
                return c
        return 0j

    @property
    def mean(self):
        return self.coeff(0)

    @property
    def is_real(self):
        "True when f is real valued, i.e. c_{-k} = conj(c_k)."
        return all(
            abs(self.coeff(-k) - c.conjugate()) <= 1e-15 * max(1.0, abs(c))
            for k, c in self.coefficients
        )

    @property
    def has_negative_frequencies(self):
        return any(k < 0 for k, c in self.coefficients)

    @property
    def l1_norm(self):
        "sum |c_k|, which bounds sup |f|."
        return float(sum(abs(c) for k, c in self.coefficients))

    @property
    def derivative_bound(self):
        "sum 2 pi |k c_k|, which bounds sup |f'|."
        return float(sum(2 * math.pi * abs(k) * abs(c) for k, c in self.coefficients))

    def require_mean_zero(self):
        if self.mean != 0:
            raise MeanNonzeroError(self.mean)

    def rotated(self, theta):
        "The same spec with every coefficient multiplied by exp(i theta)."
        phase = complex(math.cos(theta), math.sin(theta))
        return FourierSpec(tuple((k, c * phase) for k, c in self.coefficients))

    def __repr__(self):
        terms = ', '.join('c_%d=%s' % (k, c) for k, c in self.coefficients)
        return '<FourierSpec %s>' % terms


def evaluate(spec, x):
    "f(x) = sum_k c_k exp(2 pi i k x); ``x`` may be a scalar or an array."
    x = np.asarray(x, dtype=np.float64)
    phases = np.exp(2j * np.pi * np.multiply.outer(x, spec.frequencies))
    values = phases @ spec.amplitudes
    if values.ndim == 0:
        return complex(values)
    return values


##########################################################################
# Dyadic symbol
##########################################################################

def _odd_chains(spec, convention):
    """The coefficient chains (c_n, c_2n, c_4n, ...) for every odd n.

    Chains are keyed by n; "printed" keeps positive n only.
    """
    K = spec.max_frequency
    starts = range(1, K + 1, 2)
    if convention == 'two_sided':
        starts = list(starts) + [-n for n in starts]

    chains = {}
    for n in starts:
        chain = []
        freq = n
        while abs(freq) <= K:
            chain.append(spec.coeff(freq))
            freq *= 2
        if any(c != 0 for c in chain):
            chains[n] = np.array(chain, dtype=np.complex128)
    return chains


def symbol_g(spec, x, convention='printed'):
    """The dyadic symbol g_f(x) = sum_{n odd} |sum_k c_{n 2^k} exp(2 pi i k x)|^2."""
    _check_convention(convention)
    x = np.asarray(x, dtype=np.float64)
    total = np.zeros(x.shape, dtype=np.float64)
    for chain in _odd_chains(spec, convention).values():
        phases = np.exp(2j * np.pi * np.multiply.outer(x, np.arange(len(chain))))
        total += np.abs(phases @ chain) ** 2
    if total.ndim == 0:
        return float(total)
    return total


def symbol_from_correlations(data, x):
    "g_f via its Fourier form phi(0) + 2 Re sum_{j>=1} phi(j) exp(2 pi i j x)."
    x = np.asarray(x, dtype=np.float64)
    lags = np.arange(1, len(data.phi))
    series = np.exp(2j * np.pi * np.multiply.outer(x, lags)) @ data.phi[1:]
    return data.phi[0].real + 2 * series.real


def symbol_grid(spec, size=None):
    "Uniform grid on [0, 1) dense enough to certify the grid minimum of g_f."
    if size is None:
        size = max(4 * spec.max_frequency, 1024)
    return np.arange(size) / size


##########################################################################
# Correlations
##########################################################################

@dataclass(frozen=True, eq=False)
class CorrelationData:
    """phi(j) and psi(j) for 0 <= j < len(phi), plus the symbol bounds.

    Lags beyond the stored range are exactly zero: a spec of maximal
    frequency K has phi(j) = psi(j) = 0 once 2^j > K.
    """
    phi: np.ndarray
    psi: np.ndarray
    g_min: float
    g_max: float
    convention: str = 'printed'

    @property
    def J_max(self):
        return len(self.phi) - 1

    def phi_at(self, j):
        if abs(j) > self.J_max:
            return 0j
        value = self.phi[abs(j)]
        return value if j >= 0 else value.conjugate()

    def psi_at(self, j):
        "psi is even in the lag."
        if abs(j) > self.J_max:
            return 0j
        return self.psi[abs(j)]

    def phi_lags(self, W):
        "phi(-W), ..., phi(W) as an array of length 2W + 1."
        return np.array([self.phi_at(j) for j in range(-W, W + 1)], dtype=np.complex128)

    def psi_lags(self, W):
        return np.array([self.psi_at(j) for j in range(-W, W + 1)], dtype=np.complex128)

    def tail(self, W):
        "sum_{|j| > W} |phi(j)|."
        if W >= self.J_max:
            return 0.0
        return float(2 * np.abs(self.phi[W + 1:]).sum())

    @property
    def has_pseudo_covariance(self):
        return float(np.linalg.norm(self.psi)) > PSEUDO_COVARIANCE_CUTOFF

    @property
    def is_constant_symbol(self):
        return not np.any(np.abs(self.phi[1:]) > 1e-15)


def _correlation_lag(spec, j, convention, pseudo):
    total = 0j
    for k, c in spec.coefficients:
        if convention == 'printed' and k < 1:
            continue
        target = k * 2 ** j
        if pseudo:
            total += c * spec.coeff(-target)
        else:
            total += c.conjugate() * spec.coeff(target)
    return total


def correlations(spec, J_max, convention='printed', grid=None):
    """phi(j) = sum_k conj(c_k) c_{k 2^j} and psi(j) = sum_k c_k c_{-k 2^j}.

    Lags run over 0 <= j <= max(J_max, log2 K); the k-range follows the
    convention. g_min and g_max are the extremes of g_f over a dense grid.
    """
    _check_convention(convention)
    if J_max < 1:
        raise ValueError("J_max must be at least 1, got %d" % J_max)

    support = int(math.floor(math.log2(spec.max_frequency))) if spec.max_frequency > 0 else 0
    J = max(J_max, support)
    phi = np.array([_correlation_lag(spec, j, convention, False) for j in range(J + 1)])
    psi = np.array([_correlation_lag(spec, j, convention, True) for j in range(J + 1)])

    if grid is None:
        grid = symbol_grid(spec)
    g = symbol_g(spec, grid, convention)

    phi.setflags(write=False)
    psi.setflags(write=False)
    return CorrelationData(
        phi=phi,
        psi=psi,
        g_min=float(g.min()),
        g_max=float(g.max()),
        convention=convention,
    )


def quadrature_correlations(spec, J_max, samples=100000, seed=0, precision=DEFAULT_PRECISION):
    """Monte-Carlo estimates of E[f(x) conj f(T^j x)] and E[f(x) f(T^j x)].

    Each sample owns a disjoint block of digits on one exact orbit, so the
    starting points are independent and T^j is an exact digit shift.
    """
    block = J_max + precision
    orbit = sample_orbit(seed, samples * block)
    starts = np.arange(samples, dtype=np.int64) * block
    f0 = evaluate(spec, shift_values(orbit, starts, precision))

    phi = np.empty(J_max + 1, dtype=np.complex128)
    psi = np.empty(J_max + 1, dtype=np.complex128)
    for j in range(J_max + 1):
        fj = evaluate(spec, shift_values(orbit, starts + j, precision))
        phi[j] = np.mean(f0 * fj.conj())
        psi[j] = np.mean(f0 * fj)
    return phi, psi


def correlation_mismatch(spec, J_max, convention='printed', samples=None, seed=0, tolerance=1e-10):
    """Largest gap between the correlations used and the true orbit correlations.

    With ``samples`` unset the reference is the exact two-sided formula;
    otherwise it is the Monte-Carlo quadrature. A gap above ``tolerance``
    raises a CorrelationMismatchWarning.
    """
    used = correlations(spec, J_max, convention)
    if samples is None:
        reference = correlations(spec, used.J_max, 'two_sided')
        ref_phi, ref_psi = reference.phi, reference.psi
    else:
        ref_phi, ref_psi = quadrature_correlations(spec, used.J_max, samples, seed)

    gap = max(
        float(np.abs(used.phi - ref_phi).max()),
        float(np.abs(used.psi - ref_psi).max()),
    )
    if gap > tolerance:
        warnings.warn(
            "correlations under the %r convention differ from the orbit correlations "
            "of %r by up to %.3g" % (convention, spec, gap),
            CorrelationMismatchWarning,
            stacklevel=2,
        )
    return gap


##########################################################################
# Admissibility
##########################################################################

@dataclass(frozen=True)
class Admissibility:
    admissible: bool
    g_min: float
    witness: float = None
    reason: str = ''

    def __bool__(self):
        return self.admissible


def is_admissible(spec, convention='printed', tolerance=ADMISSIBILITY_TOLERANCE):
    "Grid test of inf g_f > 0; an inadmissible verdict carries a witness point."
    _check_convention(convention)
    if spec.mean != 0:
        return Admissibility(
            admissible=False,
            g_min=float('nan'),
            reason='mean-nonzero: c_0 = %r' % spec.mean,
        )

    grid = symbol_grid(spec)
    g = symbol_g(spec, grid, convention)
    lowest = int(np.argmin(g))
    if g[lowest] > tolerance:
        return Admissibility(admissible=True, g_min=float(g[lowest]))
    return Admissibility(
        admissible=False,
        g_min=float(g[lowest]),
        witness=float(grid[lowest]),
        reason='symbol vanishes: g_f(%g) = %.3g' % (grid[lowest], g[lowest]),
    )


def dyadic_dominance(spec):
    """The smallest odd n >= 1 with |c_n| > sum_{k>=1} |c_{n 2^k}|, or None.

    Any such n is a sufficient certificate of admissibility.
    """
    K = spec.max_frequency
    for n in range(1, K + 1, 2):
        lead = abs(spec.coeff(n))
        if lead == 0:
            continue
        rest = 0.0
        freq = 2 * n
        while freq <= K:
            rest += abs(spec.coeff(freq))
            freq *= 2
        if lead > rest:
            return n
    return None
