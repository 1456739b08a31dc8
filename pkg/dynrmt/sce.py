"""
The scalar self-consistent equation and the limiting spectral density.

For a spectral measure rho on [0, inf) and Im z > 0 the Stieltjes
transform m = m(z) of the limiting law solves

    m = F(m),    F(w) = -int drho(x) / (w x + z),

with Im m > 0. rho is either the push-forward of the uniform measure under
the dyadic symbol g_f (the limit N -> inf) or the eigenvalue distribution of
the banded Toeplitz matrix Phi^N (finite N).
"""
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .ensemble import build_phiN
from .evalfn import symbol_from_correlations, symbol_g, symbol_grid
from .exceptions import DomainError, NonConvergence, SingularMatrixError
from .orbit import philox


# Accepted residual |m - F(m)| and the iteration cap of one solve.
TOLERANCE = 1e-12
MAX_ITERATIONS = 10000

EPSILON = np.finfo(np.float64).eps

# Beyond this |z| the initial guess is the large-z asymptote -1/z.
LARGE_Z = 10.0

SYMBOL_GRID = 4096

MEASURE_KINDS = ('symbol_integral', 'finite_eigenvalues')


@dataclass(frozen=True, eq=False)
class SpectralMeasure:
    """Equal-weight atoms of rho.

    For a symbol the atoms are g_f on a uniform grid of [0, 1), which is the
    trapezoidal rule for a periodic integrand; for Phi^N they are its
    eigenvalues.
    """
    kind: str
    points: np.ndarray

    def __post_init__(self):
        if self.kind not in MEASURE_KINDS:
            raise ValueError("unknown measure kind %r" % self.kind)

    @classmethod
    def from_symbol(cls, data, size=SYMBOL_GRID):
        "rho from the Fourier form of the symbol built on ``data``."
        grid = np.arange(size) / size
        return cls('symbol_integral', _frozen(symbol_from_correlations(data, grid)))

    @classmethod
    def from_spec(cls, spec, convention='printed', size=None):
        "rho from the dyadic chains of ``spec`` directly."
        grid = symbol_grid(spec, size or SYMBOL_GRID)
        return cls('symbol_integral', _frozen(symbol_g(spec, grid, convention)))

    @classmethod
    def from_toeplitz(cls, data, N, W):
        return cls('finite_eigenvalues', _frozen(np.sort(build_phiN(data, N, min(W, N - 1)).eigenvalues())))

    @classmethod
    def constant(cls, value):
        return cls('symbol_integral', _frozen(np.array([float(value)])))

    @property
    def mean(self):
        return float(self.points.mean())

    @property
    def support(self):
        return float(self.points.min()), float(self.points.max())


def _frozen(array):
    array = np.asarray(array, dtype=np.float64)
    array.setflags(write=False)
    return array


def m_measure(measure, w):
    "int drho(x) / (x - w)."
    w = complex(w)
    if w.imag == 0:
        raise DomainError("m_measure needs a point off the real axis, got %r" % w)
    return complex(np.mean(1.0 / (measure.points - w)))


def semicircle_transform(z, scale=1.0):
    """(-z + sqrt(z^2 - 4 s^2)) / (2 s^2) on the branch with Im > 0.

    This is the Stieltjes transform of the semicircle law of radius 2s.
    """
    z = np.asarray(z, dtype=np.complex128)
    s2 = scale * scale
    # A product of principal roots is the branch of sqrt(z^2 - 4s^2) that
    # behaves like z at infinity.
    root = np.sqrt(z - 2 * scale) * np.sqrt(z + 2 * scale)
    m = (-z + root) / (2 * s2)
    if m.ndim == 0:
        return complex(m)
    return m


##########################################################################
# Fixed point
##########################################################################

def _F(points, w, z):
    return -np.mean(1.0 / (w * points + z))


def _F_prime(points, w, z):
    return np.mean(points / (w * points + z) ** 2)


@dataclass(frozen=True)
class FixedPoint:
    m: complex
    residual: float
    iterations: int


def initial_guess(measure, z):
    "Semicircle value at the mean of rho for moderate |z|, -1/z far away."
    if abs(z) > LARGE_Z:
        return -1 / z
    scale = math.sqrt(max(measure.mean, 1e-12))
    return semicircle_transform(z, scale)


def _roundoff(points, w, z):
    "Rounding floor of a residual evaluation: a few ulps of sum |1/(wx+z)|."
    return 16 * EPSILON * (float(np.mean(np.abs(1.0 / (w * points + z)))) + abs(w))


def _iterate(points, z, m, shift, tolerance, max_iterations):
    """Guarded Newton steps on m - F(m) - shift, falling back to damped iteration.

    A point is accepted once its residual is below ``tolerance`` or below the
    rounding floor of F at that point, whichever is larger.
    """
    def residual(w):
        return abs(w - _F(points, w, z) - shift)

    r = residual(m)
    best, best_r = m, r
    beta = 1.0
    for iteration in range(max_iterations):
        if r <= max(tolerance, _roundoff(points, m, z)):
            return FixedPoint(m=m, residual=r, iterations=iteration)

        Fm = _F(points, m, z) + shift
        step = None
        slope = 1 - _F_prime(points, m, z)
        if slope != 0:
            candidate = m - (m - Fm) / slope
            if candidate.imag > 0:
                candidate_r = residual(candidate)
                if candidate_r < r:
                    step = candidate, candidate_r

        if step is None:
            candidate = (1 - beta) * m + beta * Fm
            candidate_r = residual(candidate)
            if candidate_r >= r and beta > 2.0 ** -20:
                beta /= 2
                continue
            step = candidate, candidate_r

        m, r = step
        if r < best_r:
            best, best_r = m, r

    raise NonConvergence(z, best, best_r, max_iterations)


def solve_fixed_point(measure, z, start=None, shift=0.0, tolerance=TOLERANCE, max_iterations=MAX_ITERATIONS):
    """Solve m = F(m) + shift in the upper half plane.

    Without a warm start the solve runs down a ladder eta = max(1, Im z),
    ..., Im z at fixed Re z, each rung started from the previous solution.
    """
    z = complex(z)
    if z.imag <= 0:
        raise DomainError("the self-consistent equation needs Im z > 0, got %r" % z)
    points = measure.points

    if start is not None:
        return _iterate(points, z, complex(start), shift, tolerance, max_iterations)

    top = max(1.0, z.imag)
    rungs = max(1, int(math.ceil(math.log10(top / z.imag))))
    etas = np.geomspace(top, z.imag, rungs + 1) if top > z.imag else [z.imag]

    m = None
    total = 0
    for eta in etas:
        rung = complex(z.real, eta)
        if m is None:
            m = initial_guess(measure, rung)
        solution = _iterate(points, rung, m, shift, tolerance, max_iterations)
        m = solution.m
        total += solution.iterations
    return FixedPoint(m=solution.m, residual=solution.residual, iterations=total)


@dataclass(frozen=True, eq=False)
class SceSolution:
    z: np.ndarray
    m: np.ndarray
    residual: np.ndarray
    iterations: np.ndarray

    @property
    def density(self):
        return np.clip(self.m.imag / np.pi, 0, None)

    def records(self):
        "One {z, m, residual, iterations} record per grid point."
        return [
            {
                'z': [float(z.real), float(z.imag)],
                'm': [float(m.real), float(m.imag)],
                'residual': float(r),
                'iterations': int(n),
            }
            for z, m, r, n in zip(self.z, self.m, self.residual, self.iterations)
        ]


def solve_grid(measure, zs):
    """Solve along a z-grid, each point warm-started from its predecessor.

    A warm start that fails to converge is retried with a fresh continuation.
    """
    zs = np.asarray(zs, dtype=np.complex128)
    m = np.empty(len(zs), dtype=np.complex128)
    residual = np.empty(len(zs))
    iterations = np.empty(len(zs), dtype=np.int64)

    previous = None
    for n, z in enumerate(zs):
        solution = None
        if previous is not None:
            try:
                solution = solve_fixed_point(measure, z, start=previous)
            except NonConvergence:
                solution = None
        if solution is None:
            solution = solve_fixed_point(measure, z)
        m[n], residual[n], iterations[n] = solution.m, solution.residual, solution.iterations
        previous = solution.m
    return SceSolution(z=zs, m=m, residual=residual, iterations=iterations)


def density(measure, energies, eta=1e-5):
    "rho(E) = Im m(E + i eta) / pi, clipped at zero."
    energies = np.asarray(energies, dtype=np.float64)
    if eta <= 0:
        raise DomainError("Stieltjes inversion needs eta > 0, got %r" % eta)
    return solve_grid(measure, energies + 1j * eta).density


def bulk_domain(energies, rho, eps=0.05):
    "Mask of grid energies where the density is at least ``eps``."
    return np.asarray(rho) >= eps


##########################################################################
# Properties of the solution
##########################################################################

def uniqueness_check(measure, z, restarts=5, seed=0):
    """Largest distance between solutions started from random points.

    Starts are drawn from the existence domain |w| <= 1/Im z,
    Im w >= Im z / (C / Im z + |z|)^2, with C the top of the support.
    """
    z = complex(z)
    reference = solve_fixed_point(measure, z).m
    rng = np.random.Generator(philox(seed, 5))
    top = max(measure.support[1], 1e-12)
    floor = z.imag / (top / z.imag + abs(z)) ** 2
    radius = 1 / z.imag

    spread = 0.0
    for _ in range(restarts):
        r = radius * math.sqrt(rng.random())
        angle = math.pi * rng.random()
        start = complex(r * math.cos(angle), max(r * math.sin(angle), floor))
        m = solve_fixed_point(measure, z, start=start).m
        spread = max(spread, abs(m - reference))
    return spread


@dataclass(frozen=True)
class ImaginaryIdentity:
    residual: float
    contraction: float


def imaginary_identity(measure, z, m):
    """Check Im m = Im m int x drho/|mx+z|^2 + Im z int drho/|mx+z|^2.

    ``contraction`` is int x drho/|mx+z|^2, which is below 1 at a solution.
    """
    z, m = complex(z), complex(m)
    weight = 1.0 / np.abs(m * measure.points + z) ** 2
    contraction = float(np.mean(measure.points * weight))
    rhs = m.imag * contraction + z.imag * float(np.mean(weight))
    return ImaginaryIdentity(residual=abs(m.imag - rhs), contraction=contraction)


def stability_probe(measure, z, epsilons):
    """|T - T0| / |eps| for solutions T of T = F(T) + eps; zero for eps = 0."""
    base = solve_fixed_point(measure, z)
    factors = []
    for eps in epsilons:
        if eps == 0:
            factors.append(0.0)
            continue
        perturbed = solve_fixed_point(measure, z, start=base.m, shift=eps)
        factors.append(abs(perturbed.m - base.m) / abs(eps))
    return np.array(factors)


def toeplitz_limit_gap(data, sizes, z, W=None):
    "|M_N(z) - m_inf(z)| for each N, Phi^N banded at W (default: full support)."
    limit = solve_fixed_point(SpectralMeasure.from_symbol(data), z).m
    gaps = []
    for N in sizes:
        band = data.J_max if W is None else W
        finite = solve_fixed_point(SpectralMeasure.from_toeplitz(data, N, band), z).m
        gaps.append(abs(finite - limit))
    return np.array(gaps)


def deterministic_block(data, N, W, z, m):
    """-(Phi^N m + z)^{-1}, the deterministic lower-right resolvent block.

    The upper-left block is predicted by m times the identity.
    """
    if complex(m).imag <= 0 or complex(z).imag <= 0:
        raise DomainError("deterministic block needs Im m > 0 and Im z > 0")
    phi = build_phiN(data, N, min(W, N - 1)).dense()
    try:
        return -scipy.linalg.inv(phi * m + z * np.eye(N))
    except scipy.linalg.LinAlgError:
        raise SingularMatrixError("Phi^N m + z is singular at z = %r" % z)
