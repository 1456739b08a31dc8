"""
Spectra, resolvents and the checks built on them.
"""
import hashlib
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .ensemble import HermitianBlockMatrix, build_phiN
from .exceptions import ConfigError, DomainError, SingularMatrixError, SolverError, WindowError


def fingerprint(matrix):
    "Short content hash used to name a matrix in error messages."
    if isinstance(matrix, HermitianBlockMatrix):
        matrix = matrix.block
    data = np.ascontiguousarray(matrix, dtype=np.complex128)
    return hashlib.sha256(data.tobytes()).hexdigest()[:12]


def _dense(H):
    if isinstance(H, HermitianBlockMatrix):
        return H.dense()
    return np.asarray(H, dtype=np.complex128)


@dataclass(frozen=True, eq=False)
class Spectrum:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray = None
    source_hash: str = ''

    @property
    def dimension(self):
        return len(self.eigenvalues)

    @classmethod
    def from_eigenvalues(cls, eigenvalues, source_hash=''):
        values = np.sort(np.asarray(eigenvalues, dtype=np.float64))
        values.setflags(write=False)
        return cls(eigenvalues=values, source_hash=source_hash)


def decompose(H, want_vectors=False, source_hash=None):
    """Eigenvalues (ascending) and optionally eigenvectors of a Hermitian matrix.

    Block matrices go through the SVD of their block: the eigenvalues of
    [[0, B], [B^dagger, 0]] are +-s_k with eigenvectors (u_k, +-v_k)/sqrt(2),
    which makes the spectrum exactly symmetric about zero.
    """
    if source_hash is None:
        source_hash = fingerprint(H)
    try:
        if isinstance(H, HermitianBlockMatrix):
            return _decompose_block(H, want_vectors, source_hash)
        H = np.asarray(H, dtype=np.complex128)
        if want_vectors:
            values, vectors = scipy.linalg.eigh(H)
        else:
            values, vectors = scipy.linalg.eigvalsh(H), None
    except (scipy.linalg.LinAlgError, ValueError) as e:
        raise SolverError(source_hash, str(e))
    return Spectrum(eigenvalues=values, eigenvectors=vectors, source_hash=source_hash)


def _decompose_block(H, want_vectors, source_hash):
    if not want_vectors:
        s = scipy.linalg.svdvals(H.block)
        return Spectrum(
            eigenvalues=np.concatenate([-s, s[::-1]]),
            source_hash=source_hash,
        )

    U, s, Vh = scipy.linalg.svd(H.block)
    V = Vh.conj().T
    negative = np.vstack([U, -V]) / np.sqrt(2)
    positive = np.vstack([U, V])[:, ::-1] / np.sqrt(2)
    return Spectrum(
        eigenvalues=np.concatenate([-s, s[::-1]]),
        eigenvectors=np.hstack([negative, positive]),
        source_hash=source_hash,
    )


def _check_upper(z):
    z = np.asarray(z, dtype=np.complex128)
    if np.any(z.imag <= 0):
        raise DomainError("Stieltjes transforms need Im z > 0, got %r" % (z.tolist(),))
    return z


def stieltjes(spectrum, z):
    "m(z) = (1/n) sum_alpha 1/(lambda_alpha - z); ``z`` may be an array."
    z = _check_upper(z)
    values = np.mean(1.0 / np.subtract.outer(spectrum.eigenvalues, z), axis=0)
    if values.ndim == 0:
        return complex(values)
    return values


##########################################################################
# Resolvent
##########################################################################

def resolvent(H, z):
    "G(z) = (H - z)^{-1} as a dense matrix."
    _check_upper(z)
    dense = _dense(H)
    try:
        return scipy.linalg.solve(dense - z * np.eye(len(dense)), np.eye(len(dense)))
    except scipy.linalg.LinAlgError:
        raise SingularMatrixError("H - z is singular at z = %r" % z)


@dataclass(frozen=True, eq=False)
class ResolventProbe:
    z: complex
    m: complex
    gamma: float
    diag: np.ndarray


def probe(H, z):
    "The normalized trace, diagonal and Gamma = max(1, max |G_ij|) of G(z)."
    G = resolvent(H, z)
    diag = np.diag(G).copy()
    return ResolventProbe(
        z=complex(z),
        m=complex(diag.mean()),
        gamma=max(1.0, float(np.abs(G).max())),
        diag=diag,
    )


def ward_check(H, z):
    """Worst relative deviation from sum_l |G_il|^2 = Im G_ii / eta over all rows."""
    eta = complex(z).imag
    G = resolvent(H, z)
    lhs = np.sum(np.abs(G) ** 2, axis=1)
    rhs = np.diag(G).imag / eta
    return float(np.max(np.abs(lhs - rhs) / np.abs(rhs)))


def ward_split_check(H, z):
    """Deviation of each half-block row sum from Im G_ii / (2 eta).

    The split is not an identity for chiral matrices; the value is a
    diagnostic of how evenly the resolvent weight is shared between halves.
    """
    eta = complex(z).imag
    G = resolvent(H, z)
    N = len(G) // 2
    target = np.diag(G).imag / (2 * eta)
    left = np.sum(np.abs(G[:, :N]) ** 2, axis=1)
    right = np.sum(np.abs(G[:, N:]) ** 2, axis=1)
    deviation = np.maximum(np.abs(left - target), np.abs(right - target)) / np.abs(target)
    return float(deviation.max())


@dataclass(frozen=True)
class BlockResiduals:
    e1: complex
    E2: float
    G3: float
    G4: float

    def propagated(self, W, z):
        "Error carried into the scalar equation: (|e1| + W ||E2||) / |z|."
        return (abs(self.e1) + W * self.E2) / abs(z)


def block_residuals(H, data, z, W=None):
    """Residuals of the block equations solved by the resolvent of H.

    With T1 the normalized trace of the upper-left block and G2 the
    lower-right block, e1 = T1 (-(1/N) Tr(G2 C) - z) - 1 and
    E2 = -T1 G2 Phi^N - z G2 - 1, where C = (Phi^N)^T is the row covariance.
    The off-diagonal blocks are reported by their largest entry.
    """
    G = resolvent(H, z)
    N = len(G) // 2
    if W is None:
        W = min(data.J_max, N - 1)
    phi = build_phiN(data, N, min(W, N - 1)).dense()

    G1, G2 = G[:N, :N], G[N:, N:]
    T1 = np.trace(G1) / N
    e1 = T1 * (-np.trace(G2 @ phi.T) / N - z) - 1
    E2 = -T1 * (G2 @ phi) - z * G2 - np.eye(N)
    return BlockResiduals(
        e1=complex(e1),
        E2=float(np.abs(E2).max()),
        G3=float(np.abs(G[:N, N:]).max()),
        G4=float(np.abs(G[N:, :N]).max()),
    )


##########################################################################
# Eigenvectors
##########################################################################

def supnorms(spectrum):
    "n max_i |u_alpha(i)|^2 for every eigenvector."
    if spectrum.eigenvectors is None:
        raise ValueError("spectrum was decomposed without eigenvectors")
    return spectrum.dimension * np.max(np.abs(spectrum.eigenvectors) ** 2, axis=0)


def deloc_metric(spectrum, energy, width):
    "Worst scaled sup-norm over eigenvectors with |lambda - E| <= w."
    inside = np.abs(spectrum.eigenvalues - energy) <= width
    if not np.any(inside):
        raise WindowError("no eigenvalues in [%g, %g]" % (energy - width, energy + width))
    return float(supnorms(spectrum)[inside].max())


##########################################################################
# Comparisons
##########################################################################

def gfcl_gap(spectrum_x, spectrum_y, zs):
    """|prod_k Im m_X(z_k) - prod_k Im m_Y(z_k)|.

    Both spectra must carry the same ``source_hash``: the fingerprint of
    their configuration with the resampled flag left out.
    """
    if spectrum_x.dimension != spectrum_y.dimension:
        raise ConfigError(
            "cannot compare spectra of dimension %d and %d" % (spectrum_x.dimension, spectrum_y.dimension)
        )
    if spectrum_x.source_hash and spectrum_y.source_hash and spectrum_x.source_hash != spectrum_y.source_hash:
        raise ConfigError(
            "spectra come from different configurations (%s vs %s)" % (
                spectrum_x.source_hash, spectrum_y.source_hash
            )
        )
    zs = np.atleast_1d(np.asarray(zs, dtype=np.complex128))
    product_x = np.prod(stieltjes(spectrum_x, zs).imag)
    product_y = np.prod(stieltjes(spectrum_y, zs).imag)
    return float(abs(product_x - product_y))


def local_law_errors(spectra, energies, etas, m_limit):
    """sup_E |m_N(E + i eta) - m_inf(E + i eta)| per eta and spectrum.

    ``m_limit`` is indexed [eta, energy]; the result is indexed [eta, spectrum].
    """
    energies = np.asarray(energies, dtype=np.float64)
    etas = np.asarray(etas, dtype=np.float64)
    errors = np.empty((len(etas), len(spectra)))
    for a, eta in enumerate(etas):
        z = energies + 1j * eta
        for t, spectrum in enumerate(spectra):
            errors[a, t] = np.abs(stieltjes(spectrum, z) - m_limit[a]).max()
    return errors


##########################################################################
# Band inverses
##########################################################################

@dataclass(frozen=True)
class BandCertificate:
    passed: bool
    worst_ratio: float
    kappa: float
    alpha: float


def band_inverse_certificate(A, W):
    """Check |(A^{-1})_ij| <= 2(2W+1) kappa ||A^{-1}|| alpha^{(|i-j|-W)+}.

    A must satisfy A_ij = 0 whenever |i - j| >= W; kappa = ||A|| ||A^{-1}||
    and alpha = ((kappa-1)/(kappa+1))^{2/(2W+1)}.
    """
    A = np.asarray(A, dtype=np.complex128)
    n = len(A)
    distance = np.abs(np.subtract.outer(np.arange(n), np.arange(n)))
    if W < 1 or np.any(A[distance >= W] != 0):
        raise ValueError("matrix is not %d-banded" % W)

    s = scipy.linalg.svdvals(A)
    if s[-1] <= np.finfo(np.float64).eps * s[0] * n:
        raise SingularMatrixError("band matrix is singular (smallest singular value %.3g)" % s[-1])
    inverse = scipy.linalg.inv(A)

    inverse_norm = 1.0 / s[-1]
    kappa = s[0] * inverse_norm
    alpha = ((kappa - 1) / (kappa + 1)) ** (2.0 / (2 * W + 1))
    excess = np.clip(distance - W, 0, None)
    bound = 2 * (2 * W + 1) * kappa * inverse_norm * alpha ** excess

    with np.errstate(divide='ignore', invalid='ignore'):
        ratio = np.where(bound > 0, np.abs(inverse) / bound, np.where(np.abs(inverse) > 0, np.inf, 0.0))
    worst = float(ratio.max())
    return BandCertificate(passed=worst <= 1.0, worst_ratio=worst, kappa=float(kappa), alpha=float(alpha))
